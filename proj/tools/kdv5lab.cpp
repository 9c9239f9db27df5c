// kdv5lab: run experiments from a config file or the command line and write
// CSV reports.
//
//   kdv5lab suite --config configs/acceptance.cfg --out-dir out --jobs 2
//   kdv5lab a2-growth s=0 N=8,16,32,64 --out-dir out
//   kdv5lab kinds
//
// Exit status: 0 all passed, 1 some check failed, 2 usage error.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kdv5/report.hpp"

using namespace kdv5;

namespace {

std::pair<std::string, std::string> split_kv(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError(std::string(what) + ": expected key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

const char* type_name(ParamType t) {
  switch (t) {
    case ParamType::Number: return "number";
    case ParamType::Integer: return "integer";
    case ParamType::List: return "list";
    case ParamType::Text: return "text";
    case ParamType::Seed: return "seed";
  }
  return "";
}

void print_kinds() {
  for (auto k : all_kinds()) {
    std::printf("%s: %s\n", to_string(k), kind_summary(k));
    for (const auto& p : kind_params(k)) {
      std::printf("  %-16s %-8s %-16s %s%s\n", p.key.c_str(), type_name(p.type),
                  p.required ? "(required)" : p.default_value.empty() ? "(unset)" : p.default_value.c_str(),
                  p.tolerance ? "[tolerance] " : "", p.help.c_str());
    }
  }
}

int report(const ReportBundle& b) {
  for (const auto& r : b.experiments) {
    std::printf("%s %-28s %-16s %7.2fs\n", r.passed ? "PASS" : "FAIL", r.id.c_str(), to_string(r.kind), r.seconds);
    for (const auto& c : r.checks) {
      if (c.passed) continue;
      std::printf("     %s = %s, need %s %s\n", c.name.c_str(), format_number(c.value).c_str(), c.op.c_str(),
                  format_number(c.threshold).c_str());
    }
    if (!r.error.empty()) std::printf("     error: %s\n", r.error.c_str());
  }
  for (const auto& f : b.files) std::fprintf(stderr, "wrote %s\n", f.c_str());
  return b.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for the fifth-order KdV toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = default_out_dir();
  std::string config;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> tolerances;
  auto* seed_opt = app.add_option("--seed", seed, "seed for every randomized experiment");
  app.add_option("--out-dir", out_dir, "output directory (default $KDV5_OUT_DIR or kdv5-out)");
  app.add_option("--jobs,-j", jobs, "experiments run in parallel")->check(CLI::PositiveNumber);
  app.add_option("--tolerance", tolerances, "override a pass/fail threshold, key=value (repeatable)");
  app.add_option("--config", config, "config file");

  auto* suite = app.add_subcommand("suite", "run every experiment in --config");
  auto* kinds = app.add_subcommand("kinds", "list kinds and their fields");

  std::map<CLI::App*, ExperimentKind> kind_cmds;
  std::vector<std::string> fields;
  std::string id;
  for (auto k : all_kinds()) {
    auto* sub = app.add_subcommand(to_string(k), kind_summary(k));
    sub->add_option("fields", fields, "field=value pairs");
    sub->add_option("--id", id, "experiment id (default: the kind name)");
    kind_cmds[sub] = k;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (kinds->parsed()) {
      print_kinds();
      return 0;
    }
    RunOptions opt;
    opt.out_dir = out_dir;
    opt.jobs = jobs;
    if (*seed_opt) opt.seed = seed;
    for (const auto& t : tolerances) opt.tolerance_overrides.insert(split_kv(t, "--tolerance"));

    std::vector<ExperimentSpec> specs;
    if (suite->parsed()) {
      if (config.empty()) throw UsageError("suite: --config is required");
      specs = load_config(config);
    } else {
      for (const auto& [sub, k] : kind_cmds) {
        if (!sub->parsed()) continue;
        if (!config.empty()) {
          // Only the experiments of this kind from the file.
          for (auto& s : load_config(config))
            if (s.kind == k) specs.push_back(std::move(s));
          if (!fields.empty()) throw UsageError("field=value pairs cannot be combined with --config");
        } else {
          ExperimentSpec s;
          s.kind = k;
          s.id = id.empty() ? to_string(k) : id;
          for (const auto& f : fields) {
            auto [key, value] = split_kv(f, s.id.c_str());
            if (!s.params.emplace(key, value).second) throw UsageError(s.id + ": duplicate field '" + key + "'");
          }
          specs.push_back(std::move(s));
        }
      }
    }
    if (specs.empty()) std::fprintf(stderr, "no experiments to run\n");
    return report(run_all(std::move(specs), opt));
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
