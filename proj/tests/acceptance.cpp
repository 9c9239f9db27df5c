// Runs the shipped acceptance config and prints one PASS/FAIL line per
// criterion. Experiments belong to criterion k when their id starts with
// "c<kk>-". Usage: kdv5_acceptance <config> [out-dir]

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "kdv5/report.hpp"

using namespace kdv5;

namespace {

struct Criterion {
  const char* title;
  // Wall-time limits: total over the criterion's experiments, or per experiment.
  double total_seconds = 0.0;
  double each_seconds = 0.0;
};

const std::map<int, Criterion> kCriteria = {
    {1, {"A2 oracle equivalence", 30.0, 0.0}},
    {2, {"C2-failure growth rate", 0.0, 0.0}},
    {3, {"norm-inflation floor and data decay", 0.0, 0.0}},
    {4, {"psi_N growth rate", 0.0, 0.0}},
    {5, {"cubic growth rate", 0.0, 0.0}},
    {6, {"appendix lower bounds and raster agreement", 0.0, 0.0}},
    {7, {"necessary-condition thresholds", 0.0, 300.0}},
    {8, {"measure bounds", 0.0, 0.0}},
    {9, {"TT* identity and composition", 0.0, 0.0}},
    {10, {"conservation laws", 0.0, 0.0}},
    {11, {"solver order and linear limit", 0.0, 0.0}},
    {12, {"scaling inequality", 0.0, 0.0}},
    {13, {"a-priori boundedness", 0.0, 0.0}},
    {14, {"norm-space invariant suite", 0.0, 0.0}},
};

int criterion_of(const std::string& id) {
  if (id.size() < 4 || id[0] != 'c' || id[3] != '-') return 0;
  return std::atoi(id.substr(1, 2).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <config> [out-dir]\n", argv[0]);
    return 2;
  }
  RunOptions opt;
  opt.out_dir = argc > 2 ? argv[2] : default_out_dir();
  ReportBundle b;
  try {
    b = run_all(load_config(argv[1]), opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  std::map<int, std::vector<const ExperimentReport*>> groups;
  for (const auto& r : b.experiments) groups[criterion_of(r.id)].push_back(&r);

  bool all = true;
  for (const auto& [k, c] : kCriteria) {
    const auto it = groups.find(k);
    bool ok = it != groups.end() && !it->second.empty();
    std::string detail;
    double total = 0.0;
    if (ok) {
      for (const auto* r : it->second) {
        ok = ok && r->passed;
        total += r->seconds;
        if (c.each_seconds > 0.0 && r->seconds > c.each_seconds) ok = false;
        for (const auto& ch : r->checks) {
          if (ch.name == "failed_rows") continue;
          char buf[256];
          std::snprintf(buf, sizeof buf, "%s%s %s=%.4g %s %.4g", detail.empty() ? "" : "; ", r->id.c_str(),
                        ch.name.c_str(), ch.value, ch.op.c_str(), ch.threshold);
          detail += buf;
        }
        if (!r->error.empty()) detail += "; " + r->id + " error: " + r->error;
        if (c.each_seconds > 0.0) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "; %s %.1fs <= %.0fs", r->id.c_str(), r->seconds, c.each_seconds);
          detail += buf;
        }
      }
      if (c.total_seconds > 0.0) {
        ok = ok && total <= c.total_seconds;
        char buf[64];
        std::snprintf(buf, sizeof buf, "; runtime %.1fs <= %.0fs", total, c.total_seconds);
        detail += buf;
      }
    } else {
      detail = "no experiments in the config";
    }
    all = all && ok;
    std::printf("%s criterion %2d (%s): %s\n", ok ? "PASS" : "FAIL", k, c.title, detail.c_str());
  }
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
