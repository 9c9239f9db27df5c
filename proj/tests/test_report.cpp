#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "kdv5/counterexamples.hpp"
#include "kdv5/report.hpp"

using namespace kdv5;
namespace fs = std::filesystem;

namespace {

std::vector<ExperimentSpec> parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is, "t.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

ExperimentSpec spec(ExperimentKind k, const std::string& id, std::map<std::string, std::string> p) {
  ExperimentSpec s;
  s.kind = k;
  s.id = id;
  s.params = std::move(p);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("kdv5-test-" + name);
  fs::remove_all(p);
  return p;
}

// Data rows of a CSV file, split on commas (no quoting in numeric tables).
std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream is(csv);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || n++ == 0) continue;
    std::vector<std::string> cells;
    std::string c;
    std::istringstream ls(line);
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  CHECK(parse("").empty());
  CHECK(parse("# only a comment\n\n; another\n").empty());
  const auto v = parse(
      "[g]\n"
      "kind = a2-growth\n"
      "N = 8, 16 32,64\n"
      "s = -0.5\n"
      "\n"
      "[m]\n"
      "kind = measure-check\n"
      "seed = 7\n");
  REQUIRE(v.size() == 2);
  CHECK(v[0].id == "g");
  CHECK(v[0].kind == ExperimentKind::A2Growth);
  CHECK(v[0].list("N") == std::vector<double>{8, 16, 32, 64});
  CHECK(v[0].num("s") == -0.5);
  CHECK(v[0].num("t") == 0.5);  // default
  CHECK(v[0].line == 1);
  CHECK(v[0].lines.at("s") == 4);
  CHECK(v[1].seed() == 7);
  CHECK(v[1].randomized());
  CHECK_FALSE(v[0].randomized());
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_of("[a]\nkind = a2-growth\n[a]\nkind = a2-growth\n").find("t.cfg:3: duplicate experiment id 'a'") == 0);
  CHECK(error_of("[a]\nkind = a2-growth\nfoo = 1\n").find("t.cfg:3:") == 0);
  CHECK(error_of("[a]\nfoo = 1\nkind = a2-growth\n").find("t.cfg:2:") == 0);
  CHECK(error_of("kind = a2-growth\n").find("t.cfg:1: key outside") == 0);
  CHECK(error_of("[a]\nkind = nope\n").find("t.cfg:2: unknown kind 'nope'") == 0);
  CHECK(error_of("[a]\nN = 8\n").find("t.cfg:1: experiment 'a' has no kind") == 0);
  CHECK(error_of("[a]\nkind = a2-growth\nN = 8\nN = 16\n").find("t.cfg:4: duplicate key 'N'") == 0);
  CHECK(error_of("[a]\nkind = a2-growth\n\ns = x\n").find("t.cfg:4:") == 0);
  CHECK(error_of("[a]\nkind = a2-growth\nN = 8, 16\n").find("t.cfg:3:") == 0);
  CHECK(error_of("[a]\nkind = scaling\n").find("'seed' is required") != std::string::npos);
  CHECK(error_of("[a b]\nkind = scaling\n").find("t.cfg:1: bad experiment id") == 0);
  CHECK(error_of("[a\n").find("t.cfg:1: unterminated") == 0);
  CHECK(error_of("[a]\nkind = a2-growth\njunk\n").find("t.cfg:3: expected 'key = value'") == 0);
  CHECK(error_of("[a]\nkind = be3-sweep\nexample = 1\n").find("no automatic value") != std::string::npos);
  CHECK(error_of("[a]\nkind = be3-sweep\nexample = 5\n").find("'5' is not one of") != std::string::npos);
  CHECK(error_of("[a]\nkind = solve\ndata = random\n").find("'seed' is required") != std::string::npos);
  CHECK(error_of("[a]\nkind = solve\ndata = noise\n").find("'noise' is not allowed") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), UsageError);
  CHECK_THROWS_AS(parse_kind("bogus"), UsageError);
}

TEST_CASE("kinds and fields") {
  CHECK(all_kinds().size() == 14);
  std::set<std::string> names;
  for (auto k : all_kinds()) {
    names.insert(to_string(k));
    CHECK(parse_kind(to_string(k)) == k);
    std::set<std::string> keys;
    for (const auto& p : kind_params(k)) CHECK(keys.insert(p.key).second);
    // Every kind with a default set validates on its own when seeded.
    auto s = spec(k, "x", {});
    if (keys.count("seed")) s.params["seed"] = "1";
    CHECK_NOTHROW(s.validate());
  }
  CHECK(names.size() == 14);
}

TEST_CASE("shipped acceptance config") {
  const auto v = load_config(std::string(KDV5_SOURCE_DIR) + "/configs/acceptance.cfg");
  std::set<std::string> criteria;
  for (const auto& s : v) {
    CHECK_NOTHROW(s.validate());
    criteria.insert(s.id.substr(0, 3));
  }
  CHECK(criteria.size() == 14);
  CHECK(*criteria.begin() == "c01");
  CHECK(*criteria.rbegin() == "c14");
}

TEST_CASE("run and checks") {
  const auto r = run(spec(ExperimentKind::A2Growth, "g", {}));
  CHECK(r.passed);
  CHECK(r.error.empty());
  REQUIRE(r.tables.size() == 1);
  CHECK(r.tables[0].rows.size() == 4);
  // The summary value is the fit of the emitted column.
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : r.tables[0].rows) pts.emplace_back(std::stod(row[0]), std::stod(row[1]));
  bool found = false;
  for (const auto& c : r.checks) {
    if (c.name != "slope") continue;
    found = true;
    CHECK(c.value == growth_fit(pts).slope);
    CHECK(c.value == doctest::Approx(1.0).epsilon(1e-3));
  }
  CHECK(found);
  CHECK_THROWS_AS(run(spec(ExperimentKind::A2Growth, "g", {{"bogus", "1"}})), UsageError);
}

TEST_CASE("failed rows do not stop the run") {
  const auto r = run(spec(ExperimentKind::A2Oracle, "o", {{"data", "gaussian"}, {"t", "0.5"}, {"gauss_delta", "0.3"}}));
  CHECK_FALSE(r.passed);
  CHECK(r.error.empty());
  REQUIRE(r.tables[0].rows.size() == 1);
  CHECK(r.tables[0].rows[0][3].find("accuracy-failure") == 0);
  // Runtime errors outside a row end the experiment but not the batch.
  const auto b = run_all({spec(ExperimentKind::A2Growth, "bad", {{"c3", "0"}}), spec(ExperimentKind::A2Growth, "ok", {})},
                         RunOptions{});
  CHECK_FALSE(b.experiments[0].passed);
  CHECK(b.experiments[0].error.find("c3") != std::string::npos);
  CHECK(b.experiments[1].passed);
  CHECK_FALSE(b.passed);
}

TEST_CASE("reports are reproducible byte for byte") {
  std::vector<ExperimentSpec> v = {
      spec(ExperimentKind::Scaling, "sc", {{"members", "2"}, {"seed", "4"}}),
      spec(ExperimentKind::MultiplierCheck, "mu", {{"instances", "3"}, {"n_max", "4"}, {"seed", "9"}}),
      spec(ExperimentKind::A2Growth, "gr", {}),
  };
  RunOptions o1, o2;
  o1.out_dir = temp_dir("a").string();
  o2.out_dir = temp_dir("b").string();
  o2.jobs = 3;
  const auto b1 = run_all(v, o1);
  const auto b2 = run_all(v, o2);
  CHECK(b1.passed);
  REQUIRE(b1.files.size() == b2.files.size());
  CHECK(b1.files.size() == 5);
  for (std::size_t i = 0; i < b1.files.size(); ++i) {
    CHECK(fs::path(b1.files[i]).filename() == fs::path(b2.files[i]).filename());
    CHECK(slurp(b1.files[i]) == slurp(b2.files[i]));
  }
  const auto summary = slurp(fs::path(o1.out_dir) / "summary.csv");
  CHECK(summary.rfind("# kdv5lab v1 summary\nid,kind,check,value,op,threshold,passed\n", 0) == 0);
  const auto sc = slurp(fs::path(o1.out_dir) / "sc.scaling.csv");
  CHECK(sc.rfind("# kdv5lab v1 kind=scaling id=sc table=scaling\nmember,lambda,lhs,rhs,holds\n", 0) == 0);
  CHECK(rows_of(sc).size() == 8);

  // A different seed changes the data.
  RunOptions o3 = o1;
  o3.out_dir = temp_dir("c").string();
  o3.seed = 5;
  run_all(v, o3);
  CHECK(slurp(fs::path(o3.out_dir) / "sc.scaling.csv") != sc);
  CHECK(slurp(fs::path(o3.out_dir) / "gr.growth.csv") == slurp(fs::path(o1.out_dir) / "gr.growth.csv"));
}

TEST_CASE("tolerance overrides") {
  RunOptions o;
  o.tolerance_overrides["slope_min"] = "1.5";
  auto b = run_all({spec(ExperimentKind::A2Growth, "g", {})}, o);
  CHECK_FALSE(b.passed);
  // Overrides skip kinds without the key.
  b = run_all({spec(ExperimentKind::PsiGrowth, "p", {})}, o);
  CHECK(b.passed);
  o.tolerance_overrides = {{"no_such_tol", "1"}};
  CHECK_THROWS_AS(run_all({spec(ExperimentKind::A2Growth, "g", {})}, o), UsageError);
  o.tolerance_overrides = {{"t", "1"}};  // a field, not a tolerance
  CHECK_THROWS_AS(run_all({spec(ExperimentKind::A2Growth, "g", {})}, o), UsageError);
  o.tolerance_overrides.clear();
  o.jobs = 0;
  CHECK_THROWS_AS(run_all({}, o), UsageError);
  CHECK_THROWS_AS(run_all({spec(ExperimentKind::A2Growth, "g", {}), spec(ExperimentKind::A2Growth, "g", {})}, RunOptions{}),
                  UsageError);
}

TEST_CASE("number formatting and csv quoting") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-HUGE_VAL) == "-inf");
  ExperimentReport r;
  r.id = "q";
  r.kind = ExperimentKind::A2Oracle;
  Table t{"x", {"a", "b"}, {{"1,2", "say \"hi\""}}};
  std::ostringstream os;
  write_csv(os, r, t);
  CHECK(os.str() == "# kdv5lab v1 kind=a2-oracle id=q table=x\na,b\n\"1,2\",\"say \"\"hi\"\"\"\n");
}

TEST_CASE("default output directory") {
  ::setenv("KDV5_OUT_DIR", "/tmp/somewhere", 1);
  CHECK(default_out_dir() == "/tmp/somewhere");
  ::unsetenv("KDV5_OUT_DIR");
  CHECK(default_out_dir() == "kdv5-out");
}
