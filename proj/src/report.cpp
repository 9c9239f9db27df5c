#include "kdv5/report.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "experiments.hpp"
#include "kdv5/estimates.hpp"

namespace kdv5 {

namespace {

constexpr const char* kCsvVersion = "v1";

struct KindEntry {
  ExperimentKind kind;
  const char* name;
  const char* summary;
};

const KindEntry kKinds[] = {
    {ExperimentKind::Solve, "solve", "evolve one datum at dt, dt/2, ... and report self-convergence"},
    {ExperimentKind::A2Growth, "a2-growth", "growth of ||A2(phi_N)(t)||_{H^{s,a}} in N"},
    {ExperimentKind::A2Inflation, "a2-inflation", "A2 floor / delta^2 and data decay for phi_{N,delta}"},
    {ExperimentKind::PsiGrowth, "psi-growth", "growth of ||A2(psi_N)(t)||_{H^{s,a}} in N"},
    {ExperimentKind::A3Growth, "a3-growth", "growth of ||A3(phi_N)(t)||_{H^{s,a}} in N"},
    {ExperimentKind::Be3Sweep, "be3-sweep", "slope sign change of the bilinear ratio in b"},
    {ExperimentKind::AppendixConv, "appendix-conv", "rectangle convolution lower bounds and raster check"},
    {ExperimentKind::MeasureCheck, "measure-check", "measure bound constants under grid refinement"},
    {ExperimentKind::MultiplierCheck, "multiplier-check", "TT* identity and the composition inequality"},
    {ExperimentKind::Conservation, "conservation", "L2 and H1-functional drift of the integrable preset"},
    {ExperimentKind::Apriori, "apriori", "a-priori bound ratio under refinement"},
    {ExperimentKind::Scaling, "scaling", "scaling inequality on random data"},
    {ExperimentKind::A2Oracle, "a2-oracle", "spectral A2 against time quadrature"},
    {ExperimentKind::NormSuite, "norm-suite", "norm homogeneity, additivity, embedding chain, admissibility"},
};

ParamInfo num(const char* key, const char* def, const char* help) {
  return {key, ParamType::Number, def, false, false, help};
}
ParamInfo integer(const char* key, const char* def, const char* help) {
  return {key, ParamType::Integer, def, false, false, help};
}
ParamInfo list(const char* key, const char* def, const char* help) {
  return {key, ParamType::List, def, false, false, help};
}
ParamInfo text(const char* key, const char* def, const char* help) {
  return {key, ParamType::Text, def, false, false, help};
}
ParamInfo tol(const char* key, const char* def, const char* help) {
  return {key, ParamType::Number, def, false, true, help};
}
ParamInfo seed(bool required) {
  return {"seed", ParamType::Seed, "", required, false, "random seed"};
}

const std::vector<ParamInfo> kSolve = {
    num("L_pi", "16", "box length / pi"),
    integer("n", "256", "grid points"),
    num("dt", "1e-4", "coarsest step"),
    num("T", "0.01", "final time"),
    text("preset", "lax", "lax, linear or custom"),
    num("alpha", "5", "alpha of the lax preset"),
    num("c1", "0", "custom c1"),
    num("c2", "0", "custom c2"),
    num("c3", "0", "custom c3"),
    text("data", "bump", "bump or random"),
    num("amplitude", "0.75", "data amplitude"),
    num("width", "1", "bump width"),
    seed(false),
    integer("levels", "3", "number of step sizes dt / 2^i"),
    integer("pad", "2", "dealiasing pad factor"),
    tol("ratio_min", "11", "minimum successive-difference ratio"),
    tol("linear_tol", "1e-10", "propagator match for the linear preset"),
};

const std::vector<ParamInfo> kA2Growth = {
    num("s", "0", "output regularity"),
    num("a", "0", "output low-frequency weight"),
    num("t", "0.5", "time"),
    list("N", "8,16,32,64", "frequencies"),
    num("c2", "1", "c2"),
    num("c3", "2", "c3"),
    num("rel_tol", "1e-8", "quadrature tolerance"),
    tol("slope_min", "0.9", "minimum fitted slope"),
};

const std::vector<ParamInfo> kA2Inflation = {
    num("s", "0", "output regularity"),
    num("a", "-1", "low-frequency weight"),
    num("data_s", "-0.5", "regularity of the data norm"),
    num("delta", "0.1", "data size"),
    num("t", "0.5", "time"),
    list("N", "8,16,32,64", "frequencies"),
    num("c2", "1", "c2"),
    num("c3", "2", "c3"),
    num("rel_tol", "1e-8", "quadrature tolerance"),
    tol("floor_min", "0.1", "minimum of ||A2|| / delta^2"),
    tol("data_slope_max", "-0.4", "maximum slope of the data norm"),
    tol("rate_tol", "0.15", "allowed distance of the data slope from data_s + 2a + 2"),
};

const std::vector<ParamInfo> kPsiGrowth = {
    num("s", "-0.5", "regularity"),
    num("a", "-0.5", "low-frequency weight"),
    num("t", "0.5", "time"),
    list("N", "8,16,32,64", "frequencies"),
    num("c2", "1", "c2"),
    num("c3", "2", "c3"),
    num("rel_tol", "1e-8", "quadrature tolerance"),
    tol("slope_tol", "0.15", "allowed shortfall below max{-2(s+2a+2), 4(a+1/4)}"),
};

const std::vector<ParamInfo> kA3Growth = {
    num("s", "-0.5", "regularity"),
    num("a", "0", "low-frequency weight"),
    num("t", "0.5", "time"),
    list("N", "8,16,32,64", "frequencies"),
    num("c1", "1", "c1"),
    num("c2", "1", "c2"),
    num("c3", "2", "c3"),
    num("rel_tol", "1e-3", "quadrature tolerance"),
    num("p_cut", "100", "rotation cut for the inner phase"),
    num("q_cut", "2000", "rotation cut for the outer phase"),
    tol("slope_lo", "0.35", "slope window lower end"),
    tol("slope_hi", "0.65", "slope window upper end"),
};

const std::vector<ParamInfo> kBe3Sweep = {
    text("example", "2", "1, 2, 3a or 3b"),
    num("s", "-0.25", "regularity"),
    num("a", "-0.5", "low-frequency weight"),
    num("b_lo", "0.3", "first b"),
    num("b_hi", "0.9", "last b"),
    num("b_step", "0.05", "b spacing"),
    list("N", "8,16,32,64,128", "frequencies"),
    text("expected", "auto", "expected crossing; auto is 3a/5 + 9/10 for 2 and 1/2 for 3b"),
    tol("threshold_tol", "0.05", "allowed distance of the crossing from expected"),
};

const std::vector<ParamInfo> kAppendixConv = {
    text("examples", "1,2,3a,3b", "examples"),
    list("N", "8,16,32,64,128", "frequencies"),
    integer("cells", "16", "raster cells across the smaller side"),
    tol("c_min", "0.5", "minimum lower-bound constant"),
    tol("raster_tol", "0.05", "maximum raster deviation"),
};

const std::vector<ParamInfo> kMeasureCheck = {
    text("lemma", "both", "m, m1 or both"),
    integer("count", "100", "random configurations"),
    integer("resolution", "1024", "base raster resolution"),
    seed(true),
    tol("stability_tol", "0.1", "allowed relative change of the constant"),
};

const std::vector<ParamInfo> kMultiplierCheck = {
    integer("instances", "20", "random instances"),
    integer("n_max", "16", "largest group order"),
    integer("k", "2", "multiplier arity"),
    integer("restarts", "8", "random restarts per norm"),
    seed(true),
    tol("gap_tol", "0.05", "maximum TT* relative gap"),
};

const std::vector<ParamInfo> kConservation = {
    num("L_pi", "16", "box length / pi"),
    integer("n", "256", "grid points"),
    num("dt", "1e-5", "time step"),
    num("T", "0.01", "final time"),
    num("alpha", "5", "preset alpha"),
    num("amplitude", "0.75", "bump amplitude"),
    num("width", "1", "bump width"),
    integer("typo", "1", "also run c1 = -2 alpha / 5 (0 or 1)"),
    integer("monitor_every", "10", "steps between monitor rows"),
    integer("pad", "2", "dealiasing pad factor"),
    tol("l2_tol", "1e-8", "maximum L2 drift"),
    tol("h1_tol", "1e-6", "maximum H1-functional drift"),
    tol("typo_min", "1e-2", "minimum H1-functional drift of the typo variant"),
};

const std::vector<ParamInfo> kApriori = {
    num("a", "-0.5", "low-frequency weight"),
    num("T", "0.01", "final time"),
    num("L_pi", "16", "box length / pi"),
    integer("n", "256", "grid points"),
    integer("n_refined", "512", "refined grid points"),
    num("dt", "1e-4", "step on the base grid (halved on the refined one)"),
    num("alpha", "5", "preset alpha"),
    integer("members", "10", "ensemble size"),
    num("amplitude", "0.3", "data amplitude"),
    seed(true),
    tol("refine_tol", "0.1", "allowed relative change of the ratio"),
};

const std::vector<ParamInfo> kScaling = {
    num("s", "0", "regularity"),
    num("a", "-0.5", "low-frequency weight"),
    list("lambda", "1,2,4,8", "scaling factors"),
    integer("members", "10", "random data"),
    num("L_pi", "16", "box length / pi"),
    integer("n", "256", "grid points"),
    num("amplitude", "0.3", "data amplitude"),
    seed(true),
};

const std::vector<ParamInfo> kA2Oracle = {
    text("data", "gaussian,bump", "gaussian and/or bump"),
    list("t", "0.05,0.1,0.5", "times"),
    num("c2", "1", "c2"),
    num("c3", "2", "c3"),
    integer("n_quad", "6", "Gauss-Legendre nodes per panel"),
    num("gauss_delta", "0.0035", "frequency spacing for exp(-xi^2)"),
    num("gauss_cut", "4.6", "support cut for exp(-xi^2)"),
    num("bump_delta", "0.005", "frequency spacing for the bump"),
    num("bump_radius", "4", "bump support radius"),
    tol("diff_tol", "1e-6", "maximum relative difference"),
};

const std::vector<ParamInfo> kNormSuite = {
    num("s", "0", "regularity"),
    num("a", "-0.5", "low-frequency weight"),
    num("eps", "0.01", "epsilon of X^{s,a,3/4+eps}"),
    integer("samples", "10", "random fields for homogeneity and additivity"),
    integer("chain_samples", "50", "random fields per embedding batch"),
    seed(true),
    tol("hom_tol", "1e-12", "relative tolerance of the exact identities"),
    tol("holdout_factor", "2", "holdout constants may exceed the fitted ones by this factor"),
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto r = std::from_chars(first, t.data() + t.size(), out);
  return r.ec == std::errc() && r.ptr == t.data() + t.size() && std::isfinite(out);
}

template <class T>
bool parse_int(const std::string& s, T& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
  return r.ec == std::errc() && r.ptr == t.data() + t.size();
}

std::vector<std::string> split_items(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

AppendixExample parse_example_or_usage(const ExperimentSpec& s, const std::string& field, const std::string& v) {
  try {
    return parse_example(v);
  } catch (const InvalidInput&) {
    throw UsageError(s.id + ": field '" + field + "': '" + v + "' is not one of 1, 2, 3a, 3b");
  }
}

const ParamInfo* find_param(ExperimentKind k, const std::string& key) {
  for (const auto& p : kind_params(k))
    if (p.key == key) return &p;
  return nullptr;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "?";
}

const char* kind_summary(ExperimentKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.summary;
  return "";
}

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& e : kKinds)
    if (name == e.name) return e.kind;
  throw UsageError("unknown kind '" + name + "'");
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> v = [] {
    std::vector<ExperimentKind> out;
    for (const auto& e : kKinds) out.push_back(e.kind);
    return out;
  }();
  return v;
}

const std::vector<ParamInfo>& kind_params(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Solve: return kSolve;
    case ExperimentKind::A2Growth: return kA2Growth;
    case ExperimentKind::A2Inflation: return kA2Inflation;
    case ExperimentKind::PsiGrowth: return kPsiGrowth;
    case ExperimentKind::A3Growth: return kA3Growth;
    case ExperimentKind::Be3Sweep: return kBe3Sweep;
    case ExperimentKind::AppendixConv: return kAppendixConv;
    case ExperimentKind::MeasureCheck: return kMeasureCheck;
    case ExperimentKind::MultiplierCheck: return kMultiplierCheck;
    case ExperimentKind::Conservation: return kConservation;
    case ExperimentKind::Apriori: return kApriori;
    case ExperimentKind::Scaling: return kScaling;
    case ExperimentKind::A2Oracle: return kA2Oracle;
    case ExperimentKind::NormSuite: return kNormSuite;
  }
  throw UsageError("unknown kind");
}

bool ExperimentSpec::has(const std::string& key) const { return params.count(key) > 0; }

std::string ExperimentSpec::raw(const std::string& key) const {
  const ParamInfo* p = find_param(kind, key);
  if (!p) throw UsageError(id + ": kind " + to_string(kind) + " has no field '" + key + "'");
  const auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (p->required || p->default_value.empty()) throw UsageError(id + ": field '" + key + "' is required");
  return p->default_value;
}

double ExperimentSpec::num(const std::string& key) const {
  double v;
  if (!parse_double(raw(key), v)) throw UsageError(id + ": field '" + key + "': expected a number");
  return v;
}

int ExperimentSpec::integer(const std::string& key) const {
  int v;
  if (!parse_int(raw(key), v)) throw UsageError(id + ": field '" + key + "': expected an integer");
  return v;
}

std::vector<double> ExperimentSpec::list(const std::string& key) const {
  const auto items = split_items(raw(key));
  if (items.empty()) throw UsageError(id + ": field '" + key + "': empty list");
  std::vector<double> out;
  for (const auto& s : items) {
    double v;
    if (!parse_double(s, v)) throw UsageError(id + ": field '" + key + "': '" + s + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::string ExperimentSpec::text(const std::string& key) const { return trim(raw(key)); }

std::uint64_t ExperimentSpec::seed() const {
  std::uint64_t v;
  if (!parse_int(raw("seed"), v)) throw UsageError(id + ": field 'seed': expected a non-negative integer");
  return v;
}

bool ExperimentSpec::randomized() const {
  switch (kind) {
    case ExperimentKind::MeasureCheck:
    case ExperimentKind::MultiplierCheck:
    case ExperimentKind::Apriori:
    case ExperimentKind::Scaling:
    case ExperimentKind::NormSuite:
      return true;
    case ExperimentKind::Solve:
      return has("data") && trim(params.at("data")) == "random";
    default:
      return false;
  }
}

void ExperimentSpec::validate() const {
  if (!valid_id(id)) throw UsageError("experiment id '" + id + "': use letters, digits, '-', '_' or '.'");
  for (const auto& [key, value] : params) {
    if (!find_param(kind, key))
      throw UsageError(id + ": kind " + std::string(to_string(kind)) + " has no field '" + key + "'");
  }
  if (randomized() && !has("seed")) throw UsageError(id + ": field 'seed' is required for randomized runs");
  for (const auto& p : kind_params(kind)) {
    if (!has(p.key) && !p.required && p.default_value.empty()) continue;
    switch (p.type) {
      case ParamType::Number: num(p.key); break;
      case ParamType::Integer: integer(p.key); break;
      case ParamType::List: list(p.key); break;
      case ParamType::Text: text(p.key); break;
      case ParamType::Seed: seed(); break;
    }
  }
  auto one_of = [&](const std::string& key, std::initializer_list<const char*> allowed) {
    const auto v = text(key);
    for (const char* a : allowed)
      if (v == a) return;
    throw UsageError(id + ": field '" + key + "': '" + v + "' is not allowed");
  };
  auto positive = [&](const std::string& key) {
    if (!(num(key) > 0.0)) throw UsageError(id + ": field '" + key + "' must be positive");
  };
  auto at_least = [&](const std::string& key, int lo) {
    if (integer(key) < lo) throw UsageError(id + ": field '" + key + "' must be >= " + std::to_string(lo));
  };
  auto n_list = [&] {
    for (double N : list("N"))
      if (!(N >= 1.0)) throw UsageError(id + ": field 'N': entries must be >= 1");
  };
  switch (kind) {
    case ExperimentKind::Solve:
      one_of("preset", {"lax", "linear", "custom"});
      one_of("data", {"bump", "random"});
      positive("L_pi"); positive("dt"); positive("T"); positive("width");
      at_least("n", 8); at_least("levels", 1); at_least("pad", 2);
      break;
    case ExperimentKind::Conservation:
      positive("L_pi"); positive("dt"); positive("T"); positive("width");
      at_least("n", 8); at_least("monitor_every", 1); at_least("pad", 2);
      one_of("typo", {"0", "1"});
      break;
    case ExperimentKind::Apriori:
      positive("L_pi"); positive("dt"); positive("T");
      at_least("n", 8); at_least("n_refined", 8); at_least("members", 1);
      break;
    case ExperimentKind::Scaling:
      positive("L_pi");
      at_least("n", 8); at_least("members", 1);
      break;
    case ExperimentKind::A2Growth:
    case ExperimentKind::A2Inflation:
    case ExperimentKind::PsiGrowth:
    case ExperimentKind::A3Growth:
      n_list();
      positive("t"); positive("rel_tol");
      if (list("N").size() < 3) throw UsageError(id + ": field 'N': a slope needs at least 3 values");
      if (kind == ExperimentKind::A2Inflation) positive("delta");
      break;
    case ExperimentKind::Be3Sweep: {
      const auto e = parse_example_or_usage(*this, "example", text("example"));
      n_list();
      positive("b_step");
      if (num("b_hi") < num("b_lo")) throw UsageError(id + ": field 'b_hi' must be >= b_lo");
      const auto ex = text("expected");
      double v;
      if (ex == "auto") {
        if (e != AppendixExample::Ex2 && e != AppendixExample::Ex3b)
          throw UsageError(id + ": field 'expected' has no automatic value for example " + to_string(e));
      } else if (!parse_double(ex, v)) {
        throw UsageError(id + ": field 'expected': expected 'auto' or a number");
      }
      break;
    }
    case ExperimentKind::AppendixConv:
      for (const auto& s : split_items(text("examples"))) parse_example_or_usage(*this, "examples", s);
      n_list();
      at_least("cells", 2);
      break;
    case ExperimentKind::MeasureCheck:
      one_of("lemma", {"m", "m1", "both"});
      at_least("count", 1); at_least("resolution", 8);
      break;
    case ExperimentKind::MultiplierCheck:
      at_least("instances", 1); at_least("n_max", 2); at_least("k", 2); at_least("restarts", 1);
      break;
    case ExperimentKind::A2Oracle:
      for (const auto& s : split_items(text("data")))
        if (s != "gaussian" && s != "bump") throw UsageError(id + ": field 'data': '" + s + "' is not allowed");
      for (double t : list("t"))
        if (!(t > 0.0)) throw UsageError(id + ": field 't': entries must be positive");
      at_least("n_quad", 1);
      positive("gauss_delta"); positive("gauss_cut"); positive("bump_delta"); positive("bump_radius");
      break;
    case ExperimentKind::NormSuite:
      positive("eps");
      at_least("samples", 1); at_least("chain_samples", 1);
      break;
  }
}

std::vector<ExperimentSpec> parse_config(std::istream& is, const std::string& name) {
  std::vector<ExperimentSpec> out;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  auto fail = [&](int l, const std::string& msg) { throw UsageError(name + ":" + std::to_string(l) + ": " + msg); };
  bool have_kind = false;
  auto close = [&] {
    if (out.empty()) return;
    if (!have_kind) fail(out.back().line, "experiment '" + out.back().id + "' has no kind");
    try {
      out.back().validate();
    } catch (const UsageError& e) {
      // Point at the offending key when the message names one.
      int l = out.back().line;
      for (const auto& [key, kl] : out.back().lines)
        if (std::string(e.what()).find("'" + key + "'") != std::string::npos) l = kl;
      fail(l, e.what());
    }
  };
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(lineno, "unterminated section header");
      close();
      const std::string id = trim(t.substr(1, t.size() - 2));
      if (!valid_id(id)) fail(lineno, "bad experiment id '" + id + "'");
      if (seen.count(id)) fail(lineno, "duplicate experiment id '" + id + "' (first at line " + std::to_string(seen[id]) + ")");
      seen[id] = lineno;
      ExperimentSpec s;
      s.id = id;
      s.line = lineno;
      out.push_back(std::move(s));
      have_kind = false;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
    if (out.empty()) fail(lineno, "key outside of an [experiment] section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    auto& s = out.back();
    if (key == "kind") {
      if (have_kind) fail(lineno, "duplicate key 'kind'");
      try {
        s.kind = parse_kind(value);
      } catch (const UsageError& e) {
        fail(lineno, e.what());
      }
      have_kind = true;
      for (const auto& [k, kl] : s.lines)
        if (!find_param(s.kind, k)) fail(kl, "kind " + value + " has no field '" + k + "'");
      continue;
    }
    if (s.params.count(key)) fail(lineno, "duplicate key '" + key + "'");
    if (have_kind && !find_param(s.kind, key))
      fail(lineno, "kind " + std::string(to_string(s.kind)) + " has no field '" + key + "'");
    s.params[key] = value;
    s.lines[key] = lineno;
  }
  close();
  return out;
}

std::vector<ExperimentSpec> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(path + ": cannot open");
  return parse_config(in, path);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_csv(std::ostream& os, const ExperimentReport& r, const Table& t) {
  os << "# kdv5lab " << kCsvVersion << " kind=" << to_string(r.kind) << " id=" << r.id << " table=" << t.name
     << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << "\n";
  }
}

void write_summary(std::ostream& os, const std::vector<ExperimentReport>& reports) {
  os << "# kdv5lab " << kCsvVersion << " summary\n";
  os << "id,kind,check,value,op,threshold,passed\n";
  for (const auto& r : reports) {
    for (const auto& c : r.checks) {
      os << csv_field(r.id) << "," << to_string(r.kind) << "," << csv_field(c.name) << "," << format_number(c.value)
         << "," << c.op << "," << format_number(c.threshold) << "," << (c.passed ? 1 : 0) << "\n";
    }
    if (!r.error.empty())
      os << csv_field(r.id) << "," << to_string(r.kind) << ",error," << csv_field(r.error) << ",,,0\n";
    os << csv_field(r.id) << "," << to_string(r.kind) << ",experiment,,,," << (r.passed ? 1 : 0) << "\n";
  }
}

std::string default_out_dir() {
  const char* env = std::getenv("KDV5_OUT_DIR");
  return env && *env ? env : "kdv5-out";
}

ExperimentReport run(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentReport r;
  r.id = spec.id;
  r.kind = spec.kind;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    detail::run_kind(spec, r);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = r.error.empty() &&
             std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.passed; });
  return r;
}

ReportBundle run_all(std::vector<ExperimentSpec> specs, const RunOptions& opt) {
  if (opt.jobs < 1) throw UsageError("--jobs must be >= 1");
  std::set<std::string> ids;
  for (auto& s : specs) {
    if (!ids.insert(s.id).second) throw UsageError("duplicate experiment id '" + s.id + "'");
    if (opt.seed && find_param(s.kind, "seed")) {
      if (s.randomized() || s.has("seed")) s.params["seed"] = std::to_string(*opt.seed);
    }
    for (const auto& [key, value] : opt.tolerance_overrides) {
      const ParamInfo* p = find_param(s.kind, key);
      if (p && p->tolerance) s.params[key] = value;
    }
    s.validate();
  }
  for (const auto& [key, value] : opt.tolerance_overrides) {
    bool known = false;
    for (auto k : all_kinds()) {
      const ParamInfo* p = find_param(k, key);
      known = known || (p && p->tolerance);
    }
    if (!known) throw UsageError("--tolerance: no kind has a tolerance named '" + key + "'");
  }

  ReportBundle b;
  b.experiments.resize(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) b.experiments[i] = run(specs[i]);
  };
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(opt.jobs), specs.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }

  b.passed = std::all_of(b.experiments.begin(), b.experiments.end(), [](const auto& r) { return r.passed; });
  if (opt.out_dir.empty()) return b;
  namespace fs = std::filesystem;
  fs::create_directories(opt.out_dir);
  for (const auto& r : b.experiments) {
    for (const auto& t : r.tables) {
      const auto path = (fs::path(opt.out_dir) / (r.id + "." + t.name + ".csv")).string();
      std::ofstream f(path, std::ios::binary);
      write_csv(f, r, t);
      if (!f) throw std::runtime_error("cannot write " + path);
      b.files.push_back(path);
    }
  }
  const auto path = (fs::path(opt.out_dir) / "summary.csv").string();
  std::ofstream f(path, std::ios::binary);
  write_summary(f, b.experiments);
  if (!f) throw std::runtime_error("cannot write " + path);
  b.files.push_back(path);
  return b;
}

}  // namespace kdv5
