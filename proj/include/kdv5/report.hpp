#pragma once

// Experiment specs, the sectioned config format, and CSV report emission.
//
// Config format:
//   # comment
//   [experiment-id]
//   kind = a2-growth
//   N = 8, 16, 32, 64
// Keys are checked against the kind; lists are comma or space separated.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdv5/errors.hpp"

namespace kdv5 {

/// Bad config or command line; the message names the field.
class UsageError : public InvalidInput {
 public:
  explicit UsageError(const std::string& what) : InvalidInput(what) {}
};

enum class ExperimentKind {
  Solve,
  A2Growth,
  A2Inflation,
  PsiGrowth,
  A3Growth,
  Be3Sweep,
  AppendixConv,
  MeasureCheck,
  MultiplierCheck,
  Conservation,
  Apriori,
  Scaling,
  A2Oracle,
  NormSuite,
};

const char* to_string(ExperimentKind k);
/// UsageError for an unknown name.
ExperimentKind parse_kind(const std::string& name);
const std::vector<ExperimentKind>& all_kinds();

enum class ParamType { Number, Integer, List, Text, Seed };

struct ParamInfo {
  std::string key;
  ParamType type = ParamType::Number;
  /// Empty with required = false means "unset unless given".
  std::string default_value;
  bool required = false;
  /// Pass/fail thresholds; --tolerance overrides apply to these.
  bool tolerance = false;
  std::string help;
};

/// Keys a kind accepts, in documentation order.
const std::vector<ParamInfo>& kind_params(ExperimentKind k);
/// One-line description of a kind.
const char* kind_summary(ExperimentKind k);

struct ExperimentSpec {
  std::string id;
  ExperimentKind kind = ExperimentKind::Solve;
  std::map<std::string, std::string> params;
  /// Config line of each key (0 when set programmatically).
  std::map<std::string, int> lines;
  int line = 0;

  /// Unknown keys, missing required keys, unparsable values, a missing seed
  /// for randomized runs: UsageError naming the field.
  void validate() const;
  bool randomized() const;
  bool has(const std::string& key) const;

  /// Values with defaults filled in; UsageError when unparsable.
  double num(const std::string& key) const;
  int integer(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::uint64_t seed() const;

 private:
  std::string raw(const std::string& key) const;
};

/// Throws UsageError carrying "name:line:" for parse and validation errors.
std::vector<ExperimentSpec> parse_config(std::istream& is, const std::string& name = "<config>");
std::vector<ExperimentSpec> load_config(const std::string& path);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string op;  // "<=" or ">="
  double threshold = 0.0;
  bool passed = false;
};

struct ExperimentReport {
  std::string id;
  ExperimentKind kind = ExperimentKind::Solve;
  std::vector<Table> tables;
  std::vector<Check> checks;
  /// Set when the experiment stopped on an exception.
  std::string error;
  bool passed = false;
  /// Wall time, kept out of the CSV files.
  double seconds = 0.0;
};

/// Runs one experiment. Accuracy failures in single rows mark the row and the
/// run continues; other exceptions end the experiment with `error` set.
ExperimentReport run(const ExperimentSpec& spec);

struct RunOptions {
  /// Empty: nothing is written.
  std::string out_dir;
  int jobs = 1;
  /// Replaces the seed of every randomized experiment.
  std::optional<std::uint64_t> seed;
  /// Applied to each experiment whose kind has the key as a tolerance.
  std::map<std::string, std::string> tolerance_overrides;
};

struct ReportBundle {
  std::vector<ExperimentReport> experiments;
  std::vector<std::string> files;
  bool passed = false;
};

/// Applies the options, validates every spec (UsageError before anything
/// runs), runs them on at most opt.jobs threads and writes
/// <out_dir>/<id>.<table>.csv plus <out_dir>/summary.csv.
ReportBundle run_all(std::vector<ExperimentSpec> specs, const RunOptions& opt);

/// $KDV5_OUT_DIR, else "kdv5-out".
std::string default_out_dir();

/// Shortest round-trip decimal form; "nan", "inf", "-inf" otherwise.
std::string format_number(double v);
void write_csv(std::ostream& os, const ExperimentReport& r, const Table& t);
void write_summary(std::ostream& os, const std::vector<ExperimentReport>& reports);

}  // namespace kdv5
