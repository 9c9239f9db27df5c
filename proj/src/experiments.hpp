#pragma once

#include "kdv5/report.hpp"

namespace kdv5::detail {

/// Fills r.tables and r.checks for the spec's kind.
void run_kind(const ExperimentSpec& spec, ExperimentReport& r);

}  // namespace kdv5::detail
