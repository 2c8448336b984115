#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace diractime {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    double measured = 0.0;   ///< deviation or value the check compared
    double tolerance = 0.0;
    std::string detail;      ///< set when the check threw
};

struct SelfcheckOptions {
    double tol_picture = 1e-8;
    double tol_identity = 1e-10;
    std::uint64_t rng_seed = 1;
};

/// Invariant suites of every module on small grids; a few seconds in total.
std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options);

/// Aligned pass/fail table for terminals.
void write_check_table(std::ostream& out, const std::vector<CheckResult>& results);
/// Header: suite,check,passed,measured,tolerance,detail
void write_check_csv(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace diractime
