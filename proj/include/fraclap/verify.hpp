#pragma once

#include "fraclap/spectral_calculus.hpp"
#include "fraclap/variational_solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fraclap {

struct CheckResult {
    std::string module;
    std::string name;
    bool passed = false;
    double value = 0.0;      ///< measured quantity (error, count of violations, ...)
    double tolerance = 0.0;
    std::string detail;
};

/// Runs the invariant checks of every module against `basis`, `w` and `nl`
/// with seeded random inputs.
std::vector<CheckResult> run_invariant_suite(const BasisPtr& basis, const FractionalPolynomial& w,
                                             const Nonlinearity& nl, std::uint64_t seed);

/// Fixed-width pass/fail table.
std::string format_check_table(const std::vector<CheckResult>& checks);

} // namespace fraclap
