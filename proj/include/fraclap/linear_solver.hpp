#pragma once

#include "fraclap/spectral_calculus.hpp"

#include <optional>

namespace fraclap {

struct LinearSolveReport {
    explicit LinearSolveReport(SpectralFunction u) : solution(std::move(u)) {}

    SpectralFunction solution;
    double strong_residual = 0.0;    ///< ||w^2(A) u - g||_{L2}
    double weak_residual_max = 0.0;  ///< max_m |<w(A)u, w(A)e_m> - <g, e_m>|
    double solution_norm = 0.0;      ///< ||u||_{L2}
    double inverse_bound = 0.0;      ///< sqrt(M_{2 beta_k}) / alpha_k^2 * ||g||_{L2}
    bool inverse_bound_holds = false;
    bool equivalent = false;         ///< strong and weak residuals classify alike
};

/// Solves w^2(A) u = g by diagonal division in the eigenbasis.
LinearSolveReport solve_linear(const SpectralFunction& g, const FractionalPolynomial& w);

/// Weak-form residual tested against e_1 .. e_{test_count}.
double weak_residual(const SpectralFunction& u, const SpectralFunction& g, const FractionalPolynomial& w,
                     std::size_t test_count);

double strong_residual(const SpectralFunction& u, const SpectralFunction& g, const FractionalPolynomial& w);

/// Default classification tolerance 1e-8 * max(1, ||g||).
double default_residual_tolerance(const SpectralFunction& g);

/// True when "strong residual <= tol" and "weak residual over all J test
/// functions <= tol" agree.
bool equivalence_check(const SpectralFunction& u, const SpectralFunction& g, const FractionalPolynomial& w,
                       std::optional<double> tolerance = std::nullopt);

/// Eigenvalues 1/w^2(lambda_j) of the inverse operator, in basis order.
std::vector<double> inverse_spectrum(const SpectralBasis& basis, const FractionalPolynomial& w);

} // namespace fraclap
