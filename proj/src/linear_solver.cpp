#include "fraclap/linear_solver.hpp"

#include "fraclap/error.hpp"

#include <algorithm>
#include <cmath>

namespace fraclap {

namespace {

Eigen::VectorXd weak_defect(const SpectralFunction& u, const SpectralFunction& g, const FractionalPolynomial& w) {
    if (u.basis_ptr() != g.basis_ptr()) throw InvalidArgument("u and g live on different bases");
    const auto& lambda = u.basis().eigenvalues();
    Eigen::VectorXd r(u.coeffs().size());
    for (Eigen::Index j = 0; j < r.size(); ++j) {
        const double wl = w(lambda[static_cast<std::size_t>(j)]);
        r[j] = wl * wl * u.coeffs()[j] - g.coeffs()[j];
    }
    return r;
}

} // namespace

double strong_residual(const SpectralFunction& u, const SpectralFunction& g, const FractionalPolynomial& w) {
    return weak_defect(u, g, w).norm();
}

double weak_residual(const SpectralFunction& u, const SpectralFunction& g, const FractionalPolynomial& w,
                     std::size_t test_count) {
    if (test_count > u.size()) {
        throw InvalidArgument("test_count " + std::to_string(test_count) + " exceeds J = " + std::to_string(u.size()));
    }
    if (test_count == 0) return 0.0;
    return weak_defect(u, g, w).head(static_cast<Eigen::Index>(test_count)).cwiseAbs().maxCoeff();
}

double default_residual_tolerance(const SpectralFunction& g) { return 1e-8 * std::max(1.0, g.l2_norm()); }

bool equivalence_check(const SpectralFunction& u, const SpectralFunction& g, const FractionalPolynomial& w,
                       std::optional<double> tolerance) {
    const double tol = tolerance.value_or(default_residual_tolerance(g));
    const bool strong = strong_residual(u, g, w) <= tol;
    const bool weak = weak_residual(u, g, w, u.size()) <= tol;
    return strong == weak;
}

LinearSolveReport solve_linear(const SpectralFunction& g, const FractionalPolynomial& w) {
    SpectralFunction u = apply_inverse_sq(g, w);
    const auto& leading = w.leading();
    const double m = m_beta(g.basis(), 2.0 * leading.beta);
    const double bound = std::sqrt(m) / (leading.alpha * leading.alpha) * g.l2_norm();

    LinearSolveReport report(std::move(u));
    report.strong_residual = strong_residual(report.solution, g, w);
    report.weak_residual_max = weak_residual(report.solution, g, w, g.size());
    report.solution_norm = report.solution.l2_norm();
    report.inverse_bound = bound;
    report.inverse_bound_holds = report.solution_norm <= bound + 1e-10;
    report.equivalent = equivalence_check(report.solution, g, w);
    return report;
}

std::vector<double> inverse_spectrum(const SpectralBasis& basis, const FractionalPolynomial& w) {
    std::vector<double> mu;
    mu.reserve(basis.size());
    for (double l : basis.eigenvalues()) {
        const double wl = w(l);
        mu.push_back(1.0 / (wl * wl));
    }
    return mu;
}

} // namespace fraclap
