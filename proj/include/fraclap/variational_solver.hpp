#pragma once

#include "fraclap/spectral_calculus.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fraclap {

/// A quadrature node as seen by a nonlinearity: its index (for per-node
/// coefficient samples) and its coordinates.
struct NodePoint {
    std::size_t index = 0;
    std::span<const double> x;
};

using ScalarField = std::function<double(const NodePoint&, double)>;

/// Declared growth constants:
///   |F(x,u)|    <= a u^2 + b
///   |D_uF(x,u)| <= c |u| + d
///   F(x,u)      <= (A/2) u^2 + B |u| + C
/// `b` and `d` are stored as essential-sup bounds.
struct GrowthConstants {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
};

struct Nonlinearity {
    std::string name;
    ScalarField F;
    ScalarField dF;  ///< partial derivative of F in u
    GrowthConstants growth;
};

/// F(x,u) = (A/2) cos(x_1 + ... + x_N) u^2 + b(x) sin u, with growth
/// constants a = A/2, c = A, d = B = b = ||b||_inf, C = 0.
Nonlinearity builtin_example_nonlinearity(double A, double b, std::size_t N);
/// Same with b given per quadrature node.
Nonlinearity builtin_example_nonlinearity(double A, std::vector<double> b_samples, std::size_t N);

/// F(x,u) = sum_p c_p(x) u^p with c_p sampled per node (coefficients[p][q]).
/// Without declared constants they are derived from the coefficient bounds for
/// degree <= 2; higher degrees get A = +inf (no coercivity guarantee).
Nonlinearity polynomial_nonlinearity(std::vector<std::vector<double>> coefficients,
                                     std::optional<GrowthConstants> growth = std::nullopt);

/// F(x,u) = g(x) u, the linear special case.
Nonlinearity linear_nonlinearity(std::vector<double> g_samples);

/// f(u) = 1/2 sum_j (w(lambda_j) u_j)^2 - integrate(F(x, u(x))).
double energy(const SpectralFunction& u, const Nonlinearity& nl, const FractionalPolynomial& w);

/// Component j of the Gateaux derivative: w(lambda_j)^2 u_j - <D_uF(., u), e_j>.
Eigen::VectorXd gradient(const SpectralFunction& u, const Nonlinearity& nl, const FractionalPolynomial& w);

struct CoercivityCheck {
    bool ok = false;
    double threshold = 0.0;  ///< alpha_k^2 / M_{beta_k}
    double margin = 0.0;     ///< threshold - A
    double m = 1.0;          ///< M_{beta_k}
};

CoercivityCheck check_coercivity(const Nonlinearity& nl, const FractionalPolynomial& w, const SpectralBasis& basis);

/// Pointwise scan of the declared growth bounds over the quadrature nodes and
/// u in [-U, U]. Returns one message per violated bound (empty when all hold).
std::vector<std::string> check_growth(const Nonlinearity& nl, const Domain& domain, double U = 10.0,
                                      std::size_t samples = 41);

/// max |(F(x,u+h) - F(x,u-h)) / 2h - D_uF(x,u)| over nodes and u in [-U, U].
double derivative_consistency(const Nonlinearity& nl, const Domain& domain, double U = 10.0,
                              std::size_t samples = 21, double h = 1e-5);

struct MinimizeOptions {
    std::optional<double> gtol;            ///< default 1e-8 * (1 + |f|)
    std::size_t max_iters = 10000;
    std::optional<Eigen::VectorXd> u0;     ///< default 0
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    bool precondition = true;              ///< scale the gradient by 1/(w(lambda_j)^2 + 1)
    bool allow_noncoercive = false;
    bool record_log = true;
};

struct MinimizeReport {
    explicit MinimizeReport(SpectralFunction start) : solution(std::move(start)) {}

    SpectralFunction solution;
    double energy = 0.0;
    double gradient_norm = 0.0;
    double euler_lagrange_residual = 0.0;  ///< max_m |w(lambda_m)^2 u_m - <D_uF(., u), e_m>|
    std::size_t iterations = 0;
    double coercivity_margin = 0.0;
    bool converged = false;
    std::string status;                    ///< converged | max-iterations | line-search-failure
    std::vector<double> energy_log;        ///< energy at every iterate, starting with u0
    std::vector<double> gradient_log;
    std::vector<std::string> warnings;
};

/// Preconditioned gradient descent with Armijo backtracking on the energy.
/// Once energy differences reach rounding level the sufficient-decrease test
/// switches to its gradient-based (approximate Wolfe) form.
MinimizeReport minimize(const Nonlinearity& nl, const FractionalPolynomial& w, const BasisPtr& basis,
                        const MinimizeOptions& options = {});

/// Seeded standard-normal coefficient vector (deterministic across runs).
Eigen::VectorXd random_coefficients(std::size_t J, std::uint64_t seed, double scale = 1.0);

/// `count` runs: the first from options.u0 (or 0), the rest from seeded random
/// starting points.
std::vector<MinimizeReport> multi_start(const Nonlinearity& nl, const FractionalPolynomial& w, const BasisPtr& basis,
                                        const MinimizeOptions& options, std::size_t count, std::uint64_t seed);

} // namespace fraclap
