#include "fraclap/verify.hpp"

#include "fraclap/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace fraclap {

namespace {

class Suite {
public:
    void add(std::string module, std::string name, double value, double tolerance, std::string detail = {}) {
        checks_.push_back({std::move(module), std::move(name), value <= tolerance, value, tolerance, std::move(detail)});
    }
    void add_bool(std::string module, std::string name, bool ok, std::string detail = {}) {
        checks_.push_back({std::move(module), std::move(name), ok, ok ? 0.0 : 1.0, 0.0, std::move(detail)});
    }
    std::vector<CheckResult> take() { return std::move(checks_); }

private:
    std::vector<CheckResult> checks_;
};

double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

// Decaying random coefficients so that high powers of lambda stay tame.
Eigen::VectorXd smooth_coefficients(const SpectralBasis& basis, std::uint64_t seed) {
    Eigen::VectorXd c = random_coefficients(basis.size(), seed);
    for (std::size_t j = 0; j < basis.size(); ++j) c[static_cast<Eigen::Index>(j)] /= basis.eigenvalue(j);
    return c;
}

FractionalPolynomial random_polynomial(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> alpha(0.2, 2.0);
    std::uniform_real_distribution<double> gap(0.1, 0.8);
    const int terms = 1 + static_cast<int>(rng() % 3);
    std::vector<PolyTerm> t;
    double beta = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    for (int i = 0; i < terms; ++i) {
        t.push_back({alpha(rng), beta});
        beta += gap(rng);
    }
    return FractionalPolynomial(std::move(t));
}

void domain_checks(Suite& s, const SpectralBasis& basis, std::uint64_t seed) {
    const Domain& d = basis.domain();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    std::vector<double> f(d.node_count()), g(d.node_count()), h(d.node_count());
    const double a = 1.7, b = -0.3;
    for (std::size_t q = 0; q < f.size(); ++q) {
        f[q] = n01(rng);
        g[q] = n01(rng);
        h[q] = a * f[q] + b * g[q];
    }
    const double lhs = integrate(d, h);
    const double rhs = a * integrate(d, f) + b * integrate(d, g);
    s.add("domain_grid", "integrate is linear", std::abs(lhs - rhs) / (1.0 + std::abs(rhs)), 1e-12);

    if (d.kind() == DomainKind::box) {
        double volume = 1.0;
        for (double l : d.lengths()) volume *= l;
        s.add("domain_grid", "sum of weights = |Omega|", std::abs(d.measure() - volume) / volume, 1e-12);
    } else {
        double area = 0.0, perimeter = 0.0;
        const auto& v = d.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& p = v[i];
            const auto& q = v[(i + 1) % v.size()];
            area += 0.5 * (p[0] * q[1] - q[0] * p[1]);
            perimeter += std::hypot(q[0] - p[0], q[1] - p[1]);
        }
        // Lattice-count error is bounded by a boundary strip of width ~h.
        s.add("domain_grid", "sum of weights ~ |Omega| (within perimeter * h)", std::abs(d.measure() - area),
              2.0 * perimeter * d.h());
    }
}

void basis_checks(Suite& s, const SpectralBasis& basis) {
    bool ordered = true, positive = true;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        positive = positive && basis.eigenvalue(j) > 0.0;
        if (j > 0) ordered = ordered && basis.eigenvalue(j) >= basis.eigenvalue(j - 1);
    }
    s.add_bool("eigenbasis", "eigenvalues positive", positive);
    s.add_bool("eigenbasis", "eigenvalues nondecreasing", ordered);
    const Eigen::MatrixXd g = basis.gram();
    const double gram_err = (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    s.add("eigenbasis", "Gram matrix = identity", gram_err, basis.source() == BasisSource::analytic ? 1e-6 : 1e-4);
    if (!basis.residuals().empty()) {
        s.add("eigenbasis", "eigen-residual ||Le - lambda e|| / ||e||",
              *std::max_element(basis.residuals().begin(), basis.residuals().end()), 1e-8);
    }
}

void calculus_checks(Suite& s, const BasisPtr& basis, const FractionalPolynomial& w, std::uint64_t seed) {
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> beta(0.05, 1.5);

    double semigroup = 0.0, integer_power = 0.0, additivity = 0.0, round_trip = 0.0, parseval = 0.0,
           self_adjoint = 0.0;
    int sandwich_violations = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const SpectralFunction u(basis, smooth_coefficients(*basis, seed + 100 + trial));
        const SpectralFunction v(basis, smooth_coefficients(*basis, seed + 200 + trial));
        const double b1 = beta(rng), b2 = beta(rng);
        semigroup = std::max(semigroup, rel_diff(apply_power(apply_power(u, b1), b2).coeffs(),
                                                 apply_power(u, b1 + b2).coeffs()));
        for (int n = 1; n <= 4; ++n) {
            SpectralFunction iterated = u;
            for (int k = 0; k < n; ++k) iterated = apply_power(iterated, 1.0);
            integer_power = std::max(integer_power, rel_diff(iterated.coeffs(), apply_power(u, n).coeffs()));
        }
        const auto w2 = random_polynomial(rng);
        additivity = std::max(additivity, rel_diff(apply_poly(u, w + w2).coeffs(),
                                                   (apply_poly(u, w) + apply_poly(u, w2)).coeffs()));
        round_trip = std::max(round_trip, rel_diff(apply_inverse_sq(apply_poly(apply_poly(u, w), w), w).coeffs(),
                                                   u.coeffs()));
        const auto us = synthesize(u);
        std::vector<double> u2(us.size());
        for (std::size_t q = 0; q < us.size(); ++q) u2[q] = us[q] * us[q];
        parseval = std::max(parseval, std::abs(integrate(basis->domain(), u2) - u.coeffs().squaredNorm()) /
                                          (1.0 + u.coeffs().squaredNorm()));
        const auto wu = synthesize(apply_poly(u, w));
        const auto vs = synthesize(v);
        const auto wv = synthesize(apply_poly(v, w));
        std::vector<double> lhs(us.size()), rhs(us.size());
        for (std::size_t q = 0; q < us.size(); ++q) {
            lhs[q] = wu[q] * vs[q];
            rhs[q] = us[q] * wv[q];
        }
        self_adjoint = std::max(self_adjoint, std::abs(integrate(basis->domain(), lhs) - integrate(basis->domain(), rhs)));
        const double bs = 3.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 + 1e-3;
        const double nt = norm_tilde(u, bs), nb = norm_beta(u, bs);
        const double m = m_beta(*basis, bs);
        if (!(nt <= nb * (1 + 1e-14) && nb <= std::sqrt(m + 1.0) * nt * (1 + 1e-14))) ++sandwich_violations;
    }
    s.add("spectral_calculus", "semigroup A^b2 A^b1 = A^(b1+b2)", semigroup, 1e-12);
    s.add("spectral_calculus", "A^n = n-fold A", integer_power, 1e-12);
    s.add("spectral_calculus", "(w1 + w2)(A) = w1(A) + w2(A)", additivity, 1e-13);
    s.add("spectral_calculus", "w^-2 (w (w u)) = u", round_trip, 1e-10);
    s.add("spectral_calculus", "Parseval at truncation", parseval, 1e-8);
    s.add("spectral_calculus", "self-adjointness of w(A)", self_adjoint, 1e-6);
    s.add("spectral_calculus", "norm sandwich violations", sandwich_violations, 0.0);

    if (basis->size() >= 8) {
        // Tail fraction grows with beta, so domain flags are nested.
        bool nested = true;
        for (double b : {0.25, 0.5, 1.0}) {
            Eigen::VectorXd c(static_cast<Eigen::Index>(basis->size()));
            for (std::size_t j = 0; j < basis->size(); ++j) c[static_cast<Eigen::Index>(j)] = std::pow(basis->eigenvalue(j), -b - 1.0);
            const SpectralFunction u(basis, c);
            const auto hi = domain_decay_diagnostic(u, b);
            const auto lo = domain_decay_diagnostic(u, 0.5 * b);
            nested = nested && lo.tail_fraction <= hi.tail_fraction + 1e-15 &&
                     (!hi.in_domain_at_truncation || lo.in_domain_at_truncation);
        }
        s.add_bool("spectral_calculus", "D(A^b2) flag implies D(A^b1) flag for b1 < b2", nested);
    }
}

void linear_checks(Suite& s, const BasisPtr& basis, const FractionalPolynomial& w, std::uint64_t seed) {
    std::mt19937_64 rng(seed + 2);
    double manufactured = 0.0;
    int equivalence_failures = 0, bound_violations = 0;
    bool unique = true;
    for (int trial = 0; trial < 20; ++trial) {
        const auto wr = trial == 0 ? w : random_polynomial(rng);
        const SpectralFunction u_star(basis, random_coefficients(basis->size(), seed + 300 + trial));
        const auto g = apply_poly(apply_poly(u_star, wr), wr);
        const auto r1 = solve_linear(g, wr);
        const auto r2 = solve_linear(g, wr);
        unique = unique && r1.solution.coeffs() == r2.solution.coeffs();
        manufactured = std::max(manufactured, (r1.solution.coeffs() - u_star.coeffs()).cwiseAbs().maxCoeff());
        if (!r1.equivalent) ++equivalence_failures;
        if (!equivalence_check(u_star + SpectralFunction(basis, random_coefficients(basis->size(), seed + 400 + trial)),
                               g, wr)) {
            ++equivalence_failures;
        }
        if (!r1.inverse_bound_holds) ++bound_violations;
    }
    s.add("linear_solver", "manufactured solution recovered", manufactured, 1e-10);
    s.add_bool("linear_solver", "repeat solves identical", unique);
    s.add("linear_solver", "strong/weak classification disagreements", equivalence_failures, 0.0);
    s.add("linear_solver", "bounded-inverse estimate violations", bound_violations, 0.0);
    const auto mu = inverse_spectrum(*basis, w);
    bool decreasing = true;
    for (std::size_t j = 1; j < mu.size(); ++j) {
        // Discrete degenerate eigenvalues split at rounding level.
        const bool lambda_up = basis->eigenvalue(j) > basis->eigenvalue(j - 1) * (1.0 + 1e-10);
        decreasing = decreasing && (lambda_up ? mu[j] < mu[j - 1] : mu[j] <= mu[j - 1] * (1.0 + 1e-9));
    }
    s.add_bool("linear_solver", "inverse eigenvalues 1/w^2(lambda_j) decreasing", decreasing);
}

void variational_checks(Suite& s, const BasisPtr& basis, const FractionalPolynomial& w, const Nonlinearity& nl,
                        std::uint64_t seed) {
    const Domain& d = basis->domain();
    s.add("variational_solver", "D_uF matches finite differences of F", derivative_consistency(nl, d), 1e-4);
    const auto growth = check_growth(nl, d);
    s.add_bool("variational_solver", "declared growth bounds hold on the grid", growth.empty(),
               growth.empty() ? "" : growth.front());

    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const SpectralFunction u(basis, smooth_coefficients(*basis, seed + 500 + trial));
        const Eigen::VectorXd g = gradient(u, nl, w);
        Eigen::VectorXd dir = random_coefficients(basis->size(), seed + 600 + trial);
        dir.normalize();
        const double step = 1e-6 * (1.0 + u.coeffs().cwiseAbs().maxCoeff());
        SpectralFunction plus = u, minus = u;
        plus.coeffs() += step * dir;
        minus.coeffs() -= step * dir;
        const double fd = (energy(plus, nl, w) - energy(minus, nl, w)) / (2.0 * step);
        const double exact = g.dot(dir);
        worst = std::max(worst, std::abs(fd - exact) / std::max(std::abs(exact), 1.0));
    }
    s.add("variational_solver", "gradient matches directional finite differences", worst, 1e-5);

    const auto coercivity = check_coercivity(nl, w, *basis);
    if (coercivity.ok) {
        const SpectralFunction u(basis, random_coefficients(basis->size(), seed + 700));
        double previous = energy(u, nl, w);
        bool increasing_tail = true;
        for (double t : {2.0, 4.0, 8.0, 16.0}) {
            const double e = energy(t * u, nl, w);
            if (t >= 4.0) increasing_tail = increasing_tail && e > previous;
            previous = e;
        }
        s.add_bool("variational_solver", "energy grows along rays (coercive)", increasing_tail);

        MinimizeOptions opts;
        opts.max_iters = 200;
        const auto r = minimize(nl, w, basis, opts);
        bool monotone = true;
        for (std::size_t i = 1; i < r.energy_log.size(); ++i) {
            monotone = monotone && r.energy_log[i] <= r.energy_log[i - 1] + 1e-12 * (1.0 + std::abs(r.energy_log[i - 1]));
        }
        s.add_bool("variational_solver", "energy non-increasing along descent", monotone);
        if (r.converged) {
            s.add("variational_solver", "Euler-Lagrange residual at minimizer", r.euler_lagrange_residual,
                  10.0 * 1e-8 * (1.0 + std::abs(r.energy)));
        }
    } else {
        s.add_bool("variational_solver", "coercivity condition A < alpha_k^2 / M_beta_k", false,
                   "A = " + std::to_string(nl.growth.A) + ", threshold " + std::to_string(coercivity.threshold));
    }
}

} // namespace

std::vector<CheckResult> run_invariant_suite(const BasisPtr& basis, const FractionalPolynomial& w,
                                             const Nonlinearity& nl, std::uint64_t seed) {
    Suite s;
    domain_checks(s, *basis, seed);
    basis_checks(s, *basis);
    calculus_checks(s, basis, w, seed);
    linear_checks(s, basis, w, seed);
    variational_checks(s, basis, w, nl, seed);
    return s.take();
}

std::string format_check_table(const std::vector<CheckResult>& checks) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %-52s %-6s %12s %12s\n", "module", "check", "result", "value", "tolerance");
    out += line;
    for (const auto& c : checks) {
        std::snprintf(line, sizeof line, "%-20s %-52s %-6s %12.3e %12.3e\n", c.module.c_str(), c.name.c_str(),
                      c.passed ? "PASS" : "FAIL", c.value, c.tolerance);
        out += line;
    }
    return out;
}

} // namespace fraclap
