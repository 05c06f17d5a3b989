#include "fraclap/spectral_calculus.hpp"

#include "fraclap/error.hpp"

#include <algorithm>
#include <cmath>

namespace fraclap {

SpectralFunction::SpectralFunction(BasisPtr basis, Eigen::VectorXd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (!basis_) throw InvalidArgument("spectral function needs a basis");
    if (static_cast<std::size_t>(coeffs_.size()) != basis_->size()) {
        throw InvalidArgument("coefficient vector has " + std::to_string(coeffs_.size()) +
                              " entries for a basis of size " + std::to_string(basis_->size()));
    }
}

SpectralFunction::SpectralFunction(BasisPtr basis)
    : SpectralFunction(basis, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis ? basis->size() : 0))) {}

namespace {

void require_same_basis(const SpectralFunction& a, const SpectralFunction& b) {
    if (a.basis_ptr() != b.basis_ptr()) throw InvalidArgument("spectral functions live on different bases");
}

// lambda^beta through exp(beta ln lambda); beta == 0 is exactly 1.
double power(double lambda, double beta) {
    if (beta == 0.0) return 1.0;
    return std::exp(beta * std::log(lambda));
}

} // namespace

SpectralFunction operator+(const SpectralFunction& a, const SpectralFunction& b) {
    require_same_basis(a, b);
    return {a.basis_, a.coeffs_ + b.coeffs_};
}

SpectralFunction operator-(const SpectralFunction& a, const SpectralFunction& b) {
    require_same_basis(a, b);
    return {a.basis_, a.coeffs_ - b.coeffs_};
}

SpectralFunction operator*(double s, const SpectralFunction& a) { return {a.basis_, s * a.coeffs_}; }

SpectralFunction basis_function(BasisPtr basis, std::size_t j) {
    SpectralFunction u(std::move(basis));
    if (j >= u.size()) throw InvalidArgument("basis index out of range");
    u.coeffs()[static_cast<Eigen::Index>(j)] = 1.0;
    return u;
}

std::vector<double> synthesize(const SpectralFunction& u) {
    const Eigen::VectorXd s = u.basis().values() * u.coeffs();
    return {s.data(), s.data() + s.size()};
}

SpectralFunction project(BasisPtr basis, std::span<const double> samples) {
    const auto& v = basis->values();
    const auto w = basis->domain().weights();
    if (samples.size() != w.size()) {
        throw InvalidArgument("project: " + std::to_string(samples.size()) + " samples for " +
                              std::to_string(w.size()) + " quadrature nodes");
    }
    Eigen::VectorXd weighted(static_cast<Eigen::Index>(w.size()));
    for (std::size_t q = 0; q < w.size(); ++q) weighted[static_cast<Eigen::Index>(q)] = w[q] * samples[q];
    Eigen::VectorXd coeffs = v.transpose() * weighted;
    return {std::move(basis), std::move(coeffs)};
}

// ---------------------------------------------------------------------------

FractionalPolynomial::FractionalPolynomial(std::vector<PolyTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidArgument("fractional polynomial needs at least one term");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& t = terms_[i];
        if (!(t.alpha > 0.0) || !std::isfinite(t.alpha)) {
            throw InvalidArgument("coefficient alpha_" + std::to_string(i) + " must be positive");
        }
        if (!(t.beta >= 0.0) || !std::isfinite(t.beta)) {
            throw InvalidArgument("exponent beta_" + std::to_string(i) + " must be nonnegative");
        }
        if (i > 0 && !(t.beta > terms_[i - 1].beta)) {
            throw InvalidArgument("exponents must be strictly increasing: 0 <= beta_0 < beta_1 < ... < beta_k");
        }
    }
}

FractionalPolynomial FractionalPolynomial::monomial(double beta, double alpha) {
    return FractionalPolynomial({{alpha, beta}});
}

double FractionalPolynomial::operator()(double lambda) const {
    if (lambda < 0.0) return 0.0;
    double s = 0.0;
    for (const auto& t : terms_) s += t.alpha * (lambda == 0.0 ? (t.beta == 0.0 ? 1.0 : 0.0) : power(lambda, t.beta));
    return s;
}

FractionalPolynomial operator+(const FractionalPolynomial& a, const FractionalPolynomial& b) {
    std::vector<PolyTerm> merged;
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
        if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].beta < b.terms_[j].beta)) {
            merged.push_back(a.terms_[i++]);
        } else if (i == a.terms_.size() || b.terms_[j].beta < a.terms_[i].beta) {
            merged.push_back(b.terms_[j++]);
        } else {
            merged.push_back({a.terms_[i].alpha + b.terms_[j].alpha, a.terms_[i].beta});
            ++i;
            ++j;
        }
    }
    return FractionalPolynomial(std::move(merged));
}

double eval_poly(const FractionalPolynomial& w, double lambda) { return w(lambda); }

SpectralFunction apply_power(const SpectralFunction& u, double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw InvalidArgument("apply_power needs beta >= 0 (use apply_inverse_sq for inverses)");
    }
    if (beta == 0.0) return u;
    const auto& lambda = u.basis().eigenvalues();
    Eigen::VectorXd c = u.coeffs();
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= power(lambda[static_cast<std::size_t>(j)], beta);
    return {u.basis_ptr(), std::move(c)};
}

SpectralFunction apply_poly(const SpectralFunction& u, const FractionalPolynomial& w) {
    const auto& lambda = u.basis().eigenvalues();
    Eigen::VectorXd c = u.coeffs();
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= w(lambda[static_cast<std::size_t>(j)]);
    return {u.basis_ptr(), std::move(c)};
}

SpectralFunction apply_inverse_sq(const SpectralFunction& g, const FractionalPolynomial& w) {
    const auto& lambda = g.basis().eigenvalues();
    Eigen::VectorXd c = g.coeffs();
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        const double l = lambda[static_cast<std::size_t>(j)];
        if (!(l > 0.0)) throw InvalidArgument("basis has a nonpositive eigenvalue");
        const double wl = w(l);
        c[j] /= wl * wl;
    }
    return {g.basis_ptr(), std::move(c)};
}

double m_beta(std::span<const double> eigenvalues, double beta) {
    if (eigenvalues.empty()) throw InvalidArgument("m_beta needs a nonempty spectrum");
    double m = 1.0;
    bool any_below_one = false;
    for (double l : eigenvalues) {
        if (l < 1.0) {
            const double p = power(l, beta);
            const double candidate = 1.0 / (p * p);
            m = any_below_one ? std::max(m, candidate) : candidate;
            any_below_one = true;
        }
    }
    return m;
}

double m_beta(const SpectralBasis& basis, double beta) { return m_beta(basis.eigenvalues(), beta); }

double norm_tilde(const SpectralFunction& u, double beta) { return apply_power(u, beta).l2_norm(); }

double norm_beta(const SpectralFunction& u, double beta) {
    const double a = u.l2_norm();
    const double b = norm_tilde(u, beta);
    return std::sqrt(a * a + b * b);
}

DecayReport domain_decay_diagnostic(const SpectralFunction& u, double beta, double threshold) {
    const std::size_t J = u.size();
    if (J < 8) throw InvalidArgument("decay diagnostic needs J >= 8");
    const Eigen::VectorXd weighted = apply_power(u, beta).coeffs().array().square();
    const std::size_t tail = J / 4;
    const double total = weighted.sum();
    const double tail_sum = weighted.tail(static_cast<Eigen::Index>(tail)).sum();
    DecayReport report;
    report.tail_fraction = total > 0.0 ? tail_sum / total : 0.0;
    report.in_domain_at_truncation = report.tail_fraction <= threshold;
    return report;
}

} // namespace fraclap
