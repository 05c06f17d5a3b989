#pragma once

#include "fraclap/eigenbasis.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace fraclap {

/// u = sum_j a_j e_j as a coefficient vector tied to a basis.
class SpectralFunction {
public:
    SpectralFunction(BasisPtr basis, Eigen::VectorXd coeffs);
    /// Zero function on `basis`.
    explicit SpectralFunction(BasisPtr basis);

    const BasisPtr& basis_ptr() const noexcept { return basis_; }
    const SpectralBasis& basis() const noexcept { return *basis_; }
    const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }
    Eigen::VectorXd& coeffs() noexcept { return coeffs_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(coeffs_.size()); }

    /// L2 norm via Parseval.
    double l2_norm() const { return coeffs_.norm(); }

    friend SpectralFunction operator+(const SpectralFunction& a, const SpectralFunction& b);
    friend SpectralFunction operator-(const SpectralFunction& a, const SpectralFunction& b);
    friend SpectralFunction operator*(double s, const SpectralFunction& a);

private:
    BasisPtr basis_;
    Eigen::VectorXd coeffs_;
};

/// Unit coefficient vector e_j (0-based j).
SpectralFunction basis_function(BasisPtr basis, std::size_t j);

/// Samples of u on the basis' quadrature nodes.
std::vector<double> synthesize(const SpectralFunction& u);
/// L2 projection of grid samples: a_j = integrate(samples * e_j).
SpectralFunction project(BasisPtr basis, std::span<const double> samples);

struct PolyTerm {
    double alpha = 0.0;
    double beta = 0.0;
};

/// w(lambda) = sum_i alpha_i lambda^beta_i with alpha_i > 0 and strictly
/// increasing beta_i >= 0; w(lambda) = 0 for lambda < 0.
class FractionalPolynomial {
public:
    explicit FractionalPolynomial(std::vector<PolyTerm> terms);

    /// lambda^beta.
    static FractionalPolynomial monomial(double beta, double alpha = 1.0);

    const std::vector<PolyTerm>& terms() const noexcept { return terms_; }
    /// Highest-order term (alpha_k, beta_k).
    const PolyTerm& leading() const noexcept { return terms_.back(); }

    double operator()(double lambda) const;

    /// Sum with like powers merged.
    friend FractionalPolynomial operator+(const FractionalPolynomial& a, const FractionalPolynomial& b);

private:
    std::vector<PolyTerm> terms_;
};

double eval_poly(const FractionalPolynomial& w, double lambda);

/// a_j -> lambda_j^beta a_j. Throws for beta < 0.
SpectralFunction apply_power(const SpectralFunction& u, double beta);
/// a_j -> w(lambda_j) a_j.
SpectralFunction apply_poly(const SpectralFunction& u, const FractionalPolynomial& w);
/// a_j -> a_j / w(lambda_j)^2.
SpectralFunction apply_inverse_sq(const SpectralFunction& g, const FractionalPolynomial& w);

/// max{ lambda_j^{-2 beta} : lambda_j < 1 }, or 1 when no eigenvalue is below 1.
double m_beta(const SpectralBasis& basis, double beta);
double m_beta(std::span<const double> eigenvalues, double beta);

/// ||A^beta u||_{L2}.
double norm_tilde(const SpectralFunction& u, double beta);
/// (||u||^2 + ||A^beta u||^2)^{1/2}.
double norm_beta(const SpectralFunction& u, double beta);

struct DecayReport {
    double tail_fraction = 0.0;
    bool in_domain_at_truncation = true;
};

inline constexpr double default_decay_threshold = 0.01;

/// Share of sum_j (lambda_j^beta a_j)^2 carried by the top quarter of the
/// indices. At a finite truncation every vector lies in every D(A^beta); this
/// is only a heuristic indicator of whether the series would converge.
DecayReport domain_decay_diagnostic(const SpectralFunction& u, double beta,
                                    double threshold = default_decay_threshold);

} // namespace fraclap
