#include "fraclap/error.hpp"
#include "fraclap/spectral_calculus.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace fraclap;

namespace {
constexpr double pi = std::numbers::pi;

BasisPtr square_basis(std::size_t J, std::size_t n = 64) {
    const std::vector<double> l{pi, pi};
    return analytic_box_basis(std::make_shared<const Domain>(make_box(l, n)), J);
}

BasisPtr interval_basis(std::size_t J) {
    const std::vector<double> l{pi};
    return analytic_box_basis(std::make_shared<const Domain>(make_box(l, 64)), J);
}

Eigen::VectorXd gaussian(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> n01;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = n01(rng);
    return v;
}

FractionalPolynomial random_poly(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> alpha(0.1, 2.0), beta(0.05, 1.5);
    std::uniform_int_distribution<int> terms(1, 3);
    std::vector<PolyTerm> t;
    double b = 0.0;
    const int k = terms(rng);
    for (int i = 0; i < k; ++i) {
        t.push_back({alpha(rng), b});
        b += beta(rng);
    }
    return FractionalPolynomial(t);
}
} // namespace

TEST_CASE("FractionalPolynomial evaluation") {
    CHECK(eval_poly(FractionalPolynomial({{1.0, 0.0}}), 7.0) == 1.0);
    CHECK(eval_poly(FractionalPolynomial({{1.0, 0.5}}), 4.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(eval_poly(FractionalPolynomial({{2.0, 0.0}, {3.0, 1.0}}), 2.0) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(eval_poly(FractionalPolynomial({{1.0, 0.5}}), -1.0) == 0.0);
    CHECK(FractionalPolynomial::monomial(1.5, 2.0)(4.0) == doctest::Approx(16.0).epsilon(1e-14));
}

TEST_CASE("FractionalPolynomial validation") {
    CHECK_THROWS_AS(FractionalPolynomial({}), InvalidArgument);
    CHECK_THROWS_AS(FractionalPolynomial({{0.0, 0.5}}), InvalidArgument);
    CHECK_THROWS_AS(FractionalPolynomial({{1.0, -0.5}}), InvalidArgument);
    CHECK_THROWS_AS(FractionalPolynomial({{1.0, 0.5}, {1.0, 0.5}}), InvalidArgument);
    CHECK_THROWS_AS(FractionalPolynomial({{1.0, 1.0}, {1.0, 0.5}}), InvalidArgument);
}

TEST_CASE("FractionalPolynomial sum merges like powers") {
    const auto s = FractionalPolynomial({{1.0, 0.0}, {2.0, 1.0}}) + FractionalPolynomial({{3.0, 0.5}, {4.0, 1.0}});
    REQUIRE(s.terms().size() == 3);
    CHECK(s.leading().alpha == 6.0);
    CHECK(s.leading().beta == 1.0);
    CHECK(s(9.0) == doctest::Approx(1.0 + 9.0 + 54.0).epsilon(1e-14));
}

TEST_CASE("apply_power") {
    const auto b = square_basis(5);
    SUBCASE("beta = 0 is the identity") {
        const SpectralFunction u(b, Eigen::VectorXd::LinSpaced(5, 1.0, 5.0));
        CHECK(apply_power(u, 0.0).coeffs() == u.coeffs());
    }
    SUBCASE("first eigenfunction") {
        CHECK(apply_power(basis_function(b, 0), 1.0).coeffs()[0] == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("interval, beta = 2") {
        const auto ib = interval_basis(3);
        const SpectralFunction u(ib, Eigen::Vector3d(1.0, 1.0, 0.0));
        const auto v = apply_power(u, 2.0);
        CHECK(v.coeffs()[0] == doctest::Approx(1.0));
        CHECK(v.coeffs()[1] == doctest::Approx(16.0));
        CHECK(v.coeffs()[2] == 0.0);
    }
    SUBCASE("negative beta") { CHECK_THROWS_AS(apply_power(basis_function(b, 0), -0.5), InvalidArgument); }
}

TEST_CASE("apply_poly") {
    const auto b = square_basis(5);
    const SpectralFunction u(b, Eigen::VectorXd::LinSpaced(5, 1.0, 5.0));
    CHECK(apply_poly(u, FractionalPolynomial({{1.0, 0.0}})).coeffs() == u.coeffs());

    const auto half = FractionalPolynomial::monomial(0.5);
    const Eigen::VectorXd twice = apply_poly(apply_poly(u, half), half).coeffs();
    CHECK((twice - apply_power(u, 1.0).coeffs()).cwiseAbs().maxCoeff() <= 1e-12);

    const auto ib = interval_basis(3);
    const auto v = apply_poly(basis_function(ib, 1), FractionalPolynomial({{1.0, 0.0}, {1.0, 1.0}}));
    CHECK(v.coeffs()[1] == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("apply_inverse_sq inverts w^2") {
    const auto b = square_basis(10);
    const auto half = FractionalPolynomial::monomial(0.5);
    const auto u = apply_inverse_sq(2.0 * basis_function(b, 0), half);
    CHECK(u.coeffs()[0] == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = random_poly(rng);
        const SpectralFunction g(b, gaussian(rng, 10));
        const auto back = apply_poly(apply_poly(apply_inverse_sq(g, w), w), w);
        CHECK((back - g).l2_norm() <= 1e-10 * (1.0 + g.l2_norm()));
    }
}

TEST_CASE("m_beta") {
    const auto b = square_basis(10);
    for (double beta : {0.0, 0.3, 1.0, 2.5}) CHECK(m_beta(*b, beta) == 1.0);

    const auto s = SpectralBasis::synthetic({0.5, 2.0});
    CHECK(m_beta(*s, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(m_beta(*s, 0.0) == 1.0);
    const std::vector<double> tiny{0.25, 0.5};
    CHECK(m_beta(tiny, 0.5) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("norms") {
    const auto b = square_basis(10);
    const auto e1 = basis_function(b, 0);
    CHECK(norm_tilde(e1, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(norm_beta(e1, 1.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    CHECK(norm_tilde(SpectralFunction(b), 0.7) == 0.0);
    CHECK(norm_beta(SpectralFunction(b), 0.7) == 0.0);
}

TEST_CASE("spectral calculus algebra on random coefficients") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> beta(0.0, 2.0);
    const auto b = square_basis(24, 32);
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralFunction u(b, gaussian(rng, 24));
        const SpectralFunction v(b, gaussian(rng, 24));
        const double b1 = beta(rng), b2 = beta(rng);

        const auto lhs = apply_power(apply_power(u, b1), b2);
        const auto rhs = apply_power(u, b1 + b2);
        CHECK((lhs - rhs).l2_norm() <= 1e-12 * rhs.l2_norm());

        // Self-adjointness: <A^b u, v> = <u, A^b v>.
        const double left = apply_power(u, b1).coeffs().dot(v.coeffs());
        const double right = u.coeffs().dot(apply_power(v, b1).coeffs());
        CHECK(std::abs(left - right) <= 1e-12 * (std::abs(left) + 1.0) * 1e2);

        // Sandwich: ||u||_b^2 = ||u||^2 + ||A^b u||^2 exactly up to rounding.
        const double nb = norm_beta(u, b1);
        CHECK(std::abs(nb * nb - u.l2_norm() * u.l2_norm() - norm_tilde(u, b1) * norm_tilde(u, b1)) <=
              1e-10 * nb * nb);
        CHECK(norm_tilde(u, b1) <= nb * (1.0 + 1e-15));
        CHECK(u.l2_norm() <= nb * (1.0 + 1e-15));
    }
}

TEST_CASE("integer powers agree with repeated application") {
    std::mt19937_64 rng(5);
    const auto b = square_basis(12, 32);
    const SpectralFunction u(b, gaussian(rng, 12));
    const auto three = apply_power(apply_power(apply_power(u, 1.0), 1.0), 1.0);
    CHECK((three - apply_power(u, 3.0)).l2_norm() <= 1e-12 * three.l2_norm());
}

TEST_CASE("synthesize and project are inverse on the span") {
    std::mt19937_64 rng(9);
    const auto b = square_basis(15, 48);
    const SpectralFunction u(b, gaussian(rng, 15));
    const auto samples = synthesize(u);
    // Parseval against direct quadrature of u^2.
    std::vector<double> sq(samples.size());
    for (std::size_t q = 0; q < sq.size(); ++q) sq[q] = samples[q] * samples[q];
    CHECK(integrate(b->domain(), sq) == doctest::Approx(u.l2_norm() * u.l2_norm()).epsilon(1e-10));
    CHECK((project(b, samples) - u).l2_norm() <= 1e-10 * u.l2_norm());
}

TEST_CASE("SpectralFunction construction errors") {
    const auto b = square_basis(5);
    CHECK_THROWS_AS(SpectralFunction(b, Eigen::VectorXd::Zero(4)), InvalidArgument);
    CHECK_THROWS_AS(basis_function(b, 5), InvalidArgument);
    const auto other = square_basis(5);
    CHECK_THROWS_AS(basis_function(b, 0) + basis_function(other, 0), InvalidArgument);
    CHECK_THROWS_AS(synthesize(basis_function(SpectralBasis::synthetic({1.0}), 0)), InvalidArgument);
}

TEST_CASE("domain decay diagnostic") {
    const auto b = square_basis(256);
    const auto& lam = b->eigenvalues();
    const double beta = 1.0;

    CHECK(domain_decay_diagnostic(basis_function(b, 0), beta).tail_fraction == 0.0);

    Eigen::VectorXd fast(256), slow(256);
    for (Eigen::Index j = 0; j < 256; ++j) {
        const double l = lam[static_cast<std::size_t>(j)];
        fast[j] = std::pow(l, -beta - 1.0);
        slow[j] = std::pow(l, -beta + 0.4);
    }
    const auto rf = domain_decay_diagnostic(SpectralFunction(b, fast), beta);
    CHECK(rf.in_domain_at_truncation);
    CHECK(rf.tail_fraction < 0.01);
    const auto rs = domain_decay_diagnostic(SpectralFunction(b, slow), beta);
    CHECK_FALSE(rs.in_domain_at_truncation);
    CHECK(rs.tail_fraction > 0.01);

    CHECK_THROWS_AS(domain_decay_diagnostic(basis_function(square_basis(4), 0), beta), InvalidArgument);
}
