#include "fraclap/eigenbasis.hpp"
#include "fraclap/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/SVD>
#include <numbers>

using namespace fraclap;

namespace {
constexpr double pi = std::numbers::pi;

std::shared_ptr<const Domain> box(std::vector<double> lengths, std::size_t n = 64) {
    return std::make_shared<const Domain>(make_box(lengths, n));
}

std::shared_ptr<const Domain> unit_square(double h) {
    const std::vector<Point2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return std::make_shared<const Domain>(make_polygon2d(v, h));
}

double gram_defect(const SpectralBasis& b) {
    const Eigen::MatrixXd g = b.gram();
    return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}
} // namespace

TEST_CASE("analytic basis: first eigenpair of (0,pi)^2") {
    const auto b = analytic_box_basis(box({pi, pi}), 1);
    CHECK(b->eigenvalue(0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b->modes()[0] == std::vector<int>{1, 1});
}

TEST_CASE("analytic basis: interval eigenfunctions are sampled sines") {
    const auto d = box({pi}, 64);
    const auto b = analytic_box_basis(d, 3);
    CHECK(b->eigenvalues() == std::vector<double>{1.0, 4.0, 9.0});
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t q = 0; q < d->node_count(); ++q) {
            const double expected = std::sqrt(2.0 / pi) * std::sin(static_cast<double>(j + 1) * d->node(q)[0]);
            CHECK(b->values()(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)) ==
                  doctest::Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("analytic basis: ties broken lexicographically") {
    const auto b = analytic_box_basis(box({pi, pi}), 3);
    CHECK(b->eigenvalues() == std::vector<double>{2.0, 5.0, 5.0});
    CHECK(b->modes()[1] == std::vector<int>{1, 2});
    CHECK(b->modes()[2] == std::vector<int>{2, 1});
}

TEST_CASE("analytic basis: spectrum matches brute-force enumeration") {
    SUBCASE("square") {
        const auto b = analytic_box_basis(box({pi, pi}), 40);
        const auto expected = oracle::box_spectrum_bruteforce({pi, pi}, 20, 40);
        for (std::size_t j = 0; j < 40; ++j) CHECK(b->eigenvalue(j) == doctest::Approx(expected[j]).epsilon(1e-13));
    }
    SUBCASE("rectangle") {
        const auto b = analytic_box_basis(box({1.0, 2.5}, 32), 30);
        const auto expected = oracle::box_spectrum_bruteforce({1.0, 2.5}, 20, 30);
        for (std::size_t j = 0; j < 30; ++j) CHECK(b->eigenvalue(j) == doctest::Approx(expected[j]).epsilon(1e-13));
    }
    SUBCASE("cube") {
        const auto b = analytic_box_basis(box({pi, pi, pi}, 16), 20);
        const auto expected = oracle::box_spectrum_bruteforce({pi, pi, pi}, 10, 20);
        for (std::size_t j = 0; j < 20; ++j) CHECK(b->eigenvalue(j) == doctest::Approx(expected[j]).epsilon(1e-13));
    }
}

TEST_CASE("analytic basis: orthonormal under the quadrature") {
    const auto b = analytic_box_basis(box({pi, pi}), 30);
    CHECK(gram_defect(*b) <= 1e-6);
}

TEST_CASE("analytic basis: modes beyond the grid resolution are rejected") {
    CHECK_THROWS_AS(analytic_box_basis(box({pi}, 8), 8), InvalidArgument);
    CHECK_NOTHROW(analytic_box_basis(box({pi}, 8), 7));
    CHECK_THROWS_AS(analytic_box_basis(box({pi}, 8), 0), InvalidArgument);
}

TEST_CASE("discrete basis on a box reproduces the cell-centred spectrum") {
    // With the reflected boundary the discrete eigenvalues are sums of the
    // 1-D values (4/h^2) sin^2(k h / 2), independent of the eigensolver.
    const auto d = box({pi, pi}, 32);
    const auto b = discrete_basis(d, 6);
    const auto modes = analytic_box_basis(d, 6)->modes();
    for (std::size_t j = 0; j < 6; ++j) {
        const double expected = oracle::cell_centred_eigenvalue(modes[j][0], pi, 32) +
                                oracle::cell_centred_eigenvalue(modes[j][1], pi, 32);
        CHECK(b->eigenvalue(j) == doctest::Approx(expected).epsilon(1e-8));
        CHECK(b->residuals()[j] <= 1e-8);
    }
    CHECK(gram_defect(*b) <= 1e-6);
}

TEST_CASE("discrete basis: degenerate subspace matches the analytic one") {
    const auto d = box({pi, pi}, 32);
    const auto disc = discrete_basis(d, 3);
    const auto anal = analytic_box_basis(d, 3);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(d->weights().data(),
                                                                static_cast<Eigen::Index>(d->node_count()));
    const Eigen::MatrixXd cross =
        anal->values().middleCols(1, 2).transpose() * w.asDiagonal() * disc->values().middleCols(1, 2);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
    // Cosines of the principal angles between the two 2-D eigenspaces.
    CHECK(svd.singularValues().minCoeff() >= 1.0 - 1e-6);
}

TEST_CASE("discrete basis on the unit square") {
    const auto b = discrete_basis(unit_square(1.0 / 32), 4);
    CHECK(std::abs(b->eigenvalue(0) - 2.0 * pi * pi) / (2.0 * pi * pi) <= 0.01);
    CHECK(b->eigenvalue(1) == doctest::Approx(b->eigenvalue(2)).epsilon(1e-8));
    CHECK(gram_defect(*b) <= 1e-6);
    for (double r : b->residuals()) CHECK(r <= 1e-8);
    CHECK(b->warnings().empty());
    CHECK(b->source() == BasisSource::discrete);
}

TEST_CASE("discrete basis: sign convention") {
    const auto d = unit_square(1.0 / 16);
    const auto b = discrete_basis(d, 5);
    const auto q = static_cast<Eigen::Index>(d->node_nearest_centroid());
    for (Eigen::Index j = 0; j < 5; ++j) CHECK(b->values()(q, j) >= 0.0);
}

TEST_CASE("discrete basis: non-convex polygon carries a warning") {
    const std::vector<Point2> ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    const auto b = discrete_basis(std::make_shared<const Domain>(make_polygon2d(ell, 0.1)), 3);
    CHECK_FALSE(b->warnings().empty());
    CHECK(b->size() == 3);
}

TEST_CASE("discrete basis: J larger than the grid is rejected") {
    const auto d = unit_square(0.2);  // 16 nodes
    CHECK_THROWS_AS(discrete_basis(d, 17), InvalidArgument);
    CHECK_NOTHROW(discrete_basis(d, 16));
}

TEST_CASE("dirichlet_laplacian is symmetric") {
    const auto d = unit_square(0.1);
    const Eigen::SparseMatrix<double> l = dirichlet_laplacian(*d);
    const Eigen::SparseMatrix<double> lt = l.transpose();
    CHECK((l - lt).norm() == 0.0);
    CHECK(l.coeff(0, 0) == doctest::Approx(400.0));
}

TEST_CASE("eigen_convergence_report: second-order on the unit square") {
    const auto d = unit_square(1.0 / 16);
    const std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64};
    const auto r = eigen_convergence_report(*d, 3, hs);
    REQUIRE(r.observed_order.size() == 3);
    // Independent check from the raw lambdas in the rows.
    const auto lam = [&](std::size_t level, std::size_t j) { return r.rows[level * 3 + j].lambda; };
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(r.observed_order[j] >= 1.8);
        CHECK(r.observed_order[j] <= 2.2);
        CHECK(r.observed_order[j] ==
              doctest::Approx(oracle::observed_order(lam(0, j), lam(1, j), lam(2, j), 2.0)).epsilon(1e-10));
    }
    CHECK(r.richardson_limit[0] == doctest::Approx(2.0 * pi * pi).epsilon(1e-3));
}

TEST_CASE("eigen_convergence_report: spacing preconditions") {
    const auto d = unit_square(1.0 / 8);
    CHECK_THROWS_AS(eigen_convergence_report(*d, 1, std::vector<double>{0.125, 0.0625}), InvalidArgument);
    CHECK_THROWS_AS(eigen_convergence_report(*d, 1, std::vector<double>{0.125, 0.125, 0.0625}), InvalidArgument);
    CHECK_THROWS_AS(eigen_convergence_report(*d, 1, std::vector<double>{0.125, 0.0625, 0.025}), InvalidArgument);
}

TEST_CASE("refine_domain") {
    const auto d = box({pi, pi}, 16);
    CHECK(refine_domain(*d, pi / 32).nodes_per_axis()[0] == 32);
    CHECK_THROWS_AS(refine_domain(*d, 0.3), InvalidArgument);
    const auto s = unit_square(0.1);
    CHECK(refine_domain(*s, 0.05).node_count() == 19 * 19);
}

TEST_CASE("synthetic basis") {
    const auto b = SpectralBasis::synthetic({0.5, 2.0});
    CHECK_FALSE(b->has_samples());
    CHECK(b->size() == 2);
    CHECK_THROWS(SpectralBasis::synthetic({2.0, 1.0}));
    CHECK_THROWS(SpectralBasis::synthetic({0.0, 1.0}));
}
