#include "fraclap/eigenbasis.hpp"

#include "fraclap/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <set>

namespace fraclap {

const char* to_string(BasisSource source) {
    switch (source) {
    case BasisSource::analytic: return "analytic";
    case BasisSource::discrete: return "discrete";
    case BasisSource::synthetic: return "synthetic";
    }
    return "unknown";
}

SpectralBasis::SpectralBasis(std::shared_ptr<const Domain> domain, BasisSource source,
                             std::vector<double> eigenvalues, Eigen::MatrixXd values,
                             std::vector<std::vector<int>> modes, std::vector<double> residuals,
                             std::vector<std::string> warnings)
    : domain_(std::move(domain)),
      source_(source),
      eigenvalues_(std::move(eigenvalues)),
      values_(std::move(values)),
      modes_(std::move(modes)),
      residuals_(std::move(residuals)),
      warnings_(std::move(warnings)) {
    if (eigenvalues_.empty()) throw InvalidArgument("spectral basis must contain at least one eigenpair");
    for (std::size_t j = 0; j < eigenvalues_.size(); ++j) {
        if (!(eigenvalues_[j] > 0.0) || !std::isfinite(eigenvalues_[j])) {
            throw InvalidArgument("eigenvalue " + std::to_string(j + 1) + " is not positive");
        }
        if (j > 0 && eigenvalues_[j] < eigenvalues_[j - 1]) {
            throw InvalidArgument("eigenvalues must be nondecreasing");
        }
    }
    if (domain_) {
        if (static_cast<std::size_t>(values_.rows()) != domain_->node_count() ||
            static_cast<std::size_t>(values_.cols()) != eigenvalues_.size()) {
            throw InvalidArgument("eigenfunction sample matrix has the wrong shape");
        }
    }
}

std::shared_ptr<const SpectralBasis> SpectralBasis::synthetic(std::vector<double> eigenvalues) {
    return std::make_shared<const SpectralBasis>(nullptr, BasisSource::synthetic, std::move(eigenvalues),
                                                 Eigen::MatrixXd{}, std::vector<std::vector<int>>{},
                                                 std::vector<double>{});
}

const Domain& SpectralBasis::domain() const {
    if (!domain_) throw InvalidArgument("synthetic basis has no domain");
    return *domain_;
}

const Eigen::MatrixXd& SpectralBasis::values() const {
    if (!domain_) throw InvalidArgument("synthetic basis has no eigenfunction samples");
    return values_;
}

EigenPair SpectralBasis::pair(std::size_t j) const {
    EigenPair p;
    p.lambda = eigenvalue(j);
    if (domain_) {
        p.values.resize(values_.rows());
        Eigen::Map<Eigen::VectorXd>(p.values.data(), values_.rows()) = values_.col(j);
    }
    if (j < modes_.size()) p.mode_index = modes_[j];
    if (j < residuals_.size()) p.residual = residuals_[j];
    return p;
}

Eigen::MatrixXd SpectralBasis::gram() const {
    const auto& v = values();
    const auto w = domain_->weights();
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), w.size());
    return v.transpose() * wv.asDiagonal() * v;
}

// ---------------------------------------------------------------------------
// analytic box spectrum

namespace {

struct Mode {
    double lambda;
    std::vector<int> k;
};

double mode_lambda(const std::vector<int>& k, const std::vector<double>& lengths) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double r = std::numbers::pi / lengths[i];
        s += static_cast<double>(k[i]) * static_cast<double>(k[i]) * (r * r);
    }
    return s;
}

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

} // namespace

BasisPtr analytic_box_basis(std::shared_ptr<const Domain> domain, std::size_t J) {
    if (!domain) throw InvalidArgument("analytic_box_basis: null domain");
    if (domain->kind() != DomainKind::box) throw InvalidArgument("analytic spectra exist for boxes only");
    if (J == 0) throw InvalidArgument("truncation level J must be at least 1");

    const auto& lengths = domain->lengths();
    const std::size_t dim = domain->dimension();

    auto greater = [](const Mode& a, const Mode& b) {
        if (a.lambda != b.lambda) return a.lambda > b.lambda;
        return a.k > b.k;
    };
    std::priority_queue<Mode, std::vector<Mode>, decltype(greater)> heap(greater);
    std::set<std::vector<int>> seen;
    std::vector<int> start(dim, 1);
    heap.push({mode_lambda(start, lengths), start});
    seen.insert(start);

    std::vector<Mode> popped;
    while (!heap.empty()) {
        Mode m = heap.top();
        if (popped.size() >= J && m.lambda > popped[J - 1].lambda &&
            !nearly_equal(m.lambda, popped[J - 1].lambda)) {
            break;
        }
        heap.pop();
        for (std::size_t i = 0; i < dim; ++i) {
            auto next = m.k;
            ++next[i];
            if (seen.insert(next).second) heap.push({mode_lambda(next, lengths), next});
        }
        popped.push_back(std::move(m));
    }
    std::stable_sort(popped.begin(), popped.end(), [](const Mode& a, const Mode& b) {
        if (!nearly_equal(a.lambda, b.lambda)) return a.lambda < b.lambda;
        return a.k < b.k;
    });
    popped.resize(J);

    for (const auto& m : popped) {
        for (std::size_t i = 0; i < dim; ++i) {
            if (static_cast<std::size_t>(m.k[i]) >= domain->nodes_per_axis()[i]) {
                throw InvalidArgument("J = " + std::to_string(J) + " needs mode " + std::to_string(m.k[i]) +
                                      " on axis " + std::to_string(i) + ", which the " +
                                      std::to_string(domain->nodes_per_axis()[i]) +
                                      "-node grid cannot resolve");
            }
        }
    }

    const std::size_t n = domain->node_count();
    Eigen::MatrixXd values(n, J);
    std::vector<double> eigenvalues(J);
    std::vector<std::vector<int>> modes(J);
    for (std::size_t j = 0; j < J; ++j) {
        const auto& k = popped[j].k;
        eigenvalues[j] = popped[j].lambda;
        modes[j] = k;
        for (std::size_t q = 0; q < n; ++q) {
            const auto x = domain->node(q);
            double v = 1.0;
            for (std::size_t i = 0; i < dim; ++i) {
                v *= std::sqrt(2.0 / lengths[i]) * std::sin(k[i] * std::numbers::pi * x[i] / lengths[i]);
            }
            values(q, j) = v;
        }
    }
    return std::make_shared<const SpectralBasis>(std::move(domain), BasisSource::analytic, std::move(eigenvalues),
                                                 std::move(values), std::move(modes), std::vector<double>{});
}

// ---------------------------------------------------------------------------
// discrete spectrum

Eigen::SparseMatrix<double> dirichlet_laplacian(const Domain& domain) {
    const std::size_t n = domain.node_count();
    const std::size_t dim = domain.dimension();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * (2 * dim + 1));

    if (domain.kind() == DomainKind::polygon2d) {
        const auto [nx, ny] = domain.lattice_extent();
        std::vector<long> index(static_cast<std::size_t>(nx) * ny, -1);
        auto at = [&](int i, int j) -> long& { return index[static_cast<std::size_t>(i) * ny + j]; };
        for (std::size_t q = 0; q < n; ++q) {
            const auto ij = domain.lattice_index(q);
            at(ij[0], ij[1]) = static_cast<long>(q);
        }
        const double inv_h2 = 1.0 / (domain.h() * domain.h());
        constexpr int offsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        for (std::size_t q = 0; q < n; ++q) {
            const auto ij = domain.lattice_index(q);
            triplets.emplace_back(q, q, 4.0 * inv_h2);
            for (const auto& o : offsets) {
                const int i = ij[0] + o[0];
                const int j = ij[1] + o[1];
                if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
                const long p = at(i, j);
                if (p >= 0) triplets.emplace_back(q, p, -inv_h2);
            }
        }
    } else {
        const auto& counts = domain.nodes_per_axis();
        std::vector<std::size_t> stride(dim, 1);
        for (std::size_t i = dim - 1; i-- > 0;) stride[i] = stride[i + 1] * counts[i + 1];
        for (std::size_t q = 0; q < n; ++q) {
            const auto idx = domain.lattice_index(q);
            double diag = 0.0;
            for (std::size_t a = 0; a < dim; ++a) {
                const double h = domain.spacing(a);
                const double inv_h2 = 1.0 / (h * h);
                diag += 2.0 * inv_h2;
                if (idx[a] > 0) {
                    triplets.emplace_back(q, q - stride[a], -inv_h2);
                } else {
                    diag += inv_h2;
                }
                if (static_cast<std::size_t>(idx[a]) + 1 < counts[a]) {
                    triplets.emplace_back(q, q + stride[a], -inv_h2);
                } else {
                    diag += inv_h2;
                }
            }
            triplets.emplace_back(q, q, diag);
        }
    }
    Eigen::SparseMatrix<double> L(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    L.setFromTriplets(triplets.begin(), triplets.end());
    return L;
}

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

} // namespace

BasisPtr discrete_basis(std::shared_ptr<const Domain> domain, std::size_t J, const DiscreteEigenOptions& options) {
    if (!domain) throw InvalidArgument("discrete_basis: null domain");
    if (J == 0) throw InvalidArgument("truncation level J must be at least 1");
    const std::size_t n = domain->node_count();
    if (J > n) {
        throw InvalidArgument("J = " + std::to_string(J) + " exceeds the matrix dimension " + std::to_string(n));
    }

    const Eigen::SparseMatrix<double> L = dirichlet_laplacian(*domain);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(L);
    if (factor.info() != Eigen::Success) throw ConvergenceError("Laplacian factorization failed", NAN);

    // Subspace iteration on L^{-1} with Rayleigh-Ritz on a block wider than J.
    const std::size_t block = std::min(n, std::max(2 * J, J + 8));
    const std::size_t cap = options.max_iterations > 0
                                ? options.max_iterations
                                : static_cast<std::size_t>(std::ceil(10.0 * J * std::sqrt(static_cast<double>(n))));

    std::mt19937_64 rng(options.seed);
    Eigen::MatrixXd x(n, block);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            x(r, c) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
        }
    }
    x = orthonormalize(x);

    Eigen::VectorXd theta;
    Eigen::VectorXd residual(J);
    bool converged = false;
    std::size_t iteration = 0;
    while (iteration < cap) {
        ++iteration;
        Eigen::MatrixXd y = orthonormalize(factor.solve(x));
        Eigen::MatrixXd ly = L * y;
        Eigen::MatrixXd h = y.transpose() * ly;
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
        theta = ritz.eigenvalues();
        x = y * ritz.eigenvectors();
        const Eigen::MatrixXd lx = ly * ritz.eigenvectors();
        for (std::size_t j = 0; j < J; ++j) {
            residual[j] = (lx.col(j) - theta[j] * x.col(j)).norm() / x.col(j).norm();
        }
        if (residual.maxCoeff() <= options.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("discrete eigensolve did not converge in " + std::to_string(cap) +
                                   " iterations (max relative residual " + std::to_string(residual.maxCoeff()) + ")",
                               residual.maxCoeff());
    }

    const auto w = domain->weights();
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), w.size());
    const std::size_t centre = domain->node_nearest_centroid();

    Eigen::MatrixXd values(n, J);
    std::vector<double> eigenvalues(J);
    std::vector<double> residuals(J);
    for (std::size_t j = 0; j < J; ++j) {
        Eigen::VectorXd e = x.col(j);
        e /= std::sqrt((wv.array() * e.array().square()).sum());
        const double peak = e.cwiseAbs().maxCoeff();
        double sign_ref = e[centre];
        if (std::abs(sign_ref) <= 1e-8 * peak) {
            for (Eigen::Index q = 0; q < e.size(); ++q) {
                if (std::abs(e[q]) > 1e-6 * peak) {
                    sign_ref = e[q];
                    break;
                }
            }
        }
        if (sign_ref < 0.0) e = -e;
        values.col(j) = e;
        eigenvalues[j] = theta[j];
        residuals[j] = residual[j];
    }

    std::vector<std::string> warnings;
    if (domain->kind() == DomainKind::polygon2d && !domain->is_convex()) {
        warnings.emplace_back(
            "polygon is not convex: the weak and strong Dirichlet Laplacians need not coincide here, "
            "so H^2 regularity of the eigenfunctions is not guaranteed");
    }
    return std::make_shared<const SpectralBasis>(std::move(domain), BasisSource::discrete, std::move(eigenvalues),
                                                 std::move(values), std::vector<std::vector<int>>{},
                                                 std::move(residuals), std::move(warnings));
}

// ---------------------------------------------------------------------------
// convergence study

Domain refine_domain(const Domain& domain, double h) {
    if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
    if (domain.kind() == DomainKind::polygon2d) return make_polygon2d(domain.vertices(), h);
    std::vector<std::size_t> counts;
    for (double length : domain.lengths()) {
        const double n = length / h;
        const double rounded = std::round(n);
        if (rounded < 1.0 || std::abs(n - rounded) > 1e-6 * n) {
            throw InvalidArgument("spacing " + std::to_string(h) + " does not divide box length " +
                                  std::to_string(length));
        }
        counts.push_back(static_cast<std::size_t>(rounded));
    }
    return make_box(domain.lengths(), counts);
}

ConvergenceReport eigen_convergence_report(const Domain& domain, std::size_t J, std::span<const double> spacings,
                                           const DiscreteEigenOptions& options) {
    if (spacings.size() < 3) throw InvalidArgument("convergence study needs at least 3 grid spacings");
    for (std::size_t i = 1; i < spacings.size(); ++i) {
        if (!(spacings[i] < spacings[i - 1])) {
            throw InvalidArgument("grid spacings must be strictly decreasing (coarsest first)");
        }
    }
    const double ratio = spacings[0] / spacings[1];
    for (std::size_t i = 2; i < spacings.size(); ++i) {
        const double r = spacings[i - 1] / spacings[i];
        if (std::abs(r - ratio) > 1e-6 * ratio) {
            throw InvalidArgument("grid spacings must shrink by a constant ratio");
        }
    }

    ConvergenceReport report;
    report.spacings.assign(spacings.begin(), spacings.end());
    std::vector<std::vector<double>> lambdas;
    for (double h : spacings) {
        auto refined = std::make_shared<const Domain>(refine_domain(domain, h));
        auto basis = discrete_basis(refined, J, options);
        lambdas.push_back(basis->eigenvalues());
    }

    const std::size_t m = spacings.size();
    report.observed_order.resize(J);
    report.richardson_limit.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        const double l1 = lambdas[m - 3][j];
        const double l2 = lambdas[m - 2][j];
        const double l3 = lambdas[m - 1][j];
        const double q = (l1 - l2) / (l2 - l3);
        const double order = q > 0.0 ? std::log(q) / std::log(ratio) : std::numeric_limits<double>::quiet_NaN();
        report.observed_order[j] = order;
        report.richardson_limit[j] =
            std::isfinite(order) ? l3 + (l3 - l2) / (std::pow(ratio, order) - 1.0) : l3;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            report.rows.push_back({spacings[i], j + 1, lambdas[i][j],
                                   std::abs(lambdas[i][j] - report.richardson_limit[j])});
        }
    }
    return report;
}

} // namespace fraclap
