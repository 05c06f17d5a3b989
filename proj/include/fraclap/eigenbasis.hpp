#pragma once

#include "fraclap/domain.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fraclap {

enum class BasisSource { analytic, discrete, synthetic };

const char* to_string(BasisSource source);

/// One eigenpair of the Dirichlet Laplacian, with the eigenfunction sampled on
/// the quadrature nodes.
struct EigenPair {
    double lambda = 0.0;
    std::vector<double> values;
    std::vector<int> mode_index;      ///< analytic box modes only
    std::optional<double> residual;   ///< relative eigen-residual (discrete only)
};

/// Ordered eigenpairs (lambda_1 <= ... <= lambda_J, repeated per multiplicity)
/// with L2-orthonormal eigenfunctions sampled on the domain's quadrature.
///
/// A `synthetic` basis carries eigenvalues only; it exists for exercising the
/// coefficient-space calculus on spectra no domain here produces (e.g. with
/// eigenvalues below 1) and cannot be synthesized to grid samples.
class SpectralBasis {
public:
    SpectralBasis(std::shared_ptr<const Domain> domain, BasisSource source, std::vector<double> eigenvalues,
                  Eigen::MatrixXd values, std::vector<std::vector<int>> modes, std::vector<double> residuals,
                  std::vector<std::string> warnings = {});

    static std::shared_ptr<const SpectralBasis> synthetic(std::vector<double> eigenvalues);

    std::size_t size() const noexcept { return eigenvalues_.size(); }
    BasisSource source() const noexcept { return source_; }
    bool has_samples() const noexcept { return domain_ != nullptr; }

    const Domain& domain() const;
    const std::shared_ptr<const Domain>& domain_ptr() const noexcept { return domain_; }

    const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
    double eigenvalue(std::size_t j) const { return eigenvalues_.at(j); }

    /// nodes x J matrix; column j holds e_{j+1} at the quadrature nodes.
    const Eigen::MatrixXd& values() const;

    const std::vector<std::vector<int>>& modes() const noexcept { return modes_; }
    /// Relative residuals ||L e - lambda e|| / ||e|| (discrete); empty otherwise.
    const std::vector<double>& residuals() const noexcept { return residuals_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    EigenPair pair(std::size_t j) const;

    /// Gram matrix G_ij = integrate(e_i e_j).
    Eigen::MatrixXd gram() const;

private:
    std::shared_ptr<const Domain> domain_;
    BasisSource source_;
    std::vector<double> eigenvalues_;
    Eigen::MatrixXd values_;
    std::vector<std::vector<int>> modes_;
    std::vector<double> residuals_;
    std::vector<std::string> warnings_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

/// The J smallest eigenpairs of a box, lambda = sum_i (k_i pi / L_i)^2 with
/// e = prod_i sqrt(2/L_i) sin(k_i pi x_i / L_i). Ties are broken by the
/// lexicographic order of the mode tuple.
BasisPtr analytic_box_basis(std::shared_ptr<const Domain> domain, std::size_t J);

struct DiscreteEigenOptions {
    double tolerance = 1e-8;        ///< relative eigen-residual for acceptance
    std::size_t max_iterations = 0; ///< 0: 10 * J * sqrt(dim)
    std::uint64_t seed = 0x5eedf00dULL;
};

/// Five-point finite-difference Dirichlet Laplacian on the domain's grid.
/// Polygon: L_pp = 4/h^2, L_pq = -1/h^2 for lattice neighbours, neighbours
/// outside the polygon drop out. Box (cell-centred): the boundary lies half a
/// cell beyond the outer nodes and is imposed with an odd reflection, which
/// adds 1/h_i^2 to the diagonal of boundary-adjacent nodes.
Eigen::SparseMatrix<double> dirichlet_laplacian(const Domain& domain);

/// The J smallest eigenpairs of `dirichlet_laplacian(domain)`, normalized so
/// that sum_q w_q e(x_q)^2 = 1 and signed so that e is nonnegative at the node
/// nearest the centroid.
BasisPtr discrete_basis(std::shared_ptr<const Domain> domain, std::size_t J,
                        const DiscreteEigenOptions& options = {});

struct ConvergenceRow {
    double h = 0.0;
    std::size_t j = 0;       ///< 1-based eigenvalue index
    double lambda = 0.0;
    double error = 0.0;      ///< |lambda - Richardson limit|
};

struct ConvergenceReport {
    std::vector<double> spacings;          ///< as supplied, coarsest first
    std::vector<ConvergenceRow> rows;
    std::vector<double> observed_order;    ///< per j, from the three finest spacings
    std::vector<double> richardson_limit;  ///< per j
};

/// Runs `discrete_basis` on successively refined grids and estimates the
/// observed order of each eigenvalue by Richardson extrapolation. The
/// spacings must be strictly decreasing with a constant ratio.
ConvergenceReport eigen_convergence_report(const Domain& domain, std::size_t J, std::span<const double> spacings,
                                           const DiscreteEigenOptions& options = {});

/// Rebuild `domain` at grid spacing `h` (box: nodes per axis = L_i / h, which
/// must be an integer).
Domain refine_domain(const Domain& domain, double h);

} // namespace fraclap
