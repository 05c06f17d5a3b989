#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fraclap {

enum class DomainKind { box, polygon2d };

using Point2 = std::array<double, 2>;

/// A bounded open set together with the midpoint-type quadrature used for
/// every L2 inner product.
///
/// Boxes carry a tensor-product grid of cell centres (weights are cell
/// volumes). Polygons carry the lattice points of spacing `h` that lie
/// strictly inside the polygon, with weight h^2 each; the lattice is anchored
/// at the lower-left corner of the bounding box.
///
/// Immutable after construction.
class Domain {
public:
    DomainKind kind() const noexcept { return kind_; }
    std::size_t dimension() const noexcept { return dim_; }
    std::size_t node_count() const noexcept { return weights_.size(); }

    /// Coordinates of node `q` (length `dimension()`).
    std::span<const double> node(std::size_t q) const {
        return {coords_.data() + q * dim_, dim_};
    }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Integer lattice index of node `q` along each axis.
    std::span<const int> lattice_index(std::size_t q) const {
        return {lattice_.data() + q * dim_, dim_};
    }

    /// Sum of the quadrature weights.
    double measure() const noexcept { return measure_; }

    // box only
    const std::vector<double>& lengths() const noexcept { return lengths_; }
    const std::vector<std::size_t>& nodes_per_axis() const noexcept { return nodes_per_axis_; }
    /// Grid spacing along `axis` (box: L_i/n_i, polygon: h).
    double spacing(std::size_t axis) const;

    // polygon2d only
    const std::vector<Point2>& vertices() const noexcept { return vertices_; }
    double h() const noexcept { return h_; }
    bool is_convex() const noexcept { return convex_; }
    /// Number of lattice columns/rows covering the bounding box.
    std::array<int, 2> lattice_extent() const noexcept { return extent_; }

    /// Centroid of the region (box centre or polygon area centroid).
    std::vector<double> centroid() const;
    /// Index of the quadrature node closest to the centroid (lowest index on ties).
    std::size_t node_nearest_centroid() const;

private:
    friend Domain make_box(std::span<const double>, std::size_t);
    friend Domain make_box(std::span<const double>, std::span<const std::size_t>);
    friend Domain make_polygon2d(std::span<const Point2>, double);

    DomainKind kind_ = DomainKind::box;
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::vector<double> weights_;
    std::vector<int> lattice_;
    double measure_ = 0.0;

    std::vector<double> lengths_;
    std::vector<std::size_t> nodes_per_axis_;

    std::vector<Point2> vertices_;
    double h_ = 0.0;
    bool convex_ = true;
    std::array<int, 2> extent_{0, 0};
    Point2 origin_{0.0, 0.0};
};

inline constexpr std::size_t default_nodes_per_axis = 64;

/// Box (0,L_1) x ... x (0,L_N) with `nodes_per_axis` midpoint nodes per axis.
Domain make_box(std::span<const double> lengths, std::size_t nodes_per_axis = default_nodes_per_axis);
/// Box with a per-axis resolution.
Domain make_box(std::span<const double> lengths, std::span<const std::size_t> nodes_per_axis);

/// Simple polygon sampled on a lattice of spacing `h`. Clockwise vertex lists
/// are reoriented. Points on an edge are outside.
Domain make_polygon2d(std::span<const Point2> vertices, double h);

/// Sum_q w_q * samples_q.
double integrate(const Domain& domain, std::span<const double> samples);

/// Strict point-in-polygon test; points within `edge_tol` of an edge are outside.
bool strictly_inside(std::span<const Point2> polygon, Point2 p, double edge_tol);

} // namespace fraclap
