#include "fraclap/domain.hpp"

#include "fraclap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fraclap {

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

int orientation(Point2 o, Point2 a, Point2 b) {
    const double c = cross(o, a, b);
    return (c > 0.0) - (c < 0.0);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
    return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
           std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
}

// Closed-segment intersection, touching included.
bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

double signed_area(std::span<const Point2> v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& p = v[i];
        const auto& q = v[(i + 1) % v.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

double distance_to_segment(Point2 a, Point2 b, Point2 p) {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

void check_simple(std::span<const Point2> v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (v[i] == v[j]) throw InvalidDomain("polygon has repeated vertex " + std::to_string(j));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2 c = v[j];
            const Point2 d = v[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                // Shared vertex only; reject a fold-back along the same line.
                const Point2 shared = (j == i + 1) ? b : a;
                const Point2 other_first = (j == i + 1) ? a : b;
                const Point2 other_second = (j == i + 1) ? d : c;
                if (orientation(shared, other_first, other_second) == 0) {
                    const double dot = (other_first[0] - shared[0]) * (other_second[0] - shared[0]) +
                                       (other_first[1] - shared[1]) * (other_second[1] - shared[1]);
                    if (dot > 0.0) {
                        throw InvalidDomain("polygon edges " + std::to_string(i) + " and " +
                                            std::to_string(j) + " overlap");
                    }
                }
                continue;
            }
            if (segments_intersect(a, b, c, d)) {
                throw InvalidDomain("polygon is self-intersecting (edges " + std::to_string(i) + " and " +
                                    std::to_string(j) + ")");
            }
        }
    }
}

bool convex_ccw(std::span<const Point2> v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) < 0.0) return false;
    }
    return true;
}

} // namespace

bool strictly_inside(std::span<const Point2> polygon, Point2 p, double edge_tol) {
    const std::size_t n = polygon.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = polygon[i];
        const Point2 b = polygon[j];
        if (distance_to_segment(a, b, p) <= edge_tol) return false;
        if ((a[1] > p[1]) != (b[1] > p[1])) {
            const double x_cross = (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0];
            if (p[0] < x_cross) inside = !inside;
        }
    }
    return inside;
}

Domain make_box(std::span<const double> lengths, std::size_t nodes_per_axis) {
    std::vector<std::size_t> per_axis(lengths.size(), nodes_per_axis);
    return make_box(lengths, per_axis);
}

Domain make_box(std::span<const double> lengths, std::span<const std::size_t> nodes_per_axis) {
    if (lengths.empty()) throw InvalidDomain("box needs at least one axis");
    if (nodes_per_axis.size() != lengths.size()) {
        throw InvalidDomain("nodes_per_axis has " + std::to_string(nodes_per_axis.size()) +
                            " entries for a " + std::to_string(lengths.size()) + "-d box");
    }
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i])) {
            throw InvalidDomain("box length on axis " + std::to_string(i) + " must be positive, got " +
                                std::to_string(lengths[i]));
        }
        if (nodes_per_axis[i] == 0) throw InvalidDomain("nodes_per_axis must be positive");
    }

    Domain d;
    d.kind_ = DomainKind::box;
    d.dim_ = lengths.size();
    d.lengths_.assign(lengths.begin(), lengths.end());
    d.nodes_per_axis_.assign(nodes_per_axis.begin(), nodes_per_axis.end());

    std::size_t total = 1;
    double cell = 1.0;
    for (std::size_t i = 0; i < d.dim_; ++i) {
        total *= nodes_per_axis[i];
        cell *= lengths[i] / static_cast<double>(nodes_per_axis[i]);
    }
    d.coords_.resize(total * d.dim_);
    d.lattice_.resize(total * d.dim_);
    d.weights_.assign(total, cell);

    // First axis varies slowest.
    std::vector<std::size_t> idx(d.dim_, 0);
    for (std::size_t q = 0; q < total; ++q) {
        for (std::size_t i = 0; i < d.dim_; ++i) {
            const double step = lengths[i] / static_cast<double>(nodes_per_axis[i]);
            d.coords_[q * d.dim_ + i] = (static_cast<double>(idx[i]) + 0.5) * step;
            d.lattice_[q * d.dim_ + i] = static_cast<int>(idx[i]);
        }
        for (std::size_t i = d.dim_; i-- > 0;) {
            if (++idx[i] < nodes_per_axis[i]) break;
            idx[i] = 0;
        }
    }
    d.measure_ = integrate(d, std::vector<double>(total, 1.0));
    return d;
}

Domain make_polygon2d(std::span<const Point2> vertices, double h) {
    if (vertices.size() < 3) throw InvalidDomain("polygon needs at least 3 vertices");
    for (const auto& v : vertices) {
        if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw InvalidDomain("polygon vertex is not finite");
    }
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidDomain("grid spacing h must be positive");

    std::vector<Point2> v(vertices.begin(), vertices.end());
    check_simple(v);
    const double area = signed_area(v);
    if (area == 0.0) throw InvalidDomain("polygon has zero area");
    if (area < 0.0) std::reverse(v.begin(), v.end());

    double xmin = v[0][0], xmax = v[0][0], ymin = v[0][1], ymax = v[0][1];
    for (const auto& p : v) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    const double min_side = std::min(xmax - xmin, ymax - ymin);
    if (!(h < 0.5 * min_side)) {
        throw InvalidDomain("grid spacing h = " + std::to_string(h) +
                            " must be smaller than half the bounding box's shorter side (" +
                            std::to_string(0.5 * min_side) + ")");
    }

    Domain d;
    d.kind_ = DomainKind::polygon2d;
    d.dim_ = 2;
    d.h_ = h;
    d.origin_ = {xmin, ymin};
    d.convex_ = convex_ccw(v);
    const int nx = static_cast<int>(std::floor((xmax - xmin) / h + 1e-9)) + 1;
    const int ny = static_cast<int>(std::floor((ymax - ymin) / h + 1e-9)) + 1;
    d.extent_ = {nx, ny};

    const double edge_tol = 1e-9 * h;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const Point2 p{xmin + i * h, ymin + j * h};
            if (!strictly_inside(v, p, edge_tol)) continue;
            d.coords_.push_back(p[0]);
            d.coords_.push_back(p[1]);
            d.lattice_.push_back(i);
            d.lattice_.push_back(j);
        }
    }
    d.vertices_ = std::move(v);
    const std::size_t n = d.coords_.size() / 2;
    if (n < 4) {
        throw InvalidDomain("grid spacing h = " + std::to_string(h) + " leaves only " + std::to_string(n) +
                            " interior nodes (need at least 4)");
    }
    d.weights_.assign(n, h * h);
    d.measure_ = integrate(d, std::vector<double>(n, 1.0));
    return d;
}

double Domain::spacing(std::size_t axis) const {
    if (axis >= dim_) throw InvalidArgument("axis out of range");
    if (kind_ == DomainKind::polygon2d) return h_;
    return lengths_[axis] / static_cast<double>(nodes_per_axis_[axis]);
}

std::vector<double> Domain::centroid() const {
    if (kind_ == DomainKind::box) {
        std::vector<double> c(dim_);
        for (std::size_t i = 0; i < dim_; ++i) c[i] = 0.5 * lengths_[i];
        return c;
    }
    const double a = signed_area(vertices_);
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const auto& p = vertices_[i];
        const auto& q = vertices_[(i + 1) % vertices_.size()];
        const double c = p[0] * q[1] - q[0] * p[1];
        cx += (p[0] + q[0]) * c;
        cy += (p[1] + q[1]) * c;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

std::size_t Domain::node_nearest_centroid() const {
    const auto c = centroid();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < node_count(); ++q) {
        double s = 0.0;
        const auto x = node(q);
        for (std::size_t i = 0; i < dim_; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
        if (s < best_d) {
            best_d = s;
            best = q;
        }
    }
    return best;
}

double integrate(const Domain& domain, std::span<const double> samples) {
    const auto w = domain.weights();
    if (samples.size() != w.size()) {
        throw InvalidArgument("integrate: " + std::to_string(samples.size()) + " samples for " +
                              std::to_string(w.size()) + " quadrature nodes");
    }
    double s = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q) s += w[q] * samples[q];
    return s;
}

} // namespace fraclap
