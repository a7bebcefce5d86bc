#pragma once

// Collocation and source node generation for the benchmark domains.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pikfnn/error.hpp"
#include "pikfnn/kernels.hpp"

namespace pikfnn {

enum class ConditionKind { Dirichlet, Neumann, Initial, InteriorResidual };

inline char to_char(ConditionKind k) {
    switch (k) {
    case ConditionKind::Dirichlet: return 'D';
    case ConditionKind::Neumann: return 'N';
    case ConditionKind::Initial: return 'I';
    case ConditionKind::InteriorResidual: return 'R';
    }
    return '?';
}

/// A node: position, optional unit outward normal, optional time.
struct Node {
    std::array<double, kMaxDim> x{};
    int dim = 0;
    bool has_normal = false;
    std::array<double, kMaxDim> normal{};
    bool has_t = false;
    double t = 0.0;

    SpaceTimePoint point() const {
        SpaceTimePoint p;
        p.x = x;
        p.dim = dim;
        p.has_t = has_t;
        p.t = t;
        return p;
    }
    std::span<const double> coords() const { return {x.data(), static_cast<std::size_t>(dim)}; }
    std::span<const double> normal_span() const { return {normal.data(), static_cast<std::size_t>(dim)}; }
};

inline Node make_node(std::initializer_list<double> coords) {
    Node n;
    n.dim = static_cast<int>(coords.size());
    std::copy(coords.begin(), coords.end(), n.x.begin());
    return n;
}

/// Training rows: one node, condition kind and prescribed value per row.
/// `component` selects the displacement/traction component (1 or 2) for
/// elasticity rows and is 0 for scalar problems; `time_order` is the time
/// derivative order of initial rows.
struct CollocationSet {
    int dim = 0;
    std::vector<Node> nodes;
    std::vector<ConditionKind> kinds;
    std::vector<double> values;
    std::vector<int> component;
    std::vector<int> time_order;

    std::size_t size() const { return nodes.size(); }

    void add(const Node& n, ConditionKind kind, double value, int comp = 0, int t_order = 0) {
        if (dim == 0) {
            dim = n.dim;
        }
        nodes.push_back(n);
        kinds.push_back(kind);
        values.push_back(value);
        component.push_back(comp);
        time_order.push_back(t_order);
    }

    void append(const CollocationSet& other) {
        for (std::size_t i = 0; i < other.size(); ++i) {
            add(other.nodes[i], other.kinds[i], other.values[i], other.component[i], other.time_order[i]);
        }
    }

    std::size_t count(ConditionKind k) const {
        return static_cast<std::size_t>(std::count(kinds.begin(), kinds.end(), k));
    }

    void validate() const {
        if (kinds.size() != nodes.size() || values.size() != nodes.size() || component.size() != nodes.size() ||
            time_order.size() != nodes.size()) {
            throw ValidationError("collocation set: per-row arrays have inconsistent lengths");
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& n = nodes[i];
            if (n.dim != dim) {
                throw ValidationError("collocation set: node " + std::to_string(i) + " has the wrong dimension");
            }
            for (int d = 0; d < n.dim; ++d) {
                if (!std::isfinite(n.x[static_cast<std::size_t>(d)])) {
                    throw ValidationError("collocation set: node " + std::to_string(i) + " is not finite");
                }
            }
            if (!std::isfinite(values[i])) {
                throw ValidationError("collocation set: value " + std::to_string(i) + " is not finite");
            }
            if (kinds[i] == ConditionKind::Neumann) {
                if (!n.has_normal) {
                    throw ValidationError("collocation set: Neumann row " + std::to_string(i) + " has no normal");
                }
                double n2 = 0.0;
                for (int d = 0; d < n.dim; ++d) {
                    n2 += n.normal[static_cast<std::size_t>(d)] * n.normal[static_cast<std::size_t>(d)];
                }
                if (std::abs(std::sqrt(n2) - 1.0) > 1e-8) {
                    throw ValidationError("collocation set: Neumann row " + std::to_string(i) +
                                          " normal is not unit length");
                }
            }
        }
    }
};

/// Source points s_i (with delay times tau_i for space-time problems).
struct SourceSet {
    std::vector<Node> points;
    double delay_dt = 0.0;

    std::size_t size() const { return points.size(); }
};

//
// Shapes
//

struct Shape {
    enum class Kind { Polygon, Circle, Sphere, Torus, Hypersphere4 };
    Kind kind = Kind::Circle;
    std::string name;
    int dim = 2;
    std::array<double, kMaxDim> center{};
    double radius = 1.0;
    double minor_radius = 0.5;
    /// Polygon vertices in counter-clockwise order.
    std::vector<std::array<double, 2>> vertices;
    std::uint64_t seed = 20231014;

    static Shape rectangle(double x0, double x1, double y0, double y1) {
        if (!(x1 > x0) || !(y1 > y0)) {
            throw DomainError("rectangle needs x1 > x0 and y1 > y0");
        }
        Shape s;
        s.kind = Kind::Polygon;
        s.name = "rectangle";
        s.vertices = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
        s.center = {0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.0, 0.0};
        return s;
    }
    static Shape square(double a, double b) {
        auto s = rectangle(a, b, a, b);
        s.name = "square";
        return s;
    }
    static Shape polygon(std::vector<std::array<double, 2>> v) {
        if (v.size() < 3) {
            throw DomainError("polygon needs at least three vertices");
        }
        Shape s;
        s.kind = Kind::Polygon;
        s.name = "polygon";
        double area = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& p = v[i];
            const auto& q = v[(i + 1) % v.size()];
            area += p[0] * q[1] - q[0] * p[1];
        }
        if (area < 0.0) {
            std::reverse(v.begin(), v.end());
        }
        double cx = 0.0;
        double cy = 0.0;
        for (const auto& p : v) {
            cx += p[0];
            cy += p[1];
        }
        s.center = {cx / static_cast<double>(v.size()), cy / static_cast<double>(v.size()), 0.0, 0.0};
        s.vertices = std::move(v);
        return s;
    }
    /// [-L, L]^2 minus [0, L]^2.
    static Shape lshape(double L) {
        if (!(L > 0.0)) {
            throw DomainError("lshape needs L > 0");
        }
        auto s = polygon({{-L, -L}, {L, -L}, {L, 0.0}, {0.0, 0.0}, {0.0, L}, {-L, L}});
        s.name = "lshape";
        s.center = {};
        return s;
    }
    static Shape circle(double R, std::array<double, 2> c = {0.0, 0.0}) {
        if (!(R > 0.0)) {
            throw DomainError("circle needs R > 0");
        }
        Shape s;
        s.kind = Kind::Circle;
        s.name = "circle";
        s.radius = R;
        s.center = {c[0], c[1], 0.0, 0.0};
        return s;
    }
    static Shape sphere(double R, std::array<double, 3> c = {0.0, 0.0, 0.0}) {
        if (!(R > 0.0)) {
            throw DomainError("sphere needs R > 0");
        }
        Shape s;
        s.kind = Kind::Sphere;
        s.name = "sphere";
        s.dim = 3;
        s.radius = R;
        s.center = {c[0], c[1], c[2], 0.0};
        return s;
    }
    /// Torus around the vertical axis through c.
    static Shape torus(double R_major = 2.0, double r_minor = 0.5, std::array<double, 3> c = {0.0, 0.0, 0.0}) {
        if (!(R_major > r_minor) || !(r_minor > 0.0)) {
            throw DomainError("torus needs R_major > r_minor > 0");
        }
        Shape s;
        s.kind = Kind::Torus;
        s.name = "torus";
        s.dim = 3;
        s.radius = R_major;
        s.minor_radius = r_minor;
        s.center = {c[0], c[1], c[2], 0.0};
        return s;
    }
    static Shape hypersphere4(double R, std::uint64_t seed = 20231014) {
        if (!(R > 0.0)) {
            throw DomainError("hypersphere4 needs R > 0");
        }
        Shape s;
        s.kind = Kind::Hypersphere4;
        s.name = "hypersphere4";
        s.dim = 4;
        s.radius = R;
        s.seed = seed;
        return s;
    }

    /// Rough length scale (bounding-box diagonal).
    double length_scale() const {
        switch (kind) {
        case Kind::Polygon: {
            double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
            for (const auto& v : vertices) {
                x0 = std::min(x0, v[0]);
                x1 = std::max(x1, v[0]);
                y0 = std::min(y0, v[1]);
                y1 = std::max(y1, v[1]);
            }
            return std::hypot(x1 - x0, y1 - y0);
        }
        case Kind::Circle: return 2.0 * std::sqrt(2.0) * radius;
        case Kind::Sphere: return 2.0 * std::sqrt(3.0) * radius;
        case Kind::Torus: return std::sqrt(8.0 * std::pow(radius + minor_radius, 2) + 4.0 * minor_radius * minor_radius);
        case Kind::Hypersphere4: return 4.0 * radius;
        }
        return 1.0;
    }

    /// Strict interior test with a margin (distance-like) from the boundary.
    bool contains(std::span<const double> p, double margin = 0.0) const {
        if (p.size() != static_cast<std::size_t>(dim)) {
            throw ValidationError("contains: point dimension does not match the shape");
        }
        switch (kind) {
        case Kind::Polygon: {
            bool inside = false;
            const std::size_t n = vertices.size();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const auto& a = vertices[i];
                const auto& b = vertices[j];
                if ((a[1] > p[1]) != (b[1] > p[1]) &&
                    p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]) {
                    inside = !inside;
                }
            }
            if (!inside) {
                return false;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const auto& a = vertices[i];
                const auto& b = vertices[(i + 1) % n];
                const double ex = b[0] - a[0];
                const double ey = b[1] - a[1];
                const double len2 = ex * ex + ey * ey;
                const double t = std::clamp(((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2, 0.0, 1.0);
                if (std::hypot(p[0] - a[0] - t * ex, p[1] - a[1] - t * ey) <= margin) {
                    return false;
                }
            }
            return true;
        }
        case Kind::Circle:
        case Kind::Sphere:
        case Kind::Hypersphere4: {
            double r2 = 0.0;
            for (int i = 0; i < dim; ++i) {
                const double d = p[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)];
                r2 += d * d;
            }
            return std::sqrt(r2) < radius - margin;
        }
        case Kind::Torus: {
            const double q = std::hypot(p[0] - center[0], p[1] - center[1]) - radius;
            return std::hypot(q, p[2] - center[2]) < minor_radius - margin;
        }
        }
        return false;
    }
};

namespace detail {

inline constexpr double kGolden = 1.6180339887498948482;

/// Midpoint-uniform nodes on segment a->b with the left-hand outward normal
/// of a counter-clockwise boundary.
inline void segment_nodes(std::vector<Node>& out, std::array<double, 2> a, std::array<double, 2> b, int m) {
    const double ex = b[0] - a[0];
    const double ey = b[1] - a[1];
    const double len = std::hypot(ex, ey);
    for (int i = 0; i < m; ++i) {
        const double t = (i + 0.5) / m;
        Node n;
        n.dim = 2;
        n.x[0] = a[0] + t * ex;
        n.x[1] = a[1] + t * ey;
        n.has_normal = true;
        n.normal[0] = ey / len;
        n.normal[1] = -ex / len;
        out.push_back(n);
    }
}

inline std::vector<Node> polygon_boundary(const Shape& s, int n) {
    const std::size_t nv = s.vertices.size();
    std::vector<double> lengths(nv);
    double perimeter = 0.0;
    for (std::size_t i = 0; i < nv; ++i) {
        const auto& a = s.vertices[i];
        const auto& b = s.vertices[(i + 1) % nv];
        lengths[i] = std::hypot(b[0] - a[0], b[1] - a[1]);
        perimeter += lengths[i];
    }
    const double spacing = perimeter / n;
    std::vector<Node> out;
    out.reserve(static_cast<std::size_t>(n));
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (int i = 0; i < n; ++i) {
        const double arc = (i + 0.5) * spacing;
        while (edge + 1 < nv && arc > edge_start + lengths[edge]) {
            edge_start += lengths[edge];
            ++edge;
        }
        const auto& a = s.vertices[edge];
        const auto& b = s.vertices[(edge + 1) % nv];
        const double t = std::clamp((arc - edge_start) / lengths[edge], 0.0, 1.0);
        const double ex = b[0] - a[0];
        const double ey = b[1] - a[1];
        Node node;
        node.dim = 2;
        node.x[0] = a[0] + t * ex;
        node.x[1] = a[1] + t * ey;
        node.has_normal = true;
        node.normal[0] = ey / lengths[edge];
        node.normal[1] = -ex / lengths[edge];
        out.push_back(node);
    }
    return out;
}

inline std::vector<Node> circle_boundary(double R, std::array<double, kMaxDim> c, int n) {
    std::vector<Node> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * i / n;
        Node node;
        node.dim = 2;
        // Exact values on the axes keep the quarter points clean.
        const double cs = (4 * i == n) || (4 * i == 3 * n) ? 0.0 : std::cos(th);
        const double sn = (2 * i == n) || i == 0 ? 0.0 : std::sin(th);
        node.x[0] = c[0] + R * cs;
        node.x[1] = c[1] + R * sn;
        node.has_normal = true;
        node.normal[0] = cs;
        node.normal[1] = sn;
        out.push_back(node);
    }
    return out;
}

/// Fibonacci spiral including both poles.
inline std::vector<Node> sphere_boundary(double R, std::array<double, kMaxDim> c, int n) {
    std::vector<Node> out;
    out.reserve(static_cast<std::size_t>(n));
    const double golden_angle = 2.0 * std::numbers::pi * (1.0 - 1.0 / kGolden);
    for (int i = 0; i < n; ++i) {
        const double z = n == 1 ? 1.0 : 1.0 - 2.0 * i / (n - 1);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double ph = golden_angle * i;
        double u[3] = {rho * std::cos(ph), rho * std::sin(ph), z};
        const double len = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        Node node;
        node.dim = 3;
        node.has_normal = true;
        for (int d = 0; d < 3; ++d) {
            node.normal[static_cast<std::size_t>(d)] = u[d] / len;
            node.x[static_cast<std::size_t>(d)] = c[static_cast<std::size_t>(d)] + R * u[d] / len;
        }
        out.push_back(node);
    }
    return out;
}

/// Area-uniform torus nodes: golden-ratio sequence in u, inverse-CDF in v
/// of the area density (R + r cos v).
inline std::vector<Node> torus_boundary(double R, double r, std::array<double, kMaxDim> c, int n) {
    std::vector<Node> out;
    out.reserve(static_cast<std::size_t>(n));
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < n; ++i) {
        const double fu = std::fmod(i / kGolden, 1.0);
        const double fv = (i + 0.5) / n;
        const double u = two_pi * fu;
        // Solve v + (r/R) sin v = 2 pi fv.
        const double target = two_pi * fv;
        double v = target;
        for (int it = 0; it < 50; ++it) {
            const double g = v + (r / R) * std::sin(v) - target;
            const double dg = 1.0 + (r / R) * std::cos(v);
            const double step = g / dg;
            v -= step;
            if (std::abs(step) < 1e-15) {
                break;
            }
        }
        Node node;
        node.dim = 3;
        node.has_normal = true;
        const double ring = R + r * std::cos(v);
        node.x[0] = c[0] + ring * std::cos(u);
        node.x[1] = c[1] + ring * std::sin(u);
        node.x[2] = c[2] + r * std::sin(v);
        node.normal[0] = std::cos(v) * std::cos(u);
        node.normal[1] = std::cos(v) * std::sin(u);
        node.normal[2] = std::sin(v);
        out.push_back(node);
    }
    return out;
}

inline std::vector<Node> hypersphere_boundary(double R, std::array<double, kMaxDim> c, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Node> out;
    out.reserve(static_cast<std::size_t>(n));
    while (static_cast<int>(out.size()) < n) {
        std::array<double, 4> u{};
        double n2 = 0.0;
        for (auto& c_i : u) {
            c_i = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
            n2 += c_i * c_i;
        }
        if (n2 > 1.0 || n2 < 1e-6) {
            continue;
        }
        const double len = std::sqrt(n2);
        Node node;
        node.dim = 4;
        node.has_normal = true;
        for (std::size_t d = 0; d < 4; ++d) {
            node.normal[d] = u[d] / len;
            node.x[d] = c[d] + R * u[d] / len;
        }
        out.push_back(node);
    }
    return out;
}

} // namespace detail

/// n boundary nodes with outward normals: arc-length uniform (corner
/// exclusive) on polygons, uniform angles from theta = 0 on circles,
/// Fibonacci spiral on spheres, area-uniform on the torus and seeded
/// uniform sampling on the 4D hypersphere.
inline std::vector<Node> gen_boundary(const Shape& shape, int n) {
    if (n < 1) {
        throw DomainError("gen_boundary: node count must be positive");
    }
    switch (shape.kind) {
    case Shape::Kind::Polygon: return detail::polygon_boundary(shape, n);
    case Shape::Kind::Circle: return detail::circle_boundary(shape.radius, shape.center, n);
    case Shape::Kind::Sphere: return detail::sphere_boundary(shape.radius, shape.center, n);
    case Shape::Kind::Torus: return detail::torus_boundary(shape.radius, shape.minor_radius, shape.center, n);
    case Shape::Kind::Hypersphere4: return detail::hypersphere_boundary(shape.radius, shape.center, n, shape.seed);
    }
    throw DomainError("gen_boundary: unsupported shape");
}

/// Nodes on the segment a->b (midpoint-uniform, endpoints excluded) with
/// the outward normal of a counter-clockwise boundary.
inline std::vector<Node> gen_segment(std::array<double, 2> a, std::array<double, 2> b, int m) {
    if (m < 1) {
        throw DomainError("gen_segment: node count must be positive");
    }
    std::vector<Node> out;
    detail::segment_nodes(out, a, b, m);
    return out;
}

/// Axis-aligned bounding box of the shape.
inline std::pair<std::array<double, kMaxDim>, std::array<double, kMaxDim>> bounding_box(const Shape& shape) {
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
    switch (shape.kind) {
    case Shape::Kind::Polygon:
        lo = {1e300, 1e300};
        hi = {-1e300, -1e300};
        for (const auto& v : shape.vertices) {
            for (std::size_t d = 0; d < 2; ++d) {
                lo[d] = std::min(lo[d], v[d]);
                hi[d] = std::max(hi[d], v[d]);
            }
        }
        break;
    case Shape::Kind::Torus:
        for (std::size_t d = 0; d < 3; ++d) {
            const double half = d < 2 ? shape.radius + shape.minor_radius : shape.minor_radius;
            lo[d] = shape.center[d] - half;
            hi[d] = shape.center[d] + half;
        }
        break;
    default:
        for (int d = 0; d < shape.dim; ++d) {
            lo[static_cast<std::size_t>(d)] = shape.center[static_cast<std::size_t>(d)] - shape.radius;
            hi[static_cast<std::size_t>(d)] = shape.center[static_cast<std::size_t>(d)] + shape.radius;
        }
    }
    return {lo, hi};
}

/// n seeded uniform points inside the shape (rejection sampling).
inline std::vector<Node> sample_interior(const Shape& shape, int n, std::uint64_t seed, double margin = 0.0) {
    if (n < 1) {
        throw DomainError("sample_interior: count must be positive");
    }
    const auto [lo, hi] = bounding_box(shape);
    std::mt19937_64 rng(seed);
    std::vector<Node> out;
    long attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > 1000L * n + 100000L) {
            throw DomainError("sample_interior: the shape interior is too thin for the margin");
        }
        Node p;
        p.dim = shape.dim;
        for (int d = 0; d < shape.dim; ++d) {
            const auto u = static_cast<std::size_t>(d);
            const double f = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            p.x[u] = lo[u] + f * (hi[u] - lo[u]);
        }
        if (shape.contains(p.coords(), margin)) {
            out.push_back(p);
        }
    }
    return out;
}

/// Uniform grid of roughly `target` interior points clipped to the shape.
inline std::vector<Node> gen_interior_grid(const Shape& shape, int target, double margin = 0.0) {
    if (target < 1) {
        throw DomainError("gen_interior_grid: target must be positive");
    }
    const auto [lo, hi] = bounding_box(shape);
    const int dim = shape.dim;
    // Fraction of the bounding box inside the shape, estimated on a coarse grid.
    auto grid = [&](double spacing) {
        std::vector<Node> pts;
        std::array<int, kMaxDim> counts{1, 1, 1, 1};
        for (int d = 0; d < dim; ++d) {
            const auto u = static_cast<std::size_t>(d);
            counts[u] = std::max(1, static_cast<int>(std::floor((hi[u] - lo[u]) / spacing)));
        }
        std::array<int, kMaxDim> idx{};
        while (true) {
            Node n;
            n.dim = dim;
            for (int d = 0; d < dim; ++d) {
                const auto u = static_cast<std::size_t>(d);
                n.x[u] = lo[u] + (idx[u] + 0.5) * (hi[u] - lo[u]) / counts[u];
            }
            if (shape.contains(n.coords(), margin)) {
                pts.push_back(n);
            }
            int d = 0;
            while (d < dim) {
                const auto u = static_cast<std::size_t>(d);
                if (++idx[u] < counts[u]) {
                    break;
                }
                idx[u] = 0;
                ++d;
            }
            if (d == dim) {
                break;
            }
        }
        return pts;
    };
    double volume = 1.0;
    for (int d = 0; d < dim; ++d) {
        volume *= hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)];
    }
    double spacing = std::pow(volume / target, 1.0 / dim);
    auto pts = grid(spacing);
    // Refine the spacing once using the measured fill fraction.
    if (!pts.empty()) {
        const double fraction = static_cast<double>(pts.size()) / target;
        spacing *= std::pow(fraction, 1.0 / dim);
        pts = grid(spacing);
    }
    return pts;
}

//
// Sources
//

struct SourcePlacement {
    enum class Kind { ScaledCircle, ScaledSphere, SameNodesWithDelay, Inflated };
    Kind kind = Kind::ScaledCircle;
    double radius = 1.0;
    double dt = 0.0;
    double factor = 1.0;

    static SourcePlacement scaled_circle(double R) { return {Kind::ScaledCircle, R, 0.0, 1.0}; }
    static SourcePlacement scaled_sphere(double R) { return {Kind::ScaledSphere, R, 0.0, 1.0}; }
    static SourcePlacement same_nodes_with_delay(double dt) { return {Kind::SameNodesWithDelay, 1.0, dt, 1.0}; }
    static SourcePlacement inflated(double factor) { return {Kind::Inflated, 1.0, 0.0, factor}; }
};

/// Throws if any source coincides with a collocation node (spatially, or in
/// space-time for delayed sources).
inline void check_source_separation(const SourceSet& sources, const std::vector<Node>& colloc, double scale) {
    const double tol = 1e-10 * std::max(scale, 1e-300);
    for (const auto& s : sources.points) {
        for (const auto& c : colloc) {
            double d2 = 0.0;
            for (int i = 0; i < s.dim; ++i) {
                const double d = s.x[static_cast<std::size_t>(i)] - c.x[static_cast<std::size_t>(i)];
                d2 += d * d;
            }
            if (s.has_t && c.has_t) {
                const double d = s.t - c.t;
                d2 += d * d;
            }
            if (std::sqrt(d2) <= tol) {
                throw DomainError("source placement coincides with a collocation node");
            }
        }
    }
}

/// Fictitious-boundary sources for `boundary_shape`. Radial placements are
/// centered on the shape center; `inflated` scales the boundary nodes about
/// the center. For interior problems `colloc` may be passed to check
/// separation.
inline SourceSet gen_sources(const Shape& boundary_shape, const SourcePlacement& placement, int n,
                             const std::vector<Node>& colloc = {}) {
    if (n < 1) {
        throw DomainError("gen_sources: source count must be positive");
    }
    SourceSet out;
    switch (placement.kind) {
    case SourcePlacement::Kind::ScaledCircle:
        if (boundary_shape.dim != 2) {
            throw DomainError("scaled_circle placement needs a 2D shape");
        }
        out.points = detail::circle_boundary(placement.radius, boundary_shape.center, n);
        break;
    case SourcePlacement::Kind::ScaledSphere:
        if (boundary_shape.dim == 3) {
            out.points = detail::sphere_boundary(placement.radius, boundary_shape.center, n);
        } else if (boundary_shape.dim == 4) {
            out.points = detail::hypersphere_boundary(placement.radius, boundary_shape.center, n,
                                                      boundary_shape.seed + 1);
        } else {
            throw DomainError("scaled_sphere placement needs a 3D or 4D shape");
        }
        break;
    case SourcePlacement::Kind::Inflated: {
        if (!(placement.factor > 0.0)) {
            throw DomainError("inflation factor must be positive");
        }
        out.points = gen_boundary(boundary_shape, n);
        for (auto& p : out.points) {
            for (int d = 0; d < p.dim; ++d) {
                const auto u = static_cast<std::size_t>(d);
                p.x[u] = boundary_shape.center[u] + placement.factor * (p.x[u] - boundary_shape.center[u]);
            }
        }
        break;
    }
    case SourcePlacement::Kind::SameNodesWithDelay:
        throw DomainError("same_nodes_with_delay needs space-time nodes; use gen_delayed_sources");
    }
    for (auto& p : out.points) {
        p.has_normal = false;
    }
    if (!colloc.empty()) {
        check_source_separation(out, colloc, boundary_shape.length_scale());
    }
    return out;
}

/// Space-time sources at the collocation nodes, shifted back in time by
/// the delay: tau_i = t_i - dt, so Theta(t - tau) is active on the whole
/// training window.
inline SourceSet gen_delayed_sources(const std::vector<Node>& spacetime_nodes, double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("delay time must be positive");
    }
    SourceSet out;
    out.delay_dt = dt;
    out.points.reserve(spacetime_nodes.size());
    for (const auto& n : spacetime_nodes) {
        if (!n.has_t) {
            throw DomainError("delayed sources need nodes with times");
        }
        Node s = n;
        s.has_normal = false;
        s.t = n.t - dt;
        out.points.push_back(s);
    }
    return out;
}

using SpaceTimeFunction = std::function<double(const SpaceTimePoint&)>;

/// Boundary rows at every (x_b, t_j) and initial rows at (x, 0).
inline CollocationSet gen_spacetime_grid(const std::vector<Node>& boundary, const std::vector<double>& times,
                                         const std::vector<Node>& initial, const SpaceTimeFunction& bc = {},
                                         const SpaceTimeFunction& ic = {}) {
    if (times.empty()) {
        throw DomainError("gen_spacetime_grid: empty time list");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
            throw DomainError("gen_spacetime_grid: time instants must be positive and strictly increasing");
        }
    }
    CollocationSet set;
    set.dim = boundary.empty() ? (initial.empty() ? 0 : initial.front().dim) : boundary.front().dim;
    for (double t : times) {
        for (const auto& b : boundary) {
            Node n = b;
            n.has_t = true;
            n.t = t;
            set.add(n, ConditionKind::Dirichlet, bc ? bc(n.point()) : 0.0);
        }
    }
    for (const auto& i0 : initial) {
        Node n = i0;
        n.has_t = true;
        n.t = 0.0;
        set.add(n, ConditionKind::Initial, ic ? ic(n.point()) : 0.0);
    }
    return set;
}

} // namespace pikfnn
