#ifndef PINNCERT_QUADRATURE_HPP
#define PINNCERT_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinncert {

/// Axis-aligned box; lo/hi per coordinate.
struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double edge(int i) const { return hi[i] - lo[i]; }
    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= edge(i);
        return v;
    }
    bool contains(const std::vector<double>& p, double tol = 0.0) const {
        for (int i = 0; i < dim(); ++i)
            if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
        return true;
    }
    void validate() const {
        if (lo.size() != hi.size() || lo.empty())
            throw std::invalid_argument("box needs matching lo/hi lists");
        for (int i = 0; i < dim(); ++i)
            if (!(edge(i) > 0.0)) throw std::invalid_argument("degenerate box edge on axis " +
                                                              std::to_string(i));
    }
};

enum class QuadKind { Interior, SpatialBoundary, Initial, Interface };

inline std::string to_string(QuadKind k) {
    switch (k) {
        case QuadKind::Interior: return "interior";
        case QuadKind::SpatialBoundary: return "spatial-boundary";
        case QuadKind::Initial: return "initial";
        case QuadKind::Interface: return "interface";
    }
    return "?";
}

/// Midpoint points and weights over one integration domain. Points are full
/// space-time coordinates (x_1..x_d, t); initial-slice points carry t = 0.
/// For periodic spatial boundaries, paired_point[i] is the index of the
/// twin on the opposite face (paired low face first, then high, per axis).
struct QuadratureSet {
    QuadKind kind = QuadKind::Interior;
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
    double measure = 0.0;  // |Lambda|
    std::vector<int> resolution;
    std::vector<int> paired_point;   // spatial-boundary only
    std::vector<int> face_axis;      // per point: axis of the owning face
    std::vector<int> face_side;      // 0 = low, 1 = high

    std::size_t size() const { return points.size(); }
};

/// Midpoint rule on space_box x [0,T]; res lists per-axis counts
/// (x_1..x_d, t). Weights are cell volumes and sum to the measure.
inline QuadratureSet midpoint_interior(const Box& space_box, double T,
                                       const std::vector<int>& res) {
    space_box.validate();
    if (!(T > 0)) throw std::invalid_argument("time horizon must be positive");
    int d = space_box.dim();
    if (static_cast<int>(res.size()) != d + 1)
        throw std::invalid_argument("need one resolution per axis (space then time)");
    for (int r : res)
        if (r < 1) throw std::invalid_argument("per-axis resolution must be >= 1");
    QuadratureSet qs;
    qs.kind = QuadKind::Interior;
    qs.resolution = res;
    Box full;
    full.lo = space_box.lo;
    full.hi = space_box.hi;
    full.lo.push_back(0.0);
    full.hi.push_back(T);
    qs.measure = full.volume();
    std::size_t m = 1;
    for (int r : res) m *= static_cast<std::size_t>(r);
    double w = qs.measure / static_cast<double>(m);
    qs.points.reserve(m);
    qs.weights.assign(m, w);
    std::vector<int> idx(d + 1, 0);
    std::vector<double> p(d + 1);
    for (std::size_t n = 0; n < m; ++n) {
        for (int a = 0; a <= d; ++a)
            p[a] = full.lo[a] + (idx[a] + 0.5) * full.edge(a) / res[a];
        qs.points.push_back(p);
        for (int a = d; a >= 0; --a) {
            if (++idx[a] < res[a]) break;
            idx[a] = 0;
        }
    }
    return qs;
}

/// Midpoint rule on the t = 0 slice of space_box; res lists spatial counts.
inline QuadratureSet initial_set(const Box& space_box, const std::vector<int>& res) {
    space_box.validate();
    int d = space_box.dim();
    if (static_cast<int>(res.size()) != d)
        throw std::invalid_argument("initial set needs one resolution per spatial axis");
    QuadratureSet qs;
    qs.kind = QuadKind::Initial;
    qs.resolution = res;
    qs.measure = space_box.volume();
    std::size_t m = 1;
    for (int r : res) {
        if (r < 1) throw std::invalid_argument("per-axis resolution must be >= 1");
        m *= static_cast<std::size_t>(r);
    }
    double w = qs.measure / static_cast<double>(m);
    qs.weights.assign(m, w);
    std::vector<int> idx(d, 0);
    std::vector<double> p(d + 1, 0.0);
    for (std::size_t n = 0; n < m; ++n) {
        for (int a = 0; a < d; ++a)
            p[a] = space_box.lo[a] + (idx[a] + 0.5) * space_box.edge(a) / res[a];
        p[d] = 0.0;
        qs.points.push_back(p);
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < res[a]) break;
            idx[a] = 0;
        }
    }
    return qs;
}

/// Faces of space_box crossed with [0,T]. Per axis the low face comes first,
/// then the high face with the identical point layout, so periodic residuals
/// can pair point i on the low face with its twin on the high face.
inline QuadratureSet spatial_boundary_set(const Box& space_box, double T,
                                          const std::vector<int>& res) {
    space_box.validate();
    if (!(T > 0)) throw std::invalid_argument("time horizon must be positive");
    int d = space_box.dim();
    if (static_cast<int>(res.size()) != d + 1)
        throw std::invalid_argument("need one resolution per axis (space then time)");
    QuadratureSet qs;
    qs.kind = QuadKind::SpatialBoundary;
    qs.resolution = res;
    for (int axis = 0; axis < d; ++axis) {
        double face_measure = T;
        for (int a = 0; a < d; ++a)
            if (a != axis) face_measure *= space_box.edge(a);
        std::size_t m = res[d];
        for (int a = 0; a < d; ++a)
            if (a != axis) m *= static_cast<std::size_t>(res[a]);
        double w = face_measure / static_cast<double>(m);
        std::size_t low_start = qs.points.size();
        for (int side = 0; side < 2; ++side) {
            std::vector<int> free_axes;
            for (int a = 0; a < d; ++a)
                if (a != axis) free_axes.push_back(a);
            free_axes.push_back(d);  // time
            std::vector<int> idx(free_axes.size(), 0);
            std::vector<double> p(d + 1);
            for (std::size_t n = 0; n < m; ++n) {
                p[axis] = side == 0 ? space_box.lo[axis] : space_box.hi[axis];
                for (std::size_t q = 0; q < free_axes.size(); ++q) {
                    int a = free_axes[q];
                    double lo = (a == d) ? 0.0 : space_box.lo[a];
                    double edge = (a == d) ? T : space_box.edge(a);
                    p[a] = lo + (idx[q] + 0.5) * edge / res[a];
                }
                qs.points.push_back(p);
                qs.weights.push_back(w);
                qs.face_axis.push_back(axis);
                qs.face_side.push_back(side);
                for (int q = static_cast<int>(free_axes.size()) - 1; q >= 0; --q) {
                    if (++idx[q] < res[free_axes[q]]) break;
                    idx[q] = 0;
                }
            }
        }
        qs.measure += 2.0 * face_measure;
        // twin indices: identical layouts on the two sides
        for (std::size_t n = 0; n < m; ++n) {
            qs.paired_point.push_back(static_cast<int>(low_start + m + n));
            // filled for the high side after the loop
        }
        for (std::size_t n = 0; n < m; ++n)
            qs.paired_point.push_back(static_cast<int>(low_start + n));
    }
    return qs;
}

/// Midpoint rule on the hyperplane x_axis = position inside space_box,
/// crossed with [0,T]; res lists counts for the remaining spatial axes then
/// time.
inline QuadratureSet interface_set(const Box& space_box, double T, int axis, double position,
                                   const std::vector<int>& res) {
    space_box.validate();
    int d = space_box.dim();
    if (axis < 0 || axis >= d) throw std::invalid_argument("interface axis out of range");
    if (position <= space_box.lo[axis] || position >= space_box.hi[axis])
        throw std::invalid_argument("interface position lies outside the box");
    if (static_cast<int>(res.size()) != d)
        throw std::invalid_argument("interface set needs resolutions for free axes plus time");
    QuadratureSet qs;
    qs.kind = QuadKind::Interface;
    qs.resolution = res;
    double measure = T;
    for (int a = 0; a < d; ++a)
        if (a != axis) measure *= space_box.edge(a);
    qs.measure = measure;
    std::vector<int> free_axes;
    for (int a = 0; a < d; ++a)
        if (a != axis) free_axes.push_back(a);
    free_axes.push_back(d);
    std::size_t m = 1;
    for (std::size_t q = 0; q < free_axes.size(); ++q) {
        if (res[q] < 1) throw std::invalid_argument("per-axis resolution must be >= 1");
        m *= static_cast<std::size_t>(res[q]);
    }
    double w = measure / static_cast<double>(m);
    std::vector<int> idx(free_axes.size(), 0);
    std::vector<double> p(d + 1);
    for (std::size_t n = 0; n < m; ++n) {
        p[axis] = position;
        for (std::size_t q = 0; q < free_axes.size(); ++q) {
            int a = free_axes[q];
            double lo = (a == d) ? 0.0 : space_box.lo[a];
            double edge = (a == d) ? T : space_box.edge(a);
            p[a] = lo + (idx[q] + 0.5) * edge / res[q];
        }
        qs.points.push_back(p);
        qs.weights.push_back(w);
        for (int q = static_cast<int>(free_axes.size()) - 1; q >= 0; --q) {
            if (++idx[q] < res[q]) break;
            idx[q] = 0;
        }
    }
    return qs;
}

/// Weighted sum; quadrature approximation of the integral over the set's
/// domain. Non-finite values are reported with the offending point.
inline double integrate(const QuadratureSet& set,
                        const std::function<double(const std::vector<double>&)>& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        double v = f(set.points[i]);
        if (!std::isfinite(v)) {
            std::string where;
            for (double c : set.points[i]) where += (where.empty() ? "" : ", ") + std::to_string(c);
            throw std::runtime_error("non-finite integrand at point (" + where + ")");
        }
        acc += set.weights[i] * v;
    }
    return acc;
}

/// Composite-midpoint error bound C_f * M^{-2/dim} with
/// C_f = (dim/24) |Lambda|^{1+2/dim} ||f||_{C^2}; exact for 1-D quadratics.
inline double quad_bound(double c2_norm, std::size_t m, int dim, double measure) {
    if (m < 1) throw std::invalid_argument("quad_bound needs at least one point");
    double cf = (static_cast<double>(dim) / 24.0) * std::pow(measure, 1.0 + 2.0 / dim) * c2_norm;
    return cf * std::pow(static_cast<double>(m), -2.0 / dim);
}

}  // namespace pinncert

#endif
