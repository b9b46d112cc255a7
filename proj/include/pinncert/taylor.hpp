#ifndef PINNCERT_TAYLOR_HPP
#define PINNCERT_TAYLOR_HPP

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "multi_index.hpp"

namespace pinncert {

// Truncated multivariate Taylor arithmetic on a downward-closed multi-index
// set. Propagating these series through a tanh network yields exact values of
// D^alpha u_theta at a point (exact up to floating point), because every
// retained coefficient of a product or a composition only depends on
// coefficients beta <= alpha, which the closure keeps.

/// Fixed coefficient layout shared by all series of one shape.
class JetLayout {
public:
    int nvars = 0;
    int max_order = 0;
    std::vector<MultiIndex> alphas;      // alphas[0] is the zero index
    std::vector<double> alpha_fact;      // alpha!
    // product table: c[k] += a[i]*b[j] for every retained i+j=k
    struct Triple { int i, j, k; };
    std::vector<Triple> prod;

    std::size_t size() const { return alphas.size(); }

    int index_of(const MultiIndex& a) const {
        auto it = lookup_.find(a);
        return it == lookup_.end() ? -1 : it->second;
    }

    bool contains(const MultiIndex& a) const { return index_of(a) >= 0; }

    /// Layout holding all |alpha| <= order over nvars variables.
    static const JetLayout& full(int nvars, int order);

    /// Layout holding the downward closure of the requested indices.
    static std::shared_ptr<const JetLayout> closure(int nvars,
                                                    const std::vector<MultiIndex>& wanted);

    explicit JetLayout(int nv, std::vector<MultiIndex> idx) : nvars(nv), alphas(std::move(idx)) {
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            lookup_[alphas[i]] = static_cast<int>(i);
            alpha_fact.push_back(alpha_factorial(alphas[i]));
            max_order = std::max(max_order, order_of(alphas[i]));
        }
        if (alphas.empty() || order_of(alphas[0]) != 0)
            throw std::logic_error("jet layout must start with the zero index");
        MultiIndex sum(nvars, 0);
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            for (std::size_t j = 0; j < alphas.size(); ++j) {
                for (int v = 0; v < nvars; ++v) sum[v] = alphas[i][v] + alphas[j][v];
                int k = index_of(sum);
                if (k >= 0) prod.push_back({static_cast<int>(i), static_cast<int>(j), k});
            }
        }
    }

private:
    std::map<MultiIndex, int> lookup_;
};

inline const JetLayout& JetLayout::full(int nvars, int order) {
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(nvars, order);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto lay = std::make_unique<JetLayout>(nvars, indices_up_to(nvars, order));
        it = cache.emplace(key, std::move(lay)).first;
    }
    return *it->second;
}

inline std::shared_ptr<const JetLayout> JetLayout::closure(
    int nvars, const std::vector<MultiIndex>& wanted) {
    std::map<MultiIndex, bool> seen;
    std::vector<MultiIndex> stack = wanted;
    stack.push_back(MultiIndex(nvars, 0));
    while (!stack.empty()) {
        MultiIndex a = stack.back();
        stack.pop_back();
        if (static_cast<int>(a.size()) != nvars)
            throw std::invalid_argument("multi-index length must equal input dimension");
        if (seen.count(a)) continue;
        seen[a] = true;
        for (int v = 0; v < nvars; ++v)
            if (a[v] > 0) {
                MultiIndex b = a;
                b[v] -= 1;
                stack.push_back(b);
            }
    }
    std::vector<MultiIndex> idx;
    for (auto& kv : seen) idx.push_back(kv.first);
    std::sort(idx.begin(), idx.end(), [](const MultiIndex& a, const MultiIndex& b) {
        int oa = order_of(a), ob = order_of(b);
        if (oa != ob) return oa < ob;
        return a < b;
    });
    return std::make_shared<JetLayout>(nvars, std::move(idx));
}

/// One truncated series: coefficients c_alpha of f = sum c_alpha (z-z0)^alpha,
/// so D^alpha f(z0) = alpha! * c_alpha.
struct Series {
    const JetLayout* layout = nullptr;
    std::vector<double> c;

    Series() = default;
    explicit Series(const JetLayout& lay) : layout(&lay), c(lay.size(), 0.0) {}

    double value() const { return c[0]; }
    double deriv(const MultiIndex& a) const {
        int i = layout->index_of(a);
        if (i < 0) throw std::out_of_range("derivative " + to_string(a) + " not in jet layout");
        return c[i] * layout->alpha_fact[i];
    }
};

inline Series series_constant(const JetLayout& lay, double v) {
    Series s(lay);
    s.c[0] = v;
    return s;
}

/// Series of the coordinate z_axis around z0.
inline Series series_coordinate(const JetLayout& lay, double z0, int axis) {
    Series s(lay);
    s.c[0] = z0;
    int i = lay.index_of(unit_index(lay.nvars, axis));
    if (i >= 0) s.c[i] = 1.0;
    return s;
}

inline void series_mul(const JetLayout& lay, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < lay.size(); ++i) out[i] = 0.0;
    for (const auto& t : lay.prod) out[t.k] += a[t.i] * b[t.j];
}

/// Transpose of multiplication by a fixed series: adj_a[i] += sum_k bar[k]*b[j]
/// over retained triples. Used by the reverse sweep.
inline void series_mul_transpose(const JetLayout& lay, const double* b, const double* bar,
                                 double* adj) {
    for (const auto& t : lay.prod) adj[t.i] += bar[t.k] * b[t.j];
}

/// tanh and its derivatives at x, as polynomials in t = tanh(x).
/// d0..d4: tanh, 1-t^2, -2t+2t^3, -2+8t^2-6t^4, 16t-40t^3+24t^5.
inline void tanh_derivatives(double x, int order, double* d) {
    double t = std::tanh(x);
    double t2 = t * t;
    d[0] = t;
    if (order >= 1) d[1] = 1.0 - t2;
    if (order >= 2) d[2] = -2.0 * t * (1.0 - t2);
    if (order >= 3) d[3] = -2.0 + 8.0 * t2 - 6.0 * t2 * t2;
    if (order >= 4) d[4] = t * (16.0 - 40.0 * t2 + 24.0 * t2 * t2);
    if (order > 4) throw std::invalid_argument("tanh jet order > 4 unsupported");
}

/// out = tanh(g) truncated on the layout; scratch must hold 3*lay.size().
/// Writes tanh'(g) into dq when asked (needs lay.max_order <= 3); the reverse
/// sweep multiplies adjoints by that series.
inline void series_tanh(const JetLayout& lay, const double* g, double* out, double* dq,
                        double* scratch) {
    const int K = lay.max_order;
    if (dq && K > 3)
        throw std::invalid_argument("tanh'(g) series only available up to jet order 3");
    double d[5];
    tanh_derivatives(g[0], std::min(K + 1, 4), d);
    const std::size_t n = lay.size();
    double* p = scratch;        // g - g(0)
    double* pk = scratch + n;   // p^k
    double* tmp = scratch + 2 * n;
    for (std::size_t i = 0; i < n; ++i) p[i] = g[i];
    p[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    out[0] = d[0];
    if (dq) {
        for (std::size_t i = 0; i < n; ++i) dq[i] = 0.0;
        dq[0] = d[1];
    }
    for (std::size_t i = 0; i < n; ++i) pk[i] = p[i];
    double kfact = 1.0;
    for (int k = 1; k <= K; ++k) {
        kfact *= k;
        double ck = d[k] / kfact;
        for (std::size_t i = 0; i < n; ++i) out[i] += ck * pk[i];
        if (dq) {
            double cq = d[k + 1] / kfact;
            for (std::size_t i = 0; i < n; ++i) dq[i] += cq * pk[i];
        }
        if (k < K) {
            series_mul(lay, pk, p, tmp);
            std::swap(pk, tmp);
        }
    }
}

inline void series_tanh(const JetLayout& lay, const double* g, double* out) {
    std::vector<double> scratch(3 * lay.size());
    series_tanh(lay, g, out, nullptr, scratch.data());
}

/// Series of D^beta f to reduced order, from a series of f on a layout that
/// contains alpha+beta for every retained alpha: out_alpha = c_{alpha+beta} *
/// (alpha+beta)!/alpha!.
inline Series series_shift(const JetLayout& src_lay, const Series& f, const MultiIndex& beta,
                           const JetLayout& dst_lay) {
    Series out(dst_lay);
    MultiIndex sum(src_lay.nvars, 0);
    for (std::size_t i = 0; i < dst_lay.size(); ++i) {
        const MultiIndex& a = dst_lay.alphas[i];
        for (int v = 0; v < src_lay.nvars; ++v) sum[v] = a[v] + beta[v];
        int j = src_lay.index_of(sum);
        if (j < 0) throw std::out_of_range("source jet too short for shift by " + to_string(beta));
        out.c[i] = f.c[j] * src_lay.alpha_fact[j] / dst_lay.alpha_fact[i];
    }
    return out;
}

}  // namespace pinncert

#endif
