#ifndef PINNCERT_STENCIL_HPP
#define PINNCERT_STENCIL_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "multi_index.hpp"

namespace pinncert {

/// Central finite-difference stencil for the p-th derivative with accuracy
/// order n: coefficients a_{-l..l} with sum_i a_i i^j = p! delta_{jp} for
/// 0 <= j <= p+n-1, l = (p+n-1)/2.
struct Stencil {
    int half_width = 0;
    int deriv_order = 0;
    int accuracy_order = 0;
    std::vector<double> coeff;  // index i+half_width holds a_i

    double at(int i) const { return coeff[i + half_width]; }

    /// max_j |sum_i a_i i^j - p! delta_{jp}|, the defining moment system.
    double moment_defect() const {
        double worst = 0.0;
        int m = deriv_order + accuracy_order - 1;
        for (int j = 0; j <= m; ++j) {
            double s = 0.0;
            for (int i = -half_width; i <= half_width; ++i) s += at(i) * std::pow(i, j);
            double target = (j == deriv_order) ? factorial(deriv_order) : 0.0;
            worst = std::max(worst, std::abs(s - target));
        }
        return worst;
    }
};

namespace detail {
// dense solve with partial pivoting; systems here are at most ~15x15
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) throw std::runtime_error("singular stencil system");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            std::swap(rhs[piv], rhs[col]);
        }
        double d = a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}
}  // namespace detail

/// Solves the Vandermonde moment system. p+n must be odd so the half-width is
/// an integer; even p+n bumps n to n+1.
inline Stencil fd_weights(int p, int n) {
    if (p < 1) throw std::invalid_argument("derivative order must be >= 1");
    if (n < 1) throw std::invalid_argument("accuracy order must be >= 1");
    if ((p + n) % 2 == 0) n += 1;  // bump to the next odd total
    Stencil st;
    st.deriv_order = p;
    st.accuracy_order = n;
    st.half_width = (p + n - 1) / 2;
    int m = 2 * st.half_width + 1;  // unknowns == equations (j = 0..p+n-1)
    std::vector<double> a(static_cast<std::size_t>(m) * m), rhs(m, 0.0);
    for (int j = 0; j < m; ++j)
        for (int i = -st.half_width; i <= st.half_width; ++i)
            a[static_cast<std::size_t>(j) * m + (i + st.half_width)] = std::pow(i, j);
    rhs[p] = factorial(p);
    st.coeff = detail::solve_dense(std::move(a), std::move(rhs), m);
    if (st.moment_defect() > 1e-10)
        throw std::runtime_error("stencil moment system solved inaccurately");
    return st;
}

/// Central finite-difference approximation of D^alpha f at z with per-axis
/// stencils of the given accuracy order; generic over the scalar type so the
/// derivative oracles can run in long double.
template <typename T, typename F>
T fd_apply(const F& f, std::vector<T> z, const MultiIndex& alpha, double h, int accuracy = 4) {
    std::vector<int> axes;
    std::vector<Stencil> stencils;
    for (std::size_t v = 0; v < alpha.size(); ++v)
        if (alpha[v] > 0) {
            axes.push_back(static_cast<int>(v));
            stencils.push_back(fd_weights(alpha[v], accuracy));
        }
    if (axes.empty()) return f(z);
    // tensor application, recursing one axis at a time
    struct Rec {
        const F& f;
        const std::vector<int>& axes;
        const std::vector<Stencil>& st;
        double h;
        T eval(std::vector<T>& z, std::size_t depth) {
            if (depth == axes.size()) return f(z);
            const Stencil& s = st[depth];
            T acc(0);
            T saved = z[axes[depth]];
            for (int i = -s.half_width; i <= s.half_width; ++i) {
                double c = s.at(i);
                if (c == 0.0) continue;
                z[axes[depth]] = saved + T(i) * T(h);
                acc += T(c) * eval(z, depth + 1);
            }
            z[axes[depth]] = saved;
            return acc;
        }
    } rec{f, axes, stencils, h};
    T scale(1);
    for (std::size_t k = 0; k < axes.size(); ++k)
        for (int q = 0; q < alpha[axes[k]]; ++q) scale *= T(h);
    return rec.eval(z, 0) / scale;
}

}  // namespace pinncert

#endif
