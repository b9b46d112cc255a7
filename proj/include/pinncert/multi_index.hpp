#ifndef PINNCERT_MULTI_INDEX_HPP
#define PINNCERT_MULTI_INDEX_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinncert {

/// Multi-index alpha in N_0^v: exponents per input coordinate.
using MultiIndex = std::vector<int>;

inline int order_of(const MultiIndex& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}

inline bool leq(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline MultiIndex unit_index(int nvars, int axis, int k = 1) {
    MultiIndex a(nvars, 0);
    a[axis] = k;
    return a;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline double alpha_factorial(const MultiIndex& a) {
    double f = 1.0;
    for (int e : a) f *= factorial(e);
    return f;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// |P_{n,d}| = #{alpha in N_0^d : |alpha| = n} = C(n+d-1, n).
inline double p_set_size(int n, int d) { return binomial(n + d - 1, n); }

/// All alpha in N_0^v with |alpha| = k, lexicographic (first part descending).
inline std::vector<MultiIndex> indices_of_order(int nvars, int k) {
    std::vector<MultiIndex> out;
    if (nvars == 1) {
        out.push_back(MultiIndex{k});
        return out;
    }
    MultiIndex a(nvars, 0);
    a[0] = k;
    while (true) {
        out.push_back(a);
        int i = nvars - 2;
        while (i >= 0 && a[i] == 0) --i;
        if (i < 0) break;
        int moved = 1 + std::accumulate(a.begin() + i + 1, a.end(), 0);
        a[i] -= 1;
        std::fill(a.begin() + i + 1, a.end(), 0);
        a[i + 1] = moved;
    }
    return out;
}

/// All alpha in N_0^v with |alpha| <= order, graded lexicographic, zero first.
inline std::vector<MultiIndex> indices_up_to(int nvars, int order) {
    std::vector<MultiIndex> out;
    for (int k = 0; k <= order; ++k) {
        auto level = indices_of_order(nvars, k);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

inline std::string to_string(const MultiIndex& a) {
    std::string s = "(";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(a[i]);
    }
    return s + ")";
}

}  // namespace pinncert

#endif
