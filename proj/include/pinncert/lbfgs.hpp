#ifndef PINNCERT_LBFGS_HPP
#define PINNCERT_LBFGS_HPP

#include <cmath>
#include <deque>

#include "adam.hpp"

namespace pinncert {

struct LbfgsOptions {
    int max_iter = 300;
    int memory = 10;
    double c1 = 1e-4;   // sufficient decrease
    double c2 = 0.9;    // curvature
    double gtol = 1e-12;
    int max_linesearch = 40;
};

/// Per accepted step: the quantities needed to re-check the strong Wolfe
/// conditions after the fact.
struct WolfeRecord {
    double f0 = 0.0;      // phi(0)
    double dphi0 = 0.0;   // phi'(0) = g . d
    double alpha = 0.0;
    double f1 = 0.0;      // phi(alpha)
    double dphi1 = 0.0;   // phi'(alpha)
};

struct LbfgsResult : OptResult {
    std::vector<WolfeRecord> wolfe;
    bool line_search_failed = false;
};

namespace detail {

// cubic minimizer of the Hermite interpolant through (a, fa, ga), (b, fb, gb);
// falls back to bisection when the formula degenerates
inline double cubic_step(double a, double fa, double ga, double b, double fb, double gb) {
    double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
    double disc = d1 * d1 - ga * gb;
    if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (a + b);
    double d2 = std::sqrt(disc);
    if (b < a) d2 = -d2;
    double t = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
    double lo = std::min(a, b), hi = std::max(a, b);
    double margin = 0.05 * (hi - lo);
    if (!std::isfinite(t) || t < lo + margin || t > hi - margin) return 0.5 * (a + b);
    return t;
}

}  // namespace detail

/// Limited-memory BFGS with the two-loop recursion and a strong-Wolfe line
/// search (bracket + zoom with cubic interpolation). Terminates on gradient
/// norm below gtol, on max_iter, or on line-search failure, in which case the
/// best iterate so far is returned with a status flag.
inline LbfgsResult lbfgs_run(std::vector<double> x0, const GradFn& fn, const LbfgsOptions& opt) {
    if (opt.memory < 1) throw std::invalid_argument("lbfgs memory must be >= 1");
    LbfgsResult res;
    const std::size_t n = x0.size();
    res.x = std::move(x0);
    std::vector<double> g(n), gnew(n), d(n), xnew(n);
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    auto norm2 = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    double f = fn(res.x, &g);
    res.history.push_back(f);
    if (!std::isfinite(f)) {
        res.diverged = true;
        res.status = "non-finite objective at the initial point";
        return res;
    }
    for (int iter = 1; iter <= opt.max_iter; ++iter) {
        double gnorm = norm2(g);
        if (gnorm <= opt.gtol * std::max(1.0, norm2(res.x))) {
            res.status = "converged";
            return res;
        }
        // two-loop recursion: d = -H g
        d.assign(g.begin(), g.end());
        std::vector<double> alpha_mem(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha_mem[i] = rho_hist[i] * dot(s_hist[i], d);
            for (std::size_t k = 0; k < n; ++k) d[k] -= alpha_mem[i] * y_hist[i][k];
        }
        if (!s_hist.empty()) {
            double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (auto& v : d) v *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * dot(y_hist[i], d);
            for (std::size_t k = 0; k < n; ++k) d[k] += s_hist[i][k] * (alpha_mem[i] - beta);
        }
        for (auto& v : d) v = -v;

        double dphi0 = dot(g, d);
        if (dphi0 >= 0.0) {  // not a descent direction: restart from steepest descent
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t k = 0; k < n; ++k) d[k] = -g[k];
            dphi0 = -gnorm * gnorm;
        }

        auto phi = [&](double a, std::vector<double>* grad_out) {
            for (std::size_t k = 0; k < n; ++k) xnew[k] = res.x[k] + a * d[k];
            return fn(xnew, grad_out);
        };

        // strong Wolfe line search
        double a_prev = 0.0, f_prev = f, dphi_prev = dphi0;
        double a_cur = (iter == 1 && s_hist.empty()) ? std::min(1.0, 1.0 / std::max(gnorm, 1e-30))
                                                     : 1.0;
        double a_lo = 0, f_lo = 0, dphi_lo = 0, a_hi = 0, f_hi = 0, dphi_hi = 0;
        bool bracketed = false, accepted = false;
        double a_acc = 0, f_acc = 0, dphi_acc = 0;
        int evals = 0;
        while (evals < opt.max_linesearch) {
            double fc = phi(a_cur, &gnew);
            double dphic = dot(gnew, d);
            ++evals;
            if (!std::isfinite(fc)) {  // shrink back toward the last good point
                a_cur = 0.5 * (a_prev + a_cur);
                continue;
            }
            if (fc > f + opt.c1 * a_cur * dphi0 || (evals > 1 && fc >= f_prev)) {
                a_lo = a_prev; f_lo = f_prev; dphi_lo = dphi_prev;
                a_hi = a_cur; f_hi = fc; dphi_hi = dphic;
                bracketed = true;
                break;
            }
            if (std::abs(dphic) <= -opt.c2 * dphi0) {
                accepted = true;
                a_acc = a_cur; f_acc = fc; dphi_acc = dphic;
                break;
            }
            if (dphic >= 0.0) {
                a_lo = a_cur; f_lo = fc; dphi_lo = dphic;
                a_hi = a_prev; f_hi = f_prev; dphi_hi = dphi_prev;
                bracketed = true;
                break;
            }
            a_prev = a_cur; f_prev = fc; dphi_prev = dphic;
            a_cur = 2.0 * a_cur;
        }
        if (bracketed && !accepted) {  // zoom
            while (evals < opt.max_linesearch) {
                double aj = detail::cubic_step(a_lo, f_lo, dphi_lo, a_hi, f_hi, dphi_hi);
                double fj = phi(aj, &gnew);
                double dphij = dot(gnew, d);
                ++evals;
                if (!std::isfinite(fj) || fj > f + opt.c1 * aj * dphi0 || fj >= f_lo) {
                    a_hi = aj; f_hi = fj; dphi_hi = dphij;
                } else {
                    if (std::abs(dphij) <= -opt.c2 * dphi0) {
                        accepted = true;
                        a_acc = aj; f_acc = fj; dphi_acc = dphij;
                        break;
                    }
                    if (dphij * (a_hi - a_lo) >= 0.0) {
                        a_hi = a_lo; f_hi = f_lo; dphi_hi = dphi_lo;
                    }
                    a_lo = aj; f_lo = fj; dphi_lo = dphij;
                }
                if (std::abs(a_hi - a_lo) < 1e-16 * std::max(1.0, std::abs(a_lo))) break;
            }
        }
        if (!accepted) {
            res.line_search_failed = true;
            res.status = "line search failed at iteration " + std::to_string(iter);
            return res;  // best-so-far: res.x unchanged since the last accepted step
        }
        // recompute gradient at the accepted point (gnew already holds it)
        res.wolfe.push_back({f, dphi0, a_acc, f_acc, dphi_acc});
        for (std::size_t k = 0; k < n; ++k) xnew[k] = res.x[k] + a_acc * d[k];
        std::vector<double> s(n), y(n);
        for (std::size_t k = 0; k < n; ++k) {
            s[k] = xnew[k] - res.x[k];
            y[k] = gnew[k] - g[k];
        }
        double sy = dot(s, y);
        if (sy > 1e-300) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        res.x = xnew;
        f = f_acc;
        g = gnew;
        res.history.push_back(f);
        res.iterations = iter;
    }
    res.status = "max iterations";
    return res;
}

}  // namespace pinncert

#endif
