#ifndef PINNCERT_ADAM_HPP
#define PINNCERT_ADAM_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace pinncert {

/// Objective with gradient: returns f(x), fills grad when non-null.
using GradFn = std::function<double(const std::vector<double>&, std::vector<double>*)>;

struct AdamOptions {
    int steps = 1500;
    double lr = 8e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct OptResult {
    std::vector<double> x;
    std::vector<double> history;  // objective value at each evaluated iterate
    int iterations = 0;
    bool diverged = false;
    std::string status = "ok";
};

/// Full-batch Adam with bias correction; deterministic given inputs. A
/// non-finite objective halts with the partial history.
inline OptResult adam_run(std::vector<double> x0, const GradFn& fn, const AdamOptions& opt) {
    if (!(opt.lr > 0)) throw std::invalid_argument("adam learning rate must be positive");
    OptResult res;
    std::size_t n = x0.size();
    std::vector<double> m(n, 0.0), v(n, 0.0), g(n, 0.0);
    res.x = std::move(x0);
    for (int step = 1; step <= opt.steps; ++step) {
        double f = fn(res.x, &g);
        res.history.push_back(f);
        if (!std::isfinite(f)) {
            res.diverged = true;
            res.status = "non-finite objective at step " + std::to_string(step);
            return res;
        }
        double b1t = 1.0 - std::pow(opt.beta1, step);
        double b2t = 1.0 - std::pow(opt.beta2, step);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
            v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
            double mhat = m[i] / b1t;
            double vhat = v[i] / b2t;
            res.x[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
        }
        res.iterations = step;
    }
    return res;
}

}  // namespace pinncert

#endif
