#ifndef PINNCERT_TRAIN_HPP
#define PINNCERT_TRAIN_HPP

#include <chrono>

#include "lbfgs.hpp"
#include "loss.hpp"

namespace pinncert {

struct TrainConfig {
    TaylorGreen tg;                       // benchmark: nu, rho, box, horizon
    std::vector<int> widths{3, 20, 20, 3};
    bool per_component = false;
    InitScheme init = InitScheme::GlorotUniform;

    bool xpinn = false;
    double xpinn_split_x = 2.5;
    std::vector<int> interface_res{30, 10};  // free spatial axes, then time

    std::vector<int> interior_res{16, 16, 16};  // x, y, t
    std::vector<int> boundary_res{8, 8, 8};
    std::vector<int> initial_res{16, 16};
    std::vector<int> eval_res{20, 20, 20};

    LossWeights weights;
    BoundaryMode boundary = BoundaryMode::DirichletExact;
    AdamOptions adam;
    LbfgsOptions lbfgs;
};

struct RunRecord {
    std::uint64_t seed = 0;
    LossBreakdown final_loss;
    double l2_error = 0.0;
    double pressure_error = 0.0;
    std::vector<double> history;
    double wall_seconds = 0.0;
    std::size_t m_int = 0, m_s = 0, m_t = 0, m_interface = 0;
    std::string status = "ok";
};

struct RunOutput {
    ModelBundle model;
    RunRecord record;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline ModelBundle build_model(const TrainConfig& cfg, std::uint64_t seed) {
    const int d = cfg.tg.space_box.dim();
    if (cfg.widths.front() != d + 1)
        throw std::invalid_argument("first width must be d+1 (space-time input)");
    ModelBundle m;
    m.spatial_dim = d;
    m.nu = cfg.tg.nu;
    m.rho = cfg.tg.rho;
    m.space_box = cfg.tg.space_box;
    m.horizon = cfg.tg.horizon;
    std::vector<Box> boxes;
    if (cfg.xpinn) {
        if (cfg.xpinn_split_x <= m.space_box.lo[0] || cfg.xpinn_split_x >= m.space_box.hi[0])
            throw std::invalid_argument("subdomain split lies outside the box");
        Box a = m.space_box, b = m.space_box;
        a.hi[0] = cfg.xpinn_split_x;
        b.lo[0] = cfg.xpinn_split_x;
        boxes = {a, b};
    } else {
        boxes = {m.space_box};
    }
    std::uint64_t salt = 0;
    for (const auto& box : boxes) {
        ModelBundle::Part part;
        part.box = box;
        if (cfg.per_component) {
            std::vector<int> w = cfg.widths;
            w.back() = 1;
            for (int j = 0; j <= d; ++j)
                part.nets.push_back(build_network(w, mix_seed(seed, salt++), cfg.init));
        } else {
            if (cfg.widths.back() != d + 1)
                throw std::invalid_argument("last width must be d+1 (velocity and pressure)");
            part.nets.push_back(build_network(cfg.widths, mix_seed(seed, salt++), cfg.init));
        }
        m.parts.push_back(std::move(part));
    }
    return m;
}

inline TrainingSets build_sets(const TrainConfig& cfg) {
    TrainingSets sets;
    sets.interior = midpoint_interior(cfg.tg.space_box, cfg.tg.horizon, cfg.interior_res);
    sets.spatial = spatial_boundary_set(cfg.tg.space_box, cfg.tg.horizon, cfg.boundary_res);
    sets.initial = initial_set(cfg.tg.space_box, cfg.initial_res);
    if (cfg.xpinn)
        sets.interface_pts = interface_set(cfg.tg.space_box, cfg.tg.horizon, 0,
                                           cfg.xpinn_split_x, cfg.interface_res);
    return sets;
}

/// Adam phase then L-BFGS phase on the full-batch training loss.
inline RunOutput train(const TrainConfig& cfg, std::uint64_t seed) {
    auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    out.model = build_model(cfg, seed);
    TrainingSets sets = build_sets(cfg);

    ModelBundle& m = out.model;
    std::vector<std::vector<double>> grads;
    GradFn fn = [&](const std::vector<double>& x, std::vector<double>* grad) {
        set_flat_parameters(m, x);
        if (grad) {
            LossBreakdown lb = assemble_loss(m, sets, cfg.weights, cfg.boundary, cfg.tg, &grads);
            *grad = concat_gradients(grads);
            return lb.total;
        }
        return assemble_loss(m, sets, cfg.weights, cfg.boundary, cfg.tg).total;
    };

    std::vector<double> x = flat_parameters(m);
    RunRecord& rec = out.record;
    rec.seed = seed;
    rec.m_int = sets.interior.size();
    rec.m_s = sets.spatial.size();
    rec.m_t = sets.initial.size();
    rec.m_interface = sets.interface_pts ? sets.interface_pts->size() : 0;

    if (cfg.adam.steps > 0) {
        OptResult a = adam_run(std::move(x), fn, cfg.adam);
        x = std::move(a.x);
        rec.history.insert(rec.history.end(), a.history.begin(), a.history.end());
        if (a.diverged) rec.status = "adam: " + a.status;
    }
    if (rec.status == "ok" && cfg.lbfgs.max_iter > 0) {
        LbfgsResult l = lbfgs_run(std::move(x), fn, cfg.lbfgs);
        x = std::move(l.x);
        rec.history.insert(rec.history.end(), l.history.begin(), l.history.end());
        if (l.diverged) rec.status = "lbfgs: " + l.status;
    }
    set_flat_parameters(m, x);
    rec.final_loss = assemble_loss(m, sets, cfg.weights, cfg.boundary, cfg.tg);
    rec.history.push_back(rec.final_loss.total);

    QuadratureSet eval = midpoint_interior(cfg.tg.space_box, cfg.tg.horizon, cfg.eval_res);
    L2Error err = l2_error([&](const std::vector<double>& z) { return blend_eval(m, z); },
                           cfg.tg, eval);
    rec.l2_error = err.velocity;
    rec.pressure_error = err.pressure;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Independent runs over distinct seeds; failures are recorded and the
/// ensemble continues.
inline std::vector<RunOutput> ensemble(const TrainConfig& cfg,
                                       const std::vector<std::uint64_t>& seeds) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            if (seeds[i] == seeds[j]) throw std::invalid_argument("ensemble seeds must be distinct");
    std::vector<RunOutput> out;
    for (auto s : seeds) {
        try {
            out.push_back(train(cfg, s));
        } catch (const std::exception& e) {
            RunOutput failed;
            failed.record.seed = s;
            failed.record.status = std::string("failed: ") + e.what();
            out.push_back(std::move(failed));
        }
    }
    return out;
}

/// Pearson correlation of (x, y).
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

/// Spearman rank correlation.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    return pearson(ranks(x), ranks(y));
}

}  // namespace pinncert

#endif
