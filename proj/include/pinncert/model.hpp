#ifndef PINNCERT_MODEL_HPP
#define PINNCERT_MODEL_HPP

#include "jet.hpp"
#include "quadrature.hpp"
#include "taylor_green.hpp"

namespace pinncert {

/// Candidate flow: one network over the whole domain, or one per subdomain
/// with chi-blending at shared boundaries. Each part holds either a single
/// joint net with d+1 outputs (u_1..u_d, p) or d+1 per-component nets.
struct ModelBundle {
    int spatial_dim = 2;
    double nu = 0.01;
    double rho = 1.0;
    Box space_box{{0.5, 0.5}, {4.5, 4.5}};
    double horizon = 1.0;

    struct Part {
        Box box;  // spatial subdomain
        std::vector<NetworkParams> nets;
    };
    std::vector<Part> parts;

    bool is_xpinn() const { return parts.size() > 1; }
    int outputs() const { return spatial_dim + 1; }

    std::vector<const NetworkParams*> all_nets() const {
        std::vector<const NetworkParams*> out;
        for (const auto& p : parts)
            for (const auto& n : p.nets) out.push_back(&n);
        return out;
    }

    /// chi_q(z): 0 outside part q, 1/#owners inside.
    std::vector<double> chi(const std::vector<double>& z) const {
        std::vector<double> w(parts.size(), 0.0);
        int owners = 0;
        for (std::size_t q = 0; q < parts.size(); ++q)
            if (parts[q].box.contains({z.begin(), z.begin() + spatial_dim}, 1e-12)) {
                w[q] = 1.0;
                ++owners;
            }
        if (owners == 0) throw std::invalid_argument("point outside every subdomain");
        for (auto& x : w) x /= owners;
        return w;
    }

    std::vector<int> owners(const std::vector<double>& z) const {
        std::vector<int> out;
        for (std::size_t q = 0; q < parts.size(); ++q)
            if (parts[q].box.contains({z.begin(), z.begin() + spatial_dim}, 1e-12))
                out.push_back(static_cast<int>(q));
        if (out.empty()) throw std::invalid_argument("point outside every subdomain");
        return out;
    }
};

/// Single-domain bundle around one network.
inline ModelBundle single_domain(NetworkParams net, const Box& space_box, double T, double nu,
                                 double rho = 1.0) {
    ModelBundle m;
    m.spatial_dim = space_box.dim();
    m.nu = nu;
    m.rho = rho;
    m.space_box = space_box;
    m.horizon = T;
    m.parts.push_back({space_box, {}});
    m.parts[0].nets.push_back(std::move(net));
    return m;
}

/// Jet table of one part: joint net directly; per-component nets stacked
/// row-wise into one table.
inline DerivTable part_table(const ModelBundle::Part& part, const std::vector<double>& z,
                             const JetLayout& lay, JetWorkspace& ws) {
    if (part.nets.size() == 1) {
        ws.run(part.nets[0], lay, z, false);
        return ws.table();
    }
    DerivTable t;
    t.layout = &lay;
    t.outputs = static_cast<int>(part.nets.size());
    t.coeff.assign(part.nets.size() * lay.size(), 0.0);
    for (std::size_t j = 0; j < part.nets.size(); ++j) {
        ws.run(part.nets[j], lay, z, false);
        const auto& c = ws.output_coeffs();
        std::copy(c.begin(), c.begin() + lay.size(), t.coeff.begin() + j * lay.size());
    }
    return t;
}

/// Blended jet table per the chi weights; interface points average the
/// owning subnetworks coefficient-wise.
inline DerivTable model_table(const ModelBundle& m, const std::vector<double>& z,
                              const JetLayout& lay, JetWorkspace& ws) {
    if (!m.is_xpinn()) return part_table(m.parts[0], z, lay, ws);
    auto w = m.chi(z);
    DerivTable acc;
    bool first = true;
    for (std::size_t q = 0; q < m.parts.size(); ++q) {
        if (w[q] == 0.0) continue;
        DerivTable t = part_table(m.parts[q], z, lay, ws);
        if (first) {
            acc = t;
            for (auto& c : acc.coeff) c *= w[q];
            first = false;
        } else {
            for (std::size_t i = 0; i < acc.coeff.size(); ++i) acc.coeff[i] += w[q] * t.coeff[i];
        }
    }
    return acc;
}

/// Model value (u_1..u_d, p) at z via chi weights.
inline std::vector<double> blend_eval(const ModelBundle& m, const std::vector<double>& z) {
    auto w = m.chi(z);
    std::vector<double> out(m.outputs(), 0.0);
    for (std::size_t q = 0; q < m.parts.size(); ++q) {
        if (w[q] == 0.0) continue;
        if (m.parts[q].nets.size() == 1) {
            auto v = forward(m.parts[q].nets[0], z);
            for (int j = 0; j < m.outputs(); ++j) out[j] += w[q] * v[j];
        } else {
            for (int j = 0; j < m.outputs(); ++j)
                out[j] += w[q] * forward(m.parts[q].nets[j], z)[0];
        }
    }
    return out;
}

}  // namespace pinncert

#endif
