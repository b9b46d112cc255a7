#ifndef PINNCERT_LOSS_HPP
#define PINNCERT_LOSS_HPP

#include <optional>

#include "residuals.hpp"

namespace pinncert {

struct LossWeights {
    double pde = 1.0, div = 1.0, spatial = 1.0, temporal = 1.0, interface_ = 1.0;
};

/// Squared training-error components; total is their weighted sum.
struct LossBreakdown {
    double pde2 = 0.0, div2 = 0.0, spatial2 = 0.0, temporal2 = 0.0, interface2 = 0.0;
    LossWeights weights;
    double total = 0.0;

    void finish() {
        total = weights.pde * pde2 + weights.div * div2 + weights.spatial * spatial2 +
                weights.temporal * temporal2 + weights.interface_ * interface2;
    }
    double et() const { return std::sqrt(total); }
};

struct TrainingSets {
    QuadratureSet interior;
    QuadratureSet spatial;
    QuadratureSet initial;
    std::optional<QuadratureSet> interface_pts;
};

namespace detail {

inline void check_finite(double v, const char* term, const std::vector<double>& z) {
    if (std::isfinite(v)) return;
    std::string where;
    for (double c : z) where += (where.empty() ? "" : ", ") + std::to_string(c);
    throw std::runtime_error(std::string("non-finite ") + term + " residual at (" + where + ")");
}

/// Forward jets for every net of one part plus the blended coefficient view.
/// Row j of the blended table is output j; seeds are pushed back through each
/// owner with its chi weight. Slots persist across points so the workspaces
/// keep their buffers.
struct BlendedPoint {
    struct Slot {
        const ModelBundle::Part* part = nullptr;
        double chi = 0.0;
        int grad_index0 = 0;  // index of the part's first net among all nets
        std::vector<JetWorkspace> ws;
    };
    std::vector<Slot> slots;  // one per part, inactive slots carry chi = 0
    const JetLayout* lay = nullptr;
    int outputs = 0;
    std::vector<double> blended;  // outputs x C
    std::vector<double> chi_buf;

    void bind(const ModelBundle& m) {
        slots.assign(m.parts.size(), {});
        int net_index = 0;
        for (std::size_t q = 0; q < m.parts.size(); ++q) {
            slots[q].part = &m.parts[q];
            slots[q].grad_index0 = net_index;
            slots[q].ws.resize(m.parts[q].nets.size());
            net_index += static_cast<int>(m.parts[q].nets.size());
        }
    }

    void run(const ModelBundle& m, const std::vector<double>& z, const JetLayout& layout,
             bool keep_activations) {
        if (slots.size() != m.parts.size()) bind(m);
        lay = &layout;
        outputs = m.outputs();
        const std::size_t C = layout.size();
        blended.assign(static_cast<std::size_t>(outputs) * C, 0.0);
        chi_buf.assign(m.parts.size(), 0.0);
        int owners = 0;
        for (std::size_t q = 0; q < m.parts.size(); ++q) {
            const Box& box = m.parts[q].box;
            bool inside = true;
            for (int a = 0; a < m.spatial_dim && inside; ++a)
                inside = z[a] >= box.lo[a] - 1e-12 && z[a] <= box.hi[a] + 1e-12;
            if (inside) {
                chi_buf[q] = 1.0;
                ++owners;
            }
        }
        if (owners == 0) throw std::invalid_argument("point outside every subdomain");
        for (std::size_t q = 0; q < m.parts.size(); ++q) {
            Slot& s = slots[q];
            s.chi = chi_buf[q] / owners;
            if (s.chi == 0.0) continue;
            for (std::size_t j = 0; j < s.part->nets.size(); ++j) {
                s.ws[j].run(s.part->nets[j], layout, z, keep_activations);
                const auto& c = s.ws[j].output_coeffs();
                if (s.part->nets.size() == 1) {
                    for (std::size_t i = 0; i < c.size(); ++i) blended[i] += s.chi * c[i];
                } else {
                    for (std::size_t i = 0; i < C; ++i) blended[j * C + i] += s.chi * c[i];
                }
            }
        }
    }

    double entry(int j, int coeff_idx) const {
        return blended[static_cast<std::size_t>(j) * lay->size() + coeff_idx];
    }

    /// seed: d(objective)/d(blended coefficient), outputs x C.
    void backprop(const std::vector<double>& seed, std::vector<std::vector<double>>& grads,
                  JetBackprop& bp, std::vector<double>& scratch) const {
        const std::size_t C = lay->size();
        for (const auto& s : slots) {
            if (s.chi == 0.0) continue;
            if (s.part->nets.size() == 1) {
                scratch.assign(seed.size(), 0.0);
                for (std::size_t i = 0; i < seed.size(); ++i) scratch[i] = s.chi * seed[i];
                bp.accumulate(s.part->nets[0], s.ws[0], scratch.data(),
                              grads[s.grad_index0].data());
            } else {
                for (std::size_t j = 0; j < s.part->nets.size(); ++j) {
                    scratch.assign(C, 0.0);
                    for (std::size_t i = 0; i < C; ++i) scratch[i] = s.chi * seed[j * C + i];
                    bp.accumulate(s.part->nets[j], s.ws[j], scratch.data(),
                                  grads[s.grad_index0 + static_cast<int>(j)].data());
                }
            }
        }
    }
};

}  // namespace detail

/// Assembles the squared training loss and, when grads != nullptr, its exact
/// parameter gradient (one flat block per net, in ModelBundle::all_nets
/// order). Initial and boundary data come from the benchmark closed form.
inline LossBreakdown assemble_loss(const ModelBundle& m, const TrainingSets& sets,
                                   const LossWeights& weights, BoundaryMode bmode,
                                   const TaylorGreen& tg,
                                   std::vector<std::vector<double>>* grads = nullptr) {
    const int d = m.spatial_dim;
    const int v = d + 1;
    LossBreakdown out;
    out.weights = weights;

    if (m.is_xpinn() != sets.interface_pts.has_value())
        throw std::invalid_argument("interface quadrature must be supplied iff the model is "
                                    "decomposed");

    if (grads) {
        auto nets = m.all_nets();
        grads->assign(nets.size(), {});
        for (std::size_t i = 0; i < nets.size(); ++i)
            (*grads)[i].assign(nets[i]->parameter_count(), 0.0);
    }

    detail::BlendedPoint bp_point;
    JetBackprop bp;
    std::vector<double> seed, scratch;

    // ---- interior: PDE + divergence -------------------------------------
    {
        std::vector<MultiIndex> wanted;
        wanted.push_back(unit_index(v, d));  // time derivative
        for (int i = 0; i < d; ++i) {
            wanted.push_back(unit_index(v, i));
            wanted.push_back(unit_index(v, i, 2));
        }
        auto lay = JetLayout::closure(v, wanted);
        const std::size_t C = lay->size();
        const int i_zero = 0;
        const int i_t = lay->index_of(unit_index(v, d));
        std::vector<int> i_d1(d), i_d2(d);
        for (int i = 0; i < d; ++i) {
            i_d1[i] = lay->index_of(unit_index(v, i));
            i_d2[i] = lay->index_of(unit_index(v, i, 2));
        }
        const double f2 = lay->alpha_fact[i_d2[0]];  // 2! for the pure second partials
        std::vector<double> r_pde(d);
        for (std::size_t n = 0; n < sets.interior.size(); ++n) {
            const auto& z = sets.interior.points[n];
            const double wq = sets.interior.weights[n];
            bp_point.run(m, z, *lay, grads != nullptr);
            double r_div = 0.0;
            for (int j = 0; j < d; ++j) {
                double acc = bp_point.entry(j, i_t) + bp_point.entry(d, i_d1[j]);
                for (int i = 0; i < d; ++i) {
                    acc += bp_point.entry(i, i_zero) * bp_point.entry(j, i_d1[i]);
                    acc -= m.nu * f2 * bp_point.entry(j, i_d2[i]);
                }
                r_pde[j] = acc;
                r_div += bp_point.entry(j, i_d1[j]);
                detail::check_finite(acc, "PDE", z);
            }
            detail::check_finite(r_div, "divergence", z);
            double pde2 = 0.0;
            for (int j = 0; j < d; ++j) pde2 += r_pde[j] * r_pde[j];
            out.pde2 += wq * pde2;
            out.div2 += wq * r_div * r_div;
            if (grads) {
                seed.assign(static_cast<std::size_t>(v) * C, 0.0);
                auto bump = [&](int j, int ci, double g) {
                    seed[static_cast<std::size_t>(j) * C + ci] += g;
                };
                for (int j = 0; j < d; ++j) {
                    double g = 2.0 * wq * weights.pde * r_pde[j];
                    bump(j, i_t, g);
                    bump(d, i_d1[j], g);
                    for (int i = 0; i < d; ++i) {
                        bump(i, i_zero, g * bp_point.entry(j, i_d1[i]));
                        bump(j, i_d1[i], g * bp_point.entry(i, i_zero));
                        bump(j, i_d2[i], -g * m.nu * f2);
                    }
                    double gd = 2.0 * wq * weights.div * r_div;
                    bump(j, i_d1[j], gd);
                }
                bp_point.backprop(seed, *grads, bp, scratch);
            }
        }
    }

    // ---- temporal: u(x, 0) - u0(x) ---------------------------------------
    {
        const JetLayout& lay = JetLayout::full(v, 0);
        std::vector<double> r(d);
        for (std::size_t n = 0; n < sets.initial.size(); ++n) {
            const auto& z = sets.initial.points[n];
            const double wq = sets.initial.weights[n];
            bp_point.run(m, z, lay, grads != nullptr);
            double t2 = 0.0;
            for (int j = 0; j < d; ++j) {
                r[j] = bp_point.entry(j, 0) - tg_derivative(tg, j, z, MultiIndex(3, 0));
                detail::check_finite(r[j], "temporal", z);
                t2 += r[j] * r[j];
            }
            out.temporal2 += wq * t2;
            if (grads) {
                seed.assign(static_cast<std::size_t>(v) * 1, 0.0);
                for (int j = 0; j < d; ++j) seed[j] = 2.0 * wq * weights.temporal * r[j];
                bp_point.backprop(seed, *grads, bp, scratch);
            }
        }
    }

    // ---- spatial boundary -------------------------------------------------
    if (bmode == BoundaryMode::DirichletExact) {
        const JetLayout& lay = JetLayout::full(v, 0);
        std::vector<double> r(d);
        for (std::size_t n = 0; n < sets.spatial.size(); ++n) {
            const auto& z = sets.spatial.points[n];
            const double wq = sets.spatial.weights[n];
            bp_point.run(m, z, lay, grads != nullptr);
            double s2 = 0.0;
            for (int j = 0; j < d; ++j) {
                r[j] = bp_point.entry(j, 0) - tg_derivative(tg, j, z, MultiIndex(3, 0));
                detail::check_finite(r[j], "spatial", z);
                s2 += r[j] * r[j];
            }
            out.spatial2 += wq * s2;
            if (grads) {
                seed.assign(static_cast<std::size_t>(v) * 1, 0.0);
                for (int j = 0; j < d; ++j) seed[j] = 2.0 * wq * weights.spatial * r[j];
                bp_point.backprop(seed, *grads, bp, scratch);
            }
        }
    } else {
        const JetLayout& lay = JetLayout::full(v, 1);
        const std::size_t C = lay.size();
        std::vector<int> i_d1(d);
        for (int i = 0; i < d; ++i) i_d1[i] = lay.index_of(unit_index(v, i));
        detail::BlendedPoint twin;
        std::vector<double> ju(d + 1), jg(static_cast<std::size_t>(d) * d), seed2;
        for (std::size_t n = 0; n < sets.spatial.size(); ++n) {
            const auto& z = sets.spatial.points[n];
            const auto& zp = sets.spatial.points[sets.spatial.paired_point[n]];
            const double wq = sets.spatial.weights[n];
            bp_point.run(m, z, lay, grads != nullptr);
            twin.run(m, zp, lay, grads != nullptr);
            double s2 = 0.0;
            for (int j = 0; j <= d; ++j) {
                ju[j] = bp_point.entry(j, 0) - twin.entry(j, 0);
                detail::check_finite(ju[j], "spatial", z);
                s2 += ju[j] * ju[j];
            }
            for (int j = 0; j < d; ++j)
                for (int i = 0; i < d; ++i) {
                    double g = bp_point.entry(j, i_d1[i]) - twin.entry(j, i_d1[i]);
                    jg[static_cast<std::size_t>(j) * d + i] = g;
                    s2 += g * g;
                }
            out.spatial2 += wq * s2;
            if (grads) {
                seed.assign(static_cast<std::size_t>(v) * C, 0.0);
                seed2.assign(seed.size(), 0.0);
                for (int j = 0; j <= d; ++j) {
                    double g = 2.0 * wq * weights.spatial * ju[j];
                    seed[static_cast<std::size_t>(j) * C] += g;
                    seed2[static_cast<std::size_t>(j) * C] -= g;
                }
                for (int j = 0; j < d; ++j)
                    for (int i = 0; i < d; ++i) {
                        double g = 2.0 * wq * weights.spatial *
                                   jg[static_cast<std::size_t>(j) * d + i];
                        seed[static_cast<std::size_t>(j) * C + i_d1[i]] += g;
                        seed2[static_cast<std::size_t>(j) * C + i_d1[i]] -= g;
                    }
                bp_point.backprop(seed, *grads, bp, scratch);
                twin.backprop(seed2, *grads, bp, scratch);
            }
        }
    }

    // ---- interface (XPINN) -------------------------------------------------
    if (sets.interface_pts) {
        const JetLayout& lay = JetLayout::full(v, 1);
        const std::size_t C = lay.size();
        std::vector<int> i_d1(d);
        for (int i = 0; i < d; ++i) i_d1[i] = lay.index_of(unit_index(v, i));
        JetWorkspace wsa, wsb;
        for (std::size_t n = 0; n < sets.interface_pts->size(); ++n) {
            const auto& z = sets.interface_pts->points[n];
            const double wq = sets.interface_pts->weights[n];
            auto own = m.owners(z);
            if (own.size() < 2)
                throw std::invalid_argument("interface quadrature point has a single owner");
            const auto& pa = m.parts[own[0]];
            const auto& pb = m.parts[own[1]];
            if (pa.nets.size() != 1 || pb.nets.size() != 1)
                throw std::invalid_argument("interface terms expect joint nets per part");
            wsa.run(pa.nets[0], lay, z, grads != nullptr);
            wsb.run(pb.nets[0], lay, z, grads != nullptr);
            const auto& ca = wsa.output_coeffs();
            const auto& cb = wsb.output_coeffs();
            double if2 = 0.0;
            std::vector<double> seeda, seedb;
            if (grads) {
                seeda.assign(static_cast<std::size_t>(v) * C, 0.0);
                seedb.assign(static_cast<std::size_t>(v) * C, 0.0);
            }
            auto add_term = [&](int j, int ci) {
                double jump = ca[static_cast<std::size_t>(j) * C + ci] -
                              cb[static_cast<std::size_t>(j) * C + ci];
                double fact = lay.alpha_fact[ci];
                jump *= fact;
                detail::check_finite(jump, "interface", z);
                if2 += jump * jump;
                if (grads) {
                    double g = 2.0 * wq * weights.interface_ * jump * fact;
                    seeda[static_cast<std::size_t>(j) * C + ci] += g;
                    seedb[static_cast<std::size_t>(j) * C + ci] -= g;
                }
            };
            for (int j = 0; j <= d; ++j) add_term(j, 0);          // u and p jumps
            for (int j = 0; j < d; ++j)
                for (int i = 0; i < d; ++i) add_term(j, i_d1[i]);  // grad u jumps
            out.interface2 += wq * if2;
            if (grads) {
                // locate flat-gradient blocks of the two owner nets
                int idx_a = 0, idx_b = 0, run = 0;
                for (std::size_t q = 0; q < m.parts.size(); ++q) {
                    if (static_cast<int>(q) == own[0]) idx_a = run;
                    if (static_cast<int>(q) == own[1]) idx_b = run;
                    run += static_cast<int>(m.parts[q].nets.size());
                }
                bp.accumulate(pa.nets[0], wsa, seeda.data(), (*grads)[idx_a].data());
                bp.accumulate(pb.nets[0], wsb, seedb.data(), (*grads)[idx_b].data());
            }
        }
    }

    out.finish();
    return out;
}

/// Flat parameter utilities over every net of a bundle.
inline std::vector<double> flat_parameters(const ModelBundle& m) {
    std::vector<double> out;
    for (const auto& part : m.parts)
        for (const auto& net : part.nets) {
            auto v = net.flatten();
            out.insert(out.end(), v.begin(), v.end());
        }
    return out;
}

inline void set_flat_parameters(ModelBundle& m, const std::vector<double>& flat) {
    std::size_t off = 0;
    for (auto& part : m.parts)
        for (auto& net : part.nets) {
            std::size_t n = net.parameter_count();
            std::vector<double> block(flat.begin() + off, flat.begin() + off + n);
            net.unflatten(block);
            off += n;
        }
    if (off != flat.size()) throw std::invalid_argument("flat parameter size mismatch");
}

inline std::vector<double> concat_gradients(const std::vector<std::vector<double>>& grads) {
    std::vector<double> out;
    for (const auto& g : grads) out.insert(out.end(), g.begin(), g.end());
    return out;
}

}  // namespace pinncert

#endif
