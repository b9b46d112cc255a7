#ifndef PINNCERT_AUTODIFF_HPP
#define PINNCERT_AUTODIFF_HPP

#include <functional>
#include <map>

#include "jet.hpp"

namespace pinncert {

// Parameter gradients of objectives built from jet queries. The network part
// of the chain rule is the hand-derived reverse sweep of the Taylor
// propagation (adjoint of a truncated product is a transposed convolution);
// the user-facing combination of jet entries runs on a small per-point tape.

/// Records the algebra that combines jet entries into a scalar objective.
class Tape {
public:
    struct Node {
        int a = -1, b = -1;
        double da = 0.0, db = 0.0;
    };

    int leaf(double v) {
        values_.push_back(v);
        nodes_.push_back({});
        return static_cast<int>(values_.size()) - 1;
    }
    int unary(int a, double da, double v) {
        values_.push_back(v);
        nodes_.push_back({a, -1, da, 0.0});
        return static_cast<int>(values_.size()) - 1;
    }
    int binary(int a, int b, double da, double db, double v) {
        values_.push_back(v);
        nodes_.push_back({a, b, da, db});
        return static_cast<int>(values_.size()) - 1;
    }
    double value(int id) const { return values_[id]; }

    /// d(root)/d(node) for every node, by one reverse pass.
    std::vector<double> adjoints(int root) const {
        std::vector<double> adj(values_.size(), 0.0);
        adj[root] = 1.0;
        for (int i = root; i >= 0; --i) {
            double a = adj[i];
            if (a == 0.0) continue;
            const Node& n = nodes_[i];
            if (n.a >= 0) adj[n.a] += a * n.da;
            if (n.b >= 0) adj[n.b] += a * n.db;
        }
        return adj;
    }

    void clear() {
        values_.clear();
        nodes_.clear();
    }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
    std::vector<Node> nodes_;
};

/// Differentiable scalar bound to a tape.
struct Var {
    Tape* tape = nullptr;
    int id = -1;
    double v = 0.0;

    Var() = default;
    Var(Tape& t, int i, double val) : tape(&t), id(i), v(val) {}
};

inline Var constant(Tape& t, double v) { return Var(t, t.leaf(v), v); }

inline Var operator+(const Var& x, const Var& y) {
    return Var(*x.tape, x.tape->binary(x.id, y.id, 1.0, 1.0, x.v + y.v), x.v + y.v);
}
inline Var operator-(const Var& x, const Var& y) {
    return Var(*x.tape, x.tape->binary(x.id, y.id, 1.0, -1.0, x.v - y.v), x.v - y.v);
}
inline Var operator*(const Var& x, const Var& y) {
    return Var(*x.tape, x.tape->binary(x.id, y.id, y.v, x.v, x.v * y.v), x.v * y.v);
}
inline Var operator+(const Var& x, double c) {
    return Var(*x.tape, x.tape->unary(x.id, 1.0, x.v + c), x.v + c);
}
inline Var operator+(double c, const Var& x) { return x + c; }
inline Var operator-(const Var& x, double c) { return x + (-c); }
inline Var operator-(double c, const Var& x) {
    return Var(*x.tape, x.tape->unary(x.id, -1.0, c - x.v), c - x.v);
}
inline Var operator*(const Var& x, double c) {
    return Var(*x.tape, x.tape->unary(x.id, c, x.v * c), x.v * c);
}
inline Var operator*(double c, const Var& x) { return x * c; }
inline Var operator-(const Var& x) { return x * -1.0; }
inline Var sq(const Var& x) { return x * x; }
inline double sq(double x) { return x * x; }
inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.v; }

/// Adjoint sweep through one cached forward propagation: given d(objective)/
/// d(output series coefficients), accumulates d(objective)/d(theta) into the
/// flat gradient (layout of NetworkParams::flatten).
class JetBackprop {
public:
    void accumulate(const NetworkParams& net, const JetWorkspace& ws, const double* seed,
                    double* grad) {
        const JetLayout& lay = ws.layout();
        const std::size_t C = lay.size();
        bar_.assign(static_cast<std::size_t>(net.output_dim()) * C, 0.0);
        for (std::size_t i = 0; i < bar_.size(); ++i) bar_[i] = seed[i];
        // byte offsets of each layer's block in the flat gradient
        std::vector<std::size_t> offs(net.layers.size());
        std::size_t off = 0;
        for (std::size_t k = 0; k < net.layers.size(); ++k) {
            offs[k] = off;
            off += net.layers[k].w.size() + net.layers[k].b.size();
        }
        q_.resize(C);
        hh_.resize(C);
        for (int k = static_cast<int>(net.layers.size()) - 1; k >= 0; --k) {
            const auto& l = net.layers[k];
            const std::vector<double>& in_act = ws.activation(k);
            // bar_ currently holds adjoints of act_{k+1}; convert to adjoints
            // of the pre-activation (identity on the output layer)
            if (k + 1 < static_cast<int>(net.layers.size())) {
                const std::vector<double>& h = ws.activation(k + 1);
                for (int i = 0; i < l.out; ++i) {
                    const double* hi = h.data() + static_cast<std::size_t>(i) * C;
                    series_mul(lay, hi, hi, hh_.data());
                    q_[0] = 1.0 - hh_[0];
                    for (std::size_t c = 1; c < C; ++c) q_[c] = -hh_[c];
                    double* bi = bar_.data() + static_cast<std::size_t>(i) * C;
                    for (std::size_t c = 0; c < C; ++c) hh_[c] = bi[c];
                    for (std::size_t c = 0; c < C; ++c) bi[c] = 0.0;
                    series_mul_transpose(lay, q_.data(), hh_.data(), bi);
                }
            }
            // parameter adjoints and propagation through the affine map
            double* gw = grad + offs[k];
            double* gb = gw + l.w.size();
            next_bar_.assign(static_cast<std::size_t>(l.in) * C, 0.0);
            for (int i = 0; i < l.out; ++i) {
                const double* bi = bar_.data() + static_cast<std::size_t>(i) * C;
                gb[i] += bi[0];
                const double* wrow = l.w.data() + static_cast<std::size_t>(i) * l.in;
                for (int j = 0; j < l.in; ++j) {
                    const double* aj = in_act.data() + static_cast<std::size_t>(j) * C;
                    double dot = 0.0;
                    for (std::size_t c = 0; c < C; ++c) dot += bi[c] * aj[c];
                    gw[static_cast<std::size_t>(i) * l.in + j] += dot;
                    double wij = wrow[j];
                    if (wij != 0.0) {
                        double* nb = next_bar_.data() + static_cast<std::size_t>(j) * C;
                        for (std::size_t c = 0; c < C; ++c) nb[c] += wij * bi[c];
                    }
                }
            }
            bar_.swap(next_bar_);
        }
    }

private:
    std::vector<double> bar_, next_bar_, q_, hh_;
};

/// Lazy jet-query context handed to objectives; one table per distinct
/// (net, point) pair, full order-2 layout.
class JetProbe {
public:
    JetProbe(Tape& tape, const std::vector<const NetworkParams*>& nets)
        : tape_(&tape), nets_(nets) {}

    Var deriv(int net_id, const std::vector<double>& z, int output, const MultiIndex& alpha) {
        if (order_of(alpha) > 2)
            throw std::invalid_argument("parameter gradients support input-derivatives <= 2");
        PointRec& rec = record(net_id, z);
        const JetLayout& lay = rec.ws.layout();
        int ci = lay.index_of(alpha);
        if (ci < 0) throw std::out_of_range("derivative not in probe layout");
        const std::size_t C = lay.size();
        int leaf = rec.first_leaf + output * static_cast<int>(C) + ci;
        double coeffv = rec.ws.output_coeffs()[static_cast<std::size_t>(output) * C + ci];
        double fact = lay.alpha_fact[ci];
        return Var(*tape_, tape_->unary(leaf, fact, coeffv * fact), coeffv * fact);
    }

    Var value(int net_id, const std::vector<double>& z, int output) {
        return deriv(net_id, z, output, MultiIndex(nets_[net_id]->input_dim(), 0));
    }

    Var constant(double v) { return pinncert::constant(*tape_, v); }

    /// After the objective is built: accumulate per-net flat gradients.
    void gradients(const Var& objective, std::vector<std::vector<double>>& grads) {
        if (!std::isfinite(objective.v))
            throw std::runtime_error("objective evaluated to a non-finite value");
        std::vector<double> adj = tape_->adjoints(objective.id);
        grads.assign(nets_.size(), {});
        for (std::size_t n = 0; n < nets_.size(); ++n)
            grads[n].assign(nets_[n]->parameter_count(), 0.0);
        JetBackprop bp;
        for (auto& rec : records_) {
            const std::size_t C = rec.ws.layout().size();
            seed_.assign(static_cast<std::size_t>(nets_[rec.net_id]->output_dim()) * C, 0.0);
            bool any = false;
            for (std::size_t i = 0; i < seed_.size(); ++i) {
                seed_[i] = adj[rec.first_leaf + static_cast<int>(i)];
                any = any || seed_[i] != 0.0;
            }
            if (any)
                bp.accumulate(*nets_[rec.net_id], rec.ws, seed_.data(),
                              grads[rec.net_id].data());
        }
    }

private:
    struct PointRec {
        int net_id = 0;
        std::vector<double> z;
        JetWorkspace ws;
        int first_leaf = 0;
    };

    PointRec& record(int net_id, const std::vector<double>& z) {
        for (auto& r : records_)
            if (r.net_id == net_id && r.z == z) return r;
        records_.emplace_back();
        PointRec& rec = records_.back();
        rec.net_id = net_id;
        rec.z = z;
        const JetLayout& lay = JetLayout::full(nets_[net_id]->input_dim(), 2);
        rec.ws.run(*nets_[net_id], lay, z, true);
        const auto& out = rec.ws.output_coeffs();
        rec.first_leaf = tape_->leaf(out[0]);
        for (std::size_t i = 1; i < out.size(); ++i) tape_->leaf(out[i]);
        return rec;
    }

    Tape* tape_;
    std::vector<const NetworkParams*> nets_;
    std::vector<PointRec> records_;
    std::vector<double> seed_;
};

/// Gradient of a scalar objective built from jet queries of one network.
/// Matches central finite differences of the objective.
inline std::vector<double> param_gradient(const NetworkParams& net,
                                          const std::function<Var(JetProbe&)>& objective) {
    Tape tape;
    JetProbe probe(tape, {&net});
    Var obj = objective(probe);
    std::vector<std::vector<double>> grads;
    probe.gradients(obj, grads);
    return grads[0];
}

}  // namespace pinncert

#endif
