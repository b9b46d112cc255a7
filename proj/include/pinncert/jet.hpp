#ifndef PINNCERT_JET_HPP
#define PINNCERT_JET_HPP

#include "network.hpp"
#include "stencil.hpp"
#include "taylor.hpp"

namespace pinncert {

constexpr int kMaxJetOrder = 4;

/// Values of mixed partials D^alpha of every network output at one point.
/// Stored as truncated Taylor coefficients plus the layout; the zero index is
/// the plain value and mixed entries are order-free by construction.
struct DerivTable {
    const JetLayout* layout = nullptr;
    std::shared_ptr<const JetLayout> owned;  // set when the layout is bespoke
    int outputs = 0;
    std::vector<double> coeff;  // outputs x layout->size(), row-major

    double coeff_at(int j, int idx) const {
        return coeff[static_cast<std::size_t>(j) * layout->size() + idx];
    }
    /// D^alpha of output j.
    double deriv(int j, const MultiIndex& alpha) const {
        int i = layout->index_of(alpha);
        if (i < 0)
            throw std::out_of_range("derivative " + to_string(alpha) + " not in this table");
        return coeff_at(j, i) * layout->alpha_fact[i];
    }
    double value(int j) const { return coeff_at(j, 0); }

    Series series_of(int j) const {
        Series s(*layout);
        for (std::size_t i = 0; i < layout->size(); ++i) s.c[i] = coeff_at(j, i);
        return s;
    }
};

/// Scratch for repeated jet propagation through one architecture. Reusing it
/// avoids allocation in the training hot path; it also caches the per-layer
/// series needed by the reverse sweep.
class JetWorkspace {
public:
    void run(const NetworkParams& net, const JetLayout& lay, const std::vector<double>& z,
             bool keep_activations) {
        const std::size_t C = lay.size();
        if (static_cast<int>(z.size()) != net.input_dim())
            throw std::invalid_argument("input dimension mismatch: point has " +
                                        std::to_string(z.size()) + " coordinates, network takes " +
                                        std::to_string(net.input_dim()));
        if (lay.nvars != net.input_dim())
            throw std::invalid_argument("jet layout dimension mismatch");
        layout_ = &lay;
        net_ = &net;
        scratch_.assign(3 * C, 0.0);
        act_.resize(net.layers.size() + 1);
        pre_.resize(net.layers.size());
        act_[0].assign(static_cast<std::size_t>(net.input_dim()) * C, 0.0);
        for (int v = 0; v < net.input_dim(); ++v) {
            act_[0][static_cast<std::size_t>(v) * C] = z[v];
            int li = lay.index_of(unit_index(lay.nvars, v));
            if (li >= 0) act_[0][static_cast<std::size_t>(v) * C + li] = 1.0;
        }
        for (std::size_t k = 0; k < net.layers.size(); ++k) {
            const auto& l = net.layers[k];
            pre_[k].assign(static_cast<std::size_t>(l.out) * C, 0.0);
            affine(l, act_[k].data(), pre_[k].data(), C);
            if (k + 1 < net.layers.size()) {
                act_[k + 1].assign(pre_[k].size(), 0.0);
                for (int i = 0; i < l.out; ++i)
                    series_tanh(lay, pre_[k].data() + static_cast<std::size_t>(i) * C,
                                act_[k + 1].data() + static_cast<std::size_t>(i) * C, nullptr,
                                scratch_.data());
            } else {
                act_[k + 1] = pre_[k];
            }
        }
        if (!keep_activations) {
            for (std::size_t k = 0; k + 1 < act_.size(); ++k) act_[k].clear();
            pre_.clear();
        }
    }

    DerivTable table() const {
        DerivTable t;
        t.layout = layout_;
        t.outputs = net_->output_dim();
        t.coeff = act_.back();
        return t;
    }

    const JetLayout& layout() const { return *layout_; }
    const std::vector<double>& output_coeffs() const { return act_.back(); }
    const std::vector<double>& activation(std::size_t layer) const { return act_[layer]; }
    const std::vector<double>& preactivation(std::size_t layer) const { return pre_[layer]; }
    double* scratch() { return scratch_.data(); }

private:
    static void affine(const NetworkParams::Layer& l, const double* in, double* out,
                       std::size_t C) {
        for (int i = 0; i < l.out; ++i) {
            double* o = out + static_cast<std::size_t>(i) * C;
            o[0] = l.b[i];
            const double* row = l.w.data() + static_cast<std::size_t>(i) * l.in;
            for (int j = 0; j < l.in; ++j) {
                double wij = row[j];
                if (wij == 0.0) continue;
                const double* s = in + static_cast<std::size_t>(j) * C;
                for (std::size_t c = 0; c < C; ++c) o[c] += wij * s[c];
            }
        }
    }

    const JetLayout* layout_ = nullptr;
    const NetworkParams* net_ = nullptr;
    std::vector<std::vector<double>> act_;  // act_[0] = input series
    std::vector<std::vector<double>> pre_;
    std::vector<double> scratch_;
    friend class JetBackprop;
};

/// Exact derivatives of the network output for every requested multi-index
/// (all of order <= 4).
inline DerivTable jet_eval(const NetworkParams& net, const std::vector<double>& z,
                           const std::vector<MultiIndex>& orders) {
    for (const auto& a : orders) {
        if (order_of(a) > kMaxJetOrder)
            throw std::invalid_argument("derivative order " + std::to_string(order_of(a)) +
                                        " > 4 unsupported");
        if (static_cast<int>(a.size()) != net.input_dim())
            throw std::invalid_argument("multi-index length must equal input dimension");
    }
    for (double x : z)
        if (!std::isfinite(x)) throw std::invalid_argument("evaluation point must be finite");
    auto lay = JetLayout::closure(net.input_dim(), orders);
    JetWorkspace ws;
    ws.run(net, *lay, z, false);
    DerivTable t = ws.table();
    t.owned = lay;  // keep the bespoke layout alive alongside the table
    return t;
}

/// Full table of all derivatives up to total order `order`.
inline DerivTable jet_eval_full(const NetworkParams& net, const std::vector<double>& z,
                                int order) {
    if (order > kMaxJetOrder) throw std::invalid_argument("derivative order > 4 unsupported");
    const JetLayout& lay = JetLayout::full(net.input_dim(), order);
    JetWorkspace ws;
    ws.run(net, lay, z, false);
    return ws.table();
}

/// |jet_eval - central finite difference| for one output and one multi-index;
/// the stencil runs in long double to keep its own noise floor low.
inline double fd_validate(const NetworkParams& net, const std::vector<double>& z,
                          const MultiIndex& alpha, double h, int output = 0, int accuracy = 4) {
    if (h <= 0) throw std::invalid_argument("finite-difference step must be positive");
    DerivTable t = jet_eval(net, z, {alpha});
    std::vector<long double> zl(z.begin(), z.end());
    auto f = [&](const std::vector<long double>& p) {
        return forward<long double>(net, p)[output];
    };
    long double fd = fd_apply<long double>(f, zl, alpha, h, accuracy);
    return std::abs(t.deriv(output, alpha) - static_cast<double>(fd));
}

}  // namespace pinncert

#endif
