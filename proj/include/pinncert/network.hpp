#ifndef PINNCERT_NETWORK_HPP
#define PINNCERT_NETWORK_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinncert {

enum class InitScheme { GlorotUniform, SmallUniform };

inline InitScheme init_scheme_from_string(const std::string& s) {
    if (s == "glorot-uniform") return InitScheme::GlorotUniform;
    if (s == "small-uniform") return InitScheme::SmallUniform;
    throw std::invalid_argument("unknown init scheme: " + s);
}

inline std::string to_string(InitScheme s) {
    return s == InitScheme::GlorotUniform ? "glorot-uniform" : "small-uniform";
}

/// Feed-forward tanh network: L affine maps, tanh on all but the last.
/// widths = (l_0, l_1, ..., l_L); weights row-major (rows = outputs).
struct NetworkParams {
    struct Layer {
        int in = 0, out = 0;
        std::vector<double> w;  // out x in, row-major
        std::vector<double> b;  // out
    };
    std::vector<Layer> layers;

    int input_dim() const { return layers.front().in; }
    int output_dim() const { return layers.back().out; }
    int depth() const { return static_cast<int>(layers.size()); }  // L

    std::vector<int> widths() const {
        std::vector<int> w{input_dim()};
        for (const auto& l : layers) w.push_back(l.out);
        return w;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.w.size() + l.b.size();
        return n;
    }

    std::vector<double> flatten() const {
        std::vector<double> v;
        v.reserve(parameter_count());
        for (const auto& l : layers) {
            v.insert(v.end(), l.w.begin(), l.w.end());
            v.insert(v.end(), l.b.begin(), l.b.end());
        }
        return v;
    }

    void unflatten(const std::vector<double>& v) {
        std::size_t k = 0;
        for (auto& l : layers) {
            for (auto& x : l.w) x = v[k++];
            for (auto& x : l.b) x = v[k++];
        }
        if (k != v.size()) throw std::invalid_argument("flat parameter vector size mismatch");
    }

    bool all_finite() const {
        for (const auto& l : layers) {
            for (double x : l.w)
                if (!std::isfinite(x)) return false;
            for (double x : l.b)
                if (!std::isfinite(x)) return false;
        }
        return true;
    }
};

/// Theta class membership per Definition of Theta_{L,W,R}: L = layer count,
/// W = max width including input/output, R = max |entry| over weights/biases.
struct ThetaClass {
    int depth = 0;
    int width = 0;
    double weight_bound = 0.0;
};

inline ThetaClass theta_class(const NetworkParams& net) {
    ThetaClass tc;
    tc.depth = net.depth();
    tc.width = net.input_dim();
    double r = 0.0;
    for (const auto& l : net.layers) {
        tc.width = std::max(tc.width, l.out);
        for (double x : l.w) r = std::max(r, std::abs(x));
        for (double x : l.b) r = std::max(r, std::abs(x));
    }
    tc.weight_bound = r;
    return tc;
}

namespace detail {
// uniform in [0,1) from the top 53 bits; keeps builds reproducible across
// standard libraries (uniform_real_distribution is implementation-defined)
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
inline double sym_uniform(std::mt19937_64& rng, double r) {
    return (2.0 * unit_uniform(rng) - 1.0) * r;
}
}  // namespace detail

inline NetworkParams build_network(const std::vector<int>& widths, std::uint64_t seed,
                                   InitScheme scheme = InitScheme::GlorotUniform) {
    if (widths.size() < 3)
        throw std::invalid_argument("widths must list input, at least one hidden, and output");
    for (int w : widths)
        if (w < 1) throw std::invalid_argument("layer widths must be positive");
    std::mt19937_64 rng(seed);
    NetworkParams net;
    for (std::size_t k = 1; k < widths.size(); ++k) {
        NetworkParams::Layer layer;
        layer.in = widths[k - 1];
        layer.out = widths[k];
        layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
        layer.b.assign(layer.out, 0.0);
        double r = scheme == InitScheme::GlorotUniform
                       ? std::sqrt(6.0 / (layer.in + layer.out))
                       : 0.1;
        for (auto& x : layer.w) x = detail::sym_uniform(rng, r);
        for (auto& x : layer.b) x = detail::sym_uniform(rng, r);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

/// Plain forward pass, generic over the scalar type (long double for the
/// finite-difference oracles).
template <typename T>
std::vector<T> forward(const NetworkParams& net, const std::vector<T>& z) {
    if (static_cast<int>(z.size()) != net.input_dim())
        throw std::invalid_argument("input dimension mismatch");
    std::vector<T> cur = z, next;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const auto& l = net.layers[k];
        next.assign(l.out, T(0));
        for (int i = 0; i < l.out; ++i) {
            T acc = T(l.b[i]);
            const double* row = l.w.data() + static_cast<std::size_t>(i) * l.in;
            for (int j = 0; j < l.in; ++j) acc += T(row[j]) * cur[j];
            next[i] = (k + 1 < net.layers.size()) ? std::tanh(acc) : acc;
        }
        cur.swap(next);
    }
    return cur;
}

inline std::vector<double> forward(const NetworkParams& net, const std::vector<double>& z) {
    return forward<double>(net, z);
}

/// Stacks nets side by side and adds a combining output row:
/// result(z) = sum_i coeff_i * net_i(z). All nets must share input dim and
/// have scalar output. Used by the linearity checks and the constructive
/// assembly.
inline NetworkParams stack_linear(const std::vector<const NetworkParams*>& nets,
                                  const std::vector<double>& coeff, double bias = 0.0) {
    if (nets.empty() || nets.size() != coeff.size())
        throw std::invalid_argument("stack_linear: need one coefficient per net");
    int depth = nets[0]->depth();
    int in = nets[0]->input_dim();
    for (auto* n : nets) {
        if (n->depth() != depth || n->input_dim() != in || n->output_dim() != 1)
            throw std::invalid_argument("stack_linear: incompatible nets");
    }
    NetworkParams out;
    for (int k = 0; k < depth; ++k) {
        NetworkParams::Layer layer;
        layer.in = (k == 0) ? in : 0;
        layer.out = 0;
        std::vector<int> offs_in, offs_out;
        for (auto* n : nets) {
            offs_in.push_back(k == 0 ? 0 : layer.in);
            offs_out.push_back(layer.out);
            if (k > 0) layer.in += n->layers[k].in;
            layer.out += n->layers[k].out;
        }
        layer.w.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
        layer.b.assign(layer.out, 0.0);
        for (std::size_t q = 0; q < nets.size(); ++q) {
            const auto& src = nets[q]->layers[k];
            int oi = (k == 0) ? 0 : offs_in[q];
            for (int i = 0; i < src.out; ++i) {
                for (int j = 0; j < src.in; ++j)
                    layer.w[static_cast<std::size_t>(offs_out[q] + i) * layer.in + oi + j] =
                        src.w[static_cast<std::size_t>(i) * src.in + j];
                layer.b[offs_out[q] + i] = src.b[i];
            }
        }
        out.layers.push_back(std::move(layer));
    }
    // replace the block-diagonal output layer by the combining row
    NetworkParams::Layer& last = out.layers.back();
    NetworkParams::Layer combined;
    combined.in = last.in;
    combined.out = 1;
    combined.w.assign(last.in, 0.0);
    combined.b.assign(1, bias);
    int col = 0;
    for (std::size_t q = 0; q < nets.size(); ++q) {
        const auto& src = nets[q]->layers.back();
        for (int j = 0; j < src.in; ++j) combined.w[col + j] += coeff[q] * src.w[j];
        combined.b[0] += coeff[q] * src.b[0];
        col += src.in;
    }
    out.layers.back() = std::move(combined);
    return out;
}

}  // namespace pinncert

#endif
