#ifndef PINNCERT_TAYLOR_GREEN_HPP
#define PINNCERT_TAYLOR_GREEN_HPP

#include <cmath>

#include "jet.hpp"
#include "quadrature.hpp"

namespace pinncert {

/// Decaying-vortex solution of the 2-D incompressible Navier-Stokes equations:
///   u(t,x,y) = -cos(pi x) sin(pi y) exp(-2 pi^2 nu t)
///   v(t,x,y) =  sin(pi x) cos(pi y) exp(-2 pi^2 nu t)
///   p(t,x,y) = -(rho/4) [cos(2 pi x) + cos(2 pi y)] exp(-4 pi^2 nu t)
/// Residual annihilation holds for rho = 1 (the momentum residual carries
/// grad p, not grad p / rho).
struct TaylorGreen {
    double nu = 0.01;
    double rho = 1.0;
    Box space_box{{0.5, 0.5}, {4.5, 4.5}};
    double horizon = 1.0;
};

namespace detail {
constexpr double kPi = 3.14159265358979323846;

// D^(k) cos(w x) = w^k cos(w x + k pi/2), same shift for sin
inline double cosd(double w, double x, int k) {
    return std::pow(w, k) * std::cos(w * x + k * kPi / 2.0);
}
inline double sind(double w, double x, int k) {
    return std::pow(w, k) * std::sin(w * x + k * kPi / 2.0);
}
}  // namespace detail

/// D^alpha of (u, v, p) at z = (x, y, t); alpha orders (x, y, t).
inline double tg_derivative(const TaylorGreen& tg, int output, const std::vector<double>& z,
                            const MultiIndex& alpha) {
    using namespace detail;
    double x = z[0], y = z[1], t = z[2];
    int ax = alpha[0], ay = alpha[1], at = alpha[2];
    if (output == 0) {
        double decay = std::pow(-2.0 * kPi * kPi * tg.nu, at) * std::exp(-2.0 * kPi * kPi * tg.nu * t);
        return -cosd(kPi, x, ax) * sind(kPi, y, ay) * decay;
    }
    if (output == 1) {
        double decay = std::pow(-2.0 * kPi * kPi * tg.nu, at) * std::exp(-2.0 * kPi * kPi * tg.nu * t);
        return sind(kPi, x, ax) * cosd(kPi, y, ay) * decay;
    }
    if (output == 2) {
        double decay = std::pow(-4.0 * kPi * kPi * tg.nu, at) * std::exp(-4.0 * kPi * kPi * tg.nu * t);
        double term_x = (ay == 0) ? cosd(2.0 * kPi, x, ax) : 0.0;
        double term_y = (ax == 0) ? cosd(2.0 * kPi, y, ay) : 0.0;
        return -(tg.rho / 4.0) * (term_x + term_y) * decay;
    }
    throw std::out_of_range("Taylor-Green output index");
}

/// Closed-form (u, v, p) at z.
inline std::vector<double> tg_exact(const TaylorGreen& tg, const std::vector<double>& z) {
    MultiIndex zero(3, 0);
    return {tg_derivative(tg, 0, z, zero), tg_derivative(tg, 1, z, zero),
            tg_derivative(tg, 2, z, zero)};
}

/// DerivTable of the closed form on a given layout (outputs u, v, p).
inline DerivTable tg_table(const TaylorGreen& tg, const std::vector<double>& z,
                           const JetLayout& lay) {
    DerivTable t;
    t.layout = &lay;
    t.outputs = 3;
    t.coeff.assign(3 * lay.size(), 0.0);
    for (int j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < lay.size(); ++i)
            t.coeff[static_cast<std::size_t>(j) * lay.size() + i] =
                tg_derivative(tg, j, z, lay.alphas[i]) / lay.alpha_fact[i];
    return t;
}

/// Initial velocity u0(x) = (u, v) at t = 0.
inline std::vector<double> tg_initial(const TaylorGreen& tg, double x, double y) {
    auto v = tg_exact(tg, {x, y, 0.0});
    return {v[0], v[1]};
}

/// sqrt of the space-time L2 velocity mismatch between a model evaluator and
/// the closed form; the pressure mismatch is reported separately.
struct L2Error {
    double velocity = 0.0;
    double pressure = 0.0;
};

inline L2Error l2_error(const std::function<std::vector<double>(const std::vector<double>&)>& model,
                        const TaylorGreen& tg, const QuadratureSet& grid) {
    if (grid.kind != QuadKind::Interior)
        throw std::invalid_argument("l2_error expects an interior quadrature set");
    double vel2 = 0.0, p2 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto got = model(grid.points[i]);
        auto ref = tg_exact(tg, grid.points[i]);
        double w = grid.weights[i];
        double du = got[0] - ref[0], dv = got[1] - ref[1], dp = got[2] - ref[2];
        vel2 += w * (du * du + dv * dv);
        p2 += w * dp * dp;
    }
    return {std::sqrt(vel2), std::sqrt(p2)};
}

/// ||grad u||_{L^infty}: max-entry spatial gradient. Exact mode returns the
/// analytic supremum pi (attained at t = 0); grid mode samples a model.
inline double tg_grad_inf_exact(const TaylorGreen&) { return detail::kPi; }

inline double grad_inf_on_grid(
    const std::function<DerivTable(const std::vector<double>&)>& table_at,
    const QuadratureSet& grid, int d) {
    double worst = 0.0;
    for (const auto& z : grid.points) {
        DerivTable t = table_at(z);
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                worst = std::max(worst, std::abs(t.deriv(j, unit_index(d + 1, i))));
    }
    return worst;
}

}  // namespace pinncert

#endif
