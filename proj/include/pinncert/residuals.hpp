#ifndef PINNCERT_RESIDUALS_HPP
#define PINNCERT_RESIDUALS_HPP

#include "autodiff.hpp"
#include "model.hpp"

namespace pinncert {

// Pointwise residuals of a candidate (u, p) against the incompressible
// Navier-Stokes equations. Each kernel is generic over the scalar type so the
// same formulas serve plain evaluation (double) and the gradient tape (Var);
// the accessor maps (output j, multi-index alpha) to that scalar.

enum class BoundaryMode { DirichletExact, Periodic };

inline BoundaryMode boundary_mode_from_string(const std::string& s) {
    if (s == "dirichlet") return BoundaryMode::DirichletExact;
    if (s == "periodic") return BoundaryMode::Periodic;
    throw std::invalid_argument("unknown boundary mode: " + s);
}

inline std::string to_string(BoundaryMode m) {
    return m == BoundaryMode::DirichletExact ? "dirichlet" : "periodic";
}

/// R_PDE[j] = d_t u_j + (u . grad) u_j + d_j p - nu Laplace(u_j),
/// R_div = div u. d = spatial dimension; coordinates (x_1..x_d, t).
template <typename T, typename Acc>
void interior_kernel(const Acc& A, int d, double nu, std::vector<T>& r_pde, T& r_div) {
    int v = d + 1;
    r_pde.clear();
    for (int j = 0; j < d; ++j) {
        T acc = A(j, unit_index(v, d));            // u_j time derivative
        acc = acc + A(d, unit_index(v, j));        // pressure gradient
        for (int i = 0; i < d; ++i) {
            acc = acc + A(i, MultiIndex(v, 0)) * A(j, unit_index(v, i));
            acc = acc - nu * A(j, unit_index(v, i, 2));
        }
        r_pde.push_back(acc);
    }
    r_div = A(0, unit_index(v, 0));
    for (int i = 1; i < d; ++i) r_div = r_div + A(i, unit_index(v, i));
}

/// Accessor over a DerivTable (plain double path).
struct TableAccessor {
    const DerivTable* t;
    double operator()(int j, const MultiIndex& a) const { return t->deriv(j, a); }
};

struct InteriorResidual {
    std::vector<double> r_pde;
    double r_div = 0.0;
};

/// Interior residual of the bundle at z; on an XPINN interface the owning
/// subnetworks are chi-blended before the residual is formed.
inline InteriorResidual interior_residuals(const ModelBundle& m, const std::vector<double>& z) {
    static thread_local JetWorkspace ws;
    const JetLayout& lay = JetLayout::full(m.spatial_dim + 1, 2);
    DerivTable t = model_table(m, z, lay, ws);
    InteriorResidual out;
    double div = 0.0;
    std::vector<double> pde;
    interior_kernel<double>(TableAccessor{&t}, m.spatial_dim, m.nu, pde, div);
    out.r_pde = pde;
    out.r_div = div;
    return out;
}

/// R_t = u_theta(x, 0) - u0(x); u0 supplied as an evaluator over spatial
/// coordinates.
inline std::vector<double> temporal_residual(
    const ModelBundle& m, const std::vector<double>& x,
    const std::function<std::vector<double>(const std::vector<double>&)>& u0) {
    std::vector<double> z = x;
    z.push_back(0.0);
    auto v = blend_eval(m, z);
    auto ref = u0(x);
    std::vector<double> r(m.spatial_dim);
    for (int j = 0; j < m.spatial_dim; ++j) r[j] = v[j] - ref[j];
    return r;
}

/// Spatial residual triple at a boundary point. Periodic mode pairs the point
/// with its opposite-face twin and returns the (u, p, grad u) jumps over the
/// period; dirichlet mode compares the velocity against an exact evaluator.
struct SpatialResidual {
    std::vector<double> u_jump;      // d entries
    double p_jump = 0.0;             // periodic only
    std::vector<double> grad_jump;   // d*d entries, row j = grad u_j (periodic only)
};

inline SpatialResidual spatial_residual_periodic(const ModelBundle& m,
                                                 const std::vector<double>& z_low,
                                                 const std::vector<double>& z_high) {
    static thread_local JetWorkspace ws;
    const JetLayout& lay = JetLayout::full(m.spatial_dim + 1, 1);
    DerivTable a = model_table(m, z_low, lay, ws);
    DerivTable b = model_table(m, z_high, lay, ws);
    int d = m.spatial_dim;
    SpatialResidual r;
    for (int j = 0; j < d; ++j) r.u_jump.push_back(a.value(j) - b.value(j));
    r.p_jump = a.value(d) - b.value(d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            r.grad_jump.push_back(a.deriv(j, unit_index(d + 1, i)) -
                                  b.deriv(j, unit_index(d + 1, i)));
    return r;
}

inline SpatialResidual spatial_residual_dirichlet(
    const ModelBundle& m, const std::vector<double>& z,
    const std::function<std::vector<double>(const std::vector<double>&)>& u_exact) {
    auto v = blend_eval(m, z);
    auto ref = u_exact(z);
    SpatialResidual r;
    for (int j = 0; j < m.spatial_dim; ++j) r.u_jump.push_back(v[j] - ref[j]);
    r.p_jump = 0.0;
    r.grad_jump.assign(static_cast<std::size_t>(m.spatial_dim) * m.spatial_dim, 0.0);
    return r;
}

/// Interface residuals between the two owning subnetworks at z on Gamma:
/// component-wise max absolute jumps of u, grad u and p.
struct InterfaceResidual {
    double r_u = 0.0, r_grad_u = 0.0, r_p = 0.0;
    std::vector<double> u_jump, grad_jump;  // raw entries, for the loss form
    double p_jump = 0.0;
};

inline InterfaceResidual interface_residuals(const ModelBundle& m, const std::vector<double>& z) {
    if (!m.is_xpinn())
        throw std::invalid_argument("interface residuals need a decomposed model");
    auto own = m.owners(z);
    if (own.size() < 2) throw std::invalid_argument("point does not lie on an interface");
    static thread_local JetWorkspace ws;
    const JetLayout& lay = JetLayout::full(m.spatial_dim + 1, 1);
    DerivTable a = part_table(m.parts[own[0]], z, lay, ws);
    DerivTable b = part_table(m.parts[own[1]], z, lay, ws);
    int d = m.spatial_dim;
    InterfaceResidual r;
    for (int j = 0; j < d; ++j) {
        double du = a.value(j) - b.value(j);
        r.u_jump.push_back(du);
        r.r_u = std::max(r.r_u, std::abs(du));
        for (int i = 0; i < d; ++i) {
            double dg = a.deriv(j, unit_index(d + 1, i)) - b.deriv(j, unit_index(d + 1, i));
            r.grad_jump.push_back(dg);
            r.r_grad_u = std::max(r.r_grad_u, std::abs(dg));
        }
    }
    r.p_jump = a.value(d) - b.value(d);
    r.r_p = std::abs(r.p_jump);
    return r;
}

}  // namespace pinncert

#endif
