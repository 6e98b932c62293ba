#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace thetacq {

/// Uniform mesh of the interval (a, b) with `interior` interior nodes and
/// homogeneous Dirichlet boundaries. Interior node i (0-based) sits at
/// a + (i+1) h with h = (b-a)/(interior+1).
struct Mesh1D {
    double a = 0.0;
    double b = 1.0;
    std::size_t interior = 1;

    Mesh1D(double a_, double b_, std::size_t interior_) : a(a_), b(b_), interior(interior_) {
        if (!(b > a)) throw std::invalid_argument("Mesh1D: requires b > a");
        if (interior < 1) throw std::invalid_argument("Mesh1D: requires at least one interior node");
    }

    double h() const { return (b - a) / static_cast<double>(interior + 1); }
    double node(std::size_t i) const { return a + static_cast<double>(i + 1) * h(); }
    std::size_t elements() const { return interior + 1; }
};

/// Nodal values at the interior nodes; the boundary values are implicitly 0.
using GridFunction = std::vector<double>;

/// Symmetric tridiagonal matrix (sub- and super-diagonal coincide).
struct TridiagonalMatrix {
    std::vector<double> diag;  // length M
    std::vector<double> off;   // length M-1

    std::size_t size() const { return diag.size(); }

    GridFunction apply(const GridFunction& x) const {
        const std::size_t m = size();
        GridFunction y(m);
        for (std::size_t i = 0; i < m; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += off[i - 1] * x[i - 1];
            if (i + 1 < m) s += off[i] * x[i + 1];
            y[i] = s;
        }
        return y;
    }
};

struct AssembledSpace {
    Mesh1D mesh;
    TridiagonalMatrix mass;
    TridiagonalMatrix stiffness;
};

/// P1 mass and stiffness matrices on the uniform mesh:
/// mass has diagonal 2h/3 and off-diagonal h/6, stiffness has diagonal 2/h
/// and off-diagonal -1/h.
inline AssembledSpace assemble(const Mesh1D& mesh) {
    const std::size_t m = mesh.interior;
    const double h = mesh.h();
    TridiagonalMatrix mass{std::vector<double>(m, 2.0 * h / 3.0), std::vector<double>(m > 1 ? m - 1 : 0, h / 6.0)};
    TridiagonalMatrix stiffness{std::vector<double>(m, 2.0 / h), std::vector<double>(m > 1 ? m - 1 : 0, -1.0 / h)};
    return AssembledSpace{mesh, std::move(mass), std::move(stiffness)};
}

/// Thomas elimination for a symmetric positive definite tridiagonal system.
/// Pivots must stay positive; a zero or negative pivot is reported as a
/// definiteness failure.
inline GridFunction solve_tridiagonal(const TridiagonalMatrix& T, const GridFunction& rhs) {
    const std::size_t m = T.size();
    if (rhs.size() != m) throw std::invalid_argument("solve_tridiagonal: size mismatch");
    std::vector<double> c(m > 1 ? m - 1 : 0);
    GridFunction x(m);
    double piv = T.diag[0];
    if (!(piv > 0.0)) throw std::domain_error("solve_tridiagonal: matrix not positive definite");
    x[0] = rhs[0] / piv;
    if (m > 1) c[0] = T.off[0] / piv;
    for (std::size_t i = 1; i < m; ++i) {
        piv = T.diag[i] - T.off[i - 1] * c[i - 1];
        if (!(piv > 0.0)) throw std::domain_error("solve_tridiagonal: matrix not positive definite");
        x[i] = (rhs[i] - T.off[i - 1] * x[i - 1]) / piv;
        if (i + 1 < m) c[i] = T.off[i] / piv;
    }
    for (std::size_t i = m - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

namespace quadrature {
// 4-point Gauss-Legendre rule on [-1, 1]; exact through degree 7.
inline constexpr double nodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                    0.3399810435848563, 0.8611363115940526};
inline constexpr double weights[4] = {0.3478548451374539, 0.6521451548625461,
                                      0.6521451548625461, 0.3478548451374539};
}  // namespace quadrature

/// L2 projection onto the P1 space: solves mass * x = load with
/// load_i = \int f phi_i, each element integrated by 4-point Gauss.
inline GridFunction l2_project(const Mesh1D& mesh, const std::function<double(double)>& f) {
    const std::size_t m = mesh.interior;
    const double h = mesh.h();
    GridFunction load(m, 0.0);
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        const double xl = mesh.a + static_cast<double>(e) * h;
        const double mid = xl + 0.5 * h;
        for (int q = 0; q < 4; ++q) {
            const double x = mid + 0.5 * h * quadrature::nodes[q];
            const double fv = quadrature::weights[q] * 0.5 * h * f(x);
            const double t = (x - xl) / h;
            if (e > 0) load[e - 1] += fv * (1.0 - t);   // hat descending on this element
            if (e < m) load[e] += fv * t;               // hat ascending on this element
        }
    }
    const AssembledSpace space = assemble(mesh);
    return solve_tridiagonal(space.mass, load);
}

/// L2 projection of the indicator of (c, d). Element integrals of the hats
/// against the indicator are computed exactly by splitting at c and d
/// (the hat restricted to the overlap is linear, so the trapezoid rule is
/// exact).
inline GridFunction l2_project_indicator(const Mesh1D& mesh, double c, double d) {
    if (!(c < d)) throw std::invalid_argument("l2_project_indicator: requires c < d");
    const std::size_t m = mesh.interior;
    const double h = mesh.h();
    GridFunction load(m, 0.0);
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        const double xl = mesh.a + static_cast<double>(e) * h;
        const double xr = xl + h;
        const double p = std::max(xl, c);
        const double q = std::min(xr, d);
        if (!(p < q)) continue;
        const double len = q - p;
        if (e > 0) load[e - 1] += len * 0.5 * ((xr - p) / h + (xr - q) / h);
        if (e < m) load[e] += len * 0.5 * ((p - xl) / h + (q - xl) / h);
    }
    const AssembledSpace space = assemble(mesh);
    return solve_tridiagonal(space.mass, load);
}

/// Ritz (elliptic) projection onto the P1 space: solves stiffness * x = b
/// with b_i = \int v' phi_i', by 4-point Gauss per element. Only the
/// derivative of the projected function enters. v must vanish at both
/// endpoints.
inline GridFunction ritz_project(const Mesh1D& mesh, const std::function<double(double)>& dv) {
    const std::size_t m = mesh.interior;
    const double h = mesh.h();
    GridFunction b(m, 0.0);
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        const double xl = mesh.a + static_cast<double>(e) * h;
        const double mid = xl + 0.5 * h;
        double integral = 0.0;  // \int_e v'
        for (int q = 0; q < 4; ++q)
            integral += quadrature::weights[q] * 0.5 * h * dv(mid + 0.5 * h * quadrature::nodes[q]);
        if (e > 0) b[e - 1] += integral * (-1.0 / h);
        if (e < m) b[e] += integral * (1.0 / h);
    }
    const AssembledSpace space = assemble(mesh);
    return solve_tridiagonal(space.stiffness, b);
}

/// L2(a,b) norm of the P1 function with the given interior nodal values
/// minus `exact`, by 4-point Gauss per element (the P1 function is zero at
/// the boundary nodes).
inline double l2_error(const Mesh1D& mesh, const GridFunction& U,
                       const std::function<double(double)>& exact) {
    if (U.size() != mesh.interior) throw std::invalid_argument("l2_error: size mismatch");
    const double h = mesh.h();
    const std::size_t m = mesh.interior;
    double acc = 0.0;
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        const double xl = mesh.a + static_cast<double>(e) * h;
        const double mid = xl + 0.5 * h;
        const double ul = e > 0 ? U[e - 1] : 0.0;
        const double ur = e < m ? U[e] : 0.0;
        for (int q = 0; q < 4; ++q) {
            const double x = mid + 0.5 * h * quadrature::nodes[q];
            const double t = (x - xl) / h;
            const double diff = ul * (1.0 - t) + ur * t - exact(x);
            acc += quadrature::weights[q] * 0.5 * h * diff * diff;
        }
    }
    return std::sqrt(acc);
}

/// Exact L2 norm of a P1 grid function via the mass matrix: sqrt(x' M x).
inline double mass_norm(const TridiagonalMatrix& mass, const GridFunction& x) {
    const GridFunction mx = mass.apply(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * mx[i];
    return std::sqrt(std::max(s, 0.0));
}

/// Exact L2 distance between two P1 grid functions on the same mesh.
inline double l2_distance(const TridiagonalMatrix& mass, const GridFunction& u, const GridFunction& v) {
    if (u.size() != v.size()) throw std::invalid_argument("l2_distance: size mismatch");
    GridFunction d(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - v[i];
    return mass_norm(mass, d);
}

/// Generalized eigenvalue of the discrete sine mode sin(k x) on a uniform
/// mesh: stiffness * s = lambda_h * mass * s with s_i = sin(k x_i), where
///   lambda_h = 6 (1 - cos(k h)) / (h^2 (2 + cos(k h))) = k^2 (1 + O((k h)^2)).
/// Valid when sin(k x) vanishes at both endpoints of the mesh interval.
inline double discrete_sine_eigenvalue(const Mesh1D& mesh, double wavenumber = 1.0) {
    const double kh = wavenumber * mesh.h();
    const double c = std::cos(kh);
    return 6.0 * (1.0 - c) / (mesh.h() * mesh.h() * (2.0 + c));
}

}  // namespace thetacq
