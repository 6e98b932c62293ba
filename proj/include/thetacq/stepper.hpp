#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "thetacq/fem1d.hpp"
#include "thetacq/weights.hpp"

namespace thetacq {

/// Initial data with enough smoothness for the Ritz projection; carries the
/// function and its derivative.
struct SmoothInitial {
    std::function<double(double)> v;
    std::function<double(double)> dv;
};

/// Indicator initial data chi_(c,d), projected in L2.
struct IndicatorInitial {
    double c;
    double d;
};

using InitialData = std::variant<SmoothInitial, IndicatorInitial>;

/// Source term f(x, t). An empty f means a zero source. f0 is the initial
/// slice x -> f(x, 0); the scheme works with g(t) = f(t) - f(0), so f0 enters
/// the constant right-hand-side block and g enters the shifted convolution.
struct SourceTerm {
    std::function<double(double, double)> f;
    std::function<double(double)> f0;

    bool zero() const { return !f; }
};

/// The subdiffusion problem on (a, b) x (0, T]:
/// Caputo-d_t^alpha u - u_xx = f, u = 0 on the boundary, u(., 0) given.
struct ProblemSpec {
    double a = 0.0;
    double b = 1.0;
    double final_time = 1.0;
    double alpha = 0.5;
    InitialData initial = SmoothInitial{};
    SourceTerm source = {};

    void validate() const {
        if (!(b > a)) throw std::invalid_argument("ProblemSpec: requires b > a");
        if (!(final_time > 0.0)) throw std::invalid_argument("ProblemSpec: requires T > 0");
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ProblemSpec: alpha must be in (0,1)");
    }
};

/// Time discretization of one run: the shifted BDF2 weights for (alpha,
/// theta), the shift weights, the step size and the single-step correction
/// switch. Both weight sequences are generated from the BDF2 polynomial.
struct SchemeConfig {
    double alpha = 0.5;
    double theta = 0.0;
    double tau = 0.0;
    std::size_t steps = 0;
    bool corrected = true;
    /// Skip shift weights below 1e-14 in all convolutions. Off by default;
    /// the weights decay fast enough that this only trims dead tail work.
    bool truncate_shift = false;
    WeightSequence omega;
    WeightSequence shift;
};

inline SchemeConfig make_scheme_config(double alpha, double theta, double final_time,
                                       std::size_t steps, bool corrected,
                                       bool truncate_shift = false) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("make_scheme_config: alpha must be in (0,1)");
    if (!(theta > -1.0 && theta < 1.0))
        throw std::invalid_argument("make_scheme_config: theta must be in (-1,1)");
    if (steps < 1) throw std::invalid_argument("make_scheme_config: need at least one step");
    if (!(final_time > 0.0)) throw std::invalid_argument("make_scheme_config: T must be positive");

    const Polynomial delta = bdf_polynomial(2);
    SchemeConfig cfg;
    cfg.alpha = alpha;
    cfg.theta = theta;
    cfg.tau = final_time / static_cast<double>(steps);
    cfg.steps = steps;
    cfg.corrected = corrected;
    cfg.truncate_shift = truncate_shift;
    cfg.omega = omega_weights(delta, delta, alpha, theta, steps);
    cfg.shift = shift_weights(delta, theta, steps);
    return cfg;
}

/// Solution history W^0..W^N of the homogenized unknown w = u - v, with
/// W^0 = 0 by construction; the solution values are U^n = W^n + v_h.
struct Trajectory {
    std::vector<GridFunction> W;
    GridFunction v_h;
    double tau = 0.0;

    std::size_t steps() const { return W.empty() ? 0 : W.size() - 1; }

    GridFunction solution(std::size_t n) const {
        GridFunction u = W.at(n);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += v_h[i];
        return u;
    }
};

/// Shifted evaluation sum_{j=0}^{n} theta_j phi^{n-j}; approximates the grid
/// sequence at the theta-shifted point between time levels.
inline GridFunction discrete_shift(const WeightSequence& shift,
                                   std::span<const GridFunction> history, std::size_t n) {
    if (history.size() < n + 1)
        throw std::invalid_argument("discrete_shift: history does not reach step n");
    if (shift.size() < n + 1)
        throw std::invalid_argument("discrete_shift: weight sequence does not reach step n");
    GridFunction out(history[0].size(), 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        const double c = shift.values[j];
        const GridFunction& phi = history[n - j];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * phi[i];
    }
    return out;
}

/// Discrete fractional derivative tau^{-alpha} sum_{j=0}^{n} w_j phi^{n-j}.
inline GridFunction discrete_frac_derivative(const WeightSequence& omega, double tau, double alpha,
                                             std::span<const GridFunction> history, std::size_t n) {
    if (history.size() < n + 1)
        throw std::invalid_argument("discrete_frac_derivative: history does not reach step n");
    if (omega.size() < n + 1)
        throw std::invalid_argument("discrete_frac_derivative: weight sequence does not reach step n");
    GridFunction out(history[0].size(), 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        const double c = omega.values[j];
        const GridFunction& phi = history[n - j];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * phi[i];
    }
    const double scale = std::pow(tau, -alpha);
    for (double& v : out) v *= scale;
    return out;
}

/// Projection of the initial data into the P1 space: Ritz projection for
/// smooth data, L2 projection for the indicator.
inline GridFunction project_initial(const ProblemSpec& problem, const Mesh1D& mesh) {
    if (const auto* smooth = std::get_if<SmoothInitial>(&problem.initial)) {
        if (!smooth->v && !smooth->dv) return GridFunction(mesh.interior, 0.0);
        if (!smooth->dv)
            throw std::invalid_argument("project_initial: smooth initial data needs a derivative");
        return ritz_project(mesh, smooth->dv);
    }
    const auto& ind = std::get<IndicatorInitial>(problem.initial);
    return l2_project_indicator(mesh, ind.c, ind.d);
}

/// One full run of the theta-scheme. Precomputes the projected initial data,
/// the constant right-hand-side block and the projected source history, then
/// advances step by step; each step costs one pass over the history plus one
/// tridiagonal solve.
///
/// Step n solves
///
///   (tau^{-alpha} w_0 M + theta_0 A) W^n =
///       - tau^{-alpha} sum_{j=1}^{n} w_j M W^{n-j}
///       - sum_{j=1}^{n} theta_j A W^{n-j}
///       + M g_h^{n-theta}
///       + c_n (M f_h^0 - A v_h),
///
/// where g_h^k = P_h(f(., t_k) - f(., 0)), the shift convolution runs over
/// k = 0..n with g_h^0 = 0, and c_n = theta + 3/2 at n = 1 under the
/// single-step correction (c_n = 1 otherwise). -A v_h realizes the discrete
/// Laplacian of the initial data in weak form.
class ThetaStepper {
public:
    ThetaStepper(SchemeConfig cfg, const ProblemSpec& problem, const AssembledSpace& space)
        : cfg_(std::move(cfg)), space_(space) {
        problem.validate();
        if (cfg_.alpha != problem.alpha)
            throw std::invalid_argument("ThetaStepper: config and problem disagree on alpha");
        if (cfg_.omega.size() < cfg_.steps + 1 || cfg_.shift.size() < cfg_.steps + 1)
            throw std::invalid_argument("ThetaStepper: weight sequences shorter than the step count");

        const std::size_t m = space.mesh.interior;
        v_h_ = project_initial(problem, space.mesh);

        f0_h_.assign(m, 0.0);
        if (!problem.source.zero()) {
            if (!problem.source.f0)
                throw std::invalid_argument("ThetaStepper: source requires its initial slice f0");
            f0_h_ = l2_project(space.mesh, problem.source.f0);
        }

        // c_n (M f0 - A v_h), assembled once
        const GridFunction mf0 = space.mass.apply(f0_h_);
        const GridFunction av = space.stiffness.apply(v_h_);
        const_block_.resize(m);
        for (std::size_t i = 0; i < m; ++i) const_block_[i] = mf0[i] - av[i];

        // g_h^k = P_h f(., t_k) - P_h f(., 0); zero at k = 0 by construction
        g_.assign(cfg_.steps + 1, GridFunction(m, 0.0));
        if (!problem.source.zero()) {
            for (std::size_t k = 1; k <= cfg_.steps; ++k) {
                const double t = static_cast<double>(k) * cfg_.tau;
                GridFunction gk = l2_project(space.mesh, [&](double x) { return problem.source.f(x, t); });
                for (std::size_t i = 0; i < m; ++i) gk[i] -= f0_h_[i];
                g_[k] = std::move(gk);
            }
            have_source_ = true;
        }

        shift_len_ = cfg_.steps;
        if (cfg_.truncate_shift) {
            std::size_t last = 0;
            for (std::size_t j = 0; j <= cfg_.steps; ++j)
                if (std::abs(cfg_.shift.values[j]) >= 1e-14) last = j;
            shift_len_ = last;
        }

        const double ta = std::pow(cfg_.tau, -cfg_.alpha);
        system_.diag.resize(m);
        system_.off.resize(m > 1 ? m - 1 : 0);
        for (std::size_t i = 0; i < m; ++i)
            system_.diag[i] = ta * cfg_.omega.values[0] * space.mass.diag[i] +
                              cfg_.shift.values[0] * space.stiffness.diag[i];
        for (std::size_t i = 0; i + 1 < m; ++i)
            system_.off[i] = ta * cfg_.omega.values[0] * space.mass.off[i] +
                             cfg_.shift.values[0] * space.stiffness.off[i];
    }

    const GridFunction& initial_projection() const { return v_h_; }
    const SchemeConfig& config() const { return cfg_; }

    /// Compute W^n from the history W[0..n-1].
    GridFunction advance(const std::vector<GridFunction>& W, std::size_t n) const {
        if (n < 1) throw std::invalid_argument("ThetaStepper: the initial value is fixed, need n >= 1");
        if (n > cfg_.steps) throw std::invalid_argument("ThetaStepper: step beyond configured count");
        if (W.size() < n) throw std::invalid_argument("ThetaStepper: history does not reach step n-1");

        const std::size_t m = space_.mesh.interior;
        const double ta = std::pow(cfg_.tau, -cfg_.alpha);

        // Fused history pass: one read of W^{n-j} feeds both convolutions.
        GridFunction acc_omega(m, 0.0);
        GridFunction acc_shift(m, 0.0);
        const std::size_t fused = std::min(n, shift_len_);
        for (std::size_t j = 1; j <= fused; ++j) {
            const double cw = cfg_.omega.values[j];
            const double cs = cfg_.shift.values[j];
            const double* wj = W[n - j].data();
            for (std::size_t i = 0; i < m; ++i) {
                acc_omega[i] += cw * wj[i];
                acc_shift[i] += cs * wj[i];
            }
        }
        for (std::size_t j = fused + 1; j <= n; ++j) {
            const double cw = cfg_.omega.values[j];
            const double* wj = W[n - j].data();
            for (std::size_t i = 0; i < m; ++i) acc_omega[i] += cw * wj[i];
        }

        GridFunction combined(m);
        if (have_source_) {
            GridFunction gconv(m, 0.0);
            const std::size_t jmax = std::min(n, shift_len_);
            for (std::size_t j = 0; j <= jmax; ++j) {
                const double cs = cfg_.shift.values[j];
                const double* gk = g_[n - j].data();
                for (std::size_t i = 0; i < m; ++i) gconv[i] += cs * gk[i];
            }
            for (std::size_t i = 0; i < m; ++i) combined[i] = gconv[i] - ta * acc_omega[i];
        } else {
            for (std::size_t i = 0; i < m; ++i) combined[i] = -ta * acc_omega[i];
        }

        GridFunction rhs = space_.mass.apply(combined);
        const GridFunction ashift = space_.stiffness.apply(acc_shift);
        const double cn = correction_factor(n);
        for (std::size_t i = 0; i < m; ++i) rhs[i] += -ashift[i] + cn * const_block_[i];

        return solve_tridiagonal(system_, rhs);
    }

    Trajectory run() const {
        Trajectory traj;
        traj.tau = cfg_.tau;
        traj.v_h = v_h_;
        traj.W.reserve(cfg_.steps + 1);
        traj.W.emplace_back(space_.mesh.interior, 0.0);
        for (std::size_t n = 1; n <= cfg_.steps; ++n) traj.W.push_back(advance(traj.W, n));
        return traj;
    }

    /// Relative residual of the discrete equation at step n, evaluated with
    /// the plain (unfused, untruncated) convolution operators so the check
    /// does not share its arithmetic path with advance().
    double residual(const Trajectory& traj, std::size_t n) const {
        if (n < 1 || n >= traj.W.size())
            throw std::invalid_argument("residual: step out of range");
        const std::size_t m = space_.mesh.interior;
        const std::span<const GridFunction> hist(traj.W.data(), n + 1);

        const GridFunction frac = space_.mass.apply(
            discrete_frac_derivative(cfg_.omega, cfg_.tau, cfg_.alpha, hist, n));
        const GridFunction diff = space_.stiffness.apply(discrete_shift(cfg_.shift, hist, n));

        GridFunction gconv(m, 0.0);
        if (have_source_) {
            for (std::size_t j = 0; j <= n; ++j) {
                const double cs = cfg_.shift.values[j];
                for (std::size_t i = 0; i < m; ++i) gconv[i] += cs * g_[n - j][i];
            }
            gconv = space_.mass.apply(gconv);
        }

        const double cn = correction_factor(n);
        double rmax = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double cb = cn * const_block_[i];
            const double r = frac[i] + diff[i] - gconv[i] - cb;
            rmax = std::max(rmax, std::abs(r));
            scale = std::max({scale, std::abs(frac[i]), std::abs(diff[i]), std::abs(gconv[i]), std::abs(cb)});
        }
        if (scale == 0.0) return rmax;
        return rmax / scale;
    }

private:
    double correction_factor(std::size_t n) const {
        return (cfg_.corrected && n == 1) ? cfg_.theta + 1.5 : 1.0;
    }

    SchemeConfig cfg_;
    const AssembledSpace& space_;
    GridFunction v_h_;
    GridFunction f0_h_;
    GridFunction const_block_;
    std::vector<GridFunction> g_;
    bool have_source_ = false;
    std::size_t shift_len_ = 0;
    TridiagonalMatrix system_;
};

/// Single step of the scheme, for callers that manage their own history.
inline GridFunction step(const SchemeConfig& config, const ProblemSpec& problem,
                         const AssembledSpace& space, const Trajectory& state, std::size_t n) {
    return ThetaStepper(config, problem, space).advance(state.W, n);
}

/// Full run of the scheme over all configured steps.
inline Trajectory solve(const SchemeConfig& config, const ProblemSpec& problem,
                        const AssembledSpace& space) {
    return ThetaStepper(config, problem, space).run();
}

/// Relative residual of the discrete equation at step n for a trajectory
/// computed with the same configuration.
inline double scheme_residual(const SchemeConfig& config, const ProblemSpec& problem,
                              const AssembledSpace& space, const Trajectory& traj, std::size_t n) {
    return ThetaStepper(config, problem, space).residual(traj, n);
}

}  // namespace thetacq
