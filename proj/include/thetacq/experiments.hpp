#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "thetacq/csv.hpp"
#include "thetacq/fem1d.hpp"
#include "thetacq/mittag_leffler.hpp"
#include "thetacq/stepper.hpp"
#include "thetacq/weights.hpp"

namespace thetacq {

/// Observed convergence rate from a list of errors at strictly decreasing
/// step sizes: log2 of the ratio of the two finest-level errors.
inline double compute_rate(const std::vector<double>& errors) {
    if (errors.size() < 2)
        throw std::invalid_argument("compute_rate: need at least two error entries");
    for (double e : errors)
        if (!(e > 0.0)) throw std::invalid_argument("compute_rate: errors must be positive");
    return std::log2(errors[errors.size() - 2] / errors[errors.size() - 1]);
}

/// Least-squares slope of log(values) against the index, over [first, last].
/// Zero entries are skipped; returns NaN if fewer than two usable points.
inline double fit_log_slope(const std::vector<double>& values, std::size_t first, std::size_t last) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t n = first; n <= last && n < values.size(); ++n) {
        const double v = std::abs(values[n]);
        if (v <= 0.0) continue;
        const double x = static_cast<double>(n);
        const double y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = count * sxx - sx * sx;
    return (count * sxy - sx * sy) / denom;
}

namespace detail {

template <typename Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::scoped_lock lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(count));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// One (alpha, theta, scheme) row of a convergence study: errors over the
/// tau ladder, all pairwise observed rates, and the finest-pair rate.
struct TableCell {
    double alpha = 0.0;
    double theta = 0.0;
    bool corrected = true;
    std::vector<double> taus;
    std::vector<double> errors;
    std::vector<double> rates;  // rates[i] pairs taus[i-1] -> taus[i]; rates[0] is NaN
    double finest_rate = 0.0;
};

struct RateTable {
    std::vector<TableCell> cells;

    const TableCell* find(double alpha, double theta, bool corrected) const {
        for (const auto& c : cells)
            if (std::abs(c.alpha - alpha) < 1e-12 && std::abs(c.theta - theta) < 1e-12 &&
                c.corrected == corrected)
                return &c;
        return nullptr;
    }

    void sort_rows() {
        std::sort(cells.begin(), cells.end(), [](const TableCell& x, const TableCell& y) {
            if (x.alpha != y.alpha) return x.alpha < y.alpha;
            if (x.theta != y.theta) return x.theta < y.theta;
            return x.corrected > y.corrected;  // corrected rows first
        });
    }
};

/// Called after every completed solve so callers can inspect trajectories
/// (residual audits, debugging). Serialized by the runners when jobs > 1.
using TrajectoryHook = std::function<void(const SchemeConfig&, const ProblemSpec&,
                                          const AssembledSpace&, const Trajectory&)>;

struct ExperimentConfig {
    /// (alpha, theta) cells; empty means the built-in grid of the experiment.
    std::vector<std::pair<double, double>> cells;
    std::vector<double> taus = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    std::size_t mesh_interior = 1023;
    double final_time = 1.0;
    double eval_time = 0.5;
    bool run_corrected = true;
    bool run_standard = true;
    /// Reference step for the self-referenced study: tau_finest / ref_tau_divisor.
    double ref_tau_divisor = 8.0;
    /// Compare the smooth-data study against the continuous exact solution
    /// instead of the spatially discrete one. The discrete reference isolates
    /// the temporal error, which is what the rate ladder measures; the
    /// continuous comparison adds the O(h^2) spatial floor.
    bool exact_reference = false;
    bool truncate_shift = false;
    unsigned jobs = 1;
    /// Alpha values of the robustness sweep.
    std::vector<double> sweep_alphas = {0.5, 0.2, 0.1, 0.05, 0.01, 0.005, 0.001};
    std::vector<double> sweep_thetas = {-0.5, 0.1, 0.4, 0.8};
    double sweep_tau = 1.0 / 128;
    TrajectoryHook on_trajectory;

    void validate_taus() const {
        if (taus.empty()) throw std::invalid_argument("ExperimentConfig: tau list is empty");
        for (std::size_t i = 1; i < taus.size(); ++i)
            if (!(taus[i] < taus[i - 1]))
                throw std::invalid_argument("ExperimentConfig: tau values must be strictly decreasing");
        for (double tau : taus) {
            if (!(tau > 0.0)) throw std::invalid_argument("ExperimentConfig: tau must be positive");
            const double steps = final_time / tau;
            const double evals = eval_time / tau;
            if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
                throw std::invalid_argument("ExperimentConfig: tau must divide the final time");
            if (std::abs(evals - std::round(evals)) > 1e-9 * std::max(evals, 1.0))
                throw std::invalid_argument("ExperimentConfig: the evaluation time must sit on the grid");
        }
    }
};

// ---------------------------------------------------------------------------
// Built-in problems
// ---------------------------------------------------------------------------

/// Smooth eigenmode problem on (0, pi): f = 0, u(x, 0) = sin x. The exact
/// solution is E_alpha(-t^alpha) sin x.
inline ProblemSpec smooth_eigenmode_problem(double alpha, double final_time = 1.0) {
    ProblemSpec p;
    p.a = 0.0;
    p.b = std::numbers::pi;
    p.final_time = final_time;
    p.alpha = alpha;
    p.initial = SmoothInitial{[](double x) { return std::sin(x); },
                              [](double x) { return std::cos(x); }};
    return p;
}

/// Nonsmooth problem on (0, 1): f = 0, u(x, 0) = indicator of (0, 1/2).
inline ProblemSpec indicator_problem(double alpha, double final_time = 1.0) {
    ProblemSpec p;
    p.a = 0.0;
    p.b = 1.0;
    p.final_time = final_time;
    p.alpha = alpha;
    p.initial = IndicatorInitial{0.0, 0.5};
    return p;
}

/// Forced problem on (0, pi) with u(x, 0) = sin x and source
/// f(x, t) = (6 t^{3-alpha} / Gamma(4-alpha) + t^3) sin x, giving the exact
/// solution (E_alpha(-t^alpha) + t^3) sin x.
inline ProblemSpec forced_eigenmode_problem(double alpha, double final_time = 1.0) {
    ProblemSpec p = smooth_eigenmode_problem(alpha, final_time);
    p.source.f = [alpha](double x, double t) {
        const double profile = 6.0 * std::pow(t, 3.0 - alpha) / std::tgamma(4.0 - alpha) + t * t * t;
        return profile * std::sin(x);
    };
    p.source.f0 = [](double) { return 0.0; };
    return p;
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t steps_for(double final_time, double tau) {
    return static_cast<std::size_t>(std::llround(final_time / tau));
}

inline void fill_rates(TableCell& cell) {
    cell.rates.assign(cell.errors.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i < cell.errors.size(); ++i)
        if (cell.errors[i] > 0.0 && cell.errors[i - 1] > 0.0)
            cell.rates[i] = std::log2(cell.errors[i - 1] / cell.errors[i]);
    cell.finest_rate = compute_rate(cell.errors);
}

struct HookGuard {
    explicit HookGuard(const ExperimentConfig& cfg) : config(cfg) {}

    const ExperimentConfig& config;
    std::mutex mutex;

    void notify(const SchemeConfig& cfg, const ProblemSpec& prob, const AssembledSpace& space,
                const Trajectory& traj) {
        if (!config.on_trajectory) return;
        std::scoped_lock lock(mutex);
        config.on_trajectory(cfg, prob, space, traj);
    }
};

}  // namespace detail

inline const std::vector<std::pair<double, double>>& smooth_study_grid() {
    static const std::vector<std::pair<double, double>> grid = {
        {0.1, -0.9}, {0.1, -0.5}, {0.1, 0.5}, {0.1, 0.9},
        {0.5, -0.8}, {0.5, -0.5}, {0.5, 0.0}, {0.5, 0.6},
        {0.9, -0.5}, {0.9, -0.2}, {0.9, 0.3}, {0.9, 0.6},
    };
    return grid;
}

inline const std::vector<std::pair<double, double>>& indicator_study_grid() {
    static const std::vector<std::pair<double, double>> grid = {
        {0.2, -0.5}, {0.2, -0.3}, {0.2, 0.0}, {0.2, 0.9},
        {0.8, -0.5}, {0.8, 0.1}, {0.8, 0.5}, {0.8, 0.7},
    };
    return grid;
}

/// Convergence study for the smooth eigenmode problem. Errors are L2 norms at
/// the evaluation time against the spatially discrete exact solution
/// E_alpha(-lambda_h t^alpha) v_h (or against the continuous solution when
/// exact_reference is set).
inline RateTable run_table1(const ExperimentConfig& config) {
    config.validate_taus();
    const auto& cells = config.cells.empty() ? smooth_study_grid() : config.cells;
    const Mesh1D mesh(0.0, std::numbers::pi, config.mesh_interior);
    const AssembledSpace space = assemble(mesh);
    const double lambda_h = discrete_sine_eigenvalue(mesh);

    std::vector<bool> schemes;
    if (config.run_corrected) schemes.push_back(true);
    if (config.run_standard) schemes.push_back(false);
    if (schemes.empty()) throw std::invalid_argument("run_table1: no scheme selected");

    detail::HookGuard hook(config);
    RateTable table;
    table.cells.resize(cells.size() * schemes.size());

    detail::parallel_for(table.cells.size(), config.jobs, [&](std::size_t idx) {
        const auto [alpha, theta] = cells[idx / schemes.size()];
        const bool corrected = schemes[idx % schemes.size()];
        const ProblemSpec problem = smooth_eigenmode_problem(alpha, config.final_time);

        TableCell cell;
        cell.alpha = alpha;
        cell.theta = theta;
        cell.corrected = corrected;
        cell.taus = config.taus;
        for (double tau : config.taus) {
            const std::size_t steps = detail::steps_for(config.final_time, tau);
            const SchemeConfig cfg = make_scheme_config(alpha, theta, config.final_time, steps,
                                                        corrected, config.truncate_shift);
            const Trajectory traj = thetacq::solve(cfg, problem, space);
            hook.notify(cfg, problem, space, traj);

            const std::size_t n_eval = detail::steps_for(config.eval_time, tau);
            const GridFunction u = traj.solution(n_eval);
            const double t = config.eval_time;
            if (config.exact_reference) {
                const double factor = ml_eval(alpha, -std::pow(t, alpha));
                cell.errors.push_back(
                    l2_error(mesh, u, [&](double x) { return factor * std::sin(x); }));
            } else {
                const double factor = ml_eval(alpha, -lambda_h * std::pow(t, alpha));
                GridFunction ref(traj.v_h.size());
                for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = factor * traj.v_h[i];
                cell.errors.push_back(l2_distance(space.mass, u, ref));
            }
        }
        detail::fill_rates(cell);
        table.cells[idx] = std::move(cell);
    });

    table.sort_rows();
    return table;
}

/// Convergence study for the indicator problem. No closed-form solution is
/// available, so errors are measured against a corrected-scheme reference run
/// at tau_finest / ref_tau_divisor on the same mesh.
inline RateTable run_table2(const ExperimentConfig& config) {
    config.validate_taus();
    const auto& cells = config.cells.empty() ? indicator_study_grid() : config.cells;
    const Mesh1D mesh(0.0, 1.0, config.mesh_interior);
    const AssembledSpace space = assemble(mesh);

    std::vector<bool> schemes;
    if (config.run_corrected) schemes.push_back(true);
    if (config.run_standard) schemes.push_back(false);
    if (schemes.empty()) throw std::invalid_argument("run_table2: no scheme selected");

    const double tau_ref = config.taus.back() / config.ref_tau_divisor;
    const double ref_steps_d = config.final_time / tau_ref;
    if (std::abs(ref_steps_d - std::round(ref_steps_d)) > 1e-9 * ref_steps_d)
        throw std::invalid_argument("run_table2: reference tau must divide the final time");

    detail::HookGuard hook(config);
    RateTable table;
    table.cells.resize(cells.size() * schemes.size());

    // One reference run per (alpha, theta) cell, shared by both schemes.
    detail::parallel_for(cells.size(), config.jobs, [&](std::size_t cell_idx) {
        const auto [alpha, theta] = cells[cell_idx];
        const ProblemSpec problem = indicator_problem(alpha, config.final_time);

        const std::size_t ref_steps = detail::steps_for(config.final_time, tau_ref);
        const SchemeConfig ref_cfg = make_scheme_config(alpha, theta, config.final_time, ref_steps,
                                                        true, config.truncate_shift);
        const Trajectory ref_traj = thetacq::solve(ref_cfg, problem, space);
        hook.notify(ref_cfg, problem, space, ref_traj);
        const GridFunction u_ref = ref_traj.solution(detail::steps_for(config.eval_time, tau_ref));

        for (std::size_t s = 0; s < schemes.size(); ++s) {
            const bool corrected = schemes[s];
            TableCell cell;
            cell.alpha = alpha;
            cell.theta = theta;
            cell.corrected = corrected;
            cell.taus = config.taus;
            for (double tau : config.taus) {
                const std::size_t steps = detail::steps_for(config.final_time, tau);
                const SchemeConfig cfg = make_scheme_config(alpha, theta, config.final_time, steps,
                                                            corrected, config.truncate_shift);
                const Trajectory traj = thetacq::solve(cfg, problem, space);
                hook.notify(cfg, problem, space, traj);
                const GridFunction u = traj.solution(detail::steps_for(config.eval_time, tau));
                cell.errors.push_back(l2_distance(space.mass, u, u_ref));
            }
            detail::fill_rates(cell);
            table.cells[cell_idx * schemes.size() + s] = std::move(cell);
        }
    });

    table.sort_rows();
    return table;
}

struct SweepRow {
    double alpha = 0.0;
    double theta = 0.0;
    double error = 0.0;
};

/// Robustness sweep: corrected scheme on the forced problem at a fixed step
/// size, over a grid of (alpha, theta); errors are true L2 distances to the
/// continuous exact solution at the evaluation time.
inline std::vector<SweepRow> run_alpha_sweep(const ExperimentConfig& config) {
    if (config.sweep_alphas.empty() || config.sweep_thetas.empty())
        throw std::invalid_argument("run_alpha_sweep: alpha and theta lists must be nonempty");
    const double tau = config.sweep_tau;
    const double steps_d = config.final_time / tau;
    if (std::abs(steps_d - std::round(steps_d)) > 1e-9 * steps_d)
        throw std::invalid_argument("run_alpha_sweep: tau must divide the final time");

    const Mesh1D mesh(0.0, std::numbers::pi, config.mesh_interior);
    const AssembledSpace space = assemble(mesh);

    std::vector<std::pair<double, double>> grid;
    for (double alpha : config.sweep_alphas)
        for (double theta : config.sweep_thetas) grid.emplace_back(alpha, theta);

    detail::HookGuard hook(config);
    std::vector<SweepRow> rows(grid.size());
    detail::parallel_for(grid.size(), config.jobs, [&](std::size_t idx) {
        const auto [alpha, theta] = grid[idx];
        const ProblemSpec problem = forced_eigenmode_problem(alpha, config.final_time);
        const std::size_t steps = detail::steps_for(config.final_time, tau);
        const SchemeConfig cfg =
            make_scheme_config(alpha, theta, config.final_time, steps, true, config.truncate_shift);
        const Trajectory traj = thetacq::solve(cfg, problem, space);
        hook.notify(cfg, problem, space, traj);

        const double t = config.eval_time;
        const GridFunction u = traj.solution(detail::steps_for(config.eval_time, tau));
        const double factor = ml_eval(alpha, -std::pow(t, alpha)) + t * t * t;
        rows[idx] = SweepRow{alpha, theta,
                             l2_error(mesh, u, [&](double x) { return factor * std::sin(x); })};
    });

    std::sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
        if (x.alpha != y.alpha) return x.alpha < y.alpha;
        return x.theta < y.theta;
    });
    return rows;
}

struct DecaySeries {
    double theta = 0.0;
    std::vector<double> abs_values;  // |theta_n| for n = 0..count
    double fitted_slope = 0.0;       // least-squares slope of ln|theta_n| on [5, 60]
};

/// Magnitudes of the shift weights for each theta, with the fitted log-decay
/// slope over n in [5, 60].
inline std::vector<DecaySeries> run_weight_decay(const std::vector<double>& thetas,
                                                 std::size_t count = 60) {
    const Polynomial delta = bdf_polynomial(2);
    std::vector<DecaySeries> out;
    out.reserve(thetas.size());
    for (double theta : thetas) {
        const WeightSequence w = shift_weights(delta, theta, count);
        DecaySeries s;
        s.theta = theta;
        s.abs_values.reserve(count + 1);
        for (double v : w.values) s.abs_values.push_back(std::abs(v));
        s.fitted_slope = fit_log_slope(s.abs_values, 5, 60);
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

inline void write_table_csv(const RateTable& table, std::ostream& os) {
    csv::write_row(os, {"alpha", "theta", "scheme", "tau", "error", "rate"});
    for (const auto& cell : table.cells) {
        for (std::size_t i = 0; i < cell.taus.size(); ++i) {
            const std::string rate = std::isnan(cell.rates[i]) ? "" : csv::format(cell.rates[i]);
            csv::write_row(os, {csv::format(cell.alpha), csv::format(cell.theta),
                                cell.corrected ? "corrected" : "standard", csv::format(cell.taus[i]),
                                csv::format(cell.errors[i]), rate});
        }
    }
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    csv::write_row(os, {"alpha", "theta", "error"});
    for (const auto& r : rows)
        csv::write_row(os, {csv::format(r.alpha), csv::format(r.theta), csv::format(r.error)});
}

inline void write_decay_csv(const std::vector<DecaySeries>& series, std::ostream& os) {
    csv::write_row(os, {"theta", "n", "abs_value"});
    for (const auto& s : series)
        for (std::size_t n = 0; n < s.abs_values.size(); ++n)
            csv::write_row(os, {csv::format(s.theta), std::to_string(n), csv::format(s.abs_values[n])});
}

inline void write_weights_csv(const WeightSequence& w, std::ostream& os) {
    csv::write_row(os, {"n", "value"});
    for (std::size_t n = 0; n < w.values.size(); ++n)
        csv::write_row(os, {std::to_string(n), csv::format(w.values[n])});
}

}  // namespace thetacq
