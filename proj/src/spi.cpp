#include "mfg/spi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfg {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double learning_rate(RateSchedule schedule, int n) {
    return schedule == RateSchedule::TwoOverNPlus2 ? 2.0 / (n + 2) : 1.0 / (n + 2);
}

TwoSidedPolicyField clipped_copy(const TwoSidedPolicyField& q, double cap) {
    TwoSidedPolicyField out = q;
    for (double& v : out.data()) v = std::clamp(v, -cap, cap);
    return out;
}

struct SweepDiagnostics {
    double mass_drift = 0.0;
    double min_density = 0.0;
};

SweepDiagnostics density_diagnostics(const ScalarField& m) {
    const GridSpec& grid = m.grid();
    SweepDiagnostics d;
    const double m0 = mass(m.level(0), grid);
    d.min_density = std::numeric_limits<double>::infinity();
    for (int tau = 0; tau <= grid.time_steps(); ++tau) {
        const auto level = m.level(tau);
        d.mass_drift = std::max(d.mass_drift, std::abs(mass(level, grid) - m0) /
                                                  std::max(std::abs(m0), 1e-300));
        for (double v : level) d.min_density = std::min(d.min_density, v);
    }
    return d;
}

/// Coupling rows for the backward sweep: row tau reads the density at tau+1.
std::vector<std::vector<double>> coupling_rows(const CouplingEngine& engine,
                                               const ScalarField& m) {
    const int steps = m.grid().time_steps();
    std::vector<std::vector<double>> rows(steps);
    for (int tau = 0; tau < steps; ++tau) rows[tau] = engine.running_field(m.level(tau + 1));
    return rows;
}

struct LoopState {
    ScalarField u;
    ScalarField m;
    TwoSidedPolicyField q;
    IterationReport report;
};

} // namespace

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw InputError("solver config: tolerance must be positive");
    if (max_iterations < 1) throw InputError("solver config: need at least one iteration");
}

TwoSidedPolicyField smoothing_update_policy(const TwoSidedPolicyField& avg,
                                            const TwoSidedPolicyField& q_new, int n,
                                            RateSchedule schedule) {
    if (!avg.grid().same_geometry(q_new.grid()))
        throw InputError("smoothing_update_policy: grid mismatch");
    const double beta = learning_rate(schedule, n);
    TwoSidedPolicyField out = avg;
    auto dst = out.data();
    const auto src = q_new.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += beta * (src[k] - dst[k]);
    return out;
}

std::pair<ScalarField, TwoSidedPolicyField> smoothing_update_flux(
    const ScalarField& m_avg, const TwoSidedPolicyField& w_avg, const ScalarField& m_new,
    const TwoSidedPolicyField& w_new, int n) {
    if (!m_avg.grid().same_geometry(m_new.grid()) || !w_avg.grid().same_geometry(w_new.grid()))
        throw InputError("smoothing_update_flux: grid mismatch");
    if (n < 1) throw InputError("smoothing_update_flux: iterate index must be >= 1");
    const double beta = 2.0 / (n + 1);
    std::pair<ScalarField, TwoSidedPolicyField> out{m_avg, w_avg};
    {
        auto dst = out.first.data();
        const auto src = m_new.data();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += beta * (src[k] - dst[k]);
    }
    {
        auto dst = out.second.data();
        const auto src = w_new.data();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += beta * (src[k] - dst[k]);
    }
    return out;
}

TwoSidedPolicyField flux_from(const ScalarField& m, const TwoSidedPolicyField& q) {
    const GridSpec& grid = m.grid();
    if (!grid.same_geometry(q.grid())) throw InputError("flux_from: grid mismatch");
    TwoSidedPolicyField w(grid);
    for (int tau = 0; tau < grid.time_steps(); ++tau) {
        const auto level = m.level(tau + 1);
        for (int i = 0; i < grid.node_count(); ++i) {
            for (int a = 0; a < grid.dim(); ++a) {
                w.ql(tau, i, a) = level[i] * q.ql_eff(tau, i, a);
                w.qr(tau, i, a) = level[i] * q.qr_eff(tau, i, a);
            }
        }
    }
    return w;
}

TwoSidedPolicyField ratio_policy(const TwoSidedPolicyField& w_avg, const ScalarField& m_avg) {
    const GridSpec& grid = m_avg.grid();
    if (!grid.same_geometry(w_avg.grid())) throw InputError("ratio_policy: grid mismatch");
    TwoSidedPolicyField q(grid);
    for (int tau = 0; tau < grid.time_steps(); ++tau) {
        const auto level = m_avg.level(tau + 1);
        for (int i = 0; i < grid.node_count(); ++i) {
            if (!(level[i] > 0.0))
                throw InvariantViolation("ratio_policy: smoothed density not positive");
            for (int a = 0; a < grid.dim(); ++a) {
                q.ql(tau, i, a) = std::max(w_avg.ql(tau, i, a), 0.0) / level[i];
                q.qr(tau, i, a) = std::min(w_avg.qr(tau, i, a), 0.0) / level[i];
            }
        }
    }
    return q;
}

double residual_energy(const ScalarField& m_next, const TwoSidedPolicyField& greedy,
                       const TwoSidedPolicyField& smoothed) {
    const GridSpec& grid = m_next.grid();
    if (!grid.same_geometry(greedy.grid()) || !grid.same_geometry(smoothed.grid()))
        throw InputError("residual_energy: grid mismatch");
    double total = 0.0;
    for (int tau = 0; tau < grid.time_steps(); ++tau) {
        const auto level = m_next.level(tau + 1);
        for (int i = 0; i < grid.node_count(); ++i) {
            double gap = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                const double dl = greedy.ql_eff(tau, i, a) - smoothed.ql_eff(tau, i, a);
                const double dr = greedy.qr_eff(tau, i, a) - smoothed.qr_eff(tau, i, a);
                gap += dl * dl + dr * dr;
            }
            total += level[i] * gap;
        }
    }
    return grid.dt() * grid.cell_volume() * total;
}

CertificationResiduals certify_fixed_point(const ScalarField& u, const ScalarField& m,
                                           const TwoSidedPolicyField& q,
                                           const Scenario& scenario) {
    const GridSpec& grid = scenario.grid;
    if (!u.grid().same_geometry(grid) || !m.grid().same_geometry(grid) ||
        !q.grid().same_geometry(grid))
        throw InputError("certify_fixed_point: grid mismatch");
    const CouplingEngine engine = scenario.make_coupling_engine();
    const double idt = 1.0 / grid.dt();
    const int nodes = grid.node_count();
    const double sigma = scenario.sigma;

    CertificationResiduals out;
    out.policy_consistency =
        sup_norm_policy_diff(q, extract_policy(u, scenario.hamiltonian.cap));

    std::vector<double> dl(nodes), dr(nodes);
    for (int tau = 0; tau < grid.time_steps(); ++tau) {
        const auto m_now = m.level(tau);
        const auto m_next = m.level(tau + 1);
        const auto lap_m = laplacian(m_next, grid);
        const auto div = divergence(m_next, q, tau, grid);
        for (int i = 0; i < nodes; ++i) {
            const double r = (m_next[i] - m_now[i]) * idt - sigma * lap_m[i] - div[i];
            out.fpk_residual = std::max(out.fpk_residual, std::abs(r));
        }

        const auto u_now = u.level(tau);
        const auto u_next = u.level(tau + 1);
        const auto lap_u = laplacian(u_now, grid);
        const auto f = engine.running_field(m_next);
        std::vector<double> advection(nodes, 0.0);
        std::vector<double> kinetic(nodes, 0.0);
        for (int a = 0; a < grid.dim(); ++a) {
            two_sided_gradient(u_now, grid, a, dl, dr);
            for (int i = 0; i < nodes; ++i) {
                const double l = q.ql_eff(tau, i, a);
                const double r = q.qr_eff(tau, i, a);
                advection[i] += l * dl[i] + r * dr[i];
                kinetic[i] += l * l + r * r;
            }
        }
        for (int i = 0; i < nodes; ++i) {
            const double r = (u_now[i] - u_next[i]) * idt - sigma * lap_u[i] + advection[i] -
                             0.5 * kinetic[i] - scenario.hamiltonian.v_values[i] - f[i];
            out.hjb_residual = std::max(out.hjb_residual, std::abs(r));
        }
    }

    const auto terminal = engine.terminal_field(m.level(grid.time_steps()));
    const auto u_final = u.level(grid.time_steps());
    for (int i = 0; i < nodes; ++i)
        out.hjb_residual = std::max(out.hjb_residual, std::abs(u_final[i] - terminal[i]));
    return out;
}

namespace {

SolveResult run_policy_average_loop(const Scenario& scenario, const SolverConfig& config,
                                    const TwoSidedPolicyField& q0, bool smoothed) {
    const GridSpec& grid = scenario.grid;
    const double cap = scenario.hamiltonian.cap;
    const CouplingEngine engine = scenario.make_coupling_engine();

    TwoSidedPolicyField q_bar = clipped_copy(q0, cap); // policy driving the sweeps
    TwoSidedPolicyField q_prev = q_bar;                // greedy iterate Q^(n)
    TwoSidedPolicyField q_bar_lag = q_bar;             // Q-bar of the previous iteration

    IterationReport report;
    ScalarField u(grid, FieldRole::Value), m(grid, FieldRole::Density);
    TwoSidedPolicyField q_final = q_bar;

    for (int n = 0; n < config.max_iterations; ++n) {
        m = fpk_forward_sweep(q_bar, scenario.sigma, scenario.initial_density);
        const SweepDiagnostics diag = density_diagnostics(m);

        u = hjb_backward_sweep(q_bar, scenario.sigma,
                               engine.terminal_field(m.level(grid.time_steps())),
                               coupling_rows(engine, m), scenario.hamiltonian.v_values);
        TwoSidedPolicyField q_next = extract_policy(u, cap, &report.cap_activations);
        const double residual = sup_norm_policy_diff(q_next, q_prev);

        IterationRecord rec;
        rec.n = n + 1;
        rec.policy_residual = residual;
        // Lagged gap energy: this sweep's density against the previous
        // iteration's greedy/smoothed policies.
        rec.gap_energy = n == 0 ? kNan : residual_energy(m, q_prev, q_bar_lag);
        rec.energy = engine.has_energy()
                         ? discrete_energy(m, q_bar, 0, engine, scenario.hamiltonian.v_values)
                         : kNan;
        rec.mass_drift = diag.mass_drift;
        rec.min_density = diag.min_density;
        report.history.push_back(rec);
        report.iterations = n + 1;
        if (config.on_iteration) config.on_iteration(rec);

        q_bar_lag = q_bar;
        if (residual <= config.tolerance) {
            report.termination = Termination::Converged;
            q_final = q_bar;
            break;
        }
        if (n + 1 == config.max_iterations) {
            report.termination = Termination::MaxIterations;
            q_final = q_bar;
            break;
        }
        if (smoothed) {
            const TwoSidedPolicyField& incoming =
                config.compat_discrete_smoothing ? q_prev : q_next;
            q_bar = smoothing_update_policy(q_bar, incoming, n, config.rate);
        } else {
            q_bar = q_next;
        }
        q_prev = q_next;
    }

    report.certification = certify_fixed_point(u, m, q_final, scenario);
    return SolveResult{std::move(u), std::move(m), std::move(q_final), std::move(report)};
}

SolveResult run_flux_average_loop(const Scenario& scenario, const SolverConfig& config,
                                  const TwoSidedPolicyField& q0) {
    const GridSpec& grid = scenario.grid;
    const double cap = scenario.hamiltonian.cap;
    const CouplingEngine engine = scenario.make_coupling_engine();

    TwoSidedPolicyField q_curr = clipped_copy(q0, cap); // greedy iterate Q^(n)
    ScalarField m_bar(grid, FieldRole::Density);
    TwoSidedPolicyField w_bar(grid);
    TwoSidedPolicyField q_hat = q_curr;
    TwoSidedPolicyField q_hat_lag = q_curr;

    IterationReport report;
    ScalarField u(grid, FieldRole::Value);

    for (int n = 0; n < config.max_iterations; ++n) {
        ScalarField m = fpk_forward_sweep(q_curr, scenario.sigma, scenario.initial_density);
        const SweepDiagnostics diag = density_diagnostics(m);
        TwoSidedPolicyField w = flux_from(m, q_curr);
        // Lagged gap energy weights the raw sweep output against the previous
        // iteration's greedy/ratio policies.
        const double gap = n == 0 ? kNan : residual_energy(m, q_curr, q_hat_lag);

        if (n == 0) {
            m_bar = std::move(m);
            w_bar = std::move(w);
        } else {
            std::tie(m_bar, w_bar) = smoothing_update_flux(m_bar, w_bar, m, w, n);
            q_hat = ratio_policy(w_bar, m_bar);
        }

        u = hjb_backward_sweep(q_hat, scenario.sigma,
                               engine.terminal_field(m_bar.level(grid.time_steps())),
                               coupling_rows(engine, m_bar), scenario.hamiltonian.v_values);
        TwoSidedPolicyField q_next = extract_policy(u, cap, &report.cap_activations);
        const double residual = sup_norm_policy_diff(q_next, q_curr);

        IterationRecord rec;
        rec.n = n + 1;
        rec.policy_residual = residual;
        rec.gap_energy = gap;
        rec.energy = engine.has_energy()
                         ? discrete_energy(m_bar, q_hat, 0, engine, scenario.hamiltonian.v_values)
                         : kNan;
        rec.mass_drift = diag.mass_drift;
        rec.min_density = diag.min_density;
        report.history.push_back(rec);
        report.iterations = n + 1;
        if (config.on_iteration) config.on_iteration(rec);

        q_hat_lag = q_hat;
        if (residual <= config.tolerance) {
            report.termination = Termination::Converged;
            break;
        }
        if (n + 1 == config.max_iterations) {
            report.termination = Termination::MaxIterations;
            break;
        }
        q_curr = q_next;
    }

    report.certification = certify_fixed_point(u, m_bar, q_hat, scenario);
    return SolveResult{std::move(u), std::move(m_bar), std::move(q_hat), std::move(report)};
}

} // namespace

SolveResult run_spi1(const Scenario& scenario, const SolverConfig& config,
                     const TwoSidedPolicyField& q0) {
    scenario.validate();
    config.validate();
    return run_policy_average_loop(scenario, config, q0, /*smoothed=*/true);
}

SolveResult run_policy_iteration(const Scenario& scenario, const SolverConfig& config,
                                 const TwoSidedPolicyField& q0) {
    scenario.validate();
    config.validate();
    return run_policy_average_loop(scenario, config, q0, /*smoothed=*/false);
}

SolveResult run_spi2(const Scenario& scenario, const SolverConfig& config,
                     const TwoSidedPolicyField& q0) {
    scenario.validate();
    config.validate();
    return run_flux_average_loop(scenario, config, q0);
}

SolveResult run(const Scenario& scenario, const SolverConfig& config,
                const TwoSidedPolicyField& q0) {
    switch (config.algorithm) {
    case Algorithm::Spi1:
        return run_spi1(scenario, config, q0);
    case Algorithm::Spi2:
        return run_spi2(scenario, config, q0);
    case Algorithm::PolicyIteration:
        return run_policy_iteration(scenario, config, q0);
    }
    throw InputError("run: unknown algorithm");
}

const char* to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Spi1:
        return "spi1";
    case Algorithm::Spi2:
        return "spi2";
    case Algorithm::PolicyIteration:
        return "pi";
    }
    return "?";
}

const char* to_string(Termination t) {
    return t == Termination::Converged ? "converged" : "max_iterations";
}

} // namespace mfg
