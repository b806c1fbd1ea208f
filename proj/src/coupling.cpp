#include "mfg/coupling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace mfg {

KernelTable::KernelTable(KernelKind kind, double zeta, const GridSpec& grid) {
    if (grid.dim() != 1)
        throw InputError("kernel table: nonlocal couplings are implemented in 1D only");
    if (kind == KernelKind::Gaussian && !(zeta > 0.0))
        throw InputError("kernel table: Gaussian width must be positive");
    n_ = grid.node_count();
    even_ = kind == KernelKind::Gaussian;
    values_.resize(2 * n_ - 1);
    const double h = grid.h(0);
    for (int k = -(n_ - 1); k <= n_ - 1; ++k) {
        const double s = k * h;
        values_[k + n_ - 1] = kind == KernelKind::SinPi ? std::sin(std::numbers::pi * s)
                                                        : std::exp(-zeta * s * s);
    }
}

std::vector<double> nonlocal_coupling(std::span<const double> m_level, const KernelTable& table,
                                      double weight, const GridSpec& grid) {
    const int n = grid.node_count();
    if (static_cast<int>(m_level.size()) != n || table.nodes() != n)
        throw InputError("nonlocal_coupling: level length does not match grid");
    std::vector<double> out(n, 0.0);
    const double h = grid.h(0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += table.at(i, j) * m_level[j];
        out[i] = weight * h * s;
    }
    return out;
}

std::vector<double> local_coupling(std::span<const double> m_level, double coefficient,
                                   double exponent) {
    std::vector<double> out(m_level.size());
    for (std::size_t i = 0; i < m_level.size(); ++i) {
        if (m_level[i] < 0.0)
            throw DomainError("local_coupling: negative density");
        out[i] = coefficient * std::pow(m_level[i], exponent);
    }
    return out;
}

CouplingEngine::CouplingEngine(CouplingSpec spec, TerminalCondition terminal, const GridSpec& grid)
    : spec_(std::move(spec)), terminal_(std::move(terminal)), grid_(grid) {
    if (const auto* nl = std::get_if<NonlocalCoupling>(&spec_))
        table_.emplace_back(nl->kernel, nl->zeta, grid_);
    if (const auto* lc = std::get_if<LocalCoupling>(&spec_)) {
        if (!(lc->exponent > 0.0)) throw InputError("coupling: exponent must be positive");
        if (terminal_.source == TerminalSource::TerminalDensityCoupling)
            throw InputError("coupling: local coupling requires fixed terminal data");
    }
    if (terminal_.source == TerminalSource::FixedValues &&
        static_cast<int>(terminal_.fixed_values.size()) != grid_.node_count())
        throw InputError("coupling: terminal data length does not match grid");
}

std::vector<double> CouplingEngine::running_field(std::span<const double> m_level) const {
    if (const auto* nl = std::get_if<NonlocalCoupling>(&spec_))
        return nonlocal_coupling(m_level, table_[0], nl->running_weight, grid_);
    const auto& lc = std::get<LocalCoupling>(spec_);
    return local_coupling(m_level, lc.coefficient, lc.exponent);
}

std::vector<double> CouplingEngine::terminal_field(std::span<const double> m_final) const {
    if (terminal_.source == TerminalSource::FixedValues) return terminal_.fixed_values;
    const auto& nl = std::get<NonlocalCoupling>(spec_);
    return nonlocal_coupling(m_final, table_[0], nl.terminal_weight, grid_);
}

bool CouplingEngine::has_energy() const {
    if (const auto* nl = std::get_if<NonlocalCoupling>(&spec_)) {
        if (table_[0].even()) return true;
        // a zero-weight coupling is identically zero and derives from F = 0
        bool terminal_ok = terminal_.source == TerminalSource::FixedValues ||
                           nl->terminal_weight == 0.0;
        return nl->running_weight == 0.0 && terminal_ok;
    }
    return true;
}

namespace {

double quadratic_form(std::span<const double> m, const KernelTable& table, double weight,
                      const GridSpec& grid) {
    const int n = grid.node_count();
    const double h = grid.h(0);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += table.at(i, j) * m[j];
        s += m[i] * row;
    }
    return 0.5 * weight * h * h * s;
}

} // namespace

double CouplingEngine::energy_running(std::span<const double> m_level) const {
    if (const auto* nl = std::get_if<NonlocalCoupling>(&spec_)) {
        if (nl->running_weight == 0.0) return 0.0;
        if (!table_[0].even())
            throw DomainError("coupling: no quadratic potential for an odd kernel");
        return quadratic_form(m_level, table_[0], nl->running_weight, grid_);
    }
    const auto& lc = std::get<LocalCoupling>(spec_);
    double s = 0.0;
    for (double v : m_level) {
        if (v < 0.0) throw DomainError("coupling: negative density");
        s += std::pow(v, lc.exponent + 1.0);
    }
    return grid_.cell_volume() * lc.coefficient * s / (lc.exponent + 1.0);
}

double CouplingEngine::energy_terminal(std::span<const double> m_final) const {
    if (terminal_.source == TerminalSource::FixedValues) {
        double s = 0.0;
        for (std::size_t i = 0; i < m_final.size(); ++i) s += terminal_.fixed_values[i] * m_final[i];
        return grid_.cell_volume() * s;
    }
    const auto& nl = std::get<NonlocalCoupling>(spec_);
    if (nl.terminal_weight == 0.0) return 0.0;
    if (!table_[0].even())
        throw DomainError("coupling: no quadratic potential for an odd kernel");
    return quadratic_form(m_final, table_[0], nl.terminal_weight, grid_);
}

double discrete_energy(const ScalarField& m, const TwoSidedPolicyField& q, int tau_start,
                       const CouplingEngine& coupling, std::span<const double> v_values) {
    const GridSpec& grid = m.grid();
    if (!q.grid().same_geometry(grid)) throw InputError("discrete_energy: grid mismatch");
    const int steps = grid.time_steps();
    if (tau_start < 0 || tau_start > steps) throw InputError("discrete_energy: tau out of range");

    const int nodes = grid.node_count();
    const double vol = grid.cell_volume();
    double total = 0.0;
    for (int tau = tau_start; tau <= steps; ++tau) {
        const int q_tau = tau < steps ? tau : steps - 1;
        const auto level = m.level(tau);
        double layer = 0.0;
        for (int i = 0; i < nodes; ++i) {
            double kinetic = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                const double l = q.ql_eff(q_tau, i, a);
                const double r = q.qr_eff(q_tau, i, a);
                kinetic += l * l + r * r;
            }
            layer += level[i] * (0.5 * kinetic + v_values[i]);
        }
        total += grid.dt() * (vol * layer + coupling.energy_running(level));
    }
    return total + coupling.energy_terminal(m.level(steps));
}

MonotonicityProbeReport monotonicity_probe(const CouplingEngine& coupling, const GridSpec& grid,
                                           int trials, std::uint64_t seed) {
    if (trials < 1) throw InputError("monotonicity_probe: need at least one trial");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int nodes = grid.node_count();
    const double vol = grid.cell_volume();

    auto sample_density = [&]() {
        std::vector<double> m(nodes);
        double total = 0.0;
        for (double& v : m) {
            v = unif(rng);
            total += v;
        }
        const double scale = 1.0 / (vol * total);
        for (double& v : m) v *= scale;
        return m;
    };

    MonotonicityProbeReport report;
    report.trials = trials;
    report.min_pairing = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const auto m1 = sample_density();
        const auto m2 = sample_density();
        const auto f1 = coupling.running_field(m1);
        const auto f2 = coupling.running_field(m2);
        double pairing = 0.0;
        for (int i = 0; i < nodes; ++i) pairing += (f1[i] - f2[i]) * (m1[i] - m2[i]);
        pairing *= vol;
        if (pairing < report.min_pairing) report.min_pairing = pairing;
    }
    return report;
}

} // namespace mfg
