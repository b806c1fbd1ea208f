#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

enum class KernelKind { SinPi, Gaussian };

/// Convolution coupling f[m](x) = weight * integral of l(x-y) m(y) dy with
/// kernel l = sin(pi s) or exp(-zeta s^2); `running_weight` is used along the
/// horizon and `terminal_weight` at the final time.
struct NonlocalCoupling {
    KernelKind kernel = KernelKind::SinPi;
    double zeta = 0.0;
    double running_weight = 1.0;
    double terminal_weight = 0.0;
};

/// Pointwise coupling f(m) = coefficient * m^exponent.
struct LocalCoupling {
    double coefficient = 0.0;
    double exponent = 1.0;
};

using CouplingSpec = std::variant<NonlocalCoupling, LocalCoupling>;

/// Precomputed kernel values l((i-j)h) for every node offset of a 1D grid.
class KernelTable {
public:
    KernelTable(KernelKind kind, double zeta, const GridSpec& grid);

    double at(int i, int j) const { return values_[i - j + n_ - 1]; }
    bool even() const { return even_; }
    int nodes() const { return n_; }

private:
    int n_;
    bool even_;
    std::vector<double> values_;
};

/// f_h[M]_i = weight * sum_j h l((i-j)h) M_j.
std::vector<double> nonlocal_coupling(std::span<const double> m_level, const KernelTable& table,
                                      double weight, const GridSpec& grid);

/// coefficient * m^exponent per node; rejects negative densities.
std::vector<double> local_coupling(std::span<const double> m_level, double coefficient,
                                   double exponent);

enum class TerminalSource { TerminalDensityCoupling, FixedValues };

/// Where a scenario's terminal value condition comes from: the terminal-weight
/// coupling applied to the final density, or fixed per-node data.
struct TerminalCondition {
    TerminalSource source = TerminalSource::TerminalDensityCoupling;
    std::vector<double> fixed_values; // used when source == FixedValues
};

/// Coupling evaluation bound to one grid: owns the kernel table and the
/// terminal condition, and exposes the running/terminal fields plus the
/// potentials they derive from.
class CouplingEngine {
public:
    CouplingEngine(CouplingSpec spec, TerminalCondition terminal, const GridSpec& grid);

    const CouplingSpec& spec() const { return spec_; }
    const TerminalCondition& terminal() const { return terminal_; }

    std::vector<double> running_field(std::span<const double> m_level) const;
    std::vector<double> terminal_field(std::span<const double> m_final) const;

    /// True when the running coupling derives from a potential we can evaluate
    /// (even kernel, or local coupling).  The odd sin kernel has no quadratic
    /// potential; energy queries on it throw DomainError.
    bool has_energy() const;

    /// F_h[M]: 0.5 w sum_ij h^2 l M M for an even kernel, or the closed-form
    /// antiderivative h^d sum c m^(k+1)/(k+1) for the local coupling.
    double energy_running(std::span<const double> m_level) const;

    /// G_h[M_T] for the nonlocal terminal coupling, or h^d <g_T, M_T> for a
    /// fixed terminal condition.
    double energy_terminal(std::span<const double> m_final) const;

private:
    CouplingSpec spec_;
    TerminalCondition terminal_;
    GridSpec grid_;
    std::vector<KernelTable> table_; // empty for local couplings
};

/// Discrete control energy over time levels tau_start..T:
///   sum_tau dt ( h^d sum_i M_(tau,i) (|Q_(tau,i,+-)|^2/2 + V_i) + F_h[M_tau] ) + G_h[M_T].
/// Q has no level T; the tau = T kinetic term reuses level T-1.
double discrete_energy(const ScalarField& m, const TwoSidedPolicyField& q, int tau_start,
                       const CouplingEngine& coupling, std::span<const double> v_values);

struct MonotonicityProbeReport {
    double min_pairing = 0.0; ///< min over trials of h^d sum (f[m]-f[m'])(m-m')
    int trials = 0;
};

/// Samples random density pairs and reports the minimum monotonicity pairing.
/// A nonnegative minimum is consistent with crowd-averse (monotone) coupling;
/// this is a diagnostic only, never a gate.
MonotonicityProbeReport monotonicity_probe(const CouplingEngine& coupling, const GridSpec& grid,
                                           int trials, std::uint64_t seed);

} // namespace mfg
