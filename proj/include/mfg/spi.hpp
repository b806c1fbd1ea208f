#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mfg/pde_steppers.hpp"
#include "mfg/scenario.hpp"

namespace mfg {

enum class Algorithm { Spi1, Spi2, PolicyIteration };

/// Learning-rate schedule for the policy average of Spi1: 2/(n+2) puts
/// triangular weights on recent iterates, 1/(n+2) is the arithmetic mean.
/// Spi2 always blends the density/flux pair with rate 2/(n+1).
enum class RateSchedule { TwoOverNPlus2, OneOverNPlus2 };

struct IterationRecord;

struct SolverConfig {
    Algorithm algorithm = Algorithm::Spi1;
    RateSchedule rate = RateSchedule::TwoOverNPlus2;
    double tolerance = 1e-4;
    int max_iterations = 500;
    /// Legacy Spi1 smoothing form: average in the previous greedy policy
    /// instead of the newest one.  Certifies far worse; off by default.
    bool compat_discrete_smoothing = false;
    /// Invoked after every iteration (progress reporting).
    std::function<void(const IterationRecord&)> on_iteration;

    void validate() const;
};

enum class Termination { Converged, MaxIterations };

struct IterationRecord {
    int n = 0;                  ///< 1-based iteration ordinal
    double policy_residual = 0; ///< ||Q^(n+1) - Q^(n)||_linf over effective parts
    double gap_energy = 0;      ///< lagged a_(n-1); NaN on the first row
    double energy = 0;          ///< J_0 of the smoothed pair; NaN without a potential
    double mass_drift = 0;      ///< max relative per-level mass deviation of this sweep
    double min_density = 0;     ///< min over (tau, node) of this sweep's output
};

struct CertificationResiduals {
    double policy_consistency = 0; ///< ||Q - extract_policy(U)||_linf
    double fpk_residual = 0;       ///< sup |forward scheme at (M, Q)|
    double hjb_residual = 0;       ///< sup |backward scheme at (U, Q, f[M])|
};

struct IterationReport {
    std::vector<IterationRecord> history;
    Termination termination = Termination::MaxIterations;
    int iterations = 0;
    CertificationResiduals certification;
    long cap_activations = 0;
};

/// Terminated iterate: the value and density fields together with the policy
/// that generated them (the smoothed policy for Spi1, the flux-ratio policy
/// for Spi2, the greedy policy for plain policy iteration).
struct SolveResult {
    ScalarField u;
    ScalarField m;
    TwoSidedPolicyField q;
    IterationReport report;
};

/// One smoothing step of the policy average:
///   next_avg = (1 - beta_n) avg + beta_n q_new,  beta_n = 2/(n+2) or 1/(n+2),
/// applied to raw components.
TwoSidedPolicyField smoothing_update_policy(const TwoSidedPolicyField& avg,
                                            const TwoSidedPolicyField& q_new, int n,
                                            RateSchedule schedule);

/// One smoothing step of the density/flux pair with rate beta_n = 2/(n+1),
/// where n is the index of the incoming iterate (beta_1 = 1 overwrites).
std::pair<ScalarField, TwoSidedPolicyField> smoothing_update_flux(
    const ScalarField& m_avg, const TwoSidedPolicyField& w_avg, const ScalarField& m_new,
    const TwoSidedPolicyField& w_new, int n);

/// Two-sided flux W_tau = M_(tau+1) * Q_(tau,+-) (effective parts).
TwoSidedPolicyField flux_from(const ScalarField& m, const TwoSidedPolicyField& q);

/// Policy that would have generated the smoothed pair:
///   ((W_L)^+ / M_(tau+1), (W_R)^- / M_(tau+1)) per node and axis.
/// Throws InvariantViolation if the density is not strictly positive.
TwoSidedPolicyField ratio_policy(const TwoSidedPolicyField& w_avg, const ScalarField& m_avg);

/// Discrete surrogate of the policy-gap energy
///   a = dt h^d sum_(tau,i) M_(tau+1,i) | greedy - smoothed |^2
/// over effective parts, where greedy = extract_policy(U).
double residual_energy(const ScalarField& m_next, const TwoSidedPolicyField& greedy,
                       const TwoSidedPolicyField& smoothed);

/// A-posteriori residuals of the full discrete system at an arbitrary triple.
CertificationResiduals certify_fixed_point(const ScalarField& u, const ScalarField& m,
                                           const TwoSidedPolicyField& q,
                                           const Scenario& scenario);

SolveResult run_spi1(const Scenario& scenario, const SolverConfig& config,
                     const TwoSidedPolicyField& q0);
SolveResult run_spi2(const Scenario& scenario, const SolverConfig& config,
                     const TwoSidedPolicyField& q0);
SolveResult run_policy_iteration(const Scenario& scenario, const SolverConfig& config,
                                 const TwoSidedPolicyField& q0);

/// Dispatches on config.algorithm.
SolveResult run(const Scenario& scenario, const SolverConfig& config,
                const TwoSidedPolicyField& q0);

const char* to_string(Algorithm a);
const char* to_string(Termination t);

} // namespace mfg
