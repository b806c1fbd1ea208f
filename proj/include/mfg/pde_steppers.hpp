#pragma once

#include <span>
#include <variant>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/linear_solver.hpp"

namespace mfg {

/// Per-level system matrices of the implicit schemes for one frozen policy
/// level: hjb applies I/dt - sigma Lap + Q_eff . D to a value level, fpk
/// applies I/dt - sigma Lap - div(. Q_eff) to a density level.  The two are
/// assembled independently from their own stencils; the upwind flux choice
/// makes fpk the exact transpose of hjb.
struct TransportMatrices {
    std::variant<TridiagonalSystem, FivePointSystem> hjb;
    std::variant<TridiagonalSystem, FivePointSystem> fpk;
};

TransportMatrices assemble_transport_matrices(const TwoSidedPolicyField& q, int tau, double sigma,
                                              const GridSpec& grid);

/// Forward density sweep: solves
///   (I/dt - sigma Lap - div(. Q_tau)) M_(tau+1) = M_tau / dt
/// for tau = 0..T-1, fully implicit.  The density is never renormalized;
/// conservation and positivity are properties of the scheme, not corrections.
ScalarField fpk_forward_sweep(const TwoSidedPolicyField& policy, double sigma,
                              std::span<const double> m0);

/// Backward value sweep: solves
///   (I/dt - sigma Lap + Q_tau . D) U_tau = U_(tau+1)/dt + |Q_tau|^2/2 + V + f_tau
/// for tau = T-1..0 from the terminal condition.  `coupling_field[tau]` must
/// hold the coupling evaluated at density level tau+1.
ScalarField hjb_backward_sweep(const TwoSidedPolicyField& policy, double sigma,
                               std::span<const double> u_terminal,
                               const std::vector<std::vector<double>>& coupling_field,
                               std::span<const double> v_values);

} // namespace mfg
