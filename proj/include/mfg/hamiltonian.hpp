#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Quadratic Hamiltonian H(x,p) = |p|^2/2 - V(x) with its conjugate Lagrangian
/// L(x,q) = |q|^2/2 + V(x).  V is sampled once per scenario; `cap` bounds the
/// extracted policy componentwise.
struct HamiltonianSpec {
    std::vector<double> v_values; ///< V at every grid node
    double cap = 0.0;             ///< policy bound R > 0

    void validate(const GridSpec& grid) const;
};

/// Greedy two-sided policy from a value field:
///   Q_L = min{R, (D_L U)^+},  Q_R = max{-R, (D_R U)^-}
/// per node and axis; policy level tau comes from U level tau (levels 0..T-1).
/// `cap_activations`, when given, accumulates the number of clipped components.
TwoSidedPolicyField extract_policy(const ScalarField& u, double cap,
                                   long* cap_activations = nullptr);

/// (1/2) sum_axes ((Q_L^+)^2 + (Q_R^-)^2) + V_i for one node; the pairs are the
/// raw components, effective parts are taken here.
double running_cost(std::span<const std::pair<double, double>> q_pairs, double v_i);

/// H(p) + L(q) - p.q; equals |p - q|^2 / 2 for the quadratic Hamiltonian and is
/// nonnegative whenever q is admissible.
double legendre_gap(std::span<const double> p, std::span<const double> q, double v_i);

} // namespace mfg
