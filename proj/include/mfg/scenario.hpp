#pragma once

#include <optional>
#include <string>

#include "mfg/coupling.hpp"
#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

enum class InitialDensityKind { CosineBump, GaussianBumps2d, Uniform };

/// Fully sampled problem instance: grid, diffusion, Hamiltonian data, coupling
/// and terminal condition, plus the normalized initial density.
struct Scenario {
    std::string name;
    GridSpec grid;
    double sigma = 0.0;
    double horizon = 0.0;
    HamiltonianSpec hamiltonian;
    CouplingSpec coupling;
    TerminalCondition terminal;
    InitialDensityKind m0_kind = InitialDensityKind::Uniform;
    std::vector<double> initial_density; ///< normalized so mass() == 1 exactly

    CouplingEngine make_coupling_engine() const { return {coupling, terminal, grid}; }
    void validate() const;
};

/// Numeric overrides applied on top of a preset (config files and tests).
struct ScenarioOverrides {
    std::optional<int> intervals;        // per axis
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<double> sigma;
    std::optional<double> theta;         // running coupling weight
    std::optional<double> eta;           // terminal coupling weight
    std::optional<double> zeta;          // Gaussian kernel width
    std::optional<double> cap;           // policy bound R
    std::optional<double> coefficient;   // local coupling c
    std::optional<double> exponent;      // local coupling exponent
    std::optional<InitialDensityKind> m0;
};

/// Preset names: test1, test2, test3, test2d.
Scenario make_preset(const std::string& name, const ScenarioOverrides& overrides = {});

/// Accepts a preset name or a path to a key/value config file naming a base
/// preset plus overrides.
Scenario load_scenario(const std::string& name_or_path);

/// Node samples of the scenario's initial-density profile, rescaled so the
/// discrete mass is exactly one.
std::vector<double> sample_initial_density(InitialDensityKind kind, const GridSpec& grid);

/// Initial policy from a CLI-style description: "zero", "linear:<slope>"
/// (Q_L = Q_R = slope * x per axis), or "file:<path>" (long-format CSV).
/// Raw components are clipped to [-R, R].
TwoSidedPolicyField make_initial_policy(const Scenario& scenario, const std::string& kind);

} // namespace mfg
