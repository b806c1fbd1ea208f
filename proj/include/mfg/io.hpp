#pragma once

#include <optional>
#include <string>

#include "mfg/scenario.hpp"
#include "mfg/spi.hpp"

namespace mfg {

/// Flat key = value file naming a `base` preset plus numeric overrides.
Scenario load_scenario_file(const std::string& path);

/// Long-format policy CSV: "tau,i[,i1],axis,q_L,q_R".
TwoSidedPolicyField read_policy_csv(const std::string& path, const GridSpec& grid);
void write_policy_csv(const std::string& path, const TwoSidedPolicyField& q);

/// Long-format scalar field CSV: "tau,i[,i1],value"; used for fields_M/fields_U
/// and their round-trip checks.
void write_scalar_field_csv(const std::string& path, const ScalarField& field);
ScalarField read_scalar_field_csv(const std::string& path, const GridSpec& grid, FieldRole role);

/// Writes residuals.csv, fields_M.csv, fields_U.csv and certification.json
/// into out_dir (created if missing).  All floats are written as decimals with
/// 17 significant digits, so identical runs produce byte-identical files.
void write_run_outputs(const SolveResult& result, const Scenario& scenario,
                       const SolverConfig& config, const std::string& out_dir,
                       std::optional<double> probe_min = std::nullopt);

} // namespace mfg
