#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "itolab/energy.hpp"
#include "itolab/scenario.hpp"
#include "itolab/spaces.hpp"
#include "itolab/spde.hpp"

namespace itolab {

using Json = nlohmann::json;

// Readers throw ErrorCode::malformed_config with the offending key in the message.

SpaceFamily space_family_from_json(const Json& j);
Json to_json(const SpaceFamily& S);

/// Either an explicit scenario or {"random": {"seed": ..., ...}}.
Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& S);

SpdeConfig spde_config_from_json(const Json& j);
Json to_json(const SpdeConfig& cfg);

Json to_json(const EnergyLedger& L);
Json to_json(const IntegrabilityReport& r);

/// Parse a JSON file; malformed_config on I/O or syntax errors.
Json read_json_file(const std::string& path);

/// Shortest round-trip decimal form; identical input gives identical text.
std::string format_number(double x);

void write_ledger_header(std::ostream& os, bool with_seed);
void write_ledger_row(std::ostream& os, const EnergyLedger& L, const std::string* seed = nullptr);

/// level,K_n,gap
void write_correction_csv(std::ostream& os, const CorrectionStudy& study);
/// level,i,error,target
void write_step_error_csv(std::ostream& os, std::span<const StepApproximationError> rows);
/// t,norm_w1p,norm_lp followed by the ledger columns.
void write_spde_csv(std::ostream& os, const SpdeRun& run, std::span<const EnergyLedger> ledgers);

} // namespace itolab
