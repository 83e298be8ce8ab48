#pragma once

#include <json.hpp>

#include "tandem/engine.hpp"
#include "tandem/maximin.hpp"
#include "tandem/models.hpp"
#include "tandem/montecarlo.hpp"
#include "tandem/quantizer.hpp"

namespace tandem {

// Infinite interval endpoints are written as the strings "inf" / "-inf".
nlohmann::json endpoint_to_json(double x);
double endpoint_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DeterministicQuantizer& q);
nlohmann::json to_json(const RandomizedQuantizer& q);
DeterministicQuantizer deterministic_quantizer_from_json(const nlohmann::json& j);
RandomizedQuantizer randomized_quantizer_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MaximinSolution& sol);

nlohmann::json to_json(const Density& d);
nlohmann::json to_json(const Scenario& s);
/// Throws Error(kParseError) naming the offending field, or Error(kValidationError)
/// when shapes disagree (loss not MxM, prior length != M).
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const RiskEstimate& r);
nlohmann::json to_json(const SweepResult& r);
nlohmann::json to_json(const TranscriptStep& t);

}  // namespace tandem
