#pragma once

#include <optional>
#include <vector>

#include "tandem/engine.hpp"
#include "tandem/maximin.hpp"

namespace tandem {

/// Stage-1 quantizer drawn from the components of `solutions`: the one with the
/// largest min over ordered pairs (m, m') of I(m, m'; phi). Throws when none
/// separates every pair.
DeterministicQuantizer choose_stage_one(const HypothesisSet& h, const std::vector<MaximinSolution>& solutions);

/// Two-stage test using the maximin quantizers in stage 2.
TestSpec make_maximin_spec(const HypothesisSet& h, const std::vector<MaximinSolution>& solutions,
                           EngineOptions options = {}, std::optional<DeterministicQuantizer> stage1 = std::nullopt);

}  // namespace tandem
