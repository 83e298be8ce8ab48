#include "tandem/two_stage.hpp"

#include <limits>

#include "tandem/error.hpp"

namespace tandem {

DeterministicQuantizer choose_stage_one(const HypothesisSet& h, const std::vector<MaximinSolution>& solutions) {
    const DeterministicQuantizer* best = nullptr;
    double best_value = 0.0;
    for (const auto& sol : solutions) {
        for (const auto& q : sol.quantizer.components()) {
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < h.size(); ++m) {
                for (std::size_t mp = 0; mp < h.size(); ++mp) {
                    if (m != mp) worst = std::min(worst, kl_pair(q, h, m, mp));
                }
            }
            if (worst > best_value) {
                best_value = worst;
                best = &q;
            }
        }
    }
    if (best == nullptr) {
        throw Error(ErrorCode::kInvalidArgument, "no maximin component separates every pair of states");
    }
    return *best;
}

TestSpec make_maximin_spec(const HypothesisSet& h, const std::vector<MaximinSolution>& solutions,
                           EngineOptions options, std::optional<DeterministicQuantizer> stage1) {
    if (solutions.size() != h.size()) throw Error(ErrorCode::kInvalidArgument, "need one maximin solution per state");
    std::vector<RandomizedQuantizer> stage2;
    for (const auto& sol : solutions) stage2.push_back(sol.quantizer);
    DeterministicQuantizer first = stage1 ? *stage1 : choose_stage_one(h, solutions);
    return TestSpec(h, std::move(first), std::move(stage2), options);
}

}  // namespace tandem
