#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tandem/models.hpp"
#include "tandem/quantizer.hpp"

namespace tandem {

enum class ResetPolicy { kResetToPrior, kCarryOver };
enum class RandomizationMode { kFusionDriven, kBlockDesign };
enum class BitPath { kInducedBernoulli, kRawObservation };

struct EngineOptions {
    ResetPolicy reset{ResetPolicy::kResetToPrior};
    RandomizationMode randomization{RandomizationMode::kFusionDriven};
    std::size_t block_b{1};
    std::uint64_t horizon{10'000'000};
    // Replaces the u(c) rule when set.
    std::optional<double> fixed_u;
    double u_clamp{0.49};
    BitPath bit_path{BitPath::kInducedBernoulli};
    bool record_transcript{false};
};

/// u(c) = 1/|log c|, clamped to `clamp`.
double default_u(double c, double clamp = 0.49);

/// Component order for one block of b observations: component j occupies
/// exactly b * weights[j] consecutive slots, components in index order.
std::vector<std::size_t> block_schedule(std::span<const double> weights, std::size_t b);

/// The two-stage test: a fixed stage-1 quantizer and one stage-2 quantizer per
/// preliminary decision. Induced Bernoulli parameters are precomputed.
class TestSpec {
public:
    TestSpec(HypothesisSet h, DeterministicQuantizer stage1, std::vector<RandomizedQuantizer> stage2,
             EngineOptions options = {});

    double u(double c) const;

    const HypothesisSet& hypotheses() const noexcept { return h_; }
    const DeterministicQuantizer& stage1() const noexcept { return stage1_; }
    const RandomizedQuantizer& stage2(std::size_t d0) const { return stage2_.at(d0); }
    const EngineOptions& options() const noexcept { return options_; }
    std::size_t size() const noexcept { return h_.size(); }

    // f_m(1; phi) for every state m.
    const std::vector<double>& stage1_params() const noexcept { return stage1_params_; }
    const std::vector<double>& stage2_params(std::size_t d0, std::size_t j) const { return stage2_params_.at(d0).at(j); }
    // Empty unless randomization is block design.
    const std::vector<std::size_t>& schedule(std::size_t d0) const { return schedules_.at(d0); }

private:
    HypothesisSet h_;
    DeterministicQuantizer stage1_;
    std::vector<RandomizedQuantizer> stage2_;
    EngineOptions options_;
    std::vector<double> stage1_params_;
    std::vector<std::vector<std::vector<double>>> stage2_params_;
    std::vector<std::vector<std::size_t>> schedules_;
};

struct PosteriorState {
    std::vector<double> probs;
    std::uint64_t step{0};
};

/// Bayes update with the realized deterministic component, given f_m(1) per state.
PosteriorState posterior_update(const PosteriorState& state, std::span<const double> ones_prob, int bit);
PosteriorState posterior_update(const PosteriorState& state, const DeterministicQuantizer& component, int bit,
                                const HypothesisSet& h);

struct StageOneResult {
    std::uint64_t n0{0};
    std::size_t d0{0};
    PosteriorState posterior;
};

using BitSource = std::function<int()>;

/// Stops at the first n >= 1 with max_m posterior >= 1 - u(c).
StageOneResult run_stage_one(const TestSpec& spec, const Scenario& s, const BitSource& bits);

struct StopDiagnostics {
    std::vector<double> r;        // posterior expected loss of deciding m
    std::vector<double> r_prime;  // pi_m * min_{m' != m} W(m, m')
    std::vector<bool> stop;       // r'/r > 1/c, 0/0 never stops
};

StopDiagnostics stop_diagnostics(const PosteriorState& state, const Scenario& s);

struct TranscriptStep {
    std::uint64_t step{0};
    int stage{1};
    std::size_t component{0};
    int bit{0};
    std::vector<double> posterior;
};

enum class FeedbackKind { kStageSwitch, kComponent };

// Fusion-to-sensor message V_{n-1}, sent before observation `step`.
struct Feedback {
    std::uint64_t step{0};
    FeedbackKind kind{FeedbackKind::kStageSwitch};
    std::size_t value{0};
};

struct TrialOutcome {
    std::uint64_t n{0};
    std::size_t d{0};
    std::uint64_t n0{0};
    std::size_t d0{0};
    // Filled only when EngineOptions::record_transcript is set.
    std::vector<TranscriptStep> transcript;
    std::vector<Feedback> feedback;
};

TrialOutcome run_trial(const TestSpec& spec, const Scenario& s, std::size_t true_state, std::uint64_t seed);

}  // namespace tandem
