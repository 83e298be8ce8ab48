#include "tandem/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tandem/error.hpp"
#include "tandem/random.hpp"

namespace tandem {

namespace {

void update_in_place(std::vector<double>& probs, std::span<const double> ones_prob, int bit) {
    double total = 0.0;
    for (std::size_t m = 0; m < probs.size(); ++m) {
        probs[m] *= bit ? ones_prob[m] : 1.0 - ones_prob[m];
        total += probs[m];
    }
    if (!(total > 0.0)) throw Error(ErrorCode::kZeroLikelihood, "every state gives the observed bit probability 0");
    for (double& p : probs) p /= total;
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t pick_component(const std::vector<double>& weights, double u) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < weights.size(); ++j) {
        acc += weights[j];
        if (u < acc) return j;
    }
    return weights.size() - 1;
}

// First flagged state with the smallest r, or nullopt.
std::optional<std::size_t> decide(const StopDiagnostics& diag) {
    std::optional<std::size_t> best;
    for (std::size_t m = 0; m < diag.stop.size(); ++m) {
        if (diag.stop[m] && (!best || diag.r[m] < diag.r[*best])) best = m;
    }
    return best;
}

void horizon_exceeded(std::uint64_t horizon) {
    throw Error(ErrorCode::kHorizonExceeded, "no stop within " + std::to_string(horizon) + " steps");
}

}  // namespace

double default_u(double c, double clamp) {
    const double lc = std::abs(std::log(c));
    if (lc == 0.0) return clamp;
    return std::min(1.0 / lc, clamp);
}

std::vector<std::size_t> block_schedule(std::span<const double> weights, std::size_t b) {
    if (b == 0 || weights.empty()) throw Error(ErrorCode::kInvalidArgument, "block size and weights must be non-empty");
    std::vector<std::size_t> order;
    order.reserve(b);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const double slots = weights[j] * static_cast<double>(b);
        const double count = std::round(slots);
        if (std::abs(slots - count) > 1e-9) {
            throw Error(ErrorCode::kNonIntegerCounts,
                        "b = " + std::to_string(b) + " is not a common denominator of the weights");
        }
        order.insert(order.end(), static_cast<std::size_t>(count), j);
    }
    if (order.size() != b) throw Error(ErrorCode::kNonIntegerCounts, "block counts do not add up to b");
    return order;
}

TestSpec::TestSpec(HypothesisSet h, DeterministicQuantizer stage1, std::vector<RandomizedQuantizer> stage2,
                   EngineOptions options)
    : h_(std::move(h)), stage1_(std::move(stage1)), stage2_(std::move(stage2)), options_(options) {
    const std::size_t m_count = h_.size();
    if (stage2_.size() != m_count) throw Error(ErrorCode::kInvalidArgument, "need one stage-2 quantizer per state");
    if (options_.fixed_u && !(*options_.fixed_u > 0.0 && *options_.fixed_u < 0.5)) {
        throw Error(ErrorCode::kInvalidArgument, "u must lie in (0, 1/2)");
    }
    if (!(options_.u_clamp > 0.0 && options_.u_clamp < 0.5)) {
        throw Error(ErrorCode::kInvalidArgument, "u clamp must lie in (0, 1/2)");
    }
    if (options_.horizon == 0) throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t mp = 0; mp < m_count; ++mp) {
            if (m != mp && !(kl_pair(stage1_, h_, m, mp) > 0.0)) {
                throw Error(ErrorCode::kInvalidArgument, "stage-1 quantizer does not separate states " +
                                                             std::to_string(m) + " and " + std::to_string(mp));
            }
        }
    }
    stage1_params_ = induced_bernoulli_all(stage1_, h_);
    stage2_params_.resize(m_count);
    schedules_.resize(m_count);
    for (std::size_t d0 = 0; d0 < m_count; ++d0) {
        for (const auto& comp : stage2_[d0].components()) stage2_params_[d0].push_back(induced_bernoulli_all(comp, h_));
        if (options_.randomization == RandomizationMode::kBlockDesign) {
            schedules_[d0] = block_schedule(stage2_[d0].weights(), options_.block_b);
        }
    }
}

double TestSpec::u(double c) const { return options_.fixed_u ? *options_.fixed_u : default_u(c, options_.u_clamp); }

PosteriorState posterior_update(const PosteriorState& state, std::span<const double> ones_prob, int bit) {
    if (ones_prob.size() != state.probs.size()) {
        throw Error(ErrorCode::kInvalidArgument, "one Bernoulli parameter per state");
    }
    PosteriorState next{state.probs, state.step + 1};
    update_in_place(next.probs, ones_prob, bit);
    return next;
}

PosteriorState posterior_update(const PosteriorState& state, const DeterministicQuantizer& component, int bit,
                                const HypothesisSet& h) {
    const auto p = induced_bernoulli_all(component, h);
    return posterior_update(state, p, bit);
}

StageOneResult run_stage_one(const TestSpec& spec, const Scenario& s, const BitSource& bits) {
    const double threshold = 1.0 - spec.u(s.cost);
    const auto& params = spec.stage1_params();
    PosteriorState post{s.prior, 0};
    while (true) {
        if (post.step >= spec.options().horizon) horizon_exceeded(spec.options().horizon);
        update_in_place(post.probs, params, bits());
        ++post.step;
        const std::size_t best = argmax(post.probs);
        if (post.probs[best] >= threshold) return {post.step, best, std::move(post)};
    }
}

StopDiagnostics stop_diagnostics(const PosteriorState& state, const Scenario& s) {
    const std::size_t m_count = state.probs.size();
    StopDiagnostics d{std::vector<double>(m_count, 0.0), std::vector<double>(m_count, 0.0),
                      std::vector<bool>(m_count, false)};
    for (std::size_t m = 0; m < m_count; ++m) {
        double min_loss = std::numeric_limits<double>::infinity();
        for (std::size_t mp = 0; mp < m_count; ++mp) {
            if (mp == m) continue;
            d.r[m] += state.probs[mp] * s.loss[mp][m];
            min_loss = std::min(min_loss, s.loss[m][mp]);
        }
        d.r_prime[m] = state.probs[m] * min_loss;
        // r'/r > 1/c, written without the division so r = 0 is handled.
        d.stop[m] = d.r_prime[m] > 0.0 && d.r_prime[m] * s.cost > d.r[m];
    }
    return d;
}

TrialOutcome run_trial(const TestSpec& spec, const Scenario& s, std::size_t true_state, std::uint64_t seed) {
    const HypothesisSet& h = spec.hypotheses();
    if (true_state >= h.size()) throw Error(ErrorCode::kInvalidArgument, "true state out of range");
    const EngineOptions& opt = spec.options();
    const bool raw = opt.bit_path == BitPath::kRawObservation;
    Rng rng(seed);

    TrialOutcome out;
    auto draw = [&](const std::vector<double>& params, const DeterministicQuantizer& q) {
        if (raw) return q(h[true_state].sample(rng));
        return uniform01(rng) < params[true_state] ? 1 : 0;
    };
    auto record = [&](std::uint64_t step, int stage, std::size_t comp, int bit, const std::vector<double>& post) {
        if (opt.record_transcript) out.transcript.push_back({step, stage, comp, bit, post});
    };

    // Stage 1.
    std::vector<int> stage1_bits;
    const StageOneResult first = run_stage_one(spec, s, [&] {
        const int bit = draw(spec.stage1_params(), spec.stage1());
        if (opt.record_transcript) stage1_bits.push_back(bit);
        return bit;
    });
    if (opt.record_transcript) {
        PosteriorState replay{s.prior, 0};
        for (int bit : stage1_bits) {
            update_in_place(replay.probs, spec.stage1_params(), bit);
            record(++replay.step, 1, 0, bit, replay.probs);
        }
    }
    out.n0 = first.n0;
    out.d0 = first.d0;

    // Stage 2.
    const RandomizedQuantizer& q2 = spec.stage2(first.d0);
    const auto& schedule = spec.schedule(first.d0);
    std::vector<double> post = opt.reset == ResetPolicy::kResetToPrior ? s.prior : first.posterior.probs;
    std::uint64_t n = first.n0;
    if (opt.record_transcript) out.feedback.push_back({n + 1, FeedbackKind::kStageSwitch, first.d0});

    while (true) {
        const auto decision = decide(stop_diagnostics({post, n}, s));
        if (decision) {
            out.n = n;
            out.d = *decision;
            return out;
        }
        if (n >= opt.horizon) horizon_exceeded(opt.horizon);
        ++n;
        std::size_t j = 0;
        if (opt.randomization == RandomizationMode::kFusionDriven) {
            j = pick_component(q2.weights(), uniform01(rng));
            if (opt.record_transcript) out.feedback.push_back({n, FeedbackKind::kComponent, j});
        } else {
            j = schedule[(n - first.n0 - 1) % schedule.size()];
        }
        const auto& params = spec.stage2_params(first.d0, j);
        const int bit = draw(params, q2.components()[j]);
        update_in_place(post, params, bit);
        record(n, 2, j, bit, post);
    }
}

}  // namespace tandem
