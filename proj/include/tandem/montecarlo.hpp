#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tandem/engine.hpp"
#include "tandem/models.hpp"

namespace tandem {

struct StateEstimate {
    double mean_n{0.0};
    double se_n{0.0};
    double err_prob{0.0};
    double se_err{0.0};
    std::size_t errors{0};
    // P_m[D = m'] for every m'.
    std::vector<double> decision_freq;
    // c E_m[N] + sum_m' W(m, m') P_m[D = m'].
    double risk{0.0};
};

struct RiskEstimate {
    std::vector<StateEstimate> per_state;
    double average_risk{0.0};
    std::size_t trials{0};
    std::uint64_t seed{0};
};

/// `trials` independent trials per true state. Trial t under state m uses the
/// stream derive_seed(seed, m, t), so results do not depend on threading.
RiskEstimate estimate_risk(const TestSpec& spec, const Scenario& s, std::size_t trials, std::uint64_t seed,
                           std::size_t threads = 0);

/// Leading term c |log c| sum_m pi_m / I(m).
double theoretical_risk(const Scenario& s, std::span<const double> info);

struct CentralizedComparison {
    double centralized_risk{0.0};
    // centralized_risk / theoretical_risk under the scenario prior.
    double efficiency{0.0};
    // Same ratio under the least favourable prior: constant * min_m I(m).
    double efficiency_lower_bound{0.0};
};

/// `constant` is the K in K c |log c| for the optimal centralized test.
CentralizedComparison centralized_benchmark(const Scenario& s, std::span<const double> info,
                                            std::optional<double> constant);

struct SweepRow {
    double c{0.0};
    RiskEstimate estimate;
    double theory_risk{0.0};
    std::optional<double> centralized_risk;
    // E_m[N] I(m) / |log c| per state.
    std::vector<double> ratio_n;
    // P_m[D != m] / c per state.
    std::vector<double> err_over_c;
};

struct SweepResult {
    std::vector<double> info;
    std::vector<SweepRow> rows;
};

/// One sweep row from an estimate at cost s.cost; I(m) from the stage-2 quantizers.
SweepRow summarize(const TestSpec& spec, const Scenario& s, RiskEstimate estimate,
                   std::optional<double> centralized_constant = std::nullopt);

using SpecFactory = std::function<TestSpec(double c)>;

/// Runs estimate_risk for every c (strictly decreasing, all in (0, e^-2)) with
/// the same master seed. I(m) is taken from the stage-2 quantizers.
SweepResult sweep(const SpecFactory& make_spec, std::span<const double> costs, const Scenario& s, std::size_t trials,
                  std::uint64_t seed, std::optional<double> centralized_constant = std::nullopt,
                  std::size_t threads = 0);

std::string sweep_csv(const SweepResult& result);

/// Least-squares slope of log P_m[D != m] against log c. Cells without errors
/// enter at the rule-of-three upper bound 3 / trials.
double error_rate_slope(const SweepResult& result, std::size_t m);

}  // namespace tandem
