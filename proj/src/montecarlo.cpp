#include "tandem/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "parallel.hpp"
#include "tandem/error.hpp"
#include "tandem/quantizer.hpp"
#include "tandem/random.hpp"

namespace tandem {

namespace {

struct Draw {
    std::uint64_t n;
    std::size_t d;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

RiskEstimate estimate_risk(const TestSpec& spec, const Scenario& s, std::size_t trials, std::uint64_t seed,
                           std::size_t threads) {
    if (trials == 0) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
    const std::size_t m_count = s.size();
    std::vector<Draw> draws(m_count * trials);
    detail::parallel_for(draws.size(), threads, [&](std::size_t k) {
        const std::size_t m = k / trials;
        const std::size_t t = k % trials;
        const std::uint64_t trial_seed = derive_seed(seed, m, t);
        try {
            const TrialOutcome o = run_trial(spec, s, m, trial_seed);
            draws[k] = {o.n, o.d};
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " [state " + std::to_string(m) + ", trial " +
                                      std::to_string(t) + ", seed " + std::to_string(trial_seed) + "]");
        }
    });

    RiskEstimate est;
    est.trials = trials;
    est.seed = seed;
    const double n_trials = static_cast<double>(trials);
    for (std::size_t m = 0; m < m_count; ++m) {
        StateEstimate st;
        st.decision_freq.assign(m_count, 0.0);
        double sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const Draw& d = draws[m * trials + t];
            sum += static_cast<double>(d.n);
            st.decision_freq[d.d] += 1.0;
            if (d.d != m) ++st.errors;
        }
        st.mean_n = sum / n_trials;
        double ss = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const double dev = static_cast<double>(draws[m * trials + t].n) - st.mean_n;
            ss += dev * dev;
        }
        st.se_n = trials > 1 ? std::sqrt(ss / (n_trials - 1.0) / n_trials) : 0.0;
        for (double& f : st.decision_freq) f /= n_trials;
        st.err_prob = static_cast<double>(st.errors) / n_trials;
        st.se_err = std::sqrt(st.err_prob * (1.0 - st.err_prob) / n_trials);
        st.risk = s.cost * st.mean_n;
        for (std::size_t mp = 0; mp < m_count; ++mp) st.risk += s.loss[m][mp] * st.decision_freq[mp];
        est.average_risk += s.prior[m] * st.risk;
        est.per_state.push_back(std::move(st));
    }
    return est;
}

double theoretical_risk(const Scenario& s, std::span<const double> info) {
    if (info.size() != s.size()) throw Error(ErrorCode::kInvalidArgument, "one information number per state");
    double acc = 0.0;
    for (std::size_t m = 0; m < info.size(); ++m) {
        if (!(info[m] > 0.0)) throw Error(ErrorCode::kZeroInformation, "I(" + std::to_string(m) + ") = 0");
        acc += s.prior[m] / info[m];
    }
    return s.cost * std::abs(std::log(s.cost)) * acc;
}

CentralizedComparison centralized_benchmark(const Scenario& s, std::span<const double> info,
                                            std::optional<double> constant) {
    if (!constant) throw Error(ErrorCode::kMissingConstant, "centralized risk constant is not configured");
    if (!(*constant > 0.0)) throw Error(ErrorCode::kInvalidArgument, "centralized constant must be positive");
    CentralizedComparison out;
    const double scale = s.cost * std::abs(std::log(s.cost));
    out.centralized_risk = *constant * scale;
    out.efficiency = out.centralized_risk / theoretical_risk(s, info);
    double min_info = info[0];
    for (double v : info) min_info = std::min(min_info, v);
    out.efficiency_lower_bound = *constant * min_info;
    return out;
}

SweepResult sweep(const SpecFactory& make_spec, std::span<const double> costs, const Scenario& s, std::size_t trials,
                  std::uint64_t seed, std::optional<double> centralized_constant, std::size_t threads) {
    if (costs.empty()) throw Error(ErrorCode::kInvalidArgument, "empty cost list");
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (!(costs[i] > 0.0 && costs[i] < std::exp(-2.0))) {
            throw Error(ErrorCode::kInvalidArgument, "every c must lie in (0, e^-2)");
        }
        if (i > 0 && !(costs[i] < costs[i - 1])) {
            throw Error(ErrorCode::kInvalidArgument, "cost list must be strictly decreasing");
        }
    }
    SweepResult result;
    for (double c : costs) {
        Scenario sc = s;
        sc.cost = c;
        const TestSpec spec = make_spec(c);
        SweepRow row = summarize(spec, sc, estimate_risk(spec, sc, trials, seed, threads), centralized_constant);
        if (result.info.empty()) {
            for (std::size_t m = 0; m < sc.size(); ++m) result.info.push_back(info_number(spec.stage2(m), spec.hypotheses(), m));
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

SweepRow summarize(const TestSpec& spec, const Scenario& s, RiskEstimate estimate,
                   std::optional<double> centralized_constant) {
    std::vector<double> info(s.size());
    for (std::size_t m = 0; m < s.size(); ++m) info[m] = info_number(spec.stage2(m), spec.hypotheses(), m);
    SweepRow row;
    row.c = s.cost;
    row.estimate = std::move(estimate);
    row.theory_risk = theoretical_risk(s, info);
    if (centralized_constant) row.centralized_risk = centralized_benchmark(s, info, centralized_constant).centralized_risk;
    const double lc = std::abs(std::log(s.cost));
    for (std::size_t m = 0; m < s.size(); ++m) {
        row.ratio_n.push_back(row.estimate.per_state[m].mean_n * info[m] / lc);
        row.err_over_c.push_back(row.estimate.per_state[m].err_prob / s.cost);
    }
    return row;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "c,m,mean_N,se_N,err_prob,se_err,risk_m,risk_avg,theory_risk,ratio_N\n";
    for (const auto& row : result.rows) {
        for (std::size_t m = 0; m < row.estimate.per_state.size(); ++m) {
            const auto& st = row.estimate.per_state[m];
            os << fmt(row.c) << ',' << m << ',' << fmt(st.mean_n) << ',' << fmt(st.se_n) << ',' << fmt(st.err_prob)
               << ',' << fmt(st.se_err) << ',' << fmt(st.risk) << ',' << fmt(row.estimate.average_risk) << ','
               << fmt(row.theory_risk) << ',' << fmt(row.ratio_n[m]) << '\n';
        }
    }
    return os.str();
}

double error_rate_slope(const SweepResult& result, std::size_t m) {
    if (result.rows.size() < 2) throw Error(ErrorCode::kInvalidArgument, "slope needs at least two costs");
    std::vector<double> x, y;
    for (const auto& row : result.rows) {
        const auto& st = row.estimate.per_state.at(m);
        const double p = st.errors > 0 ? st.err_prob : 3.0 / static_cast<double>(row.estimate.trials);
        x.push_back(std::log(row.c));
        y.push_back(std::log(p));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace tandem
