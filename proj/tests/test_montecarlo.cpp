#include <doctest.h>

#include <cmath>

#include "tandem/error.hpp"
#include "tandem/json_io.hpp"
#include "tandem/montecarlo.hpp"

using namespace tandem;

namespace {

Scenario triple_scenario(double c = 1e-3) {
    return Scenario{gaussian_hypotheses({0.0, -1.0, 1.0}), zero_one_loss(3), uniform_prior(3), c};
}

TestSpec threshold_spec(double t0, double t1, double t2) {
    return TestSpec(gaussian_hypotheses({0.0, -1.0, 1.0}), DeterministicQuantizer::threshold(0.0),
                    {DeterministicQuantizer::threshold(t0), DeterministicQuantizer::threshold(t1),
                     DeterministicQuantizer::threshold(t2)});
}

TestSpec maximin_thresholds() { return threshold_spec(0.0, -0.7941, 0.7941); }

}  // namespace

TEST_CASE("risk identities hold exactly") {
    Scenario s = triple_scenario();
    s.prior = {0.2, 0.3, 0.5};
    s.loss = {{0.0, 1.0, 4.0}, {2.0, 0.0, 1.0}, {1.0, 3.0, 0.0}};
    const RiskEstimate est = estimate_risk(maximin_thresholds(), s, 500, 3);
    double avg = 0.0;
    for (std::size_t m = 0; m < 3; ++m) {
        const auto& st = est.per_state[m];
        double r = s.cost * st.mean_n;
        for (std::size_t d = 0; d < 3; ++d) r += s.loss[m][d] * st.decision_freq[d];
        CHECK(st.risk == r);
        avg += s.prior[m] * st.risk;
        double total = 0.0;
        for (double f : st.decision_freq) total += f;
        CHECK(total == doctest::Approx(1.0));
        CHECK(st.err_prob == doctest::Approx(1.0 - st.decision_freq[m]));
    }
    CHECK(est.average_risk == avg);
    CHECK(est.trials == 500);
    CHECK(est.seed == 3);
}

TEST_CASE("single trial equals the trial's own arithmetic") {
    const Scenario s = triple_scenario();
    const TestSpec spec = maximin_thresholds();
    const RiskEstimate est = estimate_risk(spec, s, 1, 17);
    for (std::size_t m = 0; m < 3; ++m) {
        const TrialOutcome o = run_trial(spec, s, m, derive_seed(17, m, 0));
        CHECK(est.per_state[m].mean_n == static_cast<double>(o.n));
        CHECK(est.per_state[m].se_n == 0.0);
        CHECK(est.per_state[m].risk == s.cost * static_cast<double>(o.n) + (o.d == m ? 0.0 : 1.0));
    }
    CHECK_THROWS_AS(estimate_risk(spec, s, 0, 1), Error);
}

TEST_CASE("estimates do not depend on the thread count") {
    const Scenario s = triple_scenario();
    const TestSpec spec = maximin_thresholds();
    const RiskEstimate a = estimate_risk(spec, s, 300, 5, 1);
    const RiskEstimate b = estimate_risk(spec, s, 300, 5, 4);
    for (std::size_t m = 0; m < 3; ++m) {
        CHECK(a.per_state[m].mean_n == b.per_state[m].mean_n);
        CHECK(a.per_state[m].errors == b.per_state[m].errors);
    }
    CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("perfect separation has no errors") {
    const HypothesisSet h({Density::finite_alphabet({0.0, 1.0}, {1.0, 0.0}),
                           Density::finite_alphabet({0.0, 1.0}, {0.0, 1.0})});
    const auto q = DeterministicQuantizer::from_subset({0.0, 1.0}, 0b10);
    const Scenario s{h, zero_one_loss(2), {0.25, 0.75}, 1e-3};
    const RiskEstimate est = estimate_risk(TestSpec(h, q, {q, q}), s, 200, 1);
    for (const auto& st : est.per_state) {
        CHECK(st.errors == 0);
        CHECK(st.risk == doctest::Approx(s.cost * st.mean_n));
    }
    CHECK(est.average_risk == doctest::Approx(1e-3 * (0.25 * est.per_state[0].mean_n + 0.75 * est.per_state[1].mean_n)));
}

TEST_CASE("theoretical_risk") {
    Scenario s = triple_scenario(1e-4);
    const std::vector<double> info{0.3137, 0.3186, 0.3186};
    CHECK(theoretical_risk(s, info) == doctest::Approx(2.906e-3).epsilon(0.0005 / 2.906));
    CHECK(theoretical_risk(s, info) == doctest::Approx(0.002905930823258097).epsilon(1e-12));
    const std::vector<double> doubled{0.6274, 0.6372, 0.6372};
    CHECK(theoretical_risk(s, doubled) == doctest::Approx(0.5 * theoretical_risk(s, info)).epsilon(1e-14));
    try {
        theoretical_risk(s, std::vector<double>{0.3, 0.0, 0.3});
        FAIL("expected ZeroInformation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kZeroInformation);
    }
}

TEST_CASE("centralized_benchmark") {
    const Scenario s = triple_scenario(1e-4);
    const std::vector<double> info{0.3137, 0.3186, 0.3186};
    const auto cmp = centralized_benchmark(s, info, 2.0);
    CHECK(cmp.efficiency_lower_bound == doctest::Approx(0.6274).epsilon(1e-12));
    // 2 / (sum pi_m / I(m)) under the uniform prior.
    CHECK(cmp.efficiency == doctest::Approx(0.6338994926004229).epsilon(1e-12));
    CHECK(cmp.centralized_risk == doctest::Approx(2.0 * 1e-4 * std::log(1e4)).epsilon(1e-14));
    try {
        centralized_benchmark(s, info, std::nullopt);
        FAIL("expected MissingConstant");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kMissingConstant);
    }
}

TEST_CASE("sweep") {
    const Scenario s = triple_scenario();
    const TestSpec spec = maximin_thresholds();
    auto factory = [&](double) { return spec; };

    SUBCASE("single cost equals estimate_risk") {
        const std::vector<double> costs{1e-3};
        const SweepResult r = sweep(factory, costs, s, 200, 9);
        REQUIRE(r.rows.size() == 1);
        const RiskEstimate direct = estimate_risk(spec, s, 200, 9);
        CHECK(to_json(r.rows[0].estimate).dump() == to_json(direct).dump());
        CHECK(r.info.size() == 3);
        CHECK(r.info[0] == doctest::Approx(info_number(spec.stage2(0), spec.hypotheses(), 0)));
    }
    SUBCASE("rows follow the cost list") {
        const std::vector<double> costs{1e-2, 1e-3};
        const SweepResult r = sweep(factory, costs, s, 100, 9);
        CHECK(r.rows[0].c == 1e-2);
        CHECK(r.rows[1].c == 1e-3);
        for (const auto& row : r.rows) {
            const double lc = std::abs(std::log(row.c));
            for (std::size_t m = 0; m < 3; ++m) {
                CHECK(row.ratio_n[m] == doctest::Approx(row.estimate.per_state[m].mean_n * r.info[m] / lc));
            }
        }
        const std::string csv = sweep_csv(r);
        CHECK(csv.rfind("c,m,mean_N,se_N,err_prob,se_err,risk_m,risk_avg,theory_risk,ratio_N\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
        CHECK(sweep_csv(sweep(factory, costs, s, 100, 9)) == csv);
    }
    SUBCASE("bad cost lists") {
        CHECK_THROWS_AS(sweep(factory, std::vector<double>{1e-3, 1e-2}, s, 10, 1), Error);
        CHECK_THROWS_AS(sweep(factory, std::vector<double>{0.2}, s, 10, 1), Error);
        CHECK_THROWS_AS(sweep(factory, std::vector<double>{}, s, 10, 1), Error);
    }
}

TEST_CASE("higher information means fewer samples") {
    const Scenario s = triple_scenario(1e-3);
    const RiskEstimate good = estimate_risk(maximin_thresholds(), s, 2000, 21);
    // Detuned: stage-2 thresholds moved away from the maximin ones.
    const TestSpec detuned = threshold_spec(0.6, -1.6, 1.6);
    for (std::size_t m = 0; m < 3; ++m) {
        REQUIRE(info_number(detuned.stage2(m), detuned.hypotheses(), m) <
                info_number(maximin_thresholds().stage2(m), detuned.hypotheses(), m));
    }
    const RiskEstimate bad = estimate_risk(detuned, s, 2000, 21);
    for (std::size_t m = 0; m < 3; ++m) CHECK(good.per_state[m].mean_n < bad.per_state[m].mean_n);
}

TEST_CASE("error_rate_slope") {
    SweepResult r;
    for (double c : {1e-2, 1e-3, 1e-4}) {
        SweepRow row;
        row.c = c;
        row.estimate.trials = 1000000;
        StateEstimate st;
        st.err_prob = 2.0 * c;
        st.errors = static_cast<std::size_t>(st.err_prob * 1e6);
        row.estimate.per_state.push_back(st);
        r.rows.push_back(row);
    }
    CHECK(error_rate_slope(r, 0) == doctest::Approx(1.0).epsilon(1e-12));
    // A zero cell enters at 3 / trials.
    r.rows[2].estimate.per_state[0].errors = 0;
    r.rows[2].estimate.per_state[0].err_prob = 0.0;
    const double x[3] = {std::log(1e-2), std::log(1e-3), std::log(1e-4)};
    const double y[3] = {std::log(2e-2), std::log(2e-3), std::log(3e-6)};
    const double mx = (x[0] + x[1] + x[2]) / 3, my = (y[0] + y[1] + y[2]) / 3;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    CHECK(error_rate_slope(r, 0) == doctest::Approx(sxy / sxx).epsilon(1e-12));
}
