#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tandem/error.hpp"
#include "tandem/models.hpp"

using namespace tandem;

namespace {

Scenario gaussian_triple() {
    return Scenario{gaussian_hypotheses({0.0, -1.0, 1.0}), zero_one_loss(3), uniform_prior(3), 1e-3};
}

CheckStatus status_of(const ValidationReport& r, const std::string& name) {
    const CheckResult* c = r.find(name);
    REQUIRE(c != nullptr);
    return c->status;
}

}  // namespace

TEST_CASE("gaussian density basics") {
    const Density d = Density::gaussian(1.0, 2.0);
    CHECK(d.family() == Family::kGaussian);
    CHECK(d.pdf(1.0) == doctest::Approx(oracle::normal_pdf(1.0, 1.0, 2.0)).epsilon(1e-14));
    CHECK(d.log_pdf(3.0) == doctest::Approx(std::log(oracle::normal_pdf(3.0, 1.0, 2.0))).epsilon(1e-13));
    CHECK(d.cdf(1.0) == doctest::Approx(0.5));
    CHECK(d.cdf(3.0) == doctest::Approx(oracle::normal_cdf(1.0)).epsilon(1e-14));
    CHECK(d.sf(3.0) == doctest::Approx(1.0 - oracle::normal_cdf(1.0)).epsilon(1e-13));
    CHECK(d.probability(-INFINITY, INFINITY) == 1.0);
    CHECK_THROWS_AS(Density::gaussian(0.0, 0.0), Error);
    CHECK_THROWS_AS(Density::gaussian(0.0, -1.0), Error);
    CHECK_THROWS_AS(Density::gaussian(NAN, 1.0), Error);
}

TEST_CASE("far upper tail keeps relative accuracy") {
    const Density d = Density::gaussian(0.0, 1.0);
    // 1 - Phi(10) = 7.619853024160527e-24
    CHECK(d.sf(10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-10));
}

TEST_CASE("quantile inverts cdf on a grid") {
    for (const Density& d : {Density::gaussian(0.0, 1.0), Density::gaussian(-3.0, 0.5)}) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double u = (i + 0.5) / 1000.0;
            worst = std::max(worst, std::abs(d.cdf(d.quantile(u)) - u));
        }
        CHECK(worst < 1e-9);
    }
    const Density f = Density::finite_alphabet({-1.0, 0.0, 2.0}, {0.2, 0.5, 0.3});
    CHECK(f.quantile(0.1) == -1.0);
    CHECK(f.quantile(0.2) == -1.0);  // smallest x with cdf(x) >= u
    CHECK(f.quantile(0.69) == 0.0);
    CHECK(f.quantile(0.71) == 2.0);
}

TEST_CASE("finite alphabet density") {
    const Density f = Density::finite_alphabet({0.0, 1.0, 3.0}, {0.25, 0.25, 0.5});
    CHECK(f.family() == Family::kFiniteAlphabet);
    CHECK(f.pdf(1.0) == 0.25);
    CHECK(f.pdf(2.0) == 0.0);
    CHECK(f.cdf(1.0) == 0.5);
    CHECK(f.cdf(-1.0) == 0.0);
    CHECK(f.probability(0.0, 3.0) == 0.25);  // open interval excludes the atoms at its ends
    CHECK_THROWS_AS(Density::finite_alphabet({0.0, 1.0}, {0.6, 0.6}), Error);
    CHECK_THROWS_AS(Density::finite_alphabet({1.0, 0.0}, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(Density::finite_alphabet({0.0, 1.0}, {1.2, -0.2}), Error);
}

TEST_CASE("sampling matches the law") {
    Rng rng(7);
    const Density g = Density::gaussian(2.0, 3.0);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = g.sample(rng);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean - 2.0) < 5 * 3.0 / std::sqrt(n));
    CHECK(std::abs(var - 9.0) < 0.15);
}

TEST_CASE("hypothesis set construction") {
    CHECK_THROWS_AS(HypothesisSet({Density::gaussian(0.0, 1.0)}), Error);
    CHECK_THROWS_AS(HypothesisSet({Density::gaussian(0.0, 1.0), Density::finite_alphabet({0.0}, {1.0})}), Error);
    const HypothesisSet h = gaussian_hypotheses({0.0, -1.0, 1.0});
    CHECK(h.size() == 3);
    CHECK(h.labels().size() == 3);
    const HypothesisSet f({Density::finite_alphabet({0.0, 2.0}, {0.5, 0.5}), Density::finite_alphabet({1.0, 2.0}, {0.5, 0.5})});
    CHECK(f.alphabet() == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("raw_kl") {
    const HypothesisSet h = gaussian_hypotheses({0.0, 1.0, 0.0});
    CHECK(raw_kl(h, 0, 0) == 0.0);
    CHECK(raw_kl(h, 0, 2) == 0.0);
    CHECK(raw_kl(h, 0, 1) == doctest::Approx(0.5).epsilon(1e-15));

    SUBCASE("matches quadrature for unequal variances") {
        const HypothesisSet g({Density::gaussian(0.0, 1.0), Density::gaussian(1.0, 2.0), Density::gaussian(-0.5, 0.7)});
        for (std::size_t m = 0; m < 3; ++m) {
            for (std::size_t l = 0; l < 3; ++l) {
                const auto* a = g[m].as_gaussian();
                const auto* b = g[l].as_gaussian();
                const double quad = oracle::simpson(
                    [&](double x) {
                        const double zm = (x - a->mean) / a->stdev, zl = (x - b->mean) / b->stdev;
                        const double log_ratio = std::log(b->stdev / a->stdev) - 0.5 * (zm * zm - zl * zl);
                        return oracle::normal_pdf(x, a->mean, a->stdev) * log_ratio;
                    },
                    a->mean - 15.0 * a->stdev, a->mean + 15.0 * a->stdev);
                CHECK(raw_kl(g, m, l) == doctest::Approx(quad).epsilon(1e-6));
                CHECK(raw_kl(g, m, l) >= 0.0);
            }
        }
    }

    SUBCASE("finite alphabet") {
        const HypothesisSet f({Density::finite_alphabet({0.0, 1.0}, {0.5, 0.5}),
                               Density::finite_alphabet({0.0, 1.0}, {0.25, 0.75}),
                               Density::finite_alphabet({0.0, 1.0, 2.0}, {0.5, 0.0, 0.5})});
        const double expect = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
        CHECK(raw_kl(f, 0, 1) == doctest::Approx(expect).epsilon(1e-14));
        try {
            raw_kl(f, 0, 2);
            FAIL("expected NonFinite");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kNonFinite);
        }
    }
    CHECK_THROWS_AS(raw_kl(h, 0, 5), Error);
}

TEST_CASE("validate_scenario") {
    SUBCASE("gaussian triple passes every check") {
        const auto r = validate_scenario(gaussian_triple());
        CHECK(r.ok());
        for (const auto& c : r.checks) CHECK_MESSAGE(c.status == CheckStatus::kPass, c.name);
    }
    SUBCASE("nonzero diagonal loss") {
        Scenario s = gaussian_triple();
        s.loss[0][0] = 1.0;
        const auto r = validate_scenario(s);
        CHECK_FALSE(r.ok());
        CHECK(status_of(r, "loss_diagonal_zero") == CheckStatus::kFail);
    }
    SUBCASE("zero off-diagonal loss") {
        Scenario s = gaussian_triple();
        s.loss[1][2] = 0.0;
        CHECK(status_of(validate_scenario(s), "loss_off_diagonal_positive") == CheckStatus::kFail);
    }
    SUBCASE("prior off the simplex") {
        Scenario s = gaussian_triple();
        s.prior = {0.5, 0.5, 0.1};
        const auto r = validate_scenario(s);
        CHECK_FALSE(r.ok());
        CHECK(status_of(r, "prior_simplex") == CheckStatus::kFail);
    }
    SUBCASE("zero prior mass only warns") {
        Scenario s = gaussian_triple();
        s.prior = {0.5, 0.5, 0.0};
        const auto r = validate_scenario(s);
        CHECK(r.ok());
        CHECK(status_of(r, "prior_full_support") == CheckStatus::kWarn);
    }
    SUBCASE("cost") {
        Scenario s = gaussian_triple();
        s.cost = 0.0;
        CHECK(status_of(validate_scenario(s), "cost_positive") == CheckStatus::kFail);
    }
    SUBCASE("shape mismatch") {
        Scenario s = gaussian_triple();
        s.prior = {0.5, 0.5};
        CHECK(status_of(validate_scenario(s), "shape") == CheckStatus::kFail);
    }
    SUBCASE("coinciding hypotheses fail regularity") {
        Scenario s{gaussian_hypotheses({0.0, 0.0, 1.0}), zero_one_loss(3), uniform_prior(3), 1e-3};
        CHECK(status_of(validate_scenario(s), "regularity_null_level_sets") == CheckStatus::kFail);
    }
    SUBCASE("support mismatch breaks finite divergence") {
        Scenario s{HypothesisSet({Density::finite_alphabet({0.0, 1.0}, {0.5, 0.5}),
                                  Density::finite_alphabet({0.0, 1.0}, {1.0, 0.0})}),
                   zero_one_loss(2), uniform_prior(2), 1e-3};
        const auto r = validate_scenario(s);
        CHECK_FALSE(r.ok());
        CHECK(status_of(r, "assumption1_finite_kl") == CheckStatus::kFail);
        CHECK(status_of(r, "regularity_null_level_sets") == CheckStatus::kWarn);
    }
    SUBCASE("report text names failures") {
        Scenario s = gaussian_triple();
        s.loss[0][0] = 1.0;
        const std::string text = validate_scenario(s).to_string();
        CHECK(text.find("loss_diagonal_zero") != std::string::npos);
    }
}

TEST_CASE("helpers") {
    const Matrix w = zero_one_loss(3);
    CHECK(w[0][0] == 0.0);
    CHECK(w[0][2] == 1.0);
    const auto p = uniform_prior(4);
    CHECK(p.size() == 4);
    CHECK(p[3] == 0.25);
}
