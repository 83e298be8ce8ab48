#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tandem/error.hpp"
#include "tandem/maximin.hpp"

using namespace tandem;

namespace {

HypothesisSet finite3(std::vector<double> points, std::vector<std::vector<double>> masses) {
    std::vector<Density> d;
    for (auto& m : masses) d.push_back(Density::finite_alphabet(points, std::move(m)));
    return HypothesisSet(std::move(d));
}

// Regression constants from an exact-rational enumeration of every subset
// with an independent LP solver.
struct FrozenFixture {
    HypothesisSet h;
    double values[3];
};

std::vector<FrozenFixture> frozen() {
    return {
        {finite3({0, 1, 2, 3}, {{0.4, 0.3, 0.2, 0.1}, {0.1, 0.2, 0.3, 0.4}, {0.25, 0.25, 0.25, 0.25}}),
         {0.08228287850505178, 0.08228287850505178, 0.08717669357238891}},
        {finite3({0, 1, 2, 3, 4}, {{0.1, 0.2, 0.4, 0.2, 0.1}, {0.3, 0.3, 0.2, 0.1, 0.1}, {0.1, 0.1, 0.2, 0.3, 0.3}}),
         {0.10608875335624351, 0.19204199316179815, 0.19204199316179815}},
        {finite3({0, 1, 2, 3, 4, 5},
                 {{0.05, 0.15, 0.3, 0.3, 0.15, 0.05}, {0.2, 0.2, 0.2, 0.2, 0.1, 0.1}, {0.3, 0.05, 0.15, 0.05, 0.15, 0.3}}),
         {0.13081203594113697, 0.15366358680379852, 0.2525893102283056}},
    };
}

std::size_t support(const MaximinSolution& s) {
    std::size_t n = 0;
    for (double w : s.quantizer.weights()) n += w > 0.0;
    return n;
}

}  // namespace

TEST_CASE("lp: symmetric crossing") {
    const LpSolution s = solve_maximin_lp({{0.4, 0.1}, {0.1, 0.4}});
    CHECK(s.value == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(s.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.weights[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_FALSE(s.degenerate);
}

TEST_CASE("lp: small cases") {
    const LpSolution one = solve_maximin_lp({{0.3, 0.7}});
    CHECK(one.weights == std::vector<double>{1.0});
    CHECK(one.value == doctest::Approx(0.3));

    const LpSolution col = solve_maximin_lp({{0.2}, {0.9}, {0.5}});
    CHECK(col.value == doctest::Approx(0.9));
    CHECK(col.weights[1] == doctest::Approx(1.0));

    const LpSolution zero = solve_maximin_lp({{0.0, 0.5}, {0.0, 0.2}});
    CHECK(zero.degenerate);
    CHECK(zero.value == 0.0);

    const LpSolution capped = solve_maximin_lp({{INFINITY, INFINITY}, {0.1, 0.2}});
    CHECK(capped.perfect_separation);
    CHECK(capped.value == doctest::Approx(1e6));

    CHECK_THROWS_AS(solve_maximin_lp({}), Error);
}

TEST_CASE("lp: ties go to the smallest index") {
    const LpSolution s = solve_maximin_lp({{0.1, 0.1}, {0.5, 0.5}, {0.5, 0.5}});
    CHECK(s.weights[1] == doctest::Approx(1.0));
    CHECK(s.weights[2] == 0.0);
}

TEST_CASE("lp: agrees with pair enumeration on random two-column matrices") {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t rows = 1 + static_cast<std::size_t>(uniform01(rng) * 12);
        Matrix d(rows, std::vector<double>(2));
        for (auto& r : d) {
            for (double& v : r) v = uniform01(rng) < 0.1 ? 0.0 : uniform01(rng);
        }
        const LpSolution s = solve_maximin_lp(d);
        CHECK(s.value == doctest::Approx(oracle::two_column_maximin(d)).epsilon(1e-10));
        std::size_t nz = 0;
        double total = 0.0;
        for (double w : s.weights) {
            CHECK(w >= 0.0);
            nz += w > 0.0;
            total += w;
        }
        CHECK(nz <= 2);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("lp: more columns, value from the weights") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix d(20, std::vector<double>(4));
        for (auto& r : d) {
            for (double& v : r) v = uniform01(rng);
        }
        const LpSolution s = solve_maximin_lp(d);
        double achieved = INFINITY;
        for (std::size_t l = 0; l < 4; ++l) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d.size(); ++j) acc += s.weights[j] * d[j][l];
            achieved = std::min(achieved, acc);
        }
        CHECK(achieved == doctest::Approx(s.value).epsilon(1e-10));
        // Never worse than the best pure row.
        double pure = 0.0;
        for (const auto& r : d) pure = std::max(pure, *std::min_element(r.begin(), r.end()));
        CHECK(s.value >= pure - 1e-12);
        std::size_t nz = 0;
        for (double w : s.weights) nz += w > 0.0;
        CHECK(nz <= 4);
    }
}

TEST_CASE("generate_candidates") {
    SUBCASE("two states give half-lines") {
        const HypothesisSet h = gaussian_hypotheses({0.0, 1.0});
        GridConfig cfg;
        cfg.azimuth_points = 64;
        const CandidateSet cs = generate_candidates(0, h, cfg);
        CHECK(cs.size() > 0);
        for (const auto& q : cs.quantizers) {
            const auto& iv = q.region()->intervals();
            REQUIRE(iv.size() == 1);
            // A half-line, or the whole line when the combination never changes sign.
            CHECK((std::isinf(iv[0].lo) || std::isinf(iv[0].hi)));
        }
        CHECK(cs.divergences.size() == cs.size());
        CHECK(cs.other_states == std::vector<std::size_t>{1});
    }
    SUBCASE("grid holding a ~ (0,-1,1) contains I(X > 0)") {
        const HypothesisSet h = gaussian_hypotheses({0.0, -1.0, 1.0});
        GridConfig cfg;
        cfg.azimuth_points = 16;  // 135 degrees is on the grid
        cfg.polar_points = 8;     // so is 90 degrees
        const CandidateSet cs = generate_candidates(0, h, cfg);
        bool found = false;
        for (const auto& q : cs.quantizers) {
            auto t = q.region()->lower_threshold();
            if (t && std::abs(*t) < 1e-9) found = true;
        }
        CHECK(found);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            for (std::size_t j = i + 1; j < cs.size(); ++j) {
                CHECK_FALSE(cs.quantizers[i].region()->approx_equal(*cs.quantizers[j].region(), 1e-8));
            }
        }
    }
    SUBCASE("scaled duplicates collapse") {
        const HypothesisSet h = gaussian_hypotheses({0.0, -1.0, 1.0});
        const auto q1 = ulq_quantizer(UlqCoefficients({0.0, -1.0, 1.0}), h);
        const auto q2 = ulq_quantizer(UlqCoefficients({0.0, -3.0, 3.0}), h);
        CHECK(q1.same_partition(q2, 1e-12));
    }
    SUBCASE("finite alphabets are rejected") {
        const HypothesisSet f = finite3({0, 1}, {{0.5, 0.5}, {0.2, 0.8}, {0.8, 0.2}});
        try {
            generate_candidates(0, f);
            FAIL("expected UnsupportedFamily");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kUnsupportedFamily);
        }
    }
}

TEST_CASE("solve_maximin on the gaussian triple") {
    const HypothesisSet h = gaussian_hypotheses({0.0, -1.0, 1.0});
    const auto sols = solve_all_states(h);
    REQUIRE(sols.size() == 3);
    const double expected_t[3] = {0.0, -0.7941, 0.7941};
    const double expected_v[3] = {0.3137, 0.3186, 0.3186};
    for (std::size_t m = 0; m < 3; ++m) {
        const auto& s = sols[m];
        CHECK(s.quantizer.is_deterministic());
        const auto t = s.quantizer.components()[0].region()->lower_threshold();
        REQUIRE(t.has_value());
        CHECK(std::abs(*t - expected_t[m]) < 0.005);
        CHECK(std::abs(s.value - expected_v[m]) < 0.001);
        CHECK(s.value == doctest::Approx(*std::min_element(s.pair_divergences.begin(), s.pair_divergences.end())));
        CHECK(support(s) <= 2);
        CHECK(s.value == doctest::Approx(info_number(s.quantizer, h, m)).epsilon(1e-12));
    }
    // Mirror symmetry.
    const double t1 = *sols[1].quantizer.components()[0].region()->lower_threshold();
    const double t2 = *sols[2].quantizer.components()[0].region()->lower_threshold();
    CHECK(std::abs(t1 + t2) < 1e-6);
    CHECK(std::abs(sols[1].value - sols[2].value) < 1e-6);
}

TEST_CASE("maximin value dominates every candidate") {
    const HypothesisSet h = gaussian_hypotheses({0.0, -1.0, 1.0});
    MaximinConfig cfg;
    cfg.grid.azimuth_points = 36;
    cfg.grid.polar_points = 18;
    const CandidateSet cs = generate_candidates(0, h, cfg.grid);
    const MaximinSolution s = solve_maximin(0, h, cfg);
    double best = 0.0;
    for (const auto& row : cs.divergences) best = std::max(best, *std::min_element(row.begin(), row.end()));
    CHECK(s.value >= best - 1e-12);
    // Adding candidates never lowers the LP value.
    CandidateSet half = cs;
    half.quantizers.erase(half.quantizers.begin() + static_cast<std::ptrdiff_t>(cs.size() / 2), half.quantizers.end());
    half.divergences.resize(cs.size() / 2);
    CHECK(optimal_weights(cs).value >= optimal_weights(half).value - 1e-12);
}

TEST_CASE("two states reduce to one threshold") {
    const HypothesisSet h = gaussian_hypotheses({0.0, 1.0});
    const MaximinSolution s = solve_maximin(0, h);
    REQUIRE(s.quantizer.is_deterministic());
    const auto t = s.quantizer.components()[0].region()->lower_threshold();
    REQUIRE(t.has_value());
    // 1-D oracle: golden-section on the closed-form threshold divergence.
    double lo = -3.0, hi = 4.0;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    while (hi - lo > 1e-12) {
        const double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
        if (oracle::threshold_kl(x1, 0.0, 1.0) < oracle::threshold_kl(x2, 0.0, 1.0)) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    CHECK(std::abs(*t - 0.5 * (lo + hi)) < 1e-3);
    CHECK(s.value == doctest::Approx(oracle::threshold_kl(0.5 * (lo + hi), 0.0, 1.0)).epsilon(1e-8));
}

TEST_CASE("brute force on finite-alphabet fixtures") {
    for (const auto& fx : frozen()) {
        for (std::size_t m = 0; m < 3; ++m) {
            const MaximinSolution s = brute_force_maximin(m, fx.h);
            CHECK(s.value == doctest::Approx(fx.values[m]).epsilon(1e-12));
            CHECK(support(s) <= 2);

            // Independent path: test-side divergences from the raw masses, pair-enumeration LP.
            const auto alphabet = fx.h.alphabet();
            Matrix d;
            std::vector<DeterministicQuantizer> qs;
            for (std::uint32_t mask = 0; mask < (1U << alphabet.size()); ++mask) {
                std::vector<double> ones(3, 0.0), zeros(3, 0.0);
                for (std::size_t k = 0; k < 3; ++k) {
                    const auto* f = fx.h[k].as_finite();
                    for (std::size_t i = 0; i < f->points.size(); ++i) {
                        ((mask >> i) & 1U ? ones[k] : zeros[k]) += f->masses[i];
                    }
                }
                std::vector<double> row;
                for (std::size_t l = 0; l < 3; ++l) {
                    if (l != m) row.push_back(oracle::bernoulli_kl_cells(ones[m], zeros[m], ones[l], zeros[l]));
                }
                d.push_back(row);
                qs.push_back(DeterministicQuantizer::from_subset(alphabet, mask));
            }
            CHECK(oracle::two_column_maximin(d) == doctest::Approx(s.value).epsilon(1e-10));
            CHECK(optimal_weights(make_candidate_set(m, fx.h, qs)).value == doctest::Approx(s.value).epsilon(1e-12));
        }
    }
}

TEST_CASE("brute force edge cases") {
    SUBCASE("single atom separates nothing") {
        const HypothesisSet h({Density::finite_alphabet({0.0}, {1.0}), Density::finite_alphabet({0.0}, {1.0})});
        const MaximinSolution s = brute_force_maximin(0, h);
        CHECK(s.value == 0.0);
        CHECK(s.degenerate);
    }
    SUBCASE("disjoint supports hit the cap") {
        const HypothesisSet h({Density::finite_alphabet({0.0, 1.0}, {1.0, 0.0}),
                               Density::finite_alphabet({0.0, 1.0}, {0.0, 1.0})});
        const MaximinSolution s = brute_force_maximin(0, h);
        CHECK(s.perfect_separation);
        CHECK(s.value == doctest::Approx(1e6));
    }
    SUBCASE("alphabet too large") {
        std::vector<double> pts(17), mass(17, 1.0 / 17.0);
        for (int i = 0; i < 17; ++i) pts[i] = i;
        const HypothesisSet h({Density::finite_alphabet(pts, mass), Density::finite_alphabet(pts, mass)});
        try {
            brute_force_maximin(0, h);
            FAIL("expected AlphabetTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kAlphabetTooLarge);
        }
    }
    SUBCASE("gaussian sets go to the grid solver") {
        CHECK_THROWS_AS(brute_force_maximin(0, gaussian_hypotheses({0.0, 1.0})), Error);
    }
}
