#pragma once

#include <cstddef>
#include <vector>

#include "tandem/models.hpp"
#include "tandem/quantizer.hpp"

namespace tandem {

/// Deterministic candidates for state m with divergences against every other
/// state: divergences[j][l] = I(m, other_states[l]; quantizers[j]).
struct CandidateSet {
    std::size_t state{0};
    std::vector<std::size_t> other_states;
    std::vector<DeterministicQuantizer> quantizers;
    Matrix divergences;

    std::size_t size() const noexcept { return quantizers.size(); }
};

struct GridConfig {
    // Points on the azimuth circle; each polar angle gets polar_points + 1
    // values on [0, pi].
    std::size_t azimuth_points{180};
    std::size_t polar_points{90};
    RootFindConfig root{};
    // Regions whose endpoints agree within this tolerance are merged.
    double dedupe_tolerance{1e-8};
    // 0 picks std::thread::hardware_concurrency().
    std::size_t threads{0};
};

struct RefineConfig {
    bool enabled{true};
    std::size_t max_iterations{50};
    double min_improvement{1e-6};
    double angle_tolerance{1e-10};
};

struct MaximinConfig {
    GridConfig grid{};
    RefineConfig refine{};
    double infinity_cap{1e6};
};

struct LpSolution {
    std::vector<double> weights;
    double value{0.0};
    // Optimum is 0: no mixture separates m from some other state.
    bool degenerate{false};
    bool perfect_separation{false};
    std::size_t pivots{0};
};

struct MaximinSolution {
    std::size_t state{0};
    RandomizedQuantizer quantizer;
    double value{0.0};
    std::vector<std::size_t> other_states;
    std::vector<double> pair_divergences;
    std::size_t candidate_count{0};
    std::size_t refinement_iterations{0};
    bool degenerate{false};
    bool perfect_separation{false};
};

/// maximize z s.t. sum_j p_j D(j, l) >= z for every column l, p on the simplex.
/// Dense tableau simplex with Bland's rule, so the basic optimum it returns has
/// at most D.front().size() nonzero weights and ties go to the smallest indices.
/// +inf entries are replaced by `cap`.
LpSolution solve_maximin_lp(const Matrix& divergences, double cap = 1e6);

CandidateSet make_candidate_set(std::size_t m, const HypothesisSet& h, std::vector<DeterministicQuantizer> quantizers);

/// ULQs on a hyperspherical angle grid, deduplicated by region. Gaussian only.
CandidateSet generate_candidates(std::size_t m, const HypothesisSet& h, const GridConfig& cfg = {});

LpSolution optimal_weights(const CandidateSet& cs, double cap = 1e6);

/// Grid candidates, LP over randomization weights, then golden-section
/// refinement of the support's coefficient angles.
MaximinSolution solve_maximin(std::size_t m, const HypothesisSet& h, const MaximinConfig& cfg = {});

/// Exact maximin over all 2^|X| subset quantizers of a finite alphabet (|X| <= 16).
MaximinSolution brute_force_maximin(std::size_t m, const HypothesisSet& h, double cap = 1e6);

/// solve_maximin for gaussian sets, brute_force_maximin for finite alphabets.
std::vector<MaximinSolution> solve_all_states(const HypothesisSet& h, const MaximinConfig& cfg = {});

}  // namespace tandem
