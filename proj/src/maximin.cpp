#include "tandem/maximin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "tandem/error.hpp"
#include "parallel.hpp"

namespace tandem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEps = 1e-11;

using detail::parallel_for;

std::vector<std::size_t> others_of(std::size_t m, std::size_t m_count) {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < m_count; ++l) {
        if (l != m) out.push_back(l);
    }
    return out;
}

std::vector<double> divergence_row(const DeterministicQuantizer& q, const HypothesisSet& h, std::size_t m,
                                   const std::vector<std::size_t>& others) {
    const auto p = induced_bernoulli_all(q, h);
    std::vector<double> row(others.size());
    for (std::size_t l = 0; l < others.size(); ++l) row[l] = bernoulli_kl(p[m], p[others[l]]);
    return row;
}

bool region_less(const Region& a, const Region& b) {
    const auto& x = a.intervals();
    const auto& y = b.intervals();
    if (x.size() != y.size()) return x.size() < y.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].lo != y[i].lo) return x[i].lo < y[i].lo;
        if (x[i].hi != y[i].hi) return x[i].hi < y[i].hi;
    }
    return false;
}

// Decode flat grid index into hyperspherical angles (polar angles first).
std::vector<double> grid_angles(std::size_t index, std::size_t dims, const GridConfig& cfg) {
    std::vector<double> angles(dims);
    const std::size_t az = index % cfg.azimuth_points;
    index /= cfg.azimuth_points;
    angles[dims - 1] = 2.0 * std::numbers::pi * static_cast<double>(az) / static_cast<double>(cfg.azimuth_points);
    for (std::size_t k = dims - 1; k-- > 0;) {
        const std::size_t i = index % (cfg.polar_points + 1);
        index /= cfg.polar_points + 1;
        angles[k] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(cfg.polar_points);
    }
    return angles;
}

double row_value(const std::vector<double>& weights, const Matrix& d) {
    if (d.empty()) return 0.0;
    double value = kInf;
    for (std::size_t l = 0; l < d.front().size(); ++l) {
        double acc = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) acc += weights[j] * d[j][l];
        value = std::min(value, acc);
    }
    return value;
}

// Flip (-inf, t) components to (t, inf); Bernoulli divergences are invariant
// under relabeling the bit for both states. Components whose regions agree
// within `tol` are merged into the heavier one.
RandomizedQuantizer orient_half_lines(const RandomizedQuantizer& q, double tol) {
    std::vector<DeterministicQuantizer> comps;
    std::vector<double> weights;
    for (std::size_t j = 0; j < q.size(); ++j) {
        DeterministicQuantizer c = q.components()[j];
        if (const auto* r = c.region()) {
            const auto& iv = r->intervals();
            if (iv.size() == 1 && iv[0].lo == -kInf && std::isfinite(iv[0].hi)) {
                std::optional<UlqCoefficients> a;
                if (c.coefficients()) a = c.coefficients()->negated();
                c = DeterministicQuantizer::from_region(r->complement(), a);
            }
        }
        const auto dup = std::find_if(comps.begin(), comps.end(), [&](const DeterministicQuantizer& o) {
            if (o.same_partition(c)) return true;
            return o.region() && c.region() && o.region()->approx_equal(*c.region(), tol);
        });
        if (dup != comps.end()) {
            const auto k = static_cast<std::size_t>(dup - comps.begin());
            if (q.weights()[j] > weights[k]) comps[k] = std::move(c);
            weights[k] += q.weights()[j];
        } else {
            comps.push_back(std::move(c));
            weights.push_back(q.weights()[j]);
        }
    }
    return RandomizedQuantizer(std::move(comps), std::move(weights));
}

MaximinSolution finish_solution(std::size_t m, const HypothesisSet& h, RandomizedQuantizer q, std::size_t candidates,
                                std::size_t iterations, double cap) {
    MaximinSolution sol{m, std::move(q), 0.0, others_of(m, h.size()), {}, candidates, iterations, false, false};
    sol.value = kInf;
    for (std::size_t l : sol.other_states) {
        const double v = std::min(kl_pair(sol.quantizer, h, m, l), cap);
        sol.pair_divergences.push_back(v);
        sol.value = std::min(sol.value, v);
    }
    sol.degenerate = sol.value <= 0.0;
    sol.perfect_separation = sol.value >= cap * (1.0 - 1e-9);
    return sol;
}

}  // namespace

// ---------------------------------------------------------------------------
// LP

LpSolution solve_maximin_lp(const Matrix& divergences, double cap) {
    if (divergences.empty() || divergences.front().empty()) {
        throw Error(ErrorCode::kInvalidArgument, "maximin LP needs a non-empty divergence matrix");
    }
    const std::size_t n = divergences.size();
    const std::size_t cols = divergences.front().size();
    const std::size_t rows = cols + 1;
    // Variables: z, p_1..p_n, slacks s_0..s_cols.
    const std::size_t nv = 1 + n + rows;

    std::vector<double> t(rows * nv, 0.0);
    std::vector<double> rhs(rows, 0.0);
    std::vector<std::size_t> basis(rows);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * nv + c]; };

    for (std::size_t l = 0; l < cols; ++l) {
        at(l, 0) = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (divergences[j].size() != cols) throw Error(ErrorCode::kInvalidArgument, "ragged divergence matrix");
            double d = divergences[j][l];
            if (std::isnan(d) || d < 0.0) throw Error(ErrorCode::kInvalidArgument, "divergences must be >= 0");
            at(l, 1 + j) = -std::min(d, cap);
        }
    }
    for (std::size_t j = 0; j < n; ++j) at(cols, 1 + j) = 1.0;
    rhs[cols] = 1.0;
    for (std::size_t r = 0; r < rows; ++r) {
        at(r, 1 + n + r) = 1.0;
        basis[r] = 1 + n + r;
    }
    // Reduced costs for maximize z; obj_value tracks the current objective.
    std::vector<double> reduced(nv, 0.0);
    reduced[0] = 1.0;
    double obj_value = 0.0;

    LpSolution out;
    const std::size_t max_pivots = 100 * (nv + rows);
    while (true) {
        std::size_t enter = nv;
        for (std::size_t c = 0; c < nv; ++c) {
            if (reduced[c] > kPivotEps) {
                enter = c;
                break;
            }
        }
        if (enter == nv) break;

        std::size_t leave = rows;
        double best_ratio = kInf;
        for (std::size_t r = 0; r < rows; ++r) {
            const double a = at(r, enter);
            if (a <= kPivotEps) continue;
            const double ratio = rhs[r] / a;
            if (ratio < best_ratio - 1e-14 ||
                (std::abs(ratio - best_ratio) <= 1e-14 && leave < rows && basis[r] < basis[leave])) {
                best_ratio = std::min(ratio, best_ratio);
                leave = r;
            }
        }
        // z is bounded by the cap, so the LP is never unbounded.
        if (leave == rows) throw Error(ErrorCode::kInvalidArgument, "maximin LP unbounded");

        const double piv = at(leave, enter);
        for (std::size_t c = 0; c < nv; ++c) at(leave, c) /= piv;
        rhs[leave] /= piv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == leave) continue;
            const double f = at(r, enter);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < nv; ++c) at(r, c) -= f * at(leave, c);
            rhs[r] -= f * rhs[leave];
        }
        const double f = reduced[enter];
        for (std::size_t c = 0; c < nv; ++c) reduced[c] -= f * at(leave, c);
        obj_value += f * rhs[leave];
        basis[leave] = enter;
        if (++out.pivots > max_pivots) throw Error(ErrorCode::kInvalidArgument, "maximin LP pivot limit reached");
    }

    Matrix d(n, std::vector<double>(cols));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = 0; l < cols; ++l) d[j][l] = std::min(divergences[j][l], cap);
    }

    out.weights.assign(n, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        if (basis[r] >= 1 && basis[r] <= n) out.weights[basis[r] - 1] = std::max(0.0, rhs[r]);
    }
    double total = 0.0;
    for (double& w : out.weights) {
        if (w < 1e-13) w = 0.0;
        total += w;
    }
    if (obj_value <= 1e-14 || total <= 0.0) {
        // Every mixture has value 0 in some column; report the best single row.
        std::size_t best = 0;
        double best_min = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = *std::min_element(d[j].begin(), d[j].end());
            if (v > best_min) {
                best_min = v;
                best = j;
            }
        }
        out.weights.assign(n, 0.0);
        out.weights[best] = 1.0;
    } else {
        for (double& w : out.weights) w /= total;
    }
    out.value = row_value(out.weights, d);
    out.degenerate = out.value <= 1e-14;
    out.perfect_separation = out.value >= cap * (1.0 - 1e-9);
    return out;
}

// ---------------------------------------------------------------------------
// Candidates

CandidateSet make_candidate_set(std::size_t m, const HypothesisSet& h, std::vector<DeterministicQuantizer> quantizers) {
    if (m >= h.size()) throw Error(ErrorCode::kInvalidArgument, "state index out of range");
    CandidateSet cs;
    cs.state = m;
    cs.other_states = others_of(m, h.size());
    cs.quantizers = std::move(quantizers);
    cs.divergences.reserve(cs.quantizers.size());
    for (const auto& q : cs.quantizers) cs.divergences.push_back(divergence_row(q, h, m, cs.other_states));
    return cs;
}

CandidateSet generate_candidates(std::size_t m, const HypothesisSet& h, const GridConfig& cfg) {
    if (h.family() != Family::kGaussian) {
        throw Error(ErrorCode::kUnsupportedFamily, "grid candidates need gaussian hypotheses; use brute_force_maximin");
    }
    if (m >= h.size()) throw Error(ErrorCode::kInvalidArgument, "state index out of range");
    if (cfg.azimuth_points < 4 || cfg.polar_points < 2) {
        throw Error(ErrorCode::kInvalidArgument, "candidate grid too coarse");
    }
    const std::size_t dims = h.size() - 1;
    std::size_t total = cfg.azimuth_points;
    for (std::size_t k = 0; k + 1 < dims; ++k) total *= cfg.polar_points + 1;

    const UlqScanner scanner(h, cfg.root);
    std::vector<std::optional<DeterministicQuantizer>> found(total);
    parallel_for(total, cfg.threads, [&](std::size_t i) {
        const auto angles = grid_angles(i, dims, cfg);
        const auto a = UlqCoefficients::from_angles(angles);
        try {
            found[i] = DeterministicQuantizer::from_region(scanner.region(a), a);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kDegenerateRegion) throw;
        }
    });

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < total; ++i) {
        if (found[i]) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return region_less(*found[x]->region(), *found[y]->region());
    });
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < order.size();) {
        const Region& rep = *found[order[k]]->region();
        std::size_t smallest = order[k];
        std::size_t e = k + 1;
        while (e < order.size() && found[order[e]]->region()->approx_equal(rep, cfg.dedupe_tolerance)) {
            smallest = std::min(smallest, order[e]);
            ++e;
        }
        keep.push_back(smallest);
        k = e;
    }
    std::sort(keep.begin(), keep.end());

    std::vector<DeterministicQuantizer> qs;
    qs.reserve(keep.size());
    for (std::size_t i : keep) qs.push_back(std::move(*found[i]));

    CandidateSet cs;
    cs.state = m;
    cs.other_states = others_of(m, h.size());
    cs.divergences.resize(qs.size());
    parallel_for(qs.size(), cfg.threads,
                 [&](std::size_t j) { cs.divergences[j] = divergence_row(qs[j], h, m, cs.other_states); });
    cs.quantizers = std::move(qs);
    return cs;
}

LpSolution optimal_weights(const CandidateSet& cs, double cap) {
    if (cs.quantizers.empty()) throw Error(ErrorCode::kInvalidArgument, "empty candidate set");
    return solve_maximin_lp(cs.divergences, cap);
}

// ---------------------------------------------------------------------------
// Solvers

MaximinSolution solve_maximin(std::size_t m, const HypothesisSet& h, const MaximinConfig& cfg) {
    const CandidateSet cs = generate_candidates(m, h, cfg.grid);
    if (cs.quantizers.empty()) throw Error(ErrorCode::kDegenerateRegion, "no non-constant candidate on the grid");
    const LpSolution lp = optimal_weights(cs, cfg.infinity_cap);

    // Pool holds the current support: quantizers with their divergence rows.
    std::vector<DeterministicQuantizer> pool;
    Matrix pool_rows;
    std::vector<double> pool_weights;
    for (std::size_t j = 0; j < cs.size(); ++j) {
        if (lp.weights[j] > 0.0) {
            pool.push_back(cs.quantizers[j]);
            pool_rows.push_back(cs.divergences[j]);
            pool_weights.push_back(lp.weights[j]);
        }
    }
    double value = lp.value;

    std::size_t iterations = 0;
    if (cfg.refine.enabled && !lp.perfect_separation) {
        const UlqScanner scanner(h, cfg.grid.root);
        const std::size_t dims = h.size() - 1;
        const double polar_step = std::numbers::pi / static_cast<double>(cfg.grid.polar_points);
        const double azimuth_step = 2.0 * std::numbers::pi / static_cast<double>(cfg.grid.azimuth_points);
        const std::vector<std::size_t> others = others_of(m, h.size());

        struct Probe {
            double value;
            std::optional<DeterministicQuantizer> q;
            std::vector<double> row;
        };
        // LP value with pool member `slot` replaced by the ULQ at `angles`.
        auto probe = [&](const std::vector<double>& angles, std::size_t slot) -> Probe {
            const auto a = UlqCoefficients::from_angles(angles);
            try {
                auto q = DeterministicQuantizer::from_region(scanner.region(a), a);
                auto row = divergence_row(q, h, m, others);
                Matrix rows = pool_rows;
                rows[slot] = row;
                return {solve_maximin_lp(rows, cfg.infinity_cap).value, std::move(q), std::move(row)};
            } catch (const Error& e) {
                if (e.code() != ErrorCode::kDegenerateRegion) throw;
                return {-1.0, std::nullopt, {}};
            }
        };

        for (iterations = 1; iterations <= cfg.refine.max_iterations; ++iterations) {
            const double start = value;
            for (std::size_t s = 0; s < pool.size(); ++s) {
                for (std::size_t k = 0; k < dims && s < pool.size(); ++k) {
                    if (!pool[s].coefficients()) break;
                    std::vector<double> angles = pool[s].coefficients()->angles();
                    const double step = k + 1 == dims ? azimuth_step : polar_step;
                    const double centre = angles[k];
                    auto eval = [&](double x) {
                        angles[k] = x;
                        return probe(angles, s);
                    };
                    // Golden-section search on [centre - step, centre + step].
                    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
                    double lo = centre - step, hi = centre + step;
                    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
                    Probe p1 = eval(x1), p2 = eval(x2);
                    Probe best = p1.value >= p2.value ? p1 : p2;
                    while (hi - lo > cfg.refine.angle_tolerance) {
                        if (p1.value < p2.value) {
                            lo = x1;
                            x1 = x2;
                            p1 = std::move(p2);
                            x2 = lo + ratio * (hi - lo);
                            p2 = eval(x2);
                            if (p2.value > best.value) best = p2;
                        } else {
                            hi = x2;
                            x2 = x1;
                            p2 = std::move(p1);
                            x1 = hi - ratio * (hi - lo);
                            p1 = eval(x1);
                            if (p1.value > best.value) best = p1;
                        }
                    }
                    if (!best.q || !(best.value > value)) continue;

                    pool[s] = std::move(*best.q);
                    pool_rows[s] = std::move(best.row);
                    const LpSolution re = solve_maximin_lp(pool_rows, cfg.infinity_cap);
                    std::vector<DeterministicQuantizer> next;
                    Matrix next_rows;
                    std::vector<double> next_weights;
                    for (std::size_t j = 0; j < pool.size(); ++j) {
                        if (re.weights[j] > 0.0) {
                            next.push_back(pool[j]);
                            next_rows.push_back(pool_rows[j]);
                            next_weights.push_back(re.weights[j]);
                        }
                    }
                    const bool shrunk = next.size() != pool.size();
                    pool = std::move(next);
                    pool_rows = std::move(next_rows);
                    pool_weights = std::move(next_weights);
                    value = re.value;
                    if (shrunk) s = pool.size();
                }
            }
            if (value - start < cfg.refine.min_improvement) break;
        }
        iterations = std::min(iterations, cfg.refine.max_iterations);
    }

    if (pool.size() > h.size() - 1) {
        throw Error(ErrorCode::kInvalidArgument, "basic solution support exceeds M-1");
    }
    RandomizedQuantizer q = orient_half_lines(RandomizedQuantizer(std::move(pool), std::move(pool_weights)),
                                              cfg.grid.dedupe_tolerance);
    return finish_solution(m, h, std::move(q), cs.size(), iterations, cfg.infinity_cap);
}

MaximinSolution brute_force_maximin(std::size_t m, const HypothesisSet& h, double cap) {
    if (h.family() != Family::kFiniteAlphabet) {
        throw Error(ErrorCode::kUnsupportedFamily, "brute-force maximin enumerates finite alphabets only");
    }
    const auto alphabet = h.alphabet();
    if (alphabet.size() > 16) {
        throw Error(ErrorCode::kAlphabetTooLarge, "alphabet has " + std::to_string(alphabet.size()) + " > 16 points");
    }
    const std::uint32_t count = 1U << alphabet.size();
    std::vector<DeterministicQuantizer> qs;
    qs.reserve(count);
    for (std::uint32_t mask = 0; mask < count; ++mask) qs.push_back(DeterministicQuantizer::from_subset(alphabet, mask));
    const CandidateSet cs = make_candidate_set(m, h, std::move(qs));
    const LpSolution lp = optimal_weights(cs, cap);

    std::vector<DeterministicQuantizer> comps;
    std::vector<double> weights;
    for (std::size_t j = 0; j < cs.size(); ++j) {
        if (lp.weights[j] > 0.0) {
            comps.push_back(cs.quantizers[j]);
            weights.push_back(lp.weights[j]);
        }
    }
    MaximinSolution sol =
        finish_solution(m, h, RandomizedQuantizer(std::move(comps), std::move(weights)), cs.size(), 0, cap);
    return sol;
}

std::vector<MaximinSolution> solve_all_states(const HypothesisSet& h, const MaximinConfig& cfg) {
    std::vector<MaximinSolution> out;
    for (std::size_t m = 0; m < h.size(); ++m) {
        out.push_back(h.family() == Family::kGaussian ? solve_maximin(m, h, cfg)
                                                      : brute_force_maximin(m, h, cfg.infinity_cap));
    }
    return out;
}

}  // namespace tandem
