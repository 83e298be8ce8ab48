#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tandem/models.hpp"

namespace tandem {

/// Coefficient vector a of the quantizer I(sum_m a_m f_m(x) > 0).
///
/// Stored at unit Euclidean norm. Only positive rescaling is quotiented out:
/// a and -a are different quantizers (their regions are complementary).
class UlqCoefficients {
public:
    explicit UlqCoefficients(std::vector<double> a);

    /// Point on the unit sphere in R^{angles.size()+1} from hyperspherical
    /// angles; the last angle is the azimuth.
    static UlqCoefficients from_angles(std::span<const double> angles);

    const std::vector<double>& values() const noexcept { return a_; }
    std::size_t size() const noexcept { return a_.size(); }
    double operator[](std::size_t i) const { return a_.at(i); }
    UlqCoefficients negated() const;
    std::vector<double> angles() const;

    bool operator==(const UlqCoefficients&) const = default;

private:
    std::vector<double> a_;
};

// Open interval (lo, hi); endpoints may be +/-inf.
struct Interval {
    double lo;
    double hi;

    bool operator==(const Interval&) const = default;
};

/// Finite union of sorted, disjoint, non-empty open intervals.
class Region {
public:
    Region() = default;
    explicit Region(std::vector<Interval> intervals);

    static Region full();
    static Region above(double t);
    static Region below(double t);

    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    bool empty() const noexcept { return intervals_.empty(); }
    bool contains(double x) const;
    Region complement() const;
    // t when the region is exactly (t, +inf).
    std::optional<double> lower_threshold() const;
    bool approx_equal(const Region& other, double tol) const;

    bool operator==(const Region&) const = default;

private:
    std::vector<Interval> intervals_;
};

/// Subset of a finite alphabet, bit i set when alphabet[i] maps to 1.
struct AlphabetSubset {
    std::vector<double> alphabet;
    std::uint32_t mask{0};

    bool operator==(const AlphabetSubset&) const = default;
};

class DeterministicQuantizer {
public:
    static DeterministicQuantizer from_region(Region region, std::optional<UlqCoefficients> a = std::nullopt);
    static DeterministicQuantizer from_subset(std::vector<double> alphabet, std::uint32_t mask);
    /// I(X > t).
    static DeterministicQuantizer threshold(double t);

    int operator()(double x) const;

    const std::optional<UlqCoefficients>& coefficients() const noexcept { return a_; }
    const Region* region() const noexcept { return std::get_if<Region>(&rule_); }
    const AlphabetSubset* subset() const noexcept { return std::get_if<AlphabetSubset>(&rule_); }

    /// Same acceptance set (coefficients are ignored).
    bool same_partition(const DeterministicQuantizer& other, double tol = 0.0) const;

private:
    DeterministicQuantizer(std::variant<Region, AlphabetSubset> rule, std::optional<UlqCoefficients> a)
        : a_(std::move(a)), rule_(std::move(rule)) {}

    std::optional<UlqCoefficients> a_;
    std::variant<Region, AlphabetSubset> rule_;
};

/// Finite mixture sum_j p_j phi_j of deterministic quantizers.
class RandomizedQuantizer {
public:
    RandomizedQuantizer(std::vector<DeterministicQuantizer> components, std::vector<double> weights);
    RandomizedQuantizer(DeterministicQuantizer single);  // NOLINT(google-explicit-constructor)

    const std::vector<DeterministicQuantizer>& components() const noexcept { return components_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return components_.size(); }
    bool is_deterministic() const noexcept { return components_.size() == 1; }

private:
    std::vector<DeterministicQuantizer> components_;
    std::vector<double> weights_;
};

struct RootFindConfig {
    std::size_t grid_points{10000};
    double tolerance{1e-10};
    // Bracket is [min mean - span * max stdev, max mean + span * max stdev].
    double span_stdevs{10.0};
};

/// Sign-scan plus bisection solver for {x : sum_m a_m f_m(x) > 0}. Caches the
/// grid of normalized densities so many coefficient vectors can be scanned
/// against one hypothesis set cheaply.
class UlqScanner {
public:
    UlqScanner(const HypothesisSet& h, RootFindConfig cfg = {});

    /// Throws Error(kDegenerateRegion) when g <= 0 on the whole bracket.
    Region region(const UlqCoefficients& a) const;
    const RootFindConfig& config() const noexcept { return cfg_; }

private:
    bool positive_at(const UlqCoefficients& a, double x) const;

    const HypothesisSet* h_;
    RootFindConfig cfg_;
    std::vector<double> grid_;
    // weights_[i * M + m] = f_m(x_i) / max_k f_k(x_i)
    std::vector<double> weights_;
};

Region ulq_region(const UlqCoefficients& a, const HypothesisSet& h, const RootFindConfig& cfg = {});

DeterministicQuantizer ulq_quantizer(const UlqCoefficients& a, const HypothesisSet& h,
                                     const RootFindConfig& cfg = {});

int quantize(const DeterministicQuantizer& q, double x);

/// f_m(1; q) = P_m(q(X) = 1).
double induced_bernoulli(const DeterministicQuantizer& q, const HypothesisSet& h, std::size_t m);
std::vector<double> induced_bernoulli_all(const DeterministicQuantizer& q, const HypothesisSet& h);

/// K-L divergence of Bernoulli(p) from Bernoulli(q), 0 log 0 = 0; +inf on
/// absolute-continuity failure.
double bernoulli_kl(double p, double q);

double kl_pair(const DeterministicQuantizer& q, const HypothesisSet& h, std::size_t m, std::size_t m_prime);
double kl_pair(const RandomizedQuantizer& q, const HypothesisSet& h, std::size_t m, std::size_t m_prime);

/// min_{m' != m} kl_pair(q, m, m').
double info_number(const RandomizedQuantizer& q, const HypothesisSet& h, std::size_t m);

}  // namespace tandem
