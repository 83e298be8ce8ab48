#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "tandem/random.hpp"

namespace tandem {

using Matrix = std::vector<std::vector<double>>;

enum class Family { kGaussian, kFiniteAlphabet };

struct Gaussian {
    double mean{0.0};
    double stdev{1.0};
};

// Points strictly increasing; masses on the simplex.
struct FiniteAlphabet {
    std::vector<double> points;
    std::vector<double> masses;
};

/// Univariate observation law: a gaussian density or a pmf on finitely many points.
class Density {
public:
    static Density gaussian(double mean, double stdev);
    static Density finite_alphabet(std::vector<double> points, std::vector<double> masses);

    Family family() const noexcept;
    const Gaussian* as_gaussian() const noexcept { return std::get_if<Gaussian>(&law_); }
    const FiniteAlphabet* as_finite() const noexcept { return std::get_if<FiniteAlphabet>(&law_); }

    // Density for the gaussian family, mass for finite alphabets.
    double pdf(double x) const;
    double log_pdf(double x) const;
    double cdf(double x) const;
    // P(X > x), accurate in the upper tail.
    double sf(double x) const;
    // Right-inverse of cdf on (0, 1).
    double quantile(double u) const;
    // P(lo < X < hi); endpoints may be infinite.
    double probability(double lo, double hi) const;
    double sample(Rng& rng) const;

private:
    explicit Density(std::variant<Gaussian, FiniteAlphabet> law) : law_(std::move(law)) {}

    std::variant<Gaussian, FiniteAlphabet> law_;
};

/// The M candidate laws H_0..H_{M-1} for the raw observations.
class HypothesisSet {
public:
    HypothesisSet(std::vector<Density> densities, std::vector<std::string> labels = {});

    std::size_t size() const noexcept { return densities_.size(); }
    const Density& operator[](std::size_t m) const { return densities_.at(m); }
    const std::vector<Density>& densities() const noexcept { return densities_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    Family family() const noexcept { return densities_.front().family(); }

    // Sorted union of all atoms (finite-alphabet sets only).
    std::vector<double> alphabet() const;

private:
    std::vector<Density> densities_;
    std::vector<std::string> labels_;
};

HypothesisSet gaussian_hypotheses(const std::vector<double>& means, double stdev = 1.0);

struct Scenario {
    HypothesisSet hypotheses;
    Matrix loss;                // loss[m][m'] = W(m, m'), true state m, decision m'
    std::vector<double> prior;
    double cost{1e-3};

    std::size_t size() const noexcept { return hypotheses.size(); }
};

Matrix zero_one_loss(std::size_t m);
std::vector<double> uniform_prior(std::size_t m);

/// E_m[log f_m / f_m'] in nats. Throws Error(kNonFinite) on divergence.
double raw_kl(const HypothesisSet& h, std::size_t m, std::size_t m_prime);

enum class CheckStatus { kPass, kFail, kWarn };

struct CheckResult {
    std::string name;
    CheckStatus status{CheckStatus::kPass};
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool ok() const noexcept;
    const CheckResult* find(const std::string& name) const noexcept;
    std::string to_string() const;
};

ValidationReport validate_scenario(const Scenario& s);

}  // namespace tandem
