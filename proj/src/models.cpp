#include "tandem/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tandem/error.hpp"

namespace tandem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Acklam's rational approximation followed by one Halley step against erfc.
double std_normal_quantile(double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    if (p > 0.5) return -std_normal_quantile(1.0 - p);

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    double x;
    if (p < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    for (int it = 0; it < 2; ++it) {
        const double e = std_normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

}  // namespace

Density Density::gaussian(double mean, double stdev) {
    if (!std::isfinite(mean) || !std::isfinite(stdev) || stdev <= 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "gaussian needs a finite mean and stdev > 0");
    }
    return Density(Gaussian{mean, stdev});
}

Density Density::finite_alphabet(std::vector<double> points, std::vector<double> masses) {
    if (points.empty() || points.size() != masses.size()) {
        throw Error(ErrorCode::kInvalidArgument, "finite alphabet needs equally many points and masses");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i]) || (i > 0 && points[i] <= points[i - 1])) {
            throw Error(ErrorCode::kInvalidArgument, "alphabet points must be finite and strictly increasing");
        }
        if (!(masses[i] >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative mass");
    }
    const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-6) {
        throw Error(ErrorCode::kInvalidArgument, "alphabet masses must sum to 1");
    }
    for (double& w : masses) w /= total;
    return Density(FiniteAlphabet{std::move(points), std::move(masses)});
}

Family Density::family() const noexcept {
    return std::holds_alternative<Gaussian>(law_) ? Family::kGaussian : Family::kFiniteAlphabet;
}

double Density::pdf(double x) const {
    if (const auto* g = as_gaussian()) {
        const double z = (x - g->mean) / g->stdev;
        return std::exp(-0.5 * z * z) / (g->stdev * std::sqrt(2.0 * std::numbers::pi));
    }
    const auto& f = *as_finite();
    const auto it = std::lower_bound(f.points.begin(), f.points.end(), x);
    if (it == f.points.end() || *it != x) return 0.0;
    return f.masses[static_cast<std::size_t>(it - f.points.begin())];
}

double Density::log_pdf(double x) const {
    if (const auto* g = as_gaussian()) {
        const double z = (x - g->mean) / g->stdev;
        return -0.5 * z * z - std::log(g->stdev) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return std::log(pdf(x));
}

double Density::cdf(double x) const {
    if (const auto* g = as_gaussian()) return std_normal_cdf((x - g->mean) / g->stdev);
    const auto& f = *as_finite();
    const auto end = std::upper_bound(f.points.begin(), f.points.end(), x);
    const auto n = static_cast<std::size_t>(end - f.points.begin());
    return std::min(1.0, std::accumulate(f.masses.begin(), f.masses.begin() + static_cast<std::ptrdiff_t>(n), 0.0));
}

double Density::sf(double x) const {
    if (const auto* g = as_gaussian()) return std_normal_cdf(-(x - g->mean) / g->stdev);
    return std::max(0.0, 1.0 - cdf(x));
}

double Density::quantile(double u) const {
    if (const auto* g = as_gaussian()) return g->mean + g->stdev * std_normal_quantile(u);
    const auto& f = *as_finite();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        acc += f.masses[i];
        if (acc >= u && f.masses[i] > 0.0) return f.points[i];
    }
    return f.points.back();
}

double Density::probability(double lo, double hi) const {
    if (!(lo < hi)) return 0.0;
    if (const auto* g = as_gaussian()) {
        // Subtract on the side of the mean where the tail mass is small.
        const double p = lo >= g->mean ? sf(lo) - sf(hi) : cdf(hi) - cdf(lo);
        return std::clamp(p, 0.0, 1.0);
    }
    const auto& f = *as_finite();
    double p = 0.0;
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        if (f.points[i] > lo && f.points[i] < hi) p += f.masses[i];
    }
    return std::clamp(p, 0.0, 1.0);
}

double Density::sample(Rng& rng) const {
    double u = uniform01(rng);
    if (family() == Family::kGaussian) {
        while (u == 0.0) u = uniform01(rng);
    }
    return quantile(u);
}

HypothesisSet::HypothesisSet(std::vector<Density> densities, std::vector<std::string> labels)
    : densities_(std::move(densities)), labels_(std::move(labels)) {
    if (densities_.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two hypotheses");
    const Family fam = densities_.front().family();
    for (const auto& d : densities_) {
        if (d.family() != fam) throw Error(ErrorCode::kInvalidArgument, "hypotheses must share one family");
    }
    if (labels_.empty()) {
        for (std::size_t m = 0; m < densities_.size(); ++m) labels_.push_back("H" + std::to_string(m));
    }
    if (labels_.size() != densities_.size()) throw Error(ErrorCode::kInvalidArgument, "one label per hypothesis");

    // Normalization check by composite Simpson over mean +/- 12 stdev.
    for (const auto& d : densities_) {
        const auto* g = d.as_gaussian();
        if (!g) continue;
        const int n = 2000;
        const double lo = g->mean - 12.0 * g->stdev;
        const double step = 24.0 * g->stdev / n;
        double acc = d.pdf(lo) + d.pdf(lo + n * step);
        for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * d.pdf(lo + i * step);
        if (std::abs(acc * step / 3.0 - 1.0) > 1e-6) {
            throw Error(ErrorCode::kInvalidArgument, "density does not integrate to 1");
        }
    }
}

std::vector<double> HypothesisSet::alphabet() const {
    std::vector<double> pts;
    for (const auto& d : densities_) {
        if (const auto* f = d.as_finite()) pts.insert(pts.end(), f->points.begin(), f->points.end());
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

HypothesisSet gaussian_hypotheses(const std::vector<double>& means, double stdev) {
    std::vector<Density> ds;
    ds.reserve(means.size());
    for (double mu : means) ds.push_back(Density::gaussian(mu, stdev));
    return HypothesisSet(std::move(ds));
}

Matrix zero_one_loss(std::size_t m) {
    Matrix w(m, std::vector<double>(m, 1.0));
    for (std::size_t i = 0; i < m; ++i) w[i][i] = 0.0;
    return w;
}

std::vector<double> uniform_prior(std::size_t m) { return std::vector<double>(m, 1.0 / static_cast<double>(m)); }

double raw_kl(const HypothesisSet& h, std::size_t m, std::size_t m_prime) {
    if (m >= h.size() || m_prime >= h.size()) throw Error(ErrorCode::kInvalidArgument, "state index out of range");
    const Density& p = h[m];
    const Density& q = h[m_prime];
    if (const auto* gp = p.as_gaussian()) {
        const auto* gq = q.as_gaussian();
        const double dm = gp->mean - gq->mean;
        const double vp = gp->stdev * gp->stdev;
        const double vq = gq->stdev * gq->stdev;
        return std::max(0.0, std::log(gq->stdev / gp->stdev) + (vp + dm * dm) / (2.0 * vq) - 0.5);
    }
    const auto& fp = *p.as_finite();
    double acc = 0.0;
    for (std::size_t i = 0; i < fp.points.size(); ++i) {
        const double pm = fp.masses[i];
        if (pm == 0.0) continue;
        const double qm = q.pdf(fp.points[i]);
        if (qm == 0.0) {
            throw Error(ErrorCode::kNonFinite, "support of " + h.labels()[m] + " is not contained in that of " +
                                                   h.labels()[m_prime]);
        }
        acc += pm * std::log(pm / qm);
    }
    return std::max(0.0, acc);
}

bool ValidationReport::ok() const noexcept {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::kFail; });
}

const CheckResult* ValidationReport::find(const std::string& name) const noexcept {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        const char* tag = c.status == CheckStatus::kPass ? "PASS" : c.status == CheckStatus::kFail ? "FAIL" : "WARN";
        os << "[" << tag << "] " << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << "\n";
    }
    return os.str();
}

ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport report;
    const std::size_t m_count = s.size();
    auto add = [&](std::string name, bool pass, std::string detail) {
        report.checks.push_back({std::move(name), pass ? CheckStatus::kPass : CheckStatus::kFail, std::move(detail)});
    };

    bool shape_ok = s.loss.size() == m_count && s.prior.size() == m_count;
    for (const auto& row : s.loss) shape_ok = shape_ok && row.size() == m_count;
    add("shape", shape_ok, shape_ok ? "" : "loss must be MxM and prior length M with M = " + std::to_string(m_count));

    std::string kl_detail;
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t mp = 0; mp < m_count; ++mp) {
            if (m == mp) continue;
            try {
                const double v = raw_kl(s.hypotheses, m, mp);
                if (!std::isfinite(v)) kl_detail += "KL(" + std::to_string(m) + "," + std::to_string(mp) + ") infinite; ";
            } catch (const Error& e) {
                kl_detail += "KL(" + std::to_string(m) + "," + std::to_string(mp) + ") non-finite; ";
            }
        }
    }
    add("assumption1_finite_kl", kl_detail.empty(), kl_detail);

    if (shape_ok) {
        std::string diag, off;
        for (std::size_t m = 0; m < m_count; ++m) {
            for (std::size_t mp = 0; mp < m_count; ++mp) {
                const double w = s.loss[m][mp];
                if (m == mp && w != 0.0) diag += "W(" + std::to_string(m) + "," + std::to_string(m) + ")!=0; ";
                if (m != mp && !(w > 0.0 && std::isfinite(w))) {
                    off += "W(" + std::to_string(m) + "," + std::to_string(mp) + ") not positive; ";
                }
            }
        }
        add("loss_diagonal_zero", diag.empty(), diag);
        add("loss_off_diagonal_positive", off.empty(), off);

        double total = 0.0;
        bool nonneg = true, positive = true;
        for (double p : s.prior) {
            nonneg = nonneg && p >= 0.0;
            positive = positive && p > 0.0;
            total += p;
        }
        const bool simplex = nonneg && std::abs(total - 1.0) <= 1e-12;
        std::ostringstream os;
        os.precision(17);
        os << "sum = " << total;
        add("prior_simplex", simplex, simplex ? "" : os.str());
        report.checks.push_back({"prior_full_support", positive ? CheckStatus::kPass : CheckStatus::kWarn,
                                 positive ? "" : "some prior mass is zero; asymptotic optimality needs all > 0"});
    }

    add("cost_positive", s.cost > 0.0 && std::isfinite(s.cost), s.cost > 0.0 ? "" : "cost must be > 0");

    // A nontrivial combination of gaussians with pairwise distinct (mean, stdev)
    // has isolated zeros, so the level set {sum a_m f_m = 0} is null.
    if (s.hypotheses.family() == Family::kGaussian) {
        bool distinct = true;
        for (std::size_t i = 0; i < m_count; ++i) {
            for (std::size_t j = i + 1; j < m_count; ++j) {
                const auto* a = s.hypotheses[i].as_gaussian();
                const auto* b = s.hypotheses[j].as_gaussian();
                if (a->mean == b->mean && a->stdev == b->stdev) distinct = false;
            }
        }
        add("regularity_null_level_sets", distinct, distinct ? "" : "two hypotheses coincide");
    } else {
        report.checks.push_back({"regularity_null_level_sets", CheckStatus::kWarn,
                                 "unverifiable for atomic laws; use the brute-force maximin"});
    }
    return report;
}

}  // namespace tandem
