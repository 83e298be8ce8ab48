#include "tandem/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "tandem/error.hpp"

namespace tandem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool endpoint_close(double x, double y, double tol) {
    if (std::isinf(x) || std::isinf(y)) return x == y;
    return std::abs(x - y) <= tol;
}

}  // namespace

// ---------------------------------------------------------------------------
// UlqCoefficients

UlqCoefficients::UlqCoefficients(std::vector<double> a) : a_(std::move(a)) {
    double norm2 = 0.0;
    for (double v : a_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "coefficients must be finite");
        norm2 += v * v;
    }
    if (a_.empty() || norm2 == 0.0) throw Error(ErrorCode::kInvalidArgument, "coefficients are all zero");
    const double norm = std::sqrt(norm2);
    for (double& v : a_) v /= norm;
}

UlqCoefficients UlqCoefficients::from_angles(std::span<const double> angles) {
    std::vector<double> a(angles.size() + 1);
    double s = 1.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        a[k] = s * std::cos(angles[k]);
        s *= std::sin(angles[k]);
    }
    a.back() = s;
    return UlqCoefficients(std::move(a));
}

UlqCoefficients UlqCoefficients::negated() const {
    std::vector<double> a = a_;
    for (double& v : a) v = -v;
    return UlqCoefficients(std::move(a));
}

std::vector<double> UlqCoefficients::angles() const {
    const std::size_t n = a_.size();
    std::vector<double> t(n - 1);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double tail = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) tail += a_[i] * a_[i];
        t[k] = std::atan2(std::sqrt(tail), a_[k]);
    }
    double phi = std::atan2(a_[n - 1], a_[n - 2]);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    t[n - 2] = phi;
    return t;
}

// ---------------------------------------------------------------------------
// Region

Region::Region(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto& iv = intervals_[i];
        if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi)) {
            throw Error(ErrorCode::kInvalidArgument, "region intervals must be non-empty");
        }
        if (i > 0 && !(intervals_[i - 1].hi <= iv.lo)) {
            throw Error(ErrorCode::kInvalidArgument, "region intervals must be sorted and disjoint");
        }
    }
}

Region Region::full() { return Region({{-kInf, kInf}}); }
Region Region::above(double t) { return Region({{t, kInf}}); }
Region Region::below(double t) { return Region({{-kInf, t}}); }

bool Region::contains(double x) const {
    // First interval whose upper end lies beyond x.
    const auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                                     [](double v, const Interval& iv) { return v < iv.hi; });
    return it != intervals_.end() && it->lo < x;
}

Region Region::complement() const {
    // Boundary points are dropped on both sides; they carry no mass in the
    // continuous families.
    std::vector<Interval> out;
    double cursor = -kInf;
    for (const auto& iv : intervals_) {
        if (cursor < iv.lo) out.push_back({cursor, iv.lo});
        cursor = iv.hi;
    }
    if (cursor < kInf) out.push_back({cursor, kInf});
    return Region(std::move(out));
}

std::optional<double> Region::lower_threshold() const {
    if (intervals_.size() == 1 && intervals_[0].hi == kInf && std::isfinite(intervals_[0].lo)) {
        return intervals_[0].lo;
    }
    return std::nullopt;
}

bool Region::approx_equal(const Region& other, double tol) const {
    if (intervals_.size() != other.intervals_.size()) return false;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (!endpoint_close(intervals_[i].lo, other.intervals_[i].lo, tol) ||
            !endpoint_close(intervals_[i].hi, other.intervals_[i].hi, tol)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// DeterministicQuantizer

DeterministicQuantizer DeterministicQuantizer::from_region(Region region, std::optional<UlqCoefficients> a) {
    return DeterministicQuantizer(std::move(region), std::move(a));
}

DeterministicQuantizer DeterministicQuantizer::from_subset(std::vector<double> alphabet, std::uint32_t mask) {
    if (alphabet.size() > 32) throw Error(ErrorCode::kAlphabetTooLarge, "bitmask quantizers hold at most 32 points");
    if (alphabet.size() < 32 && (mask >> alphabet.size()) != 0) {
        throw Error(ErrorCode::kInvalidArgument, "mask selects points outside the alphabet");
    }
    return DeterministicQuantizer(AlphabetSubset{std::move(alphabet), mask}, std::nullopt);
}

DeterministicQuantizer DeterministicQuantizer::threshold(double t) { return from_region(Region::above(t)); }

int DeterministicQuantizer::operator()(double x) const {
    if (const auto* r = region()) return r->contains(x) ? 1 : 0;
    const auto& s = *subset();
    const auto it = std::lower_bound(s.alphabet.begin(), s.alphabet.end(), x);
    if (it == s.alphabet.end() || *it != x) return 0;
    const auto i = static_cast<std::size_t>(it - s.alphabet.begin());
    return static_cast<int>((s.mask >> i) & 1U);
}

bool DeterministicQuantizer::same_partition(const DeterministicQuantizer& other, double tol) const {
    if (const auto* r = region()) {
        const auto* o = other.region();
        return o != nullptr && r->approx_equal(*o, tol);
    }
    const auto* o = other.subset();
    return o != nullptr && *subset() == *o;
}

// ---------------------------------------------------------------------------
// RandomizedQuantizer

RandomizedQuantizer::RandomizedQuantizer(std::vector<DeterministicQuantizer> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
    if (components_.empty() || components_.size() != weights_.size()) {
        throw Error(ErrorCode::kInvalidArgument, "need one weight per component");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::kInvalidArgument, "weights must sum to 1");
    for (std::size_t i = 0; i < components_.size(); ++i) {
        for (std::size_t j = i + 1; j < components_.size(); ++j) {
            if (components_[i].same_partition(components_[j])) {
                throw Error(ErrorCode::kInvalidArgument, "duplicate mixture component");
            }
        }
    }
}

RandomizedQuantizer::RandomizedQuantizer(DeterministicQuantizer single)
    : components_{std::move(single)}, weights_{1.0} {}

// ---------------------------------------------------------------------------
// ULQ regions

UlqScanner::UlqScanner(const HypothesisSet& h, RootFindConfig cfg) : h_(&h), cfg_(cfg) {
    if (h.family() != Family::kGaussian) {
        throw Error(ErrorCode::kUnsupportedFamily, "ULQ regions are computed for gaussian hypotheses only");
    }
    if (cfg_.grid_points < 2 || !(cfg_.tolerance > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "root-find config needs >= 2 grid points and tolerance > 0");
    }
    double lo = kInf, hi = -kInf, smax = 0.0;
    for (const auto& d : h.densities()) {
        const auto* g = d.as_gaussian();
        lo = std::min(lo, g->mean);
        hi = std::max(hi, g->mean);
        smax = std::max(smax, g->stdev);
    }
    lo -= cfg_.span_stdevs * smax;
    hi += cfg_.span_stdevs * smax;

    const std::size_t n = cfg_.grid_points;
    const std::size_t m_count = h.size();
    grid_.resize(n);
    weights_.resize(n * m_count);
    std::vector<double> logs(m_count);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        grid_[i] = x;
        double top = -kInf;
        for (std::size_t m = 0; m < m_count; ++m) {
            logs[m] = h[m].log_pdf(x);
            top = std::max(top, logs[m]);
        }
        for (std::size_t m = 0; m < m_count; ++m) weights_[i * m_count + m] = std::exp(logs[m] - top);
    }
}

bool UlqScanner::positive_at(const UlqCoefficients& a, double x) const {
    const std::size_t m_count = h_->size();
    double top = -kInf;
    std::vector<double> logs(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        logs[m] = (*h_)[m].log_pdf(x);
        top = std::max(top, logs[m]);
    }
    double g = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) g += a[m] * std::exp(logs[m] - top);
    return g > 0.0;
}

Region UlqScanner::region(const UlqCoefficients& a) const {
    const std::size_t m_count = h_->size();
    if (a.size() != m_count) throw Error(ErrorCode::kInvalidArgument, "coefficient length must equal M");
    const auto& av = a.values();
    auto positive_on_grid = [&](std::size_t i) {
        const double* w = &weights_[i * m_count];
        double g = 0.0;
        for (std::size_t m = 0; m < m_count; ++m) g += av[m] * w[m];
        return g > 0.0;
    };
    auto refine = [&](double left, double right, bool left_positive) {
        while (right - left > cfg_.tolerance) {
            const double mid = 0.5 * (left + right);
            if (mid <= left || mid >= right) break;
            if (positive_at(a, mid) == left_positive) {
                left = mid;
            } else {
                right = mid;
            }
        }
        return 0.5 * (left + right);
    };

    std::vector<Interval> out;
    bool prev = positive_on_grid(0);
    double open_at = prev ? -kInf : 0.0;
    bool any_positive = prev;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        const bool cur = positive_on_grid(i);
        if (cur == prev) continue;
        const double root = refine(grid_[i - 1], grid_[i], prev);
        if (cur) {
            open_at = root;
            any_positive = true;
        } else {
            out.push_back({open_at, root});
        }
        prev = cur;
    }
    if (prev) out.push_back({open_at, kInf});
    if (!any_positive) throw Error(ErrorCode::kDegenerateRegion, "sum a_m f_m(x) <= 0 on the whole bracket");
    return Region(std::move(out));
}

Region ulq_region(const UlqCoefficients& a, const HypothesisSet& h, const RootFindConfig& cfg) {
    return UlqScanner(h, cfg).region(a);
}

DeterministicQuantizer ulq_quantizer(const UlqCoefficients& a, const HypothesisSet& h, const RootFindConfig& cfg) {
    return DeterministicQuantizer::from_region(ulq_region(a, h, cfg), a);
}

int quantize(const DeterministicQuantizer& q, double x) { return q(x); }

// ---------------------------------------------------------------------------
// Induced laws and divergences

double induced_bernoulli(const DeterministicQuantizer& q, const HypothesisSet& h, std::size_t m) {
    const Density& d = h[m];
    double p = 0.0;
    if (const auto* r = q.region()) {
        for (const auto& iv : r->intervals()) p += d.probability(iv.lo, iv.hi);
    } else {
        // Sum both sides so a subset holding all (or none) of the mass gives
        // exactly 1 (or 0) rather than 1 - 1e-16.
        const auto& s = *q.subset();
        double zeros = 0.0;
        for (std::size_t i = 0; i < s.alphabet.size(); ++i) {
            ((s.mask >> i) & 1U ? p : zeros) += d.pdf(s.alphabet[i]);
        }
        if (p + zeros == 0.0) return 0.0;
        if (zeros == 0.0) return 1.0;
        p /= p + zeros;
    }
    return std::clamp(p, 0.0, 1.0);
}

std::vector<double> induced_bernoulli_all(const DeterministicQuantizer& q, const HypothesisSet& h) {
    std::vector<double> p(h.size());
    for (std::size_t m = 0; m < h.size(); ++m) p[m] = induced_bernoulli(q, h, m);
    return p;
}

double bernoulli_kl(double p, double q) {
    if (p == q) return 0.0;
    double kl = 0.0;
    if (p > 0.0) {
        if (q == 0.0) return kInf;
        kl += p * std::log(p / q);
    }
    if (p < 1.0) {
        if (q == 1.0) return kInf;
        kl += (1.0 - p) * std::log1p((q - p) / (1.0 - q));
    }
    return std::max(0.0, kl);
}

double kl_pair(const DeterministicQuantizer& q, const HypothesisSet& h, std::size_t m, std::size_t m_prime) {
    if (m == m_prime) throw Error(ErrorCode::kSameState, "kl_pair needs two distinct states");
    return bernoulli_kl(induced_bernoulli(q, h, m), induced_bernoulli(q, h, m_prime));
}

double kl_pair(const RandomizedQuantizer& q, const HypothesisSet& h, std::size_t m, std::size_t m_prime) {
    if (m == m_prime) throw Error(ErrorCode::kSameState, "kl_pair needs two distinct states");
    double acc = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (q.weights()[j] == 0.0) continue;
        acc += q.weights()[j] * kl_pair(q.components()[j], h, m, m_prime);
    }
    return acc;
}

double info_number(const RandomizedQuantizer& q, const HypothesisSet& h, std::size_t m) {
    double best = kInf;
    for (std::size_t mp = 0; mp < h.size(); ++mp) {
        if (mp != m) best = std::min(best, kl_pair(q, h, m, mp));
    }
    return best;
}

}  // namespace tandem
