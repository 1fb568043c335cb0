#include "gausspurify/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "gausspurify/error.hpp"

namespace gausspurify {

namespace {

constexpr long kLogFactorialTableSize = 2048;

const std::array<double, kLogFactorialTableSize>& log_factorial_table() {
    static const auto table = [] {
        std::array<double, kLogFactorialTableSize> t{};
        long double acc = 0.0L;
        t[0] = 0.0;
        for (long i = 1; i < kLogFactorialTableSize; ++i) {
            acc += std::log(static_cast<long double>(i));
            t[static_cast<std::size_t>(i)] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

}  // namespace

double log_factorial(long n) {
    if (n < 0) throw DomainError("log_factorial: negative argument");
    if (n < kLogFactorialTableSize) return log_factorial_table()[static_cast<std::size_t>(n)];
    return boost::math::lgamma(static_cast<double>(n) + 1.0);
}

double log_choose(long n, long k) {
    if (k < 0 || n < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double compensated_sum(std::span<const double> xs) noexcept {
    double sum = 0.0;
    double c = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

ThermalParam::ThermalParam(double s) : s_(s) {
    if (!(s >= 0.0 && s < 1.0)) throw DomainError("thermal parameter s must lie in [0, 1)");
}

ThermalParam ThermalParam::from_mean_photon_number(double nbar) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("mean photon number must be finite and >= 0");
    return ThermalParam(nbar / (1.0 + nbar));
}

ComplexAmplitude::ComplexAmplitude(double re_, double im_) : re(re_), im(im_) {
    if (!std::isfinite(re) || !std::isfinite(im)) throw DomainError("displacement amplitude must be finite");
}

DiagonalFockState::DiagonalFockState(std::vector<double> probs, double tail_bound)
    : probs_(std::move(probs)), tail_bound_(tail_bound) {
    if (probs_.empty()) throw DomainError("DiagonalFockState needs at least one population");
    if (!(tail_bound_ >= 0.0) || !std::isfinite(tail_bound_)) throw DomainError("tail bound must be finite and >= 0");
    for (double p : probs_)
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("populations must be finite and nonnegative");
    const double total = mass();
    if (total > 1.0 + kMassSlack) throw DomainError("populations sum above 1");
    if (total + tail_bound_ < 1.0 - kMassSlack) throw DomainError("populations plus tail bound fall short of 1");
}

DiagonalFockState DiagonalFockState::vacuum(int cutoff) { return fock(0, cutoff); }

DiagonalFockState DiagonalFockState::fock(int n, int cutoff) {
    if (n < 0 || cutoff < n) throw DomainError("Fock level must satisfy 0 <= n <= cutoff");
    std::vector<double> p(static_cast<std::size_t>(cutoff) + 1, 0.0);
    p[static_cast<std::size_t>(n)] = 1.0;
    return DiagonalFockState(std::move(p), 0.0);
}

double DiagonalFockState::mass() const noexcept { return compensated_sum(probs_); }

double DiagonalFockState::mean_photon_number() const noexcept {
    std::vector<double> terms(probs_.size());
    for (std::size_t n = 0; n < probs_.size(); ++n) terms[n] = static_cast<double>(n) * probs_[n];
    return compensated_sum(terms);
}

std::vector<double> DiagonalFockState::partial_sums() const {
    std::vector<double> out(probs_.size());
    double sum = 0.0;
    double c = 0.0;
    for (std::size_t n = 0; n < probs_.size(); ++n) {
        const double y = probs_[n] - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
        out[n] = sum;
    }
    return out;
}

DiagonalFockState DiagonalFockState::with_cutoff(int cutoff) const {
    if (cutoff < 0) throw DomainError("cutoff must be >= 0");
    std::vector<double> p(static_cast<std::size_t>(cutoff) + 1, 0.0);
    const std::size_t keep = std::min(p.size(), probs_.size());
    std::copy_n(probs_.begin(), keep, p.begin());
    double dropped = 0.0;
    if (probs_.size() > keep) dropped = compensated_sum(std::span<const double>(probs_).subspan(keep));
    return DiagonalFockState(std::move(p), tail_bound_ + dropped);
}

DiagonalFockState thermal_state(ThermalParam s, int cutoff) {
    if (cutoff < 0) throw DomainError("cutoff must be >= 0");
    const double sv = s.value();
    std::vector<double> p(static_cast<std::size_t>(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n) p[static_cast<std::size_t>(n)] = (1.0 - sv) * std::pow(sv, n);
    return DiagonalFockState(std::move(p), std::pow(sv, cutoff + 1));
}

int thermal_cutoff(double s, double tol) {
    if (!(s >= 0.0 && s < 1.0)) throw DomainError("thermal parameter s must lie in [0, 1)");
    if (!(tol > 0.0 && tol < 1.0)) throw DomainError("tolerance must lie in (0, 1)");
    if (s == 0.0) return 0;
    // s^(N+1) < tol  <=>  N + 1 > log(tol) / log(s)
    int n = static_cast<int>(std::floor(std::log(tol) / std::log(s)));
    while (std::pow(s, n + 1) >= tol) ++n;
    return std::max(n, 0);
}

CertifiedDistance l1_distance(const DiagonalFockState& p, const DiagonalFockState& q) {
    const int cutoff = std::max(p.cutoff(), q.cutoff());
    std::vector<double> diffs(static_cast<std::size_t>(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n) diffs[static_cast<std::size_t>(n)] = std::abs(p[n] - q[n]);
    return {compensated_sum(diffs), p.tail_bound() + q.tail_bound()};
}

namespace {

// L_n^(a)(x) returned as mantissa * exp(log_scale), with the three-term
// recurrence rescaled whenever the iterate grows large.
struct ScaledValue {
    double mantissa;
    double log_scale;
};

ScaledValue scaled_laguerre(int n, int a, double x) {
    double prev = 1.0;
    if (n == 0) return {prev, 0.0};
    double cur = 1.0 + a - x;
    double log_scale = 0.0;
    constexpr double kRescale = 1e150;
    for (int i = 1; i < n; ++i) {
        const double next = ((2.0 * i + 1.0 + a - x) * cur - (i + a) * prev) / (i + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += std::log(kRescale);
        }
    }
    return {cur, log_scale};
}

}  // namespace

std::complex<double> displacement_matrix_element(int m, int n, ComplexAmplitude alpha) {
    if (m < 0 || n < 0) throw DomainError("Fock indices must be >= 0");
    const double x = alpha.norm_squared();
    if (x == 0.0) return m == n ? 1.0 : 0.0;

    const bool lower = m >= n;
    const int lo = lower ? n : m;
    const int hi = lower ? m : n;
    const int d = hi - lo;

    const auto lag = scaled_laguerre(lo, d, x);
    if (lag.mantissa == 0.0) return 0.0;

    const double r = std::sqrt(x);
    const double log_mag = 0.5 * (log_factorial(lo) - log_factorial(hi)) + d * std::log(r) - 0.5 * x +
                           lag.log_scale + std::log(std::abs(lag.mantissa));
    // alpha^d for m >= n, (-conj(alpha))^d otherwise
    const double phi = std::atan2(alpha.im, alpha.re);
    double phase = lower ? d * phi : d * (std::numbers::pi - phi);
    if (lag.mantissa < 0.0) phase += std::numbers::pi;
    return std::polar(std::exp(log_mag), phase);
}

}  // namespace gausspurify
