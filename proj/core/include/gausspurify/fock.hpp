#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gausspurify {

/// Purity parameter s of the thermal state (1-s) sum_n s^n |n><n|.
/// s = 0 is the vacuum; s -> 1 is infinitely hot.
class ThermalParam {
public:
    /// Throws DomainError unless 0 <= s < 1.
    explicit ThermalParam(double s);

    double value() const noexcept { return s_; }
    /// s / (1 - s)
    double mean_photon_number() const noexcept { return s_ / (1.0 - s_); }

    /// Inverse of mean_photon_number(): n / (1 + n).
    static ThermalParam from_mean_photon_number(double nbar);

private:
    double s_;
};

/// Displacement amplitude alpha of a Weyl operator exp(alpha a^+ - conj(alpha) a).
struct ComplexAmplitude {
    double re = 0.0;
    double im = 0.0;

    ComplexAmplitude() = default;
    ComplexAmplitude(double re_, double im_);  // throws DomainError on non-finite input
    explicit ComplexAmplitude(std::complex<double> z) : ComplexAmplitude(z.real(), z.imag()) {}

    std::complex<double> value() const noexcept { return {re, im}; }
    double norm_squared() const noexcept { return re * re + im * im; }
};

/// Photon-number distribution of a phase-invariant single-mode state,
/// truncated at a cutoff, together with a certified bound on the omitted mass.
class DiagonalFockState {
public:
    /// Slack allowed above total mass 1 to absorb rounding in kernel outputs.
    static constexpr double kMassSlack = 1e-12;

    /// Validates nonnegativity and normalisation-within-tail; throws DomainError.
    DiagonalFockState(std::vector<double> probs, double tail_bound);

    static DiagonalFockState vacuum(int cutoff = 0);
    static DiagonalFockState fock(int n, int cutoff);

    std::span<const double> probs() const noexcept { return probs_; }
    int cutoff() const noexcept { return static_cast<int>(probs_.size()) - 1; }
    double tail_bound() const noexcept { return tail_bound_; }

    /// Population of |n>; zero beyond the cutoff.
    double operator[](std::ptrdiff_t n) const noexcept {
        return (n >= 0 && n < static_cast<std::ptrdiff_t>(probs_.size())) ? probs_[static_cast<std::size_t>(n)] : 0.0;
    }

    /// Compensated sum of the retained populations.
    double mass() const noexcept;
    double mean_photon_number() const noexcept;
    /// Set when more than half of the mass could lie beyond the cutoff.
    bool truncation_warning() const noexcept { return tail_bound_ > 0.5; }

    /// Cumulative distribution sum_{l<=m} p_l for m = 0..cutoff.
    std::vector<double> partial_sums() const;

    /// Same distribution at a different cutoff; truncating adds the dropped
    /// mass to the tail bound.
    DiagonalFockState with_cutoff(int cutoff) const;

private:
    std::vector<double> probs_;
    double tail_bound_;
};

/// Populations (1-s) s^n for n <= cutoff; tail bound s^(cutoff+1).
DiagonalFockState thermal_state(ThermalParam s, int cutoff);

/// Smallest cutoff N with s^(N+1) < tol.
int thermal_cutoff(double s, double tol = 1e-14);

struct CertifiedDistance {
    double value = 0.0;
    /// The true distance lies in [value - error_bound, value + error_bound].
    double error_bound = 0.0;
};

/// sum_n |p_n - q_n| over the union of both supports. For diagonal states
/// this is the trace-norm distance.
CertifiedDistance l1_distance(const DiagonalFockState& p, const DiagonalFockState& q);

/// <m| exp(alpha a^+ - conj(alpha) a) |n> through the associated Laguerre
/// closed form. Factorial ratios are taken in log space and the Laguerre
/// recurrence is rescaled on the fly, so m, n up to a few hundred are safe.
std::complex<double> displacement_matrix_element(int m, int n, ComplexAmplitude alpha);

/// log(n!) accurate to a few ulp.
double log_factorial(long n);
/// log C(n, k); -inf when k < 0 or k > n.
double log_choose(long n, long k);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> xs) noexcept;

}  // namespace gausspurify
