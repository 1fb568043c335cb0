#pragma once

#include <vector>

#include "gausspurify/fock.hpp"
#include "gausspurify/kind.hpp"

namespace gausspurify {

/// Photon-number transition kernel P(m|n) of a displacement-covariant
/// channel: beamsplitter (attenuate, 0 < k < 1) or two-mode squeezer
/// (amplify, k > 1), with the ancilla mode prepared in the Fock state
/// |ancilla_fock>. ancilla_fock = 0 is the optimal vacuum-ancilla channel.
///
/// Attenuation retains each photon with probability k^2; with the vacuum
/// ancilla the kernel is binomial thinning. Amplification has gain k^2;
/// with the vacuum ancilla P(m|n) = C(m,n) G^-(n+1) (1 - 1/G)^(m-n).
/// Nonzero ancilla levels use the finite interference sums of the
/// corresponding two-mode Fock amplitudes.
class ChannelKernel {
public:
    /// Kernels with both cutoffs at or below this size are applied through
    /// a dense transition table; larger ones are streamed column by column.
    static constexpr int kDenseLimit = 512;
    /// Output tail budget used when the amplifier picks its own cutoff.
    static constexpr double kOutputTailBudget = 1e-15;
    static constexpr int kMaxOutputCutoff = 1 << 16;

    /// Throws DomainError when k does not match the kind or ancilla_fock < 0.
    ChannelKernel(ChannelKind kind, double k, int ancilla_fock = 0);

    ChannelKind kind() const noexcept { return kind_; }
    double k() const noexcept { return k_; }
    int ancilla_fock() const noexcept { return ancilla_; }

    /// P(m|n).
    double transition(int m, int n) const;

    /// Upper bound on sum_{m > out_cutoff} P(m|n).
    double column_tail_bound(int n, int out_cutoff) const;

    /// Output cutoff large enough that every column n <= in_cutoff loses at
    /// most `budget` beyond it. Throws TruncationError past kMaxOutputCutoff.
    int output_cutoff_for(int in_cutoff, double budget = kOutputTailBudget) const;

    /// Applies the kernel. out_cutoff < 0 selects the exact support for
    /// attenuation and an automatically enlarged cutoff for amplification.
    DiagonalFockState apply(const DiagonalFockState& input, int out_cutoff = -1) const;

    /// Dense (out_cutoff+1) x (in_cutoff+1) table, row-major in m.
    std::vector<double> dense_table(int in_cutoff, int out_cutoff) const;

private:
    double vacuum_transition(int m, int n) const;
    double attenuate_amplitude(int m, int n) const;
    double amplify_amplitude(int m, int n) const;

    ChannelKind kind_;
    double k_;
    int ancilla_;
};

/// Binomial thinning with retention k^2 (vacuum ancilla).
DiagonalFockState attenuate_kernel(double k, const DiagonalFockState& input);

/// Negative-binomial amplification with gain k^2 (vacuum ancilla); the
/// output cutoff grows until the certified tail is below the budget.
DiagonalFockState amplify_kernel(double k, const DiagonalFockState& input);

/// Output for thermal input s1 when the effective ancilla mode carries
/// `fock_level` photons: weights (1-g)^(kappa+1) g^l C(l+kappa, kappa),
/// g = s~(kind, k, s1), placed at photon number l+kappa (attenuate) or l
/// (amplify). Level 0 is thermal(s~).
DiagonalFockState ancilla_fock_kernel(ChannelKind kind, double k, int fock_level, ThermalParam s1,
                                      double tail_budget = 1e-15);

/// Probability that the effective ancilla mode is in |p> when the physical
/// ancilla is |kappa>: Binomial(kappa, R^2) with
///   attenuate: R^2 = (1-k^2)(1-s1) / (1 - s1 + s1 k^2)
///   amplify:   R^2 = (k^2-1)(1-s1) / (k^2 - 1 + s1)
double effective_ancilla_weight(ChannelKind kind, double k, ThermalParam s1, int kappa, int p);

/// Thermal(s1) through the channel whose physical ancilla is |kappa>, built
/// as the binomial mixture of ancilla_fock_kernel outputs.
DiagonalFockState physical_ancilla_output(ChannelKind kind, double k, int kappa, ThermalParam s1,
                                          double tail_budget = 1e-15);

/// Mean-photon deficit s2/(1-s2) - s~/(1-s~): the strength E|beta|^2 of
/// random displacement noise that turns thermal(s~) into thermal(s2).
/// Throws DomainError when s~ > s2.
double gaussian_noise_topup(ThermalParam s_tilde, ThermalParam s2);

struct ClassicalGaussian {
    double mean = 0.0;
    double variance = 1.0;
};

/// Optimal classical covariant map X -> kX + Z. Below sqrt(V2/V1) the
/// noise Z has variance V2 - k^2 V1; above it Z = 0.
ClassicalGaussian classical_channel(double k, double V1, double V2, ClassicalGaussian x);

}  // namespace gausspurify
