#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gausspurify/kind.hpp"

namespace gausspurify {

// ---------------------------------------------------------------------------
// Single-mode Gaussian problem: Phi^{s1}_alpha -> Phi^{s2}_{k alpha}
// ---------------------------------------------------------------------------

/// Largest k at which the target thermal state is produced exactly.
///   attenuate: sqrt(s2 (1-s1) / (s1 (1-s2))),   requires s1 >= s2
///   amplify:   sqrt((1-s1) / (1-s2)),            requires s1 <= s2
double quantum_threshold(ChannelKind kind, double s1, double s2);

/// Purity parameter of P*(Phi^{s1}) for the vacuum-ancilla channel with gain k.
///   attenuate: s1 k^2 / (1 - s1 + s1 k^2)
///   amplify:   1 - (1 - s1) / k^2
double s_tilde(ChannelKind kind, double s1, double k);

struct QuantumRisk {
    double risk = 0.0;
    double s_tilde = 0.0;
    /// Crossing index of the two geometric distributions; empty in the
    /// zero-risk regime.
    std::optional<std::int64_t> m0;
};

/// Minimax trace-norm risk of the optimal Gaussian channel.
/// Zero for k <= k0, otherwise 2 (s~^{m0+1} - s2^{m0+1}) with
/// m0 = floor(ln[(1-s~)/(1-s2)] / ln(s2/s~)).
QuantumRisk quantum_minimax_risk(double s1, double s2, double k, ChannelKind kind);

// ---------------------------------------------------------------------------
// Classical problem: N(u, V1) -> N(k u, V2)
// ---------------------------------------------------------------------------

/// sqrt(V2 / V1)
double classical_threshold(double V1, double V2);

/// L1 distance between N(0, k^2 V1) and N(0, V2) when k exceeds the
/// classical threshold, zero otherwise.
double classical_minimax_risk(double V1, double V2, double k);

// ---------------------------------------------------------------------------
// Qubit purification / dilution through the Gaussian limit model
// ---------------------------------------------------------------------------

/// Bloch radius r0 in (0,1), scale factor lambda > 0, and optionally the
/// Gaussian scale k or the copy rate Lambda = k^2 / lambda^2.
class QubitScenario {
public:
    /// Validates 0 < r0 < 1, lambda > 0, lambda r0 < 1.
    QubitScenario(double r0_norm, double lambda);

    static QubitScenario with_k(double r0_norm, double lambda, double k);
    static QubitScenario with_rate(double r0_norm, double lambda, double rate);

    double r0_norm() const noexcept { return r0_; }
    double lambda() const noexcept { return lambda_; }

    bool has_k() const noexcept { return k_.has_value(); }
    /// Throws DomainError when no k (or rate) was supplied.
    double k() const;
    double rate() const;

    bool is_purification() const noexcept { return lambda_ > 1.0; }

    /// (1 - r0) / (1 + r0)
    double s1() const noexcept;
    /// (1 - lambda r0) / (1 + lambda r0)
    double s2() const noexcept;
    /// 1 - r0^2
    double V1() const noexcept;
    /// 1 - lambda^2 r0^2
    double V2() const noexcept;

private:
    double r0_;
    double lambda_;
    std::optional<double> k_;
};

struct GaussianProblem {
    double s1 = 0.0;
    double s2 = 0.0;
    double V1 = 1.0;
    double V2 = 1.0;
    double k = 1.0;

    static GaussianProblem from(const QubitScenario& scenario);
};

struct QubitThresholds {
    /// Attenuation threshold for purification, amplification threshold otherwise.
    double k0_quantum = 1.0;
    double k0_classical = 1.0;
    /// min{1, (1 - r0) / r0}
    double lambda_tilde = 1.0;
    ChannelKind kind = ChannelKind::attenuate;
};

QubitThresholds qubit_thresholds(const QubitScenario& scenario);

/// min{1, (1 - r0) / r0}
double lambda_tilde(double r0_norm);

/// Largest copy rate with vanishing asymptotic risk. Equals k0^2 / lambda^2
/// with k0 the threshold that binds first.
double optimal_rate(const QubitScenario& scenario);

/// Closed forms of the optimal rate, kept separate from optimal_rate() so
/// they can be checked against each other.
double purification_rate(double r0_norm, double lambda);
double dilution_rate(double r0_norm, double lambda);

struct IntegrationOptions {
    /// Absolute tolerance on the product-model L1 integral.
    double abs_tolerance = 1e-8;
    /// Half-width of the x-range in units of the larger standard deviation.
    double x_range_sigmas = 8.0;
    /// Worker threads for the per-photon-number integrals (1 = serial).
    unsigned threads = 1;
};

struct ProductRiskDiagnostics {
    double value = 0.0;
    /// Sum of quadrature error estimates and both truncation bounds.
    double error_bound = 0.0;
    double photon_tail_bound = 0.0;
    double x_tail_bound = 0.0;
    double x_limit = 0.0;
    int photon_terms = 0;
};

/// int dx sum_n | g1(x) (1-s~) s~^n - g2(x) (1-s2) s2^n | with g1, g2 centred
/// normal densities of the given variances. Adaptive quadrature per n; the
/// photon sum stops once the geometric tails certify the remainder.
/// Throws ConvergenceError when the tolerance cannot be met.
ProductRiskDiagnostics product_gaussian_risk(double s_tilde, double s2, double variance1, double variance2,
                                             const IntegrationOptions& options = {});

struct RiskReport {
    /// 1: zero risk, 2: quantum only, 3: classical only, 4: both.
    int case_id = 1;
    ChannelKind kind = ChannelKind::attenuate;
    double k = 0.0;
    double k0_quantum = 0.0;
    double k0_classical = 0.0;
    /// Marginal minimax risks of the two components at this k.
    double classical_risk = 0.0;
    double quantum_risk = 0.0;
    double total_risk = 0.0;
    std::optional<std::int64_t> m0;
    std::optional<double> s_tilde;
    /// Certified error of total_risk (nonzero only for the integrated case).
    double error_bound = 0.0;
    int photon_terms = 0;
};

/// Classifies k against both thresholds and evaluates the minimax risk.
/// Boundary values of k are assigned to the lower case.
RiskReport combined_risk(const QubitScenario& scenario, const IntegrationOptions& options = {});

std::string describe_case(int case_id);

}  // namespace gausspurify
