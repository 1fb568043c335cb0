#include "gausspurify/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gausspurify/error.hpp"

namespace gausspurify {

ChannelKind parse_channel_kind(std::string_view text) {
    if (text == "att" || text == "attenuate" || text == "attenuation") return ChannelKind::attenuate;
    if (text == "amp" || text == "amplify" || text == "amplification") return ChannelKind::amplify;
    throw DomainError("unknown channel kind '" + std::string(text) + "' (expected att or amp)");
}

namespace {

void require_purity(double s, const char* name) {
    if (!(s >= 0.0 && s < 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1)");
}

bool ordering_matches(ChannelKind kind, double s1, double s2) {
    return kind == ChannelKind::attenuate ? s1 >= s2 && s1 > 0.0 : s1 <= s2;
}

}  // namespace

double quantum_threshold(ChannelKind kind, double s1, double s2) {
    require_purity(s1, "s1");
    require_purity(s2, "s2");
    if (kind == ChannelKind::attenuate) {
        if (!(s1 >= s2)) throw DomainError("attenuation threshold needs s1 >= s2");
        if (s1 == 0.0) throw DomainError("attenuation threshold needs s1 > 0");
        return std::sqrt(s2 * (1.0 - s1) / (s1 * (1.0 - s2)));
    }
    if (!(s1 <= s2)) throw DomainError("amplification threshold needs s1 <= s2");
    return std::sqrt((1.0 - s1) / (1.0 - s2));
}

double s_tilde(ChannelKind kind, double s1, double k) {
    require_purity(s1, "s1");
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("k must be positive and finite");
    const double k2 = k * k;
    if (kind == ChannelKind::attenuate) return s1 * k2 / (1.0 - s1 + s1 * k2);
    if (k < 1.0) throw DomainError("amplification needs k >= 1");
    return 1.0 - (1.0 - s1) / k2;
}

QuantumRisk quantum_minimax_risk(double s1, double s2, double k, ChannelKind kind) {
    require_purity(s2, "s2");
    QuantumRisk out;
    out.s_tilde = s_tilde(kind, s1, k);
    const double st = out.s_tilde;

    const bool perfect = ordering_matches(kind, s1, s2) ? k <= quantum_threshold(kind, s1, s2) : st <= s2;
    if (perfect || st <= s2) return out;

    if (s2 == 0.0) {
        out.m0 = 0;
        out.risk = 2.0 * st;
        return out;
    }
    // ln[(1-s~)/(1-s2)] / ln(s2/s~), both logs formed from the small difference
    const double gap = st - s2;
    const double num = std::log1p(-gap / (1.0 - s2));
    const double den = std::log1p(-gap / st);
    const double ratio = num / den;
    const auto m0 = static_cast<std::int64_t>(std::floor(ratio));
    out.m0 = m0;
    const double e = static_cast<double>(m0 + 1);
    out.risk = 2.0 * (std::pow(st, e) - std::pow(s2, e));
    return out;
}

double classical_threshold(double V1, double V2) {
    if (!(V1 > 0.0) || !(V2 > 0.0)) throw DomainError("variances must be positive");
    return std::sqrt(V2 / V1);
}

double classical_minimax_risk(double V1, double V2, double k) {
    if (!(V1 > 0.0) || !(V2 > 0.0)) throw DomainError("variances must be positive");
    if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("k must be finite and >= 0");
    // rho = a^2 / b^2 with a^2 = k^2 V1 (output spread), b^2 = V2 (target)
    const double excess = (k * k * V1 - V2) / V2;  // rho - 1
    if (!(excess > 0.0)) return 0.0;
    const double rho = 1.0 + excess;
    const double log_ratio = std::log1p(excess) / excess;  // ln(rho) / (rho - 1)
    const double u = std::sqrt(rho * log_ratio);            // x* / b
    const double v = std::sqrt(log_ratio);                  // x* / a
    // 4 [Phi(u) - Phi(v)]
    return 2.0 * (std::erfc(v / std::numbers::sqrt2) - std::erfc(u / std::numbers::sqrt2));
}

QubitScenario::QubitScenario(double r0_norm, double lambda) : r0_(r0_norm), lambda_(lambda) {
    if (!(r0_ > 0.0 && r0_ < 1.0)) throw DomainError("Bloch radius r0 must lie in (0, 1)");
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw DomainError("lambda must be positive and finite");
    if (!(lambda_ * r0_ < 1.0)) throw DomainError("target Bloch vector unphysical: lambda * r0 must be < 1");
}

QubitScenario QubitScenario::with_k(double r0_norm, double lambda, double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("k must be positive and finite");
    QubitScenario s(r0_norm, lambda);
    s.k_ = k;
    return s;
}

QubitScenario QubitScenario::with_rate(double r0_norm, double lambda, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("rate must be positive and finite");
    QubitScenario s(r0_norm, lambda);
    s.k_ = lambda * std::sqrt(rate);
    return s;
}

double QubitScenario::k() const {
    if (!k_) throw DomainError("scenario has no k or rate");
    return *k_;
}

double QubitScenario::rate() const {
    const double kv = k();
    return kv * kv / (lambda_ * lambda_);
}

double QubitScenario::s1() const noexcept { return (1.0 - r0_) / (1.0 + r0_); }
double QubitScenario::s2() const noexcept { return (1.0 - lambda_ * r0_) / (1.0 + lambda_ * r0_); }
double QubitScenario::V1() const noexcept { return 1.0 - r0_ * r0_; }
double QubitScenario::V2() const noexcept { return 1.0 - lambda_ * lambda_ * r0_ * r0_; }

GaussianProblem GaussianProblem::from(const QubitScenario& scenario) {
    return {scenario.s1(), scenario.s2(), scenario.V1(), scenario.V2(), scenario.k()};
}

double lambda_tilde(double r0_norm) {
    if (!(r0_norm > 0.0 && r0_norm < 1.0)) throw DomainError("Bloch radius r0 must lie in (0, 1)");
    return std::min(1.0, (1.0 - r0_norm) / r0_norm);
}

QubitThresholds qubit_thresholds(const QubitScenario& scenario) {
    QubitThresholds t;
    const double s1 = scenario.s1();
    const double s2 = scenario.s2();
    t.k0_classical = classical_threshold(scenario.V1(), scenario.V2());
    t.lambda_tilde = lambda_tilde(scenario.r0_norm());
    if (scenario.lambda() > 1.0) {
        t.kind = ChannelKind::attenuate;
        t.k0_quantum = quantum_threshold(ChannelKind::attenuate, s1, s2);
    } else if (scenario.lambda() < 1.0) {
        t.kind = ChannelKind::amplify;
        t.k0_quantum = quantum_threshold(ChannelKind::amplify, s1, s2);
    } else {
        t.kind = ChannelKind::attenuate;
        t.k0_quantum = 1.0;
    }
    return t;
}

double purification_rate(double r0_norm, double lambda) {
    if (!(lambda > 1.0)) throw DomainError("purification needs lambda > 1");
    QubitScenario check(r0_norm, lambda);
    return (1.0 / lambda - r0_norm) / (lambda * lambda * (1.0 - r0_norm));
}

double dilution_rate(double r0_norm, double lambda) {
    if (!(lambda < 1.0)) throw DomainError("dilution needs lambda < 1");
    QubitScenario check(r0_norm, lambda);
    const double r2 = r0_norm * r0_norm;
    if (lambda < lambda_tilde(r0_norm)) return (1.0 / (lambda * lambda) - r2) / (1.0 - r2);
    return (r0_norm + 1.0 / lambda) / (lambda * lambda * (r0_norm + 1.0));
}

double optimal_rate(const QubitScenario& scenario) {
    const double lambda = scenario.lambda();
    if (lambda > 1.0) return purification_rate(scenario.r0_norm(), lambda);
    if (lambda < 1.0) return dilution_rate(scenario.r0_norm(), lambda);
    return 1.0;
}

RiskReport combined_risk(const QubitScenario& scenario, const IntegrationOptions& options) {
    RiskReport r;
    r.k = scenario.k();
    const auto th = qubit_thresholds(scenario);
    r.k0_quantum = th.k0_quantum;
    r.k0_classical = th.k0_classical;
    // The channel family follows k itself; both families agree at k = 1.
    r.kind = r.k <= 1.0 ? ChannelKind::attenuate : ChannelKind::amplify;

    const double s1 = scenario.s1();
    const double s2 = scenario.s2();
    const double lo = std::min(r.k0_quantum, r.k0_classical);
    const double hi = std::max(r.k0_quantum, r.k0_classical);

    if (r.k <= lo) {
        r.case_id = 1;
        return r;
    }

    const auto q = quantum_minimax_risk(s1, s2, r.k, r.kind);
    r.quantum_risk = q.risk;
    r.s_tilde = q.s_tilde;
    r.m0 = q.m0;
    r.classical_risk = classical_minimax_risk(scenario.V1(), scenario.V2(), r.k);

    if (r.k <= hi) {
        if (r.k0_quantum <= r.k0_classical) {
            r.case_id = 2;
            r.classical_risk = 0.0;
            r.total_risk = r.quantum_risk;
        } else {
            r.case_id = 3;
            r.quantum_risk = 0.0;
            r.total_risk = r.classical_risk;
        }
        return r;
    }

    r.case_id = 4;
    const auto integral =
        product_gaussian_risk(q.s_tilde, s2, r.k * r.k * scenario.V1(), scenario.V2(), options);
    r.total_risk = integral.value;
    r.error_bound = integral.error_bound;
    r.photon_terms = integral.photon_terms;
    return r;
}

std::string describe_case(int case_id) {
    switch (case_id) {
        case 1: return "zero risk";
        case 2: return "quantum contribution";
        case 3: return "classical contribution";
        case 4: return "classical and quantum contributions";
        default: return "unknown";
    }
}

}  // namespace gausspurify
