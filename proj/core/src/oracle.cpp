#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "gausspurify/channels.hpp"
#include "gausspurify/error.hpp"
#include "gausspurify/oracle.hpp"
#include "gausspurify/risk.hpp"

namespace gausspurify {

// ---------------------------------------------------------------------------
// Sampling

double ReproducibleRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double ReproducibleRng::standard_normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> ReproducibleRng::dirichlet_uniform(int n) {
    if (n < 1) throw DomainError("simplex needs at least one vertex");
    std::vector<double> w(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& x : w) {
        x = -std::log1p(-uniform());
        total += x;
    }
    for (auto& x : w) x /= total;
    return w;
}

// ---------------------------------------------------------------------------
// Displaced thermal states

Eigen::MatrixXcd displaced_thermal_density(double s, ComplexAmplitude alpha, int cutoff, int inner_cutoff) {
    const ThermalParam param(s);
    if (cutoff < 0) throw DomainError("cutoff must be >= 0");
    if (inner_cutoff < 0) inner_cutoff = std::max(cutoff, thermal_cutoff(param.value(), 1e-17));
    const auto thermal = thermal_state(param, inner_cutoff);
    const int size = cutoff + 1;
    Eigen::MatrixXcd d(size, inner_cutoff + 1);
    for (int m = 0; m < size; ++m)
        for (int l = 0; l <= inner_cutoff; ++l) d(m, l) = displacement_matrix_element(m, l, alpha);
    Eigen::VectorXd p(inner_cutoff + 1);
    for (int l = 0; l <= inner_cutoff; ++l) p(l) = thermal[l];
    return d * p.asDiagonal() * d.adjoint();
}

std::vector<double> displaced_thermal_populations(double s, ComplexAmplitude beta, int cutoff) {
    const ThermalParam param(s);
    if (cutoff < 0) throw DomainError("cutoff must be >= 0");
    const double x = beta.norm_squared();
    std::vector<double> out(static_cast<std::size_t>(cutoff) + 1);
    if (s == 0.0) {
        // Poisson(|beta|^2)
        for (int m = 0; m <= cutoff; ++m) {
            if (x == 0.0) {
                out[static_cast<std::size_t>(m)] = m == 0 ? 1.0 : 0.0;
                continue;
            }
            out[static_cast<std::size_t>(m)] = std::exp(-x + m * std::log(x) - log_factorial(m));
        }
        return out;
    }
    // (1-s) s^m e^{-x(1-s)} L_m(-y), y = x (1-s)^2 / s; q_m = s^m L_m(-y).
    const double y = x * (1.0 - s) * (1.0 - s) / s;
    const double front = (1.0 - s) * std::exp(-x * (1.0 - s));
    if (front == 0.0) return out;
    double prev = 0.0;
    double cur = 1.0;
    for (int m = 0; m <= cutoff; ++m) {
        out[static_cast<std::size_t>(m)] = front * cur;
        const double next = s * ((2.0 * m + 1.0 + y) * cur - m * s * prev) / (m + 1.0);
        prev = cur;
        cur = next;
    }
    return out;
}

double trace_norm(const Eigen::MatrixXcd& hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Stochastic ordering

namespace {

void require_kind_k(ChannelKind kind, double k) {
    if (kind == ChannelKind::attenuate && !(k > 0.0 && k < 1.0)) throw DomainError("attenuation needs 0 < k < 1");
    if (kind == ChannelKind::amplify && !(k > 1.0 && std::isfinite(k))) throw DomainError("amplification needs k > 1");
}

// min_m (P_a(m) - P_b(m)) over the union of supports, with its argmin.
std::pair<double, int> worst_partial_sum_gap(const DiagonalFockState& a, const DiagonalFockState& b) {
    const int top = std::max(a.cutoff(), b.cutoff());
    double sa = 0.0;
    double sb = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    int at = -1;
    for (int m = 0; m <= top; ++m) {
        sa += a[m];
        sb += b[m];
        if (sa - sb < worst) {
            worst = sa - sb;
            at = m;
        }
    }
    return {worst, at};
}

DiagonalFockState mixture(const std::vector<DiagonalFockState>& parts, std::span<const double> weights) {
    int top = 0;
    for (const auto& p : parts) top = std::max(top, p.cutoff());
    std::vector<double> probs(static_cast<std::size_t>(top) + 1, 0.0);
    double tail = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;
        for (int m = 0; m <= parts[i].cutoff(); ++m) probs[static_cast<std::size_t>(m)] += w * parts[i][m];
        tail += w * parts[i].tail_bound();
    }
    return DiagonalFockState(std::move(probs), tail);
}

std::vector<DiagonalFockState> physical_outputs(ChannelKind kind, double k, double s1, int max_level) {
    std::vector<DiagonalFockState> outs;
    outs.reserve(static_cast<std::size_t>(max_level) + 1);
    for (int kappa = 0; kappa <= max_level; ++kappa) outs.push_back(physical_ancilla_output(kind, k, kappa, ThermalParam(s1)));
    return outs;
}

}  // namespace

nlohmann::json OrderingReport::to_json() const {
    nlohmann::json j;
    j["passed"] = passed;
    j["worst_margin"] = worst_margin;
    j["worst_margin_physical"] = worst_margin_physical;
    j["levels_checked"] = levels_checked;
    if (!passed) j["witness"] = {{"level", witness_level}, {"m", witness_m}};
    return j;
}

OrderingReport check_stochastic_ordering(ChannelKind kind, double k, double s1, int max_level, double tolerance) {
    require_kind_k(kind, k);
    if (max_level < 1) throw DomainError("max_level must be >= 1");
    const ThermalParam param(s1);
    const auto vacuum = ancilla_fock_kernel(kind, k, 0, param);
    OrderingReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    report.worst_margin_physical = std::numeric_limits<double>::infinity();
    for (int kappa = 0; kappa <= max_level; ++kappa) {
        const auto [gap, m] = worst_partial_sum_gap(vacuum, ancilla_fock_kernel(kind, k, kappa, param));
        const auto [gap_phys, m_phys] = worst_partial_sum_gap(vacuum, physical_ancilla_output(kind, k, kappa, param));
        if (gap < report.worst_margin) report.worst_margin = gap;
        if (gap_phys < report.worst_margin_physical) report.worst_margin_physical = gap_phys;
        if (report.passed && (gap < -tolerance || gap_phys < -tolerance)) {
            report.passed = false;
            report.witness_level = kappa;
            report.witness_m = gap < -tolerance ? m : m_phys;
        }
        ++report.levels_checked;
    }
    return report;
}

OrderingReport check_mixture_ordering(ChannelKind kind, double k, double s1, int max_level, int samples,
                                      std::uint64_t seed, double tolerance) {
    require_kind_k(kind, k);
    if (max_level < 1) throw DomainError("max_level must be >= 1");
    if (samples < 1) throw DomainError("samples must be >= 1");
    const auto outs = physical_outputs(kind, k, s1, max_level);
    ReproducibleRng rng(seed);
    OrderingReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const auto w = rng.dirichlet_uniform(max_level + 1);
        const auto [gap, m] = worst_partial_sum_gap(outs.front(), mixture(outs, w));
        if (gap < report.worst_margin) report.worst_margin = gap;
        if (report.passed && gap < -tolerance) {
            report.passed = false;
            report.witness_level = i;
            report.witness_m = m;
        }
        ++report.levels_checked;
    }
    report.worst_margin_physical = report.worst_margin;
    return report;
}

// ---------------------------------------------------------------------------
// Ancilla optimality

nlohmann::json AncillaSearchReport::to_json() const {
    nlohmann::json j;
    j["passed"] = passed;
    j["vacuum_risk"] = vacuum_risk;
    j["best_risk"] = best_risk;
    j["best_weights"] = best_weights;
    j["worst_margin"] = worst_margin;
    j["candidates"] = candidates;
    if (!passed) j["witness"] = witness;
    return j;
}

AncillaSearchReport ancilla_optimality_search(ChannelKind kind, double k, double s1, double s2, int max_level,
                                              int samples, std::uint64_t seed, double tolerance) {
    require_kind_k(kind, k);
    if (max_level < 1) throw DomainError("max_level must be >= 1");
    if (samples < 0) throw DomainError("samples must be >= 0");
    const double k0 = quantum_threshold(kind, s1, s2);
    if (k < k0) throw DomainError("ancilla search needs k >= k0 (below it the vacuum output is topped up with noise)");

    const auto outs = physical_outputs(kind, k, s1, max_level);
    int top = 0;
    for (const auto& p : outs) top = std::max(top, p.cutoff());
    const int cutoff = std::max(top, thermal_cutoff(s2, 1e-16));
    const auto target = thermal_state(ThermalParam(s2), cutoff);

    // Columns of the mixture as a dense table for fast repeated evaluation.
    const int levels = max_level + 1;
    std::vector<double> table(static_cast<std::size_t>(levels) * (cutoff + 1));
    for (int kappa = 0; kappa < levels; ++kappa)
        for (int m = 0; m <= cutoff; ++m) table[static_cast<std::size_t>(m) * levels + kappa] = outs[static_cast<std::size_t>(kappa)][m];

    std::vector<double> terms(static_cast<std::size_t>(cutoff) + 1);
    auto risk = [&](std::span<const double> w) {
        for (int m = 0; m <= cutoff; ++m) {
            double p = 0.0;
            for (int kappa = 0; kappa < levels; ++kappa) p += w[static_cast<std::size_t>(kappa)] * table[static_cast<std::size_t>(m) * levels + kappa];
            terms[static_cast<std::size_t>(m)] = std::abs(p - target[m]);
        }
        return compensated_sum(terms);
    };

    AncillaSearchReport report;
    std::vector<double> vac(static_cast<std::size_t>(levels), 0.0);
    vac[0] = 1.0;
    report.vacuum_risk = risk(vac);
    report.best_risk = report.vacuum_risk;
    report.best_weights = vac;
    report.worst_margin = std::numeric_limits<double>::infinity();

    auto consider = [&](const std::vector<double>& w) {
        const double r = risk(w);
        const double margin = r - report.vacuum_risk;
        ++report.candidates;
        if (margin < report.worst_margin) report.worst_margin = margin;
        if (r < report.best_risk) {
            report.best_risk = r;
            report.best_weights = w;
        }
        if (report.passed && margin < -tolerance) {
            report.passed = false;
            report.witness = w;
        }
    };
    for (int v = 0; v < levels; ++v) {
        std::vector<double> w(static_cast<std::size_t>(levels), 0.0);
        w[static_cast<std::size_t>(v)] = 1.0;
        consider(w);
    }
    ReproducibleRng rng(seed);
    for (int i = 0; i < samples; ++i) consider(rng.dirichlet_uniform(levels));
    return report;
}

// ---------------------------------------------------------------------------
// Noise top-up

nlohmann::json NoiseTopupReport::to_json() const {
    return {{"passed", passed},
            {"noise", noise},
            {"samples", samples},
            {"max_mc_deviation", max_mc_deviation},
            {"mc_tolerance", mc_tolerance},
            {"max_exact_deviation", max_exact_deviation},
            {"exact_tolerance", exact_tolerance}};
}

NoiseTopupReport verify_noise_topup(double s_tilde, double s2, int samples, std::uint64_t seed) {
    if (samples < 1) throw DomainError("samples must be >= 1");
    const ThermalParam st(s_tilde);
    const ThermalParam target_param(s2);
    NoiseTopupReport report;
    report.noise = gaussian_noise_topup(st, target_param);
    report.samples = samples;
    report.mc_tolerance = 3.0 / std::sqrt(static_cast<double>(samples));

    const int cutoff = thermal_cutoff(s2, 1e-13);
    const auto target = thermal_state(target_param, cutoff);
    const double v = report.noise;

    // Monte Carlo over beta ~ CN(0, v).
    std::vector<double> acc(static_cast<std::size_t>(cutoff) + 1, 0.0);
    ReproducibleRng rng(seed);
    const double sigma = std::sqrt(0.5 * v);
    for (int i = 0; i < samples; ++i) {
        const double re = sigma * rng.standard_normal();
        const double im = sigma * rng.standard_normal();
        const auto p = displaced_thermal_populations(s_tilde, ComplexAmplitude(re, im), cutoff);
        for (int m = 0; m <= cutoff; ++m) acc[static_cast<std::size_t>(m)] += p[static_cast<std::size_t>(m)];
    }
    for (int m = 0; m <= cutoff; ++m)
        report.max_mc_deviation =
            std::max(report.max_mc_deviation, std::abs(acc[static_cast<std::size_t>(m)] / samples - target[m]));

    // Exact average: |beta|^2 = t is exponential with mean v.
    for (int m = 0; m <= cutoff; ++m) {
        double exact = 0.0;
        if (v == 0.0) {
            exact = displaced_thermal_populations(s_tilde, ComplexAmplitude(0.0, 0.0), cutoff)[static_cast<std::size_t>(m)];
        } else {
            auto f = [&](double t) {
                if (t > 700.0 * v) return 0.0;
                const auto p = displaced_thermal_populations(s_tilde, ComplexAmplitude(std::sqrt(t), 0.0), m);
                return std::exp(-t / v) / v * p[static_cast<std::size_t>(m)];
            };
            boost::math::quadrature::exp_sinh<double> integrator;
            exact = integrator.integrate(f, 1e-14);
        }
        report.max_exact_deviation = std::max(report.max_exact_deviation, std::abs(exact - target[m]));
    }
    report.passed = report.max_mc_deviation <= report.mc_tolerance && report.max_exact_deviation <= report.exact_tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// Displacement covariance

nlohmann::json CovarianceReport::to_json() const {
    nlohmann::json j;
    j["passed"] = passed;
    j["max_trace_distance"] = max_trace_distance;
    j["max_displacement_error"] = max_displacement_error;
    auto& pts = j["points"] = nlohmann::json::array();
    for (const auto& p : points)
        pts.push_back({{"alpha", {p.alpha.re, p.alpha.im}},
                       {"trace_distance", p.trace_distance},
                       {"output_displacement", {p.output_displacement.real(), p.output_displacement.imag()}},
                       {"expected_displacement", {p.expected_displacement.real(), p.expected_displacement.imag()}}});
    return j;
}

CovarianceReport verify_covariance(ChannelKind kind, double k, std::span<const ComplexAmplitude> alphas, double s1,
                                   int cutoff, double tolerance) {
    if (kind == ChannelKind::attenuate && !(k > 0.0 && k <= 1.0)) throw DomainError("attenuation needs 0 < k <= 1");
    if (kind == ChannelKind::amplify && !(k >= 1.0)) throw DomainError("amplification needs k >= 1");
    if (cutoff < 1) throw DomainError("cutoff must be >= 1");
    const ThermalParam param(s1);
    for (const auto& a : alphas)
        if (std::sqrt(a.norm_squared()) > 2.0) throw DomainError("covariance grid needs |alpha| <= 2");

    TwoModeSimulator sim(kind, k);
    const auto vacuum = AncillaCandidate::vacuum();
    // Reference output at alpha = 0, kept well beyond the compared block so
    // that its displacement is exact there.
    const int ref_cutoff = cutoff + 40;
    const int in_ref = std::max(ref_cutoff, thermal_cutoff(param.value(), 1e-16));
    const auto thermal_in = thermal_state(param, in_ref);
    const Eigen::MatrixXd out0 = sim.evolve_diagonal(thermal_in.probs(), vacuum, ref_cutoff);

    CovarianceReport report;
    for (const auto& a : alphas) {
        CovariancePoint pt;
        pt.alpha = a;
        const std::complex<double> ka = k * a.value();
        pt.expected_displacement = ka;

        // Input truncation sized from the displaced mean photon number.
        const double mean = param.mean_photon_number() + a.norm_squared();
        const int in_cutoff = std::max(in_ref, static_cast<int>(std::ceil(mean + 12.0 * std::sqrt(mean * (mean + 1.0) + 1.0))) + 40);
        const auto rho_in = displaced_thermal_density(param.value(), a, in_cutoff);
        const Eigen::MatrixXcd out = sim.evolve(rho_in, vacuum, cutoff);

        Eigen::MatrixXcd d(cutoff + 1, ref_cutoff + 1);
        const ComplexAmplitude kav(ka);
        for (int m = 0; m <= cutoff; ++m)
            for (int l = 0; l <= ref_cutoff; ++l) d(m, l) = displacement_matrix_element(m, l, kav);
        const Eigen::MatrixXcd ref = d * out0.diagonal().asDiagonal() * d.adjoint();

        pt.trace_distance = trace_norm(out - ref);
        std::complex<double> first{0.0, 0.0};
        for (int m = 0; m < cutoff; ++m) first += out(m + 1, m) * std::sqrt(m + 1.0);
        pt.output_displacement = first;
        report.max_trace_distance = std::max(report.max_trace_distance, pt.trace_distance);
        report.max_displacement_error = std::max(report.max_displacement_error, std::abs(first - ka));
        report.points.push_back(pt);
    }
    report.passed = report.max_trace_distance <= tolerance && report.max_displacement_error <= tolerance;
    return report;
}

}  // namespace gausspurify
