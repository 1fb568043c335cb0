#include "gausspurify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gausspurify/channels.hpp"
#include "gausspurify/error.hpp"
#include "gausspurify/oracle.hpp"
#include "gausspurify/risk.hpp"
#include "gausspurify/sweep.hpp"

namespace gausspurify {

namespace {

using nlohmann::json;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

struct PurityPair {
    double s1;
    double s2;
};

// Random pair ordered for the kind, kept away from the degenerate s1 = s2.
PurityPair random_pair(ReproducibleRng& rng, ChannelKind kind) {
    for (;;) {
        const double a = 0.01 + 0.98 * rng.uniform();
        const double b = 0.01 + 0.98 * rng.uniform();
        if (std::abs(a - b) < 1e-6) continue;
        if (kind == ChannelKind::attenuate) return {std::max(a, b), std::min(a, b)};
        return {std::min(a, b), std::max(a, b)};
    }
}

double direct_geometric_l1(double st, double s2, double tail) {
    std::vector<double> terms;
    double pa = 1.0 - st;
    double pb = 1.0 - s2;
    double ta = 1.0;
    double tb = 1.0;
    while (ta + tb > tail) {
        terms.push_back(std::abs(pa - pb));
        pa *= st;
        pb *= s2;
        ta *= st;
        tb *= s2;
    }
    return compensated_sum(terms);
}

json threshold_exactness(const VerifyOptions& o, int pairs) {
    ReproducibleRng rng(o.seed);
    double worst = 0.0;
    double worst_risk = 0.0;
    json witness = nullptr;
    for (int i = 0; i < pairs; ++i) {
        const auto kind = i % 2 == 0 ? ChannelKind::attenuate : ChannelKind::amplify;
        const auto [s1, s2] = random_pair(rng, kind);
        double err = std::numeric_limits<double>::infinity();
        double risk = std::numeric_limits<double>::infinity();
        try {
            const double k0 = o.formulas.quantum_threshold(kind, s1, s2);
            err = std::abs(o.formulas.s_tilde(kind, s1, k0) - s2);
            risk = quantum_minimax_risk(s1, s2, k0, kind).risk;
        } catch (const DomainError&) {
        }
        if (err > worst || risk > worst_risk) {
            if (err > 1e-12 || risk != 0.0) witness = {{"kind", to_string(kind)}, {"s1", s1}, {"s2", s2}};
        }
        worst = std::max(worst, err);
        worst_risk = std::max(worst_risk, risk);
    }
    json j{{"name", "threshold_exactness"},
           {"passed", worst <= 1e-12 && worst_risk == 0.0},
           {"pairs", pairs},
           {"max_s_tilde_error", worst},
           {"max_risk_at_k0", worst_risk}};
    if (!j["passed"].get<bool>()) j["witness"] = witness;
    return j;
}

json closed_form_vs_l1(const VerifyOptions& o, int triples) {
    ReproducibleRng rng(o.seed + 1);
    double worst = 0.0;
    json witness = nullptr;
    for (int i = 0; i < triples; ++i) {
        const auto kind = i % 2 == 0 ? ChannelKind::attenuate : ChannelKind::amplify;
        const auto [s1, s2] = random_pair(rng, kind);
        const double k0 = quantum_threshold(kind, s1, s2);
        const double k = kind == ChannelKind::attenuate ? k0 + (1.0 - k0) * rng.uniform() : k0 * (1.0 + 2.0 * rng.uniform());
        const auto q = quantum_minimax_risk(s1, s2, k, kind);
        const double direct = direct_geometric_l1(q.s_tilde, s2, 1e-13);
        const double err = std::abs(direct - q.risk);
        if (err > worst) {
            worst = err;
            witness = {{"kind", to_string(kind)}, {"s1", s1}, {"s2", s2}, {"k", k}};
        }
    }
    // s~ = 0.5 against s2 = 0.4
    const double worked = quantum_minimax_risk(0.8, 0.4, 0.5, ChannelKind::attenuate).risk;
    const bool ok = worst <= 1e-10 && std::abs(worked - 0.2) <= 1e-12;
    json j{{"name", "closed_form_vs_l1"}, {"passed", ok}, {"triples", triples}, {"max_error", worst}, {"worked_point", worked}};
    if (!ok) j["witness"] = witness;
    return j;
}

json kernel_vs_unitary(const std::vector<double>& ks, const std::vector<double>& s1s) {
    constexpr int kCutoff = 60;
    double worst = 0.0;
    double defect = 0.0;
    double leakage = 0.0;
    double offdiag = 0.0;
    int working = 0;
    json witness = nullptr;
    for (double k : ks) {
        const auto kind = k < 1.0 ? ChannelKind::attenuate : ChannelKind::amplify;
        TwoModeSimulator sim(kind, k);
        const ChannelKernel kernel(kind, k);
        for (double s1 : s1s) {
            const auto input = thermal_state(ThermalParam(s1), thermal_cutoff(s1, 1e-12));
            const auto analytic = kernel.apply(input, kCutoff);
            const auto sim_out = simulate_channel(sim, input, AncillaCandidate::vacuum(), kCutoff);
            for (int m = 0; m <= kCutoff; ++m) {
                const double err = std::abs(analytic[m] - sim_out.output[m]);
                if (err > worst) {
                    worst = err;
                    witness = {{"k", k}, {"s1", s1}, {"m", m}};
                }
            }
            offdiag = std::max(offdiag, sim_out.max_offdiagonal);
        }
        defect = std::max(defect, sim.max_unitarity_defect());
        leakage = std::max(leakage, sim.max_leakage());
        working = std::max(working, sim.working_cutoff());
    }
    const bool ok = worst <= 1e-8 && defect <= 1e-10 && offdiag <= 1e-10;
    json j{{"name", "kernel_vs_unitary"},
           {"passed", ok},
           {"cutoff", kCutoff},
           {"max_entry_error", worst},
           {"unitarity_defect", defect},
           {"leakage", leakage},
           {"max_offdiagonal", offdiag},
           {"working_cutoff", working}};
    if (!ok) j["witness"] = witness;
    return j;
}

json thermal_fixed_family(const std::vector<double>& s1s, const std::vector<double>& k_att, const std::vector<double>& k_amp) {
    double worst = 0.0;
    json witness = nullptr;
    auto compare = [&](ChannelKind kind, double s1, double k) {
        const int n_in = thermal_cutoff(s1, 1e-16);
        const auto input = thermal_state(ThermalParam(s1), n_in);
        const auto out = kind == ChannelKind::attenuate ? attenuate_kernel(k, input) : amplify_kernel(k, input);
        const double st = s_tilde(kind, s1, k);
        const int top = std::min(out.cutoff(), n_in);
        const auto expected = thermal_state(ThermalParam(st), top);
        for (int m = 0; m <= top; ++m) {
            const double err = std::abs(out[m] - expected[m]);
            if (err > worst) {
                worst = err;
                witness = {{"kind", to_string(kind)}, {"s1", s1}, {"k", k}, {"m", m}};
            }
        }
    };
    for (double s1 : s1s) {
        for (double k : k_att) compare(ChannelKind::attenuate, s1, k);
        for (double k : k_amp) compare(ChannelKind::amplify, s1, k);
    }
    json j{{"name", "thermal_fixed_family"}, {"passed", worst <= 1e-12}, {"max_entry_error", worst}};
    if (worst > 1e-12) j["witness"] = witness;
    return j;
}

json stochastic_ordering(const VerifyOptions& o, int k_points, int max_level, const std::vector<double>& s1s, int mixtures) {
    double worst = std::numeric_limits<double>::infinity();
    double worst_phys = std::numeric_limits<double>::infinity();
    double worst_mix = std::numeric_limits<double>::infinity();
    bool ok = true;
    json witness = nullptr;
    int settings = 0;
    for (auto kind : {ChannelKind::attenuate, ChannelKind::amplify}) {
        const auto ks = kind == ChannelKind::attenuate ? linspace(0.05, 0.95, k_points) : linspace(1.05, 3.0, k_points);
        for (double s1 : s1s) {
            for (double k : ks) {
                const auto r = check_stochastic_ordering(kind, k, s1, max_level);
                worst = std::min(worst, r.worst_margin);
                worst_phys = std::min(worst_phys, r.worst_margin_physical);
                if (!r.passed && ok) {
                    ok = false;
                    witness = {{"kind", to_string(kind)}, {"k", k}, {"s1", s1}, {"level", r.witness_level}, {"m", r.witness_m}};
                }
                ++settings;
            }
            const auto mix = check_mixture_ordering(kind, ks[ks.size() / 2], s1, std::min(max_level, 6), mixtures,
                                                    o.seed + 2 + static_cast<std::uint64_t>(settings));
            worst_mix = std::min(worst_mix, mix.worst_margin);
            if (!mix.passed && ok) {
                ok = false;
                witness = {{"kind", to_string(kind)}, {"mixture_sample", mix.witness_level}, {"s1", s1}};
            }
        }
    }
    json j{{"name", "stochastic_ordering"},
           {"passed", ok},
           {"settings", settings},
           {"max_level", max_level},
           {"worst_margin", worst},
           {"worst_margin_physical", worst_phys},
           {"worst_margin_mixtures", worst_mix}};
    if (!ok) j["witness"] = witness;
    return j;
}

json ancilla_optimality(const VerifyOptions& o, int samples) {
    struct Setting {
        ChannelKind kind;
        double s1, s2, k;
    };
    const Setting settings[] = {
        {ChannelKind::attenuate, 0.8, 0.4, 0.5},
        {ChannelKind::attenuate, 0.5, 0.2, 0.8},
        {ChannelKind::amplify, 0.4, 0.8, 2.0},
        {ChannelKind::amplify, 0.2, 0.5, 1.5},
    };
    json runs = json::array();
    bool ok = true;
    std::uint64_t offset = 10;
    for (const auto& s : settings) {
        const auto r = ancilla_optimality_search(s.kind, s.k, s.s1, s.s2, 6, samples, o.seed + offset++);
        ok = ok && r.passed;
        auto rj = r.to_json();
        rj["kind"] = to_string(s.kind);
        rj["s1"] = s.s1;
        rj["s2"] = s.s2;
        rj["k"] = s.k;
        runs.push_back(std::move(rj));
    }
    return {{"name", "ancilla_optimality"}, {"passed", ok}, {"samples", samples}, {"max_level", 6}, {"runs", runs}};
}

double classical_quadrature(double V1, double V2, double k) {
    const double va = k * k * V1;
    auto g = [](double x, double var) { return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var); };
    auto f = [&](double x) { return std::abs(g(x, va) - g(x, V2)); };
    // The densities cross once on (0, inf); locate it by bisection on the
    // log-ratio so the quadrature never straddles the kink.
    auto log_ratio = [&](double x) { return 0.5 * x * x * (1.0 / V2 - 1.0 / va) - 0.5 * std::log(va / V2); };
    double lo = 0.0;
    double hi = 1.0;
    while (log_ratio(hi) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (log_ratio(mid) < 0.0 ? lo : hi) = mid;
    }
    const double cross = 0.5 * (lo + hi);
    using boost::math::quadrature::gauss_kronrod;
    const double inner = gauss_kronrod<double, 61>::integrate(f, 0.0, cross, 15, 1e-14);
    const double outer = gauss_kronrod<double, 61>::integrate(f, cross, std::numeric_limits<double>::infinity(), 15, 1e-14);
    return 2.0 * (inner + outer);
}

json classical_risk_check(const VerifyOptions& o, int triples) {
    ReproducibleRng rng(o.seed + 3);
    double worst = 0.0;
    json witness = nullptr;
    int below = 0;
    for (int i = 0; i < triples; ++i) {
        const double V1 = 0.1 + 1.9 * rng.uniform();
        const double V2 = 0.1 + 1.9 * rng.uniform();
        const double k0 = classical_threshold(V1, V2);
        const double k = k0 * (0.5 + 2.5 * rng.uniform());
        const double closed = classical_minimax_risk(V1, V2, k);
        double err = 0.0;
        if (k <= k0) {
            ++below;
            err = closed;
        } else {
            err = std::abs(closed - classical_quadrature(V1, V2, k));
        }
        if (err > worst) {
            worst = err;
            witness = {{"V1", V1}, {"V2", V2}, {"k", k}};
        }
    }
    const double worked = classical_minimax_risk(1.0, 1.0, std::numbers::sqrt2);
    const bool ok = worst <= 1e-8 && std::abs(worked - 0.33205) <= 1e-4;
    json j{{"name", "classical_risk"},
           {"passed", ok},
           {"triples", triples},
           {"below_threshold", below},
           {"max_error", worst},
           {"worked_point", worked}};
    if (!ok) j["witness"] = witness;
    return j;
}

json rates_check(int grid) {
    double worst = 0.0;
    json witness = nullptr;
    for (double r0 : linspace(0.01, 0.99, grid)) {
        for (double lr : linspace(0.01, 0.99, grid)) {
            const double lambda = lr / r0;
            if (lambda == 1.0) continue;
            const QubitScenario s(r0, lambda);
            const auto th = qubit_thresholds(s);
            double governing = th.k0_quantum;
            double closed = 0.0;
            if (lambda > 1.0) {
                closed = purification_rate(r0, lambda);
            } else {
                closed = dilution_rate(r0, lambda);
                if (lambda < th.lambda_tilde) governing = th.k0_classical;
            }
            const double expected = governing * governing / (lambda * lambda);
            const double err = std::abs(closed - expected) / std::max(1.0, std::abs(expected));
            if (err > worst) {
                worst = err;
                witness = {{"r0", r0}, {"lambda", lambda}};
            }
        }
    }
    const double pur = purification_rate(1.0 / 3.0, 2.4);
    const double dil = dilution_rate(0.8, 5.0 / 12.0);
    const bool ok = worst <= 1e-12 && std::abs(pur - 0.0217014) <= 1e-6 && std::abs(dil - 10.24) <= 1e-6;
    json j{{"name", "qubit_rates"},
           {"passed", ok},
           {"grid", grid},
           {"max_relative_error", worst},
           {"purification_worked_point", pur},
           {"dilution_worked_point", dil}};
    if (!ok) j["witness"] = witness;
    return j;
}

json region_rule(int grid) {
    int mismatches = 0;
    int checked = 0;
    json witness = nullptr;
    for (double r0 : linspace(0.005, 0.995, grid)) {
        const double lt = lambda_tilde(r0);
        for (double lambda : linspace(0.005, 0.995, grid)) {
            if (std::abs(lambda - lt) < 1e-9) continue;
            const QubitScenario s(r0, lambda);
            const auto th = qubit_thresholds(s);
            ++checked;
            if ((th.k0_classical < th.k0_quantum) != (lambda < lt)) {
                if (mismatches++ == 0) witness = {{"r0", r0}, {"lambda", lambda}};
            }
        }
    }
    int purification_violations = 0;
    for (double r0 : linspace(0.005, 0.995, grid)) {
        for (double lr : linspace(0.005, 0.995, grid)) {
            if (lr <= r0) continue;
            const QubitScenario s(r0, lr / r0);
            const auto th = qubit_thresholds(s);
            if (!(th.k0_quantum < th.k0_classical && th.k0_classical < 1.0)) {
                if (purification_violations++ == 0 && mismatches == 0) witness = {{"r0", r0}, {"lambda", lr / r0}};
            }
        }
    }
    const bool ok = mismatches == 0 && purification_violations == 0;
    json j{{"name", "region_rule"},
           {"passed", ok},
           {"dilution_points", checked},
           {"dilution_mismatches", mismatches},
           {"purification_violations", purification_violations}};
    if (!ok) j["witness"] = witness;
    return j;
}

json case_continuity(int grid) {
    struct Figure {
        const char* name;
        double r0, lambda, k_lo, k_hi;
    };
    const Figure figures[] = {
        {"fig6a", 1.0 / 3.0, 2.4, 0.01, 1.0},
        {"fig6b", 0.8, 5.0 / 12.0, 1.0, 2.5},
        {"fig6c", 0.5, 0.25, 1.0, 2.5},
    };
    json runs = json::array();
    bool ok = true;
    for (const auto& f : figures) {
        const auto th = qubit_thresholds(QubitScenario(f.r0, f.lambda));
        auto total = [&](double k) { return combined_risk(QubitScenario::with_k(f.r0, f.lambda, k)).total_risk; };
        double jump = 0.0;
        for (double b : {th.k0_quantum, th.k0_classical}) jump = std::max(jump, std::abs(total(b + 1e-6) - total(b - 1e-6)));
        const double first = std::min(th.k0_quantum, th.k0_classical);
        double below_max = 0.0;
        double worst_drop = 0.0;
        double prev = -1.0;
        std::vector<int> cases;
        for (double k : linspace(f.k_lo, f.k_hi, grid)) {
            const auto r = combined_risk(QubitScenario::with_k(f.r0, f.lambda, k));
            if (k <= first) below_max = std::max(below_max, std::abs(r.total_risk));
            if (prev >= 0.0) worst_drop = std::max(worst_drop, prev - r.total_risk);
            prev = r.total_risk;
            if (cases.empty() || cases.back() != r.case_id) cases.push_back(r.case_id);
        }
        const bool fig_ok = jump <= 1e-4 && below_max == 0.0 && worst_drop <= 1e-8;
        ok = ok && fig_ok;
        runs.push_back({{"figure", f.name},
                        {"passed", fig_ok},
                        {"max_jump", jump},
                        {"max_below_first_threshold", below_max},
                        {"max_decrease", worst_drop},
                        {"case_sequence", cases}});
    }
    return {{"name", "case_continuity"}, {"passed", ok}, {"grid", grid}, {"runs", runs}};
}

json noise_topup(const VerifyOptions& o, int samples) {
    struct Setting {
        double st, s2;
    };
    const Setting settings[] = {{0.25, 0.5}, {0.0, 0.5}, {0.5, 0.5}};
    json runs = json::array();
    bool ok = true;
    std::uint64_t offset = 20;
    for (const auto& s : settings) {
        const auto r = verify_noise_topup(s.st, s.s2, samples, o.seed + offset++);
        ok = ok && r.passed;
        auto rj = r.to_json();
        rj["s_tilde"] = s.st;
        rj["s2"] = s.s2;
        runs.push_back(std::move(rj));
    }
    return {{"name", "noise_topup"}, {"passed", ok}, {"runs", runs}};
}

json covariance(const std::vector<ComplexAmplitude>& alphas) {
    json runs = json::array();
    bool ok = true;
    const std::pair<ChannelKind, double> settings[] = {{ChannelKind::attenuate, 0.5},
                                                       {ChannelKind::amplify, std::numbers::sqrt2}};
    for (const auto& [kind, k] : settings) {
        const auto r = verify_covariance(kind, k, alphas);
        ok = ok && r.passed;
        auto rj = r.to_json();
        rj["kind"] = to_string(kind);
        rj["k"] = k;
        runs.push_back(std::move(rj));
    }
    return {{"name", "displacement_covariance"}, {"passed", ok}, {"runs", runs}};
}

json sweep_invariants() {
    bool ok = true;
    json details = json::object();
    // Fixed parameters carried by the figure defaults.
    auto fixed = [](SweepTarget t, const char* key) { return SweepConfig::defaults(t).fixed.at(key); };
    const bool targets = fixed(SweepTarget::fig2a, "s1") == 0.8 && fixed(SweepTarget::fig2a, "s2") == 0.4 &&
                          fixed(SweepTarget::fig2b, "s1") == 0.4 && fixed(SweepTarget::fig2b, "s2") == 0.8 &&
                          std::abs(fixed(SweepTarget::fig6a, "r0") - 1.0 / 3.0) < 1e-15 &&
                          std::abs(fixed(SweepTarget::fig6a, "r0") * fixed(SweepTarget::fig6a, "lambda") - 0.8) < 1e-12 &&
                          std::abs(fixed(SweepTarget::fig6b, "r0") - 0.8) < 1e-15 &&
                          std::abs(fixed(SweepTarget::fig6b, "r0") * fixed(SweepTarget::fig6b, "lambda") - 1.0 / 3.0) < 1e-12 &&
                          std::abs(fixed(SweepTarget::fig6c, "r0") - 0.5) < 1e-15 &&
                          std::abs(fixed(SweepTarget::fig6c, "r0") * fixed(SweepTarget::fig6c, "lambda") - 0.125) < 1e-12;
    details["target_parameters"] = targets;
    ok = ok && targets;

    auto csv = [](SweepTarget t, unsigned threads) {
        auto c = SweepConfig::defaults(t);
        c.threads = threads;
        std::ostringstream out;
        write_csv(run_sweep(c), out);
        return out.str();
    };
    const bool repeatable = csv(SweepTarget::fig2a, 1) == csv(SweepTarget::fig2a, 1) &&
                            csv(SweepTarget::fig5, 1) == csv(SweepTarget::fig5, 3);
    details["csv_repeatable"] = repeatable;
    ok = ok && repeatable;
    json j{{"name", "sweep_invariants"}, {"passed", ok}};
    j.update(details);
    return j;
}

}  // namespace

VerifySuite parse_verify_suite(std::string_view text) {
    if (text == "fast") return VerifySuite::fast;
    if (text == "full") return VerifySuite::full;
    throw DomainError("unknown verify suite '" + std::string(text) + "' (expected fast or full)");
}

VerifyFormulas VerifyFormulas::library() {
    VerifyFormulas f;
    f.quantum_threshold = [](ChannelKind kind, double s1, double s2) { return gausspurify::quantum_threshold(kind, s1, s2); };
    f.s_tilde = [](ChannelKind kind, double s1, double k) { return gausspurify::s_tilde(kind, s1, k); };
    return f;
}

json run_verify_suite(const VerifyOptions& options) {
    const bool full = options.suite == VerifySuite::full;
    json checks = json::array();
    auto guarded = [&](const char* name, auto&& fn) {
        try {
            checks.push_back(fn());
        } catch (const std::exception& e) {
            checks.push_back({{"name", name}, {"passed", false}, {"error", e.what()}});
        }
    };

    guarded("threshold_exactness", [&] { return threshold_exactness(options, full ? 1000 : 200); });
    guarded("closed_form_vs_l1", [&] { return closed_form_vs_l1(options, full ? 1000 : 200); });
    guarded("kernel_vs_unitary", [&] {
        return full ? kernel_vs_unitary({0.3, 0.5, 0.9, 1.2, 1.5, 2.0}, {0.2, 0.5, 0.8})
                    : kernel_vs_unitary({0.5, 1.5}, {0.5});
    });
    guarded("thermal_fixed_family", [&] {
        return full ? thermal_fixed_family(linspace(0.1, 0.9, 9), linspace(0.05, 0.95, 19), linspace(1.05, 3.0, 14))
                    : thermal_fixed_family({0.2, 0.5, 0.8}, {0.3, 0.7}, {1.2, 2.0});
    });
    guarded("stochastic_ordering", [&] {
        return full ? stochastic_ordering(options, 20, 10, {0.2, 0.5, 0.8}, 200)
                    : stochastic_ordering(options, 5, 5, {0.5}, 20);
    });
    guarded("ancilla_optimality", [&] { return ancilla_optimality(options, full ? 10000 : 1000); });
    guarded("classical_risk", [&] { return classical_risk_check(options, full ? 1000 : 100); });
    guarded("qubit_rates", [&] { return rates_check(full ? 100 : 30); });
    guarded("region_rule", [&] { return region_rule(full ? 200 : 50); });
    guarded("case_continuity", [&] { return case_continuity(full ? 60 : 15); });
    guarded("noise_topup", [&] { return noise_topup(options, full ? 1000000 : 100000); });
    guarded("displacement_covariance", [&] {
        std::vector<ComplexAmplitude> alphas{{0.0, 0.0}, {1.0, 0.0}};
        if (full) {
            alphas.emplace_back(0.6, 0.8);
            alphas.emplace_back(-1.5, 1.0);
            alphas.emplace_back(0.0, 2.0);
        }
        return covariance(alphas);
    });
    if (full) guarded("sweep_invariants", [&] { return sweep_invariants(); });

    bool passed = true;
    for (const auto& c : checks) passed = passed && c.at("passed").get<bool>();
    return {{"suite", full ? "full" : "fast"}, {"seed", options.seed}, {"passed", passed}, {"checks", checks}};
}

}  // namespace gausspurify
