// Acceptance battery: one PASS/FAIL line per criterion.
// usage: acceptance <path-to-gauss_purify> <scratch-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gausspurify/channels.hpp"
#include "gausspurify/fock.hpp"
#include "gausspurify/oracle.hpp"
#include "gausspurify/risk.hpp"

using namespace gausspurify;

namespace {

std::string g_cli;
std::string g_scratch;

// --- independent closed forms ------------------------------------------------

double k0_att(double s1, double s2) { return std::sqrt(s2 * (1 - s1) / (s1 * (1 - s2))); }
double k0_amp(double s1, double s2) { return std::sqrt((1 - s1) / (1 - s2)); }
double st_att(double s1, double k) { return s1 * k * k / (1 - s1 + s1 * k * k); }
double st_amp(double s1, double k) { return 1 - (1 - s1) / (k * k); }

double geometric_l1(double a, double b) {
    double sum = 0.0, c = 0.0;
    for (long n = 0;; ++n) {
        double term = std::abs((1 - a) * std::pow(a, n) - (1 - b) * std::pow(b, n));
        double y = term - c, t = sum + y;
        c = (t - sum) - y;
        sum = t;
        if (std::pow(std::max(a, b), n + 1) < 1e-13) break;
    }
    return sum;
}

double normal_pdf(double x, double v) { return std::exp(-x * x / (2 * v)) / std::sqrt(2 * M_PI * v); }

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
    double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
    double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15 * tol) return left + right + diff / 15;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 40);
}

// int |N(0,v1) - N(0,v2)| by quadrature, split where the densities cross.
double classical_quadrature(double v1, double v2) {
    if (v1 == v2) return 0.0;
    double x = std::sqrt(v1 * v2 * std::log(v2 / v1) / (v2 - v1));
    double lim = 12 * std::sqrt(std::max(v1, v2));
    auto f = [&](double t) { return std::abs(normal_pdf(t, v1) - normal_pdf(t, v2)); };
    return 2 * (adaptive(f, 0, x, 1e-13) + adaptive(f, x, lim, 1e-13));
}

struct Qubit {
    double s1, s2, V1, V2;
    Qubit(double r0, double lam)
        : s1((1 - r0) / (1 + r0)), s2((1 - lam * r0) / (1 + lam * r0)), V1(1 - r0 * r0), V2(1 - lam * lam * r0 * r0) {}
    double k0c() const { return std::sqrt(V2 / V1); }
    double k0q() const { return s1 >= s2 ? k0_att(s1, s2) : k0_amp(s1, s2); }
};

// --- reporting ------------------------------------------------------------------

struct Outcome {
    bool ok = true;
    std::string detail;
};

int g_failures = 0;

void run(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool slow = limit_seconds > 0 && dt > limit_seconds;
    bool ok = o.ok && !slow;
    if (!ok) ++g_failures;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2fs", dt);
    std::cout << (ok ? "PASS" : "FAIL") << "  " << id << "  " << name << "  [" << buf;
    if (limit_seconds > 0) std::cout << " / limit " << limit_seconds << "s";
    std::cout << "]  " << o.detail << (slow ? " (over time limit)" : "") << std::endl;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// --- CSV ------------------------------------------------------------------------

struct Csv {
    std::map<std::string, std::string> meta;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    size_t col(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("missing column " + name);
    }
    double meta_num(const std::string& key) const {
        auto it = meta.find(key);
        if (it == meta.end()) throw std::runtime_error("missing metadata " + key);
        return std::strtod(it->second.c_str(), nullptr);
    }
};

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    Csv csv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto colon = line.find(": ");
            if (colon != std::string::npos) csv.meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (csv.header.empty()) {
            while (std::getline(ss, cell, ',')) csv.header.push_back(cell);
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

Csv sweep(const std::string& target) {
    std::string out = g_scratch + "/" + target + ".csv";
    std::string cmd = "\"" + g_cli + "\" sweep --target " + target + " -o \"" + out + "\" 2>/dev/null";
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("sweep " + target + " failed");
    return read_csv(out);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- criteria -------------------------------------------------------------------

Outcome threshold_exactness() {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    double worst = 0.0;
    bool zero = true;
    for (int i = 0; i < 1000; ++i) {
        double a = u(gen), b = u(gen);
        for (auto kind : {ChannelKind::attenuate, ChannelKind::amplify}) {
            double s1 = kind == ChannelKind::attenuate ? std::max(a, b) : std::min(a, b);
            double s2 = kind == ChannelKind::attenuate ? std::min(a, b) : std::max(a, b);
            double k0 = quantum_threshold(kind, s1, s2);
            worst = std::max(worst, std::abs(s_tilde(kind, s1, k0) - s2));
            zero = zero && quantum_minimax_risk(s1, s2, k0, kind).risk == 0.0;
        }
    }
    return {worst <= 1e-12 && zero, "max |s~(k0) - s2| = " + fmt(worst) + (zero ? ", risk(k0) = 0" : ", risk(k0) != 0")};
}

Outcome closed_form_vs_l1() {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.001, 0.95);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double a = u(gen), b = u(gen);
        bool att = i % 2 == 0;
        double s1 = att ? std::max(a, b) : std::min(a, b), s2 = att ? std::min(a, b) : std::max(a, b);
        double k0 = att ? k0_att(s1, s2) : k0_amp(s1, s2);
        double k = att ? k0 + (1 - k0) * w(gen) : k0 * (1 + 2 * w(gen));
        double st = att ? st_att(s1, k) : st_amp(s1, k);
        auto r = quantum_minimax_risk(s1, s2, k, att ? ChannelKind::attenuate : ChannelKind::amplify);
        worst = std::max(worst, std::abs(r.risk - geometric_l1(st, s2)));
    }
    double worked = quantum_minimax_risk(0.8, 0.4, 0.5, ChannelKind::attenuate).risk;
    double direct = geometric_l1(0.5, 0.4);
    bool ok = worst <= 1e-10 && std::abs(worked - 0.2) <= 1e-10 && std::abs(direct - 0.2) <= 1e-10;
    return {ok, "max error " + fmt(worst) + ", worked point " + fmt(worked)};
}

Outcome kernel_vs_unitary() {
    double worst = 0.0;
    for (double k : {0.3, 0.5, 0.9, 1.2, 1.5, 2.0}) {
        auto kind = k < 1 ? ChannelKind::attenuate : ChannelKind::amplify;
        TwoModeSimulator sim(kind, k);
        for (double s1 : {0.2, 0.5, 0.8}) {
            auto in = thermal_state(ThermalParam(s1), thermal_cutoff(s1, 1e-12));
            auto analytic = kind == ChannelKind::attenuate ? attenuate_kernel(k, in) : amplify_kernel(k, in);
            auto rep = simulate_channel(sim, in, AncillaCandidate::vacuum(), 60);
            for (int m = 0; m <= 60; ++m) worst = std::max(worst, std::abs(rep.output[m] - analytic[m]));
        }
    }
    return {worst <= 1e-8, "max entry error " + fmt(worst)};
}

Outcome thermal_fixed_family() {
    double worst = 0.0;
    for (double s1 : {0.05, 0.3, 0.5, 0.8, 0.95}) {
        int N = thermal_cutoff(s1, 1e-16);
        auto in = thermal_state(ThermalParam(s1), N);
        for (double k : {0.1, 0.4, 0.7, 0.99}) {
            auto out = attenuate_kernel(k, in);
            double g = st_att(s1, k);
            for (int m = 0; m <= out.cutoff(); ++m) worst = std::max(worst, std::abs(out[m] - (1 - g) * std::pow(g, m)));
        }
        if (s1 > 0.8) continue;
        for (double k : {1.01, 1.3, 2.0}) {
            auto out = amplify_kernel(k, in);
            double g = st_amp(s1, k);
            for (int m = 0; m <= out.cutoff(); ++m) worst = std::max(worst, std::abs(out[m] - (1 - g) * std::pow(g, m)));
        }
    }
    return {worst <= 1e-12, "max entry error " + fmt(worst)};
}

Outcome stochastic_ordering() {
    double worst = 0.0;
    for (double s1 : {0.2, 0.5, 0.8}) {
        for (int i = 0; i < 20; ++i) {
            double ka = 0.05 + 0.9 * i / 19.0;
            double kb = 1.05 + 1.95 * i / 19.0;
            for (auto [kind, k] : {std::pair{ChannelKind::attenuate, ka}, std::pair{ChannelKind::amplify, kb}}) {
                auto r = check_stochastic_ordering(kind, k, s1, 10);
                worst = std::min({worst, r.worst_margin, r.worst_margin_physical});
            }
        }
    }
    return {worst >= -1e-12, "worst margin " + fmt(worst)};
}

Outcome vacuum_optimality() {
    struct S { ChannelKind kind; double s1, s2, k; };
    double worst = 0.0;
    int candidates = 0;
    for (S s : {S{ChannelKind::attenuate, 0.8, 0.4, 0.5}, S{ChannelKind::attenuate, 0.5, 0.2, 0.8},
                S{ChannelKind::amplify, 0.4, 0.8, 2.0}, S{ChannelKind::amplify, 0.2, 0.5, 1.5}}) {
        auto r = ancilla_optimality_search(s.kind, s.k, s.s1, s.s2, 6, 10000, 42);
        worst = std::min(worst, r.worst_margin);
        candidates += r.candidates;
    }
    return {worst >= -1e-9, std::to_string(candidates) + " candidates, worst margin " + fmt(worst)};
}

Outcome classical_risk() {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> v(0.05, 5.0), w(0.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double V1 = v(gen), V2 = v(gen), k = w(gen) * std::sqrt(V2 / V1);
        double want = k * k * V1 > V2 ? classical_quadrature(k * k * V1, V2) : 0.0;
        worst = std::max(worst, std::abs(classical_minimax_risk(V1, V2, k) - want));
    }
    double point = classical_minimax_risk(1, 1, std::sqrt(2.0));
    bool ok = worst <= 1e-8 && std::abs(point - 0.33205) <= 1e-4;
    return {ok, "max error " + fmt(worst) + ", V1=V2=1 k=sqrt2 -> " + std::to_string(point)};
}

Outcome qubit_rates() {
    double worst = 0.0;
    for (int i = 1; i <= 100; ++i) {
        double r0 = i / 101.0;
        for (int j = 1; j <= 100; ++j) {
            // lambda across (0, 1/r0), skipping the no-op lambda = 1
            double lam = (j / 101.0) / r0;
            if (std::abs(lam - 1) < 1e-9) continue;
            Qubit q(r0, lam);
            double k0 = std::min(q.k0q(), q.k0c());
            double want = k0 * k0 / (lam * lam);
            double got = lam > 1 ? purification_rate(r0, lam) : dilution_rate(r0, lam);
            worst = std::max(worst, std::abs(got - want) / want);
        }
    }
    double pur = purification_rate(1.0 / 3.0, 2.4), dil = dilution_rate(0.8, 5.0 / 12.0);
    bool ok = worst <= 1e-12 && std::abs(pur - 0.0217014) <= 1e-6 && std::abs(dil - 10.24) <= 1e-6;
    return {ok, "max relative error " + fmt(worst) + ", worked points " + std::to_string(pur) + ", " + std::to_string(dil)};
}

Outcome region_rule() {
    int bad = 0, points = 0;
    const int n = 400;
    for (int i = 1; i < n; ++i) {
        double r0 = double(i) / n;
        double lt = std::min(1.0, (1 - r0) / r0);
        if (std::abs(lambda_tilde(r0) - lt) > 1e-15) ++bad;
        for (int j = 1; j < n; ++j) {
            double lam = double(j) / n;
            if (std::abs(lam - lt) > 1e-9) {
                auto th = qubit_thresholds(QubitScenario(r0, lam));
                ++points;
                if ((th.k0_classical < th.k0_quantum) != (lam < lt)) ++bad;
            }
            double lp = 1 + (1 / r0 - 1) * double(j) / n;
            if (lp * r0 < 1) {
                auto th = qubit_thresholds(QubitScenario(r0, lp));
                ++points;
                if (!(th.k0_quantum < th.k0_classical && th.k0_classical < 1)) ++bad;
            }
        }
    }
    return {bad == 0, std::to_string(bad) + " violations over " + std::to_string(points) + " points"};
}

Outcome case_continuity() {
    struct S { double r0, lr0, kmax; };
    double jump = 0.0, nonzero = 0.0, drop = 0.0;
    for (S s : {S{1.0 / 3.0, 0.8, 1.0}, S{0.8, 1.0 / 3.0, 2.5}, S{0.5, 0.125, 2.5}}) {
        double lam = s.lr0 / s.r0;
        Qubit q(s.r0, lam);
        double lo = std::min(q.k0q(), q.k0c()), hi = std::max(q.k0q(), q.k0c());
        auto R = [&](double k) { return combined_risk(QubitScenario::with_k(s.r0, lam, k)); };
        for (double t : {lo, hi}) jump = std::max(jump, std::abs(R(t + 1e-6).total_risk - R(t - 1e-6).total_risk));
        double kmin = lam > 1 ? 0.01 : 1.0;
        double prev = 0.0, prev_err = 0.0;
        for (int i = 0; i <= 200; ++i) {
            double k = kmin + (s.kmax - kmin) * i / 200.0;
            auto r = R(k);
            if (k <= lo) nonzero = std::max(nonzero, std::abs(r.total_risk));
            drop = std::max(drop, prev - r.total_risk - prev_err - r.error_bound);
            prev = r.total_risk;
            prev_err = r.error_bound;
        }
    }
    bool ok = jump <= 1e-4 && nonzero == 0.0 && drop <= 0.0;
    return {ok, "max jump " + fmt(jump) + ", max below-threshold risk " + fmt(nonzero) + ", max decrease beyond error bounds " +
                    fmt(std::max(drop, 0.0))};
}

Outcome figure_shapes() {
    std::vector<std::string> problems;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) problems.push_back(what);
    };
    double marker_err = 0.0;

    // fig2: zero up to k0, strictly increasing beyond
    for (auto [target, att, s1, s2] : {std::tuple{"fig2a", true, 0.8, 0.4}, std::tuple{"fig2b", false, 0.4, 0.8}}) {
        auto c = sweep(target);
        double k0 = att ? k0_att(s1, s2) : k0_amp(s1, s2);
        marker_err = std::max(marker_err, std::abs(c.meta_num("k0_quantum") - k0));
        size_t ik = c.col("k"), ir = c.col("risk");
        double prev = 0.0;
        bool shape = !c.rows.empty();
        for (auto& row : c.rows) {
            if (row[ik] <= k0) shape = shape && row[ir] == 0.0;
            else {
                shape = shape && row[ir] > prev;
                prev = row[ir];
            }
        }
        expect(shape && prev > 0, std::string(target) + " shape");
    }

    // fig3: threshold contours, defined on the half of the square where the kind applies
    for (auto [target, att] : {std::pair{"fig3a", true}, std::pair{"fig3b", false}}) {
        auto c = sweep(target);
        size_t i1 = c.col("s1"), i2 = c.col("s2"), ik = c.col("k0"), ip = c.col("plotted");
        bool ok = !c.rows.empty();
        for (auto& row : c.rows) {
            double s1 = row[i1], s2 = row[i2];
            bool defined = att ? s1 >= s2 : s1 <= s2;
            if (!defined) {
                ok = ok && std::isnan(row[ik]);
                continue;
            }
            double k0 = att ? k0_att(s1, s2) : k0_amp(s1, s2);
            ok = ok && std::abs(row[ik] - k0) <= 1e-10 * k0;
            ok = ok && std::abs(row[ip] - (att ? k0 : 1 / k0)) <= 1e-10 && row[ip] > 0 && row[ip] <= 1 + 1e-12;
        }
        expect(ok, std::string(target) + " contour values");
    }

    {
        auto c = sweep("fig4");
        size_t ir = c.col("r0"), il = c.col("lambda"), it = c.col("lambda_tilde"), is = c.col("shaded"),
               icf = c.col("classical_first");
        bool ok = !c.rows.empty();
        for (auto& row : c.rows) {
            double lt = std::min(1.0, (1 - row[ir]) / row[ir]);
            ok = ok && std::abs(row[it] - lt) <= 1e-11 && (row[is] == 1.0) == (row[il] < lt);
            Qubit q(row[ir], row[il]);
            if (std::abs(row[il] - lt) > 1e-9 && row[il] != 1.0) ok = ok && (row[icf] == 1.0) == (q.k0c() < q.k0q());
        }
        expect(ok, "fig4 boundary");
    }

    {
        auto c = sweep("fig5");
        size_t ir = c.col("r0"), il = c.col("lambda_r0"), irate = c.col("rate");
        bool ok = !c.rows.empty();
        for (auto& row : c.rows) {
            double lam = row[il] / row[ir];
            if (std::abs(lam - 1) < 1e-12) continue;
            Qubit q(row[ir], lam);
            double k0 = std::min(q.k0q(), q.k0c());
            ok = ok && std::abs(row[irate] - k0 * k0 / (lam * lam)) <= 1e-10 * std::max(1.0, row[irate]);
        }
        expect(ok, "fig5 rates");
    }

    struct F { const char* target; double r0, lr0; };
    for (F f : {F{"fig6a", 1.0 / 3.0, 0.8}, F{"fig6b", 0.8, 1.0 / 3.0}, F{"fig6c", 0.5, 0.125}}) {
        auto c = sweep(f.target);
        Qubit q(f.r0, f.lr0 / f.r0);
        marker_err = std::max(marker_err, std::abs(c.meta_num("k0_quantum") - q.k0q()));
        marker_err = std::max(marker_err, std::abs(c.meta_num("k0_classical") - q.k0c()));
        double lo = std::min(q.k0q(), q.k0c());
        size_t ik = c.col("k"), it = c.col("total_risk"), ie = c.col("error_bound"), ic = c.col("case");
        bool ok = !c.rows.empty();
        double prev = 0.0, prev_err = 0.0;
        for (auto& row : c.rows) {
            if (row[ik] <= lo) ok = ok && row[it] == 0.0 && row[ic] == 1.0;
            ok = ok && row[it] >= prev - prev_err - row[ie] - 1e-11;
            prev = row[it];
            prev_err = row[ie];
        }
        expect(ok && prev > 0, std::string(f.target) + " shape");
    }

    expect(marker_err <= 1e-12, "threshold markers");
    std::string detail = "marker error " + fmt(marker_err);
    for (auto& p : problems) detail += "; bad: " + p;
    return {problems.empty(), detail};
}

Outcome determinism() {
    std::string a = g_scratch + "/verify_a.json", b = g_scratch + "/verify_b.json";
    for (const auto& path : {a, b}) {
        std::string cmd = "\"" + g_cli + "\" verify --suite full --seed 42 -o \"" + path + "\" > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        if (rc == -1) return {false, "could not launch the CLI"};
    }
    std::string ja = slurp(a), jb = slurp(b);
    if (ja.empty()) return {false, "no report written"};
    return {ja == jb, std::to_string(ja.size()) + " bytes, " + (ja == jb ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <gauss_purify> <scratch-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_scratch = argv[2];

    run(1, "threshold exactness", 1, threshold_exactness);
    run(2, "closed-form vs direct l1 risk", 5, closed_form_vs_l1);
    run(3, "kernel vs two-mode unitary", 60, kernel_vs_unitary);
    run(4, "thermal fixed family", 0, thermal_fixed_family);
    run(5, "stochastic ordering", 10, stochastic_ordering);
    run(6, "vacuum ancilla optimality", 120, vacuum_optimality);
    run(7, "classical risk", 0, classical_risk);
    run(8, "qubit rates", 0, qubit_rates);
    run(9, "region rule", 0, region_rule);
    run(10, "case continuity", 0, case_continuity);
    run(11, "figure shapes", 0, figure_shapes);
    run(12, "verify determinism", 0, determinism);

    std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed") << std::endl;
    return g_failures == 0 ? 0 : 1;
}
