#include "gausspurify/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "gausspurify/error.hpp"
#include "gausspurify/risk.hpp"

namespace gausspurify {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct TargetName {
    SweepTarget target;
    const char* name;
};
constexpr TargetName kTargets[] = {
    {SweepTarget::fig2a, "fig2a"}, {SweepTarget::fig2b, "fig2b"}, {SweepTarget::fig3a, "fig3a"},
    {SweepTarget::fig3b, "fig3b"}, {SweepTarget::fig4, "fig4"},   {SweepTarget::fig5, "fig5"},
    {SweepTarget::fig6a, "fig6a"}, {SweepTarget::fig6b, "fig6b"}, {SweepTarget::fig6c, "fig6c"},
    {SweepTarget::custom, "custom"},
};

struct ModelName {
    SweepModel model;
    const char* name;
};
constexpr ModelName kModels[] = {
    {SweepModel::gaussian_risk, "gaussian_risk"}, {SweepModel::qubit_risk, "qubit_risk"},
    {SweepModel::k0_contour, "k0_contour"},       {SweepModel::lambda_boundary, "lambda_boundary"},
    {SweepModel::rates, "rates"},
};

double fixed_value(const SweepConfig& c, const std::string& key) {
    const auto it = c.fixed.find(key);
    if (it == c.fixed.end()) throw DomainError("sweep needs fixed parameter '" + key + "'");
    return it->second;
}

const SweepRange& range_of(const SweepConfig& c, const std::string& key) {
    const auto it = c.ranges.find(key);
    if (it == c.ranges.end()) throw DomainError("sweep needs a range for '" + key + "'");
    return it->second;
}

void require_open_unit(const SweepRange& r, const std::string& name, bool closed_low) {
    const double lo = std::min(r.start, r.stop);
    const double hi = std::max(r.start, r.stop);
    const bool low_ok = closed_low ? lo >= 0.0 : lo > 0.0;
    if (!low_ok || !(hi < 1.0)) throw DomainError("range of '" + name + "' must lie inside (0, 1)");
}

std::vector<std::string> columns_for(SweepModel model) {
    switch (model) {
        case SweepModel::gaussian_risk: return {"k", "s_tilde", "m0", "risk"};
        case SweepModel::qubit_risk:
            return {"k", "rate", "case", "classical_risk", "quantum_risk", "total_risk", "error_bound"};
        case SweepModel::k0_contour: return {"s1", "s2", "k0", "plotted"};
        case SweepModel::lambda_boundary:
            return {"r0", "lambda", "lambda_tilde", "k0_classical", "k0_amp", "shaded", "classical_first"};
        case SweepModel::rates: return {"r0", "lambda_r0", "lambda", "regime", "rate", "plotted_rate", "k0"};
    }
    return {};
}

// Outputs after the axis columns.
std::vector<double> evaluate(const SweepConfig& c, double a, double b) {
    switch (c.model) {
        case SweepModel::gaussian_risk: {
            const auto q = quantum_minimax_risk(fixed_value(c, "s1"), fixed_value(c, "s2"), a, c.kind);
            return {q.s_tilde, q.m0 ? static_cast<double>(*q.m0) : kNan, q.risk};
        }
        case SweepModel::qubit_risk: {
            const auto scenario = QubitScenario::with_k(fixed_value(c, "r0"), fixed_value(c, "lambda"), a);
            IntegrationOptions opts;
            opts.abs_tolerance = c.tolerance;
            const auto r = combined_risk(scenario, opts);
            return {scenario.rate(), static_cast<double>(r.case_id), r.classical_risk, r.quantum_risk, r.total_risk,
                    r.error_bound};
        }
        case SweepModel::k0_contour: {
            const double k0 = quantum_threshold(c.kind, a, b);
            return {k0, c.kind == ChannelKind::attenuate ? k0 : 1.0 / k0};
        }
        case SweepModel::lambda_boundary: {
            const QubitScenario s(a, b);
            const double lt = lambda_tilde(a);
            const double kc = classical_threshold(s.V1(), s.V2());
            const double ka = quantum_threshold(ChannelKind::amplify, s.s1(), s.s2());
            return {lt, kc, ka, b < lt ? 1.0 : 0.0, kc < ka ? 1.0 : 0.0};
        }
        case SweepModel::rates: {
            const double lambda = b / a;
            const QubitScenario s(a, lambda);
            const double rate = optimal_rate(s);
            const double regime = lambda > 1.0 ? 1.0 : (lambda < 1.0 ? -1.0 : 0.0);
            return {lambda, regime, rate, lambda < 1.0 ? 1.0 / rate : rate, lambda * std::sqrt(rate)};
        }
    }
    return {};
}

void add_threshold_metadata(const SweepConfig& c, SweepTable& t) {
    try {
        if (c.model == SweepModel::gaussian_risk) {
            t.metadata.emplace_back("k0_quantum", format_exact(quantum_threshold(c.kind, fixed_value(c, "s1"), fixed_value(c, "s2"))));
        } else if (c.model == SweepModel::qubit_risk) {
            const QubitScenario s(fixed_value(c, "r0"), fixed_value(c, "lambda"));
            const auto th = qubit_thresholds(s);
            t.metadata.emplace_back("quantum_kind", to_string(th.kind));
            t.metadata.emplace_back("k0_quantum", format_exact(th.k0_quantum));
            t.metadata.emplace_back("k0_classical", format_exact(th.k0_classical));
            t.metadata.emplace_back("lambda_tilde", format_exact(th.lambda_tilde));
            t.metadata.emplace_back("optimal_rate", format_exact(optimal_rate(s)));
        }
    } catch (const DomainError& e) {
        t.metadata.emplace_back("threshold_error", e.what());
    }
}

}  // namespace

std::string to_string(SweepTarget target) {
    for (const auto& t : kTargets)
        if (t.target == target) return t.name;
    return "custom";
}

std::string to_string(SweepModel model) {
    for (const auto& m : kModels)
        if (m.model == model) return m.name;
    return "gaussian_risk";
}

SweepTarget parse_sweep_target(std::string_view text) {
    for (const auto& t : kTargets)
        if (text == t.name) return t.target;
    throw DomainError("unknown sweep target '" + std::string(text) + "'");
}

SweepModel parse_sweep_model(std::string_view text) {
    for (const auto& m : kModels)
        if (text == m.name) return m.model;
    throw DomainError("unknown sweep model '" + std::string(text) + "'");
}

std::vector<std::string> sweep_axes(SweepModel model) {
    switch (model) {
        case SweepModel::gaussian_risk:
        case SweepModel::qubit_risk: return {"k"};
        case SweepModel::k0_contour: return {"s1", "s2"};
        case SweepModel::lambda_boundary: return {"r0", "lambda"};
        case SweepModel::rates: return {"r0", "lambda_r0"};
    }
    return {};
}

std::vector<double> SweepRange::points() const {
    if (steps < 2) throw DomainError("a sweep range needs at least 2 steps");
    std::vector<double> out(static_cast<std::size_t>(steps));
    const double span = stop - start;
    for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = start + span * i / (steps - 1);
    out.back() = stop;
    return out;
}

SweepConfig SweepConfig::defaults(SweepTarget target) {
    SweepConfig c;
    c.target = target;
    const SweepRange unit_grid{0.02, 0.98, 49};
    switch (target) {
        case SweepTarget::fig2a:
            c.model = SweepModel::gaussian_risk;
            c.kind = ChannelKind::attenuate;
            c.fixed = {{"s1", 0.8}, {"s2", 0.4}};
            c.ranges["k"] = {0.01, 1.0, 100};
            break;
        case SweepTarget::fig2b:
            c.model = SweepModel::gaussian_risk;
            c.kind = ChannelKind::amplify;
            c.fixed = {{"s1", 0.4}, {"s2", 0.8}};
            c.ranges["k"] = {1.0, 3.0, 101};
            break;
        case SweepTarget::fig3a:
        case SweepTarget::fig3b:
            c.model = SweepModel::k0_contour;
            c.kind = target == SweepTarget::fig3a ? ChannelKind::attenuate : ChannelKind::amplify;
            c.ranges["s1"] = unit_grid;
            c.ranges["s2"] = unit_grid;
            break;
        case SweepTarget::fig4:
            c.model = SweepModel::lambda_boundary;
            c.kind = ChannelKind::amplify;
            c.ranges["r0"] = unit_grid;
            c.ranges["lambda"] = unit_grid;
            break;
        case SweepTarget::fig5:
            c.model = SweepModel::rates;
            c.ranges["r0"] = unit_grid;
            c.ranges["lambda_r0"] = unit_grid;
            break;
        case SweepTarget::fig6a:
            c.model = SweepModel::qubit_risk;
            c.fixed = {{"r0", 1.0 / 3.0}, {"lambda", 2.4}};
            c.ranges["k"] = {0.01, 1.0, 100};
            break;
        case SweepTarget::fig6b:
            c.model = SweepModel::qubit_risk;
            c.kind = ChannelKind::amplify;
            c.fixed = {{"r0", 0.8}, {"lambda", 5.0 / 12.0}};
            c.ranges["k"] = {1.0, 2.5, 151};
            break;
        case SweepTarget::fig6c:
            c.model = SweepModel::qubit_risk;
            c.kind = ChannelKind::amplify;
            c.fixed = {{"r0", 0.5}, {"lambda", 0.25}};
            c.ranges["k"] = {1.0, 2.5, 151};
            break;
        case SweepTarget::custom: break;
    }
    return c;
}

void SweepConfig::merge_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("sweep config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "target") {
            target = parse_sweep_target(value.get<std::string>());
        } else if (key == "model") {
            model = parse_sweep_model(value.get<std::string>());
        } else if (key == "kind") {
            kind = parse_channel_kind(value.get<std::string>());
        } else if (key == "fixed") {
            for (const auto& [name, v] : value.items()) fixed[name] = v.get<double>();
        } else if (key == "ranges") {
            for (const auto& [name, v] : value.items()) {
                SweepRange r = ranges.count(name) ? ranges[name] : SweepRange{};
                if (v.contains("start")) r.start = v.at("start").get<double>();
                if (v.contains("stop")) r.stop = v.at("stop").get<double>();
                if (v.contains("steps")) r.steps = v.at("steps").get<int>();
                ranges[name] = r;
            }
        } else if (key == "output") {
            output = value.get<std::string>();
        } else if (key == "threads") {
            threads = value.get<unsigned>();
        } else if (key == "tolerance") {
            tolerance = value.get<double>();
        } else {
            throw DomainError("unknown sweep config key '" + key + "'");
        }
    }
}

nlohmann::json SweepConfig::to_json() const {
    nlohmann::json j;
    j["target"] = to_string(target);
    j["model"] = to_string(model);
    j["kind"] = to_string(kind);
    j["fixed"] = fixed;
    auto& r = j["ranges"] = nlohmann::json::object();
    for (const auto& [name, range] : ranges) r[name] = {{"start", range.start}, {"stop", range.stop}, {"steps", range.steps}};
    j["output"] = output;
    j["threads"] = threads;
    j["tolerance"] = tolerance;
    return j;
}

void SweepConfig::validate() const {
    if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
    for (const auto& axis : sweep_axes(model)) {
        const auto& r = range_of(*this, axis);
        if (r.steps < 2) throw DomainError("range of '" + axis + "' needs at least 2 steps");
        if (!std::isfinite(r.start) || !std::isfinite(r.stop)) throw DomainError("range of '" + axis + "' must be finite");
    }
    switch (model) {
        case SweepModel::gaussian_risk: {
            const double s1 = fixed_value(*this, "s1");
            const double s2 = fixed_value(*this, "s2");
            if (!(s1 >= 0.0 && s1 < 1.0) || !(s2 >= 0.0 && s2 < 1.0)) throw DomainError("s1 and s2 must lie in [0, 1)");
            const auto& k = range_of(*this, "k");
            const double lo = std::min(k.start, k.stop);
            const double hi = std::max(k.start, k.stop);
            if (!(lo > 0.0)) throw DomainError("k range must be positive");
            if (kind == ChannelKind::attenuate && hi > 1.0) throw DomainError("attenuation sweeps need k <= 1");
            if (kind == ChannelKind::amplify && lo < 1.0) throw DomainError("amplification sweeps need k >= 1");
            break;
        }
        case SweepModel::qubit_risk: {
            const QubitScenario s(fixed_value(*this, "r0"), fixed_value(*this, "lambda"));
            const auto& k = range_of(*this, "k");
            if (!(std::min(k.start, k.stop) > 0.0)) throw DomainError("k range must be positive");
            break;
        }
        case SweepModel::k0_contour:
            require_open_unit(range_of(*this, "s1"), "s1", true);
            require_open_unit(range_of(*this, "s2"), "s2", true);
            break;
        case SweepModel::lambda_boundary:
            require_open_unit(range_of(*this, "r0"), "r0", false);
            require_open_unit(range_of(*this, "lambda"), "lambda", false);
            break;
        case SweepModel::rates:
            require_open_unit(range_of(*this, "r0"), "r0", false);
            require_open_unit(range_of(*this, "lambda_r0"), "lambda_r0", false);
            break;
    }
}

SweepTable run_sweep(const SweepConfig& config) {
    config.validate();
    const auto axes = sweep_axes(config.model);
    const auto first = range_of(config, axes[0]).points();
    const std::vector<double> second = axes.size() > 1 ? range_of(config, axes[1]).points() : std::vector<double>{kNan};
    const std::size_t n_points = first.size() * second.size();

    SweepTable table;
    table.columns = columns_for(config.model);
    const std::size_t n_out = table.columns.size() - axes.size();
    table.rows.assign(n_points, {});

    std::atomic<std::size_t> next{0};
    std::atomic<int> warnings{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n_points; i = next++) {
            const double a = first[i / second.size()];
            const double b = second[i % second.size()];
            std::vector<double> row{a};
            if (axes.size() > 1) row.push_back(b);
            try {
                const auto out = evaluate(config, a, b);
                row.insert(row.end(), out.begin(), out.end());
            } catch (const DomainError&) {
                row.resize(row.size() + n_out, kNan);
                ++warnings;
            } catch (const ConvergenceError&) {
                row.resize(row.size() + n_out, kNan);
                ++warnings;
            }
            table.rows[i] = std::move(row);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(n_points)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    table.warnings = warnings.load();

    table.metadata.emplace_back("tool", std::string("gauss_purify ") + kToolVersion);
    table.metadata.emplace_back("target", to_string(config.target));
    table.metadata.emplace_back("model", to_string(config.model));
    if (config.model == SweepModel::gaussian_risk || config.model == SweepModel::k0_contour)
        table.metadata.emplace_back("kind", to_string(config.kind));
    for (const auto& [name, value] : config.fixed) table.metadata.emplace_back("fixed " + name, format_exact(value));
    for (const auto& axis : axes) {
        const auto& r = range_of(config, axis);
        table.metadata.emplace_back("range " + axis, format_exact(r.start) + ":" + format_exact(r.stop) + ":" + std::to_string(r.steps));
    }
    if (config.model == SweepModel::qubit_risk) table.metadata.emplace_back("tolerance", format_exact(config.tolerance));
    add_threshold_metadata(config, table);
    table.metadata.emplace_back("warnings", std::to_string(table.warnings));
    return table;
}

void write_csv(const SweepTable& table, std::ostream& out) {
    for (const auto& [key, value] : table.metadata) out << "# " << key << ": " << value << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

void write_csv_file(const SweepTable& table, const std::string& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(table, file);
    file.flush();
    if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string format_exact(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

unsigned threads_from_environment(unsigned fallback) {
    const char* env = std::getenv("GAUSS_PURIFY_THREADS");
    if (!env || !*env) return fallback;
    unsigned value = 0;
    const auto* end = env + std::char_traits<char>::length(env);
    const auto res = std::from_chars(env, end, value);
    if (res.ec != std::errc{} || res.ptr != end || value == 0) return fallback;
    return value;
}

}  // namespace gausspurify
