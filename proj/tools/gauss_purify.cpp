#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gausspurify/error.hpp"
#include "gausspurify/risk.hpp"
#include "gausspurify/sweep.hpp"
#include "gausspurify/verify.hpp"

namespace gp = gausspurify;

namespace {

void print_field(const std::string& key, double value) {
    std::cout << key << ": " << gp::format_number(value) << '\n';
}

unsigned worker_cap(std::optional<unsigned> requested) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned env = gp::threads_from_environment(0);
    unsigned n = requested.value_or(env ? env : hw);
    if (env) n = std::min(n, env);
    return std::max(1u, n);
}

// "name=value"
std::pair<std::string, double> parse_fixed(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw gp::DomainError("expected name=value, got '" + text + "'");
    return {text.substr(0, eq), std::stod(text.substr(eq + 1))};
}

// "name=start:stop:steps"
std::pair<std::string, gp::SweepRange> parse_range(const std::string& text) {
    const auto eq = text.find('=');
    const auto c1 = text.find(':', eq);
    const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
    if (eq == std::string::npos || eq == 0 || c1 == std::string::npos || c2 == std::string::npos)
        throw gp::DomainError("expected name=start:stop:steps, got '" + text + "'");
    gp::SweepRange r;
    r.start = std::stod(text.substr(eq + 1, c1 - eq - 1));
    r.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    r.steps = std::stoi(text.substr(c2 + 1));
    return {text.substr(0, eq), r};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal Gaussian attenuation/amplification and qubit purification/dilution risks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gp::kToolVersion);

    // risk -------------------------------------------------------------------
    auto* risk = app.add_subcommand("risk", "Minimax risk at a single point");
    bool gaussian = false;
    bool qubit = false;
    std::string kind_text = "att";
    double s1 = 0, s2 = 0, r0 = 0, lambda = 0;
    std::optional<double> k, rate, V1, V2;
    double tolerance = 1e-8;
    bool as_json = false;
    auto* g_flag = risk->add_flag("--gaussian", gaussian, "Single-mode Gaussian problem (s1, s2, k)");
    auto* q_flag = risk->add_flag("--qubit", qubit, "Qubit problem (r0, lambda, k or rate)");
    g_flag->excludes(q_flag);
    risk->add_option("--kind", kind_text, "att or amp (Gaussian problem)")->check(CLI::IsMember({"att", "amp"}));
    risk->add_option("--s1", s1, "Input purity parameter");
    risk->add_option("--s2", s2, "Target purity parameter");
    risk->add_option("--V1", V1, "Input classical variance (optional)");
    risk->add_option("--V2", V2, "Target classical variance (optional)");
    risk->add_option("--r0", r0, "Input Bloch radius");
    risk->add_option("--lambda", lambda, "Bloch radius scale factor");
    auto* k_opt = risk->add_option("--k", k, "Scale factor k");
    auto* rate_opt = risk->add_option("--rate", rate, "Copy rate m/n (qubit problem)");
    k_opt->excludes(rate_opt);
    risk->add_option("--tolerance", tolerance, "Integral tolerance for the combined case")->check(CLI::PositiveNumber);
    risk->add_flag("--json", as_json, "Print JSON");

    // sweep ------------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "Figure data and custom parameter sweeps as CSV");
    std::string target_text;
    std::string config_path;
    std::string output_path;
    std::string model_text;
    std::string sweep_kind;
    std::vector<std::string> fixed_args;
    std::vector<std::string> range_args;
    std::optional<unsigned> threads;
    std::optional<double> sweep_tolerance;
    sweep->add_option("--target", target_text, "fig2a, fig2b, fig3a, fig3b, fig4, fig5, fig6a, fig6b, fig6c or custom");
    sweep->add_option("--config", config_path, "JSON config file (flags override it)")->check(CLI::ExistingFile);
    sweep->add_option("-o,--output", output_path, "CSV path (default: stdout)");
    sweep->add_option("--model", model_text, "gaussian_risk, qubit_risk, k0_contour, lambda_boundary or rates");
    sweep->add_option("--kind", sweep_kind, "att or amp")->check(CLI::IsMember({"att", "amp"}));
    sweep->add_option("--fixed", fixed_args, "Fixed parameter name=value (repeatable)");
    sweep->add_option("--range", range_args, "Swept axis name=start:stop:steps (repeatable)");
    sweep->add_option("--threads", threads, "Worker threads (capped by GAUSS_PURIFY_THREADS)")->check(CLI::PositiveNumber);
    sweep->add_option("--tolerance", sweep_tolerance, "Integral tolerance")->check(CLI::PositiveNumber);

    // rates ------------------------------------------------------------------
    auto* rates = app.add_subcommand("rates", "Optimal purification/dilution rate");
    double rates_r0 = 0, rates_lambda = 0;
    rates->add_option("--r0", rates_r0, "Input Bloch radius")->required();
    rates->add_option("--lambda", rates_lambda, "Bloch radius scale factor")->required();

    // thresholds -------------------------------------------------------------
    auto* thresholds = app.add_subcommand("thresholds", "Exact-preparation thresholds");
    std::string th_kind = "att";
    std::optional<double> th_s1, th_s2, th_r0, th_lambda;
    thresholds->add_option("--kind", th_kind, "att or amp")->check(CLI::IsMember({"att", "amp"}));
    thresholds->add_option("--s1", th_s1, "Input purity parameter");
    thresholds->add_option("--s2", th_s2, "Target purity parameter");
    thresholds->add_option("--r0", th_r0, "Input Bloch radius");
    thresholds->add_option("--lambda", th_lambda, "Bloch radius scale factor");

    // verify -----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "Run the verification battery and print a JSON report");
    std::string suite_text = "fast";
    std::uint64_t seed = 42;
    std::string report_path;
    verify->add_option("--suite", suite_text, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--seed", seed, "Random seed");
    verify->add_option("-o,--output", report_path, "Write the report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (risk->parsed()) {
            if (!gaussian && !qubit) throw CLI::ValidationError("risk", "choose --gaussian or --qubit");
            if (gaussian) {
                if (!k) throw CLI::ValidationError("risk", "--gaussian needs --k");
                const auto kind = gp::parse_channel_kind(kind_text);
                const auto q = gp::quantum_minimax_risk(s1, s2, *k, kind);
                nlohmann::json j{{"model", "gaussian"}, {"kind", gp::to_string(kind)}, {"k", *k}};
                j["k0_quantum"] = gp::quantum_threshold(kind, s1, s2);
                j["s_tilde"] = q.s_tilde;
                j["m0"] = q.m0 ? nlohmann::json(*q.m0) : nlohmann::json(nullptr);
                j["quantum_risk"] = q.risk;
                double total = q.risk;
                if (V1 || V2) {
                    if (!V1 || !V2) throw CLI::ValidationError("risk", "--V1 and --V2 go together");
                    j["k0_classical"] = gp::classical_threshold(*V1, *V2);
                    j["classical_risk"] = gp::classical_minimax_risk(*V1, *V2, *k);
                }
                j["risk"] = total;
                if (as_json) {
                    std::cout << j.dump(2) << '\n';
                } else {
                    std::cout << "model: gaussian\nkind: " << gp::to_string(kind) << '\n';
                    print_field("k", *k);
                    print_field("k0_quantum", j["k0_quantum"].get<double>());
                    print_field("s_tilde", q.s_tilde);
                    std::cout << "m0: " << (q.m0 ? std::to_string(*q.m0) : "none") << '\n';
                    if (j.contains("classical_risk")) {
                        print_field("k0_classical", j["k0_classical"].get<double>());
                        print_field("classical_risk", j["classical_risk"].get<double>());
                    }
                    print_field("risk", total);
                }
                return 0;
            }
            if (!k && !rate) throw CLI::ValidationError("risk", "--qubit needs --k or --rate");
            const auto scenario = k ? gp::QubitScenario::with_k(r0, lambda, *k) : gp::QubitScenario::with_rate(r0, lambda, *rate);
            gp::IntegrationOptions opts;
            opts.abs_tolerance = tolerance;
            const auto r = gp::combined_risk(scenario, opts);
            if (as_json) {
                nlohmann::json j{{"model", "qubit"},
                                 {"case", r.case_id},
                                 {"case_description", gp::describe_case(r.case_id)},
                                 {"kind", gp::to_string(r.kind)},
                                 {"k", r.k},
                                 {"rate", scenario.rate()},
                                 {"k0_quantum", r.k0_quantum},
                                 {"k0_classical", r.k0_classical},
                                 {"classical_risk", r.classical_risk},
                                 {"quantum_risk", r.quantum_risk},
                                 {"total_risk", r.total_risk},
                                 {"error_bound", r.error_bound}};
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "model: qubit\ncase: " << r.case_id << " (" << gp::describe_case(r.case_id) << ")\n";
                std::cout << "kind: " << gp::to_string(r.kind) << '\n';
                print_field("k", r.k);
                print_field("rate", scenario.rate());
                print_field("k0_quantum", r.k0_quantum);
                print_field("k0_classical", r.k0_classical);
                print_field("classical_risk", r.classical_risk);
                print_field("quantum_risk", r.quantum_risk);
                print_field("total_risk", r.total_risk);
                if (r.case_id == 4) print_field("error_bound", r.error_bound);
            }
            return 0;
        }

        if (sweep->parsed()) {
            nlohmann::json file;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                file = nlohmann::json::parse(in);
            }
            auto target = gp::SweepTarget::custom;
            if (!target_text.empty()) target = gp::parse_sweep_target(target_text);
            else if (file.contains("target")) target = gp::parse_sweep_target(file.at("target").get<std::string>());
            auto config = gp::SweepConfig::defaults(target);
            if (!file.is_null()) config.merge_json(file);
            config.target = target;
            if (!model_text.empty()) config.model = gp::parse_sweep_model(model_text);
            if (!sweep_kind.empty()) config.kind = gp::parse_channel_kind(sweep_kind);
            for (const auto& f : fixed_args) config.fixed[parse_fixed(f).first] = parse_fixed(f).second;
            for (const auto& r : range_args) {
                const auto [name, range] = parse_range(r);
                config.ranges[name] = range;
            }
            if (!output_path.empty()) config.output = output_path;
            if (sweep_tolerance) config.tolerance = *sweep_tolerance;
            config.threads = worker_cap(threads ? threads : (file.contains("threads") ? std::optional<unsigned>(config.threads) : std::nullopt));

            const auto table = gp::run_sweep(config);
            if (config.output.empty() || config.output == "-") gp::write_csv(table, std::cout);
            else gp::write_csv_file(table, config.output);
            if (table.warnings > 0)
                std::cerr << "warning: " << table.warnings << " grid point(s) outside the domain were written as nan\n";
            return 0;
        }

        if (rates->parsed()) {
            const gp::QubitScenario s(rates_r0, rates_lambda);
            const auto th = gp::qubit_thresholds(s);
            std::string regime = rates_lambda > 1.0 ? "purification" : (rates_lambda < 1.0 ? "dilution" : "identity");
            std::string governing = "none";
            if (rates_lambda > 1.0) governing = "k0_att";
            else if (rates_lambda < 1.0) governing = rates_lambda < th.lambda_tilde ? "k0_classical" : "k0_amp";
            std::cout << "regime: " << regime << '\n';
            print_field("lambda_tilde", th.lambda_tilde);
            std::cout << "governing_threshold: " << governing << '\n';
            print_field("k0_quantum", th.k0_quantum);
            print_field("k0_classical", th.k0_classical);
            print_field("optimal_rate", gp::optimal_rate(s));
            return 0;
        }

        if (thresholds->parsed()) {
            bool any = false;
            if (th_s1 || th_s2) {
                if (!th_s1 || !th_s2) throw CLI::ValidationError("thresholds", "--s1 and --s2 go together");
                const auto kind = gp::parse_channel_kind(th_kind);
                std::cout << "kind: " << gp::to_string(kind) << '\n';
                print_field("k0_quantum", gp::quantum_threshold(kind, *th_s1, *th_s2));
                any = true;
            }
            if (th_r0 || th_lambda) {
                if (!th_r0 || !th_lambda) throw CLI::ValidationError("thresholds", "--r0 and --lambda go together");
                const gp::QubitScenario s(*th_r0, *th_lambda);
                const auto th = gp::qubit_thresholds(s);
                print_field("s1", s.s1());
                print_field("s2", s.s2());
                print_field("V1", s.V1());
                print_field("V2", s.V2());
                std::cout << "quantum_kind: " << gp::to_string(th.kind) << '\n';
                print_field("k0_quantum", th.k0_quantum);
                print_field("k0_classical", th.k0_classical);
                print_field("lambda_tilde", th.lambda_tilde);
                any = true;
            }
            if (!any) throw CLI::ValidationError("thresholds", "give --s1/--s2 or --r0/--lambda");
            return 0;
        }

        if (verify->parsed()) {
            gp::VerifyOptions options;
            options.suite = gp::parse_verify_suite(suite_text);
            options.seed = seed;
            const auto report = gp::run_verify_suite(options);
            const std::string text = report.dump(2) + "\n";
            if (report_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
                if (!out) throw std::runtime_error("cannot open '" + report_path + "' for writing");
                out << text;
            }
            return report.at("passed").get<bool>() ? 0 : 1;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const gp::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
