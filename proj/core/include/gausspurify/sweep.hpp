#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gausspurify/kind.hpp"

namespace gausspurify {

enum class SweepTarget { fig2a, fig2b, fig3a, fig3b, fig4, fig5, fig6a, fig6b, fig6c, custom };

/// What is evaluated at each grid point.
///   gaussian_risk   axis k; fixed s1, s2, kind
///   qubit_risk      axis k; fixed r0, lambda
///   k0_contour      axes s1, s2; kind
///   lambda_boundary axes r0, lambda (dilution side)
///   rates           axes r0, lambda_r0
enum class SweepModel { gaussian_risk, qubit_risk, k0_contour, lambda_boundary, rates };

std::string to_string(SweepTarget target);
std::string to_string(SweepModel model);
SweepTarget parse_sweep_target(std::string_view text);
SweepModel parse_sweep_model(std::string_view text);
/// Axis names of a model, outermost first.
std::vector<std::string> sweep_axes(SweepModel model);

struct SweepRange {
    double start = 0.0;
    double stop = 1.0;
    int steps = 2;
    /// steps points, both ends included.
    std::vector<double> points() const;
};

struct SweepConfig {
    SweepTarget target = SweepTarget::custom;
    SweepModel model = SweepModel::gaussian_risk;
    ChannelKind kind = ChannelKind::attenuate;
    std::map<std::string, double> fixed;
    std::map<std::string, SweepRange> ranges;
    std::string output;
    unsigned threads = 1;
    /// Absolute tolerance of the product-model integral (qubit case 4).
    double tolerance = 1e-8;

    /// Figure targets carry their fixed parameters; custom starts empty.
    static SweepConfig defaults(SweepTarget target);

    /// Overlays the keys present in `j` (see docs/sweep_config.md).
    void merge_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Throws DomainError when a range or fixed parameter is missing or
    /// outside the model's domain, or steps < 2.
    void validate() const;
};

struct SweepTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    /// Grid points whose evaluation failed; emitted as nan.
    int warnings = 0;
};

/// Evaluates the grid on `config.threads` workers; rows come back in grid
/// order (first axis outermost) regardless of completion order.
SweepTable run_sweep(const SweepConfig& config);

/// `#`-prefixed metadata lines, a header row, then one line per grid point.
void write_csv(const SweepTable& table, std::ostream& out);
/// write_csv into a file; throws std::runtime_error when it cannot be written.
void write_csv_file(const SweepTable& table, const std::string& path);

/// %.12g, with nan/inf spelled "nan", "inf", "-inf".
std::string format_number(double x);
/// Shortest representation that reads back to the same double.
std::string format_exact(double x);

/// Worker count from GAUSS_PURIFY_THREADS, falling back to `fallback`.
unsigned threads_from_environment(unsigned fallback = 1);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace gausspurify
