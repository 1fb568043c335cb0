#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gausspurify/kind.hpp"

namespace gausspurify {

enum class VerifySuite { fast, full };

VerifySuite parse_verify_suite(std::string_view text);

/// Closed forms under test. Replacing one lets a deliberately broken
/// formula be fed through the battery.
struct VerifyFormulas {
    std::function<double(ChannelKind, double, double)> quantum_threshold;
    std::function<double(ChannelKind, double, double)> s_tilde;

    static VerifyFormulas library();
};

struct VerifyOptions {
    VerifySuite suite = VerifySuite::fast;
    std::uint64_t seed = 42;
    VerifyFormulas formulas = VerifyFormulas::library();
};

/// Runs every check of the suite and returns
///   {"suite", "seed", "passed", "checks": [{"name", "passed", ...}, ...]}.
/// The report holds no timings, so equal options give identical JSON.
nlohmann::json run_verify_suite(const VerifyOptions& options);

}  // namespace gausspurify
