#include <doctest.h>

#include "gausspurify/risk.hpp"
#include "gausspurify/verify.hpp"

using namespace gausspurify;

namespace {

const nlohmann::json* find_check(const nlohmann::json& report, const std::string& name) {
    for (const auto& c : report.at("checks"))
        if (c.at("name") == name) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("fast suite passes") {
    auto report = run_verify_suite({});
    CHECK(report.at("passed").get<bool>());
    for (const auto& c : report.at("checks")) {
        INFO(c.at("name").get<std::string>());
        CHECK(c.at("passed").get<bool>());
    }
}

TEST_CASE("fast suite is deterministic") {
    VerifyOptions o;
    o.seed = 1234;
    CHECK(run_verify_suite(o).dump() == run_verify_suite(o).dump());
}

TEST_CASE("perturbed threshold formula is caught") {
    VerifyOptions o;
    o.formulas.quantum_threshold = [](ChannelKind kind, double s1, double s2) {
        return quantum_threshold(kind, s1, s2) * (1.0 + 1e-3);
    };
    auto report = run_verify_suite(o);
    CHECK_FALSE(report.at("passed").get<bool>());
    const auto* c = find_check(report, "threshold_exactness");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->at("passed").get<bool>());
}

TEST_CASE("perturbed s tilde is caught") {
    VerifyOptions o;
    o.formulas.s_tilde = [](ChannelKind kind, double s1, double k) { return s_tilde(kind, s1, k) * (1.0 - 1e-3); };
    auto report = run_verify_suite(o);
    const auto* c = find_check(report, "threshold_exactness");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->at("passed").get<bool>());
}
