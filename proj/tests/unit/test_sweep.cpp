#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "gausspurify/error.hpp"
#include "gausspurify/risk.hpp"
#include "gausspurify/sweep.hpp"

using namespace gausspurify;

namespace {

std::string csv_of(const SweepConfig& c) {
    std::ostringstream os;
    write_csv(run_sweep(c), os);
    return os.str();
}

std::string meta(const SweepTable& t, const std::string& key) {
    for (const auto& [k, v] : t.metadata)
        if (k == key) return v;
    return {};
}

size_t col(const SweepTable& t, const std::string& name) {
    for (size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
}

}  // namespace

TEST_CASE("range points include both ends") {
    SweepRange r{0.0, 1.0, 5};
    auto p = r.points();
    REQUIRE(p.size() == 5);
    CHECK(p.front() == 0.0);
    CHECK(p[2] == 0.5);
    CHECK(p.back() == 1.0);
}

TEST_CASE("figure defaults carry the target parameters") {
    auto a = SweepConfig::defaults(SweepTarget::fig2a);
    CHECK(a.fixed.at("s1") == 0.8);
    CHECK(a.fixed.at("s2") == 0.4);
    CHECK(a.kind == ChannelKind::attenuate);
    auto b = SweepConfig::defaults(SweepTarget::fig2b);
    CHECK(b.fixed.at("s1") == 0.4);
    CHECK(b.fixed.at("s2") == 0.8);
    CHECK(b.kind == ChannelKind::amplify);

    struct C { SweepTarget t; double r0, lr0; };
    for (C c : {C{SweepTarget::fig6a, 1.0 / 3.0, 0.8}, C{SweepTarget::fig6b, 0.8, 1.0 / 3.0}, C{SweepTarget::fig6c, 0.5, 0.125}}) {
        auto d = SweepConfig::defaults(c.t);
        CHECK(d.fixed.at("r0") == doctest::Approx(c.r0).epsilon(1e-15));
        CHECK(d.fixed.at("r0") * d.fixed.at("lambda") == doctest::Approx(c.lr0).epsilon(1e-15));
    }
}

TEST_CASE("validation") {
    SweepConfig c = SweepConfig::defaults(SweepTarget::fig2a);
    c.ranges["k"].steps = 1;
    CHECK_THROWS_AS(c.validate(), DomainError);
    SweepConfig d = SweepConfig::defaults(SweepTarget::fig2a);
    d.fixed.erase("s2");
    CHECK_THROWS_AS(d.validate(), DomainError);
    CHECK_THROWS_AS(parse_sweep_target("fig7"), DomainError);
}

TEST_CASE("json config overlay") {
    auto c = SweepConfig::defaults(SweepTarget::fig2a);
    c.merge_json(nlohmann::json::parse(R"({"fixed": {"s1": 0.9}, "ranges": {"k": {"steps": 11}}, "threads": 2})"));
    CHECK(c.fixed.at("s1") == 0.9);
    CHECK(c.fixed.at("s2") == 0.4);
    CHECK(c.ranges.at("k").steps == 11);
    CHECK(c.ranges.at("k").start == 0.01);
    CHECK(c.threads == 2);

    auto round = SweepConfig::defaults(SweepTarget::custom);
    round.merge_json(c.to_json());
    CHECK(round.to_json() == c.to_json());
}

TEST_CASE("fig2a shape and threshold marker") {
    auto t = run_sweep(SweepConfig::defaults(SweepTarget::fig2a));
    double k0 = quantum_threshold(ChannelKind::attenuate, 0.8, 0.4);
    CHECK(std::stod(meta(t, "k0_quantum")) == k0);
    size_t ik = col(t, "k"), ir = col(t, "risk");
    double prev = -1.0;
    for (const auto& row : t.rows) {
        if (row[ik] <= k0) {
            CHECK(row[ir] == 0.0);
        } else {
            CHECK(row[ir] > prev);
            prev = row[ir];
        }
    }
    CHECK(t.warnings == 0);
}

TEST_CASE("fig4 shaded column follows the boundary") {
    auto t = run_sweep(SweepConfig::defaults(SweepTarget::fig4));
    size_t ir = col(t, "r0"), il = col(t, "lambda"), is = col(t, "shaded"), ic = col(t, "classical_first");
    for (const auto& row : t.rows) {
        bool below = row[il] < lambda_tilde(row[ir]);
        CHECK((row[is] == 1.0) == below);
        CHECK(row[ic] == row[is]);
    }
}

TEST_CASE("fig5 rates") {
    auto t = run_sweep(SweepConfig::defaults(SweepTarget::fig5));
    size_t ir = col(t, "r0"), il = col(t, "lambda"), irate = col(t, "rate");
    for (const auto& row : t.rows) {
        if (std::abs(row[il] - 1.0) < 1e-12) continue;
        CHECK(row[irate] == doctest::Approx(optimal_rate(QubitScenario(row[ir], row[il]))).epsilon(1e-12));
    }
}

TEST_CASE("points outside the domain become nan rows") {
    // the attenuation threshold needs s1 >= s2
    SweepConfig c;
    c.model = SweepModel::k0_contour;
    c.kind = ChannelKind::attenuate;
    c.ranges["s1"] = {0.1, 0.9, 5};
    c.ranges["s2"] = {0.1, 0.9, 5};
    auto t = run_sweep(c);
    CHECK(t.rows.size() == 25);
    CHECK(t.warnings == 10);
    size_t i1 = col(t, "s1"), i2 = col(t, "s2"), ik = col(t, "k0");
    for (const auto& row : t.rows) CHECK(std::isnan(row[ik]) == (row[i1] < row[i2]));
    CHECK(csv_of(c).find(",nan") != std::string::npos);

    SweepConfig bad = SweepConfig::defaults(SweepTarget::fig2a);
    bad.ranges["k"] = {0.5, 1.5, 11};
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("csv is independent of the worker count") {
    for (auto target : {SweepTarget::fig2b, SweepTarget::fig6c}) {
        auto one = SweepConfig::defaults(target);
        auto four = one;
        four.threads = 4;
        CHECK(csv_of(one) == csv_of(four));
        CHECK(csv_of(four) == csv_of(four));
    }
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(std::stod(format_exact(0.1 + 0.2)) == 0.1 + 0.2);
}
