#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "gausspurify/error.hpp"
#include "gausspurify/fock.hpp"

using namespace gausspurify;
using cd = std::complex<double>;

namespace {

// exp(alpha a^+ - conj(alpha) a) by Taylor series on a truncated basis,
// scaled down first and squared back up. Columns far from the cutoff are
// accurate once N is large compared to |alpha|^2.
Eigen::MatrixXcd displacement_series(cd alpha, int N) {
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(N + 1, N + 1);
    for (int n = 0; n < N; ++n) {
        double r = std::sqrt(n + 1.0);
        G(n + 1, n) = alpha * r;
        G(n, n + 1) = -std::conj(alpha) * r;
    }
    int squarings = 0;
    while (G.cwiseAbs().colwise().sum().maxCoeff() > 0.25) {
        G /= 2.0;
        ++squarings;
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(N + 1, N + 1);
    Eigen::MatrixXcd term = out;
    for (int j = 1; j < 40; ++j) {
        term = (term * G / double(j)).eval();
        out += term;
    }
    for (int i = 0; i < squarings; ++i) out = (out * out).eval();
    return out;
}

}  // namespace

TEST_CASE("thermal populations and tail") {
    auto st = thermal_state(ThermalParam(0.5), 4);
    const double want[] = {0.5, 0.25, 0.125, 0.0625, 0.03125};
    for (int n = 0; n <= 4; ++n) CHECK(st[n] == doctest::Approx(want[n]).epsilon(1e-15));
    CHECK(st.tail_bound() == doctest::Approx(0.03125).epsilon(1e-15));

    auto vac = thermal_state(ThermalParam(0.0), 2);
    CHECK(vac[0] == 1.0);
    CHECK(vac[1] == 0.0);
    CHECK(vac[2] == 0.0);
    CHECK(vac.tail_bound() == 0.0);

    auto hot = thermal_state(ThermalParam(0.8), 200);
    double direct = 0.0;
    for (double p : hot.probs()) direct += p;
    CHECK(direct >= 1.0 - std::pow(0.8, 201) - 1e-14);
    for (int n = 0; n < 200; ++n) CHECK(hot[n] / hot[n + 1] == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("thermal mean photon number converges within the tail remainder") {
    for (double s : {0.1, 0.5, 0.9}) {
        for (int cutoff : {10, 50, 400}) {
            auto st = thermal_state(ThermalParam(s), cutoff);
            double target = s / (1.0 - s);
            // sum_{n > N} n (1-s) s^n = s^(N+1) (N+1 + s/(1-s))
            double remainder = std::pow(s, cutoff + 1) * (cutoff + 1 + s / (1 - s));
            CHECK(std::abs(target - st.mean_photon_number()) <= remainder + 1e-12);
        }
    }
}

TEST_CASE("thermal parameter domain") {
    CHECK_THROWS_AS(ThermalParam(1.0), DomainError);
    CHECK_THROWS_AS(ThermalParam(-0.1), DomainError);
    CHECK_THROWS_AS(ThermalParam(std::nan("")), DomainError);
    CHECK(ThermalParam::from_mean_photon_number(1.0).value() == doctest::Approx(0.5));
    CHECK_THROWS_AS(ComplexAmplitude(std::nan(""), 0.0), DomainError);
}

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(DiagonalFockState({0.5, -0.1}, 0.0), DomainError);
    CHECK_THROWS_AS(DiagonalFockState({0.7, 0.7}, 0.0), DomainError);
    CHECK_THROWS_AS(DiagonalFockState({0.3, 0.3}, 0.1), DomainError);
    CHECK_NOTHROW(DiagonalFockState({0.3, 0.3}, 0.4));

    auto st = thermal_state(ThermalParam(0.5), 10).with_cutoff(3);
    CHECK(st.cutoff() == 3);
    CHECK(st.tail_bound() == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("l1 distance") {
    auto p = thermal_state(ThermalParam(0.5), 80);
    CHECK(l1_distance(p, p).value == 0.0);

    auto q = thermal_state(ThermalParam(0.4), 80);
    CHECK(l1_distance(p, q).value == doctest::Approx(0.2).epsilon(1e-12));

    // term by term
    double direct = 0.0;
    for (int n = 0; n <= 80; ++n) direct += std::abs(0.5 * std::pow(0.5, n) - 0.6 * std::pow(0.4, n));
    CHECK(std::abs(l1_distance(p, q).value - direct) < 1e-12);

    DiagonalFockState a({1.0, 0.0}, 0.0), b({0.0, 1.0, 0.0}, 0.0);
    CHECK(l1_distance(a, b).value == 2.0);
}

TEST_CASE("l1 distance is a metric") {
    std::vector<DiagonalFockState> states;
    for (double s : {0.0, 0.2, 0.45, 0.7}) states.push_back(thermal_state(ThermalParam(s), 150));
    states.push_back(DiagonalFockState::fock(3, 10));
    for (auto& x : states)
        for (auto& y : states) {
            double dxy = l1_distance(x, y).value;
            CHECK(dxy >= 0.0);
            CHECK(dxy <= 2.0 + 1e-12);
            CHECK(std::abs(dxy - l1_distance(y, x).value) < 1e-15);
            for (auto& z : states)
                CHECK(l1_distance(x, z).value <= dxy + l1_distance(y, z).value + 1e-12);
        }
}

TEST_CASE("displacement elements against the series oracle") {
    auto d = displacement_matrix_element(0, 0, ComplexAmplitude(0.6, 0.0));
    CHECK(d.real() == doctest::Approx(std::exp(-0.18)).epsilon(1e-14));
    CHECK(std::exp(-0.18) == doctest::Approx(0.835270).epsilon(1e-6));

    for (int m = 0; m < 5; ++m)
        for (int n = 0; n < 5; ++n) {
            auto e = displacement_matrix_element(m, n, ComplexAmplitude());
            CHECK(std::abs(e - cd(m == n ? 1.0 : 0.0)) < 1e-15);
        }

    for (cd alpha : {cd(0.6, 0.0), cd(0.3, -0.4), cd(-1.2, 0.7), cd(0.0, 2.0)}) {
        auto e10 = displacement_matrix_element(1, 0, ComplexAmplitude(alpha));
        CHECK(std::abs(e10 - alpha * std::exp(-std::norm(alpha) / 2)) < 1e-15);

        auto D = displacement_series(alpha, 80);
        double worst = 0.0;
        for (int m = 0; m <= 20; ++m)
            for (int n = 0; n <= 20; ++n)
                worst = std::max(worst, std::abs(D(m, n) - displacement_matrix_element(m, n, ComplexAmplitude(alpha))));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("displacement elements stay finite at large photon numbers") {
    ComplexAmplitude alpha(1.5, -0.5);
    for (int n : {100, 250, 400}) {
        double col = 0.0;
        for (int m = 0; m <= n + 200; ++m) col += std::norm(displacement_matrix_element(m, n, alpha));
        CHECK(col == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("log factorial and binomial") {
    CHECK(log_factorial(0) == 0.0);
    CHECK(log_factorial(10) == doctest::Approx(std::log(3628800.0)).epsilon(1e-15));
    CHECK(std::exp(log_choose(10, 3)) == doctest::Approx(120.0).epsilon(1e-13));
    CHECK(std::isinf(log_choose(3, 4)));
    CHECK(std::isinf(log_choose(3, -1)));
}

TEST_CASE("compensated sum") {
    std::vector<double> xs{1.0, 1e100, 1.0, -1e100};
    CHECK(compensated_sum(xs) == 2.0);
}
