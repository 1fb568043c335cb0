#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gausspurify/error.hpp"
#include "gausspurify/risk.hpp"

namespace gausspurify {

namespace {

struct TermResult {
    double value = 0.0;
    double error = 0.0;
};

// Order-independent reduction so that serial and threaded runs agree bit for bit.
double pairwise_sum(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += xs[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

double normal_density(double x, double variance) {
    return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

}  // namespace

ProductRiskDiagnostics product_gaussian_risk(double st, double s2, double variance1, double variance2,
                                             const IntegrationOptions& options) {
    if (!(st >= 0.0 && st < 1.0) || !(s2 >= 0.0 && s2 < 1.0))
        throw DomainError("purity parameters must lie in [0, 1)");
    if (!(variance1 > 0.0) || !(variance2 > 0.0)) throw DomainError("variances must be positive");
    if (!(options.abs_tolerance > 0.0)) throw DomainError("tolerance must be positive");

    ProductRiskDiagnostics d;
    const double tol = options.abs_tolerance;

    // Photon sum: sum_{n>N} int |..| <= s~^{N+1} + s2^{N+1}.
    int n_terms = 1;
    while (std::pow(st, n_terms) + std::pow(s2, n_terms) > 0.25 * tol) {
        ++n_terms;
        if (n_terms > 1'000'000)
            throw ConvergenceError("photon-number sum does not converge", std::pow(st, n_terms) + std::pow(s2, n_terms));
    }
    d.photon_terms = n_terms;
    d.photon_tail_bound = std::pow(st, n_terms) + std::pow(s2, n_terms);

    const double sigma_max = std::sqrt(std::max(variance1, variance2));
    d.x_limit = options.x_range_sigmas * sigma_max;
    // Mass of either normal outside [-L, L], summed over all photon numbers.
    d.x_tail_bound = std::erfc(d.x_limit / std::sqrt(2.0 * variance1)) + std::erfc(d.x_limit / std::sqrt(2.0 * variance2));

    // Integrand is even in x; integrate over [0, L] and double.
    const double rel_tol = tol / 16.0;
    auto term = [&](int n) {
        const double pn = (1.0 - st) * std::pow(st, n);
        const double qn = (1.0 - s2) * std::pow(s2, n);
        TermResult r;
        if (pn == 0.0 && qn == 0.0) return r;
        auto f = [&](double x) { return std::abs(pn * normal_density(x, variance1) - qn * normal_density(x, variance2)); };
        double err = 0.0;
        const double half = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, d.x_limit, 30, rel_tol, &err);
        r.value = 2.0 * half;
        r.error = 2.0 * err;
        return r;
    };

    std::vector<double> values(static_cast<std::size_t>(n_terms));
    std::vector<double> errors(static_cast<std::size_t>(n_terms));
    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_terms)));
    if (workers == 1) {
        for (int n = 0; n < n_terms; ++n) {
            const auto r = term(n);
            values[static_cast<std::size_t>(n)] = r.value;
            errors[static_cast<std::size_t>(n)] = r.error;
        }
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int n = static_cast<int>(w); n < n_terms; n += static_cast<int>(workers)) {
                    const auto r = term(n);
                    values[static_cast<std::size_t>(n)] = r.value;
                    errors[static_cast<std::size_t>(n)] = r.error;
                }
            });
        }
    }

    d.value = pairwise_sum(values, 0, values.size());
    const double quad_error = pairwise_sum(errors, 0, errors.size());
    d.error_bound = quad_error + d.photon_tail_bound + d.x_tail_bound;
    if (d.error_bound > tol)
        throw ConvergenceError("product risk integral missed its tolerance", d.error_bound);
    return d;
}

}  // namespace gausspurify
