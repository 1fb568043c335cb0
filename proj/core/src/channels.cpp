#include "gausspurify/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gausspurify/error.hpp"
#include "gausspurify/risk.hpp"

namespace gausspurify {

namespace {

// Neumaier accumulator.
struct Accumulator {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) noexcept {
        const double t = sum + x;
        c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const noexcept { return sum + c; }
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

ChannelKernel::ChannelKernel(ChannelKind kind, double k, int ancilla_fock) : kind_(kind), k_(k), ancilla_(ancilla_fock) {
    if (!std::isfinite(k)) throw DomainError("k must be finite");
    if (kind == ChannelKind::attenuate && !(k > 0.0 && k < 1.0)) throw DomainError("attenuation needs 0 < k < 1");
    if (kind == ChannelKind::amplify && !(k > 1.0)) throw DomainError("amplification needs k > 1");
    if (ancilla_fock < 0) throw DomainError("ancilla Fock level must be >= 0");
}

double ChannelKernel::vacuum_transition(int m, int n) const {
    const double g = k_ * k_;
    if (kind_ == ChannelKind::attenuate) {
        if (m > n) return 0.0;
        // C(n,m) g^m (1-g)^(n-m)
        return std::exp(log_choose(n, m) + m * std::log(g) + (n - m) * std::log1p(-g));
    }
    if (m < n) return 0.0;
    // C(m,n) g^-(n+1) (1 - 1/g)^(m-n)
    return std::exp(log_choose(m, n) - (n + 1) * std::log(g) + (m - n) * std::log1p(-1.0 / g));
}

// <m, n+kappa-m | U_bs | n, kappa> with a^+ -> t a^+ - r b^+, b^+ -> r a^+ + t b^+.
double ChannelKernel::attenuate_amplitude(int m, int n) const {
    const int kappa = ancilla_;
    const int total = n + kappa;
    if (m < 0 || m > total) return 0.0;
    const double log_t = std::log(k_);
    const double log_r = 0.5 * std::log1p(-k_ * k_);
    const double norm = 0.5 * (log_factorial(m) + log_factorial(total - m) - log_factorial(n) - log_factorial(kappa));
    Accumulator acc;
    for (int i = std::max(0, m - kappa); i <= std::min(n, m); ++i) {
        const int l = m - i;
        const double log_mag = log_choose(n, i) + log_choose(kappa, l) + (i + kappa - l) * log_t + (n - i + l) * log_r + norm;
        const double term = std::exp(log_mag);
        acc.add(((n - i) % 2 == 0) ? term : -term);
    }
    return acc.value();
}

// <m, m-n+kappa | S | n, kappa> via exp(G a^+b^+) c^-(N_a+N_b+1) exp(-G ab),
// c = cosh r = k, G = tanh r.
double ChannelKernel::amplify_amplitude(int m, int n) const {
    const int kappa = ancilla_;
    const int j = m - n + kappa;
    if (m < 0 || j < 0) return 0.0;
    const double log_c = std::log(k_);
    const double log_gamma = 0.5 * std::log1p(-1.0 / (k_ * k_));
    Accumulator acc;
    for (int i = 0; i <= std::min(n, kappa); ++i) {
        const int l = m - n + i;
        if (l < 0) continue;
        const double log_mag = (i + l) * log_gamma - log_factorial(i) - log_factorial(l) +
                               0.5 * (log_factorial(n) + log_factorial(kappa) + log_factorial(m) + log_factorial(j)) -
                               log_factorial(n - i) - log_factorial(kappa - i) - (n + kappa - 2 * i + 1) * log_c;
        const double term = std::exp(log_mag);
        acc.add(i % 2 == 0 ? term : -term);
    }
    return acc.value();
}

double ChannelKernel::transition(int m, int n) const {
    if (m < 0 || n < 0) return 0.0;
    if (ancilla_ == 0) return vacuum_transition(m, n);
    const double a = kind_ == ChannelKind::attenuate ? attenuate_amplitude(m, n) : amplify_amplitude(m, n);
    return a * a;
}

double ChannelKernel::column_tail_bound(int n, int out_cutoff) const {
    if (kind_ == ChannelKind::attenuate) {
        Accumulator acc;
        for (int m = std::max(out_cutoff + 1, 0); m <= n + ancilla_; ++m) acc.add(transition(m, n));
        return acc.value();
    }
    // Forward summation; once the term ratio drops below one the remainder
    // is bounded by a geometric series in the current ratio (exact for the
    // vacuum ancilla, whose ratios decrease monotonically).
    Accumulator acc;
    int m = std::max(out_cutoff + 1, 0);
    double prev = transition(m, n);
    acc.add(prev);
    for (++m;; ++m) {
        const double cur = transition(m, n);
        acc.add(cur);
        if (prev > 0.0) {
            const double ratio = cur / prev;
            if (ratio < 1.0) {
                const double rest = cur * ratio / (1.0 - ratio);
                if (rest <= 1e-3 * acc.value() || rest < 1e-300) return acc.value() + rest;
            }
        } else if (cur == 0.0 && m > n + ancilla_ + 1) {
            return acc.value();
        }
        prev = cur;
        if (m > kMaxOutputCutoff * 4) return 1.0;
    }
}

int ChannelKernel::output_cutoff_for(int in_cutoff, double budget) const {
    if (in_cutoff < 0) throw DomainError("cutoff must be >= 0");
    if (kind_ == ChannelKind::attenuate) return in_cutoff + ancilla_;
    const double g = k_ * k_;
    int m = static_cast<int>(std::ceil(g * in_cutoff + (g - 1.0) * (ancilla_ + 1))) + 8;
    while (true) {
        if (m > kMaxOutputCutoff)
            throw TruncationError("amplifier output cutoff exceeds the supported maximum", m);
        // The column of the largest input photon number has the heaviest tail.
        if (column_tail_bound(in_cutoff, m) <= budget) return m;
        m = static_cast<int>(std::ceil(m * 1.25)) + 8;
    }
}

std::vector<double> ChannelKernel::dense_table(int in_cutoff, int out_cutoff) const {
    if (in_cutoff < 0 || out_cutoff < 0) throw DomainError("cutoffs must be >= 0");
    const auto cols = static_cast<std::size_t>(in_cutoff) + 1;
    std::vector<double> table((static_cast<std::size_t>(out_cutoff) + 1) * cols, 0.0);
    for (int m = 0; m <= out_cutoff; ++m)
        for (int n = 0; n <= in_cutoff; ++n)
            table[static_cast<std::size_t>(m) * cols + static_cast<std::size_t>(n)] = transition(m, n);
    return table;
}

DiagonalFockState ChannelKernel::apply(const DiagonalFockState& input, int out_cutoff) const {
    const int in_cutoff = input.cutoff();
    const int out = out_cutoff >= 0 ? out_cutoff : output_cutoff_for(in_cutoff);
    const auto in = input.probs();

    std::vector<double> probs(static_cast<std::size_t>(out) + 1, 0.0);
    // Only inputs reachable from output m contribute.
    auto n_range = [&](int m) {
        if (kind_ == ChannelKind::attenuate) return std::pair{std::max(0, m - ancilla_), in_cutoff};
        return std::pair{0, std::min(in_cutoff, m + ancilla_)};
    };

    if (in_cutoff <= kDenseLimit && out <= kDenseLimit) {
        const auto table = dense_table(in_cutoff, out);
        const auto cols = static_cast<std::size_t>(in_cutoff) + 1;
        for (int m = 0; m <= out; ++m) {
            Accumulator acc;
            const auto [lo, hi] = n_range(m);
            for (int n = lo; n <= hi; ++n)
                acc.add(in[static_cast<std::size_t>(n)] * table[static_cast<std::size_t>(m) * cols + static_cast<std::size_t>(n)]);
            probs[static_cast<std::size_t>(m)] = acc.value();
        }
    } else {
        for (int m = 0; m <= out; ++m) {
            Accumulator acc;
            const auto [lo, hi] = n_range(m);
            for (int n = lo; n <= hi; ++n) {
                const double p = in[static_cast<std::size_t>(n)];
                if (p != 0.0) acc.add(p * transition(m, n));
            }
            probs[static_cast<std::size_t>(m)] = acc.value();
        }
    }

    Accumulator lost;
    for (int n = 0; n <= in_cutoff; ++n) {
        const double p = in[static_cast<std::size_t>(n)];
        if (p != 0.0 && (kind_ == ChannelKind::amplify || n + ancilla_ > out)) lost.add(p * column_tail_bound(n, out));
    }
    return DiagonalFockState(std::move(probs), input.tail_bound() + lost.value());
}

DiagonalFockState attenuate_kernel(double k, const DiagonalFockState& input) {
    return ChannelKernel(ChannelKind::attenuate, k).apply(input);
}

DiagonalFockState amplify_kernel(double k, const DiagonalFockState& input) {
    return ChannelKernel(ChannelKind::amplify, k).apply(input);
}

DiagonalFockState ancilla_fock_kernel(ChannelKind kind, double k, int fock_level, ThermalParam s1, double tail_budget) {
    if (fock_level < 0) throw DomainError("Fock level must be >= 0");
    if (kind == ChannelKind::attenuate && !(k > 0.0 && k < 1.0)) throw DomainError("attenuation needs 0 < k < 1");
    if (kind == ChannelKind::amplify && !(k > 1.0)) throw DomainError("amplification needs k > 1");
    if (!(tail_budget > 0.0)) throw DomainError("tail budget must be positive");
    const double g = s_tilde(kind, s1.value(), k);
    const int kappa = fock_level;
    const int shift = kind == ChannelKind::attenuate ? kappa : 0;

    auto log_weight = [&](int l) {
        if (g == 0.0) return l == 0 ? (kappa + 1) * std::log1p(-g) : kNegInf;
        return (kappa + 1) * std::log1p(-g) + l * std::log(g) + log_choose(l + kappa, kappa);
    };

    std::vector<double> weights;
    double tail = 0.0;
    for (int l = 0;; ++l) {
        const double w = std::exp(log_weight(l));
        weights.push_back(w);
        if (g == 0.0) break;
        // d_{l+1}/d_l = g (l+1+kappa)/(l+1), nonincreasing in l.
        const double ratio = g * (l + 1.0 + kappa) / (l + 1.0);
        if (ratio < 1.0) {
            tail = w * ratio / (1.0 - ratio);
            if (tail <= tail_budget) break;
        }
        if (l > ChannelKernel::kMaxOutputCutoff)
            throw TruncationError("ancilla kernel support exceeds the supported maximum", l);
    }

    std::vector<double> probs(static_cast<std::size_t>(shift) + weights.size(), 0.0);
    std::copy(weights.begin(), weights.end(), probs.begin() + shift);
    return DiagonalFockState(std::move(probs), tail);
}

double effective_ancilla_weight(ChannelKind kind, double k, ThermalParam s1, int kappa, int p) {
    if (kappa < 0) throw DomainError("ancilla Fock level must be >= 0");
    if (p < 0 || p > kappa) return 0.0;
    const double s = s1.value();
    const double k2 = k * k;
    double r2 = 0.0;
    if (kind == ChannelKind::attenuate) {
        if (!(k > 0.0 && k < 1.0)) throw DomainError("attenuation needs 0 < k < 1");
        r2 = (1.0 - k2) * (1.0 - s) / (1.0 - s + s * k2);
    } else {
        if (!(k > 1.0)) throw DomainError("amplification needs k > 1");
        r2 = (k2 - 1.0) * (1.0 - s) / (k2 - 1.0 + s);
    }
    if (r2 >= 1.0) return p == kappa ? 1.0 : 0.0;
    if (r2 <= 0.0) return p == 0 ? 1.0 : 0.0;
    return std::exp(log_choose(kappa, p) + p * std::log(r2) + (kappa - p) * std::log1p(-r2));
}

DiagonalFockState physical_ancilla_output(ChannelKind kind, double k, int kappa, ThermalParam s1, double tail_budget) {
    if (kappa < 0) throw DomainError("ancilla Fock level must be >= 0");
    std::vector<DiagonalFockState> parts;
    std::vector<double> w;
    int cutoff = 0;
    for (int p = 0; p <= kappa; ++p) {
        parts.push_back(ancilla_fock_kernel(kind, k, p, s1, tail_budget));
        w.push_back(effective_ancilla_weight(kind, k, s1, kappa, p));
        cutoff = std::max(cutoff, parts.back().cutoff());
    }
    std::vector<double> probs(static_cast<std::size_t>(cutoff) + 1, 0.0);
    double tail = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto src = parts[i].probs();
        for (std::size_t m = 0; m < src.size(); ++m) probs[m] += w[i] * src[m];
        tail += w[i] * parts[i].tail_bound();
    }
    return DiagonalFockState(std::move(probs), tail);
}

double gaussian_noise_topup(ThermalParam s_tilde_param, ThermalParam s2) {
    if (s_tilde_param.value() > s2.value())
        throw DomainError("no noise top-up exists: output is already noisier than the target");
    return s2.mean_photon_number() - s_tilde_param.mean_photon_number();
}

ClassicalGaussian classical_channel(double k, double V1, double V2, ClassicalGaussian x) {
    if (!(V1 > 0.0) || !(V2 > 0.0)) throw DomainError("variances must be positive");
    if (!(x.variance >= 0.0)) throw DomainError("input variance must be >= 0");
    if (!std::isfinite(k)) throw DomainError("k must be finite");
    ClassicalGaussian y{k * x.mean, k * k * x.variance};
    if (k <= classical_threshold(V1, V2)) y.variance += V2 - k * k * V1;
    return y;
}

}  // namespace gausspurify
