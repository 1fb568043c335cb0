#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Sparse>

#include "gausspurify/error.hpp"
#include "gausspurify/oracle.hpp"

namespace gausspurify {

namespace {

// ||A|| <= 1/2 leaves a Taylor remainder below 0.5^19 / 19! ~ 1.6e-23.
constexpr int kTaylorDegree = 18;
constexpr double kScaledNorm = 0.5;
constexpr int kMaxBlockSize = 20000;

// exp(generator / 2^squarings) by a Taylor polynomial, with squarings chosen
// so the scaled 1-norm is at most kScaledNorm.
Eigen::MatrixXd scaled_taylor(const Eigen::MatrixXd& generator, int& squarings) {
    const Eigen::Index n = generator.rows();
    const double norm = generator.cwiseAbs().colwise().sum().maxCoeff();
    squarings = 0;
    double scale = 1.0;
    while (norm * scale > kScaledNorm) {
        scale *= 0.5;
        ++squarings;
    }
    // The generators here are tridiagonal, so the Taylor products are cheap
    // against a sparse factor; only the squarings are dense.
    Eigen::SparseMatrix<double> a = (generator * scale).sparseView();
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = result;
    for (int i = 1; i <= kTaylorDegree; ++i) {
        term = (term * a) / static_cast<double>(i);
        result += term;
    }
    return result;
}

}  // namespace

Eigen::MatrixXd expm_scaling_squaring(const Eigen::MatrixXd& generator) {
    if (generator.rows() != generator.cols()) throw DomainError("generator must be square");
    if (generator.rows() == 0) return {};
    int squarings = 0;
    Eigen::MatrixXd result = scaled_taylor(generator, squarings);
    for (int i = 0; i < squarings; ++i) result = (result * result).eval();
    return result;
}

Eigen::MatrixXd expm_columns(const Eigen::MatrixXd& generator, Eigen::Index first, Eigen::Index count) {
    const Eigen::Index n = generator.rows();
    if (n != generator.cols()) throw DomainError("generator must be square");
    if (first < 0 || count < 1 || first + count > n) throw DomainError("column range outside the generator");
    int squarings = 0;
    Eigen::MatrixXd step = scaled_taylor(generator, squarings);
    // Square while that is cheaper than the remaining matrix-vector products.
    double reps = std::ldexp(1.0, squarings);
    while (reps > 1.0 && reps * static_cast<double>(count) > static_cast<double>(n)) {
        step = (step * step).eval();
        reps *= 0.5;
    }
    Eigen::MatrixXd cols = step.middleCols(first, count);
    for (long i = 1; i < static_cast<long>(reps); ++i) cols = (step * cols).eval();
    return cols;
}

AncillaCandidate::AncillaCandidate(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw DomainError("ancilla needs at least one weight");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("ancilla weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("ancilla weights must sum to 1");
}

AncillaCandidate AncillaCandidate::fock(int level) {
    if (level < 0) throw DomainError("ancilla level must be >= 0");
    std::vector<double> w(static_cast<std::size_t>(level) + 1, 0.0);
    w.back() = 1.0;
    return AncillaCandidate(std::move(w));
}

TwoModeSimulator::TwoModeSimulator(ChannelKind kind, double k, double leakage_budget)
    : kind_(kind), k_(k), leakage_budget_(leakage_budget) {
    if (kind == ChannelKind::attenuate && !(k > 0.0 && k <= 1.0))
        throw DomainError("beamsplitter needs 0 < k <= 1");
    if (kind == ChannelKind::amplify && !(k >= 1.0 && std::isfinite(k)))
        throw DomainError("two-mode squeezer needs k >= 1");
    if (!(leakage_budget > 0.0)) throw DomainError("leakage budget must be positive");
}

const TwoModeSimulator::Column& TwoModeSimulator::column(int n, int kappa) {
    if (n < 0 || kappa < 0) throw DomainError("photon numbers must be >= 0");
    kappa_hint_ = std::max(kappa_hint_, kappa);
    auto it = columns_.find({n, kappa});
    if (it == columns_.end()) {
        build_block(kind_ == ChannelKind::attenuate ? n + kappa : n - kappa);
        it = columns_.find({n, kappa});
        if (it == columns_.end()) throw std::logic_error("two-mode block did not produce the requested column");
    }
    return it->second;
}

void TwoModeSimulator::build_block(int key) {
    if (kind_ == ChannelKind::attenuate) {
        // n_a + n_b = key; basis index j = n_b. The rotation is exact in this block.
        const int total = key;
        const int size = total + 1;
        const double theta = std::acos(k_);
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
        for (int j = 0; j < size; ++j) {
            if (j > 0) g(j - 1, j) = theta * std::sqrt(static_cast<double>(total - j + 1) * j);
            if (j < total) g(j + 1, j) = -theta * std::sqrt(static_cast<double>(total - j) * (j + 1));
        }
        const Eigen::MatrixXd u = expm_scaling_squaring(g);
        const Eigen::MatrixXd defect = u.transpose() * u - Eigen::MatrixXd::Identity(size, size);
        max_defect_ = std::max(max_defect_, defect.cwiseAbs().maxCoeff());
        working_cutoff_ = std::max(working_cutoff_, total);
        for (int kappa = 0; kappa <= total; ++kappa) {
            Column c;
            c.b_start = 0;
            c.amps.assign(u.col(kappa).data(), u.col(kappa).data() + size);
            columns_[{total - kappa, kappa}] = std::move(c);
        }
        return;
    }

    // n_a - n_b = d; basis index j = n_b from max(0, -d) upwards.
    const int d = key;
    const int j0 = std::max(0, -d);
    const int kappa_max = std::max(kappa_hint_, j0);
    const double gain = k_ * k_;
    const double r = std::acosh(k_);
    const double n_in = static_cast<double>(d + kappa_max);
    const double mean = gain * kappa_max + (gain - 1.0) * (n_in + 1.0);
    const double sd = std::sqrt((mean + 1.0) * (mean / (n_in + 1.0) + 1.0) + mean);
    int top = kappa_max + static_cast<int>(std::ceil(mean + 8.0 * sd)) + 20;

    for (;;) {
        const int size = top - j0 + 1;
        if (size > kMaxBlockSize)
            throw TruncationError("two-mode squeezer block exceeds the size limit", top);
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
        for (int i = 0; i < size; ++i) {
            const double j = static_cast<double>(j0 + i);
            if (i + 1 < size) g(i + 1, i) = r * std::sqrt((d + j + 1.0) * (j + 1.0));
            if (i > 0) g(i - 1, i) = -r * std::sqrt((d + j) * j);
        }
        // Only the columns of ancilla levels j0..kappa_max are needed.
        const int count = kappa_max - j0 + 1;
        const Eigen::MatrixXd u = expm_columns(g, 0, count);
        const int width = std::max(5, size / 20);
        double leak = 0.0;
        for (int c = 0; c < count; ++c) leak = std::max(leak, u.col(c).tail(width).squaredNorm());
        if (leak > leakage_budget_) {
            top = j0 + static_cast<int>(std::ceil(1.25 * size));
            continue;
        }
        max_leakage_ = std::max(max_leakage_, leak);
        // Orthonormality of the retained columns.
        const Eigen::MatrixXd defect = u.transpose() * u - Eigen::MatrixXd::Identity(count, count);
        max_defect_ = std::max(max_defect_, defect.cwiseAbs().maxCoeff());
        working_cutoff_ = std::max(working_cutoff_, top);
        for (int c = 0; c < count; ++c) {
            Column col;
            col.b_start = j0;
            col.amps.assign(u.col(c).data(), u.col(c).data() + size);
            columns_[{d + j0 + c, j0 + c}] = std::move(col);
        }
        return;
    }
}

Eigen::MatrixXcd TwoModeSimulator::evolve(const Eigen::MatrixXcd& rho_in, const AncillaCandidate& ancilla,
                                          int out_cutoff) {
    if (out_cutoff < 0) throw DomainError("output cutoff must be >= 0");
    if (rho_in.rows() != rho_in.cols() || rho_in.rows() == 0) throw DomainError("input density must be square");
    const int in_cutoff = static_cast<int>(rho_in.rows()) - 1;
    const int size_out = out_cutoff + 1;
    kappa_hint_ = std::max(kappa_hint_, ancilla.max_level());

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(size_out, size_out);
    const auto weights = ancilla.weights();
    std::vector<int> src(static_cast<std::size_t>(size_out));
    std::vector<double> amp(static_cast<std::size_t>(size_out));

    for (int kappa = 0; kappa <= ancilla.max_level(); ++kappa) {
        const double tau = weights[static_cast<std::size_t>(kappa)];
        if (tau == 0.0) continue;
        // Highest input photon number that can land on m <= out_cutoff.
        const int n_max = kind_ == ChannelKind::attenuate ? in_cutoff : std::min(in_cutoff, out_cutoff + kappa);
        int j_max = 0;
        for (int n = 0; n <= n_max; ++n) {
            const auto& c = column(n, kappa);
            j_max = std::max(j_max, c.b_start + static_cast<int>(c.amps.size()) - 1);
        }
        for (int j = 0; j <= j_max; ++j) {
            int used = 0;
            for (int m = 0; m < size_out; ++m) {
                const int n = input_photons(m, kappa, j);
                if (n < 0 || n > n_max) continue;
                const auto& c = column(n, kappa);
                const int idx = j - c.b_start;
                if (idx < 0 || idx >= static_cast<int>(c.amps.size())) continue;
                const double a = c.amps[static_cast<std::size_t>(idx)];
                if (a == 0.0) continue;
                src[static_cast<std::size_t>(used)] = m;
                amp[static_cast<std::size_t>(used)] = a;
                ++used;
            }
            for (int p = 0; p < used; ++p) {
                const int m = src[static_cast<std::size_t>(p)];
                const int n = input_photons(m, kappa, j);
                for (int q = 0; q < used; ++q) {
                    const int mp = src[static_cast<std::size_t>(q)];
                    const int np = input_photons(mp, kappa, j);
                    out(m, mp) += tau * amp[static_cast<std::size_t>(p)] * amp[static_cast<std::size_t>(q)] * rho_in(n, np);
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd TwoModeSimulator::evolve_diagonal(std::span<const double> populations,
                                                  const AncillaCandidate& ancilla, int out_cutoff) {
    if (populations.empty()) throw DomainError("input populations are empty");
    const auto n = static_cast<Eigen::Index>(populations.size());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) rho(i, i) = populations[static_cast<std::size_t>(i)];
    return evolve(rho, ancilla, out_cutoff).real();
}

SimulationReport simulate_channel(TwoModeSimulator& simulator, const DiagonalFockState& input,
                                  const AncillaCandidate& ancilla, int cutoff, double input_tail_budget) {
    if (cutoff < 0) throw DomainError("cutoff must be >= 0");
    if (input.tail_bound() >= input_tail_budget) {
        // Extrapolate the geometric decay of the last two populations.
        const int n = input.cutoff();
        int needed = 2 * n + 20;
        if (n >= 1 && input[n - 1] > 0.0) {
            const double ratio = input[n] / input[n - 1];
            if (ratio > 0.0 && ratio < 1.0)
                needed = n + static_cast<int>(std::ceil(std::log(input_tail_budget / input.tail_bound()) / std::log(ratio))) + 1;
        }
        throw TruncationError("input tail " + std::to_string(input.tail_bound()) + " exceeds the simulation budget; raise the input cutoff to about " +
                                  std::to_string(needed),
                              needed);
    }
    const Eigen::MatrixXd out = simulator.evolve_diagonal(input.probs(), ancilla, cutoff);

    SimulationReport report;
    std::vector<double> diag(static_cast<std::size_t>(cutoff) + 1);
    for (int m = 0; m <= cutoff; ++m) {
        diag[static_cast<std::size_t>(m)] = std::max(0.0, out(m, m));
        for (int mp = 0; mp <= cutoff; ++mp)
            if (mp != m) report.max_offdiagonal = std::max(report.max_offdiagonal, std::abs(out(m, mp)));
    }
    const double kept = compensated_sum(diag);
    const double tail = std::max(0.0, 1.0 - kept) + input.tail_bound();
    report.output = DiagonalFockState(std::move(diag), tail);
    report.leakage = simulator.max_leakage();
    report.unitarity_defect = simulator.max_unitarity_defect();
    report.working_cutoff = simulator.working_cutoff();
    return report;
}

SimulationReport simulate_channel(ChannelKind kind, double k, const DiagonalFockState& input,
                                  const AncillaCandidate& ancilla, int cutoff, double input_tail_budget) {
    TwoModeSimulator simulator(kind, k);
    return simulate_channel(simulator, input, ancilla, cutoff, input_tail_budget);
}

}  // namespace gausspurify
