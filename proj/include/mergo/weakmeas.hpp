#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mergo/criteria.hpp"
#include "mergo/evolution.hpp"
#include "mergo/rng.hpp"

namespace mergo {

inline constexpr double kHalfPi = 1.57079632679489661923;

/// Branch weights at or below this are treated as empty: renormalizing them
/// would only amplify rounding noise.
inline constexpr double kBranchFloor = 1e-14;

/// p_suc = sum_{j in A} rho_jj.
inline double p_success_weight(const DensityMatrix& state, const Bipartition& bip) {
    if (static_cast<std::size_t>(state.dim()) != bip.dim())
        throw InvalidArgument("bipartition and state dimensions differ");
    double p = 0.0;
    for (std::size_t j : bip.set_a) p += state.matrix()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
    return std::clamp(p, 0.0, 1.0);
}

/// Block pieces of rho under a bipartition, each embedded in the full space:
/// rho = aa + bb + cross.
struct BlockSplit {
    Matrix aa, bb, cross;
};

inline BlockSplit split_blocks(const Matrix& rho, const Bipartition& bip) {
    const auto n = rho.rows();
    BlockSplit s{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool a_i = bip.in_a[static_cast<std::size_t>(i)];
            const bool a_j = bip.in_a[static_cast<std::size_t>(j)];
            (a_i && a_j ? s.aa : (!a_i && !a_j ? s.bb : s.cross))(i, j) = rho(i, j);
        }
    return s;
}

struct WeakMeasurementSpec {
    Bipartition bipartition;
    double delta = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (!(delta >= 0.0 && delta <= kHalfPi)) throw InvalidArgument("delta must lie in [0, pi/2]");
    }
};

/// Closed-form outcome pair of the four-step weak measurement.
struct WeakMeasurementAnalytic {
    double p_suc = 0.0;
    double p1 = 0.0;  // sin^2(delta) p_suc
    double p0 = 1.0;  // 1 - p1
    std::optional<DensityMatrix> rho1;
    std::optional<DensityMatrix> rho0;

    const DensityMatrix& success_state() const {
        if (!rho1) throw ZeroProbabilityBranch("success branch has probability zero");
        return *rho1;
    }
    const DensityMatrix& failure_state() const {
        if (!rho0) throw ZeroProbabilityBranch("failure branch has probability zero");
        return *rho0;
    }
};

/// rho1 = Pi_A rho Pi_A / p_suc;
/// rho0 = (cos^2 d rho_AA + rho_BB + cos d (rho_AB + rho_BA)) / p0.
inline WeakMeasurementAnalytic weak_measure_analytic(const DensityMatrix& state, const Bipartition& bip,
                                                     double delta) {
    WeakMeasurementSpec{bip, delta, 0}.validate();
    WeakMeasurementAnalytic out;
    out.p_suc = p_success_weight(state, bip);
    const double s = std::sin(delta), c = std::cos(delta);
    out.p1 = s * s * out.p_suc;
    out.p0 = 1.0 - out.p1;
    const BlockSplit blocks = split_blocks(state.matrix(), bip);
    if (out.p1 > kBranchFloor) out.rho1 = DensityMatrix::trusted(blocks.aa / out.p_suc);
    if (out.p0 > kBranchFloor) out.rho0 = DensityMatrix::trusted((c * c * blocks.aa + blocks.bb + c * blocks.cross) / out.p0);
    return out;
}

struct MeasurementOutcome {
    int flag = 0;  // 1 success, 0 failure
    double probability = 0.0;  // Born probability of the realized flag
    DensityMatrix post_state;
    double p_suc_before = 0.0;
    double p1 = 0.0;
};

/// Draws the flag from `rng` and returns the matching post-measurement state.
inline MeasurementOutcome weak_measure(const DensityMatrix& state, const WeakMeasurementSpec& spec, Rng& rng) {
    const auto a = weak_measure_analytic(state, spec.bipartition, spec.delta);
    MeasurementOutcome out;
    out.p_suc_before = a.p_suc;
    out.p1 = a.p1;
    const double u = rng.uniform();
    if ((u < a.p1 && a.rho1) || !a.rho0) {
        out.flag = 1;
        out.probability = a.p1;
        out.post_state = a.success_state();
    } else {
        out.flag = 0;
        out.probability = a.p0;
        out.post_state = a.failure_state();
    }
    return out;
}

/// Convenience overload using the spec's own seed for a single draw.
inline MeasurementOutcome weak_measure(const DensityMatrix& state, const WeakMeasurementSpec& spec) {
    Rng rng(spec.rng_seed);
    return weak_measure(state, spec, rng);
}

struct LambdaCoefficients {
    double a = 0.0, b = 0.0, c = 0.0;
};

/// Perturbation coefficients with
///   rho0 = rho - L_A rho_A + L_B rho_B - L_C (rho_AB + rho_BA).
inline LambdaCoefficients lambda_coefficients(double delta, double p_suc) {
    if (!(p_suc >= 0.0 && p_suc <= 1.0)) throw InvalidArgument("p_suc must lie in [0, 1]");
    const double s2 = std::sin(delta) * std::sin(delta);
    const double c = std::cos(delta);
    const double denom_a = (1.0 - p_suc) + c * c * p_suc;
    const double denom_b = 1.0 - s2 * p_suc;
    if (denom_a <= 1e-15 || denom_b <= 1e-15)
        throw Degenerate("Lambda coefficients undefined for delta = pi/2 with p_suc = 1");
    return {s2 * (1.0 - p_suc) * p_suc / denom_a, s2 * (1.0 - p_suc) * p_suc / denom_b,
            (1.0 - c - s2 * p_suc) / denom_b};
}

/// delta_k = min(pi/2, delta0 * ramp^k); ramp = 1 keeps delta constant.
struct DeltaSchedule {
    double delta0 = kHalfPi;
    double ramp = 1.0;

    double at(int k) const { return std::min(kHalfPi, delta0 * std::pow(ramp, k)); }
};

/// One line of the JSON-lines measurement trace.
struct TraceRecord {
    std::string node_id;
    int iteration = 0;
    double delta = 0.0;
    int flag = 0;
    double p1 = 0.0;
    double p_suc_before = 0.0;
};

/// Channel applied after a failed measurement; `iteration` is the 1-based
/// index of the measurement that just failed.
using RetryChannel = std::function<DensityMatrix(const DensityMatrix&, int iteration)>;

struct RepeatResult {
    DensityMatrix state;  // post-success (A-projected) state
    int iterations = 0;   // number of measurements performed
};

struct RepeatOptions {
    int max_iters = 100;
    DeltaSchedule delta{};
    std::string node_id;
    std::vector<TraceRecord>* trace = nullptr;
};

/// Measures, and on failure applies the retry channel, until the flag reads 1.
inline RepeatResult repeat_until_success(const DensityMatrix& state, const Bipartition& bip,
                                         const RetryChannel& channel, const RepeatOptions& opts, Rng& rng) {
    if (opts.max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
    DensityMatrix current = state;
    for (int k = 1; k <= opts.max_iters; ++k) {
        const double delta = opts.delta.at(k - 1);
        const auto outcome = weak_measure(current, WeakMeasurementSpec{bip, delta, 0}, rng);
        if (opts.trace)
            opts.trace->push_back({opts.node_id, k, delta, outcome.flag, outcome.p1, outcome.p_suc_before});
        if (outcome.flag == 1) return {outcome.post_state, k};
        if (k == opts.max_iters) break;
        current = channel(outcome.post_state, k);
        if (std::abs(current.trace() - 1.0) > 1e-9)
            throw InvalidArgument("retry channel is not trace preserving");
    }
    throw MaxItersExceeded("no success flag after " + std::to_string(opts.max_iters) + " measurements" +
                           (opts.node_id.empty() ? std::string() : " at node " + opts.node_id));
}

/// Target total spin S; singlet is S = 0, triplet S = 1.
struct SpinTarget {
    double total_spin = 0.0;
    static SpinTarget singlet() { return {0.0}; }
    static SpinTarget triplet() { return {1.0}; }
};

/// Total S^2 over the listed spin registers, built on the configuration basis.
inline Matrix total_spin_squared(const Basis& basis, const std::vector<int>& spin_registers) {
    std::vector<std::size_t> pos;
    for (int id : spin_registers) {
        auto p = basis.particles().position_of(id);
        if (!p) throw InvalidArgument("spin register references unknown particle " + std::to_string(id));
        if (!basis.particles()[*p].spin) throw InvalidArgument("spin is not enabled on particle " + std::to_string(id));
        pos.push_back(*p);
    }
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix s2 = Matrix::Zero(n, n);
    auto sz = [](Spin s) { return s == Spin::up ? 0.5 : -0.5; };
    for (Eigen::Index col = 0; col < n; ++col) {
        const auto& cfg = basis.configuration_at(static_cast<std::size_t>(col));
        for (std::size_t i : pos)
            for (std::size_t j : pos) {
                if (i == j) {
                    s2(col, col) += 0.75;
                    continue;
                }
                s2(col, col) += sz(cfg.spins[i]) * sz(cfg.spins[j]);
                // 1/2 (S+_i S-_j + S-_i S+_j): flips an anti-aligned pair.
                if (cfg.spins[i] != cfg.spins[j]) {
                    Configuration flipped = cfg;
                    std::swap(flipped.spins[i], flipped.spins[j]);
                    if (auto row = basis.find(flipped)) s2(static_cast<Eigen::Index>(*row), col) += 0.5;
                }
            }
    }
    return s2;
}

struct SpinProjection {
    double probability = 0.0;
    DensityMatrix state;
};

/// Projects onto the S^2 eigenspace with eigenvalue S(S+1).
inline SpinProjection spin_sector_project(const DensityMatrix& state, const Basis& basis,
                                          const std::vector<int>& spin_registers, SpinTarget target) {
    const Matrix s2 = total_spin_squared(basis, spin_registers);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s2);
    const double wanted = target.total_spin * (target.total_spin + 1.0);
    const auto n = s2.rows();
    Matrix proj = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        if (std::abs(eig.eigenvalues()[k] - wanted) < 1e-8)
            proj += eig.eigenvectors().col(k) * eig.eigenvectors().col(k).adjoint();
    const Matrix projected = proj * state.matrix() * proj;
    const double p = projected.trace().real();
    if (p < 1e-14) throw EmptySector("spin sector S = " + std::to_string(target.total_spin) + " is empty");
    return {p, DensityMatrix::trusted(projected / p)};
}

}  // namespace mergo
