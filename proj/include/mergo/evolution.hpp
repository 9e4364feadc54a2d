#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "mergo/hamiltonian.hpp"
#include "mergo/linalg.hpp"

namespace mergo {

/// Hermitian, unit-trace, positive semidefinite matrix over a configuration basis.
class DensityMatrix {
public:
    DensityMatrix() = default;

    /// Validates the density-matrix invariants at tolerance `tol`.
    explicit DensityMatrix(Matrix m, double tol = 1e-10) : m_(std::move(m)) { validate(tol); }

    /// Wraps a matrix produced by an operation already known to preserve the invariants.
    static DensityMatrix trusted(Matrix m) {
        DensityMatrix d;
        d.m_ = std::move(m);
        return d;
    }

    static DensityMatrix from_pure(const Vector& psi, double tol = 1e-10) {
        if (std::abs(psi.norm() - 1.0) > tol)
            throw UnnormalizedInput("pure state norm " + std::to_string(psi.norm()) + " != 1");
        return trusted(psi * psi.adjoint());
    }

    static DensityMatrix basis_state(Eigen::Index dim, Eigen::Index index) {
        Matrix m = Matrix::Zero(dim, dim);
        m(index, index) = 1.0;
        return trusted(std::move(m));
    }

    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    double trace() const { return m_.trace().real(); }
    double purity() const { return (m_ * m_).trace().real(); }

    void validate(double tol = 1e-10) const {
        if (m_.rows() != m_.cols() || m_.rows() == 0) throw InvalidState("density matrix must be square and non-empty");
        if (hermiticity_error(m_) > tol) throw InvalidState("density matrix is not Hermitian");
        if (std::abs(m_.trace() - cplx(1.0, 0.0)) > tol) throw InvalidState("density matrix trace != 1");
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m_, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -tol) throw InvalidState("density matrix has a negative eigenvalue");
    }

private:
    Matrix m_;
};

inline DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
    const Matrix& x = a.matrix();
    const Matrix& y = b.matrix();
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return DensityMatrix::trusted(std::move(out));
}

/// Trace distance-like max-entry distance between two states.
inline double max_entry_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return max_abs(a.matrix() - b.matrix());
}

struct PropagationReport {
    DensityMatrix final_state;
    double norm_drift = 0.0;  // max |trace - 1| over all steps
    int steps = 0;
    std::vector<double> s_grid;  // step boundaries, steps + 1 entries
};

using HamiltonianFn = std::function<Matrix(double)>;

namespace detail {

inline PropagationReport propagate_impl(const DensityMatrix& state, const HamiltonianFn& hamiltonian,
                                        const std::function<std::pair<double, double>(double)>& cache_key,
                                        double s_from, double s_to, int n_steps) {
    if (n_steps < 1) throw InvalidArgument("n_steps must be at least 1");
    if (!(s_from < s_to)) throw ScheduleOutOfRange("propagation requires s_from < s_to");
    const double ds = (s_to - s_from) / n_steps;
    PropagationReport report;
    report.steps = n_steps;
    report.s_grid.reserve(static_cast<std::size_t>(n_steps) + 1);
    Matrix rho = state.matrix();
    std::map<std::pair<double, double>, Matrix> cache;
    for (int k = 0; k < n_steps; ++k) {
        const double a = s_from + k * ds;
        report.s_grid.push_back(a);
        const double mid = a + 0.5 * ds;
        const Matrix* u = nullptr;
        Matrix local;
        std::pair<double, double> key{std::numeric_limits<double>::quiet_NaN(), 0.0};
        if (cache_key) {
            key = cache_key(mid);
            if (auto it = cache.find(key); it != cache.end()) u = &it->second;
        }
        if (!u) {
            const Matrix h = hamiltonian(mid);
            if (h.rows() != rho.rows() || !is_hermitian(h))
                throw NonHermitianHamiltonian("H(s) at s = " + std::to_string(mid) + " is not Hermitian");
            local = unitary_exponential(h, ds);
            if (cache_key) u = &cache.emplace(key, std::move(local)).first->second;
            else u = &local;
        }
        rho = (*u) * rho * u->adjoint();
        report.norm_drift = std::max(report.norm_drift, std::abs(rho.trace().real() - 1.0));
    }
    report.s_grid.push_back(s_to);
    report.final_state = DensityMatrix::trusted(std::move(rho));
    return report;
}

}  // namespace detail

/// Midpoint-rule time-ordered evolution: U_k = exp(-i H(s_mid,k) ds), rho -> U rho U^dagger.
/// Step propagators are cached by their (f, g) schedule values.
inline PropagationReport propagate(const DensityMatrix& state, const ScheduledHamiltonian& sh,
                                   double s_from, double s_to, int n_steps) {
    if (s_from < 0.0 || s_to > sh.schedule.s1)
        throw ScheduleOutOfRange("propagation window outside [0, s1]");
    if (state.dim() != sh.dim()) throw InvalidArgument("state and Hamiltonian dimensions differ");
    return detail::propagate_impl(
        state, [&sh](double s) { return sh.evaluate_matrix(s); },
        [&sh](double s) { return std::pair{sh.schedule.f(s), sh.schedule.g(s)}; }, s_from, s_to,
        n_steps);
}

/// Same integrator for an arbitrary Hermitian H(s).
inline PropagationReport propagate(const DensityMatrix& state, const HamiltonianFn& hamiltonian,
                                   double s_from, double s_to, int n_steps) {
    return detail::propagate_impl(state, hamiltonian, {}, s_from, s_to, n_steps);
}

/// Time-ordered product U_n ... U_1 of the midpoint step propagators, for
/// channels that replay the same sweep many times.
struct SweepUnitary {
    Matrix u;
    int steps = 0;

    DensityMatrix apply(const DensityMatrix& rho) const {
        if (rho.dim() != u.rows()) throw InvalidArgument("state and sweep dimensions differ");
        return DensityMatrix::trusted(u * rho.matrix() * u.adjoint());
    }
};

inline SweepUnitary sweep_unitary(const ScheduledHamiltonian& sh, double s_from, double s_to, int n_steps) {
    if (s_from < 0.0 || s_to > sh.schedule.s1) throw ScheduleOutOfRange("propagation window outside [0, s1]");
    if (n_steps < 1) throw InvalidArgument("n_steps must be at least 1");
    if (!(s_from < s_to)) throw ScheduleOutOfRange("propagation requires s_from < s_to");
    const double ds = (s_to - s_from) / n_steps;
    std::map<std::pair<double, double>, Matrix> cache;
    Matrix total = Matrix::Identity(sh.dim(), sh.dim());
    for (int k = 0; k < n_steps; ++k) {
        const double mid = s_from + (k + 0.5) * ds;
        const std::pair key{sh.schedule.f(mid), sh.schedule.g(mid)};
        auto it = cache.find(key);
        if (it == cache.end()) {
            const Matrix h = sh.evaluate_matrix(mid);
            if (!is_hermitian(h)) throw NonHermitianHamiltonian("H(s) is not Hermitian");
            it = cache.emplace(key, unitary_exponential(h, ds)).first;
        }
        total = it->second * total;
    }
    return {std::move(total), n_steps};
}

/// Step count with ds <= 0.1 / ||H||_max.
inline int default_steps(const ScheduledHamiltonian& sh, double s_from, double s_to) {
    const double bound = sh.max_entry_bound();
    if (bound == 0.0) return 1;
    return std::max(1, static_cast<int>(std::ceil((s_to - s_from) * bound / 0.1)));
}

struct CorrelationPoint {
    double t;
    cplx c;
};

/// C(t) = <psi0| exp(-i H t) |psi0> on n_samples points spanning [0, t_max].
inline std::vector<CorrelationPoint> autocorrelation(const Vector& psi0, const Matrix& hamiltonian,
                                                     double t_max, int n_samples) {
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw UnnormalizedInput("initial state is not normalized");
    if (n_samples < 2 || !(t_max > 0.0)) throw InvalidArgument("need n_samples >= 2 and t_max > 0");
    if (!is_hermitian(hamiltonian)) throw NonHermitianHamiltonian("autocorrelation Hamiltonian not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hamiltonian);
    const Vector amp = eig.eigenvectors().adjoint() * psi0;
    const RealVector weight = amp.cwiseAbs2();
    const RealVector& e = eig.eigenvalues();
    const double dt = t_max / (n_samples - 1);
    std::vector<CorrelationPoint> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        const double t = k * dt;
        cplx c = 0.0;
        for (Eigen::Index j = 0; j < e.size(); ++j) c += weight[j] * std::polar(1.0, -e[j] * t);
        out.push_back({t, c});
    }
    return out;
}

inline std::vector<CorrelationPoint> autocorrelation(const Vector& psi0, const ScheduledHamiltonian& sh,
                                                     double s, double t_max, int n_samples) {
    return autocorrelation(psi0, sh.evaluate_matrix(s), t_max, n_samples);
}

enum class Window { rectangular, hann };

struct SpectrumPoint {
    double frequency;  // angular frequency, atomic units
    double intensity;
};

/// |sum_n w_n C(t_n) exp(+i w t_n)| dt on the DFT frequency grid, sorted by
/// frequency. A component exp(-i E t) peaks at w = E.
inline std::vector<SpectrumPoint> spectrum(const std::vector<CorrelationPoint>& series,
                                           Window window = Window::hann) {
    const std::size_t n = series.size();
    if (n < 2) throw InvalidArgument("spectrum needs at least two samples");
    const double dt = series[1].t - series[0].t;
    if (!(dt > 0.0)) throw NonuniformGrid("time grid must be increasing");
    for (std::size_t k = 1; k < n; ++k)
        if (std::abs((series[k].t - series[k - 1].t) - dt) > 1e-9 * dt)
            throw NonuniformGrid("time grid is not uniform");

    std::vector<cplx> in(n), out;
    for (std::size_t k = 0; k < n; ++k) {
        double w = 1.0;
        if (window == Window::hann) w = 0.5 * (1.0 - std::cos(2.0 * M_PI * k / (n - 1)));
        in[k] = std::conj(w * series[k].c);
    }
    Eigen::FFT<double> fft;
    fft.fwd(out, in);

    std::vector<SpectrumPoint> result(n);
    const double dw = 2.0 * M_PI / (n * dt);
    const auto half = static_cast<long>(n / 2);
    for (std::size_t k = 0; k < n; ++k) {
        long signed_k = static_cast<long>(k);
        if (signed_k >= static_cast<long>(n) - half) signed_k -= static_cast<long>(n);
        // conj(out) is the +i w t transform; its magnitude equals |out|.
        result[k] = {signed_k * dw, std::abs(out[k]) * dt};
    }
    std::sort(result.begin(), result.end(),
              [](const SpectrumPoint& a, const SpectrumPoint& b) { return a.frequency < b.frequency; });
    return result;
}

inline void write_correlation_csv(std::ostream& os, const std::vector<CorrelationPoint>& series) {
    os << "t,re,im\n" << std::setprecision(17);
    for (const auto& p : series) os << p.t << ',' << p.c.real() << ',' << p.c.imag() << '\n';
}

inline void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumPoint>& spec) {
    os << "frequency,intensity\n" << std::setprecision(17);
    for (const auto& p : spec) os << p.frequency << ',' << p.intensity << '\n';
}

}  // namespace mergo
