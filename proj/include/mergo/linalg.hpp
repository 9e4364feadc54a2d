#pragma once

#include <cmath>
#include <complex>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "mergo/errors.hpp"

namespace mergo {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_error(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

inline bool is_hermitian(const Matrix& m, double tol = 1e-12) {
    return m.rows() == m.cols() && hermiticity_error(m) <= tol * std::max(1.0, max_abs(m));
}

/// exp(-i H t) for Hermitian H via a dense eigendecomposition.
inline Matrix unitary_exponential(const Eigen::SelfAdjointEigenSolver<Matrix>& eig, double t) {
    const RealVector& e = eig.eigenvalues();
    Vector phases(e.size());
    for (Eigen::Index k = 0; k < e.size(); ++k) phases[k] = std::polar(1.0, -e[k] * t);
    const Matrix& v = eig.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
}

inline Matrix unitary_exponential(const Matrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    if (eig.info() != Eigen::Success) throw InvalidArgument("eigendecomposition failed");
    return unitary_exponential(eig, t);
}

/// Dense matrix text format: a three-line header followed by one row per line
/// of `re im` pairs.
///
///     mergo-matrix 1
///     dim <n>
///     tag <tag>
inline void write_matrix(std::ostream& os, const Matrix& m, const std::string& tag) {
    os << "mergo-matrix 1\n"
       << "dim " << m.rows() << "\n"
       << "tag " << tag << "\n";
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << m(i, j).real() << ' ' << m(i, j).imag();
        }
        os << '\n';
    }
}

struct TaggedMatrix {
    Matrix matrix;
    std::string tag;
};

inline TaggedMatrix read_matrix(std::istream& is) {
    std::string magic;
    int version = 0;
    std::string key;
    Eigen::Index n = 0;
    TaggedMatrix out;
    if (!(is >> magic >> version) || magic != "mergo-matrix" || version != 1)
        throw InvalidArgument("not a mergo-matrix v1 stream");
    if (!(is >> key >> n) || key != "dim" || n < 0) throw InvalidArgument("bad dim line");
    if (!(is >> key >> out.tag) || key != "tag") throw InvalidArgument("bad tag line");
    out.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double re = 0.0, im = 0.0;
            if (!(is >> re >> im)) throw InvalidArgument("truncated matrix data");
            out.matrix(i, j) = cplx(re, im);
        }
    return out;
}

}  // namespace mergo
