#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mergo/evolution.hpp"
#include "mergo/grid.hpp"
#include "mergo/linalg.hpp"

namespace mergo {

/// Register sets to symmetrize (Bosons) and antisymmetrize (Fermions),
/// given as particle ids. Spin travels with the position label.
struct SymmetryDeclaration {
    std::vector<std::vector<int>> bosonic_sets;
    std::vector<std::vector<int>> fermionic_sets;

    static constexpr std::size_t kMaxSetSize = 5;

    void validate(const ParticleSet& particles) const {
        std::set<int> seen;
        auto check = [&](const std::vector<int>& set) {
            if (set.size() > kMaxSetSize)
                throw InvalidArgument("symmetry sets are limited to " + std::to_string(kMaxSetSize) + " registers");
            const Particle* first = nullptr;
            for (int id : set) {
                auto pos = particles.position_of(id);
                if (!pos) throw InvalidArgument("symmetry set references unknown particle " + std::to_string(id));
                if (!seen.insert(id).second) throw InvalidArgument("symmetry sets must be disjoint");
                const Particle& p = particles[*pos];
                if (first && (p.species != first->species || p.mass != first->mass ||
                              p.charge != first->charge || p.spin != first->spin))
                    throw InvalidArgument("symmetry set mixes distinguishable particles");
                first = &p;
            }
        };
        for (const auto& s : bosonic_sets) check(s);
        for (const auto& s : fermionic_sets) check(s);
    }

    bool empty() const { return bosonic_sets.empty() && fermionic_sets.empty(); }

    friend bool operator==(const SymmetryDeclaration&, const SymmetryDeclaration&) = default;
};

/// Register permutation on basis positions: U_sigma |x_0 .. x_{n-1}> = |x_sigma(0) .. x_sigma(n-1)>.
/// `sign` is the parity of the Fermionic component.
struct Permutation {
    std::vector<std::size_t> image;
    int sign = 1;

    static Permutation identity(std::size_t n) {
        Permutation p;
        p.image.resize(n);
        std::iota(p.image.begin(), p.image.end(), std::size_t{0});
        return p;
    }

    std::size_t size() const { return image.size(); }
    bool is_identity() const {
        for (std::size_t i = 0; i < image.size(); ++i)
            if (image[i] != i) return false;
        return true;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
};

/// Permutation whose operator is U_a U_b.
inline Permutation compose(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) throw InvalidPermutation("composing permutations of different size");
    Permutation p;
    p.image.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p.image[i] = b.image[a.image[i]];
    p.sign = a.sign * b.sign;
    return p;
}

inline int parity(const std::vector<std::size_t>& perm) {
    std::vector<bool> visited(perm.size(), false);
    int sign = 1;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (visited[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !visited[j]; j = perm[j]) {
            visited[j] = true;
            ++len;
        }
        if (len % 2 == 0) sign = -sign;
    }
    return sign;
}

inline Configuration apply(const Permutation& p, const Configuration& c) {
    if (p.size() != c.labels.size()) throw InvalidPermutation("permutation size does not match configuration");
    Configuration out = c;
    for (std::size_t i = 0; i < p.size(); ++i) {
        out.labels[i] = c.labels[p.image[i]];
        out.spins[i] = c.spins[p.image[i]];
    }
    return out;
}

namespace detail {

inline std::vector<std::size_t> positions_of(const ParticleSet& particles, const std::vector<int>& ids) {
    std::vector<std::size_t> out;
    for (int id : ids) {
        auto pos = particles.position_of(id);
        if (!pos) throw InvalidArgument("unknown particle id " + std::to_string(id));
        out.push_back(*pos);
    }
    return out;
}

}  // namespace detail

/// Every element of the product group prod_i S_{|B_i|} x prod_j S_{|F_j|}, identity first.
inline std::vector<Permutation> group_elements(const SymmetryDeclaration& decl, const ParticleSet& particles) {
    decl.validate(particles);
    std::vector<Permutation> group{Permutation::identity(particles.size())};
    auto extend = [&](const std::vector<int>& set, bool fermionic) {
        const auto pos = detail::positions_of(particles, set);
        std::vector<std::size_t> order(pos.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<Permutation> local;
        do {
            Permutation p = Permutation::identity(particles.size());
            for (std::size_t k = 0; k < pos.size(); ++k) p.image[pos[k]] = pos[order[k]];
            p.sign = fermionic ? parity(order) : 1;
            local.push_back(std::move(p));
        } while (std::next_permutation(order.begin(), order.end()));
        std::vector<Permutation> next;
        next.reserve(group.size() * local.size());
        for (const auto& g : group)
            for (const auto& l : local) next.push_back(compose(g, l));
        group = std::move(next);
    };
    for (const auto& s : decl.bosonic_sets) extend(s, false);
    for (const auto& s : decl.fermionic_sets) extend(s, true);
    return group;
}

/// Adjacent transpositions within each declared set; they generate the group.
inline std::vector<Permutation> generators(const SymmetryDeclaration& decl, const ParticleSet& particles) {
    decl.validate(particles);
    std::vector<Permutation> out;
    auto add = [&](const std::vector<int>& set, bool fermionic) {
        const auto pos = detail::positions_of(particles, set);
        for (std::size_t k = 0; k + 1 < pos.size(); ++k) {
            Permutation p = Permutation::identity(particles.size());
            std::swap(p.image[pos[k]], p.image[pos[k + 1]]);
            p.sign = fermionic ? -1 : 1;
            out.push_back(std::move(p));
        }
    };
    for (const auto& s : decl.bosonic_sets) add(s, false);
    for (const auto& s : decl.fermionic_sets) add(s, true);
    return out;
}

/// 0/1 matrix of U_sigma on the basis. The basis must be closed under sigma
/// and sigma may only exchange identical registers.
inline Matrix permutation_matrix(const Permutation& perm, const Basis& basis) {
    const auto& particles = basis.particles();
    if (perm.size() != particles.size()) throw InvalidPermutation("permutation size does not match basis");
    std::vector<bool> hit(perm.size(), false);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const std::size_t j = perm.image[i];
        if (j >= perm.size() || hit[j]) throw InvalidPermutation("permutation image is not a bijection");
        hit[j] = true;
        const Particle& a = particles[i];
        const Particle& b = particles[j];
        if (a.species != b.species || a.mass != b.mass || a.charge != b.charge || a.spin != b.spin)
            throw InvalidPermutation("permutation exchanges distinguishable registers");
    }
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix u = Matrix::Zero(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        auto row = basis.find(apply(perm, basis.configuration_at(static_cast<std::size_t>(col))));
        if (!row) throw InvalidPermutation("basis is not closed under the permutation");
        u(static_cast<Eigen::Index>(*row), col) = 1.0;
    }
    return u;
}

/// Applies U_sigma to a state vector without forming the matrix.
inline Vector apply(const Permutation& perm, const Basis& basis, const Vector& psi) {
    Vector out = Vector::Zero(psi.size());
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
        if (psi[k] == cplx(0.0)) continue;
        auto row = basis.find(apply(perm, basis.configuration_at(static_cast<std::size_t>(k))));
        if (!row) throw InvalidPermutation("basis is not closed under the permutation");
        out[static_cast<Eigen::Index>(*row)] += psi[k];
    }
    return out;
}

namespace detail {

inline double group_normalization(const SymmetryDeclaration& decl) {
    double norm = 1.0;
    auto fact = [](std::size_t k) {
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
        return f;
    };
    for (const auto& s : decl.bosonic_sets) norm *= fact(s.size());
    for (const auto& s : decl.fermionic_sets) norm *= fact(s.size());
    return 1.0 / std::sqrt(norm);
}

/// prod_sets (1/sqrt(k!)) sum_sigma sgn(sigma_F) U_sigma as a dense matrix.
inline Matrix symmetrizer(const SymmetryDeclaration& decl, const Basis& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix s = Matrix::Zero(n, n);
    for (const auto& g : group_elements(decl, basis.particles()))
        s += static_cast<double>(g.sign) * permutation_matrix(g, basis);
    return s * group_normalization(decl);
}

}  // namespace detail

/// (Anti)symmetrizes a state vector and renormalizes it.
inline Vector antisymmetrize(const Vector& psi, const SymmetryDeclaration& decl, const Basis& basis) {
    Vector out = Vector::Zero(psi.size());
    for (const auto& g : group_elements(decl, basis.particles()))
        out += static_cast<double>(g.sign) * apply(g, basis, psi);
    out *= detail::group_normalization(decl);
    const double norm = out.norm();
    if (norm < 1e-12 * std::max(1.0, psi.norm()))
        throw VanishingNorm("state is annihilated by the (anti)symmetrizer");
    return out / norm;
}

inline DensityMatrix antisymmetrize(const DensityMatrix& rho, const SymmetryDeclaration& decl,
                                    const Basis& basis) {
    const Matrix s = detail::symmetrizer(decl, basis);
    Matrix out = s * rho.matrix() * s.adjoint();
    const double tr = out.trace().real();
    if (tr < 1e-12) throw VanishingNorm("state is annihilated by the (anti)symmetrizer");
    out /= tr;
    return DensityMatrix::trusted(std::move(out));
}

struct SymmetryReport {
    double density_deviation = 0.0;             // max_sigma ||U rho U^dagger - rho||_max
    std::optional<double> vector_deviation;     // pure states: max_sigma ||U psi - sgn psi||_max
    double max_deviation() const { return std::max(density_deviation, vector_deviation.value_or(0.0)); }
};

inline SymmetryReport symmetry_check(const Vector& psi, const SymmetryDeclaration& decl, const Basis& basis) {
    SymmetryReport r;
    double vec = 0.0;
    const Matrix rho = psi * psi.adjoint();
    for (const auto& g : generators(decl, basis.particles())) {
        const Vector u = apply(g, basis, psi);
        vec = std::max(vec, max_abs(Vector(u - static_cast<double>(g.sign) * psi)));
        r.density_deviation = std::max(r.density_deviation, max_abs(Matrix(u * u.adjoint() - rho)));
    }
    r.vector_deviation = vec;
    return r;
}

/// Pure inputs (purity within 1e-9 of one) are additionally checked as vectors.
inline SymmetryReport symmetry_check(const DensityMatrix& rho, const SymmetryDeclaration& decl,
                                     const Basis& basis) {
    SymmetryReport r;
    for (const auto& g : generators(decl, basis.particles())) {
        const Matrix u = permutation_matrix(g, basis);
        r.density_deviation = std::max(r.density_deviation, max_abs(Matrix(u * rho.matrix() * u.adjoint() - rho.matrix())));
    }
    if (std::abs(rho.purity() - 1.0) < 1e-9) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(rho.matrix());
        const Vector psi = eig.eigenvectors().col(eig.eigenvalues().size() - 1);
        r.vector_deviation = symmetry_check(psi, decl, basis).vector_deviation;
    }
    return r;
}

}  // namespace mergo
