#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mergo/grid.hpp"
#include "mergo/linalg.hpp"
#include "mergo/schedule.hpp"

namespace mergo {

enum class OperatorTag { kinetic, coulomb_ee, coulomb_nn, coulomb_ne, coulomb, trap, external, composite };

inline std::string to_string(OperatorTag t) {
    switch (t) {
        case OperatorTag::kinetic: return "kinetic";
        case OperatorTag::coulomb_ee: return "coulomb_ee";
        case OperatorTag::coulomb_nn: return "coulomb_nn";
        case OperatorTag::coulomb_ne: return "coulomb_ne";
        case OperatorTag::coulomb: return "coulomb";
        case OperatorTag::trap: return "trap";
        case OperatorTag::external: return "external";
        case OperatorTag::composite: return "composite";
    }
    return "external";
}

/// Hermitian operator on an enumerated basis.
class OperatorBlock {
public:
    OperatorBlock() = default;
    OperatorBlock(Matrix m, OperatorTag tag) : matrix_(std::move(m)), tag_(tag) {
        if (matrix_.rows() != matrix_.cols()) throw InvalidArgument("operator block must be square");
        if (!is_hermitian(matrix_))
            throw NonHermitianHamiltonian(to_string(tag_) + " block is not Hermitian (error " +
                                          std::to_string(hermiticity_error(matrix_)) + ")");
    }

    static OperatorBlock zero(std::size_t dim, OperatorTag tag) {
        const auto n = static_cast<Eigen::Index>(dim);
        return OperatorBlock(Matrix::Zero(n, n), tag);
    }

    const Matrix& matrix() const { return matrix_; }
    OperatorTag tag() const { return tag_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    OperatorBlock operator+(const OperatorBlock& o) const {
        return OperatorBlock(matrix_ + o.matrix_, OperatorTag::composite);
    }

private:
    Matrix matrix_;
    OperatorTag tag_ = OperatorTag::external;
};

using PairList = std::vector<std::pair<int, int>>;

/// All unordered particle-id pairs whose species match the tag. `coulomb`
/// selects every pair.
inline PairList pairs_for_tag(const ParticleSet& particles, OperatorTag tag) {
    PairList out;
    for (std::size_t i = 0; i < particles.size(); ++i)
        for (std::size_t j = i + 1; j < particles.size(); ++j) {
            const int ne = (particles[i].species == Species::electron) +
                           (particles[j].species == Species::electron);
            const bool keep = tag == OperatorTag::coulomb || (tag == OperatorTag::coulomb_ee && ne == 2) ||
                              (tag == OperatorTag::coulomb_ne && ne == 1) ||
                              (tag == OperatorTag::coulomb_nn && ne == 0);
            if (keep) out.emplace_back(particles[i].id, particles[j].id);
        }
    return out;
}

inline PairList pairs_within(const std::vector<int>& ids) {
    PairList out;
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) out.emplace_back(ids[i], ids[j]);
    return out;
}

inline PairList pairs_across(const std::vector<int>& a, const std::vector<int>& b) {
    PairList out;
    for (int i : a)
        for (int j : b) out.emplace_back(i, j);
    return out;
}

/// Three-point finite-difference kinetic energy for the listed particles,
/// Dirichlet at the edge of the basis.
inline OperatorBlock build_kinetic(const Basis& basis, const std::vector<int>& particle_ids) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    const auto& grid = basis.grid();
    const double h2 = grid.spacing() * grid.spacing();
    Matrix t = Matrix::Zero(n, n);
    std::vector<std::size_t> positions;
    for (int id : particle_ids) {
        auto pos = basis.particles().position_of(id);
        if (!pos) throw InvalidArgument("kinetic term references unknown particle " + std::to_string(id));
        positions.push_back(*pos);
    }
    for (Eigen::Index col = 0; col < n; ++col) {
        const auto& cfg = basis.configuration_at(static_cast<std::size_t>(col));
        for (std::size_t pos : positions) {
            const double m = basis.particles()[pos].mass;
            for (int axis = 0; axis < grid.dims; ++axis) {
                t(col, col) += 1.0 / (m * h2);
                for (int step : {-1, 1}) {
                    Configuration nb = cfg;
                    nb.labels[pos][axis] += step;
                    if (auto row = basis.find(nb)) t(static_cast<Eigen::Index>(*row), col) -= 0.5 / (m * h2);
                }
            }
        }
    }
    return OperatorBlock(std::move(t), OperatorTag::kinetic);
}

inline OperatorBlock build_kinetic(const Basis& basis) {
    return build_kinetic(basis, basis.particles().ids());
}

inline OperatorTag infer_coulomb_tag(const ParticleSet& particles, const PairList& pairs) {
    std::set<int> kinds;
    for (auto [a, b] : pairs) {
        const auto pa = particles.position_of(a), pb = particles.position_of(b);
        if (!pa || !pb) continue;
        kinds.insert((particles[*pa].species == Species::electron) +
                     (particles[*pb].species == Species::electron));
    }
    if (kinds.size() != 1) return OperatorTag::coulomb;
    switch (*kinds.begin()) {
        case 2: return OperatorTag::coulomb_ee;
        case 1: return OperatorTag::coulomb_ne;
        default: return OperatorTag::coulomb_nn;
    }
}

/// Diagonal softened Coulomb energy sum q_i q_j / sqrt(|r_i - r_j|^2 + a^2)
/// over the given particle-id pairs.
inline OperatorBlock build_coulomb(const Basis& basis, double softening, const PairList& pairs) {
    if (!(softening >= 0.0)) throw InvalidArgument("softening must be non-negative");
    const auto& particles = basis.particles();
    std::vector<std::pair<std::size_t, std::size_t>> pos;
    for (auto [a, b] : pairs) {
        const auto pa = particles.position_of(a), pb = particles.position_of(b);
        if (!pa || !pb || a == b) throw InvalidArgument("invalid Coulomb pair");
        pos.emplace_back(*pa, *pb);
    }
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix v = Matrix::Zero(n, n);
    const double a2 = softening * softening;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto x = coordinates(basis.grid(), basis.configuration_at(static_cast<std::size_t>(k)));
        double e = 0.0;
        for (auto [i, j] : pos) {
            const double r = distance(x[i], x[j]);
            const double denom = std::sqrt(r * r + a2);
            if (denom == 0.0)
                throw SingularCoulomb("coincident particles with zero softening");
            e += particles[i].charge * particles[j].charge / denom;
        }
        v(k, k) = e;
    }
    return OperatorBlock(std::move(v), infer_coulomb_tag(particles, pairs));
}

inline OperatorBlock build_coulomb(const Basis& basis, double softening, OperatorTag tag) {
    return OperatorBlock(build_coulomb(basis, softening, pairs_for_tag(basis.particles(), tag)).matrix(),
                         tag);
}

/// Per-nucleus harmonic confinement (m_j / 2) sum_w w_{j,w}^2 (R_{j,w} - R0_{j,w})^2.
struct TrapSpec {
    std::vector<int> nucleus_ids;
    std::vector<Coord> centers;
    std::vector<std::array<double, 3>> frequencies;  // per nucleus, per axis (atomic units)
    bool isotropic = true;

    TrapSpec scaled(double factor) const {
        TrapSpec t = *this;
        for (auto& w : t.frequencies)
            for (auto& x : w) x *= factor;
        return t;
    }

    void validate(const GridSpec& grid) const {
        if (centers.size() != nucleus_ids.size() || frequencies.size() != nucleus_ids.size())
            throw InvalidArgument("trap ids, centers and frequencies differ in length");
        for (std::size_t j = 0; j < nucleus_ids.size(); ++j) {
            for (int a = 0; a < grid.dims; ++a) {
                if (!(frequencies[j][a] > 0.0)) throw InvalidArgument("trap frequencies must be positive");
                if (isotropic && frequencies[j][a] != frequencies[j][0])
                    throw InvalidArgument("isotropic trap with unequal axis frequencies");
            }
            if (!grid.contains(centers[j]))
                throw CenterOutsideBox("trap center for nucleus " + std::to_string(nucleus_ids[j]) +
                                       " lies outside the box");
        }
    }

    friend bool operator==(const TrapSpec&, const TrapSpec&) = default;
};

inline OperatorBlock build_trap(const Basis& basis, const TrapSpec& trap) {
    trap.validate(basis.grid());
    const auto& particles = basis.particles();
    std::vector<std::size_t> pos;
    for (int id : trap.nucleus_ids) {
        auto p = particles.position_of(id);
        if (!p) throw InvalidArgument("trap references unknown particle " + std::to_string(id));
        if (particles[*p].species != Species::nucleus)
            throw InvalidArgument("trap acts on nuclei only");
        pos.push_back(*p);
    }
    const auto n = static_cast<Eigen::Index>(basis.size());
    const int dims = basis.grid().dims;
    Matrix v = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& cfg = basis.configuration_at(static_cast<std::size_t>(k));
        double e = 0.0;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            const Coord r = label_to_coord(basis.grid(), cfg.labels[pos[j]]);
            const double m = particles[pos[j]].mass;
            for (int w = 0; w < dims; ++w) {
                const double d = r[w] - trap.centers[j][w];
                e += 0.5 * m * trap.frequencies[j][w] * trap.frequencies[j][w] * d * d;
            }
        }
        v(k, k) = e;
    }
    return OperatorBlock(std::move(v), OperatorTag::trap);
}

/// H(s) = h_a + h_b + f(s) h_ab + g(s) v_trap.
struct ScheduledHamiltonian {
    OperatorBlock h_a, h_b, h_ab, v_trap;
    Schedule schedule;

    Eigen::Index dim() const { return h_a.dim(); }

    Matrix evaluate_matrix(double s) const {
        if (!(s >= 0.0 && s <= schedule.s1))
            throw ScheduleOutOfRange("s = " + std::to_string(s) + " outside [0, s1]");
        Matrix h = h_a.matrix() + h_b.matrix();
        const double f = schedule.f(s), g = schedule.g(s);
        if (f != 0.0) h += f * h_ab.matrix();
        if (g != 0.0) h += g * v_trap.matrix();
        return h;
    }

    /// Max-entry bound on ||H(s)|| over the whole schedule.
    double max_entry_bound() const {
        return max_abs(h_a.matrix() + h_b.matrix()) + max_abs(h_ab.matrix()) + max_abs(v_trap.matrix());
    }
};

inline OperatorBlock evaluate(const ScheduledHamiltonian& sh, double s) {
    return OperatorBlock(sh.evaluate_matrix(s), OperatorTag::composite);
}

/// Options for assembling a scheduled Hamiltonian from a basis and a
/// two-way particle partition.
struct PartitionSpec {
    std::vector<int> subsystem_a;
    std::vector<int> subsystem_b;
    std::optional<double> softening;  // defaults to one grid spacing
    std::optional<TrapSpec> trap;
};

/// Kinetic and intra-subsystem Coulomb terms go to h_a / h_b, every
/// cross-subsystem pair goes to h_ab, the trap acts on the listed nuclei.
inline ScheduledHamiltonian build_scheduled_hamiltonian(const Basis& basis, const PartitionSpec& part,
                                                        const Schedule& schedule,
                                                        const std::optional<OperatorBlock>& external = {}) {
    schedule.validate();
    std::set<int> seen;
    for (const auto* set : {&part.subsystem_a, &part.subsystem_b})
        for (int id : *set) {
            if (!basis.particles().position_of(id))
                throw InvalidArgument("partition references unknown particle " + std::to_string(id));
            if (!seen.insert(id).second) throw InvalidArgument("subsystems must be disjoint");
        }
    if (seen.size() != basis.particles().size())
        throw InvalidArgument("subsystems must cover every particle");

    const double a = part.softening.value_or(basis.grid().spacing());
    const auto dim = basis.size();
    auto subsystem = [&](const std::vector<int>& ids) {
        OperatorBlock h = build_kinetic(basis, ids);
        if (ids.size() > 1) h = h + build_coulomb(basis, a, pairs_within(ids));
        return h;
    };
    ScheduledHamiltonian sh;
    sh.h_a = subsystem(part.subsystem_a);
    sh.h_b = subsystem(part.subsystem_b);
    if (external) sh.h_a = sh.h_a + *external;
    const auto cross = pairs_across(part.subsystem_a, part.subsystem_b);
    sh.h_ab = cross.empty() ? OperatorBlock::zero(dim, OperatorTag::coulomb)
                            : build_coulomb(basis, a, cross);
    sh.v_trap = part.trap ? build_trap(basis, *part.trap) : OperatorBlock::zero(dim, OperatorTag::trap);
    sh.schedule = schedule;
    return sh;
}

}  // namespace mergo
