#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mergo/grid.hpp"
#include "mergo/rng.hpp"
#include "mergo/symmetry.hpp"
#include "mergo/units.hpp"

namespace mergo {

enum class CriterionMode { equilibrium, proximity };

inline std::string to_string(CriterionMode m) {
    return m == CriterionMode::equilibrium ? "equilibrium" : "proximity";
}

inline CriterionMode criterion_mode_from_string(const std::string& s) {
    if (s == "equilibrium") return CriterionMode::equilibrium;
    if (s == "proximity") return CriterionMode::proximity;
    throw InvalidArgument("unknown criterion mode '" + s + "'");
}

/// One nuclear pair constraint. `value` is the target distance (equilibrium)
/// or the proximity threshold, in Bohr.
struct PairConstraint {
    int j = 0;
    int k = 0;
    double value = 0.0;
    friend bool operator==(const PairConstraint&, const PairConstraint&) = default;
};

/// Bond-geometry test on nuclear coordinates:
///   equilibrium: | |R_j - R_k| - target_jk | <= epsilon for every pair,
///   proximity:   |R_j - R_k| <= threshold_jk for every pair.
/// With `symmetrize_over` set the criterion is the OR of the base test over
/// every image of the configuration under the declared permutation group.
struct GeometricCriterion {
    CriterionMode mode = CriterionMode::proximity;
    std::vector<PairConstraint> pairs;
    double epsilon = 0.0;  // Bohr, equilibrium mode only
    std::optional<SymmetryDeclaration> symmetrize_over;

    void validate() const {
        if (mode == CriterionMode::equilibrium && !(epsilon > 0.0))
            throw InvalidArgument("equilibrium criterion needs epsilon > 0");
        for (const auto& p : pairs) {
            if (mode == CriterionMode::proximity && !(p.value > 0.0))
                throw InvalidArgument("proximity thresholds must be positive");
            if (mode == CriterionMode::equilibrium && !(p.value >= 0.0))
                throw InvalidArgument("target distances must be non-negative");
        }
    }

    /// Copy with distances given in `unit` converted to Bohr.
    GeometricCriterion in_bohr(const std::string& unit) const {
        GeometricCriterion c = *this;
        for (auto& p : c.pairs) p.value = units::convert(p.value, unit, "bohr");
        c.epsilon = units::convert(epsilon, unit, "bohr");
        return c;
    }

    /// OR over the group images of this criterion.
    GeometricCriterion symmetrized(const SymmetryDeclaration& decl) const {
        GeometricCriterion c = *this;
        c.symmetrize_over = decl;
        return c;
    }

    friend bool operator==(const GeometricCriterion&, const GeometricCriterion&) = default;
};

namespace detail {

inline bool base_criterion(const GeometricCriterion& c, const Configuration& cfg, const ParticleSet& particles,
                           const GridSpec& grid) {
    for (const auto& pc : c.pairs) {
        const auto pj = particles.position_of(pc.j);
        const auto pk = particles.position_of(pc.k);
        if (!pj || !pk || particles[*pj].species != Species::nucleus ||
            particles[*pk].species != Species::nucleus)
            throw PairIndexOutOfRange("criterion pair (" + std::to_string(pc.j) + ", " + std::to_string(pc.k) +
                                      ") does not reference two nuclei of this basis");
        const double d = distance(label_to_coord(grid, cfg.labels[*pj]), label_to_coord(grid, cfg.labels[*pk]));
        const bool ok = c.mode == CriterionMode::proximity ? d <= pc.value : std::abs(d - pc.value) <= c.epsilon;
        if (!ok) return false;
    }
    return true;
}

}  // namespace detail

/// Evaluates the criterion on one configuration; returns 0 or 1.
inline int evaluate_criterion(const GeometricCriterion& c, const Configuration& cfg, const ParticleSet& particles,
                              const GridSpec& grid) {
    c.validate();
    if (!c.symmetrize_over) return detail::base_criterion(c, cfg, particles, grid) ? 1 : 0;
    for (const auto& g : group_elements(*c.symmetrize_over, particles))
        if (detail::base_criterion(c, apply(g, cfg), particles, grid)) return 1;
    return 0;
}

inline int evaluate_criterion(const GeometricCriterion& c, const Configuration& cfg, const Basis& basis) {
    return evaluate_criterion(c, cfg, basis.particles(), basis.grid());
}

/// Split of basis indices into accepted (A) and rejected (B) sets.
struct Bipartition {
    std::vector<std::size_t> set_a;
    std::vector<std::size_t> set_b;
    std::vector<bool> in_a;  // indicator over the whole basis

    std::size_t dim() const { return in_a.size(); }

    static Bipartition from_indicator(std::vector<bool> indicator) {
        Bipartition b;
        for (std::size_t i = 0; i < indicator.size(); ++i) (indicator[i] ? b.set_a : b.set_b).push_back(i);
        b.in_a = std::move(indicator);
        return b;
    }

    friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

inline Bipartition bipartition(const GeometricCriterion& c, const Basis& basis) {
    c.validate();
    std::vector<Permutation> group;
    if (c.symmetrize_over) group = group_elements(*c.symmetrize_over, basis.particles());
    std::vector<bool> in_a(basis.size(), false);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& cfg = basis.configuration_at(i);
        if (group.empty()) {
            in_a[i] = detail::base_criterion(c, cfg, basis.particles(), basis.grid());
        } else {
            for (const auto& g : group)
                if (detail::base_criterion(c, apply(g, cfg), basis.particles(), basis.grid())) {
                    in_a[i] = true;
                    break;
                }
        }
    }
    return Bipartition::from_indicator(std::move(in_a));
}

struct SymmetryCounterexample {
    Permutation permutation;
    std::size_t configuration_index = 0;
};

struct SymmetryValidation {
    bool symmetric = true;
    bool exhaustive = true;
    std::size_t checked = 0;  // configurations examined
    std::optional<SymmetryCounterexample> counterexample;
};

inline constexpr std::size_t kExhaustiveValidationLimit = 4096;
inline constexpr std::size_t kValidationSamples = 10000;

/// Checks C(sigma[c]) == C(c) for every generator sigma, exhaustively up to
/// 4096 configurations and by seeded uniform sampling above.
inline SymmetryValidation validate_symmetric(const GeometricCriterion& c, const SymmetryDeclaration& decl,
                                             const Basis& basis, std::uint64_t seed = 0) {
    const auto gens = generators(decl, basis.particles());
    SymmetryValidation out;
    out.exhaustive = basis.size() <= kExhaustiveValidationLimit;
    Rng rng(seed);
    const std::size_t count = out.exhaustive ? basis.size() : kValidationSamples;
    for (std::size_t n = 0; n < count; ++n) {
        const std::size_t i = out.exhaustive ? n : static_cast<std::size_t>(rng.below(basis.size()));
        const auto& cfg = basis.configuration_at(i);
        const int value = evaluate_criterion(c, cfg, basis);
        for (const auto& g : gens) {
            if (evaluate_criterion(c, apply(g, cfg), basis) != value) {
                out.symmetric = false;
                out.counterexample = SymmetryCounterexample{g, i};
                out.checked = n + 1;
                return out;
            }
        }
    }
    out.checked = count;
    return out;
}

}  // namespace mergo
