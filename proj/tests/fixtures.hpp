#pragma once

// Shared test systems built from the public API.

#include <array>
#include <cmath>
#include <vector>

#include "mergo/criteria.hpp"
#include "mergo/grid.hpp"
#include "mergo/symmetry.hpp"
#include "oracles.hpp"

namespace fixture {

/// Hydrogen peroxide in a planar trans layout on a fine 2D grid. Registers
/// are ordered O1, O2, H1, H2 (ids 0..3); the basis holds the equilibrium
/// configuration and its images under the oxygen and hydrogen swaps.
struct Peroxide {
    mergo::Basis basis;
    mergo::SymmetryDeclaration declaration;
    mergo::GeometricCriterion naive;  // register-ordered bond test
    std::size_t equilibrium = 0;      // basis index of the unpermuted configuration
    std::size_t oxygen_swapped = 0;
    std::size_t hydrogen_swapped = 0;
    std::size_t both_swapped = 0;
};

inline Peroxide peroxide() {
    using namespace mergo;
    const GridSpec grid(161, 2, 8.0);
    const double h = grid.spacing();
    const double oh = 95.0 / oracle::kPmPerBohr;
    const double oo = 147.0 / oracle::kPmPerBohr;
    auto lbl = [&](double x, double y) { return LatticePoint{static_cast<int>(std::lround(x / h)), static_cast<int>(std::lround(y / h)), 0}; };
    const LatticePoint o1 = lbl(-oo / 2, 0.0), o2 = lbl(oo / 2, 0.0);
    const LatticePoint h1 = lbl(-oo / 2, oh), h2 = lbl(oo / 2, -oh);

    const double m_o = 15.99491462 * oracle::kMePerDalton, m_h = 1.00782503 * oracle::kMePerDalton;
    const ParticleSet ps({{0, Species::nucleus, m_o, 8.0, false},
                          {1, Species::nucleus, m_o, 8.0, false},
                          {2, Species::nucleus, m_h, 1.0, false},
                          {3, Species::nucleus, m_h, 1.0, false}});
    const std::vector<Spin> up(4, Spin::up);
    const Configuration eq{{o1, o2, h1, h2}, up}, os{{o2, o1, h1, h2}, up}, hs{{o1, o2, h2, h1}, up},
        bs{{o2, o1, h2, h1}, up};

    Peroxide p;
    p.basis = basis_from_configurations(grid, ps, {eq, os, hs, bs});
    p.declaration.bosonic_sets = {{0, 1}};
    p.declaration.fermionic_sets = {{2, 3}};
    p.naive.mode = CriterionMode::equilibrium;
    p.naive.epsilon = 0.1;
    p.naive.pairs = {{0, 2, oh}, {1, 3, oh}, {0, 1, oo}};
    p.equilibrium = p.basis.index_of(eq);
    p.oxygen_swapped = p.basis.index_of(os);
    p.hydrogen_swapped = p.basis.index_of(hs);
    p.both_swapped = p.basis.index_of(bs);
    return p;
}

}  // namespace fixture
