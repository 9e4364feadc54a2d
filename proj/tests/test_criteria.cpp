#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "mergo/weakmeas.hpp"
#include "oracles.hpp"

using namespace mergo;

namespace {

ParticleSet two_nuclei() {
    return ParticleSet({{0, Species::nucleus, 1836.0, 1.0, false}, {1, Species::nucleus, 1836.0, 1.0, false}});
}

Configuration at(int a, int b) { return {{{a, 0, 0}, {b, 0, 0}}, {Spin::up, Spin::up}}; }

GeometricCriterion proximity(double threshold) {
    GeometricCriterion c;
    c.mode = CriterionMode::proximity;
    c.pairs = {{0, 1, threshold}};
    return c;
}

Matrix projector(const Bipartition& bip) {
    const auto n = static_cast<Eigen::Index>(bip.dim());
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t i : bip.set_a) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return p;
}

}  // namespace

TEST(Criterion, ProximityAcceptsCloseNuclei) {
    const GridSpec g(11, 1, 11.0);
    EXPECT_EQ(evaluate_criterion(proximity(2.0), at(0, 1), two_nuclei(), g), 1);
    EXPECT_EQ(evaluate_criterion(proximity(2.0), at(-2, 1), two_nuclei(), g), 0);
}

TEST(Criterion, EquilibriumRejectsOffTargetDistance) {
    const GridSpec g(11, 1, 11.0);
    GeometricCriterion c;
    c.mode = CriterionMode::equilibrium;
    c.pairs = {{0, 1, 95.0}};
    c.epsilon = 0.05;
    c = c.in_bohr("pm");
    EXPECT_NEAR(c.pairs[0].value, 95.0 / oracle::kPmPerBohr, 1e-9);
    EXPECT_EQ(evaluate_criterion(c, at(-1, 1), two_nuclei(), g), 0);
}

TEST(Criterion, PairsMustReferenceNuclei) {
    const GridSpec g(3, 1, 3.0);
    const ParticleSet ps({{0, Species::electron, 1.0, -1.0, false}, {1, Species::nucleus, 1836.0, 1.0, false}});
    EXPECT_THROW(evaluate_criterion(proximity(1.0), at(0, 1), ps, g), PairIndexOutOfRange);
    GeometricCriterion c = proximity(1.0);
    c.pairs[0].k = 9;
    EXPECT_THROW(evaluate_criterion(c, at(0, 1), two_nuclei(), g), PairIndexOutOfRange);
    EXPECT_THROW(evaluate_criterion(proximity(-1.0), at(0, 1), two_nuclei(), g), InvalidArgument);
}

TEST(Criterion, PeroxideRegisterOrderedTest) {
    const auto px = fixture::peroxide();
    auto value = [&](std::size_t i) { return evaluate_criterion(px.naive, px.basis.configuration_at(i), px.basis); };
    EXPECT_EQ(value(px.equilibrium), 1);
    EXPECT_EQ(value(px.oxygen_swapped), 0);
    EXPECT_EQ(value(px.hydrogen_swapped), 0);
    EXPECT_EQ(value(px.both_swapped), 1);
}

TEST(Bipartition, AcceptAllAndRejectAll) {
    const Basis b = enumerate_basis(GridSpec(5, 1, 5.0), two_nuclei());
    const auto all = bipartition(proximity(100.0), b);
    EXPECT_TRUE(all.set_b.empty());
    EXPECT_EQ(all.set_a.size(), b.size());
    GeometricCriterion none = proximity(100.0);
    none.mode = CriterionMode::equilibrium;
    none.epsilon = 1e-3;
    const auto empty = bipartition(none, b);
    EXPECT_TRUE(empty.set_a.empty());
}

TEST(Bipartition, MatchesBruteForceDoubleLoop) {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> thr(0.2, 6.0);
    for (int m : {5, 11, 31}) {
        const GridSpec g(m, 1, 9.0);
        const Basis b = enumerate_basis(g, two_nuclei());
        for (int t = 0; t < 5; ++t) {
            const double d = thr(gen);
            const auto bip = bipartition(proximity(d), b);
            std::size_t idx = 0;
            std::vector<std::size_t> expected;
            const double h = 9.0 / m;
            for (int a = -(m - 1) / 2; a <= (m - 1) / 2; ++a)
                for (int c = -(m - 1) / 2; c <= (m - 1) / 2; ++c, ++idx)
                    if (std::abs(a - c) * h <= d) expected.push_back(idx);
            EXPECT_EQ(bip.set_a, expected);
            EXPECT_EQ(bip.set_a.size() + bip.set_b.size(), b.size());
        }
    }
}

TEST(Bipartition, ExhaustiveAgainstBruteForceUpTo1024) {
    const GridSpec g(9, 1, 9.0);
    const ParticleSet ps({{0, Species::nucleus, 1836.0, 1.0, false},
                          {1, Species::nucleus, 1836.0, 1.0, false},
                          {2, Species::nucleus, 1836.0, 1.0, false}});
    const Basis b = enumerate_basis(g, ps);
    ASSERT_LE(b.size(), 1024u);
    GeometricCriterion c;
    c.mode = CriterionMode::proximity;
    c.pairs = {{0, 1, 2.0}, {1, 2, 3.0}};
    const auto bip = bipartition(c, b);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& cfg = b.configuration_at(i);
        const bool ok = std::abs(cfg.labels[0][0] - cfg.labels[1][0]) <= 2 && std::abs(cfg.labels[1][0] - cfg.labels[2][0]) <= 3;
        EXPECT_EQ(bip.in_a[i], ok);
    }
}

TEST(Validation, ClosedProximityCriterionIsSymmetric) {
    const Basis b = enumerate_basis(GridSpec(9, 1, 9.0), two_nuclei());
    const SymmetryDeclaration d{{{0, 1}}, {}};
    const auto v = validate_symmetric(proximity(2.5), d, b);
    EXPECT_TRUE(v.symmetric);
    EXPECT_TRUE(v.exhaustive);
    EXPECT_EQ(v.checked, b.size());
}

TEST(Validation, NaivePeroxideCriterionHasCounterexample) {
    const auto px = fixture::peroxide();
    const auto v = validate_symmetric(px.naive, px.declaration, px.basis);
    ASSERT_FALSE(v.symmetric);
    ASSERT_TRUE(v.counterexample.has_value());
    const auto& cfg = px.basis.configuration_at(v.counterexample->configuration_index);
    const auto img = apply(v.counterexample->permutation, cfg);
    EXPECT_NE(evaluate_criterion(px.naive, cfg, px.basis), evaluate_criterion(px.naive, img, px.basis));
}

TEST(Validation, SymmetrizedPeroxideCriterionPasses) {
    const auto px = fixture::peroxide();
    const auto sym = px.naive.symmetrized(px.declaration);
    EXPECT_TRUE(validate_symmetric(sym, px.declaration, px.basis).symmetric);
    const auto bip = bipartition(sym, px.basis);
    EXPECT_EQ(bip.set_a.size(), 4u);
}

TEST(Validation, SymmetricCriterionProjectorCommutesWithPermutations) {
    const Basis b = enumerate_basis(GridSpec(7, 1, 7.0), ParticleSet({{0, Species::nucleus, 1836.0, 1.0, false},
                                                                       {1, Species::nucleus, 1836.0, 1.0, false},
                                                                       {2, Species::nucleus, 1836.0, 1.0, false}}));
    const SymmetryDeclaration d{{{0, 1, 2}}, {}};
    GeometricCriterion c;
    c.mode = CriterionMode::proximity;
    c.pairs = {{0, 1, 2.0}, {0, 2, 2.0}, {1, 2, 2.0}};
    ASSERT_TRUE(validate_symmetric(c, d, b).symmetric);
    const Matrix p = projector(bipartition(c, b));
    for (const auto& g : group_elements(d, b.particles())) {
        const Matrix u = permutation_matrix(g, b);
        EXPECT_LT(oracle::max_entry(p * u - u * p), 1e-12);
    }
}

TEST(Validation, AsymmetricCriterionBreaksSymmetrizedState) {
    const auto px = fixture::peroxide();
    ASSERT_FALSE(validate_symmetric(px.naive, px.declaration, px.basis).symmetric);
    Vector v = Vector::Zero(4);
    v[static_cast<Eigen::Index>(px.equilibrium)] = 1.0;
    const Vector psi = antisymmetrize(v, px.declaration, px.basis);
    const auto out = weak_measure_analytic(DensityMatrix::from_pure(psi), bipartition(px.naive, px.basis), kHalfPi);
    EXPECT_NEAR(out.p1, 0.5, 1e-12);
    EXPECT_GT(symmetry_check(out.success_state(), px.declaration, px.basis).max_deviation(), 0.1);
}

TEST(Validation, SamplesAboveTheExhaustiveLimit) {
    const Basis b = enumerate_basis(GridSpec(65, 1, 9.0), two_nuclei(), 8192);
    ASSERT_GT(b.size(), kExhaustiveValidationLimit);
    const auto v = validate_symmetric(proximity(2.0), SymmetryDeclaration{{{0, 1}}, {}}, b, 17);
    EXPECT_TRUE(v.symmetric);
    EXPECT_FALSE(v.exhaustive);
    EXPECT_EQ(v.checked, kValidationSamples);
}
