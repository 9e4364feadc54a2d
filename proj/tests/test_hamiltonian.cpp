#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "mergo/hamiltonian.hpp"
#include "oracles.hpp"

using namespace mergo;

namespace {

Particle electron(int id, bool spin = false) { return {id, Species::electron, 1.0, -1.0, spin}; }
Particle nucleus(int id, double mass = 1836.0, double charge = 1.0) {
    return {id, Species::nucleus, mass, charge, false};
}

Configuration config1d(std::initializer_list<int> xs) {
    Configuration c;
    for (int x : xs) {
        c.labels.push_back({x, 0, 0});
        c.spins.push_back(Spin::up);
    }
    return c;
}

}  // namespace

TEST(Kinetic, SingleParticleThreePointStencil) {
    const Basis b = enumerate_basis(GridSpec(3, 1, 3.0), ParticleSet({electron(0)}));
    const Matrix t = build_kinetic(b).matrix();
    const double h = 1.0;
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(t(i, i).real(), 1.0 / (h * h), 1e-14);
    EXPECT_NEAR(t(0, 1).real(), -0.5 / (h * h), 1e-14);
    EXPECT_NEAR(t(1, 2).real(), -0.5 / (h * h), 1e-14);
    EXPECT_EQ(t(0, 2), cplx(0.0));
}

TEST(Kinetic, DirichletEdgesHaveNoWrap) {
    const Basis b = enumerate_basis(GridSpec(7, 1, 7.0), ParticleSet({electron(0)}));
    const Matrix t = build_kinetic(b).matrix();
    EXPECT_EQ(t(0, 6), cplx(0.0));
    EXPECT_EQ(t(6, 0), cplx(0.0));
}

TEST(Kinetic, NuclearEntriesScaleWithInverseMass) {
    const GridSpec g(5, 2, 4.0);
    const Matrix te = build_kinetic(enumerate_basis(g, ParticleSet({electron(0)}))).matrix();
    const Matrix tn = build_kinetic(enumerate_basis(g, ParticleSet({nucleus(0, 1836.0)}))).matrix();
    EXPECT_LT(oracle::max_entry(te / 1836.0 - tn), 1e-15);
}

TEST(Kinetic, TwoFreeParticlesHaveMinkowskiSumSpectrum) {
    const GridSpec g(3, 1, 3.0);
    const Matrix t1 = build_kinetic(enumerate_basis(g, ParticleSet({electron(0)}))).matrix();
    const Matrix t2 = build_kinetic(enumerate_basis(g, ParticleSet({electron(0), electron(1)}))).matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> e1(t1), e2(t2);
    std::vector<double> sums;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sums.push_back(e1.eigenvalues()[i] + e1.eigenvalues()[j]);
    std::sort(sums.begin(), sums.end());
    for (int k = 0; k < 9; ++k) EXPECT_NEAR(e2.eigenvalues()[k], sums[static_cast<std::size_t>(k)], 1e-12);
}

TEST(Coulomb, OppositeChargesTwoBohrApart) {
    const Basis b = basis_from_configurations(GridSpec(3, 1, 3.0), ParticleSet({electron(0), nucleus(1)}),
                                              {config1d({1, -1})});
    EXPECT_NEAR(build_coulomb(b, 0.0, OperatorTag::coulomb).matrix()(0, 0).real(), -0.5, 1e-15);
}

TEST(Coulomb, CoincidentElectronsUseSoftening) {
    const Basis b = basis_from_configurations(GridSpec(3, 1, 3.0), ParticleSet({electron(0), electron(1)}),
                                              {config1d({0, 0})});
    EXPECT_NEAR(build_coulomb(b, 0.1, OperatorTag::coulomb_ee).matrix()(0, 0).real(), 10.0, 1e-12);
    EXPECT_THROW(build_coulomb(b, 0.0, OperatorTag::coulomb_ee), SingularCoulomb);
}

TEST(Coulomb, MatchesBruteForcePairSumOnHydrogenLikeToy) {
    const GridSpec g(9, 1, 9.0);
    const ParticleSet ps({nucleus(0), nucleus(1), electron(2)});
    const Basis b = enumerate_basis(g, ps);
    const double a = 0.5;
    const Matrix v = build_coulomb(b, a, OperatorTag::coulomb).matrix();
    const double q[3] = {1.0, 1.0, -1.0};
    for (std::size_t k = 0; k < b.size(); ++k) {
        const auto& c = b.configuration_at(k);
        double e = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double dx = (c.labels[static_cast<std::size_t>(i)][0] - c.labels[static_cast<std::size_t>(j)][0]) * 1.0;
                e += q[i] * q[j] / std::sqrt(dx * dx + a * a);
            }
        EXPECT_NEAR(v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real(), e, 1e-13);
    }
    EXPECT_LT(oracle::max_entry(v - Matrix(v.diagonal().asDiagonal())), 1e-300);
}

TEST(Coulomb, SwappingIdenticalParticlesLeavesEntryUnchanged) {
    const GridSpec g(3, 2, 5.0);
    const ParticleSet ps({electron(0), electron(1), nucleus(2)});
    const Basis b = enumerate_basis(g, ps);
    const Matrix v = build_coulomb(b, 0.3, OperatorTag::coulomb).matrix();
    for (std::size_t k = 0; k < b.size(); k += 5) {
        Configuration c = b.configuration_at(k);
        std::swap(c.labels[0], c.labels[1]);
        const auto j = static_cast<Eigen::Index>(b.index_of(c));
        const auto kk = static_cast<Eigen::Index>(k);
        EXPECT_NEAR(v(kk, kk).real(), v(j, j).real(), 1e-14);
    }
}

TEST(Coulomb, TagSelectsPairs) {
    const ParticleSet ps({electron(0), electron(1), nucleus(2), nucleus(3)});
    EXPECT_EQ(pairs_for_tag(ps, OperatorTag::coulomb_ee).size(), 1u);
    EXPECT_EQ(pairs_for_tag(ps, OperatorTag::coulomb_nn).size(), 1u);
    EXPECT_EQ(pairs_for_tag(ps, OperatorTag::coulomb_ne).size(), 4u);
    EXPECT_EQ(pairs_for_tag(ps, OperatorTag::coulomb).size(), 6u);
}

TEST(Trap, NucleusAtCenterHasZeroEnergy) {
    const Basis b = enumerate_basis(GridSpec(3, 1, 3.0), ParticleSet({nucleus(0)}));
    const TrapSpec trap{{0}, {{0.0, 0.0, 0.0}}, {{0.01, 0.01, 0.01}}, true};
    const Matrix v = build_trap(b, trap).matrix();
    EXPECT_EQ(v(1, 1).real(), 0.0);
    EXPECT_NEAR(v(2, 2).real(), 1836.0 / 2.0 * 1e-4, 1e-15);
    EXPECT_NEAR(v(2, 2).real(), 0.0918, 1e-12);
}

TEST(Trap, DoublingFrequencyQuadruplesEntries) {
    const Basis b = enumerate_basis(GridSpec(5, 2, 6.0), ParticleSet({nucleus(0), electron(1)}));
    const TrapSpec trap{{0}, {{0.5, -0.7, 0.0}}, {{0.02, 0.02, 0.02}}, true};
    const Matrix v1 = build_trap(b, trap).matrix();
    const Matrix v2 = build_trap(b, trap.scaled(2.0)).matrix();
    EXPECT_LT(oracle::max_entry(v2 - 4.0 * v1), 1e-14);
}

TEST(Trap, ValidatesCentersFrequenciesAndSpecies) {
    const Basis b = enumerate_basis(GridSpec(3, 1, 3.0), ParticleSet({nucleus(0), electron(1)}));
    EXPECT_THROW(build_trap(b, {{0}, {{5.0, 0, 0}}, {{0.1, 0.1, 0.1}}, true}), CenterOutsideBox);
    EXPECT_THROW(build_trap(b, {{0}, {{0.0, 0, 0}}, {{0.0, 0.0, 0.0}}, true}), InvalidArgument);
    EXPECT_THROW(build_trap(b, {{1}, {{0.0, 0, 0}}, {{0.1, 0.1, 0.1}}, true}), InvalidArgument);
    const Basis b2 = enumerate_basis(GridSpec(3, 2, 3.0), ParticleSet({nucleus(0)}));
    EXPECT_THROW(build_trap(b2, {{0}, {{0.0, 0, 0}}, {{0.1, 0.2, 0.1}}, true}), InvalidArgument);
    EXPECT_NO_THROW(build_trap(b2, {{0}, {{0.0, 0, 0}}, {{0.1, 0.2, 0.1}}, false}));
}

TEST(Trap, CommutesWithOperatorsDiagonalInNuclearCoordinates) {
    const Basis b = enumerate_basis(GridSpec(5, 1, 5.0), ParticleSet({nucleus(0), nucleus(1), electron(2)}));
    const TrapSpec trap{{0, 1}, {{-1.0, 0, 0}, {1.0, 0, 0}}, {{0.05, 0.05, 0.05}, {0.05, 0.05, 0.05}}, true};
    const Matrix v = build_trap(b, trap).matrix();
    const Matrix w = build_coulomb(b, 0.5, OperatorTag::coulomb_nn).matrix();
    EXPECT_LT(oracle::max_entry(v * w - w * v), 1e-12);
    EXPECT_LT(oracle::max_entry(v - Matrix(v.diagonal().asDiagonal())), 1e-300);
}

namespace {

ScheduledHamiltonian toy_hamiltonian(const Schedule& sched) {
    const ParticleSet ps({nucleus(0, 20.0), nucleus(1, 20.0)});
    const Basis b = enumerate_basis(GridSpec(7, 1, 7.0), ps);
    PartitionSpec part;
    part.subsystem_a = {0};
    part.subsystem_b = {1};
    part.trap = TrapSpec{{0, 1}, {{-2.0, 0, 0}, {2.0, 0, 0}}, {{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}}, true};
    return build_scheduled_hamiltonian(b, part, sched);
}

}  // namespace

TEST(Scheduled, BoundaryValuesOfTheSchedule) {
    const Schedule sched{2.0, 5.0, {}, {}};
    const ScheduledHamiltonian sh = toy_hamiltonian(sched);
    const Matrix base = sh.h_a.matrix() + sh.h_b.matrix();
    EXPECT_EQ(oracle::max_entry(sh.evaluate_matrix(0.0) - base), 0.0);
    EXPECT_LT(oracle::max_entry(sh.evaluate_matrix(2.0) - (base + sh.h_ab.matrix() + sh.v_trap.matrix())), 1e-14);
    EXPECT_LT(oracle::max_entry(sh.evaluate_matrix(5.0) - (base + sh.h_ab.matrix())), 1e-14);
    EXPECT_THROW(sh.evaluate_matrix(-0.1), ScheduleOutOfRange);
    EXPECT_THROW(sh.evaluate_matrix(5.1), ScheduleOutOfRange);
    EXPECT_GT(oracle::max_entry(sh.h_ab.matrix()), 0.0);
}

TEST(Scheduled, HermitianAtRandomScheduleValues) {
    const ScheduledHamiltonian sh = toy_hamiltonian({2.0, 5.0, {ProfileKind::smoothstep, 1.0}, {}});
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const Matrix h = sh.evaluate_matrix(u(gen));
        EXPECT_LT(oracle::max_entry(h - h.adjoint()), 1e-12);
    }
    for (const auto* blk : {&sh.h_a, &sh.h_b, &sh.h_ab, &sh.v_trap})
        EXPECT_LT(oracle::max_entry(blk->matrix() - blk->matrix().adjoint()), 1e-12);
}

TEST(Scheduled, PartitionMustCoverDisjointly) {
    const Basis b = enumerate_basis(GridSpec(3, 1, 3.0), ParticleSet({nucleus(0), nucleus(1)}));
    const Schedule sched{1.0, 2.0, {}, {}};
    EXPECT_THROW(build_scheduled_hamiltonian(b, {{0}, {0, 1}, {}, {}}, sched), InvalidArgument);
    EXPECT_THROW(build_scheduled_hamiltonian(b, {{0}, {}, {}, {}}, sched), InvalidArgument);
    EXPECT_THROW(build_scheduled_hamiltonian(b, {{0}, {1}, {}, {}}, Schedule{2.0, 1.0, {}, {}}), InvalidArgument);
}

TEST(Scheduled, ExternalBlockIsAdded) {
    const Basis b = enumerate_basis(GridSpec(3, 1, 3.0), ParticleSet({nucleus(0), nucleus(1)}));
    Matrix ext = Matrix::Zero(9, 9);
    ext(0, 0) = 2.5;
    const auto sh = build_scheduled_hamiltonian(b, {{0}, {1}, {}, {}}, {1.0, 2.0, {}, {}},
                                                OperatorBlock(ext, OperatorTag::external));
    const auto plain = build_scheduled_hamiltonian(b, {{0}, {1}, {}, {}}, {1.0, 2.0, {}, {}});
    EXPECT_LT(oracle::max_entry(sh.evaluate_matrix(0.5) - plain.evaluate_matrix(0.5) - ext), 1e-15);
}

TEST(Operators, RejectNonHermitianInput) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(OperatorBlock(m, OperatorTag::external), NonHermitianHamiltonian);
}

TEST(Operators, MatrixFileRoundTrip) {
    std::mt19937_64 gen(3);
    const Matrix h = oracle::random_hermitian(6, gen);
    std::stringstream ss;
    write_matrix(ss, h, "external");
    const TaggedMatrix back = read_matrix(ss);
    EXPECT_EQ(back.tag, "external");
    EXPECT_LT(oracle::max_entry(back.matrix - h), 1e-15);
    std::stringstream bad("not-a-matrix 1\n");
    EXPECT_THROW(read_matrix(bad), InvalidArgument);
}

TEST(Schedule, ShippedProfilesSatisfyTheContract) {
    const std::vector<Profile> shapes{{ProfileKind::linear, 1.0}, {ProfileKind::smoothstep, 1.0},
                                      {ProfileKind::coulomb, 1.0}, {ProfileKind::coulomb, 3.0}};
    for (const auto& fs : shapes)
        for (const auto& gs : shapes) {
            const Schedule s{1.5, 4.0, fs, gs};
            EXPECT_EQ(s.f(0.0), 0.0);
            EXPECT_EQ(s.g(0.0), 0.0);
            EXPECT_NEAR(s.g(1.5), 1.0, 1e-15);
            EXPECT_EQ(s.g(4.0), 0.0);
            for (double x : {1.5, 2.0, 3.9, 4.0}) EXPECT_EQ(s.f(x), 1.0);
            const int n = 400;
            for (int k = 0; k < n; ++k) {
                const double a = 1.5 * k / n, b = 1.5 * (k + 1) / n;
                EXPECT_LE(s.f(a), s.f(b) + 1e-15);
                EXPECT_LE(s.g(a), s.g(b) + 1e-15);
                const double c = 1.5 + 2.5 * k / n, d = 1.5 + 2.5 * (k + 1) / n;
                EXPECT_GE(s.g(c) + 1e-15, s.g(d));
            }
        }
}

TEST(Schedule, SmoothstepIsTheCubicRamp) {
    const Profile p{ProfileKind::smoothstep, 1.0};
    for (double x : {0.1, 0.25, 0.5, 0.8}) EXPECT_NEAR(p(x), 3 * x * x - 2 * x * x * x, 1e-15);
}

TEST(Schedule, CoulombMimickingConstantTrajectoryIsOne) {
    const Schedule sched{1.0, 2.0, {}, {}};
    const std::vector<double> s{0.0, 0.5, 1.0, 1.5}, z(4, 3.0);
    for (double f : coulomb_mimicking_f(sched, s, z, 3.0)) EXPECT_EQ(f, 1.0);
}

TEST(Schedule, CoulombMimickingHalvingTrajectory) {
    const Schedule sched{1.0, 2.0, {}, {}};
    std::vector<double> s, z;
    for (int k = 0; k <= 10; ++k) {
        s.push_back(0.1 * k);
        z.push_back(4.0 - 2.0 * (0.1 * k));
    }
    const auto f = coulomb_mimicking_f(sched, s, z, 2.0);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) EXPECT_NEAR(f[k], 2.0 / z[k], 1e-15);
    EXPECT_EQ(f.back(), 1.0);
    EXPECT_NEAR(f.front(), 0.5, 1e-15);
    std::vector<double> bad = z;
    bad[3] = 0.0;
    EXPECT_THROW(coulomb_mimicking_f(sched, s, bad, 2.0), NonpositiveDistance);
}

TEST(Schedule, SpeedDiagnosticForLinearRamps) {
    const Schedule sched{2.0, 6.0, {}, {}};
    EXPECT_NEAR(schedule_speed(sched, 1.0, 3.0, 1.0), 1.5, 1e-6);
    EXPECT_NEAR(schedule_speed(sched, 4.0, 3.0, 1.0), 0.25, 1e-6);
}
