#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ionlambda/dynamics.hpp"
#include "oracles.hpp"

using namespace ionlambda;

namespace {

ModeParams unit_mode(unsigned quanta = 1) {
    return unit_normalized(ModeParams{0.202, 1.0, quanta, 0.01, false});
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
    return t;
}

// Ion in |2>, fields in the |2> member of triplet T(n, n).
Scenario triplet_scenario(unsigned n, PulseProfile profile, std::vector<double> times) {
    Scenario sc;
    sc.mode1 = sc.mode2 = unit_mode();
    sc.profile = profile;
    sc.field1 = FieldSpec::fock(n);
    sc.field2 = FieldSpec::fock(n + 1);
    sc.times = std::move(times);
    return sc;
}

Eigen::Matrix3cd diag(double a, double b, double c) {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
}

}  // namespace

TEST(Field, FockAmplitudes) {
    const auto a = field_amplitudes(FieldSpec::fock(0), 5);
    ASSERT_EQ(a.size(), 6u);
    EXPECT_EQ(a[0], cplx(1.0));
    for (int i = 1; i < 6; ++i) EXPECT_EQ(a[i], cplx(0.0));
    EXPECT_THROW(field_amplitudes(FieldSpec::fock(7), 5), std::invalid_argument);
}

TEST(Field, CoherentVacuumIsFockVacuum) {
    EXPECT_EQ(field_amplitudes(FieldSpec::coherent(0.0), 4), field_amplitudes(FieldSpec::fock(0), 4));
    EXPECT_EQ(choose_cutoff(FieldSpec::coherent(0.0), 1e-10), 0u);
}

TEST(Field, CoherentPoissonWeights) {
    const auto spec = FieldSpec::coherent(10.0);
    const unsigned cutoff = choose_cutoff(spec);
    const auto a = field_amplitudes(spec, cutoff + 3);
    const double p10 = std::exp(-10.0 + 10.0 * std::log(10.0) - std::lgamma(11.0));
    EXPECT_NEAR(std::norm(a[10]), 0.12511, 1e-5);
    // renormalizing after truncation rescales by at most 1 + tail_tol
    EXPECT_NEAR(std::norm(a[10]), p10, 2.0 * spec.tail_tol * p10);
    double norm = 0.0;
    for (const auto& c : a) norm += std::norm(c);
    EXPECT_NEAR(norm, 1.0, 1e-14);
    for (unsigned n = cutoff + 1; n < a.size(); ++n) EXPECT_EQ(a[n], cplx(0.0));
}

TEST(Field, CutoffMatchesPoissonTailScan) {
    EXPECT_EQ(choose_cutoff(FieldSpec::fock(15), 1e-10), 15u);
    for (double nbar : {0.5, 3.0, 10.0, 25.0}) {
        for (double tol : {1e-6, 1e-10}) {
            const unsigned n = choose_cutoff(FieldSpec::coherent(nbar), tol);
            EXPECT_LT(oracle::poisson_tail(nbar, n), tol) << nbar;
            if (n > 0) {
                EXPECT_GE(oracle::poisson_tail(nbar, n - 1), tol) << nbar;
            }
        }
    }
    const unsigned n10 = choose_cutoff(FieldSpec::coherent(10.0), 1e-10);
    EXPECT_GE(n10, 35u);
    EXPECT_LE(n10, 45u);
}

TEST(InitialJoint, ProductStates) {
    const Cutoffs c{2, 2};
    const auto up = initial_joint(ion_level(Level::two), FieldSpec::fock(0), FieldSpec::fock(0), c);
    EXPECT_EQ((up[{Level::two, 0, 0}]), cplx(1.0));
    EXPECT_NEAR(up.norm_squared(), 1.0, 1e-15);

    const auto sup = initial_joint({1.0, 0.0, 1.0}, FieldSpec::fock(0), FieldSpec::fock(0), c);
    EXPECT_NEAR((sup[{Level::one, 0, 0}].real()), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR((sup[{Level::three, 0, 0}].real()), 1.0 / std::sqrt(2.0), 1e-15);

    const Cutoffs big{40, 40};
    const auto coh = initial_joint(ion_level(Level::two), FieldSpec::coherent(10.0), FieldSpec::coherent(5.0), big);
    EXPECT_NEAR(coh.norm_squared(), 1.0, 1e-12);

    EXPECT_THROW(initial_joint({0.0, 0.0, 0.0}, FieldSpec::fock(0), FieldSpec::fock(0), c),
                 std::invalid_argument);
}

TEST(ReduceIon, Examples) {
    const Cutoffs c{4, 2};
    const auto prod = initial_joint({0.6, cplx(0.0, 0.8), 0.0}, FieldSpec::coherent(0.5, 1e-3),
                                    FieldSpec::fock(1), c);
    const auto rho = reduce_ion(prod);
    EXPECT_NEAR(rho.squaredNorm(), 1.0, 1e-14);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);

    JointState ent(c);
    ent[{Level::one, 0, 0}] = 1.0 / std::sqrt(2.0);
    ent[{Level::three, 1, 0}] = 1.0 / std::sqrt(2.0);
    EXPECT_LE((reduce_ion(ent) - diag(0.5, 0.0, 0.5)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Entropy, Examples) {
    Eigen::Matrix3cd pure = Eigen::Matrix3cd::Zero();
    pure(1, 1) = 1.0;
    EXPECT_NEAR(linear_entropy(pure), 0.0, 1e-15);
    EXPECT_NEAR(von_neumann_entropy(pure), 0.0, 1e-15);

    EXPECT_NEAR(linear_entropy(diag(0.5, 0.5, 0.0)), 0.5, 1e-15);
    EXPECT_NEAR(linear_entropy(diag(1.0 / 3, 1.0 / 3, 1.0 / 3)), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(von_neumann_entropy(diag(1.0 / 3, 1.0 / 3, 1.0 / 3)), std::log(3.0), 1e-14);
    EXPECT_NEAR(von_neumann_entropy(diag(0.5, 0.5, 0.0)), std::log(2.0), 1e-14);

    // a rotated pure state is still pure
    Eigen::Vector3cd v(cplx(0.3, 0.1), cplx(-0.5, 0.4), cplx(0.2, -0.67));
    v.normalize();
    const Eigen::Matrix3cd proj = v * v.adjoint();
    EXPECT_NEAR(linear_entropy(proj), 0.0, 1e-14);
    EXPECT_NEAR(von_neumann_entropy(proj), 0.0, 1e-12);
}

TEST(EntropySeries, StartsPure) {
    const auto s = entropy_series(triplet_scenario(0, PulseProfile::sech(1.0, -10.0), {-10.0}));
    ASSERT_EQ(s.s_linear.size(), 1u);
    EXPECT_NEAR(s.s_linear[0], 0.0, 1e-15);
    EXPECT_NEAR(s.s_vn[0], 0.0, 1e-15);
}

TEST(EntropySeries, VacuumUpperStateIsTwoLevel) {
    // |2,0,0> has no |3> partner (mode 2 would need -m2 quanta): populations
    // (sin^2, cos^2, 0) give a maximum of 1/2.
    Scenario sc = triplet_scenario(0, PulseProfile::constant(0.0), linspace(0.0, 10.0, 2001));
    sc.field2 = FieldSpec::fock(0);
    const auto s = entropy_series(sc);
    const double mx = *std::max_element(s.s_linear.begin(), s.s_linear.end());
    EXPECT_NEAR(mx, 0.5, 1e-5);
    EXPECT_LE(mx, 0.5 + 1e-12);
}

TEST(EntropySeries, TripletMaximumIsTwoThirds) {
    // populations (sin^2/2, cos^2, sin^2/2) peak in entropy where cos^2 = 1/3
    const double mu = std::sqrt(2.0);
    const double t_peak = std::acos(1.0 / std::sqrt(3.0)) / mu;
    const auto s = entropy_series(triplet_scenario(0, PulseProfile::constant(0.0), {t_peak, t_peak + std::numbers::pi / mu}));
    EXPECT_NEAR(s.s_linear[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.s_linear[1], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.s_vn[0], std::log(3.0), 1e-10);
}

TEST(EntropySeries, PeriodicInRabiArea) {
    const double mu = std::sqrt(2.0);
    const double period = std::numbers::pi / mu;
    const auto times = linspace(0.0, 3.0, 61);
    std::vector<double> shifted;
    for (double t : times) shifted.push_back(t + 4.0 * period);
    const auto a = entropy_series(triplet_scenario(0, PulseProfile::constant(0.0), times));
    const auto b = entropy_series(triplet_scenario(0, PulseProfile::constant(0.0), shifted));
    for (std::size_t i = 0; i < times.size(); ++i) ASSERT_NEAR(a.s_linear[i], b.s_linear[i], 1e-10);
}

TEST(EntropySeries, FrozenAfterSechPulse) {
    const auto profile = PulseProfile::sech(1.0, -10.0);
    const double t_freeze = freeze_time(profile, 1e-8);
    const auto s = entropy_series(triplet_scenario(3, profile, linspace(t_freeze, t_freeze + 30.0, 101)));
    const auto [lo, hi] = std::minmax_element(s.s_linear.begin(), s.s_linear.end());
    EXPECT_LE(*hi - *lo, 1e-6);
}

TEST(EntropySeries, BoundsNormAndPurityEquality) {
    Scenario sc;
    sc.mode1 = unit_mode(1);
    sc.mode2 = unit_mode(2);
    sc.profile = PulseProfile::sech(0.8, -8.0);
    sc.ion = {cplx(0.2, 0.1), 0.9, cplx(0.0, -0.3)};
    sc.field1 = FieldSpec::coherent(4.0, 1e-12);
    sc.field2 = FieldSpec::coherent(2.0, 1e-12);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> when(-8.0, 30.0);
    const Cutoffs c = scenario_cutoffs(sc);
    const auto d = std::make_shared<const Decomposition>(decompose(sc.mode1, sc.mode2, c));
    const auto psi0 = initial_joint(sc.ion, sc.field1, sc.field2, c);
    for (int trial = 0; trial < 40; ++trial) {
        const auto psi = apply(assemble(d, sc.profile, when(rng)), psi0);
        ASSERT_NEAR(psi.norm_squared(), 1.0, 1e-12);
        const auto rho = reduce_ion(psi);
        ASSERT_NEAR(rho.trace().real(), 1.0, 1e-12);
        ASSERT_LE((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> eig(rho);
        ASSERT_GE(eig.eigenvalues().minCoeff(), -1e-12);
        const double ion_purity = rho.squaredNorm();
        ASSERT_NEAR(ion_purity, field_purity(psi), 1e-12);
        const double sl = linear_entropy(rho), sv = von_neumann_entropy(rho);
        ASSERT_GE(sl, -1e-12);
        ASSERT_LE(sl, 2.0 / 3.0 + 1e-12);
        ASSERT_GE(sv, -1e-12);
        ASSERT_LE(sv, std::log(3.0) + 1e-12);
    }
}

TEST(EntropySeries, LinearZeroIffVonNeumannZero) {
    const double mu = std::sqrt(2.0);
    // exact returns at k pi / mu, plus generic times
    std::vector<double> times{0.0, std::numbers::pi / mu, 2.0 * std::numbers::pi / mu, 0.37, 1.9};
    const auto s = entropy_series(triplet_scenario(0, PulseProfile::constant(0.0), times));
    for (std::size_t i = 0; i < times.size(); ++i) {
        const bool lin_zero = s.s_linear[i] < 1e-9;
        const bool vn_zero = s.s_vn[i] < 1e-6;
        EXPECT_EQ(lin_zero, vn_zero) << "t=" << times[i];
    }
    EXPECT_LT(s.s_linear[1], 1e-12);
    EXPECT_GT(s.s_linear[3], 1e-3);
}

TEST(EntropySeries, ClippedSupportIsRejected) {
    Scenario sc = triplet_scenario(2, PulseProfile::constant(0.0), {0.0, 1.0});
    sc.cutoffs = Cutoffs{2, 3};  // |1, 3, 3> is outside
    EXPECT_THROW(entropy_series(sc), TruncationError);
}

TEST(ClassifyTail, ConstantProfileOscillates) {
    const auto s = entropy_series(triplet_scenario(0, PulseProfile::constant(0.0), linspace(0.0, 5.0, 11)));
    const auto r = classify_tail(s, PulseProfile::constant(0.0));
    EXPECT_EQ(r.classification, PlateauReport::Classification::Oscillatory);
}

TEST(ClassifyTail, QuantizedAreaGivesSuddenDeath) {
    // total area of sech from -10 tau is K tau; pick tau so that mu K tau = 3 pi
    const double mu = std::sqrt(2.0);
    const double k_per_tau = 4.0 * (std::numbers::pi / 4.0 + std::atan(std::tanh(2.5)));
    const double tau = 3.0 * std::numbers::pi / (mu * k_per_tau);
    const auto profile = PulseProfile::sech(tau, -10.0 * tau);
    const auto s = entropy_series(triplet_scenario(0, profile, linspace(-10.0 * tau, 50.0 * tau, 1201)));
    const auto r = classify_tail(s, profile);
    EXPECT_EQ(r.classification, PlateauReport::Classification::SuddenDeath);
    EXPECT_LT(r.s_frozen, 1e-3);
    EXPECT_LE(r.tail_variation, 1e-6);
    EXPECT_TRUE(std::isfinite(r.t_death));
    EXPECT_LT(r.t_death, r.t_freeze);
}

TEST(ClassifyTail, CoherentPulseLeavesPlateau) {
    Scenario sc;
    sc.mode1 = sc.mode2 = unit_mode();
    sc.profile = PulseProfile::sech(1.0, -10.0);
    sc.field1 = sc.field2 = FieldSpec::coherent(10.0);
    sc.times = linspace(-10.0, 60.0, 351);
    const auto r = classify_tail(entropy_series(sc), sc.profile);
    EXPECT_EQ(r.classification, PlateauReport::Classification::LongLiving);
    EXPECT_GT(r.s_frozen, 1e-3);
}

TEST(ClassifyTail, SeriesMustReachFreeze) {
    const auto profile = PulseProfile::sech(1.0, -10.0);
    const auto s = entropy_series(triplet_scenario(0, profile, linspace(-10.0, 30.0, 41)));
    EXPECT_THROW(classify_tail(s, profile), std::runtime_error);
}

TEST(ClassifyTail, FreezeTime) {
    const auto profile = PulseProfile::sech(2.0, -20.0);
    const double tf = freeze_time(profile, 1e-8);
    EXPECT_NEAR(profile.gamma(tf), 1e-8, 1e-20);
    EXPECT_LT(profile.gamma(tf + 1e-6), 1e-8);
}
