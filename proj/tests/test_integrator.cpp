#include "imexrk/constructor.hpp"
#include "imexrk/experiments.hpp"
#include "imexrk/integrator.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace imexrk;
using imexrk::testing::data_path;
using imexrk::testing::fixture;

namespace {

ButcherPaird constructed_rk3() {
  std::ifstream is(data_path("specs/rk3_energy_stable.spec"));
  std::stringstream ss;
  ss << is.rdbuf();
  return construct_rk3(parse_rk3_spec(ss.str()));
}

double slope(const std::vector<double>& x, const std::vector<double>& y) { return fit_order(x, y); }

}  // namespace

TEST(Step, AllenCahnFixedPoints) {
  const auto grid = PeriodicGrid::make(2, 16);
  for (const auto& pair : {fixture("ars111"), fixture("ars222"), fixture("rk3_4stage_a"), constructed_rk3()})
    for (double tau : {0.01, 1.0, 100.0})
      for (double level : {-1.0, 0.0, 1.0}) {
        const auto plan = StepPlan::make(pair, ModelSpec::make(ModelKind::AllenCahn, 0.1, 2.0, 3.0), grid, tau);
        const auto u = imex_step(plan, SpectralField::constant(grid, level));
        EXPECT_LE((u.values - level).abs().maxCoeff(), 1e-12) << "tau=" << tau << " level=" << level;
      }
}

TEST(Step, LinearFirstOrderStepIsBackwardEuler) {
  auto spec = ModelSpec::make(ModelKind::AllenCahn, 1.0);
  spec.nonlinear = false;
  const auto grid = PeriodicGrid::make(1, 32);
  const auto plan = StepPlan::make(fixture("ars111"), spec, grid, 1.0);
  const auto u0 = SpectralField::sample(grid, [](double x, double) { return std::cos(x); });
  const auto u1 = imex_step(plan, u0);
  EXPECT_LE((u1.values - 0.5 * u0.values).abs().maxCoeff(), 1e-14);
}

TEST(Step, ZeroStabilizationIsTheUnstabilizedScheme) {
  // With alpha = beta = 0 the explicit term is exactly G f.
  const auto grid = PeriodicGrid::make(1, 32);
  const auto pair = fixture("ars222");
  const auto spec = ModelSpec::make(ModelKind::AllenCahn, 0.2);
  const auto u0 = random_initial_field(grid, 4);
  const auto plan = StepPlan::make(pair, spec, grid, 0.05);
  const auto u1 = imex_step(plan, u0);
  // Hand-rolled two-stage recurrence in physical/spectral space.
  const auto lap = laplacian_symbol(grid);
  const double e2 = spec.epsilon * spec.epsilon, tau = 0.05;
  const auto f = [&](const SpectralField& v) { return nonlinearity(spec, v); };
  SpectralField v1 = u0;
  {
    SpectralField rhs = u0;
    rhs.values -= tau * pair.Ahat(0, 0) * f(u0).values;
    v1 = stage_solve({grid, e2 * lap.multiplier}, pair.A(0, 0), tau, rhs);
  }
  SpectralField rhs = u0;
  rhs.values += tau * pair.A(1, 0) * apply_symbol({grid, e2 * lap.multiplier}, v1).values;
  rhs.values -= tau * (pair.Ahat(1, 0) * f(u0).values + pair.Ahat(1, 1) * f(v1).values);
  const auto v2 = stage_solve({grid, e2 * lap.multiplier}, pair.A(1, 1), tau, rhs);
  EXPECT_LE((u1.values - v2.values).abs().maxCoeff(), 1e-13);
}

// One-step error against exp(lambda tau) for u = cos x with the nonlinearity
// off, fitted over tau = 2^-3 .. 2^-9.
static double single_mode_slope(const ButcherPaird& pair, double eps, double alpha, double beta) {
  const auto grid = PeriodicGrid::make(1, 16);
  auto spec = ModelSpec::make(ModelKind::AllenCahn, eps, alpha, beta);
  spec.nonlinear = false;
  const auto u0 = SpectralField::sample(grid, [](double x, double) { return std::cos(x); });
  std::vector<double> taus, errs;
  for (int e = 3; e <= 9; ++e) {
    const double tau = std::ldexp(1.0, -e);
    const auto u1 = imex_step(StepPlan::make(pair, spec, grid, tau), u0);
    taus.push_back(tau);
    errs.push_back((u1.values - std::exp(-eps * eps * tau) * u0.values).abs().maxCoeff());
  }
  return slope(taus, errs);
}

TEST(Step, ConsistencyOrderOnSingleMode) {
  const std::vector<std::pair<ButcherPaird, int>> cases = {
      {fixture("ars111"), 1}, {fixture("ars222"), 2}, {fixture("rk3_4stage_b"), 3}, {constructed_rk3(), 3}};
  for (const auto& [pair, p] : cases) EXPECT_NEAR(single_mode_slope(pair, 0.5, 0.0, 0.0), p + 1, 0.2) << "p=" << p;
}

TEST(Step, StabilizedSplittingKeepsConsistencyOrder) {
  // alpha and beta move part of the mode into the explicit tableau.
  const std::vector<std::pair<ButcherPaird, int>> cases = {
      {fixture("ars111"), 1}, {fixture("ars222"), 2}, {fixture("rk3_4stage_b"), 3}};
  for (const auto& [pair, p] : cases) EXPECT_NEAR(single_mode_slope(pair, 0.5, 0.5, 1.0), p + 1, 0.2) << "p=" << p;
}

TEST(Step, GridMismatchRejected) {
  const auto plan = StepPlan::make(fixture("ars111"), ModelSpec::make(ModelKind::AllenCahn, 0.1),
                                   PeriodicGrid::make(1, 16), 0.1);
  EXPECT_THROW(imex_step(plan, SpectralField::zeros(PeriodicGrid::make(1, 32))), GridMismatchError);
  EXPECT_THROW(StepPlan::make(fixture("ars111"), ModelSpec::make(ModelKind::AllenCahn, 0.1),
                              PeriodicGrid::make(1, 16), 0.0),
               std::invalid_argument);
}

TEST(Run, CahnHilliardConservesMass) {
  const auto grid = PeriodicGrid::make(1, 64);
  const auto plan =
      StepPlan::make(fixture("ars222"), ModelSpec::make(ModelKind::CahnHilliard, 0.1, 2.0, 6.0), grid, 0.01);
  auto u0 = random_initial_field(grid, 12);
  u0.values += 0.2;
  const auto traj = run(plan, u0, 100.0);
  ASSERT_EQ(traj.mass.size(), 10'001u);
  double drift = 0;
  for (double m : traj.mass) drift = std::max(drift, std::abs(m - traj.mass.front()));
  EXPECT_LE(drift, 1e-12);
}

TEST(Run, CertifiedPairDecaysAtLargeSteps) {
  const auto grid = PeriodicGrid::make(1, 128);
  const auto plan =
      StepPlan::make(fixture("rk3_energy_stable"), ModelSpec::make(ModelKind::AllenCahn, 0.1, 0.0, 1.0), grid, 10.0);
  const auto traj = run(plan, random_initial_field(grid, 1), 100.0);
  ASSERT_EQ(traj.energies.size(), 11u);
  EXPECT_LE(check_monotone(traj), 1e-9 * (1 + std::abs(traj.energies.front())));
}

TEST(Run, DealiasedRunAlsoDecays) {
  const auto grid = PeriodicGrid::make(2, 32);
  const auto plan = StepPlan::make(fixture("rk3_energy_stable"),
                                   ModelSpec::make(ModelKind::CahnHilliard, 0.1, 0.0, 1.0), grid, 1.0, true);
  const auto traj = run(plan, random_initial_field(grid, 2), 50.0);
  EXPECT_LE(check_monotone(traj), 1e-9 * (1 + std::abs(traj.energies.front())));
}

TEST(Run, MbeObservedDecay) {
  const auto grid = PeriodicGrid::make(2, 32);
  const auto plan =
      StepPlan::make(fixture("rk3_energy_stable"), ModelSpec::make(ModelKind::Mbe, 0.1, 0.0, 0.5), grid, 0.1);
  const auto traj = run(plan, random_initial_field(grid, 3), 20.0);
  EXPECT_LE(check_monotone(traj), 1e-9 * (1 + std::abs(traj.energies.front())));
}

TEST(Run, TrajectoryBookkeeping) {
  const auto grid = PeriodicGrid::make(1, 16);
  const auto plan =
      StepPlan::make(fixture("ars111"), ModelSpec::make(ModelKind::AllenCahn, 0.1, 0.0, 1.0), grid, 0.3);
  const auto traj = run(plan, random_initial_field(grid, 5), 1.0, 2);
  ASSERT_EQ(traj.times.size(), 5u);  // ceil(1 / 0.3) = 4 steps
  for (std::size_t i = 1; i < traj.times.size(); ++i) EXPECT_GT(traj.times[i], traj.times[i - 1]);
  ASSERT_EQ(traj.snapshots.size(), 3u);
  EXPECT_EQ(traj.snapshots[1].first, 2);
  const auto again = run(plan, random_initial_field(grid, 5), 1.0, 2);
  EXPECT_EQ(again.energies, traj.energies);
  EXPECT_THROW(run(plan, random_initial_field(grid, 5), 0.1), std::invalid_argument);
}

TEST(Run, DivergenceNamesStepAndStage) {
  // Explicit treatment of the double well at a huge step with no stabilization.
  const auto grid = PeriodicGrid::make(1, 16);
  const auto plan = StepPlan::make(fixture("ars111"), ModelSpec::make(ModelKind::AllenCahn, 0.1), grid, 100.0);
  try {
    run(plan, SpectralField::constant(grid, 0.5), 1e4);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.step(), 1);
    EXPECT_EQ(e.stage(), 1);
  }
}

TEST(Monotone, SyntheticSeries) {
  EXPECT_LT(check_monotone(std::vector<double>{3, 2, 1.5, 1}), 0);
  EXPECT_EQ(check_monotone(std::vector<double>{2, 2, 2}), 0);
  EXPECT_DOUBLE_EQ(check_monotone(std::vector<double>{2, 1, 1.25}), 0.25);
  EXPECT_THROW(check_monotone(std::vector<double>{1}), std::invalid_argument);
}

TEST(Convergence, SelfConvergenceFirstOrder) {
  const auto grid = PeriodicGrid::make(1, 32);
  const auto u0 = SpectralField::sample(grid, [](double x, double) { return 0.1 * std::cos(x); });
  const auto spec = ModelSpec::make(ModelKind::AllenCahn, 0.5, 0.0, 1.0);
  const auto t = convergence_study(fixture("ars111"), spec, grid, u0, {0.0078125, 0.03125, 0.015625}, 1.0);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_GT(t.rows[0].tau, t.rows[1].tau);
  EXPECT_NEAR(t.fitted_order, 1.0, 0.2);
  EXPECT_EQ(t.tau_ref, 0.0078125 / 16);
}

TEST(Convergence, ReferenceProtocolIsSelfConsistent) {
  // Halving tau_ref moves the fitted order by less than 0.05.
  const auto grid = PeriodicGrid::make(1, 32);
  const auto u0 = SpectralField::sample(grid, [](double x, double) { return 0.1 * std::cos(x); });
  const std::vector<double> taus = {0.03125, 0.015625, 0.0078125, 0.00390625};
  for (const auto& [name, alpha, beta] : {std::tuple{"ars111", 0.0, 1.0}, std::tuple{"ars222", 2.0, 6.0},
                                          std::tuple{"rk3_energy_stable", 0.0, 1.0}}) {
    const auto spec = ModelSpec::make(ModelKind::AllenCahn, 0.5, alpha, beta);
    const auto a = convergence_study(fixture(name), spec, grid, u0, taus, 1.0, 16);
    const auto b = convergence_study(fixture(name), spec, grid, u0, taus, 1.0, 32);
    EXPECT_LT(std::abs(a.fitted_order - b.fitted_order), 0.05) << name;
  }
}

TEST(Convergence, RejectsBadStepLists) {
  const auto grid = PeriodicGrid::make(1, 16);
  const auto u0 = SpectralField::zeros(grid);
  const auto spec = ModelSpec::make(ModelKind::AllenCahn, 0.5);
  const auto pair = fixture("ars111");
  EXPECT_THROW(convergence_study(pair, spec, grid, u0, {0.1, 0.05}, 1.0), std::invalid_argument);
  EXPECT_THROW(convergence_study(pair, spec, grid, u0, {0.3, 0.1, 0.05}, 1.0), std::invalid_argument);
  EXPECT_THROW(convergence_study(pair, spec, grid, u0, {0.2, 0.1, 0.04}, 1.0), std::invalid_argument);
  EXPECT_THROW(convergence_study(pair, spec, grid, u0, {0.1, 0.1, 0.05}, 1.0), std::invalid_argument);
}
