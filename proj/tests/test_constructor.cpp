#include "imexrk/constructor.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace imexrk;
using imexrk::testing::data_path;
using imexrk::testing::fixture;

namespace {

Vector<double> padded(double c2, double c3, double c4) {
  Vector<double> c(5);
  c << 0, c2, c3, c4, 1;
  return c;
}

// Family parameters read off a printed pair: abscissae from the implicit row
// sums, fourth moments w^T c^3 of the padded weights (the least-squares value
// of zeta given the printed weights), free entries from row 3 column 1.
Rk3FamilySpec fit_spec(const ButcherPaird& p) {
  const auto sp = embed_sigma(p);
  Vector<double> c = sp.c_sigma;
  c(4) = 1;
  const Vector<double> c3 = c.array().cube().matrix();
  return {c(1), c(2), c(3), sp.b_sigma.dot(c3), sp.bhat_sigma.dot(c3), p.A(2, 0), p.Ahat(2, 0)};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Weights, SatisfyMomentConditions) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> node(0.1, 1.9), z(0.05, 0.3);
  for (int k = 0; k < 300; ++k) {
    const Vector<double> c = padded(node(rng), node(rng), node(rng));
    const double zeta = z(rng);
    for (auto role : {WeightRole::Implicit, WeightRole::Explicit}) {
      Vector<double> w;
      try {
        w = solve_weights(c, zeta, role);
      } catch (const DegenerateNodesError&) {
        continue;
      }
      const double expected[] = {1.0, 0.5, 1.0 / 3};
      for (int m = 0; m < 3; ++m) {
        double sum = 0;
        for (int i = 0; i < 5; ++i) sum += w(i) * std::pow(c(i), m);
        EXPECT_NEAR(sum, expected[m], 1e-12 * (1 + w.cwiseAbs().maxCoeff()));
      }
      EXPECT_EQ(role == WeightRole::Implicit ? w(0) : w(4), 0.0);
    }
  }
}

TEST(Weights, FourthMomentIsPrescribed) {
  const Vector<double> c = padded(0.5, 0.25, 0.75);
  const auto w = solve_weights(c, 0.25, WeightRole::Implicit);
  double s4 = 0;
  for (int i = 0; i < 5; ++i) s4 += w(i) * std::pow(c(i), 3);
  EXPECT_NEAR(s4, 0.25, 1e-13);
}

TEST(Weights, RejectRepeatedNodes) {
  EXPECT_THROW(solve_weights(padded(0.5, 0.5, 0.9), 0.2, WeightRole::Implicit), DegenerateNodesError);
  EXPECT_THROW(solve_weights(padded(0.5, 0.7, 1.0), 0.2, WeightRole::Implicit), DegenerateNodesError);
  EXPECT_THROW(solve_weights(padded(0.0, 0.7, 0.9), 0.2, WeightRole::Explicit), DegenerateNodesError);
}

TEST(Construct, RejectsDegenerateSpecs) {
  EXPECT_THROW(construct_rk3({0.6, 0.6, 0.9, 1.0 / 6, 1.0 / 6, 0.4, 0.4}), DegenerateNodesError);
  EXPECT_THROW(construct_rk3({0.6, 1.5, 1.0, 1.0 / 6, 1.0 / 6, 0.4, 0.4}), DegenerateNodesError);
  EXPECT_THROW(construct_rk3({0.0, 1.5, 0.9, 1.0 / 6, 1.0 / 6, 0.4, 0.4}), DegenerateNodesError);
}

TEST(Construct, ReproducesEnergyStablePairFromFittedParameters) {
  const auto printed = fixture("rk3_energy_stable");
  const auto spec = fit_spec(printed);
  const auto built = construct_rk3(spec);
  EXPECT_LE((built.A - printed.A).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LE((built.Ahat - printed.Ahat).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LE(verify_order(built, 3), 1e-10);
  const auto r = certify_unconditional(built, 2.0);
  EXPECT_TRUE(r.unconditional);
  EXPECT_GT(r.lambda_H0, 0.08);

  // The frozen spec file holds the same fit.
  const auto frozen = parse_rk3_spec(slurp(data_path("specs/rk3_energy_stable.spec")));
  EXPECT_NEAR(frozen.zeta, spec.zeta, 1e-9);
  EXPECT_NEAR(frozen.zeta_hat, spec.zeta_hat, 1e-9);
  EXPECT_NEAR(frozen.c3, spec.c3, 1e-12);
  EXPECT_NEAR(frozen.free_A, spec.free_A, 1e-12);
}

TEST(Construct, RandomSpecsAreThirdOrderPairs) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> node(0.1, 1.9), z(0.1, 0.25), f(-1, 1);
  int built = 0;
  for (int k = 0; k < 400; ++k) {
    const Rk3FamilySpec s{node(rng), node(rng), node(rng), z(rng), z(rng), f(rng), f(rng)};
    ButcherPaird p;
    try {
      p = construct_rk3(s);
    } catch (const DegenerateNodesError&) {
      continue;
    } catch (const ConstructionError&) {
      continue;
    }
    ++built;
    EXPECT_LE(verify_order(p, 3), 1e-10);
    EXPECT_TRUE(validate(p).empty());
    EXPECT_EQ(p.stages(), 4);
    EXPECT_EQ(p.A(2, 0), s.free_A);
    EXPECT_EQ(p.Ahat(2, 0), s.free_Ahat);
  }
  EXPECT_GT(built, 80);
}

TEST(Construct, IsDeterministic) {
  const Rk3FamilySpec s{0.6, 1.5, 0.95, 1.0 / 6, 1.0 / 6, 0.4, 0.4};
  EXPECT_EQ(construct_rk3(s), construct_rk3(s));
}

TEST(SpecFile, RoundTripsAndRejectsBadKeys) {
  const Rk3FamilySpec s{0.3, 0.8, 1.4, 1.0 / 6, 0.16, 0.1, -0.2};
  EXPECT_EQ(parse_rk3_spec(render_rk3_spec(s)), s);
  EXPECT_EQ(parse_rk3_spec("c2=3/10\nc3=0.8\nc4=1.4\nzeta=1/6\nzeta_hat=0.16\nfree_A=0.1\nfree_Ahat=-0.2\n").c2, 0.3);
  EXPECT_THROW(parse_rk3_spec("c2=0.3\n"), std::invalid_argument);
  EXPECT_THROW(parse_rk3_spec(render_rk3_spec(s) + "gamma=1\n"), std::invalid_argument);
}

TEST(Search, RanksAndIsDeterministic) {
  Rk3SearchRanges r{{0.3, 0.9}, {1.0, 1.8}, {0.7, 0.98}, {0.15, 0.18}, {0.15, 0.18}, {0.0, 0.8}, {0.0, 0.8}};
  const auto a = search_energy_stable_rk3(r, 96);
  const auto b = search_energy_stable_rk3(r, 96);
  ASSERT_FALSE(a.empty());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].spec, b[i].spec);
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_GE(a[i - 1].score, a[i].score);
    if (a[i - 1].score == a[i].score) EXPECT_GE(a[i - 1].report.lambda_H2_0, a[i].report.lambda_H2_0);
  }
  for (const auto& c : a) {
    EXPECT_LE(verify_order(c.pair, 3), 1e-10);
    EXPECT_EQ(c.score, std::min(c.report.lambda_Q, c.report.lambda_H0));
  }
  // The range contains certified pairs; the best one is certified.
  EXPECT_GT(a.front().score, 0);
  EXPECT_TRUE(a.front().report.unconditional);
}

TEST(Search, PinnedRangeGivesTheConstructedPair) {
  const Rk3FamilySpec s{0.6, 1.5, 0.95, 1.0 / 6, 1.0 / 6, 0.4, 0.4};
  const auto found = search_energy_stable_rk3(Rk3SearchRanges::pinned(s), 3);
  ASSERT_EQ(found.size(), 3u);
  EXPECT_EQ(found.front().spec, s);
  EXPECT_EQ(found.front().pair, construct_rk3(s));
}

TEST(Search, RejectsNonPositiveSampleCount) {
  EXPECT_THROW(search_energy_stable_rk3(Rk3SearchRanges::pinned({}), 0), std::invalid_argument);
}
