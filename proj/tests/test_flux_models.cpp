#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"

using namespace fluxlim;
using fluxlim::testing::unit_model;

TEST(Hamiltonian, QuadraticValues) {
  const auto H = Hamiltonian::quadratic(1.0, 1.0);
  EXPECT_DOUBLE_EQ(H(-0.5), -0.25);
  EXPECT_DOUBLE_EQ(H(0.0), 0.0);
  EXPECT_DOUBLE_EQ(H(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(H.p_hat(), -0.5);
  EXPECT_DOUBLE_EQ(H.h_min(), -0.25);
  EXPECT_DOUBLE_EQ(H.slope_at_zero(), 1.0);
  EXPECT_DOUBLE_EQ(H.slope_at_jam(), -1.0);
}

TEST(Hamiltonian, DomainErrors) {
  const auto H = Hamiltonian::quadratic(1.0, 1.0);
  EXPECT_THROW(H(0.1), std::domain_error);
  EXPECT_THROW(H(-1.1), std::domain_error);
  EXPECT_NO_THROW(H(1e-10));
  EXPECT_THROW(H.flux(1.2), std::domain_error);
  EXPECT_THROW(Hamiltonian::quadratic(0.0, 1.0), std::invalid_argument);
}

TEST(Hamiltonian, FluxValues) {
  const auto H = Hamiltonian::quadratic(1.0, 1.0);
  EXPECT_DOUBLE_EQ(H.flux(0.5), 0.25);
  EXPECT_DOUBLE_EQ(H.flux(0.0), 0.0);
  EXPECT_NEAR(H.flux(0.9), 0.09, 1e-15);
  for (double r = 0.0; r <= 1.0; r += 0.01) EXPECT_NEAR(H.flux(r), -H(-r), 1e-12);
}

TEST(Hamiltonian, FluxBranches) {
  const auto H = Hamiltonian::quadratic(1.0, 1.0);
  auto b = H.flux_branches(0.9);
  EXPECT_DOUBLE_EQ(b.plus, 0.25);
  EXPECT_NEAR(b.minus, 0.09, 1e-15);
  b = H.flux_branches(0.5);
  EXPECT_DOUBLE_EQ(b.plus, 0.25);
  EXPECT_DOUBLE_EQ(b.minus, 0.25);
  b = H.flux_branches(0.1);
  EXPECT_NEAR(b.plus, 0.09, 1e-15);
  EXPECT_DOUBLE_EQ(b.minus, 0.25);
  double prev_plus = -1.0, prev_minus = 1.0;
  for (double r = 0.0; r <= 1.0; r += 0.01) {
    b = H.flux_branches(r);
    EXPECT_GE(b.plus, prev_plus);
    EXPECT_LE(b.minus, prev_minus);
    prev_plus = b.plus;
    prev_minus = b.minus;
  }
}

TEST(Lagrangian, Examples) {
  const auto H = Hamiltonian::quadratic(1.0, 1.0);
  EXPECT_DOUBLE_EQ(H.lagrangian(0.0), 0.25);
  EXPECT_DOUBLE_EQ(H.lagrangian(1.0), 0.0);
  EXPECT_DOUBLE_EQ(H.lagrangian(-2.0), 2.0);
}

TEST(Lagrangian, MatchesNumericSup) {
  const auto H = Hamiltonian::quadratic(1.0, 1.0);
  for (double a : {-2.0, -1.0, -0.6, 0.0, 0.3, 1.0, 1.5}) {
    double best = -kInf;
    for (int k = 0; k <= 100000; ++k) {
      const double p = -1.0 + k * 1e-5;
      best = std::max(best, a * p - H(p));
    }
    EXPECT_NEAR(H.lagrangian(a), best, 1e-9) << "alpha = " << a;
  }
}

TEST(Lagrangian, FenchelAndConvexity) {
  const auto H = Hamiltonian::quadratic(1.0, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> P(-1.0, 0.0), A(-3.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    const double p = P(rng), a = A(rng), b = A(rng);
    EXPECT_LE(a * p, H.lagrangian(a) + H(p) + 1e-10);
    EXPECT_LE(H.lagrangian(0.5 * (a + b)),
              0.5 * (H.lagrangian(a) + H.lagrangian(b)) + 1e-12);
  }
}

TEST(Tabulated, ReproducesQuadratic) {
  std::vector<double> p, h;
  for (int k = 0; k <= 40; ++k) {
    p.push_back(-1.0 + k / 40.0);
    h.push_back(p.back() * (p.back() + 1.0));
  }
  p.back() = 0.0;
  h.back() = 0.0;
  const auto T = Hamiltonian::tabulated(p, h);
  const auto Q = Hamiltonian::quadratic(1.0, 1.0);
  EXPECT_NEAR(T.h_min(), Q.h_min(), 1e-4);
  EXPECT_NEAR(T.p_hat(), Q.p_hat(), 1e-3);
  for (double x = -1.0; x <= 0.0; x += 0.013) EXPECT_NEAR(T(x), Q(x), 1e-3);
  for (double a : {-0.7, 0.0, 0.4}) EXPECT_NEAR(T.lagrangian(a), Q.lagrangian(a), 2e-3);
  EXPECT_DOUBLE_EQ(T(0.0), 0.0);
  EXPECT_NEAR(T(-1.0), 0.0, 1e-12);
}

TEST(Tabulated, RejectsNonConvexSamples) {
  EXPECT_THROW(Hamiltonian::tabulated({-1.0, -0.5, 0.0}, {0.0, 0.1, 0.0}), std::invalid_argument);
  EXPECT_THROW(Hamiltonian::tabulated({-1.0, -0.5}, {0.0, 0.0}), std::invalid_argument);
}

TEST(JunctionModel, A0IsLargerMinimum) {
  const JunctionModel m(Hamiltonian::quadratic(1.0, 1.0), Hamiltonian::quadratic(2.0, 1.0));
  EXPECT_DOUBLE_EQ(m.A0, -0.25);
  EXPECT_THROW(JunctionModel(Hamiltonian::quadratic(1.0, 1.0), Hamiltonian::quadratic(2.0, 1.0), true),
               std::invalid_argument);
  EXPECT_DOUBLE_EQ(unit_model().A0, -0.25);
}

TEST(InitialData, Evaluation) {
  const auto u0 = InitialData::linear(-0.8);
  EXPECT_DOUBLE_EQ(u0(0.5), -0.4);
  EXPECT_DOUBLE_EQ(u0(0.0), 0.0);
  const InitialData pw({-1.0}, {-0.8, -0.2});
  EXPECT_NEAR(pw(-1.0), 0.2, 1e-15);
  EXPECT_NEAR(pw(-2.0), 1.0, 1e-15);
  EXPECT_NEAR(pw(0.5), -0.1, 1e-15);
}

TEST(InitialData, SlopeAdmissibility) {
  const auto m = unit_model();
  EXPECT_NO_THROW(InitialData::linear(-0.8).check_admissible(m));
  EXPECT_THROW(InitialData::linear(-1.0).check_admissible(m), std::invalid_argument);
  EXPECT_THROW(InitialData::linear(0.0).check_admissible(m), std::invalid_argument);
  EXPECT_NO_THROW(InitialData::linear(-1.0).check_admissible(m, true));
  EXPECT_THROW(InitialData({0.5, 0.2}, {-0.1, -0.2, -0.3}), std::invalid_argument);
}
