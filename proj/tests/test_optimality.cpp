#include <gtest/gtest.h>

#include <random>

#include "common.hpp"
#include "fluxlim/optimality.hpp"

using namespace fluxlim;
using namespace fluxlim::testing;

namespace {

const Mesh kMesh{-0.4, 0.4, 80, 6.0, 120};

/// sign * psi1(x) psi2(t) sampled on the mesh.
CostSpec product_weight(double sign, const Mesh& mesh = kMesh) {
  const BoxWeight w = canonical_box();
  std::vector<double> phi(mesh.nodes(), 0.0);
  for (int j = 0; j <= mesh.nt; ++j)
    for (int i = 0; i <= mesh.nx; ++i)
      phi[static_cast<std::size_t>(j) * (mesh.nx + 1) + i] = sign * w.psi1(mesh.x(i)) * w.psi2(mesh.t(j));
  return {SampledWeight{mesh, phi}, 0.0};
}

Control free_flow_control() { return Control::constant(kA0, 6.0, kA0); }

ComponentReport components(const Control& A, const Mesh& mesh, double theta) {
  const JunctionSolver s(unit_model(), congested(), A), ff(unit_model(), congested(), free_flow_control());
  return component_report(s, ff, mesh, theta);
}

}  // namespace

TEST(CalH, ZeroWeightVanishes) {
  const CostSpec spec{SampledWeight{kMesh, std::vector<double>(kMesh.nodes(), 0.0)}, 0.0};
  for (double s : {0.5, 2.0, 4.0})
    for (auto sel : {Select::MostAtZero, Select::LeastAtZero})
      EXPECT_EQ(calH(unit_model(), congested(), switching(), spec, s, sel, kMesh), 0.0);
}

TEST(CalH, VanishesAfterSupport) {
  const CostSpec spec{canonical_box(), 0.0};
  for (double s : {5.0, 5.3, 5.9})
    EXPECT_EQ(calH(unit_model(), congested(), switching(), spec, s, Select::MostAtZero, kMesh), 0.0);
}

TEST(CalH, DomainErrors) {
  const CostSpec spec{canonical_box(), 0.0};
  EXPECT_THROW(calH(unit_model(), congested(), switching(), spec, 0.0, Select::MostAtZero, kMesh),
               std::domain_error);
  EXPECT_THROW(calH(unit_model(), congested(), switching(), spec, 6.0, Select::MostAtZero, kMesh),
               std::domain_error);
}

TEST(CalH, MostDominatesLeastForNonnegativeWeight) {
  const CostSpec spec = product_weight(1.0);
  for (const Control& A : {switching(), switching(3.0), free_flow_control()}) {
    const JunctionSolver solver(unit_model(), congested(), A);
    const auto cache = trajectory_cache(solver, spec, kMesh);
    for (double s : default_samples(A, 32))
      EXPECT_GE(calH(cache, s, Select::MostAtZero), calH(cache, s, Select::LeastAtZero) - 1e-15) << s;
  }
}

TEST(Audit, FreeFlowIsStationaryForNonpositiveWeight) {
  const auto a = check_optimality(unit_model(), congested(), free_flow_control(), product_weight(-1.0), kMesh);
  EXPECT_EQ(a.violations, 0u);
  EXPECT_FALSE(a.corollary_from.has_value());
  for (const auto& s : a.samples) EXPECT_LE(s.H_plus, 0.0);
}

TEST(Audit, ClosedJunctionIsStationaryForNonnegativeWeight) {
  const Control zero = Control::constant(0.0, 6.0, kA0);
  const auto a = check_optimality(unit_model(), congested(), zero, product_weight(1.0), kMesh);
  EXPECT_EQ(a.violations, 0u);
  for (const auto& s : a.samples) EXPECT_GE(s.H_minus, 0.0);
}

TEST(Audit, ToleranceOverride) {
  const auto a = check_optimality(unit_model(), congested(), free_flow_control(), product_weight(1.0), kMesh,
                                  {}, Parallel{}, 1e9);
  EXPECT_EQ(a.violations, 0u);
  EXPECT_EQ(a.tol_opt, 1e9);
}

TEST(Components, EmptyUnderFreeFlow) {
  const auto r = components(free_flow_control(), kMesh, 1e-6);
  EXPECT_TRUE(r.intervals.empty());
  EXPECT_FALSE(r.s_bar_minus.has_value());
}

TEST(Components, SingleComponentForOneSwitch) {
  const auto r = components(switching(), kMesh, 1e-6);
  ASSERT_EQ(r.intervals.size(), 1u);
  EXPECT_LT(r.intervals[0].a, 0.01);
  EXPECT_GT(r.intervals[0].b, 1.5);
  EXPECT_LT(r.intervals[0].b, 6.0);
  ASSERT_TRUE(r.tau_hat[0].has_value());
  EXPECT_NEAR(*r.tau_hat[0], 1.5, 1e-12);
}

TEST(Components, NestAsThresholdGrows) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const Control A = random_control(rng, 6, 6.0, kA0);
    double theta = 1e-6;
    auto outer = components(A, kMesh, theta);
    for (int k = 0; k < 5; ++k) {
      theta *= 2.0;
      const auto inner = components(A, kMesh, theta);
      for (const auto& iv : inner.intervals) {
        bool inside = false;
        for (const auto& ov : outer.intervals) inside |= ov.a <= iv.a + 1e-9 && iv.b <= ov.b + 1e-9;
        EXPECT_TRUE(inside) << "[" << iv.a << ", " << iv.b << "] theta " << theta;
      }
      outer = inner;
    }
  }
}

TEST(Components, ControlIsFreeFlowOffTheComponents) {
  std::mt19937_64 rng(9);
  std::vector<Control> controls{switching(), switching(3.0),
                                bangbang_control(0.0, std::vector<double>{1.0, 2.0, 3.0}, 6.0, kA0)};
  for (int k = 0; k < 3; ++k) controls.push_back(random_control(rng, 5, 6.0, kA0));
  for (const auto& A : controls) {
    const auto r = components(A, kMesh, 1e-6);
    for (int j = 1; j < 600; ++j) {
      const double t = 0.01 * j;
      bool inside = false;
      for (const auto& iv : r.intervals) inside |= iv.a - 1e-6 <= t && t <= iv.b + 1e-6;
      if (!inside && t > 0.05) {
        EXPECT_NEAR(A(t), kA0, 1e-12) << t;
      }
    }
  }
}

TEST(Json, AuditAndComponents) {
  const auto a = check_optimality(unit_model(), congested(), switching(), CostSpec{canonical_box(), 0.0}, kMesh);
  const auto j = audit_json(a);
  EXPECT_EQ(j["samples"].size(), 128u);
  EXPECT_EQ(j["violations"].get<std::size_t>(), a.violations);
  EXPECT_TRUE(j["tolerances"].contains("tol_opt"));
  const auto c = components_json(components(switching(), kMesh, 1e-6));
  EXPECT_EQ(c["intervals"].size(), 1u);
}
