#pragma once

// First-order optimality audit. For a control A and weight phi,
//
//   H(s) = int_s^T int phi(x, t) 1{gamma_{x,t}(s) = 0} dx dt,
//
// where gamma is the optimal path to (x, t) that stays longest (H+) or
// shortest (H-) at the junction. Necessary conditions at a minimizer:
// H+(s) <= f'(A(s)) on {A < 0} and H-(s) >= f'(A(s)) on {A > A0}; after the
// start of the last component of {u^A(0,.) < u^{A0}(0,.)} the sharper
// corollary rules apply with H+.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxlim/controls.hpp"
#include "fluxlim/detail/minimize.hpp"
#include "fluxlim/functionals.hpp"
#include "fluxlim/hj_junction.hpp"
#include "fluxlim/parallel.hpp"

namespace fluxlim {

/// Selected trajectories at the support nodes of a weight.
struct TrajectoryCache {
  Mesh mesh;
  std::vector<SupportNode> support;
  std::vector<TrajectoryDescriptor> most;
  std::vector<TrajectoryDescriptor> least;
};

inline TrajectoryCache trajectory_cache(const JunctionSolver& solver, const CostSpec& spec,
                                        const Mesh& mesh, const Parallel& par = Parallel{}) {
  TrajectoryCache c{mesh, support_nodes(spec, mesh), {}, {}};
  c.most.resize(c.support.size());
  c.least.resize(c.support.size());
  par.for_each(c.support.size(), [&](std::size_t k) {
    const double x = mesh.x(c.support[k].i), t = mesh.t(c.support[k].j);
    c.most[k] = solver.optimal_trajectory(x, t, Select::MostAtZero);
    c.least[k] = solver.optimal_trajectory(x, t, Select::LeastAtZero);
  });
  return c;
}

/// H(s) on the cached support; `stride` > 1 evaluates on the coarsened
/// node set (every stride-th node in x and t, weights scaled).
inline double calH(const TrajectoryCache& c, double s, Select select, int stride = 1) {
  const auto& tr = select == Select::MostAtZero ? c.most : c.least;
  double sum = 0.0;
  for (std::size_t k = 0; k < c.support.size(); ++k) {
    const auto& n = c.support[k];
    if (stride > 1 && (n.i % stride != 0 || n.j % stride != 0)) continue;
    if (!(c.mesh.t(n.j) > s)) continue;
    if (tr[k].at_junction(s)) sum += n.phi * n.w * stride * stride;
  }
  return sum;
}

inline double calH(const JunctionModel& model, const InitialData& u0, const Control& A,
                   const CostSpec& spec, double s, Select select, const Mesh& mesh,
                   const Parallel& par = Parallel{}) {
  if (!(s > 0.0 && s < A.horizon())) throw std::domain_error("calH: s must lie in (0, T)");
  return calH(trajectory_cache(JunctionSolver(model, u0, A), spec, mesh, par), s, select);
}

/// Midpoints of a uniform partition of (0, T), moved 1e-9 off breakpoints.
inline std::vector<double> default_samples(const Control& A, int cells = 128) {
  const double T = A.horizon();
  std::vector<double> s(cells);
  for (int k = 0; k < cells; ++k) {
    double v = T * (k + 0.5) / cells;
    for (double tau : A.times())
      if (std::abs(v - tau) < 1e-9) v = tau + (v >= tau ? 1e-9 : -1e-9);
    s[k] = v;
  }
  return s;
}

// ---- connected components ----------------------------------------------------

struct Interval {
  double a, b;
};

struct ComponentReport {
  std::vector<Interval> intervals;
  std::vector<std::optional<double>> tau_hat;  // per component, bang-bang only
  double tau = 0.0;
  std::optional<double> s_bar_minus;
  double theta = 0.0;

  std::optional<Interval> last() const {
    if (intervals.empty()) return std::nullopt;
    return intervals.back();
  }
};

inline double default_theta(const JunctionSolver& free_flow, const Mesh& mesh) {
  double m = 0.0;
  for (int j = 1; j <= mesh.nt; ++j) m = std::max(m, std::abs(free_flow.junction_value(mesh.t(j))));
  return 1e-6 * (1.0 + m);
}

/// Components of {u^{A0}(0,.) - u^A(0,.) > theta} located on the mesh times
/// and refined by bisection; tau from the least-at-zero paths at {phi > 0}
/// points with u^A < u^{A0}; s_bar_minus from the most-at-zero path to (0, b).
inline ComponentReport component_report(const JunctionSolver& solver,
                                        const JunctionSolver& free_flow, const Mesh& mesh,
                                        double theta, const TrajectoryCache* cache = nullptr) {
  ComponentReport r;
  r.theta = theta;
  auto gap = [&](double t) {
    return t <= 0.0 ? 0.0 : free_flow.junction_value(t) - solver.junction_value(t);
  };
  auto inside = [&](double t) { return gap(t) > theta; };
  const int nt = mesh.nt;
  int j = 0;
  while (j <= nt) {
    if (!inside(mesh.t(j))) {
      ++j;
      continue;
    }
    int k = j;
    while (k + 1 <= nt && inside(mesh.t(k + 1))) ++k;
    const double a = j == 0 ? 0.0 : detail::bisect_first_true(inside, mesh.t(j - 1), mesh.t(j));
    const double b = k == nt ? mesh.T : detail::bisect_last_true(inside, mesh.t(k), mesh.t(k + 1));
    r.intervals.push_back({a, b});
    j = k + 1;
  }

  const Control& A = solver.control();
  for (const auto& iv : r.intervals) {
    std::optional<double> th;
    if (A.is_bangbang()) {
      // end of the last zero cell inside (a, b); A = A0 from there to b
      double last_zero = iv.a;
      const auto& ts = A.times();
      const auto& vs = A.values();
      for (std::size_t c = 0; c < vs.size(); ++c) {
        const double lo = std::max(ts[c], iv.a), hi = std::min(ts[c + 1], iv.b);
        if (hi > lo && std::abs(vs[c]) <= 1e-12) last_zero = hi;
      }
      if (last_zero > iv.a && last_zero < iv.b) th = last_zero;
    }
    r.tau_hat.push_back(th);
  }

  if (cache) {
    const Mesh& m = cache->mesh;
    for (std::size_t k = 0; k < cache->support.size(); ++k) {
      const auto& n = cache->support[k];
      if (!(n.phi > 0.0)) continue;
      const auto& tr = cache->least[k];
      if (!tr.is_dwell()) continue;
      const double x = m.x(n.i), t = m.t(n.j);
      if (!(free_flow.value(x, t) - solver.value(x, t) > theta)) continue;
      r.tau = std::max(r.tau, tr.b);
    }
  }
  if (auto last = r.last(); last && last->b > 0.0)
    r.s_bar_minus = solver.optimal_trajectory(0.0, last->b, Select::MostAtZero).a;
  return r;
}

// ---- audit -------------------------------------------------------------------

struct AuditSample {
  double s;
  double H_plus;
  double H_minus;
  double A;
  std::string verdict;  // "ok" or the violated rule
};

struct OptimalityAudit {
  std::vector<AuditSample> samples;
  double tol_opt = 0.0;
  double quadrature_error = 0.0;
  double f_prime = 0.0;
  std::optional<double> corollary_from;  // start of the last component
  std::size_t violations = 0;
  bool ok() const { return violations == 0; }
};

/// Audit from prepared pieces. tol_opt = 5 x (max over samples of
/// |H_h - H_2h|), floored at round-off.
inline OptimalityAudit check_optimality(const Control& A, const CostSpec& spec,
                                        const TrajectoryCache& cache, const ComponentReport& comp,
                                        std::vector<double> s_samples = {},
                                        std::optional<double> tol_override = std::nullopt) {
  if (s_samples.empty()) s_samples = default_samples(A);

  OptimalityAudit audit;
  audit.f_prime = spec.f_prime();
  double scale = 0.0;
  for (const auto& n : cache.support) scale += std::abs(n.phi) * n.w;
  double err = 0.0;
  for (double s : s_samples) {
    AuditSample smp{s, calH(cache, s, Select::MostAtZero), calH(cache, s, Select::LeastAtZero),
                    A(s), "ok"};
    err = std::max(err, std::abs(smp.H_plus - calH(cache, s, Select::MostAtZero, 2)));
    err = std::max(err, std::abs(smp.H_minus - calH(cache, s, Select::LeastAtZero, 2)));
    audit.samples.push_back(smp);
  }
  audit.quadrature_error = err;
  audit.tol_opt = tol_override ? *tol_override : std::max(5.0 * err, 1e-12 * (1.0 + scale));
  if (auto last = comp.last()) audit.corollary_from = last->a;

  const double fp = audit.f_prime, tol = audit.tol_opt, A0 = A.A0();
  const double vtol = 1e-12;
  for (auto& smp : audit.samples) {
    if (smp.A < -vtol && smp.H_plus - fp > tol) smp.verdict = "H_plus_above_f_prime_on_A_below_0";
    else if (smp.A > A0 + vtol && smp.H_minus - fp < -tol)
      smp.verdict = "H_minus_below_f_prime_on_A_above_A0";
    else if (audit.corollary_from && smp.s > *audit.corollary_from) {
      const bool at_zero = smp.A >= -vtol, at_A0 = smp.A <= A0 + vtol;
      if (!at_zero && !at_A0 && std::abs(smp.H_plus - fp) > tol)
        smp.verdict = "corollary_equality_on_interior_A";
      else if (at_zero && !at_A0 && smp.H_plus - fp < -tol)
        smp.verdict = "corollary_H_plus_below_f_prime_on_A_zero";
      else if (at_A0 && !at_zero && smp.H_plus - fp > tol)
        smp.verdict = "corollary_H_plus_above_f_prime_on_A0";
    }
    if (smp.verdict != "ok") ++audit.violations;
  }
  return audit;
}

inline OptimalityAudit check_optimality(const JunctionModel& model, const InitialData& u0,
                                        const Control& A, const CostSpec& spec, const Mesh& mesh,
                                        std::vector<double> s_samples = {},
                                        const Parallel& par = Parallel{},
                                        std::optional<double> tol_override = std::nullopt) {
  const JunctionSolver solver(model, u0, A);
  const JunctionSolver free_flow(model, u0, Control::constant(A.A0(), A.horizon(), A.A0()));
  const TrajectoryCache cache = trajectory_cache(solver, spec, mesh, par);
  const ComponentReport comp =
      component_report(solver, free_flow, mesh, default_theta(free_flow, mesh));
  return check_optimality(A, spec, cache, comp, std::move(s_samples), tol_override);
}

inline nlohmann::json audit_json(const OptimalityAudit& a) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : a.samples)
    samples.push_back({{"s", s.s}, {"H_plus", s.H_plus}, {"H_minus", s.H_minus}, {"A", s.A},
                       {"verdict", s.verdict}});
  return {{"samples", samples},
          {"violations", a.violations},
          {"tolerances",
           {{"tol_opt", a.tol_opt}, {"quadrature_error", a.quadrature_error},
            {"f_prime", a.f_prime}}},
          {"corollary_from", a.corollary_from ? nlohmann::json(*a.corollary_from) : nlohmann::json()}};
}

inline nlohmann::json components_json(const ComponentReport& r) {
  nlohmann::json iv = nlohmann::json::array(), th = nlohmann::json::array();
  for (std::size_t k = 0; k < r.intervals.size(); ++k) {
    iv.push_back({r.intervals[k].a, r.intervals[k].b});
    th.push_back(r.tau_hat[k] ? nlohmann::json(*r.tau_hat[k]) : nlohmann::json());
  }
  return {{"intervals", iv},
          {"tau", r.tau},
          {"tau_hat", th},
          {"s_bar_minus", r.s_bar_minus ? nlohmann::json(*r.s_bar_minus) : nlohmann::json()},
          {"theta", r.theta}};
}

}  // namespace fluxlim
