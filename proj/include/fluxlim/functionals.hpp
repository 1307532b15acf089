#pragma once

// Cost functionals J(A) = int int phi u^A dx dt + int c A dt, evaluated by
// tensor-product trapezoidal quadrature on the nodes of a mesh. Only nodes
// where the weight is nonzero are solved for.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fluxlim/controls.hpp"
#include "fluxlim/flux_models.hpp"
#include "fluxlim/hj_junction.hpp"
#include "fluxlim/parallel.hpp"

namespace fluxlim {

inline double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * (3.0 - 2.0 * s);
}
inline double smoothstep_slope(double s) { return (s <= 0.0 || s >= 1.0) ? 0.0 : 6.0 * s * (1.0 - s); }

/// phi(x, t) = psi1(x) psi2'(t): positive on (x1,x2)x(t1,t2), negative on
/// (x1,x2)x(t3,t4), zero elsewhere.
struct BoxWeight {
  double x1, x2, t1, t2, t3, t4, delta;

  /// Plateau bump on [x1, x2] with cubic ramps of width delta.
  double psi1(double x) const {
    if (x <= x1 || x >= x2) return 0.0;
    return smoothstep((x - x1) / delta) * smoothstep((x2 - x) / delta);
  }
  double psi2(double t) const {
    if (t <= t3) return smoothstep((t - t1) / (t2 - t1));
    return 1.0 - smoothstep((t - t3) / (t4 - t3));
  }
  double psi2_slope(double t) const {
    if (t > t1 && t < t2) return smoothstep_slope((t - t1) / (t2 - t1)) / (t2 - t1);
    if (t > t3 && t < t4) return -smoothstep_slope((t - t3) / (t4 - t3)) / (t4 - t3);
    return 0.0;
  }
  double operator()(double x, double t) const { return psi1(x) * psi2_slope(t); }

  /// x1/t2 > x2/t3: no line leaving the junction meets both slabs.
  bool geometry_ok() const { return x1 / t2 > x2 / t3; }
};

inline BoxWeight make_box_weight(double x1, double x2, double t1, double t2, double t3, double t4,
                                 double delta) {
  if (!(0.0 < x1 && x1 < x2))
    throw std::invalid_argument("box weight: need 0 < x1 < x2");
  if (!(0.0 < t1 && t1 < t2 && t2 < t3 && t3 < t4))
    throw std::invalid_argument("box weight: need 0 < t1 < t2 < t3 < t4");
  const double gap = std::min({x2 - x1, t2 - t1, t3 - t2, t4 - t3});
  if (!(delta > 0.0 && delta < gap / 4.0))
    throw std::invalid_argument("box weight: delta = " + std::to_string(delta) +
                                " must lie in (0, " + std::to_string(gap / 4.0) + ")");
  return {x1, x2, t1, t2, t3, t4, delta};
}

/// phi given by node values on a mesh (row-major like ValueField).
struct SampledWeight {
  Mesh mesh;
  std::vector<double> phi;
};

/// Weighted-density form: phi = -xi_x, with xi sampled on the mesh and
/// differentiated by centered differences.
struct DensityWeight {
  Mesh mesh;
  std::vector<double> xi;
};

struct CostSpec {
  std::variant<BoxWeight, SampledWeight, DensityWeight> weight;
  double linear_coeff = 0.0;  // f(A) = c A

  double f_prime() const { return linear_coeff; }
};

struct SupportNode {
  int i, j;
  double phi;
  double w;  // trapezoid weight dx_i * dt_j
};

namespace detail {

inline double trapezoid_weight(int i, int n, double h) { return (i == 0 || i == n) ? 0.5 * h : h; }

inline double weight_at(const CostSpec& spec, const Mesh& m, int i, int j) {
  return std::visit(
      [&](const auto& w) -> double {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, BoxWeight>) {
          return w(m.x(i), m.t(j));
        } else if constexpr (std::is_same_v<W, SampledWeight>) {
          return w.phi[static_cast<std::size_t>(j) * (m.nx + 1) + i];
        } else {
          auto xi = [&](int k) { return w.xi[static_cast<std::size_t>(j) * (m.nx + 1) + k]; };
          if (i == 0) return -(xi(1) - xi(0)) / m.dx();
          if (i == m.nx) return -(xi(m.nx) - xi(m.nx - 1)) / m.dx();
          return -(xi(i + 1) - xi(i - 1)) / (2.0 * m.dx());
        }
      },
      spec.weight);
}

inline const Mesh* sampled_mesh(const CostSpec& spec) {
  if (auto* s = std::get_if<SampledWeight>(&spec.weight)) return &s->mesh;
  if (auto* d = std::get_if<DensityWeight>(&spec.weight)) return &d->mesh;
  return nullptr;
}

}  // namespace detail

/// Nodes with nonzero weight, in row-major order. Throws on support leakage
/// (nonzero weight on the mesh boundary).
inline std::vector<SupportNode> support_nodes(const CostSpec& spec, const Mesh& mesh) {
  mesh.validate();
  if (const Mesh* sm = detail::sampled_mesh(spec)) {
    if (!(*sm == mesh)) throw std::invalid_argument("cost: weight sampled on a different mesh");
    const std::size_t n = std::holds_alternative<SampledWeight>(spec.weight)
                              ? std::get<SampledWeight>(spec.weight).phi.size()
                              : std::get<DensityWeight>(spec.weight).xi.size();
    if (n != mesh.nodes()) throw std::invalid_argument("cost: weight sample count mismatch");
  }
  std::vector<SupportNode> out;
  for (int j = 0; j <= mesh.nt; ++j)
    for (int i = 0; i <= mesh.nx; ++i) {
      const double phi = detail::weight_at(spec, mesh, i, j);
      if (phi == 0.0) continue;
      if (i == 0 || i == mesh.nx || j == 0 || j == mesh.nt)
        throw std::invalid_argument("cost: weight support leaks to the mesh boundary at (x, t) = (" +
                                    std::to_string(mesh.x(i)) + ", " + std::to_string(mesh.t(j)) +
                                    ")");
      out.push_back({i, j, phi,
                     detail::trapezoid_weight(i, mesh.nx, mesh.dx()) *
                         detail::trapezoid_weight(j, mesh.nt, mesh.dt())});
    }
  return out;
}

struct CostResult {
  double J = 0.0;
  double field_term = 0.0;
  double linear_term = 0.0;
};

/// Field term from a prepared solver and support list; sums in node order.
inline double field_term(const JunctionSolver& solver, const Mesh& mesh,
                         const std::vector<SupportNode>& support,
                         const Parallel& par = Parallel{}) {
  std::vector<double> terms(support.size());
  par.for_each(support.size(), [&](std::size_t k) {
    const auto& s = support[k];
    terms[k] = s.phi * s.w * solver.value(mesh.x(s.i), mesh.t(s.j));
  });
  double sum = 0.0;
  for (double v : terms) sum += v;
  return sum;
}

inline CostResult cost(const JunctionModel& model, const InitialData& u0, const CostSpec& spec,
                       const Control& A, const Mesh& mesh, const Parallel& par = Parallel{}) {
  const auto support = support_nodes(spec, mesh);
  if (mesh.T > A.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("cost: mesh horizon exceeds the control horizon");
  CostResult r;
  if (!support.empty()) r.field_term = field_term(JunctionSolver(model, u0, A), mesh, support, par);
  r.linear_term = spec.linear_coeff * A.integrate(0.0, A.horizon());
  r.J = r.field_term + r.linear_term;
  return r;
}

/// -int int xi_x u^A dx dt with centered differences for xi_x.
inline double cost_weighted_density(const JunctionModel& model, const InitialData& u0,
                                    const std::vector<double>& xi, const Control& A,
                                    const Mesh& mesh, const Parallel& par = Parallel{}) {
  CostSpec spec{DensityWeight{mesh, xi}, 0.0};
  return cost(model, u0, spec, A, mesh, par).J;
}

inline nlohmann::json mesh_json(const Mesh& m) {
  return {{"xmin", m.xmin}, {"xmax", m.xmax}, {"Nx", m.nx}, {"T", m.T}, {"Nt", m.nt}};
}

inline nlohmann::json cost_json(const CostResult& r, const Mesh& m) {
  return {{"J", r.J}, {"J_field_term", r.field_term}, {"J_linear_term", r.linear_term},
          {"mesh", mesh_json(m)}};
}

}  // namespace fluxlim
