#pragma once

// First-order Godunov solver for the two-line LWR junction problem
//
//   rho_t + f^L(rho)_x = 0 (x < 0),   rho_t + f^R(rho)_x = 0 (x > 0),
//
// with the limited junction flux min{-A(t), f^{L,+}(rho_l), f^{R,-}(rho_r)}
// on the face at x = 0. Serves as an independent check of rho = -u_x.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluxlim/controls.hpp"
#include "fluxlim/flux_models.hpp"
#include "fluxlim/hj_junction.hpp"
#include "fluxlim/parallel.hpp"

namespace fluxlim {

inline double godunov_flux(const Hamiltonian& h, double rho_l, double rho_r) {
  return std::min(h.flux_branches(rho_l).plus, h.flux_branches(rho_r).minus);
}

inline double junction_flux(const JunctionModel& model, double rho_l, double rho_r, double A) {
  if (A < model.A0 - kDomainTol || A > kDomainTol)
    throw std::domain_error("junction flux: limiter value " + std::to_string(A) +
                            " outside [A0, 0]");
  return std::max(0.0, std::min({-A, model.left.flux_branches(rho_l).plus,
                                 model.right.flux_branches(rho_r).minus}));
}

/// Trace pair (eL, eR) at the junction together with the limiter value.
struct GermElement {
  double eL = 0.0;
  double eR = 0.0;
  double A = 0.0;

  bool is_member(const JunctionModel& model, double tol = 1e-10) const {
    const double fl = model.left.flux(eL);
    const double fr = model.right.flux(eR);
    const double q = junction_flux(model, eL, eR, A);
    return std::abs(fl - q) <= tol && std::abs(fr - q) <= tol;
  }
};

/// Uniform cells on [xmin, xmax]; x = 0 must be a face.
struct CellGrid {
  double xmin = -1.0;
  double xmax = 1.0;
  int cells = 2;

  double dx() const { return (xmax - xmin) / cells; }
  double face(int i) const { return i == cells ? xmax : xmin + (xmax - xmin) * i / cells; }
  double center(int i) const { return 0.5 * (face(i) + face(i + 1)); }
  int zero_face() const {
    const double r = -xmin / dx();
    const int i = static_cast<int>(std::lround(r));
    return (i >= 0 && i <= cells && std::abs(r - i) < 1e-9) ? i : -1;
  }
  void validate() const {
    if (cells < 2 || !(xmax > xmin)) throw std::invalid_argument("cell grid: empty or inverted");
    if (zero_face() < 0) throw std::invalid_argument("cell grid: x = 0 is not a cell face");
  }
};

struct DensityField {
  CellGrid grid;
  std::vector<double> times;
  std::vector<double> rho;  // row-major: index j * cells + i
  std::size_t steps = 0;
  double max_mass_defect = 0.0;  // worst per-step |dmass - dt (F_in - F_out)|
  double max_step_drift = 0.0;   // worst per-step max_i |rho_new - rho_old|

  double operator()(int i, int j) const {
    return rho[static_cast<std::size_t>(j) * grid.cells + i];
  }
};

struct ClOptions {
  double cfl = 0.9;
  int pad_cells = 0;  // extra cells each side, dropped from the output
};

/// Cell averages of -u0' on the grid (exact for piecewise-linear u0).
inline std::vector<double> density_from_initial(const InitialData& u0, const CellGrid& g) {
  std::vector<double> r(g.cells);
  for (int i = 0; i < g.cells; ++i) r[i] = -(u0(g.face(i + 1)) - u0(g.face(i))) / g.dx();
  return r;
}

/// Explicit Godunov with transmissive boundaries. Steps are shortened to land
/// on every output time and on every control breakpoint; A is sampled at the
/// start of each step.
inline DensityField solve_cl(const JunctionModel& model, const CellGrid& grid,
                             std::vector<double> rho0, const Control& A,
                             const std::vector<double>& out_times, double cfl = 0.9) {
  grid.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("solve_cl: cfl must be in (0, 1]");
  if (static_cast<int>(rho0.size()) != grid.cells)
    throw std::invalid_argument("solve_cl: initial row does not match the grid");
  if (out_times.empty() || out_times.front() < 0.0 ||
      !std::is_sorted(out_times.begin(), out_times.end()) ||
      out_times.back() > A.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("solve_cl: output times must be sorted inside [0, T]");

  const int n = grid.cells;
  const int z = grid.zero_face();
  const double dx = grid.dx();
  for (int i = 0; i < n; ++i) {
    const double cap = (i < z ? model.left : model.right).capacity();
    if (rho0[i] < -kDomainTol || rho0[i] > cap + kDomainTol)
      throw std::domain_error("solve_cl: initial density outside [0, R]");
    rho0[i] = std::clamp(rho0[i], 0.0, cap);
  }
  const double speed = std::max(model.max_speed(), 1e-300);
  const double dt_max = cfl * dx / speed;

  DensityField out{grid, out_times, {}, 0, 0.0, 0.0};
  out.rho.reserve(out_times.size() * n);

  std::vector<double> rho = std::move(rho0), next(n), F(n + 1);
  auto fluxes = [&](double a) {
    F[0] = (0 < z ? model.left : model.right).flux(rho[0]);
    F[n] = (n <= z ? model.left : model.right).flux(rho[n - 1]);
    for (int f = 1; f < n; ++f) {
      if (f == z) F[f] = junction_flux(model, rho[f - 1], rho[f], a);
      else F[f] = godunov_flux(f < z ? model.left : model.right, rho[f - 1], rho[f]);
    }
  };
  auto mass = [&](const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m += v * dx;
    return m;
  };

  // stops: output times and control breakpoints
  std::vector<double> stops(out_times);
  for (double tau : A.times())
    if (tau > 0.0 && tau < out_times.back()) stops.push_back(tau);
  std::sort(stops.begin(), stops.end());

  double t = 0.0;
  std::size_t next_out = 0;
  auto emit = [&] {
    while (next_out < out_times.size() && out_times[next_out] <= t + 1e-12 * (1.0 + t)) {
      out.rho.insert(out.rho.end(), rho.begin(), rho.end());
      ++next_out;
    }
  };
  emit();
  for (double stop : stops) {
    const double span = stop - t;
    if (span <= 1e-14 * (1.0 + stop)) {
      emit();
      continue;
    }
    const long k = static_cast<long>(std::ceil(span / dt_max - 1e-12));
    const double dt = span / static_cast<double>(k);
    for (long s = 0; s < k; ++s) {
      const double ts = t + dt * static_cast<double>(s);
      fluxes(A(ts));
      const double m0 = mass(rho);
      double drift = 0.0;
      for (int i = 0; i < n; ++i) {
        const double cap = (i < z ? model.left : model.right).capacity();
        next[i] = rho[i] - dt / dx * (F[i + 1] - F[i]);
        drift = std::max(drift, std::abs(next[i] - rho[i]));
        next[i] = std::clamp(next[i], 0.0, cap);  // round-off only
      }
      rho.swap(next);
      out.max_mass_defect =
          std::max(out.max_mass_defect, std::abs(mass(rho) - m0 - dt * (F[0] - F[n])));
      out.max_step_drift = std::max(out.max_step_drift, drift);
      ++out.steps;
    }
    t = stop;
    emit();
  }
  return out;
}

/// Per-slice densities -(u_{i+1} - u_i)/dx of a value field (cell averages).
inline DensityField density_from_field(const ValueField& field) {
  const Mesh& m = field.mesh;
  DensityField d;
  d.grid = {m.xmin, m.xmax, m.nx};
  d.times.resize(m.nt + 1);
  d.rho.resize(static_cast<std::size_t>(m.nt + 1) * m.nx);
  for (int j = 0; j <= m.nt; ++j) {
    d.times[j] = m.t(j);
    for (int i = 0; i < m.nx; ++i)
      d.rho[static_cast<std::size_t>(j) * m.nx + i] =
          -(field(i + 1, j) - field(i, j)) / (m.x(i + 1) - m.x(i));
  }
  return d;
}

struct CrossCheckReport {
  double l1_density_error = 0.0;  // max over t > 0 slices of relative L1
  double worst_time = 0.0;
  double mass_balance_error = 0.0;
  std::size_t steps = 0;
  int cells = 0;
};

/// Compares -u^A_x from the variational solver with the finite-volume
/// density on the mesh cells. The finite-volume domain is padded by the
/// maximal travel distance so that boundary conditions never reach the mesh.
inline CrossCheckReport cross_check(const JunctionModel& model, const InitialData& u0,
                                    const Control& A, const Mesh& mesh,
                                    const Parallel& par = Parallel{}, double cfl = 0.9) {
  mesh.validate();
  if (mesh.zero_index() < 1 || mesh.zero_index() > mesh.nx - 1)
    throw std::invalid_argument("cross check: x = 0 must be an interior mesh node");
  const ValueField field = value_grid(model, u0, A, mesh, par);
  const DensityField hj = density_from_field(field);

  const double dx = mesh.dx();
  const int pad = static_cast<int>(std::ceil(model.max_speed() * mesh.T / dx)) + 2;
  CellGrid g{mesh.xmin - pad * dx, mesh.xmax + pad * dx, mesh.nx + 2 * pad};
  std::vector<double> ts(mesh.nt + 1);
  for (int j = 0; j <= mesh.nt; ++j) ts[j] = mesh.t(j);
  const DensityField fv = solve_cl(model, g, density_from_initial(u0, g), A, ts, cfl);

  CrossCheckReport rep;
  rep.mass_balance_error = fv.max_mass_defect;
  rep.steps = fv.steps;
  rep.cells = mesh.nx;
  for (int j = 1; j <= mesh.nt; ++j) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < mesh.nx; ++i) {
      const double a = hj(i, j), b = fv(i + pad, j);
      num += std::abs(a - b) * dx;
      den += std::abs(a) * dx;
    }
    const double rel = den > 1e-12 ? num / den : num;
    if (rel > rep.l1_density_error) {
      rep.l1_density_error = rel;
      rep.worst_time = ts[j];
    }
  }
  return rep;
}

inline void write_density_csv(std::ostream& os, const DensityField& d) {
  os << "x,t,rho\n" << std::setprecision(17);
  for (std::size_t j = 0; j < d.times.size(); ++j)
    for (int i = 0; i < d.grid.cells; ++i)
      os << d.grid.center(i) << ',' << d.times[j] << ',' << d(i, static_cast<int>(j)) << '\n';
}

}  // namespace fluxlim
