#pragma once

// Value function u^A of the junction Hamilton-Jacobi problem from its
// optimal-control representation, restricted to the paths that can be
// optimal: straight one-sided lines, and affine -> stay at x = 0 on [a, b]
// -> affine. Writing C(s) = int_0^s A, a dwell path costs
//
//   [arrival(a) + C(a)] + [exit_b(x, t) - C(b)],   0 <= a <= b <= t,
//
// so the min over a <= b is a prefix minimum. The solver tabulates the
// junction value w(b) = u^A(0, b) on a node grid (control breakpoints are
// nodes) and refines every interval with Brent's method.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluxlim/controls.hpp"
#include "fluxlim/detail/minimize.hpp"
#include "fluxlim/flux_models.hpp"
#include "fluxlim/parallel.hpp"

namespace fluxlim {

/// Rectangular space-time grid; nx, nt count intervals (nodes = n + 1).
struct Mesh {
  double xmin = -1.0;
  double xmax = 1.0;
  int nx = 1;
  double T = 1.0;
  int nt = 1;

  double dx() const { return (xmax - xmin) / nx; }
  double dt() const { return T / nt; }
  double x(int i) const { return i == nx ? xmax : xmin + (xmax - xmin) * i / nx; }
  double t(int j) const { return j == nt ? T : T * j / nt; }
  std::size_t nodes() const { return static_cast<std::size_t>(nx + 1) * (nt + 1); }
  /// Index of the x = 0 column, or -1.
  int zero_index() const {
    if (!(xmin < 0.0 && xmax > 0.0)) return xmin == 0.0 ? 0 : (xmax == 0.0 ? nx : -1);
    const double r = -xmin / dx();
    const int i = static_cast<int>(std::lround(r));
    return std::abs(r - i) < 1e-9 ? i : -1;
  }
  void validate() const {
    if (nx < 1 || nt < 1 || !(xmax > xmin) || !(T > 0.0))
      throw std::invalid_argument("mesh: empty or inverted");
  }
  bool operator==(const Mesh&) const = default;
};

enum class Select { MostAtZero, LeastAtZero };

struct TrajectoryDescriptor {
  enum class Kind { Straight, Dwell };
  Kind kind = Kind::Straight;
  double x = 0.0, t = 0.0;
  double y = 0.0;        // start position
  double a = 0.0, b = 0.0;  // dwell interval, dwell kind only
  double cost = 0.0;

  bool is_dwell() const { return kind == Kind::Dwell; }
  bool at_junction(double s) const { return is_dwell() && a <= s && s <= b; }
  double position(double s) const {
    if (kind == Kind::Straight) return y + (x - y) * (t > 0 ? s / t : 1.0);
    if (s <= a) return a > 0 ? y * (1.0 - s / a) : 0.0;
    if (s <= b) return 0.0;
    return t > b ? x * (s - b) / (t - b) : x;
  }
};

struct Evaluation {
  double value;
  TrajectoryDescriptor best;
};

struct SolverOptions {
  int base_nodes = 512;
  double tie_rel = 1e-8;
};

class JunctionSolver {
 public:
  JunctionSolver(JunctionModel model, InitialData u0, Control control, SolverOptions opts = {})
      : model_(std::move(model)), u0_(std::move(u0)), control_(std::move(control)), opts_(opts) {
    build_trace();
  }

  const JunctionModel& model() const { return model_; }
  const InitialData& initial() const { return u0_; }
  const Control& control() const { return control_; }
  double horizon() const { return control_.horizon(); }

  double value(double x, double t) const {
    check_time(t);
    const double s = straight(x, t).value;
    return std::min(s, dwell_min(x, t, s).value);
  }

  Evaluation evaluate(double x, double t) const {
    check_time(t);
    const auto s = straight(x, t);
    const auto d = dwell_min(x, t, s.value);
    if (s.value <= d.value) {
      TrajectoryDescriptor tr{TrajectoryDescriptor::Kind::Straight, x, t, s.arg, 0.0, 0.0, s.value};
      return {s.value, tr};
    }
    return {d.value, make_dwell(x, t, prefix_argmin(d.arg), d.arg)};
  }

  /// u^A(0, b).
  double junction_value(double b) const {
    check_time(b);
    return prefix_min(b) - control_.cumulative(b);
  }

  /// Among near-optimal paths (cost <= min + eps_tie): latest junction exit
  /// b first, then earliest (MostAtZero) or latest (LeastAtZero) arrival a.
  TrajectoryDescriptor optimal_trajectory(double x, double t, Select select) const {
    check_time(t);
    const auto s = straight(x, t);
    const double cutoff = s.value + opts_.tie_rel * (1.0 + std::abs(s.value));
    const auto d = dwell_min(x, t, cutoff);
    const double best = std::min(s.value, d.value);
    const double thresh = best + opts_.tie_rel * (1.0 + std::abs(best));
    TrajectoryDescriptor st{TrajectoryDescriptor::Kind::Straight, x, t, s.arg, 0.0, 0.0, s.value};
    if (!(d.value <= thresh)) return st;
    const double b = latest_exit(x, t, thresh, d.arg);
    if (b <= 0.0 && select == Select::LeastAtZero && s.value <= thresh) return st;
    const double a_thresh = thresh - exit_cost(b, x, t) + control_.cumulative(b);
    const double a = select == Select::MostAtZero ? earliest_arrival(b, a_thresh)
                                                  : latest_arrival(b, a_thresh);
    return make_dwell(x, t, a, b);
  }

  /// J^A of the path described, from its parts.
  double path_cost(const TrajectoryDescriptor& tr) const {
    if (!tr.is_dwell()) {
      if (tr.t <= 0.0) return u0_(tr.y);
      const double side_pos = tr.x != 0.0 ? tr.x : tr.y;
      return tr.t * model_.side_of(side_pos).lagrangian((tr.x - tr.y) / tr.t) + u0_(tr.y);
    }
    double c = tr.a > 0.0 ? tr.a * model_.side_of(tr.y).lagrangian(-tr.y / tr.a) + u0_(tr.y)
                          : u0_(0.0);
    c -= control_.integrate(tr.a, tr.b);
    if (tr.b < tr.t) c += exit_cost(tr.b, tr.x, tr.t);
    return c;
  }

  double tie_tolerance(double value) const { return opts_.tie_rel * (1.0 + std::abs(value)); }
  const std::vector<double>& nodes() const { return nodes_; }

 private:
  struct ArgMin {
    double value;
    double arg;
  };

  void check_time(double t) const {
    if (!(t > 0.0)) throw std::domain_error("junction value: t must be positive");
    if (t > horizon() * (1.0 + 1e-12))
      throw std::domain_error("junction value: t = " + std::to_string(t) + " beyond horizon");
  }

  // ---- first leg: straight from (y, 0) to (0, a), y != 0 --------------------
  ArgMin arrival(double a) const {
    if (a <= 0.0) return {u0_(0.0), 0.0};
    ArgMin best{kInf, 0.0};
    for (const auto& seg : u0_.segments()) {
      const Hamiltonian& h = model_.side(seg.side);
      const double y = h.best_start(0.0, a, seg.slope, seg.lo, seg.hi);
      if (y == 0.0) continue;  // identically-zero path: a dwell, not a first leg
      const double c = a * h.lagrangian(-y / a) + seg(y);
      if (c < best.value) best = {c, y};
    }
    return best;
  }

  double arrival_plus_integral(double a) const { return arrival(a).value + control_.cumulative(a); }

  // ---- last leg: straight from (0, b) to (x, t) -------------------------------
  double exit_cost(double b, double x, double t) const {
    if (x == 0.0) return b >= t ? 0.0 : kInf;
    const double span = t - b;
    if (span <= 0.0) return x > 0.0 ? 0.0 : -model_.left.capacity() * x;
    return span * model_.side_of(x).lagrangian(x / span);
  }

  /// Latest useful exit time: later exits only move faster than every
  /// characteristic, where the last-leg cost is constant.
  double exit_cap(double x, double t) const {
    if (x == 0.0) return t;
    const double v = x > 0.0 ? model_.right.slope_at_zero() : -model_.left.slope_at_jam();
    return std::max(0.0, t - std::abs(x) / v);
  }

  // ---- straight one-sided paths ---------------------------------------------
  ArgMin straight(double x, double t) const {
    ArgMin best{kInf, x};
    for (const auto& seg : u0_.segments()) {
      if (x > 0.0 && seg.side != Side::Right) continue;
      if (x < 0.0 && seg.side != Side::Left) continue;
      const Hamiltonian& h = model_.side(seg.side);
      const double y = h.best_start(x, t, seg.slope, seg.lo, seg.hi);
      const double c = t * h.lagrangian((x - y) / t) + seg(y);
      if (c < best.value) best = {c, y};
    }
    return best;
  }

  // ---- junction trace ---------------------------------------------------------
  void build_trace() {
    const double T = horizon();
    std::vector<double> pts;
    const int n = std::max(8, opts_.base_nodes);
    for (int i = 0; i <= n; ++i) pts.push_back(i == n ? T : T * i / n);
    pts.insert(pts.end(), control_.times().begin(), control_.times().end());
    std::sort(pts.begin(), pts.end());
    nodes_.clear();
    for (double p : pts)
      if (nodes_.empty() || p - nodes_.back() > 1e-12 * T) nodes_.push_back(p);
      else if (p == T) nodes_.back() = T;

    const std::size_t m = nodes_.size() - 1;
    interval_min_.resize(m);
    prefix_.resize(m + 1);
    prefix_[0] = {arrival_plus_integral(0.0), 0.0};
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = detail::minimize_1d([&](double a) { return arrival_plus_integral(a); },
                                         nodes_[i], nodes_[i + 1]);
      interval_min_[i] = {r.value, r.arg};
      prefix_[i + 1] = r.value < prefix_[i].value ? ArgMin{r.value, r.arg} : prefix_[i];
    }
    node_w_.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i)
      node_w_[i] = std::min(prefix_[i].value, arrival_plus_integral(nodes_[i])) -
                   control_.cumulative(nodes_[i]);
  }

  std::size_t interval_of(double s) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
    std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(i, interval_min_.size() - 1);
  }

  /// min over a in [0, b] of arrival(a) + C(a), with its argmin.
  ArgMin prefix_min_arg(double b) const {
    const std::size_t j = interval_of(b);
    ArgMin best = prefix_[j];
    const double pb = arrival_plus_integral(b);
    if (pb < best.value) best = {pb, b};
    if (b >= interval_min_[j].arg && interval_min_[j].value < best.value) best = interval_min_[j];
    return best;
  }
  double prefix_min(double b) const { return prefix_min_arg(b).value; }
  double prefix_argmin(double b) const { return prefix_min_arg(b).arg; }

  double w(double b) const { return prefix_min(b) - control_.cumulative(b); }

  /// b-nodes restricted to [0, cap] with the cap appended.
  void b_grid(double cap, std::vector<double>& bs, std::vector<double>& ws) const {
    bs.clear();
    ws.clear();
    for (std::size_t i = 0; i < nodes_.size() && nodes_[i] < cap; ++i) {
      bs.push_back(nodes_[i]);
      ws.push_back(node_w_[i]);
    }
    bs.push_back(cap);
    ws.push_back(w(cap));
  }

  // Per-interval lower bound of w(b) + exit(b) on [l, r]. w is nondecreasing
  // with slope <= |A0| (dwelling longer never costs more than -A0 per unit
  // time), and exit is convex in b, so it lies above its left chord tangent
  // and above exit(r). Both minorants are convex piecewise linear; their sum
  // is minimized at an endpoint or a kink.
  struct ExitGrid {
    double x, t;
    std::vector<double> bs, ws, hs;
  };

  void exit_grid(double x, double t, double cap, ExitGrid& g) const {
    g.x = x;
    g.t = t;
    b_grid(cap, g.bs, g.ws);
    g.hs.resize(g.bs.size());
    for (std::size_t i = 0; i < g.bs.size(); ++i) g.hs[i] = exit_cost(g.bs[i], x, t);
  }

  double interval_bound(const ExitGrid& g, std::size_t i, double target) const {
    const double l = g.bs[i], r = g.bs[i + 1];
    const double wl = g.ws[i], wr = g.ws[i + 1], hl = g.hs[i], hr = g.hs[i + 1];
    const double crude = std::min(wl, wr) + std::min(hl, hr);
    if (!(crude < target)) return crude;
    // backward chord slope <= left derivative <= right derivative (convexity)
    const double eps = 1e-7 * (1.0 + g.t);
    const double sl = std::min((hl - exit_cost(l - eps, g.x, g.t)) / eps, 0.0);
    const double lw = std::abs(model_.A0);
    auto W = [&](double b) { return std::max(wl, wr - lw * (r - b)); };
    auto E = [&](double b) { return std::max(hr, hl + sl * (b - l)); };
    double lb = std::min(W(l) + E(l), W(r) + E(r));
    if (lw > 0.0) {
      const double bw = std::clamp(r - (wr - wl) / lw, l, r);
      lb = std::min(lb, W(bw) + E(bw));
    }
    if (sl < 0.0) {
      const double be = std::clamp(l + (hr - hl) / sl, l, r);
      lb = std::min(lb, W(be) + E(be));
    }
    return lb - 1e-10 * (1.0 + std::abs(lb));  // round-off slack of the chord slope
  }

  // min over b of w(b) + exit(b) on [0, cap]. Intervals whose lower bound
  // cannot beat the incumbent or `cutoff` are skipped: the result is exact
  // whenever the true minimum is below cutoff, and >= cutoff otherwise.
  ArgMin dwell_min(double x, double t, double cutoff = kInf) const {
    if (x == 0.0) return {w(t), t};
    thread_local ExitGrid g;
    exit_grid(x, t, exit_cap(x, t), g);
    ArgMin best{kInf, 0.0};
    for (std::size_t i = 0; i < g.bs.size(); ++i) {
      const double fi = g.ws[i] + g.hs[i];
      if (fi < best.value) best = {fi, g.bs[i]};
    }
    auto f = [&](double b) { return w(b) + exit_cost(b, x, t); };
    for (std::size_t i = 0; i + 1 < g.bs.size(); ++i) {
      const double lb = interval_bound(g, i, std::min(best.value, cutoff));
      if (!(lb < best.value) || !(lb < cutoff)) continue;
      const auto r = detail::minimize_1d(f, g.bs[i], g.bs[i + 1]);
      if (r.value < best.value) best = {r.value, r.arg};
    }
    return best;
  }

  double latest_exit(double x, double t, double thresh, double fallback) const {
    if (x == 0.0) return t;
    ExitGrid g;
    exit_grid(x, t, exit_cap(x, t), g);
    auto f = [&](double b) { return w(b) + exit_cost(b, x, t); };
    auto ok = [&](double b) { return f(b) <= thresh; };
    if (ok(g.bs.back())) return g.bs.back();
    for (std::size_t i = g.bs.size() - 1; i-- > 0;) {
      if (interval_bound(g, i, thresh) > thresh) continue;
      if (ok(g.bs[i + 1])) return g.bs[i + 1];
      const auto r = detail::minimize_1d(f, g.bs[i], g.bs[i + 1]);
      if (r.value > thresh) continue;
      return detail::bisect_last_true(ok, r.arg, g.bs[i + 1]);
    }
    return fallback;
  }

  double earliest_arrival(double b, double thresh) const {
    auto ok = [&](double a) { return arrival_plus_integral(a) <= thresh; };
    const std::size_t last = interval_of(b);
    for (std::size_t j = 0; j <= last; ++j) {
      const double lo = nodes_[j];
      const double hi = std::min(nodes_[j + 1], b);
      if (ok(lo)) return lo;
      ArgMin im = interval_min_[j];
      if (hi < nodes_[j + 1]) {
        const auto r = detail::minimize_1d([&](double a) { return arrival_plus_integral(a); }, lo, hi);
        im = {r.value, r.arg};
      }
      if (im.value <= thresh) return detail::bisect_first_true(ok, lo, im.arg);
    }
    return prefix_argmin(b);
  }

  double latest_arrival(double b, double thresh) const {
    auto ok = [&](double a) { return arrival_plus_integral(a) <= thresh; };
    if (ok(b)) return b;
    const std::size_t last = interval_of(b);
    for (std::size_t j = last + 1; j-- > 0;) {
      const double lo = nodes_[j];
      const double hi = std::min(nodes_[j + 1], b);
      if (hi < lo) continue;
      if (ok(hi)) return hi;
      ArgMin im = interval_min_[j];
      if (hi < nodes_[j + 1]) {
        const auto r = detail::minimize_1d([&](double a) { return arrival_plus_integral(a); }, lo, hi);
        im = {r.value, r.arg};
      }
      if (im.value <= thresh) return detail::bisect_last_true(ok, im.arg, hi);
    }
    return prefix_argmin(b);
  }

  TrajectoryDescriptor make_dwell(double x, double t, double a, double b) const {
    TrajectoryDescriptor tr;
    tr.kind = TrajectoryDescriptor::Kind::Dwell;
    tr.x = x;
    tr.t = t;
    tr.a = std::min(a, b);
    tr.b = b;
    tr.y = tr.a > 0.0 ? arrival(tr.a).arg : 0.0;
    if (tr.a > 0.0 && tr.y == 0.0) tr.a = 0.0;  // no admissible first leg
    tr.cost = path_cost(tr);
    return tr;
  }

  JunctionModel model_;
  InitialData u0_;
  Control control_;
  SolverOptions opts_;
  std::vector<double> nodes_;
  std::vector<ArgMin> interval_min_;
  std::vector<ArgMin> prefix_;
  std::vector<double> node_w_;
};

// ---- fields -----------------------------------------------------------------

struct ValueField {
  Mesh mesh;
  std::vector<double> values;  // row-major: index j * (nx + 1) + i

  double operator()(int i, int j) const {
    return values[static_cast<std::size_t>(j) * (mesh.nx + 1) + i];
  }
};

inline ValueField value_grid(const JunctionSolver& solver, const Mesh& mesh,
                             const Parallel& par = Parallel{}) {
  mesh.validate();
  if (mesh.T > solver.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("value_grid: mesh horizon exceeds the control horizon");
  ValueField field{mesh, std::vector<double>(mesh.nodes())};
  const std::size_t row = mesh.nx + 1;
  par.for_each(mesh.nodes(), [&](std::size_t k) {
    const int i = static_cast<int>(k % row);
    const int j = static_cast<int>(k / row);
    const double x = mesh.x(i);
    field.values[k] = j == 0 ? solver.initial()(x) : solver.value(x, mesh.t(j));
  });
  return field;
}

inline ValueField value_grid(const JunctionModel& model, const InitialData& u0,
                             const Control& control, const Mesh& mesh,
                             const Parallel& par = Parallel{}) {
  return value_grid(JunctionSolver(model, u0, control), mesh, par);
}

inline Evaluation value(const JunctionModel& model, const InitialData& u0, const Control& control,
                        double x, double t) {
  return JunctionSolver(model, u0, control).evaluate(x, t);
}

inline TrajectoryDescriptor optimal_trajectory(const JunctionModel& model, const InitialData& u0,
                                               const Control& control, double x, double t,
                                               Select select) {
  return JunctionSolver(model, u0, control).optimal_trajectory(x, t, select);
}

/// Independent dynamic-programming oracle on a lattice: start positions on a
/// uniform y-lattice (Nx cells), junction times on a uniform t-lattice
/// (Nt cells). Paths: straight start -> (x, t); or start -> junction at a
/// lattice time -> wait cell by cell -> leave at a lattice time -> (x, t).
inline double brute_force_value(const JunctionModel& model, const InitialData& u0,
                                const Control& control, double x, double t, int Nx, int Nt) {
  if (Nx < 8 || Nt < 8) throw std::invalid_argument("brute force: lattice resolution below 8x8");
  if (!(t > 0.0) || t > control.horizon() * (1.0 + 1e-12))
    throw std::domain_error("brute force: t outside (0, T]");
  const double reach = model.max_speed() * t + 1e-3;
  const double ylo = std::min(x, 0.0) - reach;
  const double yhi = std::max(x, 0.0) + reach;
  std::vector<double> ys(Nx + 1), uy(Nx + 1);
  for (int k = 0; k <= Nx; ++k) {
    ys[k] = ylo + (yhi - ylo) * k / Nx;
    uy[k] = u0(ys[k]);
  }
  auto leg = [&](double from, double to, double span) {
    const double side_pos = to != 0.0 ? to : from;
    return span * model.side_of(side_pos).lagrangian((to - from) / span);
  };
  // junction value on lattice times
  std::vector<double> ts(Nt + 1), wj(Nt + 1);
  for (int j = 0; j <= Nt; ++j) ts[j] = j == Nt ? t : t * j / Nt;
  wj[0] = u0(0.0);
  for (int j = 1; j <= Nt; ++j) {
    double v = wj[j - 1] - control.integrate(ts[j - 1], ts[j]);
    for (int k = 0; k <= Nx; ++k) v = std::min(v, uy[k] + leg(ys[k], 0.0, ts[j]));
    wj[j] = v;
  }
  if (x == 0.0) return wj[Nt];
  double best = kInf;
  for (int k = 0; k <= Nx; ++k)
    if ((x > 0.0 && ys[k] >= 0.0) || (x < 0.0 && ys[k] <= 0.0))
      best = std::min(best, uy[k] + leg(ys[k], x, t));
  for (int j = 0; j < Nt; ++j) best = std::min(best, wj[j] + leg(0.0, x, t - ts[j]));
  return best;
}

struct TracePoint {
  double t;
  double left;   // u(0-, t)
  double right;  // u(0+, t)
};

inline std::vector<TracePoint> junction_trace(const ValueField& field) {
  const Mesh& m = field.mesh;
  const int i0 = m.zero_index();
  if (i0 < 2 || i0 > m.nx - 2)
    throw std::invalid_argument("junction trace: mesh needs x = 0 with two columns on each side");
  std::vector<TracePoint> out;
  out.reserve(m.nt + 1);
  for (int j = 0; j <= m.nt; ++j)
    out.push_back({m.t(j), 2.0 * field(i0 - 1, j) - field(i0 - 2, j),
                   2.0 * field(i0 + 1, j) - field(i0 + 2, j)});
  return out;
}

/// Discrete gradient audit. x-differences per side must lie in [-R, 0];
/// t-differences in [0, -min H] (u_t = -H(u_x) >= 0). The mirrored window
/// [min H, 0] is available for comparison; exact solutions fail it.
enum class TimeWindow { NonNegative, NonPositive };

struct GradientAudit {
  double ux_min = kInf, ux_max = -kInf;
  double ut_min = kInf, ut_max = -kInf;
  double tol = 0.0;
  std::size_t violations = 0;
  bool ok() const { return violations == 0; }
};

inline GradientAudit audit_gradients(const ValueField& field, const JunctionModel& model,
                                     double tol, TimeWindow window = TimeWindow::NonNegative) {
  const Mesh& m = field.mesh;
  GradientAudit g;
  g.tol = tol;
  for (int j = 0; j <= m.nt; ++j)
    for (int i = 0; i < m.nx; ++i) {
      const double xl = m.x(i), xr = m.x(i + 1);
      if (xl < 0.0 && xr > 0.0) continue;  // cell straddles the junction
      const Hamiltonian& h = (xr <= 0.0) ? model.left : model.right;
      const double d = (field(i + 1, j) - field(i, j)) / (xr - xl);
      g.ux_min = std::min(g.ux_min, d);
      g.ux_max = std::max(g.ux_max, d);
      if (d < -h.capacity() - tol || d > tol) ++g.violations;
    }
  for (int j = 0; j < m.nt; ++j)
    for (int i = 0; i <= m.nx; ++i) {
      const double x = m.x(i);
      const double hmin = x < 0.0 ? model.left.h_min()
                                  : (x > 0.0 ? model.right.h_min()
                                             : std::min(model.left.h_min(), model.right.h_min()));
      const double d = (field(i, j + 1) - field(i, j)) / (m.t(j + 1) - m.t(j));
      g.ut_min = std::min(g.ut_min, d);
      g.ut_max = std::max(g.ut_max, d);
      const bool bad = window == TimeWindow::NonNegative ? (d < -tol || d > -hmin + tol)
                                                         : (d < hmin - tol || d > tol);
      if (bad) ++g.violations;
    }
  return g;
}

inline void write_value_csv(std::ostream& os, const ValueField& field, const char* column = "u") {
  os << "x,t," << column << '\n';
  os << std::setprecision(17);
  const Mesh& m = field.mesh;
  for (int j = 0; j <= m.nt; ++j)
    for (int i = 0; i <= m.nx; ++i) os << m.x(i) << ',' << m.t(j) << ',' << field(i, j) << '\n';
}

}  // namespace fluxlim
