#pragma once

// Commands behind the fluxlim executable. Each one takes a validated
// configuration, writes its files into the output directory and returns the
// process exit code (0 ok, 1 audit failure, 2 configuration error).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxlim/cl_oracle.hpp"
#include "fluxlim/config.hpp"
#include "fluxlim/controls.hpp"
#include "fluxlim/flux_models.hpp"
#include "fluxlim/functionals.hpp"
#include "fluxlim/hj_junction.hpp"
#include "fluxlim/optimality.hpp"
#include "fluxlim/optimizer.hpp"
#include "fluxlim/parallel.hpp"

namespace fluxlim::cli {

enum Exit : int { kOk = 0, kAuditFailure = 1, kConfigError = 2 };

struct Context {
  std::filesystem::path out_dir;
  Parallel par;
  std::ostream* log = &std::cout;
};

namespace detail {

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

inline std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << std::setprecision(17);
  return os;
}

inline nlohmann::json control_json(const Control& A) {
  return {{"times", A.times()}, {"values", A.values()}, {"A0", A.A0()}};
}

inline nlohmann::json gradient_json(const GradientAudit& g, double lo_t, double hi_t) {
  return {{"ux_min", g.ux_min}, {"ux_max", g.ux_max}, {"ut_min", g.ut_min}, {"ut_max", g.ut_max},
          {"ut_window", {lo_t, hi_t}}, {"tol", g.tol}, {"violations", g.violations},
          {"ok", g.ok()}};
}

inline double gradient_tol(const config::ExperimentConfig& c, const Mesh& m,
                           const JunctionModel& model) {
  if (c.run.gradient_tol >= 0.0) return c.run.gradient_tol;
  return 3.0 * std::max(m.dx(), m.dt()) * model.lipschitz_bound();
}

struct Built {
  JunctionModel model;
  InitialData u0;
  Mesh mesh;
};

inline Built build(const config::ExperimentConfig& c) {
  return {config::build_model(*c.model), config::build_initial(*c.initial), c.mesh->mesh()};
}

inline std::optional<double> tol_override(const config::ExperimentConfig& c) {
  if (c.run.tol_opt >= 0.0) return c.run.tol_opt;
  return std::nullopt;
}

}  // namespace detail

// ---- solve / cost / optimize ---------------------------------------------------

inline int cmd_solve(const config::ExperimentConfig& c, const Context& ctx) {
  const auto [model, u0, mesh] = detail::build(c);
  const Control A = config::build_control(*c.control, mesh.T, model.A0);
  const ValueField field = value_grid(model, u0, A, mesh, ctx.par);

  {
    auto os = detail::open_csv(ctx.out_dir / "u.csv");
    write_value_csv(os, field);
  }
  {
    auto os = detail::open_csv(ctx.out_dir / "rho_hj.csv");
    write_density_csv(os, density_from_field(field));
  }
  {
    auto os = detail::open_csv(ctx.out_dir / "trace.csv");
    const int i0 = mesh.zero_index();
    os << "t,u_left,u_right,u_junction\n";
    const auto tr = junction_trace(field);
    for (std::size_t j = 0; j < tr.size(); ++j)
      os << tr[j].t << ',' << tr[j].left << ',' << tr[j].right << ','
         << field(i0, static_cast<int>(j)) << '\n';
  }

  const double tol = detail::gradient_tol(c, mesh, model);
  const double hmin = std::min(model.left.h_min(), model.right.h_min());
  const GradientAudit g = audit_gradients(field, model, tol);
  const GradientAudit mirrored = audit_gradients(field, model, tol, TimeWindow::NonPositive);
  const nlohmann::json summary{
      {"command", "solve"},
      {"mesh", mesh_json(mesh)},
      {"control", detail::control_json(A)},
      {"gradient_audit", detail::gradient_json(g, 0.0, -hmin)},
      {"gradient_audit_mirrored_time_window", detail::gradient_json(mirrored, hmin, 0.0)},
      {"ok", g.ok()}};
  detail::write_json(ctx.out_dir / "summary.json", summary);
  *ctx.log << "solve: " << mesh.nodes() << " nodes, gradient audit "
           << (g.ok() ? "passed" : "FAILED") << " (" << g.violations << " violations, tol "
           << tol << ")\n";
  return g.ok() ? kOk : kAuditFailure;
}

inline int cmd_cost(const config::ExperimentConfig& c, const Context& ctx) {
  const auto [model, u0, mesh] = detail::build(c);
  const Control A = config::build_control(*c.control, mesh.T, model.A0);
  const CostResult r = cost(model, u0, config::build_spec(*c.functional), A, mesh, ctx.par);
  auto j = cost_json(r, mesh);
  j["control"] = detail::control_json(A);
  detail::write_json(ctx.out_dir / "cost.json", j);
  *ctx.log << std::setprecision(10) << "cost: J = " << r.J << '\n';
  return kOk;
}

inline OptimizeResult run_optimizer(const CostProblem& p, const config::OptimizerBlock& o) {
  if (o.method == "relaxed")
    return optimize_relaxed(p, {o.m_cells, static_cast<std::size_t>(o.budget), o.max_sweeps});
  return optimize_bangbang(p, {o.k_max, static_cast<std::size_t>(o.budget), o.max_sweeps});
}

inline void write_history(const std::filesystem::path& path, const OptimizeResult& r) {
  auto os = detail::open_csv(path);
  os << "eval,best_cost\n";
  for (const auto& [k, v] : r.history) os << k << ',' << v << '\n';
}

inline int cmd_optimize(const config::ExperimentConfig& c, const Context& ctx) {
  const auto [model, u0, mesh] = detail::build(c);
  const CostProblem p(model, u0, config::build_spec(*c.functional), mesh, ctx.par);
  const OptimizeResult r = run_optimizer(p, *c.optimizer);
  detail::write_json(ctx.out_dir / "result.json", result_json(r, model.A0));
  write_history(ctx.out_dir / "history.csv", r);
  *ctx.log << std::setprecision(10) << "optimize (" << r.method << "): J = " << r.cost << " after "
           << r.evals << " evaluations" << (r.budget_exhausted ? " (budget exhausted)" : "")
           << '\n';
  return kOk;
}

// ---- audit / crosscheck --------------------------------------------------------

struct AuditBundle {
  OptimalityAudit audit;
  ComponentReport components;
};

inline AuditBundle audit_control(const JunctionModel& model, const InitialData& u0,
                                 const Control& A, const CostSpec& spec, const Mesh& mesh,
                                 const config::RunBlock& run, const Parallel& par) {
  const JunctionSolver solver(model, u0, A);
  const JunctionSolver free_flow(model, u0, Control::constant(model.A0, A.horizon(), model.A0));
  const TrajectoryCache cache = trajectory_cache(solver, spec, mesh, par);
  const double theta = run.theta >= 0.0 ? run.theta : default_theta(free_flow, mesh);
  AuditBundle b;
  b.components = component_report(solver, free_flow, mesh, theta, &cache);
  b.audit = check_optimality(A, spec, cache, b.components, {},
                             run.tol_opt >= 0.0 ? std::optional(run.tol_opt) : std::nullopt);
  return b;
}

inline int cmd_audit(const config::ExperimentConfig& c, const Context& ctx) {
  const auto [model, u0, mesh] = detail::build(c);
  const Control A = config::build_control(*c.control, mesh.T, model.A0);
  const AuditBundle b =
      audit_control(model, u0, A, config::build_spec(*c.functional), mesh, c.run, ctx.par);
  detail::write_json(ctx.out_dir / "audit.json", audit_json(b.audit));
  detail::write_json(ctx.out_dir / "components.json", components_json(b.components));
  *ctx.log << "audit: " << b.audit.violations << " violations at tol_opt = " << b.audit.tol_opt
           << '\n';
  return b.audit.ok() ? kOk : kAuditFailure;
}

inline nlohmann::json crosscheck_report_json(const CrossCheckReport& r) {
  return {{"cells", r.cells}, {"l1_density_error", r.l1_density_error},
          {"worst_time", r.worst_time}, {"mass_balance_error", r.mass_balance_error},
          {"steps", r.steps}};
}

inline int cmd_crosscheck(const config::ExperimentConfig& c, const Context& ctx) {
  const auto [model, u0, mesh] = detail::build(c);
  const Control A = config::build_control(*c.control, mesh.T, model.A0);
  const config::CrosscheckBlock x = c.crosscheck.value_or(config::CrosscheckBlock{});
  Mesh m = mesh;
  m.nx = x.cells;
  m.nt = x.Nt;
  const CrossCheckReport base = cross_check(model, u0, A, m, ctx.par, x.cfl);
  nlohmann::json j{{"base", crosscheck_report_json(base)}, {"max_error", x.max_error},
                   {"cfl", x.cfl}, {"mesh", mesh_json(m)}};
  bool ok = base.l1_density_error <= x.max_error;
  *ctx.log << "crosscheck: " << m.nx << " cells, relative L1 density error "
           << base.l1_density_error << '\n';
  if (x.refine) {
    Mesh fine = m;
    fine.nx = 2 * m.nx;
    const CrossCheckReport r = cross_check(model, u0, A, fine, ctx.par, x.cfl);
    j["refined"] = crosscheck_report_json(r);
    j["error_decreases"] = r.l1_density_error < base.l1_density_error;
    ok = ok && r.l1_density_error < base.l1_density_error;
    *ctx.log << "crosscheck: " << fine.nx << " cells, relative L1 density error "
             << r.l1_density_error << '\n';
  }
  j["ok"] = ok;
  detail::write_json(ctx.out_dir / "crosscheck.json", j);
  return ok ? kOk : kAuditFailure;
}

// ---- reproduce-prop511 -----------------------------------------------------------

/// The canonical non-constant-optimum experiment: congested linear data on a
/// symmetric quadratic junction, flux weighted positively early and
/// negatively late in a box downstream of the junction.
inline config::ExperimentConfig canonical_prop511() {
  config::ExperimentConfig c;
  c.model = config::ModelBlock{};
  c.initial = config::InitialBlock{{}, {-0.8}};
  c.functional = config::FunctionalBlock{};
  c.mesh = config::MeshBlock{};
  c.optimizer = config::OptimizerBlock{};
  c.run.command = "reproduce-prop511";
  return c;
}

/// Blocks present in `user` replace the canonical ones.
inline config::ExperimentConfig merge_prop511(const config::ExperimentConfig& user) {
  config::ExperimentConfig c = canonical_prop511();
  if (user.model) c.model = user.model;
  if (user.initial) c.initial = user.initial;
  if (user.functional) c.functional = user.functional;
  if (user.mesh) c.mesh = user.mesh;
  if (user.optimizer) c.optimizer = user.optimizer;
  c.run = user.run;
  c.run.command = "reproduce-prop511";
  return c;
}

struct Condition {
  std::string name;
  std::string inequality;  // symbolic form
  std::string arithmetic;  // with numbers substituted
  bool holds = false;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

/// Hypotheses of the experiment, each with its substituted arithmetic.
inline std::vector<Condition> prop511_conditions(const config::ExperimentConfig& c) {
  std::vector<Condition> out;
  const auto& mb = *c.model;
  const bool same = mb.kappa_left == mb.kappa_right && mb.capacity_left == mb.capacity_right &&
                    mb.p_left == mb.p_right && mb.H_left == mb.H_right;
  out.push_back({"equal_sides", "H^L = H^R", same ? "left and right blocks agree" : "left and right blocks differ", same});
  const bool linear = c.initial->breakpoints.empty() && c.initial->slopes.size() == 1;
  out.push_back({"linear_initial_data", "u0(x) = p x", linear ? "single slope" : "breakpoints present", linear});
  if (!same || !linear) return out;

  const JunctionModel model = config::build_model(mb);
  const Hamiltonian& H = model.left;
  const double p = c.initial->slopes.front();
  const double R = H.capacity(), phat = H.p_hat(), Hp = H(p), dH0 = H.slope_at_zero();
  const double A0 = model.A0;
  const auto& f = *c.functional;

  out.push_back({"congested_slope", "-R < p < p_hat",
                 fmt(-R) + " < " + fmt(p) + " < " + fmt(phat), -R < p && p < phat});
  const double r1 = Hp * f.t1 / p;
  out.push_back({"(i)", "x2 <= H(p) t1 / p",
                 fmt(f.x2) + " <= " + fmt(Hp / p) + " * " + fmt(f.t1) + " = " + fmt(r1),
                 f.x2 <= r1});
  const double l2 = f.t2 * dH0 / (dH0 - Hp / p);
  out.push_back({"(ii)", "t2 H'(0) / (H'(0) - H(p)/p) < t3",
                 fmt(f.t2) + " * " + fmt(dH0) + " / (" + fmt(dH0) + " - " + fmt(Hp / p) +
                     ") = " + fmt(l2) + " < " + fmt(f.t3),
                 l2 < f.t3});
  const double l3 = -f.t2 * A0 / (Hp - A0);
  out.push_back({"(iii)", "-t2 A0 / (H(p) - A0) < t3",
                 "-" + fmt(f.t2) + " * " + fmt(A0) + " / (" + fmt(Hp) + " - " + fmt(A0) +
                     ") = " + fmt(l3) + " < " + fmt(f.t3),
                 l3 < f.t3});
  const double g1 = f.x1 / f.t2, g2 = f.x2 / f.t3;
  out.push_back({"geometry", "x1 / t2 > x2 / t3",
                 fmt(f.x1) + " / " + fmt(f.t2) + " = " + fmt(g1) + " > " + fmt(f.x2) + " / " +
                     fmt(f.t3) + " = " + fmt(g2),
                 g1 > g2});
  return out;
}

/// H+ on the audit samples inside (s_bar_minus, tau): nonnegative and
/// nonincreasing up to tol_opt.
struct HProfile {
  double lo = 0.0, hi = 0.0;
  std::vector<std::pair<double, double>> samples;
  bool nonnegative = true;
  bool nonincreasing = true;
};

inline HProfile h_profile(const OptimalityAudit& a, const ComponentReport& comp) {
  HProfile h;
  h.lo = comp.s_bar_minus.value_or(0.0);
  h.hi = comp.tau;
  for (const auto& s : a.samples)
    if (s.s > h.lo && s.s < h.hi) h.samples.emplace_back(s.s, s.H_plus);
  for (std::size_t k = 0; k < h.samples.size(); ++k) {
    if (h.samples[k].second < -a.tol_opt) h.nonnegative = false;
    if (k > 0 && h.samples[k].second > h.samples[k - 1].second + a.tol_opt) h.nonincreasing = false;
  }
  return h;
}

inline int cmd_reproduce_prop511(const config::ExperimentConfig& c, const Context& ctx,
                                 std::ostream& err = std::cerr) {
  std::ostream& log = *ctx.log;
  const auto conds = prop511_conditions(c);
  log << "conditions:\n";
  bool all = true;
  for (const auto& k : conds) {
    log << "  " << k.name << "  " << k.inequality << "  :  " << k.arithmetic << "  "
        << (k.holds ? "holds" : "VIOLATED") << '\n';
    all = all && k.holds;
  }
  if (!all) {
    for (const auto& k : conds)
      if (!k.holds) err << "violated condition " << k.name << ": " << k.inequality << "  ("
                        << k.arithmetic << ")\n";
    return kConfigError;
  }

  const auto [model, u0, mesh] = detail::build(c);
  const CostSpec spec = config::build_spec(*c.functional);
  const CostProblem problem(model, u0, spec, mesh, ctx.par);
  const double T = mesh.T, A0 = model.A0, t2 = c.functional->t2;
  const Control free_flow = Control::constant(A0, T, A0);
  const Control closed = Control::constant(0.0, T, A0);
  const Control sw = bangbang_control(0.0, std::vector<double>{t2}, T, A0);
  const double J_A0 = problem(free_flow), J_0 = problem(closed), J_sw = problem(sw);
  const double scale = std::max(std::abs(J_sw), 1e-300);
  const double m_A0 = (J_A0 - J_sw) / scale, m_0 = (J_0 - J_sw) / scale;
  const bool below_A0 = m_A0 > c.run.margin, below_0 = m_0 > c.run.margin;
  log << std::setprecision(10) << "J(A = A0)     = " << J_A0 << '\n'
      << "J(A = 0)      = " << J_0 << '\n'
      << "J(switch " << t2 << ") = " << J_sw << '\n'
      << "relative margins: " << m_A0 << " vs A0, " << m_0 << " vs 0 (required > " << c.run.margin
      << ")\n";

  const OptimizeResult opt = run_optimizer(problem, *c.optimizer);
  write_history(ctx.out_dir / "history.csv", opt);
  const nlohmann::json result = result_json(opt, A0);
  detail::write_json(ctx.out_dir / "result.json", result);
  const bool opt_below = opt.cost < std::min(J_A0, J_0);
  log << "optimizer: J = " << opt.cost << " after " << opt.evals << " evaluations\n";

  const AuditBundle b = audit_control(model, u0, opt.best, spec, mesh, c.run, ctx.par);
  detail::write_json(ctx.out_dir / "audit.json", audit_json(b.audit));
  detail::write_json(ctx.out_dir / "components.json", components_json(b.components));
  const HProfile hp = h_profile(b.audit, b.components);
  log << "audit: " << b.audit.violations << " violations at tol_opt = " << b.audit.tol_opt << '\n';

  nlohmann::json cj = nlohmann::json::array();
  for (const auto& k : conds)
    cj.push_back({{"name", k.name}, {"inequality", k.inequality}, {"arithmetic", k.arithmetic},
                  {"holds", k.holds}});
  nlohmann::json hs = nlohmann::json::array();
  for (const auto& [s, h] : hp.samples) hs.push_back({s, h});

  const bool ok = below_A0 && below_0 && opt_below && b.audit.ok() && hp.nonnegative &&
                  hp.nonincreasing;
  const nlohmann::json report{
      {"command", "reproduce-prop511"},
      {"mesh", mesh_json(mesh)},
      {"conditions", cj},
      {"costs", {{"A0", J_A0}, {"zero", J_0}, {"switch", J_sw}, {"switch_time", t2}}},
      {"relative_margins", {{"vs_A0", m_A0}, {"vs_zero", m_0}, {"required", c.run.margin}}},
      {"verdicts",
       {{"switch_below_A0", below_A0},
        {"switch_below_zero", below_0},
        {"optimum_below_constants", opt_below},
        {"audit_ok", b.audit.ok()},
        {"H_nonnegative_on_window", hp.nonnegative},
        {"H_nonincreasing_on_window", hp.nonincreasing}}},
      {"optimizer", result},
      {"audit",
       {{"violations", b.audit.violations},
        {"tol_opt", b.audit.tol_opt},
        {"quadrature_error", b.audit.quadrature_error},
        {"corollary_from",
         b.audit.corollary_from ? nlohmann::json(*b.audit.corollary_from) : nlohmann::json()}}},
      {"components", components_json(b.components)},
      {"H_window", {{"from", hp.lo}, {"to", hp.hi}, {"samples", hs}}},
      {"ok", ok}};
  detail::write_json(ctx.out_dir / "report.json", report);
  log << "report: " << (ok ? "all verdicts hold" : "some verdicts FAILED") << '\n';
  return ok ? kOk : kAuditFailure;
}

// ---- entry point -----------------------------------------------------------------

struct Invocation {
  std::string command;
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> workers;
};

inline int resolve_workers(const Invocation& inv, const config::ExperimentConfig& c) {
  if (inv.workers) return std::max(1, *inv.workers);
  if (c.run.workers > 0) return c.run.workers;
  return Parallel::from_env().workers();
}

inline int run(const Invocation& inv, std::ostream& log = std::cout,
               std::ostream& err = std::cerr) {
  config::ExperimentConfig cfg;
  try {
    if (inv.config_path) {
      std::ifstream in(*inv.config_path);
      if (!in) {
        err << "error: cannot read config " << inv.config_path->string() << '\n';
        return kConfigError;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = config::parse_config(ss.str());
    } else if (inv.command != "reproduce-prop511") {
      err << "error: --config is required for '" << inv.command << "'\n";
      return kConfigError;
    }
  } catch (const config::ConfigError& e) {
    for (const auto& m : e.messages()) err << "config error: " << m << '\n';
    return kConfigError;
  }
  if (inv.command == "reproduce-prop511") cfg = merge_prop511(cfg);

  auto errors = config::validate(cfg, inv.command);
  std::filesystem::path out;
  if (inv.out_dir) out = *inv.out_dir;
  else if (!cfg.run.out_dir.empty()) out = cfg.run.out_dir;
  else errors.push_back("no output directory: pass --out or set [run] out_dir");
  if (!errors.empty()) {
    for (const auto& m : errors) err << "config error: " << m << '\n';
    return kConfigError;
  }

  try {
    std::filesystem::create_directories(out);
    const Context ctx{out, Parallel(resolve_workers(inv, cfg)), &log};
    if (inv.command == "solve") return cmd_solve(cfg, ctx);
    if (inv.command == "cost") return cmd_cost(cfg, ctx);
    if (inv.command == "optimize") return cmd_optimize(cfg, ctx);
    if (inv.command == "audit") return cmd_audit(cfg, ctx);
    if (inv.command == "crosscheck") return cmd_crosscheck(cfg, ctx);
    return cmd_reproduce_prop511(cfg, ctx, err);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace fluxlim::cli
