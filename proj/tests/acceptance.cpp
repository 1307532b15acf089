// Acceptance run: one PASS/FAIL line per criterion. Exits 0 iff the set of
// failed criteria equals the --expect-fail list.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fluxlim/cli.hpp"

using namespace fluxlim;
namespace fs = std::filesystem;

namespace {

constexpr double kA0 = -0.25;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

JunctionModel unit_model() { return JunctionModel::symmetric_quadratic(1.0, 1.0); }
InitialData congested() { return InitialData::linear(-0.8); }
Mesh canonical_mesh() { return {-0.4, 0.4, 400, 6.0, 600}; }
CostSpec canonical_spec() { return {make_box_weight(0.1, 0.18, 1.0, 1.5, 4.5, 5.0, 0.01), 0.0}; }

Control random_control(std::mt19937_64& rng, int cells, double T) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(cells), times{0.0}, values(cells);
  double sum = 0.0;
  for (auto& x : w) sum += (x = 0.2 + u(rng));
  for (int i = 0; i < cells; ++i) {
    times.push_back(i + 1 == cells ? T : times.back() + T * w[i] / sum);
    values[i] = kA0 * u(rng);
  }
  return Control(times, values, kA0);
}

/// Pointwise max of two controls on the union of their partitions.
Control pointwise_max(const Control& a, const Control& b) {
  std::vector<double> t(a.times());
  t.insert(t.end(), b.times().begin(), b.times().end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }),
          t.end());
  std::vector<double> v;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double mid = 0.5 * (t[i] + t[i + 1]);
    v.push_back(std::max(a(mid), b(mid)));
  }
  return Control(t, v, a.A0());
}

double gradient_tol(const Mesh& m, const JunctionModel& model) {
  return 3.0 * std::max(m.dx(), m.dt()) * model.lipschitz_bound();
}

// Fields kept for the gradient audit.
std::vector<std::pair<std::string, ValueField>> g_fields;

struct ReproduceRun {
  int code = -1;
  double seconds = 0.0;
  std::string log;
  fs::path dir;
};

ReproduceRun reproduce(const fs::path& dir, int workers) {
  ReproduceRun r;
  r.dir = dir;
  fs::remove_all(dir);
  std::ostringstream log, err;
  const auto t0 = Clock::now();
  r.code = cli::run({"reproduce-prop511", std::nullopt, dir, workers}, log, err);
  r.seconds = seconds_since(t0);
  r.log = log.str() + err.str();
  return r;
}

// ---- criteria -----------------------------------------------------------------

Outcome free_flow_closed_form() {
  const Mesh mesh{-2.0, 2.0, 200, 6.0, 200};
  const auto t0 = Clock::now();
  ValueField f = value_grid(unit_model(), congested(), Control::constant(kA0, 6.0, kA0), mesh, Parallel(1));
  const double secs = seconds_since(t0);
  double err = 0.0;
  for (int j = 0; j <= mesh.nt; ++j)
    for (int i = 0; i <= mesh.nx; ++i)
      err = std::max(err, std::abs(f(i, j) - (-0.8 * mesh.x(i) + 0.16 * mesh.t(j))));
  g_fields.emplace_back("free flow 200x200", std::move(f));
  return {err <= 1e-9 && secs <= 60.0,
          "max error " + fmt(err) + " (<= 1e-9), " + fmt(secs, 3) + " s single-threaded (<= 60 s)"};
}

Outcome closed_junction_closed_form() {
  const Mesh mesh{-2.0, 2.0, 200, 6.0, 200};
  ValueField f = value_grid(unit_model(), congested(), Control::constant(0.0, 6.0, kA0), mesh);
  double err = 0.0;
  for (int j = 0; j <= mesh.nt; ++j)
    for (int i = 0; i <= mesh.nx; ++i) {
      const double x = mesh.x(i), t = mesh.t(j);
      const double exact = std::min(x <= 0.0 ? -x : 0.0, -0.8 * x + 0.16 * t);
      err = std::max(err, std::abs(f(i, j) - exact));
    }
  g_fields.emplace_back("closed junction 200x200", std::move(f));
  return {err <= 1e-6, "max error " + fmt(err) + " (<= 1e-6)"};
}

Outcome switch_beats_constants(const ReproduceRun& r) {
  if (r.code == cli::kConfigError) return {false, "reproduce aborted:\n" + r.log};
  const auto rep = nlohmann::json::parse(slurp(r.dir / "report.json"));
  std::cout << "  printed conditions:\n";
  bool conds = true;
  for (const auto& c : rep["conditions"]) {
    std::cout << "    " << c["name"].get<std::string>() << "  " << c["inequality"].get<std::string>()
              << "  :  " << c["arithmetic"].get<std::string>() << "  "
              << (c["holds"].get<bool>() ? "holds" : "VIOLATED") << '\n';
    conds = conds && c["holds"].get<bool>();
  }
  const double mA0 = rep["relative_margins"]["vs_A0"], m0 = rep["relative_margins"]["vs_zero"];
  const auto& c = rep["costs"];
  const bool ok = conds && mA0 > 1e-4 && m0 > 1e-4 && r.seconds <= 600.0;
  return {ok, "J(A0) = " + fmt(c["A0"].get<double>(), 8) + ", J(0) = " + fmt(c["zero"].get<double>(), 8) +
                  ", J(switch 1.5) = " + fmt(c["switch"].get<double>(), 8) + "; margins " + fmt(mA0) +
                  ", " + fmt(m0) + " (> 1e-4); " + fmt(r.seconds, 3) + " s with 8 workers (<= 600 s)"};
}

Outcome brute_force_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> X(-0.6, 0.6), T(0.2, 6.0);
  const JunctionModel m = unit_model();
  const InitialData u0 = congested();
  double worst200 = 0.0, worst400 = 0.0;
  bool ok = true;
  for (int c = 0; c < 3; ++c) {
    const Control A = random_control(rng, 5, 6.0);
    const JunctionSolver s(m, u0, A);
    for (int k = 0; k < 50; ++k) {
      const double x = X(rng), t = T(rng), v = s.value(x, t);
      auto bound = [&](int N) {
        const double reach = m.max_speed() * t + 1e-3;
        return 2.0 * ((std::abs(x) + 2.0 * reach) / N + t / N);
      };
      const double e200 = std::abs(brute_force_value(m, u0, A, x, t, 200, 200) - v);
      const double e400 = std::abs(brute_force_value(m, u0, A, x, t, 400, 400) - v);
      worst200 = std::max(worst200, e200 / bound(200));
      worst400 = std::max(worst400, e400 / bound(200));
      ok = ok && e200 <= bound(200) && e400 <= 1.2 * 0.5 * bound(200);
    }
  }
  return {ok, "150 points: worst |diff| / 2(dx+dt)_200 is " + fmt(worst200) + " at 200x200 (<= 1) and " +
                  fmt(worst400) + " at 400x400 (<= 0.6)"};
}

Outcome entropy_crosscheck() {
  const Control A = bangbang_control(0.0, std::vector<double>{1.5}, 6.0, kA0);
  const Mesh base{-0.4, 0.4, 400, 6.0, 120}, fine{-0.4, 0.4, 800, 6.0, 120};
  const auto r400 = cross_check(unit_model(), congested(), A, base);
  const auto r800 = cross_check(unit_model(), congested(), A, fine);
  return {r400.l1_density_error <= 0.05 && r800.l1_density_error < r400.l1_density_error,
          "relative L1 " + fmt(r400.l1_density_error) + " at 400 cells (<= 0.05), " +
              fmt(r800.l1_density_error) + " at 800 cells"};
}

Outcome monotonicity_suite() {
  std::mt19937_64 rng(77);
  const Mesh mesh{-0.4, 0.4, 100, 6.0, 150};
  const JunctionModel m = unit_model();
  const InitialData u0 = congested();
  ValueField lo = value_grid(m, u0, Control::constant(0.0, 6.0, kA0), mesh);
  ValueField hi = value_grid(m, u0, Control::constant(kA0, 6.0, kA0), mesh);
  double worst = 0.0;
  for (int p = 0; p < 20; ++p) {
    const Control A = random_control(rng, 6, 6.0);
    const Control Ap = pointwise_max(A, random_control(rng, 4, 6.0));
    const ValueField u = value_grid(m, u0, A, mesh), up = value_grid(m, u0, Ap, mesh);
    for (std::size_t k = 0; k < u.values.size(); ++k) {
      worst = std::max(worst, up.values[k] - u.values[k]);
      worst = std::max(worst, lo.values[k] - up.values[k]);
      worst = std::max(worst, u.values[k] - hi.values[k]);
    }
    if (p == 0) g_fields.emplace_back("random control 100x150", u);
  }
  g_fields.emplace_back("closed junction 100x150", std::move(lo));
  return {worst <= 1e-9, "20 pairs on 100x150 nodes plus sandwich; worst violation " + fmt(worst) + " (<= 1e-9)"};
}

Outcome weak_star_stability() {
  const Mesh mesh = canonical_mesh();
  const JunctionModel m = unit_model();
  const ValueField bar = value_grid(m, congested(), Control::constant(0.5 * kA0, 6.0, kA0), mesh);
  std::vector<double> d;
  for (int n : {4, 16, 64}) {
    const ValueField f = value_grid(m, congested(), weak_star_square_wave(n, 6.0, kA0), mesh);
    double e = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) e = std::max(e, std::abs(f.values[k] - bar.values[k]));
    d.push_back(e);
  }
  g_fields.emplace_back("constant A0/2 400x600", bar);
  return {d[1] < d[0] && d[2] < d[1] && d[2] < 0.02,
          "sup distance " + fmt(d[0]) + ", " + fmt(d[1]) + ", " + fmt(d[2]) + " for n = 4, 16, 64 (< 0.02)"};
}

Outcome gradient_bounds() {
  const JunctionModel m = unit_model();
  std::size_t literal = 0, consistent = 0;
  std::ostringstream os;
  for (const auto& [name, f] : g_fields) {
    const double tol = gradient_tol(f.mesh, m);
    const auto lit = audit_gradients(f, m, tol, TimeWindow::NonPositive);
    const auto ok = audit_gradients(f, m, tol, TimeWindow::NonNegative);
    literal += lit.violations;
    consistent += ok.violations;
    os << "\n    " << name << ": u_t in [" << fmt(lit.ut_min) << ", " << fmt(lit.ut_max) << "], u_x in ["
       << fmt(lit.ux_min) << ", " << fmt(lit.ux_max) << "]; " << lit.violations
       << " violations of u_t in [Hmin - tol, tol], " << ok.violations << " of u_t in [-tol, -Hmin + tol]";
  }
  return {literal == 0, std::to_string(g_fields.size()) + " fields, " + std::to_string(literal) +
                            " violations with u_t in [Hmin - tol, tol]; " + std::to_string(consistent) +
                            " with u_t in [-tol, -Hmin + tol] (u_t = -H(u_x) >= 0)" + os.str()};
}

Outcome optimality_audit(const ReproduceRun& r) {
  if (r.code == cli::kConfigError) return {false, "reproduce aborted"};
  const auto rep = nlohmann::json::parse(slurp(r.dir / "report.json"));
  const auto v = rep["audit"]["violations"].get<int>();
  const bool nonneg = rep["verdicts"]["H_nonnegative_on_window"], noninc = rep["verdicts"]["H_nonincreasing_on_window"];
  const auto& w = rep["H_window"];
  const auto n = w["samples"].size();
  return {v == 0 && nonneg && noninc && n > 0,
          std::to_string(v) + " violations at tol_opt " + fmt(rep["audit"]["tol_opt"].get<double>()) + "; H+ on (" +
              fmt(w["from"].get<double>()) + ", " + fmt(w["to"].get<double>()) + ") over " + std::to_string(n) +
              " samples: " + (nonneg ? "nonnegative" : "NEGATIVE") + ", " +
              (noninc ? "nonincreasing" : "INCREASING")};
}

Outcome bangbang_dominance(const ReproduceRun& r) {
  if (r.code == cli::kConfigError) return {false, "reproduce aborted"};
  const auto rep = nlohmann::json::parse(slurp(r.dir / "report.json"));
  const double bb = rep["optimizer"]["cost"];
  const CostProblem p(unit_model(), congested(), canonical_spec(), canonical_mesh());
  const auto rel = optimize_relaxed(p, {8, 2000, 6});
  const auto pat = pattern_extract(rel, kA0);
  const auto* snapped = std::get_if<BangBangPattern>(&pat);
  const bool within = rel.cost >= bb - 1e-3 * std::abs(bb);
  std::string snap = snapped ? std::to_string(snapped->k) + " switch(es)" : "rejected (interior values)";
  return {within && snapped && snapped->k <= 2,
          "relaxed J = " + fmt(rel.cost, 8) + ", bang-bang J = " + fmt(bb, 8) + " (gap " +
              fmt((bb - rel.cost) / std::abs(bb)) + " |J|, <= 1e-3); relaxed snaps to " + snap};
}

Outcome germ_stationarity() {
  const CellGrid g{-1.0, 1.0, 100};
  std::vector<double> rho0(g.cells);
  for (int i = 0; i < g.cells; ++i) rho0[i] = g.center(i) < 0.0 ? 0.9 : 0.1;
  const auto m = unit_model();
  const auto d = solve_cl(m, g, rho0, Control::constant(-0.09, 3.0, kA0), {0.0, 3.0});
  const bool member = GermElement{0.9, 0.1, -0.09}.is_member(m);
  return {d.max_step_drift <= 1e-10 && member,
          "max per-step drift " + fmt(d.max_step_drift) + " over " + std::to_string(d.steps) +
              " steps (<= 1e-10); germ membership " + (member ? "holds" : "FAILS")};
}

Outcome determinism(const ReproduceRun& a, const ReproduceRun& b) {
  const std::string x = slurp(a.dir / "report.json"), y = slurp(b.dir / "report.json");
  return {!x.empty() && x == y, "report.json with 8 and 1 workers: " + std::to_string(x.size()) + " bytes, " +
                                    (x == y ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluxlim acceptance run"};
  std::string out = "acceptance_out";
  std::vector<int> expect_fail;
  app.add_option("--out", out, "scratch directory for reproduce runs");
  app.add_option("--expect-fail", expect_fail, "criteria expected to fail");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out);

  const auto t0 = Clock::now();
  std::vector<std::pair<int, Outcome>> results;
  auto record = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << "  --  " << o.detail
              << std::endl;
    results.emplace_back(id, o);
  };

  const ReproduceRun r8 = reproduce(fs::path(out) / "reproduce_w8", 8);
  const ReproduceRun r1 = reproduce(fs::path(out) / "reproduce_w1", 1);

  record(1, "free-flow closed form", free_flow_closed_form);
  record(2, "closed-junction closed form", closed_junction_closed_form);
  record(3, "switching control beats both constants", [&] { return switch_beats_constants(r8); });
  record(4, "lattice oracle agreement", brute_force_oracle);
  record(5, "finite-volume cross-check", entropy_crosscheck);
  record(6, "monotonicity in the control", monotonicity_suite);
  record(7, "weak-* stability", weak_star_stability);
  record(8, "gradient bounds", gradient_bounds);
  record(9, "optimality audit", [&] { return optimality_audit(r8); });
  record(10, "bang-bang dominance", [&] { return bangbang_dominance(r8); });
  record(11, "germ stationarity", germ_stationarity);
  record(12, "determinism across worker counts", [&] { return determinism(r8, r1); });

  std::set<int> failed, expected(expect_fail.begin(), expect_fail.end());
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& [id, o] : results) {
    if (!o.pass) failed.insert(id);
    summary.push_back({{"criterion", id}, {"pass", o.pass}, {"detail", o.detail}});
  }
  std::ofstream(fs::path(out) / "acceptance.json") << summary.dump(2) << '\n';

  std::cout << results.size() - failed.size() << "/" << results.size() << " criteria passed in "
            << fmt(seconds_since(t0), 3) << " s";
  if (!failed.empty()) {
    std::cout << "; failed:";
    for (int id : failed) std::cout << ' ' << id;
  }
  std::cout << '\n';
  if (failed != expected) {
    std::cout << "failed set differs from the expected set\n";
    return 1;
  }
  return 0;
}
