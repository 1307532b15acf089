#pragma once

// Derivative-free control search: switch-time coordinate descent over
// bang-bang controls with k = 0..k_max switches, and a relaxed cellwise
// baseline on a uniform partition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include "fluxlim/controls.hpp"
#include "fluxlim/functionals.hpp"
#include "fluxlim/hj_junction.hpp"
#include "fluxlim/parallel.hpp"

namespace fluxlim {

struct BangBangPattern {
  int k = 0;
  double start_value = 0.0;
  std::vector<double> switch_times;

  Control control(double T, double A0) const {
    return bangbang_control(start_value, switch_times, T, A0);
  }
};

struct OptimizeResult {
  std::string method;
  Control best;
  double cost = kInf;
  std::size_t evals = 0;
  std::vector<std::pair<std::size_t, double>> history;  // (evaluation, best so far)
  bool budget_exhausted = false;
  std::vector<double> cell_times;   // partition the raw values live on
  std::vector<double> cell_values;  // raw (unsnapped) values
};

/// Everything a cost evaluation needs; the support list is built once.
class CostProblem {
 public:
  CostProblem(JunctionModel model, InitialData u0, CostSpec spec, Mesh mesh,
              Parallel par = Parallel{})
      : model_(std::move(model)),
        u0_(std::move(u0)),
        spec_(std::move(spec)),
        mesh_(mesh),
        par_(par),
        support_(support_nodes(spec_, mesh_)) {}

  double operator()(const Control& A) const {
    double J = spec_.linear_coeff * A.integrate(0.0, A.horizon());
    if (!support_.empty()) J += field_term(JunctionSolver(model_, u0_, A), mesh_, support_, par_);
    return J;
  }

  const JunctionModel& model() const { return model_; }
  const InitialData& initial() const { return u0_; }
  const CostSpec& spec() const { return spec_; }
  const Mesh& mesh() const { return mesh_; }
  double T() const { return mesh_.T; }
  double A0() const { return model_.A0; }

 private:
  JunctionModel model_;
  InitialData u0_;
  CostSpec spec_;
  Mesh mesh_;
  Parallel par_;
  std::vector<SupportNode> support_;
};

namespace detail {

struct BudgetExhausted {};

/// Memoized, budgeted evaluation tracking the incumbent. Ties keep the
/// earlier control.
class Evaluator {
 public:
  Evaluator(const CostProblem& p, std::size_t budget, OptimizeResult& out)
      : p_(p), budget_(budget), out_(out) {}

  double operator()(const Control& A) {
    std::vector<double> key(A.times());
    key.insert(key.end(), A.values().begin(), A.values().end());
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (out_.evals >= budget_) {
      out_.budget_exhausted = true;
      throw BudgetExhausted{};
    }
    const double J = p_(A);
    cache_.emplace(std::move(key), J);
    ++out_.evals;
    if (J < out_.cost) {
      out_.cost = J;
      out_.best = A;
    }
    out_.history.emplace_back(out_.evals, out_.cost);
    return J;
  }

 private:
  const CostProblem& p_;
  std::size_t budget_;
  OptimizeResult& out_;
  std::map<std::vector<double>, double> cache_;
};

/// Brent at ~1e-4 relative precision; endpoints win ties (left first).
template <typename F>
std::pair<double, double> coarse_minimize(F&& f, double lo, double hi) {
  const double flo = f(lo);
  if (!(hi > lo)) return {lo, flo};
  const double fhi = f(hi);
  std::uintmax_t iters = 40;
  auto [x, fx] = boost::math::tools::brent_find_minima(f, lo, hi, 14, iters);
  std::pair<double, double> best{x, fx};
  if (fhi <= best.second) best = {hi, fhi};
  if (flo <= best.second) best = {lo, flo};
  return best;
}

/// Sorts and pushes switch times apart by `margin` inside (0, T).
inline std::vector<double> sanitize_switches(std::vector<double> s, double T, double margin) {
  std::sort(s.begin(), s.end());
  const int k = static_cast<int>(s.size());
  for (int i = 0; i < k; ++i)
    s[i] = std::clamp(s[i], margin * (i + 1), T - margin * (k - i));
  for (int i = 1; i < k; ++i) s[i] = std::max(s[i], s[i - 1] + margin);
  return s;
}

inline std::vector<std::vector<double>> seedings(int k, double T, const CostSpec& spec) {
  auto uniform = [k](double lo, double hi, bool include_hi) {
    std::vector<double> s(k);
    for (int i = 0; i < k; ++i)
      s[i] = include_hi ? lo + (hi - lo) * (i + 1) / k : lo + (hi - lo) * (i + 1) / (k + 1);
    return s;
  };
  std::vector<std::vector<double>> out;
  out.push_back(uniform(0.0, T, false));
  if (const auto* box = std::get_if<BoxWeight>(&spec.weight)) {
    out.push_back(uniform(box->t1, box->t4, false));
    const double cycle[] = {box->t2, box->t3, box->t1, box->t4};
    std::vector<double> c;
    for (int i = 0; i < k && i < 4; ++i) c.push_back(cycle[i]);
    for (int i = 4; i < k; ++i) c.push_back(box->t4 + (T - box->t4) * (i - 3) / (k - 3 + 1));
    out.push_back(c);
    out.push_back(uniform(0.0, box->t2, true));
    out.push_back(uniform(box->t2, box->t3, false));
  } else {
    for (int m = 1; m <= 4; ++m) {
      std::vector<double> s(k);
      for (int i = 0; i < k; ++i) s[i] = T * (i + 0.5 * m / 4.0 + 0.25) / (k + 1);
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace detail

struct BangBangOptions {
  int k_max = 4;
  std::size_t budget = 3000;
  int max_sweeps = 4;
};

inline OptimizeResult optimize_bangbang(const CostProblem& p, BangBangOptions opt = {}) {
  if (opt.k_max < 1) throw std::invalid_argument("optimize_bangbang: k_max must be >= 1");
  if (opt.budget < 50) throw std::invalid_argument("optimize_bangbang: budget must be >= 50");
  OptimizeResult res;
  res.method = "bangbang";
  detail::Evaluator eval(p, opt.budget, res);
  const double T = p.T(), A0 = p.A0(), margin = 1e-6 * T;
  try {
    eval(Control::constant(A0, T, A0));
    eval(Control::constant(0.0, T, A0));
    for (int k = 1; k <= opt.k_max; ++k)
      for (double start : {A0, 0.0})
        for (auto s : detail::seedings(k, T, p.spec())) {
          s = detail::sanitize_switches(std::move(s), T, margin);
          double current = eval(bangbang_control(start, s, T, A0));
          for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            const double before = current;
            for (int i = 0; i < k; ++i) {
              const double lo = i == 0 ? margin : s[i - 1] + margin;
              const double hi = i == k - 1 ? T - margin : s[i + 1] - margin;
              auto f = [&](double v) {
                auto trial = s;
                trial[i] = v;
                return eval(bangbang_control(start, trial, T, A0));
              };
              const auto [arg, val] = detail::coarse_minimize(f, lo, hi);
              if (val < current) {
                current = val;
                s[i] = arg;
              }
            }
            if (!(current < before - 1e-12 * (1.0 + std::abs(before)))) break;
          }
        }
  } catch (const detail::BudgetExhausted&) {
  }
  res.cell_times = res.best.times();
  res.cell_values = res.best.values();
  return res;
}

struct RelaxedOptions {
  int m_cells = 8;
  std::size_t budget = 2000;
  int max_sweeps = 6;
};

/// Projected coordinate descent on a uniform m-cell partition, started from
/// the uncontrolled value A0 in every cell.
inline OptimizeResult optimize_relaxed(const CostProblem& p, RelaxedOptions opt = {}) {
  if (opt.m_cells < 1) throw std::invalid_argument("optimize_relaxed: m_cells must be >= 1");
  if (opt.budget < 1) throw std::invalid_argument("optimize_relaxed: budget must be positive");
  OptimizeResult res;
  res.method = "relaxed";
  detail::Evaluator eval(p, opt.budget, res);
  const double T = p.T(), A0 = p.A0();
  std::vector<double> v(opt.m_cells, A0);
  try {
    double current = eval(clamp_project(v, A0, T));
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      const double before = current;
      for (int i = 0; i < opt.m_cells; ++i) {
        auto f = [&](double a) {
          auto trial = v;
          trial[i] = a;
          return eval(clamp_project(trial, A0, T));
        };
        const auto [arg, val] = detail::coarse_minimize(f, A0, 0.0);
        if (val < current) {
          current = val;
          v[i] = arg;
        }
      }
      if (!(current < before - 1e-12 * (1.0 + std::abs(before)))) break;
    }
  } catch (const detail::BudgetExhausted&) {
  }
  // raw values of the incumbent on the uniform partition
  res.cell_times.resize(opt.m_cells + 1);
  res.cell_values.resize(opt.m_cells);
  for (int i = 0; i <= opt.m_cells; ++i) res.cell_times[i] = i == opt.m_cells ? T : T * i / opt.m_cells;
  for (int i = 0; i < opt.m_cells; ++i)
    res.cell_values[i] = res.best(0.5 * (res.cell_times[i] + res.cell_times[i + 1]));
  return res;
}

struct PatternRejection {
  std::vector<double> distances;  // per cell, to the nearest of {A0, 0}
  std::vector<int> offending;
};

inline std::variant<BangBangPattern, PatternRejection> pattern_extract(const OptimizeResult& r,
                                                                      double A0) {
  const double tol = 1e-3 * std::abs(A0);
  PatternRejection rej;
  std::vector<double> snapped;
  for (std::size_t i = 0; i < r.cell_values.size(); ++i) {
    const double v = r.cell_values[i];
    const double d0 = std::abs(v), dA = std::abs(v - A0);
    rej.distances.push_back(std::min(d0, dA));
    if (std::min(d0, dA) > tol) rej.offending.push_back(static_cast<int>(i));
    snapped.push_back(d0 <= dA ? 0.0 : A0);
  }
  if (!rej.offending.empty()) return rej;
  const Control c(r.cell_times, snapped, A0);
  BangBangPattern pat;
  pat.start_value = c.values().front();
  pat.switch_times.assign(c.times().begin() + 1, c.times().end() - 1);
  pat.k = static_cast<int>(pat.switch_times.size());
  return pat;
}

inline nlohmann::json result_json(const OptimizeResult& r, double A0) {
  nlohmann::json j{{"method", r.method},
                   {"cost", r.cost},
                   {"evals", r.evals},
                   {"budget_exhausted", r.budget_exhausted},
                   {"control", {{"times", r.best.times()}, {"values", r.best.values()}}},
                   {"integral_A", r.best.integrate(0.0, r.best.horizon())},
                   {"first_moment_A", r.best.first_moment()}};
  const auto pat = pattern_extract(r, A0);
  if (const auto* bb = std::get_if<BangBangPattern>(&pat)) {
    j["k"] = bb->k;
    j["start_value"] = bb->start_value;
    j["switch_times"] = bb->switch_times;
  } else {
    const auto& rej = std::get<PatternRejection>(pat);
    j["k"] = nullptr;
    j["start_value"] = nullptr;
    j["switch_times"] = nullptr;
    j["pattern_rejection"] = {{"distances", rej.distances}, {"offending_cells", rej.offending}};
  }
  if (r.method == "relaxed") j["cell_values"] = r.cell_values;
  return j;
}

}  // namespace fluxlim
