#pragma once

#include <random>
#include <vector>

#include "fluxlim/controls.hpp"
#include "fluxlim/flux_models.hpp"
#include "fluxlim/functionals.hpp"
#include "fluxlim/hj_junction.hpp"

namespace fluxlim::testing {

inline JunctionModel unit_model() { return JunctionModel::symmetric_quadratic(1.0, 1.0); }
inline InitialData congested() { return InitialData::linear(-0.8); }
constexpr double kA0 = -0.25;
constexpr double kHp = -0.16;  // H(-0.8)

inline BoxWeight canonical_box() { return make_box_weight(0.1, 0.18, 1.0, 1.5, 4.5, 5.0, 0.01); }
inline Mesh canonical_mesh() { return {-0.4, 0.4, 400, 6.0, 600}; }
inline Control switching(double at = 1.5, double T = 6.0) {
  return bangbang_control(0.0, std::vector<double>{at}, T, kA0);
}

/// Random piecewise-constant control with `cells` cells of random widths.
inline Control random_control(std::mt19937_64& rng, int cells, double T, double A0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(cells), times{0.0}, values(cells);
  double sum = 0.0;
  for (auto& x : w) sum += (x = 0.2 + u(rng));
  for (int i = 0; i < cells; ++i) {
    times.push_back(i + 1 == cells ? T : times.back() + T * w[i] / sum);
    values[i] = A0 * u(rng);
  }
  return Control(times, values, A0);
}

}  // namespace fluxlim::testing
