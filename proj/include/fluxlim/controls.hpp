#pragma once

// Piecewise-constant flux limiters A : [0, T] -> [A0, 0].

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluxlim {

class Control {
 public:
  static constexpr double kMergeTol = 1e-12;

  Control() = default;

  /// times: 0 = tau_0 < ... < tau_k = T, values: k entries in [A0, 0].
  /// Adjacent cells with equal values are merged.
  Control(std::vector<double> times, std::vector<double> values, double A0)
      : A0_(A0) {
    if (times.size() < 2 || values.size() + 1 != times.size())
      throw std::invalid_argument("control: need k >= 1 values and k + 1 times");
    if (times.front() != 0.0)
      throw std::invalid_argument("control: first time must be 0");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw std::invalid_argument("control: times must be strictly increasing");
    for (double v : values)
      if (!(v >= A0 - kMergeTol && v <= kMergeTol))
        throw std::invalid_argument("control: value " + std::to_string(v) +
                                    " outside [A0, 0] with A0 = " + std::to_string(A0));
    times_.assign(1, times.front());
    values_.clear();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = std::clamp(values[i], A0, 0.0);
      if (!values_.empty() && std::abs(values_.back() - v) <= kMergeTol) {
        times_.back() = times[i + 1];
      } else {
        values_.push_back(v);
        times_.push_back(times[i + 1]);
      }
    }
    cumulative_.assign(times_.size(), 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i)
      cumulative_[i + 1] = cumulative_[i] + values_[i] * (times_[i + 1] - times_[i]);
  }

  static Control constant(double value, double T, double A0) {
    return Control({0.0, T}, {value}, A0);
  }

  double horizon() const { return times_.back(); }
  double A0() const { return A0_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t cells() const { return values_.size(); }

  /// Right-continuous value: cell [tau_i, tau_{i+1}) (last cell closed).
  double operator()(double t) const { return values_[cell_index(t)]; }

  std::size_t cell_index(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return std::min(i, values_.size() - 1);
  }

  /// C(t) = int_0^t A(s) ds, exact.
  double cumulative(double t) const {
    t = std::clamp(t, 0.0, horizon());
    const std::size_t i = cell_index(t);
    return cumulative_[i] + values_[i] * (t - times_[i]);
  }

  double integrate(double a, double b) const {
    if (!(a >= 0.0 && b <= horizon() * (1.0 + 1e-14) && a <= b))
      throw std::out_of_range("control integral over [" + std::to_string(a) + ", " +
                              std::to_string(b) + "] outside [0, T]");
    return cumulative(b) - cumulative(a);
  }

  /// int_0^T s A(s) ds, exact.
  double first_moment() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
      m += values_[i] * 0.5 * (times_[i + 1] * times_[i + 1] - times_[i] * times_[i]);
    return m;
  }

  bool is_bangbang(double tol = 1e-12) const {
    return std::all_of(values_.begin(), values_.end(), [&](double v) {
      return std::abs(v) <= tol || std::abs(v - A0_) <= tol;
    });
  }

  bool operator==(const Control& other) const {
    return times_ == other.times_ && values_ == other.values_ && A0_ == other.A0_;
  }

 private:
  double A0_ = 0.0;
  std::vector<double> times_{0.0, 1.0};
  std::vector<double> values_{0.0};
  std::vector<double> cumulative_{0.0, 0.0};
};

/// 2n cells of width T/(2n) alternating 0, A0.
inline Control weak_star_square_wave(int n, double T, double A0) {
  if (n < 1) throw std::invalid_argument("square wave: n must be >= 1");
  std::vector<double> times(2 * n + 1), values(2 * n);
  for (int i = 0; i <= 2 * n; ++i) times[i] = T * i / (2.0 * n);
  times.back() = T;
  for (int i = 0; i < 2 * n; ++i) values[i] = (i % 2 == 0) ? 0.0 : A0;
  return Control(times, values, A0);
}

/// Uniform m-cell partition of [0, T] with values clipped to [A0, 0].
inline Control clamp_project(std::span<const double> values, double A0, double T) {
  if (values.empty()) throw std::invalid_argument("clamp_project: no values");
  const std::size_t m = values.size();
  std::vector<double> times(m + 1), v(m);
  for (std::size_t i = 0; i <= m; ++i) times[i] = T * static_cast<double>(i) / static_cast<double>(m);
  times.back() = T;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument("clamp_project: non-finite value");
    v[i] = std::clamp(values[i], A0, 0.0);
  }
  return Control(times, v, A0);
}

/// Bang-bang control from switch times; start_value is A0 or 0.
inline Control bangbang_control(double start_value, std::span<const double> switches, double T,
                                double A0) {
  std::vector<double> times{0.0};
  std::vector<double> values;
  double v = start_value;
  for (double s : switches) {
    if (!(s > times.back() && s < T))
      throw std::invalid_argument("bang-bang control: switch times must increase inside (0, T)");
    times.push_back(s);
    values.push_back(v);
    v = (v == 0.0) ? A0 : 0.0;
  }
  times.push_back(T);
  values.push_back(v);
  return Control(times, values, A0);
}

}  // namespace fluxlim
