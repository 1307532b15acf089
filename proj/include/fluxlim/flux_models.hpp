#pragma once

// Hamiltonians H on [-R, 0], their concave fluxes f(rho) = -H(-rho), the
// Legendre-type Lagrangians used by the junction value formula, and the
// piecewise-linear initial datum u0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fluxlim/detail/minimize.hpp"

namespace fluxlim {

inline constexpr double kDomainTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct FluxBranches {
  double plus;   // f(min(rho, rho_hat)), nondecreasing part
  double minus;  // f(max(rho, rho_hat)), nonincreasing part
};

class Hamiltonian {
 public:
  enum class Kind { Quadratic, Tabulated };

  /// H(p) = kappa * p * (p + R).
  static Hamiltonian quadratic(double kappa, double capacity) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
      throw std::invalid_argument("quadratic Hamiltonian: kappa must be positive");
    if (!(capacity > 0.0) || !std::isfinite(capacity))
      throw std::invalid_argument("quadratic Hamiltonian: R must be positive");
    Hamiltonian h;
    h.kind_ = Kind::Quadratic;
    h.kappa_ = kappa;
    h.capacity_ = capacity;
    h.p_hat_ = -0.5 * capacity;
    h.h_min_ = -0.25 * kappa * capacity * capacity;
    h.dh0_ = kappa * capacity;
    h.dhr_ = -kappa * capacity;
    return h;
  }

  /// Shape-preserving (Schumaker) C1 piecewise-quadratic interpolant of
  /// strictly convex samples spanning [-R, 0] with H(-R) = H(0) = 0.
  static Hamiltonian tabulated(std::vector<double> p, std::vector<double> values,
                               double min_curvature = 1e-8) {
    if (p.size() != values.size() || p.size() < 3)
      throw std::invalid_argument("tabulated Hamiltonian: need >= 3 (p, H) pairs of equal length");
    for (std::size_t i = 1; i < p.size(); ++i)
      if (!(p[i] > p[i - 1]))
        throw std::invalid_argument("tabulated Hamiltonian: p samples must be strictly increasing");
    if (std::abs(p.back()) > 1e-12)
      throw std::invalid_argument("tabulated Hamiltonian: last sample must be p = 0");
    if (!(p.front() < 0.0))
      throw std::invalid_argument("tabulated Hamiltonian: first sample must be p = -R < 0");
    if (std::abs(values.front()) > 1e-12 || std::abs(values.back()) > 1e-12)
      throw std::invalid_argument("tabulated Hamiltonian: H(-R) and H(0) must vanish");
    p.back() = 0.0;
    values.front() = 0.0;
    values.back() = 0.0;

    const std::size_t n = p.size();
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      secant[i] = (values[i + 1] - values[i]) / (p[i + 1] - p[i]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double dd = (secant[i] - secant[i - 1]) / (p[i + 1] - p[i - 1]);
      if (!(dd >= min_curvature))
        throw std::invalid_argument("tabulated Hamiltonian: samples are not strictly convex");
    }

    // node slopes inside [secant_{i-1}, secant_i] keep every piece convex
    std::vector<double> slope(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = p[i] - p[i - 1];
      const double hr = p[i + 1] - p[i];
      slope[i] = (hr * secant[i - 1] + hl * secant[i]) / (hl + hr);
    }
    slope[0] = n > 2 ? 1.5 * secant[0] - 0.5 * slope[1] : secant[0];
    slope[n - 1] = n > 2 ? 1.5 * secant[n - 2] - 0.5 * slope[n - 2] : secant[0];

    Hamiltonian h;
    h.kind_ = Kind::Tabulated;
    h.capacity_ = -p.front();
    for (std::size_t i = 0; i + 1 < n; ++i)
      h.append_schumaker(p[i], p[i + 1], values[i], values[i + 1], slope[i], slope[i + 1]);
    h.dh0_ = slope[n - 1];
    h.dhr_ = slope[0];
    if (!(h.dhr_ < 0.0 && h.dh0_ > 0.0))
      throw std::invalid_argument("tabulated Hamiltonian: end slopes must satisfy H'(-R) < 0 < H'(0)");
    // derivative is piecewise linear and increasing: locate its zero exactly
    for (const auto& piece : h.pieces_) {
      const double d_lo = piece.c1;
      const double d_hi = piece.c1 + 2.0 * piece.c2 * (piece.hi - piece.lo);
      if (d_lo <= 0.0 && d_hi >= 0.0) {
        h.p_hat_ = piece.c2 > 0.0 ? piece.lo - piece.c1 / (2.0 * piece.c2) : piece.lo;
        break;
      }
    }
    h.h_min_ = h.eval_unchecked(h.p_hat_);
    return h;
  }

  Kind kind() const { return kind_; }
  bool is_quadratic() const { return kind_ == Kind::Quadratic; }
  double kappa() const { return kappa_; }
  double capacity() const { return capacity_; }
  double p_hat() const { return p_hat_; }
  double rho_hat() const { return -p_hat_; }
  double h_min() const { return h_min_; }
  /// H'(0), the free-flow characteristic speed.
  double slope_at_zero() const { return dh0_; }
  /// H'(-R), the jam characteristic speed (negative).
  double slope_at_jam() const { return dhr_; }
  double max_speed() const { return std::max(dh0_, -dhr_); }

  double operator()(double p) const {
    if (p < -capacity_ - kDomainTol || p > kDomainTol)
      throw std::domain_error("Hamiltonian evaluated outside [-R, 0]: p = " + std::to_string(p));
    return eval_unchecked(std::clamp(p, -capacity_, 0.0));
  }

  double derivative(double p) const {
    if (p < -capacity_ - kDomainTol || p > kDomainTol)
      throw std::domain_error("Hamiltonian derivative outside [-R, 0]: p = " + std::to_string(p));
    p = std::clamp(p, -capacity_, 0.0);
    if (kind_ == Kind::Quadratic) return kappa_ * (2.0 * p + capacity_);
    const auto& piece = piece_at(p);
    return piece.c1 + 2.0 * piece.c2 * (p - piece.lo);
  }

  /// f(rho) = -H(-rho).
  double flux(double rho) const {
    if (rho < -kDomainTol || rho > capacity_ + kDomainTol)
      throw std::domain_error("flux evaluated outside [0, R]: rho = " + std::to_string(rho));
    return -eval_unchecked(-std::clamp(rho, 0.0, capacity_));
  }

  FluxBranches flux_branches(double rho) const {
    if (rho < -kDomainTol || rho > capacity_ + kDomainTol)
      throw std::domain_error("flux branches outside [0, R]: rho = " + std::to_string(rho));
    const double r = std::clamp(rho, 0.0, capacity_);
    const double crest = rho_hat();
    return {flux(std::min(r, crest)), flux(std::max(r, crest))};
  }

  /// L(alpha) = sup_{p in [-R, 0]} (alpha p - H(p)).
  double lagrangian(double alpha) const {
    if (alpha >= dh0_) return 0.0;
    if (alpha <= dhr_) return -capacity_ * alpha;
    if (kind_ == Kind::Quadratic) {
      const double d = alpha - dh0_;
      return d * d / (4.0 * kappa_);
    }
    const auto best = detail::minimize_1d(
        [&](double p) { return eval_unchecked(p) - alpha * p; }, -capacity_, 0.0);
    return -best.value;
  }

  /// argmin over q in [lo, hi] of span * L((x - q)/span) + slope * q, i.e. the
  /// optimal start of a straight path of duration span over a linear datum.
  double best_start(double x, double span, double slope, double lo, double hi) const {
    if (kind_ == Kind::Quadratic) {
      // stationarity: L'((x - q)/span) = slope  <=>  (x - q)/span = H'(slope)
      const double q = x - span * derivative(std::clamp(slope, -capacity_, 0.0));
      return std::clamp(q, lo, hi);
    }
    // restrict unbounded segments to the characteristic cone
    const double cone_lo = x - span * dh0_ - 1.0;
    const double cone_hi = x - span * dhr_ + 1.0;
    if (hi <= cone_lo) return hi;
    if (lo >= cone_hi) return lo;
    return detail::minimize_1d(
               [&](double q) { return span * lagrangian((x - q) / span) + slope * q; },
               std::max(lo, cone_lo), std::min(hi, cone_hi))
        .arg;
  }

 private:
  struct Piece {
    double lo, hi, c0, c1, c2;  // c0 + c1 (p - lo) + c2 (p - lo)^2
  };

  double eval_unchecked(double p) const {
    if (kind_ == Kind::Quadratic) return kappa_ * p * (p + capacity_);
    const auto& piece = piece_at(p);
    const double d = p - piece.lo;
    return piece.c0 + d * (piece.c1 + d * piece.c2);
  }

  const Piece& piece_at(double p) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), p,
                               [](double v, const Piece& pc) { return v < pc.hi; });
    if (it == pieces_.end()) return pieces_.back();
    return *it;
  }

  void append_schumaker(double t0, double t1, double z0, double z1, double s0, double s1) {
    const double h = t1 - t0;
    const double delta = (z1 - z0) / h;
    if (std::abs(s0 + s1 - 2.0 * delta) <= 1e-14 * (1.0 + std::abs(delta))) {
      pieces_.push_back({t0, t1, z0, s0, (s1 - s0) / (2.0 * h)});
      return;
    }
    double xi = 0.5 * (t0 + t1);
    if ((s0 - delta) * (s1 - delta) < 0.0) {
      if (std::abs(s1 - delta) < std::abs(s0 - delta)) {
        const double xbar = t0 + 2.0 * h * (s1 - delta) / (s1 - s0);
        xi = 0.5 * (t0 + xbar);
      } else {
        const double xbar = t1 + 2.0 * h * (s0 - delta) / (s1 - s0);
        xi = 0.5 * (t1 + xbar);
      }
    }
    const double a = xi - t0;
    const double b = t1 - xi;
    const double sbar = (2.0 * (z1 - z0) - (a * s0 + b * s1)) / h;
    const double zbar = z0 + 0.5 * (s0 + sbar) * a;
    pieces_.push_back({t0, xi, z0, s0, (sbar - s0) / (2.0 * a)});
    pieces_.push_back({xi, t1, zbar, sbar, (s1 - sbar) / (2.0 * b)});
  }

  Kind kind_ = Kind::Quadratic;
  double kappa_ = 0.0;
  double capacity_ = 0.0;
  double p_hat_ = 0.0;
  double h_min_ = 0.0;
  double dh0_ = 0.0;
  double dhr_ = 0.0;
  std::vector<Piece> pieces_;
};

enum class Side { Left, Right };

struct JunctionModel {
  Hamiltonian left;
  Hamiltonian right;
  double A0 = 0.0;

  JunctionModel(Hamiltonian l, Hamiltonian r, bool require_equal_minima = false)
      : left(std::move(l)), right(std::move(r)), A0(std::max(left.h_min(), right.h_min())) {
    if (require_equal_minima && std::abs(left.h_min() - right.h_min()) > 1e-12)
      throw std::invalid_argument("junction model: min H^L and min H^R must coincide");
  }

  static JunctionModel symmetric_quadratic(double kappa, double capacity) {
    return JunctionModel(Hamiltonian::quadratic(kappa, capacity),
                         Hamiltonian::quadratic(kappa, capacity));
  }

  const Hamiltonian& side(Side s) const { return s == Side::Left ? left : right; }
  const Hamiltonian& side_of(double x) const { return x < 0.0 ? left : right; }
  bool equal_minima(double tol = 1e-12) const {
    return std::abs(left.h_min() - right.h_min()) <= tol;
  }
  double max_speed() const { return std::max(left.max_speed(), right.max_speed()); }
  double lipschitz_bound() const {
    return std::max({left.capacity(), right.capacity(), -left.h_min(), -right.h_min()});
  }
};

/// Piecewise-linear u0 with u0(0) = 0. Segments never straddle 0.
class InitialData {
 public:
  struct Segment {
    double lo, hi;   // may be infinite
    double slope;
    double anchor;   // finite reference point inside [lo, hi]
    double value;    // u0(anchor)
    Side side;

    double operator()(double y) const { return value + slope * (y - anchor); }
  };

  InitialData() : InitialData(std::vector<double>{}, std::vector<double>{0.0}) {}

  InitialData(std::vector<double> breakpoints, std::vector<double> slopes)
      : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)) {
    if (slopes_.size() != breakpoints_.size() + 1)
      throw std::invalid_argument("initial data: need exactly breakpoints + 1 slopes");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
      if (!(breakpoints_[i] > breakpoints_[i - 1]))
        throw std::invalid_argument("initial data: breakpoints must be strictly increasing");
    for (double s : slopes_)
      if (!std::isfinite(s)) throw std::invalid_argument("initial data: slopes must be finite");
    build_segments();
  }

  static InitialData linear(double slope) { return InitialData({}, {slope}); }

  /// Piecewise-linear interpolant of samples (xs strictly increasing), shifted
  /// so that u0(0) = 0; the removed constant is returned through `offset`.
  static InitialData from_samples(const std::vector<double>& xs, const std::vector<double>& us,
                                  double* offset = nullptr) {
    if (xs.size() != us.size() || xs.size() < 2)
      throw std::invalid_argument("initial data samples: need >= 2 matching samples");
    std::vector<double> slopes;
    slopes.reserve(xs.size() + 1);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      slopes.push_back((us[i + 1] - us[i]) / (xs[i + 1] - xs[i]));
    std::vector<double> bps(xs.begin(), xs.end());
    slopes.insert(slopes.begin(), slopes.front());
    slopes.push_back(slopes.back());
    InitialData raw(bps, slopes);
    // raw is anchored at 0 with u(0)=0; recover the sample level at 0
    const double shift = us.front() - raw(xs.front());
    if (offset) *offset = shift;
    return raw;
  }

  double operator()(double y) const {
    const auto& seg = segment_at(y);
    return seg(y);
  }

  /// Slope rule: open intervals (-R^L, 0) left and (-R^R, 0) right.
  void check_admissible(const JunctionModel& model, bool allow_boundary_slopes = false) const {
    for (const auto& seg : segments_) {
      const double r = model.side(seg.side).capacity();
      const double tol = allow_boundary_slopes ? -1e-9 : 1e-9;
      if (!(seg.slope > -r + tol && seg.slope < -tol))
        throw std::invalid_argument("initial data: slope " + std::to_string(seg.slope) +
                                    " outside the admissible open interval (-R, 0) on the " +
                                    (seg.side == Side::Left ? "left" : "right") + " line");
    }
  }

  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& slopes() const { return slopes_; }
  double slope_left_of_zero() const { return segment_at(-1e-300).slope; }
  double slope_right_of_zero() const { return segment_at(1e-300).slope; }

 private:
  const Segment& segment_at(double y) const {
    for (const auto& seg : segments_)
      if (y >= seg.lo && y <= seg.hi) return seg;
    return segments_.back();
  }

  void build_segments() {
    // knots with 0 inserted; slope of each original interval carried over
    std::vector<double> knots{-kInf};
    knots.insert(knots.end(), breakpoints_.begin(), breakpoints_.end());
    knots.push_back(kInf);
    struct Raw { double lo, hi, slope; };
    std::vector<Raw> raw;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double lo = knots[i], hi = knots[i + 1], s = slopes_[i];
      if (lo < 0.0 && hi > 0.0) {
        raw.push_back({lo, 0.0, s});
        raw.push_back({0.0, hi, s});
      } else {
        raw.push_back({lo, hi, s});
      }
    }
    // accumulate values outward from u0(0) = 0
    std::size_t zero_idx = 0;
    while (zero_idx < raw.size() && raw[zero_idx].hi <= 0.0) ++zero_idx;
    segments_.resize(raw.size());
    double v = 0.0;
    for (std::size_t k = zero_idx; k < raw.size(); ++k) {
      const auto& r = raw[k];
      segments_[k] = {r.lo, r.hi, r.slope, r.lo, v, Side::Right};
      if (std::isfinite(r.hi)) v += r.slope * (r.hi - r.lo);
    }
    v = 0.0;
    for (std::size_t k = zero_idx; k-- > 0;) {
      const auto& r = raw[k];
      segments_[k] = {r.lo, r.hi, r.slope, r.hi, v, Side::Left};
      if (std::isfinite(r.lo)) v -= r.slope * (r.hi - r.lo);
    }
  }

  std::vector<double> breakpoints_;
  std::vector<double> slopes_;
  std::vector<Segment> segments_;
};

// Free-function spellings used across the toolkit.
inline double hamiltonian_eval(const Hamiltonian& h, double p) { return h(p); }
inline double flux_eval(const Hamiltonian& h, double rho) { return h.flux(rho); }
inline FluxBranches flux_branches(const Hamiltonian& h, double rho) { return h.flux_branches(rho); }
inline double lagrangian(const Hamiltonian& h, double alpha) { return h.lagrangian(alpha); }
inline double u0_eval(const InitialData& u0, double y) { return u0(y); }

}  // namespace fluxlim
