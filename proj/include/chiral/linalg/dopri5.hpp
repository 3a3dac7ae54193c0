#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "chiral/core.hpp"

namespace chiral::linalg {

struct Dopri5Options {
  Real rtol = 1e-8;
  Real atol = 1e-10;
  Real h_init = 0.0;  // 0 selects an automatic first step
  Real h_max = std::numeric_limits<Real>::infinity();
  Real h_min = 1e-12;  // below this the controller is considered stalled
  long max_steps = 50'000'000;
};

/// Dormand-Prince 5(4) embedded Runge-Kutta integrator with PI step control.
///
/// `State` is any dense Eigen object supporting the usual linear-algebra
/// expressions. `Rhs` is callable as `rhs(t, y, dydt)` and must write the
/// derivative into the preallocated `dydt`.
template <class State, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, Dopri5Options options) : rhs_(std::move(rhs)), opt_(options) {}

  /// Advances `y` from `t` to exactly `t_end`. Step sizes are clipped so the
  /// final step lands on `t_end`; the controller state carries over between
  /// calls so consecutive output intervals do not restart from small steps.
  void integrate(Real& t, State& y, Real t_end) {
    if (t_end < t) throw Error(ErrorCode::InvalidArgument, "integration must move forward in time");
    while (t < t_end) step(t, y, t_end);
  }

  /// Takes one accepted step from (t, y) towards `t_end` (never past it),
  /// retrying rejected attempts. Returns the size of the accepted step.
  Real step(Real& t, State& y, Real t_end) {
    if (t_end <= t) return 0.0;
    allocate(y);
    if (!have_k1_) {
      rhs_(t, y, k1_);
      have_k1_ = true;
    }
    if (h_ <= 0.0) h_ = opt_.h_init > 0.0 ? opt_.h_init : initial_step(t, y);
    while (true) {
      if (++steps_ > opt_.max_steps)
        throw Error(ErrorCode::ToleranceFailure, "step budget exhausted at t=" + std::to_string(t));
      Real h = std::min({h_, opt_.h_max, t_end - t});
      const bool last = (h == t_end - t);
      const Real err = attempt(t, y, h);
      if (err <= 1.0) {
        t = last ? t_end : t + h;
        y.swap(ynew_);
        k1_.swap(k7_);
        const Real fac = err == 0.0 ? kMaxFactor
                                    : std::clamp(kSafety * std::pow(err, -kAlpha) * std::pow(err_old_, kBeta),
                                                 kMinFactor, kMaxFactor);
        err_old_ = std::max(err, 1e-4);
        // A clipped final step says nothing about the natural step size.
        if (!last || fac < 1.0) h_ = h * fac;
        return h;
      }
      ++rejected_;
      h_ = h * std::max(kMinFactor, kSafety * std::pow(err, -kAlpha));
      if (h_ < opt_.h_min)
        throw Error(ErrorCode::ToleranceFailure,
                    "step size fell below " + std::to_string(opt_.h_min) + " at t=" + std::to_string(t) +
                        "; the problem is likely too stiff for explicit integration");
    }
  }

  /// One uncontrolled fifth-order step of size `h` from (t, y). Used for
  /// bisection inside an accepted step; does not disturb the controller.
  void single_step(Real t, const State& y, Real h, State& y_out) {
    allocate(y);
    State k1(y.rows(), y.cols());
    rhs_(t, y, k1);
    stages(t, y, h, k1);
    y_out = y + h * (kB1 * k1 + kB3 * k3_ + kB4 * k4_ + kB5 * k5_ + kB6 * k6_);
  }

  /// Drops cached derivative information; call after modifying the state
  /// outside the integrator (e.g. a quantum jump).
  void reset() {
    have_k1_ = false;
    err_old_ = 1e-4;
  }

  Real step_size() const { return h_; }
  long steps() const { return steps_; }
  long rejected() const { return rejected_; }

 private:
  static constexpr Real kSafety = 0.9;
  static constexpr Real kMinFactor = 0.2;
  static constexpr Real kMaxFactor = 10.0;
  static constexpr Real kAlpha = 0.7 / 5.0;
  static constexpr Real kBeta = 0.4 / 5.0;

  static constexpr Real kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
  static constexpr Real kA21 = 1.0 / 5.0;
  static constexpr Real kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
  static constexpr Real kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
  static constexpr Real kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                        kA54 = -212.0 / 729.0;
  static constexpr Real kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                        kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
  static constexpr Real kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                        kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
  static constexpr Real kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                        kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

  void allocate(const State& y) {
    if (k2_.rows() == y.rows() && k2_.cols() == y.cols()) return;
    for (State* s : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &ynew_}) s->resize(y.rows(), y.cols());
    have_k1_ = false;
  }

  void stages(Real t, const State& y, Real h, const State& k1) {
    ytmp_ = y + (h * kA21) * k1;
    rhs_(t + kC2 * h, ytmp_, k2_);
    ytmp_ = y + h * (kA31 * k1 + kA32 * k2_);
    rhs_(t + kC3 * h, ytmp_, k3_);
    ytmp_ = y + h * (kA41 * k1 + kA42 * k2_ + kA43 * k3_);
    rhs_(t + kC4 * h, ytmp_, k4_);
    ytmp_ = y + h * (kA51 * k1 + kA52 * k2_ + kA53 * k3_ + kA54 * k4_);
    rhs_(t + kC5 * h, ytmp_, k5_);
    ytmp_ = y + h * (kA61 * k1 + kA62 * k2_ + kA63 * k3_ + kA64 * k4_ + kA65 * k5_);
    rhs_(t + h, ytmp_, k6_);
  }

  // Returns the scaled error norm of a trial step; leaves the candidate in
  // ynew_ and its derivative in k7_.
  Real attempt(Real t, const State& y, Real h) {
    stages(t, y, h, k1_);
    ynew_ = y + h * (kB1 * k1_ + kB3 * k3_ + kB4 * k4_ + kB5 * k5_ + kB6 * k6_);
    rhs_(t + h, ynew_, k7_);
    ytmp_ = h * (kE1 * k1_ + kE3 * k3_ + kE4 * k4_ + kE5 * k5_ + kE6 * k6_ + kE7 * k7_);
    const auto scale = opt_.atol + opt_.rtol * y.array().abs().max(ynew_.array().abs());
    const Real err = std::sqrt((ytmp_.array().abs() / scale).square().mean());
    if (!std::isfinite(err)) return std::numeric_limits<Real>::infinity();
    return err;
  }

  Real initial_step(Real t, const State& y) {
    const auto scale = opt_.atol + opt_.rtol * y.array().abs();
    const Real d0 = std::sqrt((y.array().abs() / scale).square().mean());
    const Real d1 = std::sqrt((k1_.array().abs() / scale).square().mean());
    Real h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, opt_.h_max);
    ytmp_ = y + h0 * k1_;
    rhs_(t + h0, ytmp_, k2_);
    const Real d2 = std::sqrt(((k2_ - k1_).array().abs() / scale).square().mean()) / h0;
    const Real h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                              : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    return std::min({100.0 * h0, h1, opt_.h_max});
  }

  Rhs rhs_;
  Dopri5Options opt_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_;
  bool have_k1_ = false;
  Real h_ = 0.0;
  Real err_old_ = 1e-4;
  long steps_ = 0;
  long rejected_ = 0;
};

template <class State, class Rhs>
Dopri5<State, Rhs> make_dopri5(Rhs rhs, Dopri5Options options) {
  return Dopri5<State, Rhs>(std::move(rhs), options);
}

}  // namespace chiral::linalg
