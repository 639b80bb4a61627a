#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bracketflow {

enum class OdeMethod { Rk4Fixed, Rk45Adaptive };

std::string to_string(OdeMethod m);
OdeMethod ode_method_from_string(const std::string& s);

// Shared integrator knobs.  `step` is the fixed step for Rk4Fixed and the
// initial trial step for Rk45Adaptive (0 = pick automatically).  `tolerance`
// is the per-step relative error target of the adaptive method; the absolute
// floor guards components sitting at zero.
struct IntegratorConfig {
  OdeMethod method = OdeMethod::Rk45Adaptive;
  double step = 0.0;
  double tolerance = 1e-9;
  double absolute_tolerance = 1e-12;
  std::int64_t max_steps = 1'000'000;
};

// Raised on step-budget exhaustion or step-size underflow; carries how far
// the integration got so stiffness reports can name the parameter value.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double b_reached)
      : std::runtime_error(what + " at B = " + std::to_string(b_reached)),
        b_reached_(b_reached) {}
  double b_reached() const { return b_reached_; }

 private:
  double b_reached_;
};

struct IntegrationStats {
  std::int64_t steps_accepted = 0;
  std::int64_t steps_rejected = 0;
  std::int64_t rhs_evaluations = 0;
  double max_error_estimate = 0.0;  // largest accepted scaled error (<= 1)
  double min_step = 0.0;
  std::vector<double> step_errors;  // scaled error of each accepted step
};

namespace detail {

// Max over entries of |err| / (atol + rtol * max(|y0|,|y1|)).  Accepting a
// step requires this to be <= 1.
template <class State>
double scaled_error_norm(const State& err, const State& y0, const State& y1,
                         double atol, double rtol) {
  if (y0.size() == 0) return 0.0;
  return (err.cwiseAbs().array() /
          (y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array() * rtol + atol))
      .maxCoeff();
}

}  // namespace detail

// Integrates y' = rhs(b, y) across an ascending grid, invoking
// observer(index, b, y) at every grid point including the first.  The
// observer sees each state exactly at the grid values (steps are clipped,
// never interpolated).  rhs has signature rhs(double b, const State& y,
// State& dy).
template <class State, class Rhs, class Observer>
IntegrationStats integrate_grid(Rhs&& rhs, State y,
                                const std::vector<double>& grid,
                                const IntegratorConfig& cfg,
                                Observer&& observer) {
  if (grid.empty()) throw std::invalid_argument("integrate_grid: empty grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("integrate_grid: grid must ascend");
  if (cfg.max_steps < 1)
    throw std::invalid_argument("integrate_grid: max_steps must be >= 1");

  IntegrationStats stats;
  observer(0, grid.front(), static_cast<const State&>(y));
  if (grid.size() == 1) return stats;

  if (cfg.method == OdeMethod::Rk4Fixed) {
    if (!(cfg.step > 0.0))
      throw std::invalid_argument("integrate_grid: rk4-fixed needs step > 0");
    State k1 = y, k2 = y, k3 = y, k4 = y, tmp = y;
    for (std::size_t seg = 0; seg + 1 < grid.size(); ++seg) {
      const double b0 = grid[seg], b1 = grid[seg + 1];
      const auto m = static_cast<std::int64_t>(
          std::ceil((b1 - b0) / cfg.step - 1e-12));
      const std::int64_t substeps = std::max<std::int64_t>(1, m);
      if (stats.steps_accepted + substeps > cfg.max_steps)
        throw IntegrationError("integrate_grid: step budget exhausted", b0);
      const double h = (b1 - b0) / static_cast<double>(substeps);
      for (std::int64_t i = 0; i < substeps; ++i) {
        const double b = b0 + h * static_cast<double>(i);
        rhs(b, y, k1);
        tmp = y + (h / 2) * k1;
        rhs(b + h / 2, tmp, k2);
        tmp = y + (h / 2) * k2;
        rhs(b + h / 2, tmp, k3);
        tmp = y + h * k3;
        rhs(b + h, tmp, k4);
        y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        stats.rhs_evaluations += 4;
        ++stats.steps_accepted;
        stats.min_step = stats.min_step == 0.0 ? h : std::min(stats.min_step, h);
      }
      observer(static_cast<int>(seg + 1), b1, static_cast<const State&>(y));
    }
    return stats;
  }

  // Dormand-Prince 5(4), first-same-as-last: the last stage of an accepted
  // step is the first stage of the next, also across grid points.
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1c = 35.0 / 384, b3c = 500.0 / 1113,
                          b4c = 125.0 / 192, b5c = -2187.0 / 6784,
                          b6c = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(cfg.tolerance > 0.0))
    throw std::invalid_argument("integrate_grid: tolerance must be > 0");
  const double atol = cfg.absolute_tolerance;
  const double rtol = cfg.tolerance;

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y;
  State ytmp = y, ynew = y, errv = y;

  double b = grid.front();
  double h_try = cfg.step > 0.0 ? cfg.step : (grid.back() - grid.front()) / 100.0;
  rhs(b, y, k1);
  ++stats.rhs_evaluations;

  std::int64_t attempts = 0;
  for (std::size_t seg = 0; seg + 1 < grid.size(); ++seg) {
    const double b1 = grid[seg + 1];
    while (true) {
      const double remaining = b1 - b;
      if (remaining <= 1e-14 * std::max(1.0, std::abs(b1))) break;
      const double h = std::min(h_try, remaining);
      if (h < 1e-14 * std::max(1.0, std::abs(b)))
        throw IntegrationError("integrate_grid: step size underflow", b);
      if (++attempts > cfg.max_steps)
        throw IntegrationError("integrate_grid: step budget exhausted", b);

      ytmp = y + (h * a21) * k1;
      rhs(b + h / 5, ytmp, k2);
      ytmp = y + (h * a31) * k1 + (h * a32) * k2;
      rhs(b + 3 * h / 10, ytmp, k3);
      ytmp = y + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3;
      rhs(b + 4 * h / 5, ytmp, k4);
      ytmp = y + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 +
             (h * a54) * k4;
      rhs(b + 8 * h / 9, ytmp, k5);
      ytmp = y + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 +
             (h * a64) * k4 + (h * a65) * k5;
      rhs(b + h, ytmp, k6);
      ynew = y + (h * b1c) * k1 + (h * b3c) * k3 + (h * b4c) * k4 +
             (h * b5c) * k5 + (h * b6c) * k6;
      rhs(b + h, ynew, k7);
      stats.rhs_evaluations += 6;

      errv = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 +
             (h * e6) * k6 + (h * e7) * k7;
      const double err = detail::scaled_error_norm(errv, y, ynew, atol, rtol);

      if (std::isfinite(err) && err <= 1.0) {
        y = ynew;
        b += h;
        k1 = k7;  // FSAL
        ++stats.steps_accepted;
        stats.max_error_estimate = std::max(stats.max_error_estimate, err);
        stats.min_step = stats.min_step == 0.0 ? h : std::min(stats.min_step, h);
        stats.step_errors.push_back(err);
        const double grow =
            err <= 0.0 ? 5.0
                       : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h_try = h * grow;
      } else {
        ++stats.steps_rejected;
        const double shrink =
            std::isfinite(err)
                ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9)
                : 0.1;
        h_try = h * shrink;
      }
    }
    b = b1;  // land exactly on the grid point
    observer(static_cast<int>(seg + 1), b1, static_cast<const State&>(y));
  }
  return stats;
}

// Endpoint-only convenience wrapper.
template <class State, class Rhs>
State integrate_to(Rhs&& rhs, State y0, double b0, double b1,
                   const IntegratorConfig& cfg,
                   IntegrationStats* stats_out = nullptr) {
  std::vector<double> grid{b0};
  if (b1 > b0) grid.push_back(b1);
  State out = y0;
  IntegrationStats stats = integrate_grid(
      std::forward<Rhs>(rhs), std::move(y0), grid, cfg,
      [&out](int, double, const State& y) { out = y; });
  if (stats_out) *stats_out = stats;
  return out;
}

}  // namespace bracketflow
