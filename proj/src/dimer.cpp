#include "bracketflow/dimer.hpp"

#include <json.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bracketflow/format.hpp"
#include "bracketflow/locality.hpp"
#include "bracketflow/norms.hpp"

namespace bracketflow {

namespace {

struct LineFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const size_t n = x.size();
  if (n < 2) return f;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double ss_res = syy - sxy * sxy / sxx;
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

}  // namespace

CouplingMatrix build_dimer_h(double t, int n, Geometry geometry) {
  if (!std::isfinite(t)) throw std::invalid_argument("build_dimer_h: t not finite");
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("build_dimer_h: n must be even and >= 2");
  if (geometry == Geometry::ChainPeriodic && n < 4)
    throw std::invalid_argument("build_dimer_h: a ring needs n >= 4");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const int bonds = geometry == Geometry::ChainPeriodic ? n : n - 1;
  for (int i = 0; i < bonds; ++i) {
    const double val = i % 2 == 0 ? 1.0 + t : 1.0 - t;
    m(i, (i + 1) % n) = val;
    m((i + 1) % n, i) = val;
  }
  return CouplingMatrix(m, Symmetry::Symmetric);
}

Eigen::Vector2d block_hamiltonian(double t, double theta) {
  return {t, 2.0 * std::cos(theta)};
}

Eigen::Vector2d dimer_momentum_block(double t, double theta) {
  return {2.0 * t * std::sin(theta), 2.0 * std::cos(theta)};
}

// Restricted flow on a 2x2 block.  Let (s_w, s_z) be any pair of Hermitian
// involutions that anticommute, and write M = a s_w + b s_z,
// V = alpha s_w + beta s_z.  With P = s_w s_z and w = alpha b - a beta:
//   [V, M]      = (alpha b - a beta)(s_w s_z - s_z s_w) = 2 w P,
//   [P, s_w]    = -2 s_z,      [P, s_z] = 2 s_w,
//   [[V, M], M] = 2 w (a [P, s_w] + b [P, s_z]) = 4 w (b s_w - a s_z),
// so dM/dB = 4 [[V, M], M] closes on the plane as the pure rotation
//   a' = 16 w b,   b' = -16 w a,
// which conserves a^2 + b^2.  Only the involution algebra entered, so the
// same equations govern every such plane; the test suite certifies them
// against dense 2x2 matrix integration of the full double bracket.
BlockState block_flow(const BlockState& initial, const Eigen::Vector2d& v_block,
                      double B, const IntegratorConfig& cfg) {
  if (!(B >= 0.0)) throw std::invalid_argument("block_flow: B must be >= 0");
  const double alpha = v_block[0];
  const double beta = v_block[1];
  const auto rhs = [alpha, beta](double, const Eigen::Vector2d& y,
                                 Eigen::Vector2d& dy) {
    const double w = alpha * y[1] - y[0] * beta;
    dy[0] = 16.0 * w * y[1];
    dy[1] = -16.0 * w * y[0];
  };
  Eigen::Vector2d y(initial.a, initial.b);
  if (B > 0.0) y = integrate_to(rhs, y, 0.0, B, cfg);
  return {initial.theta, y[0], y[1]};
}

CouplingMatrix real_space_reconstruct(double t, int n, double B,
                                      int theta_grid_size,
                                      const IntegratorConfig& cfg) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("real_space_reconstruct: n must be even and >= 4");
  if (theta_grid_size != n)
    throw std::invalid_argument(
        "real_space_reconstruct: theta grid must have one point per site");
  if (!(B >= 0.0))
    throw std::invalid_argument("real_space_reconstruct: B must be >= 0");

  // Evolve one block per momentum pair (theta, theta + pi), theta = 2 pi p / n
  // for p < n/2, then extend to the full grid: viewing a pair from its second
  // member swaps the basis and conjugates by s_x, flipping both coefficients.
  //
  // The blocks at theta and pi - theta mirror each other, (a, b) -> (a, -b);
  // the flow respects the mirror, so only one representative is integrated
  // and its partner is filled by reflection.  This keeps the mirror exact in
  // floating point, which matters twice: it is what makes the transform below
  // real, and it pins the self-mirrored block at theta = pi/2 (present when
  // 4 | n) to b = 0 exactly, the fixed point that rounded trig would miss.
  const int half = n / 2;
  std::vector<double> a(n), b(n);
  for (int p = 0; 2 * p <= half; ++p) {
    const double theta = 2.0 * std::numbers::pi * p / n;
    const double s = std::sin(theta);
    const double c = 2 * p == half ? 0.0 : std::cos(theta);
    const BlockState out = block_flow({theta, 2.0 * t * s, 2.0 * c},
                                      {-2.0 * t * s, 2.0 * c}, B, cfg);
    a[p] = out.a;
    b[p] = out.b;
    const int m = half - p;
    if (m != p && m < half) {
      a[m] = out.a;
      b[m] = -out.b;
    }
  }
  for (int p = 0; p < half; ++p) {
    a[p + half] = -a[p];
    b[p + half] = -b[p];
  }

  // Entry (k, l) of sum_p [a_p s_w + b_p s_z] over the pair bases works out
  // to G(k-l) + i (-1)^k U(k-l) on odd k-l and 0 on even k-l, where G and U
  // are the inverse transforms below.  The mirror symmetries a(pi - theta) =
  // a(theta), b(pi - theta) = -b(theta) (preserved exactly by the block flow)
  // make G real and U imaginary, so the imaginary dust measures integration
  // error and is asserted small rather than silently discarded.
  using cd = std::complex<double>;
  std::vector<cd> omega(n);
  for (int j = 0; j < n; ++j) {
    const double ang = 2.0 * std::numbers::pi * j / n;
    omega[j] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cd> G(n, 0.0), U(n, 0.0);
  for (int d = 0; d < n; ++d) {
    cd g = 0.0, u = 0.0;
    for (int j = 0; j < n; ++j) {
      const cd w = omega[static_cast<int>((static_cast<long long>(j) * d) % n)];
      g += b[j] * w;
      u += a[j] * w;
    }
    G[d] = g / static_cast<double>(n);
    U[d] = u / static_cast<double>(n);
  }

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  double dust = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (((k - l) & 1) == 0) continue;
      const int d = ((k - l) % n + n) % n;
      const cd val = G[d] + cd(0.0, k % 2 == 0 ? 1.0 : -1.0) * U[d];
      m(k, l) = val.real();
      dust = std::max(dust, std::abs(val.imag()));
    }
  dust = std::max(dust, (m - m.transpose()).cwiseAbs().maxCoeff());
  if (dust > 1e-9)
    throw std::runtime_error("real_space_reconstruct: reality dust above 1e-9");
  m = 0.5 * (m + m.transpose()).eval();
  return CouplingMatrix(m, Symmetry::Symmetric);
}

double theta_star(double t, double B, const IntegratorConfig& cfg) {
  if (t == 0.0)
    throw std::invalid_argument("theta_star: undefined at t = 0");
  if (!(B >= 0.0)) throw std::invalid_argument("theta_star: B must be >= 0");
  // Signed equidistance gap: negative once the evolved block is closer to +v
  // (converged side), positive when closer to -v (stuck side).  The gap is
  // negative at theta = 0 (block starts on v) and positive at pi/2 (block
  // starts on -v, a fixed point), so bisection brackets a crossing.
  const auto gap = [&](double theta) {
    const Eigen::Vector2d h0 = dimer_momentum_block(t, theta);
    const Eigen::Vector2d v = dimer_momentum_block(-t, theta);
    const BlockState out = block_flow({theta, h0[0], h0[1]}, v, B, cfg);
    const Eigen::Vector2d y(out.a, out.b);
    return (y - v).norm() - (y + v).norm();
  };
  double lo = 0.0, hi = std::numbers::pi / 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

GrowthReport measure_growth(double t, int n, const std::vector<double>& B_list,
                            std::pair<double, double> fit_window,
                            const IntegratorConfig& cfg) {
  if (!(fit_window.first > 0.0) || !(fit_window.second > fit_window.first))
    throw std::invalid_argument("measure_growth: bad fit window");
  const auto lat = build_chain(n, Geometry::ChainPeriodic);

  GrowthReport rep;
  rep.b_values = B_list;
  for (const double B : B_list) {
    const CouplingMatrix h = real_space_reconstruct(t, n, B, n, cfg);
    const int rmax = lat.diameter() - 1;
    // The strength is non-increasing in r, so bisect for the first radius
    // inside the window instead of walking the whole profile, then collect
    // fit points rightward, doubling the stride every 32 points so wide
    // windows stay cheap.  The masked estimate can wiggle by roundoff around
    // the true profile; a short walk-back plus the running-min clamp during
    // collection keep the sampled points a non-increasing certified bound.
    std::vector<double> rs, logs;
    int r0 = 1;
    if (locality_upper(h, lat, 1.0) > fit_window.second) {
      int lo_r = 1, hi_r = rmax + 1;
      while (hi_r - lo_r > 1) {
        const int mid = lo_r + (hi_r - lo_r) / 2;
        (locality_upper(h, lat, mid) <= fit_window.second ? hi_r : lo_r) = mid;
      }
      r0 = hi_r;
      while (r0 > 1 && r0 - 1 >= hi_r - 4 &&
             locality_upper(h, lat, r0 - 1.0) <= fit_window.second)
        --r0;
    }
    double running = std::numeric_limits<double>::infinity();
    int stride = 1;
    for (int r = r0; r <= rmax; r += stride) {
      running = std::min(running, locality_upper(h, lat, r));
      if (running < fit_window.first) break;
      if (running <= fit_window.second) {
        rs.push_back(r);
        logs.push_back(std::log(running));
        if (rs.size() % 32 == 0) stride *= 2;
      }
    }
    const LineFit f = fit_line(rs, logs);
    if (rs.size() < 3)
      rep.status.push_back(rs.empty() ? FitStatus::BelowFloor
                                      : FitStatus::TooFewPoints);
    else if (!(f.slope < 0.0))
      rep.status.push_back(FitStatus::Degenerate);
    else
      rep.status.push_back(FitStatus::Ok);
    rep.xi.push_back(rep.status.back() == FitStatus::Ok ? -1.0 / f.slope : 0.0);
    rep.crossover.push_back(t == 0.0
                                ? std::numeric_limits<double>::quiet_NaN()
                                : theta_star(t, B, cfg));
  }

  std::vector<double> bs, logxi;
  for (size_t i = 0; i < rep.xi.size(); ++i)
    if (rep.status[i] == FitStatus::Ok) {
      bs.push_back(rep.b_values[i]);
      logxi.push_back(std::log(rep.xi[i]));
    }
  const LineFit f = fit_line(bs, logxi);
  rep.slope = f.slope;
  rep.intercept = f.intercept;
  rep.r_squared = f.r_squared;
  return rep;
}

std::string to_csv(const GrowthReport& rep) {
  std::string out = "B,xi,theta_star,abs_cos_theta_star\n";
  for (size_t i = 0; i < rep.b_values.size(); ++i)
    out += format_g17(rep.b_values[i]) + ',' + format_g17(rep.xi[i]) + ',' +
           format_g17(rep.crossover[i]) + ',' +
           format_g17(std::abs(std::cos(rep.crossover[i]))) + '\n';
  return out;
}

std::string summary_json(const GrowthReport& rep) {
  nlohmann::json j;
  j["slope"] = rep.slope;
  j["intercept"] = rep.intercept;
  j["r_squared"] = rep.r_squared;
  auto ok = nlohmann::json::array();
  for (const FitStatus s : rep.status) ok.push_back(s == FitStatus::Ok);
  j["fit_ok"] = ok;
  return j.dump(2);
}

}  // namespace bracketflow
