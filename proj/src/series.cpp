#include "bracketflow/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "bracketflow/format.hpp"

namespace bracketflow {

namespace {

// Above this natural log a linear double is within a step of overflow.
constexpr double kLogSwitch = 700.0;

void require_k_positive(int k, const char* who) {
  if (k < 1)
    throw std::invalid_argument(std::string(who) +
                                ": k must be >= 1 (the zeroth term is 1 by "
                                "convention and carries no factorial)");
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double SeriesTable::coefficient(int k) const {
  if (!has(k))
    throw std::out_of_range("SeriesTable::coefficient: k outside table");
  const double stored = values[static_cast<std::size_t>(k - k_begin)];
  if (log_scale) return std::exp(stored - damping_exponent);
  return damping_exponent == 0.0 ? stored
                                 : stored * std::exp(-damping_exponent);
}

double SeriesTable::log_coefficient(int k) const {
  if (!has(k))
    throw std::out_of_range("SeriesTable::log_coefficient: k outside table");
  const double stored = values[static_cast<std::size_t>(k - k_begin)];
  if (log_scale) return stored - damping_exponent;
  return std::log(std::abs(stored)) - damping_exponent;
}

double jk_closed_form(double J, double B, int k) {
  require_k_positive(k, "jk_closed_form");
  // ((k-1)!)^2 / k! = (k-1)! / k, interleaved with the base powers so
  // moderate k stays far from the overflow threshold mid-product.
  const double base = J * J * std::abs(B);
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) {
    acc *= base;
    if (i < k) acc *= static_cast<double>(i);
  }
  return acc / static_cast<double>(k);
}

double jk_closed_form_log(double J, double B, int k) {
  require_k_positive(k, "jk_closed_form_log");
  if (J == 0.0 || B == 0.0)
    throw std::invalid_argument(
        "jk_closed_form_log: value is zero, log undefined");
  const double lbase = std::log(J * J * std::abs(B));
  return static_cast<double>(k) * lbase + std::lgamma(static_cast<double>(k)) -
         std::log(static_cast<double>(k));
}

SeriesTable jk_recursive(double J, double B, int k_max, JkConvention conv) {
  if (k_max < 1) throw std::invalid_argument("jk_recursive: k_max must be >= 1");
  const double base = J * J * std::abs(B);
  const double lbase = std::log(base);  // -inf when the base vanishes

  std::vector<double> lin(static_cast<std::size_t>(k_max) + 1);
  std::vector<double> lg(static_cast<std::size_t>(k_max) + 1);
  lin[0] = 1.0;
  lg[0] = 0.0;
  if (k_max >= 1) {
    // k = 0 -> 1: the literal k^2 rule annihilates the step, so KSquared
    // seeds from the closed form; MaxK1Squared promotes the factor to 1.
    lin[1] = conv == JkConvention::KSquared ? jk_closed_form(J, B, 1)
                                            : lin[0] * base * 1.0 / 1.0;
    lg[1] = lbase;
  }
  for (int k = 1; k < k_max; ++k) {
    const double kk = static_cast<double>(k);
    lin[static_cast<std::size_t>(k) + 1] =
        lin[static_cast<std::size_t>(k)] * base * kk * kk / (kk + 1.0);
    lg[static_cast<std::size_t>(k) + 1] =
        lg[static_cast<std::size_t>(k)] + lbase + 2.0 * std::log(kk) -
        std::log(kk + 1.0);
  }

  SeriesTable table;
  table.name = "jk";
  table.params = {{"J", J},
                  {"B", B},
                  {"convention", conv == JkConvention::KSquared ? 0.0 : 1.0}};
  table.k_begin = 0;
  const bool needs_log =
      *std::max_element(lg.begin(), lg.end()) > kLogSwitch;
  table.log_scale = needs_log;
  table.values = needs_log ? std::move(lg) : std::move(lin);
  return table;
}

double delta_tilde_closed_form(double epsilon, double q, double J, double B,
                               int k) {
  require_k_positive(k, "delta_tilde_closed_form");
  return std::pow(epsilon * q * J * J * B, k) / static_cast<double>(k);
}

SeriesTable delta_tilde_table(double epsilon, double q, double J, double B,
                              int k_max) {
  if (k_max < 1)
    throw std::invalid_argument("delta_tilde_table: k_max must be >= 1");
  SeriesTable table;
  table.name = "delta_tilde";
  table.params = {{"epsilon", epsilon}, {"q", q}, {"J", J}, {"B", B}};
  table.k_begin = 1;
  for (int k = 1; k <= k_max; ++k)
    table.values.push_back(delta_tilde_closed_form(epsilon, q, J, B, k));
  return table;
}

SeriesTable delta_recursive(double epsilon, double q, double J,
                            const std::vector<double>& B_grid, int k_max,
                            const IntegratorConfig& cfg) {
  if (k_max < 1)
    throw std::invalid_argument("delta_recursive: k_max must be >= 1");
  if (B_grid.empty() || B_grid.front() != 0.0)
    throw std::invalid_argument(
        "delta_recursive: grid must start at B = 0 (all terms vanish there)");

  const double drive = epsilon * q * J * J;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(k_max);
  const auto rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
    dv(0) = drive;  // the k = 1 term's exact slope seeds the cascade
    for (int i = 1; i < v.size(); ++i)
      dv(i) = drive * static_cast<double>(i) * v(i - 1);
  };
  integrate_grid(rhs, y, B_grid, cfg,
                 [&](std::size_t, double, const Eigen::VectorXd& v) { y = v; });

  for (int i = 0; i < y.size(); ++i)
    if (!std::isfinite(y(i)))
      throw std::overflow_error("delta_recursive: term k = " +
                                std::to_string(i + 1) +
                                " left double range before B_grid end");

  SeriesTable table;
  table.name = "delta_tilde";
  table.params = {
      {"epsilon", epsilon}, {"q", q}, {"J", J}, {"B", B_grid.back()}};
  table.k_begin = 1;
  table.values.assign(y.data(), y.data() + y.size());
  return table;
}

SeriesTable damp(SeriesTable table, double exponent) {
  table.damping_exponent += exponent;
  return table;
}

SeriesTable undamp(SeriesTable table) {
  table.damping_exponent = 0.0;
  return table;
}

RadiusEstimate radius_estimate(const SeriesTable& table) {
  // Validity per entry: a term that is zero (or a non-finite log) breaks
  // the ratio chain; consecutive valid pairs supply the ratios.
  const int n = static_cast<int>(table.values.size());
  std::vector<char> ok(static_cast<std::size_t>(n));
  int nonzero = 0;
  for (int i = 0; i < n; ++i) {
    const double s = table.values[static_cast<std::size_t>(i)];
    ok[static_cast<std::size_t>(i)] =
        table.log_scale ? std::isfinite(s) : (s != 0.0 && std::isfinite(s));
    nonzero += ok[static_cast<std::size_t>(i)];
  }
  if (nonzero < 10)
    throw std::invalid_argument(
        "radius_estimate: need at least 10 nonzero finite coefficients");

  // rho_k = c_k / c_{k+1}; the shared damping factor cancels.
  std::vector<int> ks;
  std::vector<double> rho;
  for (int i = 0; i + 1 < n; ++i) {
    if (!ok[static_cast<std::size_t>(i)] || !ok[static_cast<std::size_t>(i + 1)])
      continue;
    const double a = table.values[static_cast<std::size_t>(i)];
    const double b = table.values[static_cast<std::size_t>(i + 1)];
    ks.push_back(table.k_begin + i);
    rho.push_back(table.log_scale ? std::exp(a - b) : a / b);
  }

  // Richardson on rho_k = L + a/k: k rho_k - (k-1) rho_{k-1} recovers L
  // exactly, indexed by the absolute series k.
  std::vector<int> rks;
  std::vector<double> rich;
  for (std::size_t i = 1; i < rho.size(); ++i) {
    if (ks[i] != ks[i - 1] + 1) continue;
    const double k = static_cast<double>(ks[i]);
    rks.push_back(ks[i]);
    rich.push_back(k * rho[i] - (k - 1.0) * rho[i - 1]);
  }
  if (rich.empty())
    throw std::invalid_argument(
        "radius_estimate: no consecutive ratio pairs to extrapolate");

  const std::size_t lo = (3 * rich.size()) / 4;
  RadiusEstimate est;
  est.richardson.assign(rich.begin() + static_cast<std::ptrdiff_t>(lo),
                        rich.end());
  est.k_lo = rks[lo];
  est.k_hi = rks.back();
  est.ratio_median = median_of(
      std::vector<double>(rho.end() - static_cast<std::ptrdiff_t>(
                                          est.richardson.size()),
                          rho.end()));
  est.radius = std::max(0.0, median_of(est.richardson));
  return est;
}

std::string to_csv(const SeriesTable& table) {
  std::string out;
  if (table.log_scale) out += "# scale: log\n";
  out += table.log_scale ? "k,log_coefficient\n" : "k,coefficient\n";
  for (int k = table.k_begin; k <= table.k_end(); ++k) {
    const double v =
        table.log_scale ? table.log_coefficient(k) : table.coefficient(k);
    out += std::to_string(k) + "," + format_g17(v) + "\n";
  }
  return out;
}

std::string params_json(const SeriesTable& table) {
  nlohmann::json j;
  j["name"] = table.name;
  j["params"] = table.params;
  j["k_begin"] = table.k_begin;
  j["log_scale"] = table.log_scale;
  j["damping_exponent"] = table.damping_exponent;
  return j.dump(2) + "\n";
}

}  // namespace bracketflow
