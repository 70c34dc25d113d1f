#include "purcell/readout.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace purcell {

namespace {

void check_cloud(const IQCloud& c) {
  if (!(c.sigma[0] > 0) || !(c.sigma[1] > 0))
    throw ReadoutError("cloud sigmas must be positive");
}

// standard deviation of the cloud along a unit direction (diagonal covariance)
double sigma_along(const IQCloud& c, const std::array<double, 2>& u) {
  return std::sqrt(u[0] * u[0] * c.sigma[0] * c.sigma[0] +
                   u[1] * u[1] * c.sigma[1] * c.sigma[1]);
}

std::array<double, 2> unit_between(const IQCloud& c0, const IQCloud& c1) {
  const double dx = c1.mean[0] - c0.mean[0];
  const double dy = c1.mean[1] - c0.mean[1];
  const double n = std::hypot(dx, dy);
  if (n == 0) return {1.0, 0.0};
  return {dx / n, dy / n};
}

double gauss_tail(double threshold, double mean, double sigma) {
  // P(X > threshold), X ~ N(mean, sigma)
  return 0.5 * std::erfc((threshold - mean) / (std::sqrt(2.0) * sigma));
}

} // namespace

double snr(const IQCloud& c0, const IQCloud& c1) {
  check_cloud(c0);
  check_cloud(c1);
  const auto u = unit_between(c0, c1);
  const double sep = std::hypot(c1.mean[0] - c0.mean[0], c1.mean[1] - c0.mean[1]);
  return 2.0 * sep / (sigma_along(c0, u) + sigma_along(c1, u));
}

double sin_two_theta(double chi, double kappa) {
  const double denom = chi * chi + kappa * kappa / 4.0;
  if (denom == 0) return 0;
  return std::abs(chi * kappa / denom);
}

double snr_scaling(double kappa, double chi, double n_bar, double eta, double t) {
  if (kappa < 0 || n_bar < 0 || eta < 0 || t < 0)
    throw ReadoutError("snr scaling inputs must be nonnegative");
  return std::sqrt(eta * kappa * n_bar * t) * sin_two_theta(chi, kappa);
}

double measurement_dephasing_per_photon(double two_chi, double kappa) {
  if (two_chi < 0 || kappa < 0)
    throw ReadoutError("dephasing inputs must be nonnegative");
  return two_chi * sin_two_theta(two_chi / 2.0, kappa);
}

double relaxation_error(double tau_m, double t1) {
  if (!(t1 > 0)) throw ReadoutError("T1 must be positive");
  return 1.0 - std::exp(-tau_m / t1);
}

SeparationError separation_error(const IQCloud& c0, const IQCloud& c1,
                                 const ThresholdLine& threshold) {
  check_cloud(c0);
  check_cloud(c1);
  const double nn = std::hypot(threshold.normal[0], threshold.normal[1]);
  if (nn == 0) throw ReadoutError("threshold normal must be nonzero");
  const std::array<double, 2> n{threshold.normal[0] / nn, threshold.normal[1] / nn};
  const double c = threshold.offset / nn;
  SeparationError e;
  const double m0 = n[0] * c0.mean[0] + n[1] * c0.mean[1];
  const double m1 = n[0] * c1.mean[0] + n[1] * c1.mean[1];
  // state 0 assigned on the dot(n,x) < c side
  e.eps0 = gauss_tail(c, m0, sigma_along(c0, n));
  e.eps1 = 1.0 - gauss_tail(c, m1, sigma_along(c1, n));
  return e;
}

ThresholdLine midpoint_threshold(const IQCloud& c0, const IQCloud& c1) {
  const auto u = unit_between(c0, c1);
  ThresholdLine t;
  t.normal = u;
  const std::array<double, 2> mid{(c0.mean[0] + c1.mean[0]) / 2.0,
                                  (c0.mean[1] + c1.mean[1]) / 2.0};
  t.offset = u[0] * mid[0] + u[1] * mid[1];
  return t;
}

ThresholdResult optimize_threshold(const IQCloud& c0, const IQCloud& c1,
                                   double eps_t1) {
  check_cloud(c0);
  check_cloud(c1);
  if (eps_t1 < 0 || eps_t1 > 1) throw ReadoutError("eps_t1 must be in [0, 1]");
  const auto u = unit_between(c0, c1);
  const double p0 = u[0] * c0.mean[0] + u[1] * c0.mean[1];
  const double p1 = u[0] * c1.mean[0] + u[1] * c1.mean[1];
  const double s0 = sigma_along(c0, u);
  const double s1 = sigma_along(c1, u);

  // average assignment fidelity with the decayed fraction sitting on cloud 0
  const auto fidelity = [&](double c) {
    const double f0 = 1.0 - gauss_tail(c, p0, s0);
    const double surv = gauss_tail(c, p1, s1);
    const double decayed = gauss_tail(c, p0, s0);
    const double f1 = (1.0 - eps_t1) * surv + eps_t1 * decayed;
    return (f0 + f1) / 2.0;
  };

  double lo = std::min(p0, p1) - 3.0 * std::max(s0, s1);
  double hi = std::max(p0, p1) + 3.0 * std::max(s0, s1);
  // coarse scan then golden-section refinement
  constexpr int kScan = 401;
  double best_c = lo, best_f = -1;
  for (int i = 0; i < kScan; ++i) {
    const double c = lo + (hi - lo) * i / (kScan - 1.0);
    const double f = fidelity(c);
    if (f > best_f) {
      best_f = f;
      best_c = c;
    }
  }
  double a = best_c - (hi - lo) / (kScan - 1.0);
  double b = best_c + (hi - lo) / (kScan - 1.0);
  constexpr double kGolden = 0.6180339887498949;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = fidelity(x1), f2 = fidelity(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (hi - lo); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = fidelity(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = fidelity(x1);
    }
  }
  const double c_opt = (a + b) / 2.0;

  ThresholdResult res;
  res.threshold.normal = u;
  res.threshold.offset = c_opt;
  res.fidelity = fidelity(c_opt);
  return res;
}

ErrorBudget ErrorBudget::from_state_fidelities(double f0, double f1) {
  ErrorBudget b;
  b.state0_fidelity = f0;
  b.state1_fidelity = f1;
  b.readout_fidelity = (f0 + f1) / 2.0;
  return b;
}

ErrorBudget error_budget(const IQCloud& c0, const IQCloud& c1,
                         const ThresholdLine& threshold, double tau_m,
                         double t1, double prep_error) {
  const auto sep = separation_error(c0, c1, threshold);
  const double eps_t1 = relaxation_error(tau_m, t1);

  ErrorBudget b;
  b.relaxation_bound = eps_t1;
  b.separation_error = (sep.eps0 + sep.eps1) / 2.0;
  // decayed |1> shots look like cloud 0 and are then classified as 0
  const double decayed_misclass = eps_t1 * (1.0 - sep.eps0);
  b.state_error = decayed_misclass + prep_error;
  b.state0_fidelity = 1.0 - sep.eps0;
  b.state1_fidelity = (1.0 - eps_t1) * (1.0 - sep.eps1) +
                      eps_t1 * sep.eps0 - prep_error;
  b.readout_fidelity = (b.state0_fidelity + b.state1_fidelity) / 2.0;
  return b;
}

std::string ErrorBudget::to_json() const {
  nlohmann::json j{{"readout_fidelity", readout_fidelity},
                   {"state0_fidelity", state0_fidelity},
                   {"state1_fidelity", state1_fidelity},
                   {"separation_error", separation_error},
                   {"state_error", state_error},
                   {"relaxation_bound", relaxation_bound}};
  return j.dump(2);
}

void ErrorBudget::write_table(std::ostream& os) const {
  char buf[96];
  const auto row = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%-22s %8.4f%%\n", name, 100.0 * v);
    os << buf;
  };
  row("readout fidelity", readout_fidelity);
  row("state |0> fidelity", state0_fidelity);
  row("state |1> fidelity", state1_fidelity);
  row("separation error", separation_error);
  row("state error", state_error);
  row("energy relaxation", relaxation_bound);
}

} // namespace purcell
