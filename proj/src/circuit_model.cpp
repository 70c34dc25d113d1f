#include "purcell/circuit_model.hpp"

#include <cmath>

#include "purcell/constants.hpp"

namespace purcell {

double squid_inductance(double flux_ratio, double ic1, double ic2) {
  if (ic1 < 0 || ic2 < 0) throw ModelError("critical currents must be nonnegative");
  if (ic1 + ic2 <= 0) throw ModelError("undefined inductance: both critical currents are zero");
  const double c = std::cos(kTwoPi / 2.0 * flux_ratio);
  const double i_eff = std::sqrt((ic1 - ic2) * (ic1 - ic2) + 4.0 * ic1 * ic2 * c * c);
  return kPhi0 / (kTwoPi * i_eff);
}

double squid_inductance_wb(double flux_wb, double ic1, double ic2) {
  return squid_inductance(flux_wb / kPhi0, ic1, ic2);
}

double filter_frequency(double flux_ratio, const FilterParams& p) {
  const double omega0_ang = kTwoPi * p.omega0_bare;
  const double length = (kTwoPi / 2.0) / (omega0_ang * std::sqrt(p.lu * p.cu));
  const double ls = squid_inductance(flux_ratio, p.ic1, p.ic2);
  return p.omega0_bare / (1.0 + ls / (p.lu * length));
}

double effective_linewidth(double g_rf, double delta_fr, double kappa_f) {
  if (kappa_f <= 0) throw ModelError("kappa_f must be positive");
  const double r = 2.0 * delta_fr / kappa_f;
  return 4.0 * g_rf * g_rf / kappa_f / (1.0 + r * r);
}

double coupling_from_capacitance(double c_ab, double omega_a, double omega_b,
                                 double c_a, double c_b) {
  if (c_a <= 0 || c_b <= 0) throw ModelError("ground capacitances must be positive");
  return 0.5 * c_ab * std::sqrt(omega_a * omega_b / (c_a * c_b));
}

double filter_quality_factor(double c_out, double c_f_out, double omega_f, double z0) {
  if (c_out <= 0 || c_f_out <= 0 || omega_f <= 0 || z0 <= 0)
    throw ModelError("filter linewidth inputs must be positive");
  return c_f_out / (kTwoPi * omega_f * z0 * c_out * c_out);
}

double filter_linewidth(double c_out, double c_f_out, double omega_f, double z0) {
  return omega_f / filter_quality_factor(c_out, c_f_out, omega_f, z0);
}

AdmittanceFit capacitance_from_admittance(
    const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) throw ModelError("admittance fit needs at least two samples");
  const double n = static_cast<double>(samples.size());
  double sw = 0, sy = 0, sww = 0, swy = 0;
  for (const auto& [f, y] : samples) {
    const double w = kTwoPi * f;
    sw += w;
    sy += y;
    sww += w * w;
    swy += w * y;
  }
  const double denom = n * sww - sw * sw;
  if (denom <= 0 || !std::isfinite(denom) ||
      denom < 1e-12 * n * sww)
    throw ModelError("degenerate admittance fit: frequencies do not span a range");
  const double slope = (n * swy - sw * sy) / denom;
  const double intercept = (sy - slope * sw) / n;

  AdmittanceFit fit;
  fit.capacitance = slope / 2.0;
  fit.omega0 = -intercept / slope / kTwoPi;
  double ss = 0;
  for (const auto& [f, y] : samples) {
    const double r = y - (slope * kTwoPi * f + intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  if (samples.size() > 2) {
    const double sigma2 = ss / (n - 2.0);
    fit.stderr_c = std::sqrt(sigma2 / (sww - sw * sw / n)) / 2.0;
  }
  return fit;
}

DispersiveShifts dispersive_shifts(double g_qr, double omega_q, double alpha,
                                   double omega_r, double dispersive_margin) {
  const double g2 = g_qr * g_qr;
  DispersiveShifts s;
  const double d01 = omega_q - omega_r;
  const double d12 = omega_q + alpha - omega_r;
  const double d23 = omega_q + 2.0 * alpha - omega_r;
  const double margin = dispersive_margin * std::abs(g_qr);
  for (double d : {d01, d12, d23}) {
    if (std::abs(d) < margin)
      throw ModelError("dispersive-regime violation: transition within " +
                       std::to_string(dispersive_margin) + "g of the resonator");
  }
  s.chi01 = g2 / d01;
  s.chi12 = 2.0 * g2 / d12;
  s.chi23 = 3.0 * g2 / d23;
  s.two_chi = 2.0 * s.chi01 - s.chi12;
  s.two_chi_prime = s.chi01 + s.chi12 - s.chi23;
  return s;
}

double purcell_rate(double g_qr, double g_fr, double kappa_f, double omega_f,
                    double omega_q, double omega_r) {
  const double d_rq = omega_r - omega_q;
  if (d_rq == 0) throw ModelError("purcell rate undefined at omega_r = omega_q");
  const double keff = effective_linewidth(g_fr, omega_f - omega_q, kappa_f);
  return keff * g_qr * g_qr / (d_rq * d_rq);
}

double photon_noise_dephasing(double kappa_eff, double two_chi, double n_noise) {
  if (kappa_eff < 0 || n_noise < 0)
    throw ModelError("kappa_eff and n_noise must be nonnegative");
  const double denom = kappa_eff * kappa_eff + two_chi * two_chi;
  if (denom == 0) return 0;
  return kappa_eff * two_chi * two_chi / denom * n_noise;
}

double kerr_shift(double n_photons, double alpha_f) {
  if (n_photons < 0) throw ModelError("photon number must be nonnegative");
  return -alpha_f * n_photons;
}

double coupler_freq_max(const CouplerParams& p) {
  return std::sqrt(8.0 * p.ej * p.ec) - p.ec;
}

double coupler_freq_min(const CouplerParams& p) {
  return std::sqrt(8.0 * p.ej * p.ec * p.asymmetry_d) - p.ec;
}

double coupler_frequency_from_z(double z, const CouplerParams& p) {
  const double phi = p.flux_map_k * z + p.flux_map_b;
  const double c = std::cos(phi), s = std::sin(phi);
  const double u = std::sqrt(c * c + p.asymmetry_d * p.asymmetry_d * s * s);
  return std::sqrt(8.0 * p.ej * p.ec * u) - p.ec;
}

double coupler_z_from_frequency(double omega_c, const CouplerParams& p,
                                FluxBranch branch) {
  const double f_max = coupler_freq_max(p);
  const double f_min = coupler_freq_min(p);
  const double tol = 1e-9 * f_max;  // roundoff slack at the band edges
  if (omega_c > f_max + tol || omega_c < f_min - tol)
    throw ModelError("coupler frequency " + std::to_string(omega_c * 1e-9) +
                     " GHz outside reachable band [" + std::to_string(f_min * 1e-9) +
                     ", " + std::to_string(f_max * 1e-9) + "] GHz");
  const double e = omega_c + p.ec;
  const double num = std::pow(e, 4) / std::pow(8.0 * p.ej * p.ec, 2) - 1.0;
  const double den = p.asymmetry_d * p.asymmetry_d - 1.0;
  double arg = num / den;
  arg = std::clamp(arg, 0.0, 1.0);
  const double phi = std::asin(std::sqrt(arg));
  const double signed_phi = branch == FluxBranch::positive ? phi : -phi;
  return (signed_phi - p.flux_map_b) / p.flux_map_k;
}

FilterTuningCurve filter_tuning_curve(const FilterParams& p, double flux_min,
                                      double flux_max, int n_points) {
  if (n_points < 2) throw ModelError("tuning curve needs at least two points");
  FilterTuningCurve out;
  out.flux.reserve(n_points);
  out.freq.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double phi = flux_min + (flux_max - flux_min) * i / (n_points - 1.0);
    out.flux.push_back(phi);
    out.freq.push_back(filter_frequency(phi, p));
  }
  return out;
}

} // namespace purcell
