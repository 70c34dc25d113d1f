#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "purcell/device_config.hpp"

namespace purcell {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// SQUID inductance vs flux. flux_ratio is Phi/Phi0 (dimensionless).
// L_s = Phi0 / (2 pi sqrt((Ic1-Ic2)^2 + 4 Ic1 Ic2 cos^2(pi Phi/Phi0)))
double squid_inductance(double flux_ratio, double ic1, double ic2);
double squid_inductance_wb(double flux_wb, double ic1, double ic2);

// Passband frequency of a half-wave cavity with a midpoint SQUID.
// omega = omega0 / (1 + L_s/(L_u l)), l = pi/(omega0_angular sqrt(Lu Cu)).
double filter_frequency(double flux_ratio, const FilterParams& p);

// kappa_eff = (4 g_rf^2 / kappa_f) / (1 + (2 delta_fr / kappa_f)^2)
double effective_linewidth(double g_rf, double delta_fr, double kappa_f);

// g = (C_ab / 2) sqrt(omega_a omega_b / (C_a C_b))
double coupling_from_capacitance(double c_ab, double omega_a, double omega_b,
                                 double c_a, double c_b);

// kappa_f = omega_f / Q_f with Q_f = C_f_out / (omega_f Z0 C_out^2),
// evaluated in angular units, returned in Hz.
double filter_linewidth(double c_out, double c_f_out, double omega_f, double z0);
double filter_quality_factor(double c_out, double c_f_out, double omega_f, double z0);

struct AdmittanceFit {
  double capacitance = 0;  // F
  double omega0 = 0;       // Hz, zero crossing
  double residual = 0;     // rms of fit residuals, S
  double stderr_c = 0;     // standard error of the capacitance estimate, F
};

// Fit Im Y11 = 2 C (omega - omega0) against samples of (frequency Hz, Im Y11 S).
AdmittanceFit capacitance_from_admittance(
    const std::vector<std::pair<double, double>>& samples);

struct DispersiveShifts {
  double chi01 = 0;
  double chi12 = 0;
  double chi23 = 0;
  double two_chi = 0;        // 2*chi01 - chi12 (0<->1 readout)
  double two_chi_prime = 0;  // chi01 + chi12 - chi23 (0<->2 readout)
};

// chi_{j,j+1} = (j+1) g^2 / (omega_q + j*alpha - omega_r).
// Denominators closer than dispersive_margin*g are rejected.
DispersiveShifts dispersive_shifts(double g_qr, double omega_q, double alpha,
                                   double omega_r, double dispersive_margin = 10.0);

// Qubit decay through resonator and filter:
// Gamma = [4 g_fr^2 kappa_f / (kappa_f^2 + 4 (omega_f - omega_q)^2)]
//         * g_qr^2 / (omega_r - omega_q)^2
double purcell_rate(double g_qr, double g_fr, double kappa_f, double omega_f,
                    double omega_q, double omega_r);

// Gamma_phi = kappa_eff (2chi)^2 / (kappa_eff^2 + (2chi)^2) * n_noise
double photon_noise_dephasing(double kappa_eff, double two_chi, double n_noise);

// First-order Kerr pull of the filter passband: -alpha_f * n
double kerr_shift(double n_photons, double alpha_f);

enum class FluxBranch { positive, negative };

// Transmon frequency vs Z amplitude, phi = k z + b:
// h f_c = sqrt(8 E_J E_C sqrt(cos^2 phi + d^2 sin^2 phi)) - E_C
double coupler_frequency_from_z(double z, const CouplerParams& p);
double coupler_z_from_frequency(double omega_c, const CouplerParams& p,
                                FluxBranch branch);
double coupler_freq_max(const CouplerParams& p);
double coupler_freq_min(const CouplerParams& p);

struct FilterTuningCurve {
  std::vector<double> flux;  // Phi/Phi0
  std::vector<double> freq;  // Hz
};

FilterTuningCurve filter_tuning_curve(const FilterParams& p, double flux_min,
                                      double flux_max, int n_points);

} // namespace purcell
