#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace purcell {

struct ReadoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 2-D Gaussian blob in the IQ plane with diagonal covariance.
struct IQCloud {
  std::array<double, 2> mean{0, 0};
  std::array<double, 2> sigma{1, 1};
  double weight = 1.0;
};

// Discrimination line: points x with dot(normal, x) = offset.
// State 0 is assigned to the side dot(normal, x) < offset.
struct ThresholdLine {
  std::array<double, 2> normal{1, 0};
  double offset = 0;
};

double snr(const IQCloud& c0, const IQCloud& c1);

// |sin 2theta| = chi kappa / (chi^2 + kappa^2/4)
double sin_two_theta(double chi, double kappa);

// sqrt(eta kappa n_bar t) * |sin 2theta|, proportionality constant 1
double snr_scaling(double kappa, double chi, double n_bar, double eta, double t);

// Gamma_meas / n_meas = 2 chi |sin 2theta|
double measurement_dephasing_per_photon(double two_chi, double kappa);

// epsilon_T1 = 1 - exp(-tau_m / T1)
double relaxation_error(double tau_m, double t1);

struct SeparationError {
  double eps0 = 0;  // P(classified 1 | prepared 0)
  double eps1 = 0;  // P(classified 0 | prepared 1)
};

SeparationError separation_error(const IQCloud& c0, const IQCloud& c1,
                                 const ThresholdLine& threshold);

ThresholdLine midpoint_threshold(const IQCloud& c0, const IQCloud& c1);

struct ThresholdResult {
  ThresholdLine threshold;
  double fidelity = 0;  // modeled average assignment fidelity at the optimum
};

// Maximize modeled average fidelity with the |1> distribution distorted by
// relaxation: a fraction eps_t1 of prepared |1> shots is replaced by a cloud
// at the |0> centroid.
ThresholdResult optimize_threshold(const IQCloud& c0, const IQCloud& c1,
                                   double eps_t1);

struct ErrorBudget {
  double readout_fidelity = 0;
  double state0_fidelity = 0;
  double state1_fidelity = 0;
  double separation_error = 0;
  double state_error = 0;
  double relaxation_bound = 0;

  static ErrorBudget from_state_fidelities(double f0, double f1);
  std::string to_json() const;
  void write_table(std::ostream& os) const;
};

ErrorBudget error_budget(const IQCloud& c0, const IQCloud& c1,
                         const ThresholdLine& threshold, double tau_m,
                         double t1, double prep_error);

} // namespace purcell
