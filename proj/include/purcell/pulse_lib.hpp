#pragma once

#include "purcell/circuit_model.hpp"
#include "purcell/waveform.hpp"

namespace purcell {

// Detuning trajectory that sweeps slowly through an avoided crossing and
// fast far away from it. All frequencies are ordinary Hz; tau in seconds.
struct AdiabaticSpec {
  double f0 = 0;        // start detuning, Hz
  double f_tau = 0;     // end detuning, Hz
  double tau = 0;       // s
  double g = 0;         // coupling the sweep pacing is designed for, Hz
  double f_center = 0;  // Hz, center frequency the detuning is relative to
  bool two_photon = false;
  double omega_c_offset = 0;  // Hz, anticrossing offset used when two_photon

  void validate() const;
};

struct AdiabaticCoefficients {
  double beta = 0;   // dimensionless sweep-rate prefactor
  double delta = 0;  // dimensionless integration constant, |delta| < 1/4
};

AdiabaticCoefficients adiabatic_coefficients(const AdiabaticSpec& spec);

// Detuning in Hz at time t for the given spec.
double adiabatic_detuning_at(const AdiabaticSpec& spec, double t);

Waveform adiabatic_detuning_waveform(const AdiabaticSpec& spec, int n_samples,
                                     Channel channel = Channel::coupler_z);

Waveform square_pulse(double amplitude, double duration, double dt,
                      Channel channel = Channel::coupler_z);
Waveform ramp_pulse(double start_amp, double slope, double duration, double dt,
                    Channel channel = Channel::coupler_z);

// Discrete convolution with a unit-DC-gain Gaussian kernel (truncated at
// 4 sigma). Edges are padded with the boundary values; output keeps the grid.
Waveform gaussian_convolve(const Waveform& w, double fwhm);

// Smoothed square readout envelope with a truncated-Gaussian ring-up segment
// superimposed on the first ring_len seconds.
Waveform ringup_readout_envelope(double total_len, double ring_len,
                                 double ring_amp, double flat_amp, double dt);

// Per-sample application of the coupler flux map to a detuning trajectory:
// omega_c(t) = f_center + w(t), z(t) = z(omega_c(t)).
Waveform compile_detuning_to_z(const Waveform& w, double f_center,
                               const CouplerParams& params, FluxBranch branch);

// Inverse of compile_detuning_to_z: maps a Z waveform back to the coupler
// frequency trajectory (absolute Hz, not detuning).
Waveform z_to_frequency(const Waveform& z, const CouplerParams& params);

} // namespace purcell
