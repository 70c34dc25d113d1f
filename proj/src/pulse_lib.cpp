#include "purcell/pulse_lib.hpp"

#include <cmath>

#include "purcell/constants.hpp"

namespace purcell {

void AdiabaticSpec::validate() const {
  if (!(tau > 0)) throw WaveformError("adiabatic spec: tau must be positive");
  if (!(g > 0)) throw WaveformError("adiabatic spec: g must be positive");
  if (f0 == f_tau) throw WaveformError("adiabatic spec: f0 must differ from f_tau");
}

namespace {

// Effective angular parameters after the optional two-photon substitution
// g -> sqrt(2) g, Delta -> Delta - Omega_C.
struct EffectiveParams {
  double g_ang;
  double w0;      // shifted start detuning, rad/s
  double wt;      // shifted end detuning, rad/s
  double offset;  // rad/s added back to the output
};

EffectiveParams effective_params(const AdiabaticSpec& spec) {
  EffectiveParams e;
  const double factor = spec.two_photon ? std::sqrt(2.0) : 1.0;
  e.g_ang = kTwoPi * spec.g * factor;
  e.offset = spec.two_photon ? kTwoPi * spec.omega_c_offset : 0.0;
  e.w0 = kTwoPi * spec.f0 - e.offset;
  e.wt = kTwoPi * spec.f_tau - e.offset;
  return e;
}

} // namespace

AdiabaticCoefficients adiabatic_coefficients(const AdiabaticSpec& spec) {
  spec.validate();
  const auto e = effective_params(spec);
  AdiabaticCoefficients c;
  c.delta = -e.w0 / std::sqrt(16.0 * e.w0 * e.w0 + 64.0 * e.g_ang * e.g_ang);
  const double wt2 = e.wt * e.wt + 4.0 * e.g_ang * e.g_ang;
  c.beta = (-4.0 * c.delta * wt2 - e.wt * std::sqrt(wt2)) /
           (4.0 * e.g_ang * spec.tau * wt2);
  return c;
}

double adiabatic_detuning_at(const AdiabaticSpec& spec, double t) {
  const auto e = effective_params(spec);
  const auto c = adiabatic_coefficients(spec);
  const double s = c.beta * e.g_ang * t + c.delta;
  const double arg = 1.0 - 16.0 * s * s;
  if (!(arg > 0))
    throw WaveformError("adiabatic trajectory leaves its domain at t = " +
                        std::to_string(t * 1e9) + " ns");
  return (-8.0 * e.g_ang * s / std::sqrt(arg) + e.offset) / kTwoPi;
}

Waveform adiabatic_detuning_waveform(const AdiabaticSpec& spec, int n_samples,
                                     Channel channel) {
  spec.validate();
  if (n_samples < 2) throw WaveformError("adiabatic waveform needs >= 2 samples");
  const double dt = spec.tau / (n_samples - 1);
  std::vector<double> v(n_samples);
  for (int i = 0; i < n_samples; ++i) v[i] = adiabatic_detuning_at(spec, i * dt);
  // pin the analytically exact boundary values
  v.front() = spec.f0;
  v.back() = spec.f_tau;
  return Waveform(0.0, dt, std::move(v), channel);
}

Waveform square_pulse(double amplitude, double duration, double dt, Channel channel) {
  if (!(duration > 0)) throw WaveformError("square pulse duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;
  return Waveform(0.0, dt, std::vector<double>(n, amplitude), channel);
}

Waveform ramp_pulse(double start_amp, double slope, double duration, double dt,
                    Channel channel) {
  if (!(duration > 0)) throw WaveformError("ramp pulse duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start_amp + slope * (dt * i);
  return Waveform(0.0, dt, std::move(v), channel);
}

namespace {

std::vector<double> gaussian_kernel(double fwhm, double dt) {
  const double sigma = fwhm / std::sqrt(8.0 * std::log(2.0));
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma / dt));
  std::vector<double> k(2 * half + 1);
  double sum = 0;
  for (std::ptrdiff_t i = -half; i <= half; ++i) {
    const double t = i * dt;
    k[i + half] = std::exp(-0.5 * t * t / (sigma * sigma));
    sum += k[i + half];
  }
  for (auto& x : k) x /= sum;
  return k;
}

} // namespace

Waveform gaussian_convolve(const Waveform& w, double fwhm) {
  if (!(fwhm > 0)) throw WaveformError("kernel FWHM must be positive");
  if (fwhm < 2.0 * w.dt)
    throw WaveformError("under-resolved kernel: FWHM below two samples");
  const auto k = gaussian_kernel(fwhm, w.dt);
  const auto half = static_cast<std::ptrdiff_t>(k.size() / 2);
  const auto n = static_cast<std::ptrdiff_t>(w.values.size());
  std::vector<double> out(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0;
    for (std::ptrdiff_t j = -half; j <= half; ++j) {
      std::ptrdiff_t idx = i + j;
      if (idx < 0) idx = 0;
      if (idx >= n) idx = n - 1;
      acc += k[j + half] * w.values[idx];
    }
    out[i] = acc;
  }
  Waveform res = w;
  res.values = std::move(out);
  return res;
}

Waveform ringup_readout_envelope(double total_len, double ring_len,
                                 double ring_amp, double flat_amp, double dt) {
  if (ring_len > total_len)
    throw WaveformError("ring segment cannot exceed the total envelope length");
  Waveform sq = square_pulse(flat_amp, total_len, dt, Channel::readout_drive);
  constexpr double kEdgeFwhm = 10e-9;
  Waveform smooth = gaussian_convolve(sq, kEdgeFwhm);
  if (ring_len > 0 && ring_amp != 0) {
    constexpr double kRingFwhm = 75e-9;
    const double sigma = kRingFwhm / std::sqrt(8.0 * std::log(2.0));
    const double center = ring_len / 2.0;
    const auto n_ring = static_cast<std::size_t>(std::llround(ring_len / dt));
    for (std::size_t i = 0; i <= n_ring && i < smooth.values.size(); ++i) {
      const double t = i * dt - center;
      smooth.values[i] += ring_amp * std::exp(-0.5 * t * t / (sigma * sigma));
    }
  }
  return smooth;
}

Waveform compile_detuning_to_z(const Waveform& w, double f_center,
                               const CouplerParams& params, FluxBranch branch) {
  Waveform z = w;
  z.channel = Channel::coupler_z;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    try {
      z.values[i] = coupler_z_from_frequency(f_center + w.values[i], params, branch);
    } catch (const ModelError& e) {
      throw WaveformError("sample " + std::to_string(i) + ": " + e.what());
    }
  }
  return z;
}

Waveform z_to_frequency(const Waveform& z, const CouplerParams& params) {
  Waveform f = z;
  for (auto& v : f.values) v = coupler_frequency_from_z(v, params);
  return f;
}

} // namespace purcell
