#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace purcell {

enum class Channel : std::uint32_t {
  coupler_z = 0,
  filter_z = 1,
  readout_drive = 2,
  qubit_xy = 3,
};

std::string channel_name(Channel c);

struct WaveformError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniformly sampled real-valued control trajectory.
struct Waveform {
  double t0 = 0.0;   // s
  double dt = 1e-10; // s
  std::vector<double> values;
  Channel channel = Channel::coupler_z;

  Waveform() = default;
  Waveform(double t0_, double dt_, std::vector<double> v, Channel ch);

  std::size_t size() const { return values.size(); }
  double duration() const { return dt * static_cast<double>(values.size() > 0 ? values.size() - 1 : 0); }
  double t_end() const { return t0 + duration(); }

  // piecewise-linear interpolation, clamped to end values outside the grid
  double at(double t) const;

  void validate() const;
};

void write_csv(const Waveform& w, std::ostream& os);
void write_csv_file(const Waveform& w, const std::string& path);

// Compact binary layout: magic "PWF1", u32 channel, u64 length,
// f64 t0, f64 dt, then length little-endian f64 samples.
void write_binary_file(const Waveform& w, const std::string& path);
Waveform read_binary_file(const std::string& path);

} // namespace purcell
