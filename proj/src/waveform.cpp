#include "purcell/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

namespace purcell {

std::string channel_name(Channel c) {
  switch (c) {
    case Channel::coupler_z: return "coupler_z";
    case Channel::filter_z: return "filter_z";
    case Channel::readout_drive: return "readout_drive";
    case Channel::qubit_xy: return "qubit_xy";
  }
  return "unknown";
}

Waveform::Waveform(double t0_, double dt_, std::vector<double> v, Channel ch)
    : t0(t0_), dt(dt_), values(std::move(v)), channel(ch) {
  validate();
}

void Waveform::validate() const {
  if (dt <= 0) throw WaveformError("waveform dt must be positive");
  if (values.empty()) throw WaveformError("waveform must hold at least one sample");
  for (double v : values) {
    if (!std::isfinite(v)) throw WaveformError("waveform sample is not finite");
  }
}

double Waveform::at(double t) const {
  const double x = (t - t0) / dt;
  if (x <= 0) return values.front();
  const auto n = values.size();
  if (x >= static_cast<double>(n - 1)) return values.back();
  const auto i = static_cast<std::size_t>(x);
  const double f = x - static_cast<double>(i);
  return values[i] * (1.0 - f) + values[i + 1] * f;
}

void write_csv(const Waveform& w, std::ostream& os) {
  os << "t," << channel_name(w.channel) << "\n";
  char buf[64];
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n",
                  w.t0 + w.dt * static_cast<double>(i), w.values[i]);
    os << buf;
  }
}

void write_csv_file(const Waveform& w, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw WaveformError("cannot open " + path);
  write_csv(w, os);
}

namespace {
constexpr char kMagic[4] = {'P', 'W', 'F', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
} // namespace

void write_binary_file(const Waveform& w, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw WaveformError("cannot open " + path);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(w.channel));
  put<std::uint64_t>(os, w.values.size());
  put<double>(os, w.t0);
  put<double>(os, w.dt);
  for (double v : w.values) put<double>(os, v);
}

Waveform read_binary_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw WaveformError("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw WaveformError("bad waveform magic in " + path);
  Waveform w;
  w.channel = static_cast<Channel>(get<std::uint32_t>(is));
  const auto n = get<std::uint64_t>(is);
  w.t0 = get<double>(is);
  w.dt = get<double>(is);
  w.values.resize(n);
  for (auto& v : w.values) v = get<double>(is);
  if (!is) throw WaveformError("truncated waveform file " + path);
  w.validate();
  return w;
}

} // namespace purcell
