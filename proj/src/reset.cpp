#include "purcell/reset.hpp"

#include <algorithm>
#include <cmath>

#include "purcell/constants.hpp"

namespace purcell {

namespace {
const std::complex<double> kI(0.0, 1.0);
} // namespace

QuantumSystem ResetSystemSpec::build_system() const {
  QuantumSystem sys;
  sys.subsystems.push_back({"qubit", qubit_levels, f_qubit, alpha_qubit, ""});
  sys.subsystems.push_back({"coupler", coupler_levels, f_park_below, alpha_coupler,
                            "coupler_freq"});
  sys.subsystems.push_back({"filter", filter_levels, f_filter, alpha_filter, ""});
  sys.couplings.push_back({0, 1, g_qc});
  sys.couplings.push_back({1, 2, g_cf});
  sys.collapse.push_back({2, kappa_f});
  return sys;
}

double ResetProtocol::qc_duration() const {
  if (std::holds_alternative<SquareStage>(qc_stage))
    return std::get<SquareStage>(qc_stage).duration;
  return std::get<AdiabaticSpec>(qc_stage).tau;
}

double ResetProtocol::cf_duration() const {
  if (std::holds_alternative<SquareStage>(cf_stage))
    return std::get<SquareStage>(cf_stage).duration;
  return std::get<RampStage>(cf_stage).duration;
}

namespace {

// Piecewise frequency program for one reset cycle.
std::vector<double> cycle_samples(const ResetScenario& sc, double dt, double& total) {
  const auto& p = sc.protocol;
  const auto& s = sc.system;
  const double park = p.operating_point == OperatingPoint::below ? s.f_park_below
                                                                 : s.f_park_above;
  struct Segment {
    double duration;
    std::function<double(double)> f;
  };
  std::vector<Segment> segs;
  segs.push_back({p.lead_time, [park](double) { return park; }});
  if (p.operating_point == OperatingPoint::above) {
    // start the sweep from below the qubit so it crosses only once upward
    segs.push_back({3e-9, [&s](double) { return s.f_park_below; }});
  }
  if (std::holds_alternative<SquareStage>(p.qc_stage)) {
    const auto& st = std::get<SquareStage>(p.qc_stage);
    const double f = st.frequency > 0 ? st.frequency : s.f_qubit;
    segs.push_back({st.duration, [f](double) { return f; }});
  } else {
    const auto& spec = std::get<AdiabaticSpec>(p.qc_stage);
    segs.push_back({spec.tau, [&spec](double t) {
                      return spec.f_center + adiabatic_detuning_at(spec, t);
                    }});
  }
  if (std::holds_alternative<SquareStage>(p.cf_stage)) {
    const auto& st = std::get<SquareStage>(p.cf_stage);
    const double f = st.frequency > 0 ? st.frequency : s.f_filter;
    segs.push_back({st.duration, [f](double) { return f; }});
  } else {
    const auto& st = std::get<RampStage>(p.cf_stage);
    const double f0 = s.f_filter + st.f_start;
    const double slope = (st.f_end - st.f_start) / st.duration;
    segs.push_back({st.duration, [f0, slope](double t) { return f0 + slope * t; }});
  }
  segs.push_back({p.settle_time, [park](double) { return park; }});

  total = 0;
  for (const auto& seg : segs) total += seg.duration;
  const auto n = static_cast<std::size_t>(std::ceil(total / dt)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = i * dt;
    double val = segs.back().f(segs.back().duration);
    for (const auto& seg : segs) {
      if (t <= seg.duration) {
        val = seg.f(t);
        break;
      }
      t -= seg.duration;
    }
    v[i] = val;
  }
  return v;
}

ComplexMatrix qubit_rotation(const QuantumSystem& sys, int lower, double fraction) {
  const int nq = sys.subsystems[0].levels;
  ComplexMatrix u3 = ComplexMatrix::Identity(nq, nq);
  if (lower + 1 < nq && fraction != 0) {
    const double th = fraction * (kTwoPi / 2.0) / 2.0;  // fraction * pi / 2
    u3(lower, lower) = std::cos(th);
    u3(lower + 1, lower + 1) = std::cos(th);
    u3(lower, lower + 1) = -kI * std::sin(th);
    u3(lower + 1, lower) = -kI * std::sin(th);
  }
  const int rest = sys.dimension() / nq;
  ComplexMatrix u = ComplexMatrix::Zero(sys.dimension(), sys.dimension());
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j)
      u.block(i * rest, j * rest, rest, rest) =
          u3(i, j) * ComplexMatrix::Identity(rest, rest);
  return u;
}

// Eigenbasis of the parked configuration, columns matched to bare labels.
// Slow pulses prepare, and dispersive readout measures, these dressed states
// rather than the bare product states.
ComplexMatrix dressing_transform(const QuantumSystem& sys, double f_park) {
  std::vector<double> freqs;
  for (const auto& s : sys.subsystems) freqs.push_back(s.frequency);
  freqs[1] = f_park;  // coupler parked
  QuantumSystem bare = sys;
  for (auto& s : bare.subsystems) s.control.clear();
  const ComplexMatrix h = build_composite_hamiltonian(bare, freqs);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  const ComplexMatrix& vecs = solver.eigenvectors();
  const int d = sys.dimension();
  ComplexMatrix v = ComplexMatrix::Zero(d, d);
  std::vector<bool> used(d, false);
  for (int b = 0; b < d; ++b) {
    int best = -1;
    double best_w = -1;
    for (int k = 0; k < d; ++k) {
      if (used[k]) continue;
      const double w = std::norm(vecs(b, k));
      if (w > best_w) {
        best_w = w;
        best = k;
      }
    }
    used[best] = true;
    const std::complex<double> phase = vecs(b, best) / std::abs(vecs(b, best));
    v.col(b) = vecs.col(best) / phase;
  }
  return v;
}

ComplexMatrix prepare(const QuantumSystem& sys, const ComplexMatrix& rho,
                      const InitialState& init, const ComplexMatrix& dress) {
  ComplexMatrix out = rho;
  if (init.a01 != 0) {
    const ComplexMatrix u = dress * qubit_rotation(sys, 0, init.a01) * dress.adjoint();
    out = u * out * u.adjoint();
  }
  if (init.a12 != 0 && sys.subsystems[0].levels > 2) {
    const ComplexMatrix u = dress * qubit_rotation(sys, 1, init.a12) * dress.adjoint();
    out = u * out * u.adjoint();
  }
  return out;
}

// Dissipation-only map over the pad interval between cycles.
ComplexMatrix pad_decay(const QuantumSystem& sys, const ComplexMatrix& rho,
                        double pad_time) {
  if (pad_time <= 0) return rho;
  QuantumSystem free_sys = sys;
  free_sys.couplings.clear();
  for (auto& s : free_sys.subsystems) {
    s.frequency = 0;
    s.anharmonicity = 0;
    s.control.clear();
  }
  EvolveOptions opts;
  opts.frame_frequency = 0.0;
  const auto res = evolve(free_sys, {}, rho, {0.0, pad_time}, opts);
  return res.final_state;
}

double park_frequency(const ResetScenario& sc) {
  return sc.protocol.operating_point == OperatingPoint::below
             ? sc.system.f_park_below
             : sc.system.f_park_above;
}

// populations read out in the dressed basis of the parked configuration
std::vector<double> dressed_qubit_populations(const QuantumSystem& sys,
                                              const ComplexMatrix& rho,
                                              const ComplexMatrix& dress) {
  const ComplexMatrix rho_d = dress.adjoint() * rho * dress;
  return subsystem_level_populations(sys, rho_d, 0);
}

double dressed_excited(const QuantumSystem& sys, const ComplexMatrix& rho,
                       const ComplexMatrix& dress, int s) {
  const ComplexMatrix rho_d = dress.adjoint() * rho * dress;
  return subsystem_excited_probability(sys, rho_d, s);
}

struct CycleResult {
  ComplexMatrix rho;
  std::vector<double> times;
  std::vector<double> filter_trace;
};

CycleResult run_cycle(const ResetScenario& sc, const QuantumSystem& sys,
                      const ComplexMatrix& rho0, const Waveform& traj,
                      bool record_trace) {
  std::map<std::string, Waveform> controls;
  controls.emplace("coupler_freq", traj);

  const double total = traj.t_end();
  std::vector<double> grid;
  if (record_trace) {
    const double step = 1e-9;
    for (double t = 0; t < total; t += step) grid.push_back(t);
    grid.push_back(total);
  } else {
    grid = {0.0, total};
  }

  EvolveOptions opts;
  opts.rtol = 1e-8;
  opts.atol = 1e-10;
  opts.max_step = 10.0 * traj.dt;
  // midway frame halves the fastest rotating-phase rate
  opts.frame_frequency = 0.5 * (sc.system.f_qubit + sc.system.f_filter);
  const auto res = evolve(sys, controls, rho0, grid, opts);

  CycleResult out;
  out.rho = res.final_state;
  if (record_trace) {
    out.times = res.times;
    out.filter_trace = res.populations[2];
  }
  return out;
}

} // namespace

Waveform build_coupler_trajectory(const ResetScenario& sc, double extra_fwhm) {
  const double dt = sc.protocol.dt;
  double total = 0;
  auto samples = cycle_samples(sc, dt, total);
  Waveform freq(0.0, dt, std::move(samples), Channel::coupler_z);

  const double fwhm_protocol = sc.protocol.kernel_fwhm;
  if (fwhm_protocol <= 0 && extra_fwhm <= 0) return freq;

  // smoothing acts on the physical Z drive, not on the frequency program
  Waveform z = compile_detuning_to_z(freq, 0.0, sc.system.coupler,
                                     FluxBranch::positive);
  if (fwhm_protocol > 0) z = gaussian_convolve(z, fwhm_protocol);
  if (extra_fwhm > 0) z = gaussian_convolve(z, extra_fwhm);
  return z_to_frequency(z, sc.system.coupler);
}

ResetOutcome simulate_reset_cycle(const ResetScenario& sc, const InitialState& init) {
  const QuantumSystem sys = sc.system.build_system();
  const Waveform traj = build_coupler_trajectory(sc);
  const ComplexMatrix dress = dressing_transform(sys, park_frequency(sc));

  ComplexMatrix rho = basis_state(sys, std::vector<int>(sys.subsystems.size(), 0));
  rho = prepare(sys, rho, init, dress);

  ResetOutcome out;
  const int reps = std::max(1, sc.protocol.repetitions);
  for (int cycle = 0; cycle < reps; ++cycle) {
    const bool record = cycle == reps - 1;
    auto cr = run_cycle(sc, sys, rho, traj, record);
    rho = std::move(cr.rho);
    out.per_cycle_qubit_p0.push_back(dressed_qubit_populations(sys, rho, dress)[0]);
    if (record) {
      out.filter_trace_times = std::move(cr.times);
      out.filter_trace = std::move(cr.filter_trace);
    }
    if (cycle + 1 < reps) rho = pad_decay(sys, rho, sc.protocol.pad_time);
  }
  out.residual = 1.0 - out.per_cycle_qubit_p0.back();
  out.coupler_residual = dressed_excited(sys, rho, dress, 1);
  return out;
}

std::vector<ResetOutcome> unconditional_sweep(const ResetScenario& sc,
                                              const std::vector<double>& a_grid) {
  std::vector<ResetOutcome> out;
  out.reserve(a_grid.size());
  for (double a : a_grid) {
    if (a < 0 || a > 1) throw ResetError("pulse fraction A must lie in [0, 1]");
    out.push_back(simulate_reset_cycle(sc, InitialState{1.0, a}));
  }
  return out;
}

std::vector<double> repeated_prepare_reset(const ResetScenario& sc, int m_rounds,
                                           int n_cycles, bool carry_filter_state,
                                           const InitialState& init) {
  if (m_rounds < 1 || n_cycles < 1)
    throw ResetError("rounds and cycles must be at least 1");
  const QuantumSystem sys = sc.system.build_system();
  const Waveform traj = build_coupler_trajectory(sc);
  const ComplexMatrix dress = dressing_transform(sys, park_frequency(sc));
  const ComplexMatrix vacuum =
      basis_state(sys, std::vector<int>(sys.subsystems.size(), 0));

  std::vector<double> residuals;
  residuals.reserve(m_rounds);
  ComplexMatrix rho = vacuum;
  for (int round = 0; round < m_rounds; ++round) {
    if (!carry_filter_state) rho = vacuum;
    rho = prepare(sys, rho, init, dress);
    for (int c = 0; c < n_cycles; ++c) {
      rho = run_cycle(sc, sys, rho, traj, false).rho;
      // free filter decay happens during the next state preparation; the
      // carry flag freezes it to expose error accumulation
      if (!carry_filter_state && c + 1 < n_cycles)
        rho = pad_decay(sys, rho, sc.protocol.pad_time);
    }
    residuals.push_back(1.0 - dressed_qubit_populations(sys, rho, dress)[0]);
  }
  return residuals;
}

std::vector<DurationScanPoint> swap_duration_scan(const ResetScenario& sc,
                                                  const std::vector<double>& cf_durations,
                                                  int rounds) {
  std::vector<DurationScanPoint> out;
  for (double tau : cf_durations) {
    if (!(tau > 0)) throw ResetError("cf swap duration must be positive");
    ResetScenario s = sc;
    if (std::holds_alternative<SquareStage>(s.protocol.cf_stage))
      std::get<SquareStage>(s.protocol.cf_stage).duration = tau;
    else
      std::get<RampStage>(s.protocol.cf_stage).duration = tau;
    const auto residuals = repeated_prepare_reset(s, rounds, 1, true);
    out.push_back({tau, residuals.back()});
  }
  return out;
}

std::vector<LzsPoint> lzs_robustness(const ResetScenario& sc,
                                     const std::vector<double>& kernel_fwhms,
                                     OperatingPoint op) {
  ResetScenario s = sc;
  s.protocol.operating_point = op;
  const QuantumSystem sys = s.system.build_system();
  const ComplexMatrix dress = dressing_transform(sys, park_frequency(s));
  std::vector<LzsPoint> out;
  for (double fwhm : kernel_fwhms) {
    if (fwhm > 0 && fwhm < 2.0 * s.protocol.dt)
      throw ResetError("kernel FWHM not resolvable at the trajectory sampling");
    const Waveform traj = build_coupler_trajectory(s, fwhm);
    ComplexMatrix rho = basis_state(sys, std::vector<int>(sys.subsystems.size(), 0));
    rho = prepare(sys, rho, InitialState{1.0, 0.0}, dress);
    rho = run_cycle(s, sys, rho, traj, false).rho;
    out.push_back({fwhm, 1.0 - dressed_qubit_populations(sys, rho, dress)[0]});
  }
  return out;
}

MultiCouplerResult multi_coupler_reset(int n_couplers,
                                       const std::vector<double>& detunings,
                                       double g_cf, double kappa_f,
                                       const std::vector<int>& initial,
                                       double t_final, int n_times,
                                       int filter_levels) {
  if (n_couplers < 1) throw ResetError("need at least one coupler");
  if (static_cast<int>(detunings.size()) != n_couplers ||
      static_cast<int>(initial.size()) != n_couplers)
    throw ResetError("detunings and initial state must list one entry per coupler");

  int n_exc = 0;
  for (int b : initial) n_exc += b;
  if (filter_levels <= 0) filter_levels = std::max(3, n_exc + 2);

  QuantumSystem sys;
  for (int i = 0; i < n_couplers; ++i)
    sys.subsystems.push_back({"coupler" + std::to_string(i + 1), 2, detunings[i], 0.0, ""});
  sys.subsystems.push_back({"filter", filter_levels, 0.0, 0.0, ""});
  for (int i = 0; i < n_couplers; ++i)
    sys.couplings.push_back({i, n_couplers, g_cf});
  sys.collapse.push_back({n_couplers, kappa_f});
  sys.validate();

  std::vector<int> levels(initial.begin(), initial.end());
  levels.push_back(0);
  const ComplexMatrix rho0 = basis_state(sys, levels);

  std::vector<double> grid(n_times);
  for (int i = 0; i < n_times; ++i) grid[i] = t_final * i / (n_times - 1.0);

  EvolveOptions opts;
  opts.frame_frequency = 0.0;  // already written as detunings from the filter
  const auto res = evolve(sys, {}, rho0, grid, opts);

  MultiCouplerResult out;
  out.times = res.times;
  for (int i = 0; i < n_couplers; ++i) out.coupler_excitation.push_back(res.populations[i]);

  // plateau: late-time slope below 1e4 /s while the residual stays above 1%
  const int tail = std::max(2, n_times / 5);
  for (int i = 0; i < n_couplers; ++i) {
    const auto& exc = out.coupler_excitation[i];
    const double r_end = exc.back();
    const double r_prev = exc[exc.size() - tail];
    const double dtspan = out.times.back() - out.times[out.times.size() - tail];
    const double slope = std::abs(r_end - r_prev) / dtspan;
    out.plateau.push_back(slope < 1e4 && r_end > 1e-2);
  }
  return out;
}

} // namespace purcell
