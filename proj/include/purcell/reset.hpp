#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "purcell/dynamics.hpp"
#include "purcell/pulse_lib.hpp"

namespace purcell {

struct ResetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tripartite qubit-coupler-filter model used by the reset protocols.
struct ResetSystemSpec {
  double f_qubit = 4.835e9;
  double alpha_qubit = -187.4e6;
  double alpha_coupler = -330e6;
  double f_filter = 7.0e9;
  double alpha_filter = -4.47e6;
  double kappa_f = 150e6;
  double g_qc = 55.5555555555e6;
  double g_cf = 20e6;
  int qubit_levels = 3;
  int coupler_levels = 3;
  int filter_levels = 4;
  double f_park_below = 4.0e9;  // coupler operating point below the qubit
  double f_park_above = 5.5e9;  // alternative operating point above
  CouplerParams coupler;        // flux map for Z-domain compilation

  QuantumSystem build_system() const;
};

struct SquareStage {
  double duration = 4.5e-9;
  double frequency = 0;  // Hz; 0 = qubit frequency (QC) / filter frequency (CF)
};

struct RampStage {
  double duration = 170e-9;
  double f_start = 0;  // Hz offsets relative to the filter frequency
  double f_end = 0;
};

enum class OperatingPoint { below, above };

struct ResetProtocol {
  std::variant<SquareStage, AdiabaticSpec> qc_stage = SquareStage{};
  std::variant<SquareStage, RampStage> cf_stage = SquareStage{70e-9, 0};
  double pad_time = 700e-9;
  double pre_time = 100e-9;
  OperatingPoint operating_point = OperatingPoint::below;
  int repetitions = 1;
  double dt = 0.05e-9;          // trajectory sample spacing
  double kernel_fwhm = 0;       // intrinsic control-line bandwidth kernel, s
  double lead_time = 4e-9;      // idle segment before the QC stage
  double settle_time = 15e-9;   // idle segment after the CF stage

  double qc_duration() const;
  double cf_duration() const;
};

struct ResetScenario {
  std::string name;
  ResetSystemSpec system;
  ResetProtocol protocol;
};

// State preparation: ideal rotations R01(a01*pi) then R12(a12*pi).
struct InitialState {
  double a01 = 1.0;
  double a12 = 0.0;
};

struct ResetOutcome {
  std::vector<double> per_cycle_qubit_p0;
  double residual = 0;          // final 1 - P0 of the qubit
  double coupler_residual = 0;  // final excited probability of the coupler
  std::vector<double> filter_trace_times;
  std::vector<double> filter_trace;  // filter excitation vs time
};

// Coupler frequency trajectory for one reset cycle (absolute Hz). When the
// protocol carries a smoothing kernel (or extra_fwhm > 0) the waveform is
// compiled to Z amplitude, convolved there, and mapped back.
Waveform build_coupler_trajectory(const ResetScenario& sc, double extra_fwhm = 0);

ResetOutcome simulate_reset_cycle(const ResetScenario& sc, const InitialState& init);

std::vector<ResetOutcome> unconditional_sweep(const ResetScenario& sc,
                                              const std::vector<double>& a_grid);

// m rounds of (prepare, reset protocol.repetitions cycles). With
// carry_filter_state the post-reset state is carried into the next round and
// the free decay during the pad interval is skipped; otherwise every round
// starts from vacuum.
std::vector<double> repeated_prepare_reset(const ResetScenario& sc, int m_rounds,
                                           int n_cycles, bool carry_filter_state,
                                           const InitialState& init = {});

struct DurationScanPoint {
  double tau_cf = 0;
  double residual = 0;
};

std::vector<DurationScanPoint> swap_duration_scan(const ResetScenario& sc,
                                                  const std::vector<double>& cf_durations,
                                                  int rounds = 10);

struct LzsPoint {
  double fwhm = 0;
  double residual = 0;
};

std::vector<LzsPoint> lzs_robustness(const ResetScenario& sc,
                                     const std::vector<double>& kernel_fwhms,
                                     OperatingPoint op);

struct MultiCouplerResult {
  std::vector<double> times;
  std::vector<std::vector<double>> coupler_excitation;  // [coupler][time]
  std::vector<bool> plateau;  // residual derivative below threshold while
                              // residual above floor
};

// n couplers exchanging with one lossy filter; frequencies are detunings from
// the filter. initial holds one excitation flag per coupler.
MultiCouplerResult multi_coupler_reset(int n_couplers,
                                       const std::vector<double>& detunings,
                                       double g_cf, double kappa_f,
                                       const std::vector<int>& initial,
                                       double t_final = 500e-9,
                                       int n_times = 201,
                                       int filter_levels = 0);

} // namespace purcell
