#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "purcell/waveform.hpp"

namespace purcell {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct DynamicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrationError : DynamicsError {
  double t_fail;
  explicit IntegrationError(const std::string& msg, double t)
      : DynamicsError(msg), t_fail(t) {}
};

inline constexpr int kMaxTotalDimension = 4096;

struct Subsystem {
  std::string label;
  int levels = 2;
  double frequency = 0;      // Hz
  double anharmonicity = 0;  // Hz, signed
  // name of the control waveform that drives this subsystem's frequency
  // (absolute Hz); empty = static
  std::string control;
};

struct ExchangeCoupling {
  int a = 0;
  int b = 0;
  double g = 0;  // Hz
};

struct CollapseChannel {
  int subsystem = 0;
  double rate = 0;  // Hz (kappa/2pi); lowering operator channel
};

// Composite Hilbert space of Kerr oscillators with excitation-exchange
// couplings and lowering-operator dissipation.
struct QuantumSystem {
  std::vector<Subsystem> subsystems;
  std::vector<ExchangeCoupling> couplings;
  std::vector<CollapseChannel> collapse;

  int dimension() const;
  int subsystem_index(const std::string& label) const;
  void validate() const;

  // annihilation operator of subsystem s on the full space
  ComplexMatrix lowering_operator(int s) const;
  ComplexMatrix number_operator(int s) const;
};

// --- Hamiltonian builders (angular units, rad/s) ---

// Two-state exchange block in the {|0_q 1_c>, |1_q 0_c>} basis.
ComplexMatrix build_qc_hamiltonian_1ex(double delta, double g);

// Three-state block in the {|0_q 2_c>, |1_q 1_c>, |2_q 0_c>} basis.
ComplexMatrix build_qc_hamiltonian_2ex(double delta, double g, double ec_q,
                                       double ec_c);

// Full composite Hamiltonian with per-subsystem frequencies (Hz, already in
// the desired rotating frame) overriding the static ones.
ComplexMatrix build_composite_hamiltonian(const QuantumSystem& sys,
                                          const std::vector<double>& frequencies);

// Column-stacking vectorized Liouvillian:
// L = -i(I (x) H) + i(H^T (x) I)
//     + sum_k kappa_k (conj(a) (x) a - 1/2 I (x) a^dag a - 1/2 a^T conj(a) (x) I)
// H in angular units; rates in Hz (converted to angular internally).
ComplexMatrix build_liouvillian(
    const ComplexMatrix& h,
    const std::vector<std::pair<ComplexMatrix, double>>& collapse);

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;  // 0 = unlimited
  // rotating frame frequency (Hz) subtracted from every subsystem; by
  // default the first subsystem's static frequency
  std::optional<double> frame_frequency;
};

struct EvolutionResult {
  std::vector<double> times;
  // excited-state probability (1 - P_ground) per subsystem per time point
  std::vector<std::vector<double>> populations;
  std::vector<double> qubit_p0;  // ground-state probability of subsystem 0
  double trace_error = 0;
  double hermiticity_error = 0;
  double frame_frequency = 0;  // Hz
  ComplexMatrix final_state;

  void write_csv(std::ostream& os, const QuantumSystem& sys) const;
};

// Integrate rho' = -i[H(t), rho] + sum_k kappa_k D[a_k] rho with adaptive
// Dormand-Prince stepping. Controls map channel name -> waveform giving the
// absolute frequency (Hz) of the controlled subsystem over time.
EvolutionResult evolve(const QuantumSystem& sys,
                       const std::map<std::string, Waveform>& controls,
                       const ComplexMatrix& rho0,
                       const std::vector<double>& t_grid,
                       const EvolveOptions& opts = {});

struct DarkMode {
  std::complex<double> eigenvalue;  // of the Liouvillian, rad/s
  ComplexVector eigenvector;        // vectorized operator
  double filter_weight;             // excitation of the probe mode
};

// Eigenpairs of L with |Re lambda| < tol (tol in rad/s), annotated with the
// excitation expectation of the matricized operator against number_op.
std::vector<DarkMode> dark_modes(const ComplexMatrix& liouvillian,
                                 const ComplexMatrix& number_op, double tol);

// Density-matrix helpers.
ComplexMatrix basis_state(const QuantumSystem& sys, const std::vector<int>& levels);
double subsystem_excited_probability(const QuantumSystem& sys,
                                     const ComplexMatrix& rho, int s);
std::vector<double> subsystem_level_populations(const QuantumSystem& sys,
                                                const ComplexMatrix& rho, int s);

} // namespace purcell
