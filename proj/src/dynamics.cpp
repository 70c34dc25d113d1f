#include "purcell/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "purcell/constants.hpp"

namespace purcell {

namespace {

using SparseCd = Eigen::SparseMatrix<std::complex<double>>;
using std::complex;
const complex<double> kI(0.0, 1.0);

ComplexMatrix destroy(int n) {
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix lift(const std::vector<int>& dims, int target, const ComplexMatrix& op) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t s = 0; s < dims.size(); ++s) {
    if (static_cast<int>(s) == target)
      out = kron(out, op);
    else
      out = kron(out, ComplexMatrix::Identity(dims[s], dims[s]));
  }
  return out;
}

} // namespace

int QuantumSystem::dimension() const {
  int d = 1;
  for (const auto& s : subsystems) d *= s.levels;
  return d;
}

int QuantumSystem::subsystem_index(const std::string& label) const {
  for (std::size_t i = 0; i < subsystems.size(); ++i)
    if (subsystems[i].label == label) return static_cast<int>(i);
  throw DynamicsError("unknown subsystem '" + label + "'");
}

void QuantumSystem::validate() const {
  if (subsystems.empty()) throw DynamicsError("system has no subsystems");
  for (const auto& s : subsystems)
    if (s.levels < 1) throw DynamicsError("subsystem '" + s.label + "' needs >= 1 level");
  if (dimension() > kMaxTotalDimension)
    throw DynamicsError("total dimension " + std::to_string(dimension()) +
                        " exceeds cap " + std::to_string(kMaxTotalDimension));
  const int n = static_cast<int>(subsystems.size());
  for (const auto& c : couplings)
    if (c.a < 0 || c.a >= n || c.b < 0 || c.b >= n || c.a == c.b)
      throw DynamicsError("coupling references invalid subsystem pair");
  for (const auto& c : collapse)
    if (c.subsystem < 0 || c.subsystem >= n)
      throw DynamicsError("collapse channel references invalid subsystem");
}

ComplexMatrix QuantumSystem::lowering_operator(int s) const {
  std::vector<int> dims;
  for (const auto& sub : subsystems) dims.push_back(sub.levels);
  return lift(dims, s, destroy(subsystems[s].levels));
}

ComplexMatrix QuantumSystem::number_operator(int s) const {
  const ComplexMatrix a = lowering_operator(s);
  return a.adjoint() * a;
}

ComplexMatrix build_qc_hamiltonian_1ex(double delta, double g) {
  const double d = kTwoPi * delta, gg = kTwoPi * g;
  ComplexMatrix h(2, 2);
  h << d / 2.0, gg, gg, -d / 2.0;
  return h;
}

ComplexMatrix build_qc_hamiltonian_2ex(double delta, double g, double ec_q,
                                       double ec_c) {
  const double d = kTwoPi * delta;
  const double s2g = std::sqrt(2.0) * kTwoPi * g;
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 0) = d - kTwoPi * ec_c;
  h(2, 2) = -d - kTwoPi * ec_q;
  h(0, 1) = h(1, 0) = s2g;
  h(1, 2) = h(2, 1) = s2g;
  return h;
}

ComplexMatrix build_composite_hamiltonian(const QuantumSystem& sys,
                                          const std::vector<double>& frequencies) {
  sys.validate();
  if (frequencies.size() != sys.subsystems.size())
    throw DynamicsError("need one frequency per subsystem");
  const int d = sys.dimension();
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (std::size_t s = 0; s < sys.subsystems.size(); ++s) {
    const ComplexMatrix n = sys.number_operator(static_cast<int>(s));
    const ComplexMatrix eye = ComplexMatrix::Identity(d, d);
    h += kTwoPi * frequencies[s] * n +
         kTwoPi * sys.subsystems[s].anharmonicity / 2.0 * (n * (n - eye));
  }
  for (const auto& c : sys.couplings) {
    const ComplexMatrix a = sys.lowering_operator(c.a);
    const ComplexMatrix b = sys.lowering_operator(c.b);
    h += kTwoPi * c.g * (a.adjoint() * b + a * b.adjoint());
  }
  return h;
}

ComplexMatrix build_liouvillian(
    const ComplexMatrix& h,
    const std::vector<std::pair<ComplexMatrix, double>>& collapse) {
  const Eigen::Index d = h.rows();
  if (h.cols() != d) throw DynamicsError("hamiltonian must be square");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw DynamicsError("hamiltonian is not hermitian");
  const ComplexMatrix eye = ComplexMatrix::Identity(d, d);
  ComplexMatrix l = -kI * kron(eye, h) + kI * kron(h.transpose(), eye);
  for (const auto& [a, rate] : collapse) {
    if (a.rows() != d || a.cols() != d)
      throw DynamicsError("collapse operator dimension mismatch");
    const double k = kTwoPi * rate;
    const ComplexMatrix ada = a.adjoint() * a;
    l += k * (kron(a.conjugate(), a) - 0.5 * kron(eye, ada) -
              0.5 * kron(ada.transpose(), eye));
  }
  return l;
}

// ---------------------------------------------------------------------------
// Lindblad right-hand side with sparse static parts and diagonal controls.
namespace {

struct LindbladRhs {
  SparseCd h_static;               // angular, frame-shifted
  std::vector<SparseCd> a_ops;     // collapse operators
  std::vector<SparseCd> ad_ops;    // their adjoints
  std::vector<Eigen::VectorXd> n_diag;  // a^dag a diagonals
  std::vector<double> rates_ang;
  // controlled subsystems: diagonal of the lifted number operator
  std::vector<Eigen::VectorXd> ctrl_diag;
  std::vector<const Waveform*> ctrl_wave;
  std::vector<double> ctrl_base;  // static frame-shifted frequency, Hz

  void apply(double t, const ComplexMatrix& rho, ComplexMatrix& out) const {
    out.noalias() = h_static * rho;
    out.noalias() -= rho * h_static;
    for (std::size_t k = 0; k < ctrl_diag.size(); ++k) {
      const double x = kTwoPi * (ctrl_wave[k]->at(t) - ctrl_base[k]);
      if (x == 0) continue;
      const auto& nd = ctrl_diag[k];
      for (Eigen::Index j = 0; j < rho.cols(); ++j)
        for (Eigen::Index i = 0; i < rho.rows(); ++i)
          out(i, j) += x * (nd(i) - nd(j)) * rho(i, j);
    }
    out *= -kI;
    for (std::size_t k = 0; k < a_ops.size(); ++k) {
      const double rate = rates_ang[k];
      ComplexMatrix tmp = a_ops[k] * rho;
      out.noalias() += rate * (tmp * ad_ops[k]);
      const auto& nd = n_diag[k];
      for (Eigen::Index j = 0; j < rho.cols(); ++j)
        for (Eigen::Index i = 0; i < rho.rows(); ++i)
          out(i, j) -= 0.5 * rate * (nd(i) + nd(j)) * rho(i, j);
    }
  }
};

LindbladRhs make_rhs(const QuantumSystem& sys,
                     const std::map<std::string, Waveform>& controls,
                     double frame, std::vector<double>& base_freqs) {
  LindbladRhs rhs;
  base_freqs.clear();
  std::vector<double> freqs;
  for (const auto& s : sys.subsystems)
    // a control waveform supplies the full frequency of its subsystem
    freqs.push_back(s.control.empty() ? s.frequency - frame : 0.0);
  base_freqs = freqs;
  const ComplexMatrix h0 = build_composite_hamiltonian(sys, freqs);
  rhs.h_static = h0.sparseView(1.0, 1e-300);
  for (const auto& c : sys.collapse) {
    const ComplexMatrix a = sys.lowering_operator(c.subsystem);
    rhs.a_ops.push_back(a.sparseView(1.0, 1e-300));
    rhs.ad_ops.push_back(ComplexMatrix(a.adjoint()).sparseView(1.0, 1e-300));
    rhs.n_diag.push_back(ComplexMatrix(a.adjoint() * a).diagonal().real());
    rhs.rates_ang.push_back(kTwoPi * c.rate);
  }
  for (std::size_t s = 0; s < sys.subsystems.size(); ++s) {
    const auto& sub = sys.subsystems[s];
    if (sub.control.empty()) continue;
    auto it = controls.find(sub.control);
    if (it == controls.end())
      throw DynamicsError("missing control waveform '" + sub.control +
                          "' for subsystem '" + sub.label + "'");
    rhs.ctrl_diag.push_back(sys.number_operator(static_cast<int>(s)).diagonal().real());
    rhs.ctrl_wave.push_back(&it->second);
    rhs.ctrl_base.push_back(frame);
  }
  return rhs;
}

// Dormand-Prince 5(4) with a PI controller.
struct Dopri5 {
  const LindbladRhs& rhs;
  double rtol, atol, max_step;

  double error_norm(const ComplexMatrix& err, const ComplexMatrix& y0,
                    const ComplexMatrix& y1) const {
    double acc = 0;
    const auto n = err.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
      const double e = std::abs(err(i)) / sc;
      acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(n));
  }

  // integrates rho in place from t0 to t1
  void integrate(ComplexMatrix& rho, double t0, double t1, double& h_guess) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Eigen::Index d = rho.rows();
    ComplexMatrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d);
    ComplexMatrix ytmp(d, d), ynew(d, d), err(d, d);

    double t = t0;
    // controller step size; the attempted step may be clamped to the endpoint
    double h = h_guess > 0 ? h_guess : (t1 - t0) * 1e-3;
    if (max_step > 0) h = std::min(h, max_step);
    bool first = true;
    int rejected_in_a_row = 0;

    rhs.apply(t, rho, k1);
    while (t < t1) {
      const double hc = std::min(h, t1 - t);
      const bool clamped = hc < h;
      if (!clamped && h < 1e-18)
        throw IntegrationError("step size underflow (stiffness) at t = " +
                               std::to_string(t * 1e9) + " ns", t);
      ytmp = rho + hc * a21 * k1;
      rhs.apply(t + c2 * hc, ytmp, k2);
      ytmp = rho + hc * (a31 * k1 + a32 * k2);
      rhs.apply(t + c3 * hc, ytmp, k3);
      ytmp = rho + hc * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs.apply(t + c4 * hc, ytmp, k4);
      ytmp = rho + hc * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs.apply(t + c5 * hc, ytmp, k5);
      ytmp = rho + hc * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      rhs.apply(t + hc, ytmp, k6);
      ynew = rho + hc * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      rhs.apply(t + hc, ynew, k7);
      err = hc * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      const double en = error_norm(err, rho, ynew);
      if (en <= 1.0) {
        t += hc;
        rho.swap(ynew);
        k1.swap(k7);  // FSAL
        double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, first ? 10.0 : 5.0);
        if (!clamped) h = hc * fac;  // endpoint-clamped steps don't inform the controller
        if (max_step > 0) h = std::min(h, max_step);
        first = false;
        rejected_in_a_row = 0;
      } else {
        const double fac = std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
        h = hc * fac;
        if (++rejected_in_a_row > 200)
          throw IntegrationError("integrator cannot satisfy tolerances at t = " +
                                 std::to_string(t * 1e9) + " ns", t);
      }
    }
    h_guess = h;
  }
};

void check_density_matrix(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols()) throw DynamicsError("rho must be square");
  const double tr_err = std::abs(rho.trace() - 1.0);
  if (tr_err > 1e-6) throw DynamicsError("rho trace deviates from 1 by " + std::to_string(tr_err));
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw DynamicsError("rho is not hermitian");
}

} // namespace

ComplexMatrix basis_state(const QuantumSystem& sys, const std::vector<int>& levels) {
  if (levels.size() != sys.subsystems.size())
    throw DynamicsError("need one level per subsystem");
  int idx = 0;
  for (std::size_t s = 0; s < levels.size(); ++s) {
    if (levels[s] < 0 || levels[s] >= sys.subsystems[s].levels)
      throw DynamicsError("basis level out of range for subsystem " + sys.subsystems[s].label);
    idx = idx * sys.subsystems[s].levels + levels[s];
  }
  const int d = sys.dimension();
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  rho(idx, idx) = 1.0;
  return rho;
}

std::vector<double> subsystem_level_populations(const QuantumSystem& sys,
                                                const ComplexMatrix& rho, int s) {
  const int d = sys.dimension();
  int stride = 1;
  for (std::size_t k = s + 1; k < sys.subsystems.size(); ++k)
    stride *= sys.subsystems[k].levels;
  const int levels = sys.subsystems[s].levels;
  std::vector<double> pops(levels, 0.0);
  for (int i = 0; i < d; ++i) {
    const int level = (i / stride) % levels;
    pops[level] += rho(i, i).real();
  }
  return pops;
}

double subsystem_excited_probability(const QuantumSystem& sys,
                                     const ComplexMatrix& rho, int s) {
  return 1.0 - subsystem_level_populations(sys, rho, s)[0];
}

EvolutionResult evolve(const QuantumSystem& sys,
                       const std::map<std::string, Waveform>& controls,
                       const ComplexMatrix& rho0,
                       const std::vector<double>& t_grid,
                       const EvolveOptions& opts) {
  sys.validate();
  if (rho0.rows() != sys.dimension())
    throw DynamicsError("rho0 dimension does not match the system");
  check_density_matrix(rho0);
  if (t_grid.size() < 2) throw DynamicsError("need at least two time points");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()))
    throw DynamicsError("time grid must be sorted");

  const double frame =
      opts.frame_frequency.value_or(sys.subsystems.front().frequency);
  std::vector<double> base;
  const LindbladRhs rhs = make_rhs(sys, controls, frame, base);
  const Dopri5 stepper{rhs, opts.rtol, opts.atol, opts.max_step};

  EvolutionResult res;
  res.frame_frequency = frame;
  res.populations.resize(sys.subsystems.size());
  ComplexMatrix rho = rho0;
  double h_guess = 0;

  const auto record = [&](double t) {
    res.times.push_back(t);
    for (std::size_t s = 0; s < sys.subsystems.size(); ++s)
      res.populations[s].push_back(
          subsystem_excited_probability(sys, rho, static_cast<int>(s)));
    res.qubit_p0.push_back(subsystem_level_populations(sys, rho, 0)[0]);
    res.trace_error = std::max(res.trace_error, std::abs(rho.trace().real() - 1.0));
    res.hermiticity_error = std::max(
        res.hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
  };

  record(t_grid.front());
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (t_grid[i] > t_grid[i - 1])
      stepper.integrate(rho, t_grid[i - 1], t_grid[i], h_guess);
    record(t_grid[i]);
  }
  res.final_state = rho;
  return res;
}

void EvolutionResult::write_csv(std::ostream& os, const QuantumSystem& sys) const {
  os << "t";
  for (const auto& s : sys.subsystems) os << ",excited_" << s.label;
  os << ",qubit_p0\n";
  char buf[64];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", times[i]);
    os << buf;
    for (const auto& p : populations) {
      std::snprintf(buf, sizeof buf, ",%.12g", p[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.12g\n", qubit_p0[i]);
    os << buf;
  }
}

std::vector<DarkMode> dark_modes(const ComplexMatrix& liouvillian,
                                 const ComplexMatrix& number_op, double tol) {
  const Eigen::Index d2 = liouvillian.rows();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d2))));
  if (d * d != d2 || number_op.rows() != d)
    throw DynamicsError("liouvillian/number operator dimension mismatch");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(liouvillian);
  if (solver.info() != Eigen::Success)
    throw DynamicsError("liouvillian eigendecomposition failed");

  std::vector<DarkMode> modes;
  for (Eigen::Index k = 0; k < d2; ++k) {
    const auto lambda = solver.eigenvalues()(k);
    if (std::abs(lambda.real()) >= tol) continue;
    DarkMode m;
    m.eigenvalue = lambda;
    m.eigenvector = solver.eigenvectors().col(k);
    // matricize (column stacking), hermitize, and weigh by the probe mode
    ComplexMatrix v = Eigen::Map<const ComplexMatrix>(m.eigenvector.data(), d, d);
    ComplexMatrix herm = (v + v.adjoint()) / 2.0;
    const double tr = std::abs(herm.trace());
    if (tr > 1e-9) {
      m.filter_weight = std::abs((number_op * herm).trace()) / tr;
    } else {
      // traceless coherence-like mode: Frobenius-weighted expectation
      const double norm2 = v.squaredNorm();
      m.filter_weight = std::abs((v.adjoint() * number_op * v).trace()) / norm2;
    }
    modes.push_back(std::move(m));
  }
  std::sort(modes.begin(), modes.end(), [](const DarkMode& a, const DarkMode& b) {
    return std::abs(a.eigenvalue.real()) < std::abs(b.eigenvalue.real());
  });
  return modes;
}

} // namespace purcell
