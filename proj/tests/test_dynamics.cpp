#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "purcell/constants.hpp"
#include "purcell/dynamics.hpp"
#include "purcell/pulse_lib.hpp"

using namespace purcell;

namespace {

QuantumSystem coupler_filter(double g = 20e6, double kappa = 150e6, int n_filter = 3) {
  QuantumSystem sys;
  sys.subsystems.push_back({"coupler", 2, 0.0, 0.0, ""});
  sys.subsystems.push_back({"filter", n_filter, 0.0, 0.0, ""});
  sys.couplings.push_back({0, 1, g});
  sys.collapse.push_back({1, kappa});
  return sys;
}

ComplexMatrix random_density_matrix(int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = std::complex<double>(n(rng), n(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return rho;
}

} // namespace

TEST_CASE("single-excitation exchange block") {
  auto h = build_qc_hamiltonian_1ex(0.0, 25e6);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-kTwoPi * 25e6));
  CHECK(es.eigenvalues()(1) == doctest::Approx(kTwoPi * 25e6));

  auto h2 = build_qc_hamiltonian_1ex(80e6, 0.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es2(h2);
  CHECK(es2.eigenvalues()(0) == doctest::Approx(-kTwoPi * 40e6));
  CHECK(es2.eigenvalues()(1) == doctest::Approx(kTwoPi * 40e6));

  // minimum gap over detuning equals twice the coupling
  const double g = 17e6;
  double min_gap = 1e30;
  for (double d = -300e6; d <= 300e6; d += 1e6) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(build_qc_hamiltonian_1ex(d, g));
    min_gap = std::min(min_gap, s.eigenvalues()(1) - s.eigenvalues()(0));
  }
  CHECK(min_gap == doctest::Approx(kTwoPi * 2 * g).epsilon(1e-6));
}

TEST_CASE("two-excitation block and its anticrossing locations") {
  const double ec_q = 187.4e6, ec_c = 330e6, g = 55.6e6;

  auto h0 = build_qc_hamiltonian_2ex(100e6, 0.0, ec_q, ec_c);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h0);
  // diagonal eigenvalues at zero coupling
  std::vector<double> expected{kTwoPi * (100e6 - ec_c), 0.0, kTwoPi * (-100e6 - ec_q)};
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 3; ++i)
    CHECK(es.eigenvalues()(i) == doctest::Approx(expected[i]).epsilon(1e-12));

  // gap minima near Delta = EC_c and Delta = -EC_q
  auto gap_between = [&](double d, int lo) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(
        build_qc_hamiltonian_2ex(d, g, ec_q, ec_c));
    return s.eigenvalues()(lo + 1) - s.eigenvalues()(lo);
  };
  double best_hi = 0, best_hi_gap = 1e30, best_lo = 0, best_lo_gap = 1e30;
  for (double d = -600e6; d <= 700e6; d += 1e6) {
    const double ghi = gap_between(d, 1);
    const double glo = gap_between(d, 0);
    if (ghi < best_hi_gap) {
      best_hi_gap = ghi;
      best_hi = d;
    }
    if (glo < best_lo_gap) {
      best_lo_gap = glo;
      best_lo = d;
    }
  }
  // one anticrossing sits near +EC_c, the other near -EC_q
  const double hi_target = std::abs(best_hi - ec_c) < std::abs(best_hi + ec_q)
                               ? ec_c : -ec_q;
  const double lo_target = hi_target == ec_c ? -ec_q : ec_c;
  CHECK(best_hi == doctest::Approx(hi_target).epsilon(0.1));
  CHECK(best_lo == doctest::Approx(lo_target).epsilon(0.1));
}

TEST_CASE("two-anticrossing spectrum over the published sweep range") {
  // qubit at 4.835 GHz, coupler swept 4.0 to 5.5 GHz
  const double f_q = 4.835e9, ec_q = 187.4e6, ec_c = 330e6, g = 55.6e6;
  int gap_minima = 0;
  double prev_gap = -1, prev_slope = 0;
  for (double fc = 4.0e9; fc <= 5.5e9; fc += 2e6) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(
        build_qc_hamiltonian_2ex(fc - f_q, g, ec_q, ec_c));
    const double gap = std::min(s.eigenvalues()(1) - s.eigenvalues()(0),
                                s.eigenvalues()(2) - s.eigenvalues()(1));
    if (prev_gap >= 0) {
      const double slope = gap - prev_gap;
      if (prev_slope < 0 && slope > 0) ++gap_minima;
      prev_slope = slope;
    }
    prev_gap = gap;
  }
  CHECK(gap_minima == 2);
}

TEST_CASE("composite hamiltonian restricts to the printed blocks") {
  // two resonant two-level systems: the 1-excitation block matches
  QuantumSystem sys;
  sys.subsystems.push_back({"q", 2, 5.0e9, 0.0, ""});
  sys.subsystems.push_back({"c", 2, 5.0e9, 0.0, ""});
  sys.couplings.push_back({0, 1, 30e6});
  const auto h = build_composite_hamiltonian(sys, {5.0e9, 5.0e9});
  // basis order |q c>: {00, 01, 10, 11}; 1-excitation block rows/cols {1, 2}
  const auto h1 = build_qc_hamiltonian_1ex(0.0, 30e6);
  const double offset = (h(1, 1).real() + h(2, 2).real()) / 2.0;
  CHECK(h(1, 1).real() - offset == doctest::Approx(h1(0, 0).real()).epsilon(1e-12));
  CHECK(h(2, 2).real() - offset == doctest::Approx(h1(1, 1).real()).epsilon(1e-12));
  CHECK(h(1, 2).real() == doctest::Approx(h1(0, 1).real()));

  // three-level qubit+coupler: 2-excitation block matches with EC = -alpha
  QuantumSystem sys3;
  const double ec_q = 187.4e6, ec_c = 330e6, delta = 120e6, g = 55e6;
  sys3.subsystems.push_back({"q", 3, 4.835e9, -ec_q, ""});
  sys3.subsystems.push_back({"c", 3, 4.835e9 + delta, -ec_c, ""});
  sys3.couplings.push_back({0, 1, g});
  const auto hc = build_composite_hamiltonian(sys3, {4.835e9, 4.835e9 + delta});
  // |q c> indices: |02> = 2, |11> = 4, |20> = 6
  const auto h2 = build_qc_hamiltonian_2ex(delta, g, ec_q, ec_c);
  const double off = hc(4, 4).real() - h2(1, 1).real();
  CHECK(hc(2, 2).real() - off == doctest::Approx(h2(0, 0).real()).epsilon(1e-9));
  CHECK(hc(6, 6).real() - off == doctest::Approx(h2(2, 2).real()).epsilon(1e-9));
  CHECK(hc(2, 4).real() == doctest::Approx(h2(0, 1).real()));
  CHECK(hc(4, 6).real() == doctest::Approx(h2(1, 2).real()));

  // no couplings: diagonal
  QuantumSystem diag = sys3;
  diag.couplings.clear();
  const auto hd = build_composite_hamiltonian(diag, {4.8e9, 5.0e9});
  for (int i = 0; i < hd.rows(); ++i)
    for (int j = 0; j < hd.cols(); ++j)
      if (i != j) CHECK(std::abs(hd(i, j)) == 0.0);
}

TEST_CASE("dimension cap is enforced") {
  QuantumSystem sys;
  for (int k = 0; k < 7; ++k)
    sys.subsystems.push_back({"s" + std::to_string(k), 4, 5e9, 0.0, ""});
  CHECK(sys.dimension() > kMaxTotalDimension);
  CHECK_THROWS_AS(sys.validate(), DynamicsError);
}

TEST_CASE("liouvillian spectrum in the closed-system limit") {
  QuantumSystem sys;
  sys.subsystems.push_back({"m", 3, 50e6, -10e6, ""});
  const auto h = build_composite_hamiltonian(sys, {50e6});
  const auto l = build_liouvillian(h, {});
  Eigen::ComplexEigenSolver<ComplexMatrix> es(l);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eh(h);
  // eigenvalues are -i(E_j - E_k): all purely imaginary
  for (int k = 0; k < es.eigenvalues().size(); ++k)
    CHECK(std::abs(es.eigenvalues()(k).real()) < 1e-3);
  // the set matches the Bohr frequencies
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const double bohr = eh.eigenvalues()(j) - eh.eigenvalues()(k);
      double best = 1e30;
      for (int m = 0; m < es.eigenvalues().size(); ++m)
        best = std::min(best, std::abs(es.eigenvalues()(m).imag() + bohr));
      CHECK(best < 1e-3);
    }
}

TEST_CASE("liouvillian action matches the direct lindblad right-hand side") {
  QuantumSystem sys = coupler_filter(20e6, 150e6, 3);
  const auto h = build_composite_hamiltonian(sys, {0.0, 0.0});
  const auto a = sys.lowering_operator(1);
  const double rate = 150e6;
  const auto l = build_liouvillian(h, {{a, rate}});

  const int d = sys.dimension();
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto rho = random_density_matrix(d, seed);
    // direct evaluation
    const double k_ang = kTwoPi * rate;
    const std::complex<double> i1(0, 1);
    ComplexMatrix direct = -i1 * (h * rho - rho * h) +
                           k_ang * (a * rho * a.adjoint() -
                                    0.5 * (a.adjoint() * a * rho + rho * a.adjoint() * a));
    // vectorized evaluation (column stacking)
    Eigen::Map<const ComplexVector> vec_rho(rho.data(), d * d);
    ComplexVector lv = l * vec_rho;
    Eigen::Map<const ComplexMatrix> lv_mat(lv.data(), d, d);
    const double scale = direct.cwiseAbs().maxCoeff();
    CHECK((lv_mat - direct).cwiseAbs().maxCoeff() / scale < 1e-12);
  }
}

TEST_CASE("liouvillian eigenvalues never have positive real part") {
  QuantumSystem sys = coupler_filter(20e6, 140e6, 3);
  const auto h = build_composite_hamiltonian(sys, {0.0, 0.0});
  const auto l = build_liouvillian(h, {{sys.lowering_operator(1), 140e6}});
  Eigen::ComplexEigenSolver<ComplexMatrix> es(l);
  for (int k = 0; k < es.eigenvalues().size(); ++k)
    CHECK(es.eigenvalues()(k).real() < 1e-3);
}

TEST_CASE("dimension mismatch in collapse operators is rejected") {
  const auto h = build_qc_hamiltonian_1ex(0.0, 10e6);
  ComplexMatrix wrong = ComplexMatrix::Zero(3, 3);
  CHECK_THROWS_AS(build_liouvillian(h, {{wrong, 1e6}}), DynamicsError);
}

TEST_CASE("resonant exchange completes a full swap at a quarter coupling period") {
  QuantumSystem sys;
  sys.subsystems.push_back({"q", 2, 5.0e9, 0.0, ""});
  sys.subsystems.push_back({"c", 2, 5.0e9, 0.0, ""});
  const double g = 25e6;
  sys.couplings.push_back({0, 1, g});

  const auto rho0 = basis_state(sys, {1, 0});
  const double t_swap = 1.0 / (4.0 * g);
  const auto res = evolve(sys, {}, rho0, {0.0, t_swap});
  CHECK(res.populations[0].back() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(res.populations[1].back() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("population decays exponentially through a lossy mode") {
  QuantumSystem sys;
  sys.subsystems.push_back({"m", 2, 0.0, 0.0, ""});
  const double kappa = 10e6;
  sys.collapse.push_back({0, kappa});
  const auto rho0 = basis_state(sys, {1});
  std::vector<double> grid{0.0, 10e-9, 20e-9, 40e-9};
  const auto res = evolve(sys, {}, rho0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(res.populations[0][i] ==
          doctest::Approx(std::exp(-kTwoPi * kappa * grid[i])).epsilon(1e-7));
}

TEST_CASE("over-damped coupler drain through a lossy filter") {
  // kappa > 4 g: excitation leaks monotonically without revival
  QuantumSystem sys = coupler_filter(20e6, 150e6, 3);
  const auto rho0 = basis_state(sys, {1, 0});
  std::vector<double> grid;
  for (int i = 0; i <= 70; ++i) grid.push_back(i * 1e-9);
  const auto res = evolve(sys, {}, rho0, grid);
  CHECK(res.populations[0].back() < 0.01);
  for (std::size_t i = 1; i < grid.size(); ++i)
    CHECK(res.populations[0][i] <= res.populations[0][i - 1] + 1e-9);

  // closed-system limit: vacuum Rabi revival instead
  QuantumSystem closed = coupler_filter(20e6, 150e6, 3);
  closed.collapse.clear();
  const double t_cycle = 1.0 / (2.0 * 20e6);
  const auto res2 = evolve(closed, {}, rho0, {0.0, t_cycle});
  CHECK(res2.populations[0].back() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("trace, hermiticity, and closed-system energy are conserved") {
  QuantumSystem sys;
  sys.subsystems.push_back({"q", 3, 4.835e9, -187.4e6, ""});
  sys.subsystems.push_back({"c", 3, 4.9e9, -330e6, ""});
  sys.couplings.push_back({0, 1, 55e6});
  const auto rho0 = basis_state(sys, {2, 0});
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(i * 1e-9);
  EvolveOptions opts;
  const auto res = evolve(sys, {}, rho0, grid, opts);
  CHECK(res.trace_error < 1e-6);
  CHECK(res.hermiticity_error < 1e-9);

  const auto h = build_composite_hamiltonian(
      sys, {4.835e9 - res.frame_frequency, 4.9e9 - res.frame_frequency});
  const double e0 = (h * rho0).trace().real();
  const double e1 = (h * res.final_state).trace().real();
  CHECK(std::abs(e1 - e0) <= 1e-6 * std::abs(e0));
}

TEST_CASE("evolve validates its inputs") {
  QuantumSystem sys = coupler_filter();
  ComplexMatrix bad = ComplexMatrix::Identity(sys.dimension(), sys.dimension());
  CHECK_THROWS_AS(evolve(sys, {}, bad, {0.0, 1e-9}), DynamicsError);  // trace != 1
  const auto rho0 = basis_state(sys, {1, 0});
  CHECK_THROWS_AS(evolve(sys, {}, rho0, {0.0}), DynamicsError);  // one time point
  QuantumSystem ctrl = sys;
  ctrl.subsystems[0].control = "missing";
  CHECK_THROWS_AS(evolve(ctrl, {}, rho0, {0.0, 1e-9}), DynamicsError);
}

TEST_CASE("single lossy mode has exactly one stationary eigenvector") {
  QuantumSystem sys;
  sys.subsystems.push_back({"m", 3, 0.0, 0.0, ""});
  const auto h = build_composite_hamiltonian(sys, {0.0});
  const double kappa = 100e6;
  const auto a = sys.lowering_operator(0);
  const auto l = build_liouvillian(h, {{a, kappa}});
  const auto modes = dark_modes(l, sys.number_operator(0), 1e-6 * kTwoPi * kappa);
  CHECK(modes.size() == 1);
  CHECK(modes[0].filter_weight == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("identical resonant couplers hide an excitation from the filter") {
  QuantumSystem sys;
  sys.subsystems.push_back({"c1", 2, 0.0, 0.0, ""});
  sys.subsystems.push_back({"c2", 2, 0.0, 0.0, ""});
  sys.subsystems.push_back({"filter", 3, 0.0, 0.0, ""});
  const double g = 20e6, kappa = 140e6;
  sys.couplings.push_back({0, 2, g});
  sys.couplings.push_back({1, 2, g});
  sys.collapse.push_back({2, kappa});
  const auto h = build_composite_hamiltonian(sys, {0.0, 0.0, 0.0});
  const auto l = build_liouvillian(h, {{sys.lowering_operator(2), kappa}});
  const auto nf = sys.number_operator(2);

  const auto modes = dark_modes(l, nf, 1e-6 * kTwoPi * kappa);
  // vacuum plus a protected single-excitation manifold
  CHECK(modes.size() > 1);
  for (const auto& m : modes) CHECK(m.filter_weight < 1e-6);

  // the antisymmetric combination is stationary under the full generator
  const int d = sys.dimension();
  ComplexVector psi = ComplexVector::Zero(d);
  // |10>c (x) |0>f = index 2*... basis |c1 c2 f>: (1,0,0) -> (1*2+0)*3+0 = 6
  // (0,1,0) -> 3
  psi(6) = 1.0 / std::sqrt(2.0);
  psi(3) = -1.0 / std::sqrt(2.0);
  ComplexMatrix rho_dark = psi * psi.adjoint();
  Eigen::Map<const ComplexVector> v(rho_dark.data(), d * d);
  CHECK((l * v).cwiseAbs().maxCoeff() < 1e-6 * kTwoPi * kappa);

  // detuning the second coupler removes every nontrivial dark mode
  QuantumSystem det = sys;
  const auto h2 = build_composite_hamiltonian(det, {0.0, 25e6, 0.0});
  const auto l2 = build_liouvillian(h2, {{det.lowering_operator(2), kappa}});
  const auto modes2 = dark_modes(l2, nf, 1e-6 * kTwoPi * kappa);
  CHECK(modes2.size() == 1);  // only the vacuum steady state survives
}
