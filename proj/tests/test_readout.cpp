#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "purcell/readout.hpp"

using namespace purcell;

TEST_CASE("snr from cloud geometry") {
  IQCloud c0{{0, 0}, {1, 1}, 1.0};
  IQCloud c1{{4.6, 0}, {1, 1}, 1.0};
  CHECK(snr(c0, c1) == doctest::Approx(4.6));
  CHECK(snr(c0, c0) == 0.0);

  // homogeneous under common scaling
  IQCloud s0{{0, 0}, {3, 3}, 1.0};
  IQCloud s1{{13.8, 0}, {3, 3}, 1.0};
  CHECK(snr(s0, s1) == doctest::Approx(4.6));
}

TEST_CASE("snr is invariant under rigid motions of the plane") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  IQCloud c0{{0, 0}, {1.0, 1.0}, 1.0};
  IQCloud c1{{5.0, 0}, {1.4, 1.4}, 1.0};
  const double base = snr(c0, c1);
  for (int k = 0; k < 25; ++k) {
    const double th = u(rng), dx = u(rng), dy = u(rng);
    auto rot = [&](const IQCloud& c) {
      IQCloud r = c;
      r.mean[0] = std::cos(th) * c.mean[0] - std::sin(th) * c.mean[1] + dx;
      r.mean[1] = std::sin(th) * c.mean[0] + std::cos(th) * c.mean[1] + dy;
      return r;  // isotropic sigmas rotate onto themselves
    };
    CHECK(snr(rot(c0), rot(c1)) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("snr scaling law peaks at kappa = 2 chi") {
  const double chi = 0.7e6;
  CHECK(sin_two_theta(chi, 2 * chi) == doctest::Approx(1.0));
  CHECK(snr_scaling(0.0, chi, 1.0, 1.0, 1e-6) == 0.0);
  CHECK(snr_scaling(1e12, chi, 1.0, 1.0, 1e-6) < 1e-2);

  for (double c : {0.1e6, 0.5e6, 1.0e6, 5e6, 10e6}) {
    double best_k = 0, best = -1;
    for (double k = 0.01e6; k < 100e6; k *= 1.01) {
      const double v = snr_scaling(k, c, 1.0, 1.0, 1e-6);
      if (v > best) {
        best = v;
        best_k = k;
      }
    }
    CHECK(best_k == doctest::Approx(2 * c).epsilon(0.02));
  }
}

TEST_CASE("measurement dephasing per photon") {
  CHECK(measurement_dephasing_per_photon(1.4e6, 1.4e6) == doctest::Approx(1.4e6));
  CHECK(measurement_dephasing_per_photon(1.4e6, 0.0) == 0.0);
}

TEST_CASE("relaxation error values") {
  CHECK(relaxation_error(500e-9, 27.8e-6) == doctest::Approx(0.01782).epsilon(1e-3));
  CHECK(relaxation_error(1077e-9, 27.8e-6) == doctest::Approx(0.0380).epsilon(1e-3));
  CHECK(relaxation_error(0.0, 27.8e-6) == 0.0);
  CHECK_THROWS_AS(relaxation_error(1e-6, 0.0), ReadoutError);
}

TEST_CASE("separation error against a numeric integration oracle") {
  // equal sigmas, midpoint threshold: eps = erfc(snr / (2 sqrt 2)) / 2
  for (double s : {2.0, 4.6, 6.4}) {
    IQCloud c0{{0, 0}, {1, 1}, 1.0};
    IQCloud c1{{s, 0}, {1, 1}, 1.0};
    const auto t = midpoint_threshold(c0, c1);
    const auto e = separation_error(c0, c1, t);
    const double expected = 0.5 * std::erfc(s / (2.0 * std::sqrt(2.0)));
    CHECK(e.eps0 == doctest::Approx(expected).epsilon(1e-9));
    CHECK(e.eps1 == doctest::Approx(expected).epsilon(1e-9));

    // trapezoid integration of the gaussian mass on the wrong side
    double acc = 0;
    const double h = 1e-3;
    for (double x = s / 2; x < s / 2 + 12; x += h)
      acc += h * std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979);
    CHECK(e.eps0 == doctest::Approx(acc).epsilon(1e-3));
  }
  // published snr 6.4 sits near 0.069 percent for symmetric clouds
  IQCloud c0{{0, 0}, {1, 1}, 1.0};
  IQCloud c1{{6.4, 0}, {1, 1}, 1.0};
  const auto e = separation_error(c0, c1, midpoint_threshold(c0, c1));
  CHECK(e.eps0 == doctest::Approx(6.87e-4).epsilon(2e-2));
}

TEST_CASE("extreme thresholds classify everything one way") {
  IQCloud c0{{0, 0}, {1, 1}, 1.0};
  IQCloud c1{{5, 0}, {1, 1}, 1.0};
  ThresholdLine far{{1, 0}, 1e9};
  const auto e = separation_error(c0, c1, far);
  CHECK(e.eps0 == doctest::Approx(0.0));
  CHECK(e.eps1 == doctest::Approx(1.0));
}

TEST_CASE("separation error falls monotonically with snr at midpoint") {
  double prev = 1.0;
  for (double s = 1.0; s <= 8.0; s += 0.5) {
    IQCloud c0{{0, 0}, {1, 1}, 1.0};
    IQCloud c1{{s, 0}, {1, 1}, 1.0};
    const auto e = separation_error(c0, c1, midpoint_threshold(c0, c1));
    CHECK(e.eps0 < prev);
    prev = e.eps0;
  }
}

TEST_CASE("threshold optimization shifts toward the ground-state cloud") {
  IQCloud c0{{0, 0}, {1, 1}, 1.0};
  IQCloud c1{{5, 0}, {1, 1}, 1.0};

  const auto no_decay = optimize_threshold(c0, c1, 0.0);
  CHECK(no_decay.threshold.offset == doctest::Approx(2.5).epsilon(1e-3));

  const auto with_decay = optimize_threshold(c0, c1, 0.04);
  CHECK(with_decay.threshold.offset < 2.5);

  // the |0> assignment fidelity at the optimum decreases as decay grows
  double prev_f0 = 1.0;
  for (double eps : {0.01, 0.03, 0.06, 0.12}) {
    const auto r = optimize_threshold(c0, c1, eps);
    const auto sep = separation_error(c0, c1, r.threshold);
    const double f0 = 1.0 - sep.eps0;
    CHECK(f0 < prev_f0);
    prev_f0 = f0;
  }
}

TEST_CASE("error budget composition") {
  const auto b = ErrorBudget::from_state_fidelities(0.9965, 0.9896);
  CHECK(b.readout_fidelity == doctest::Approx(0.99305).epsilon(1e-12));

  IQCloud c0{{0, 0}, {1, 1}, 1.0};
  IQCloud c1{{6.4, 0}, {1, 1}, 1.0};
  const auto budget =
      error_budget(c0, c1, midpoint_threshold(c0, c1), 500e-9, 27.8e-6, 0.0);
  CHECK(budget.relaxation_bound == doctest::Approx(0.01782).epsilon(1e-3));
  CHECK(budget.readout_fidelity ==
        doctest::Approx((budget.state0_fidelity + budget.state1_fidelity) / 2.0)
            .epsilon(1e-15));

  // no separation, no decay, no prep error: perfect readout
  IQCloud far0{{0, 0}, {1e-3, 1e-3}, 1.0};
  IQCloud far1{{100, 0}, {1e-3, 1e-3}, 1.0};
  const auto perfect =
      error_budget(far0, far1, midpoint_threshold(far0, far1), 1e-12, 1.0, 0.0);
  CHECK(perfect.readout_fidelity == doctest::Approx(1.0).epsilon(1e-9));

  std::ostringstream table;
  budget.write_table(table);
  CHECK(table.str().find("energy relaxation") != std::string::npos);
  CHECK(budget.to_json().find("readout_fidelity") != std::string::npos);
}
