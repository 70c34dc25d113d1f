#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace purcell {

struct OptimizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AxisScale { linear, log };

struct Axis {
  std::string name;
  double lower = 0;
  double upper = 1;
  AxisScale scale = AxisScale::linear;
};

struct ParameterSpace {
  std::vector<Axis> axes;
  std::uint64_t seed = 0;

  void validate() const;
};

using Objective = std::function<double(const std::vector<double>&)>;

struct Trial {
  std::vector<double> point;
  double objective = 0;
  bool failed = false;
};

struct ScanResult {
  std::vector<std::string> axis_names;
  std::vector<int> resolution;
  std::vector<Trial> trials;  // row-major Cartesian order
  Trial best;
  int failures = 0;
};

// Full Cartesian evaluation; objective exceptions are recorded per point
// (scored as -inf), never fatal. Deterministic ordering.
ScanResult grid_scan(const Objective& objective, const ParameterSpace& space,
                     const std::vector<int>& resolution);

// Iterative 2-D scans over the scheduled axis pairs, all other axes held at
// the incumbent best point. Best objective is nondecreasing across rounds.
Trial alternating_scan(const Objective& objective, const ParameterSpace& space,
                       const std::vector<std::pair<int, int>>& schedule,
                       int rounds, int resolution_per_axis);

struct TpeOptions {
  int n_startup = 10;
  int n_candidates = 24;
  double gamma = 0.25;  // fraction of history modeled as "good"
};

struct TpeResult {
  Trial best;
  std::vector<Trial> history;
};

// Tree-structured Parzen estimator: after the uniform startup phase the
// history is split at the gamma quantile, per-axis Gaussian kernel densities
// l(x) (good) and g(x) (bad) are fit with Scott's-rule bandwidths truncated
// at the bounds, and each step evaluates the candidate maximizing l/g.
// Fully deterministic for a given space.seed.
TpeResult tpe_optimize(const Objective& objective, const ParameterSpace& space,
                       int n_trials, const TpeOptions& opts = {});

// Uniform random search baseline sharing the TPE sampling transforms.
TpeResult random_search(const Objective& objective, const ParameterSpace& space,
                        int n_trials);

void write_history_csv(const TpeResult& result, const ParameterSpace& space,
                       std::ostream& os);

std::string serialize_tpe_state(const TpeResult& result, const ParameterSpace& space);
TpeResult parse_tpe_state(const std::string& json_text, ParameterSpace& space_out);

// One-sided sign test: P(Binomial(n, 1/2) >= wins).
double sign_test_p_value(int wins, int n);

} // namespace purcell
