#include "purcell/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace purcell {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double to_internal(double v, const Axis& ax) {
  return ax.scale == AxisScale::log ? std::log10(v) : v;
}
double from_internal(double u, const Axis& ax) {
  return ax.scale == AxisScale::log ? std::pow(10.0, u) : u;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Gaussian KDE with per-kernel truncation to [lo, hi] and a uniform prior
// kernel; all in the internal (possibly log) coordinate.
struct ParzenAxis {
  std::vector<double> mu;
  double bandwidth = 1;
  double lo = 0, hi = 1;

  double density(double x) const {
    const double uniform = 1.0 / (hi - lo);
    double acc = uniform;  // prior kernel
    for (double m : mu) {
      const double z = (x - m) / bandwidth;
      const double mass = norm_cdf((hi - m) / bandwidth) - norm_cdf((lo - m) / bandwidth);
      if (mass <= 0) continue;
      const double pdf =
          std::exp(-0.5 * z * z) / (bandwidth * std::sqrt(2.0 * 3.14159265358979323846));
      acc += pdf / mass;
    }
    return acc / static_cast<double>(mu.size() + 1);
  }
};

ParzenAxis fit_parzen(const std::vector<double>& xs, double lo, double hi) {
  ParzenAxis p;
  p.mu = xs;
  p.lo = lo;
  p.hi = hi;
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= std::max<std::size_t>(1, xs.size());
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double n = static_cast<double>(xs.size());
  double sigma = n > 1 ? std::sqrt(var / (n - 1)) : (hi - lo) / 4.0;
  sigma = std::max(sigma, 1e-3 * (hi - lo));
  // Scott's rule, n^(-1/5) for one dimension
  p.bandwidth = sigma * std::pow(std::max(n, 2.0), -0.2);
  return p;
}

void check_point(const std::vector<double>& p, const ParameterSpace& space) {
  for (std::size_t a = 0; a < space.axes.size(); ++a) {
    if (p[a] < space.axes[a].lower || p[a] > space.axes[a].upper)
      throw OptimizeError("sampled point escaped the bounds on axis " +
                          space.axes[a].name);
  }
}

Trial evaluate(const Objective& objective, std::vector<double> point) {
  Trial t;
  t.point = std::move(point);
  try {
    t.objective = objective(t.point);
    if (std::isnan(t.objective)) {
      t.objective = kNegInf;
      t.failed = true;
    }
  } catch (const std::exception&) {
    t.objective = kNegInf;
    t.failed = true;
  }
  return t;
}

} // namespace

void ParameterSpace::validate() const {
  if (axes.empty()) throw OptimizeError("parameter space has no axes");
  for (const auto& ax : axes) {
    if (!(ax.lower < ax.upper))
      throw OptimizeError("axis '" + ax.name + "': lower bound must be below upper");
    if (ax.scale == AxisScale::log && !(ax.lower > 0))
      throw OptimizeError("axis '" + ax.name + "': log scale needs positive bounds");
  }
}

ScanResult grid_scan(const Objective& objective, const ParameterSpace& space,
                     const std::vector<int>& resolution) {
  space.validate();
  if (resolution.size() != space.axes.size())
    throw OptimizeError("need one resolution per axis");
  for (int r : resolution)
    if (r < 2) throw OptimizeError("grid resolution must be at least 2 per axis");

  ScanResult res;
  res.resolution = resolution;
  for (const auto& ax : space.axes) res.axis_names.push_back(ax.name);

  std::size_t total = 1;
  for (int r : resolution) total *= static_cast<std::size_t>(r);
  res.trials.reserve(total);
  res.best.objective = kNegInf;

  std::vector<int> idx(space.axes.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<double> point(space.axes.size());
    for (std::size_t a = 0; a < space.axes.size(); ++a) {
      const auto& ax = space.axes[a];
      const double u = to_internal(ax.lower, ax) +
                       (to_internal(ax.upper, ax) - to_internal(ax.lower, ax)) *
                           idx[a] / (resolution[a] - 1.0);
      point[a] = from_internal(u, ax);
    }
    Trial t = evaluate(objective, std::move(point));
    if (t.failed) ++res.failures;
    if (t.objective > res.best.objective) res.best = t;
    res.trials.push_back(std::move(t));
    // row-major increment, last axis fastest
    for (std::size_t a = space.axes.size(); a-- > 0;) {
      if (++idx[a] < resolution[a]) break;
      idx[a] = 0;
    }
  }
  return res;
}

Trial alternating_scan(const Objective& objective, const ParameterSpace& space,
                       const std::vector<std::pair<int, int>>& schedule,
                       int rounds, int resolution_per_axis) {
  space.validate();
  const auto n_axes = space.axes.size();
  std::vector<bool> covered(n_axes, false);
  for (const auto& [a, b] : schedule) {
    if (a < 0 || b < 0 || a >= static_cast<int>(n_axes) || b >= static_cast<int>(n_axes))
      throw OptimizeError("schedule references an axis out of range");
    covered[a] = covered[b] = true;
  }
  for (std::size_t a = 0; a < n_axes; ++a)
    if (!covered[a])
      throw OptimizeError("schedule does not cover axis '" + space.axes[a].name + "'");

  // start from the center of the space
  std::vector<double> current(n_axes);
  for (std::size_t a = 0; a < n_axes; ++a) {
    const auto& ax = space.axes[a];
    current[a] = from_internal(
        (to_internal(ax.lower, ax) + to_internal(ax.upper, ax)) / 2.0, ax);
  }
  Trial best = evaluate(objective, current);

  for (int round = 0; round < rounds; ++round) {
    for (const auto& [a, b] : schedule) {
      ParameterSpace sub;
      sub.axes = {space.axes[a], space.axes[b]};
      const auto fixed = best.point;
      const Objective plane = [&](const std::vector<double>& xy) {
        std::vector<double> p = fixed;
        p[a] = xy[0];
        p[b] = xy[1];
        return objective(p);
      };
      const ScanResult scan =
          grid_scan(plane, sub, {resolution_per_axis, resolution_per_axis});
      if (scan.best.objective > best.objective) {
        best.point[a] = scan.best.point[0];
        best.point[b] = scan.best.point[1];
        best.objective = scan.best.objective;
        best.failed = false;
      }
    }
  }
  return best;
}

TpeResult tpe_optimize(const Objective& objective, const ParameterSpace& space,
                       int n_trials, const TpeOptions& opts) {
  space.validate();
  if (n_trials < 10) throw OptimizeError("tpe needs at least 10 trials");
  if (!(opts.gamma > 0 && opts.gamma < 1))
    throw OptimizeError("gamma must lie strictly between 0 and 1");

  std::mt19937_64 rng(space.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto n_axes = space.axes.size();
  std::vector<double> lo(n_axes), hi(n_axes);
  for (std::size_t a = 0; a < n_axes; ++a) {
    lo[a] = to_internal(space.axes[a].lower, space.axes[a]);
    hi[a] = to_internal(space.axes[a].upper, space.axes[a]);
  }

  const auto uniform_point = [&] {
    std::vector<double> p(n_axes);
    for (std::size_t a = 0; a < n_axes; ++a)
      p[a] = from_internal(lo[a] + (hi[a] - lo[a]) * unit(rng), space.axes[a]);
    return p;
  };

  TpeResult res;
  res.best.objective = kNegInf;
  for (int t = 0; t < n_trials; ++t) {
    std::vector<double> point;
    if (t < opts.n_startup) {
      point = uniform_point();
    } else {
      // split history at the gamma quantile into good and bad sets
      std::vector<std::size_t> order(res.history.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return res.history[x].objective > res.history[y].objective;
      });
      const auto n_good = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(opts.gamma * order.size())));

      std::vector<ParzenAxis> good(n_axes), bad(n_axes);
      for (std::size_t a = 0; a < n_axes; ++a) {
        std::vector<double> gx, bx;
        for (std::size_t i = 0; i < order.size(); ++i) {
          const double v = to_internal(res.history[order[i]].point[a], space.axes[a]);
          (i < n_good ? gx : bx).push_back(v);
        }
        good[a] = fit_parzen(gx, lo[a], hi[a]);
        bad[a] = bx.empty() ? fit_parzen(gx, lo[a], hi[a]) : fit_parzen(bx, lo[a], hi[a]);
      }

      // propose candidates from l(x) and keep the best l/g ratio
      double best_ratio = kNegInf;
      std::vector<double> best_cand;
      for (int c = 0; c < opts.n_candidates; ++c) {
        std::vector<double> cand(n_axes);
        for (std::size_t a = 0; a < n_axes; ++a) {
          const auto& g = good[a];
          const auto k = static_cast<std::size_t>(unit(rng) * (g.mu.size() + 1));
          double x;
          if (k >= g.mu.size()) {
            x = lo[a] + (hi[a] - lo[a]) * unit(rng);  // prior kernel
          } else {
            x = g.mu[k] + g.bandwidth * gauss(rng);
            int guard = 0;
            while ((x < lo[a] || x > hi[a]) && ++guard < 64)
              x = g.mu[k] + g.bandwidth * gauss(rng);
            x = std::clamp(x, lo[a], hi[a]);
          }
          cand[a] = x;
        }
        double log_ratio = 0;
        for (std::size_t a = 0; a < n_axes; ++a)
          log_ratio += std::log(good[a].density(cand[a])) -
                       std::log(bad[a].density(cand[a]));
        if (log_ratio > best_ratio) {
          best_ratio = log_ratio;
          best_cand = cand;
        }
      }
      point.resize(n_axes);
      for (std::size_t a = 0; a < n_axes; ++a)
        point[a] = from_internal(best_cand[a], space.axes[a]);
    }
    check_point(point, space);
    Trial trial = evaluate(objective, std::move(point));
    if (trial.objective > res.best.objective) res.best = trial;
    res.history.push_back(std::move(trial));
  }
  return res;
}

TpeResult random_search(const Objective& objective, const ParameterSpace& space,
                        int n_trials) {
  space.validate();
  std::mt19937_64 rng(space.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TpeResult res;
  res.best.objective = kNegInf;
  for (int t = 0; t < n_trials; ++t) {
    std::vector<double> p(space.axes.size());
    for (std::size_t a = 0; a < space.axes.size(); ++a) {
      const auto& ax = space.axes[a];
      const double u = to_internal(ax.lower, ax) +
                       (to_internal(ax.upper, ax) - to_internal(ax.lower, ax)) * unit(rng);
      p[a] = from_internal(u, ax);
    }
    Trial trial = evaluate(objective, std::move(p));
    if (trial.objective > res.best.objective) res.best = trial;
    res.history.push_back(std::move(trial));
  }
  return res;
}

void write_history_csv(const TpeResult& result, const ParameterSpace& space,
                       std::ostream& os) {
  os << "trial";
  for (const auto& ax : space.axes) os << "," << ax.name;
  os << ",objective,failed\n";
  char buf[64];
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    os << i;
    for (double v : result.history[i].point) {
      std::snprintf(buf, sizeof buf, ",%.12g", v);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.12g,%d\n", result.history[i].objective,
                  result.history[i].failed ? 1 : 0);
    os << buf;
  }
}

std::string serialize_tpe_state(const TpeResult& result, const ParameterSpace& space) {
  nlohmann::json j;
  j["seed"] = space.seed;
  j["axes"] = nlohmann::json::array();
  for (const auto& ax : space.axes)
    j["axes"].push_back({{"name", ax.name},
                         {"lower", ax.lower},
                         {"upper", ax.upper},
                         {"scale", ax.scale == AxisScale::log ? "log" : "linear"}});
  j["history"] = nlohmann::json::array();
  for (const auto& t : result.history)
    j["history"].push_back(
        {{"point", t.point}, {"objective", t.objective}, {"failed", t.failed}});
  return j.dump(2);
}

TpeResult parse_tpe_state(const std::string& json_text, ParameterSpace& space_out) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw OptimizeError(std::string("state parse failure: ") + e.what());
  }
  space_out.axes.clear();
  space_out.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& ja : j.at("axes")) {
    Axis ax;
    ax.name = ja.at("name");
    ax.lower = ja.at("lower");
    ax.upper = ja.at("upper");
    ax.scale = ja.at("scale") == "log" ? AxisScale::log : AxisScale::linear;
    space_out.axes.push_back(ax);
  }
  TpeResult res;
  res.best.objective = kNegInf;
  for (const auto& jt : j.at("history")) {
    Trial t;
    t.point = jt.at("point").get<std::vector<double>>();
    t.objective = jt.at("objective");
    t.failed = jt.at("failed");
    if (t.objective > res.best.objective) res.best = t;
    res.history.push_back(std::move(t));
  }
  return res;
}

double sign_test_p_value(int wins, int n) {
  if (n <= 0) throw OptimizeError("sign test needs at least one sample");
  // P(Binomial(n, 1/2) >= wins), evaluated in log space
  double p = 0;
  for (int k = wins; k <= n; ++k) {
    double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    p += std::exp(log_c - n * std::log(2.0));
  }
  return std::min(1.0, p);
}

} // namespace purcell
