#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrg/bump.hpp"
#include "rrg/conditioning.hpp"
#include "rrg/distance.hpp"
#include "rrg/field.hpp"
#include "rrg/jacobi.hpp"
#include "rrg/stats.hpp"

namespace rrg::cli {

// One measured quantity against its bound; pass means value <= bound unless noted in the name.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  nlohmann::ordered_json to_json() const;
};

Check at_most(std::string name, double value, double bound);
Check at_least(std::string name, double value, double bound);
bool all_pass(const std::vector<Check>& checks);

struct ConditioningSuiteOptions {
  CovarianceModel model{1.0, 1.0};
  int n = 7;
  double spacing = 0.4;
  int trials = 20;
  int draws = 5000;
  // Side of the smaller grid used for the empirical covariance comparison.
  int covariance_grid = 4;
  std::uint64_t seed = 1;
};

std::vector<Check> conditioning_suite(const ConditioningSuiteOptions& o);

struct BumpSuiteOptions {
  CovarianceModel model{0.01, 1.0};
  GridSpec grid{64, 4.0};
  BumpOptions bump = [] {
    BumpOptions b;
    b.h = 10.0;
    return b;
  }();
  int samples = 20;
  int pilots = 5;
  int directions = 10;
  std::vector<double> candidates{1e-3, 1e-2, 1e-1};
  std::uint64_t seed = 1;
  int threads = 1;
};

struct BumpSuiteResult {
  double epsilon = 0.0;
  std::vector<std::uint64_t> seeds;  // admissible samples, in order
  std::vector<BumpVerification> verified;
  std::size_t skipped = 0;           // samples failing admissibility or the cone test
  std::vector<Check> checks;
};

BumpSuiteResult bump_suite(const BumpSuiteOptions& o);

struct MinimizingSuiteOptions {
  CovarianceModel model{0.3, 1.0};
  GridSpec grid{512, 20.48};
  std::vector<double> radii{2.0, 4.0, 8.0};
  int samples = 50;
  int directions = 16;
  double step = 0.01;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct MinimizingSample {
  std::vector<double> fraction;  // per radius
  bool nested = true;
  int geodesics = 0;
  int with_conjugate = 0;  // conjugate point before the exit of the largest radius
  std::vector<double> mu;  // mean d(0, r e) / r over directions
};

struct MinimizingSuiteResult {
  std::vector<MinimizingSample> samples;
  std::vector<double> mean_fraction;
  std::vector<double> mean_mu;
  double conjugate_share = 0.0;
  std::size_t excluded = 0;
};

MinimizingSuiteResult minimizing_suite(const MinimizingSuiteOptions& o,
                                       const std::function<MetricPtr(std::size_t)>& metric_for_sample = {});

struct TStarSuiteOptions {
  CovarianceModel model{0.3, 1.0};
  GridSpec grid{256, 12.8};
  double T_max = 5.0;
  double step = 0.01;
  int samples = 200;
  int survival_points = 50;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct TStarSample {
  std::optional<TStar> t_star;  // nullopt when the geodesic left the grid
  std::optional<double> conjugate;
};

struct TStarSuiteResult {
  std::vector<TStarSample> samples;
  std::vector<double> t, survival;
  LinearFit log_fit;  // log survival against t over the points with 0 < S < 1
  bool nonincreasing = true;
  std::size_t excluded = 0, at_horizon = 0;
};

TStarSuiteResult tstar_suite(const TStarSuiteOptions& o,
                             const std::function<MetricPtr(std::size_t)>& metric_for_sample = {});

}  // namespace rrg::cli
