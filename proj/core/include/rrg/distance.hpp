#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rrg/field.hpp"
#include "rrg/geodesic.hpp"
#include "rrg/metric.hpp"

namespace rrg {

// Primitive offsets (a, b) with max(|a|, |b|) <= radius: 8, 16 and 32 neighbours for radius 1, 2, 3.
std::vector<std::array<int, 2>> stencil(int radius);

class DistanceMap {
 public:
  GridSpec grid;
  int source_i = 0, source_j = 0;
  int stencil_radius = 3;
  std::vector<double> d;
  std::vector<int> parent;

  double at(int i, int j) const { return d[static_cast<std::size_t>(j) * grid.n + i]; }
  Vec2 source() const { return grid.node(source_i, source_j); }
  // Bilinear interpolation; throws OutOfDomain outside the node box.
  double query(const Vec2& x) const;
  // Node path from the source to node (i, j).
  std::vector<Vec2> trace(int i, int j) const;

  std::string metadata_json() const;
  void write_binary(std::ostream& out) const;
};

// Dijkstra on the node graph of `grid`; edge weight is the trapezoidal Riemannian length of the
// straight segment. The source is snapped to the nearest node.
DistanceMap distance_map(const MetricField& g, const GridSpec& grid, const Vec2& source, int stencil_radius = 3);

// Default tolerance: 2% of t plus two cells.
double minimality_tolerance(const DistanceMap& dm, double t);

// First time at which d(gamma(0), gamma(t)) < t - tol(t), scanning path samples and refining by
// bisection; nullopt if it never happens up to T. Minimality at t is "t < failure time", which
// makes the predicate monotone in t.
std::optional<double> minimality_failure(const DistanceMap& dm, const GeodesicPath& path, double T);
bool is_minimizing(const DistanceMap& dm, const GeodesicPath& path, double t);

struct MinimizingFractionResult {
  std::vector<double> radii;
  std::vector<double> fraction;                        // per radius
  std::vector<std::vector<char>> minimizing;           // [direction][radius]
  std::vector<std::optional<double>> failure_time;     // per direction
  std::vector<GeodesicPath> paths;                     // per direction, to exit of max radius
  Vec2 dijkstra_direction = Vec2::UnitX();             // towards the closest node on the outer circle
};

MinimizingFractionResult minimizing_fraction(const MetricField& g, const DistanceMap& dm, int n_dirs,
                                             const std::vector<double>& radii, double h = 0.01);

struct ShapeOptions {
  CovarianceModel model;
  GridSpec grid{256, 20.48};
  std::vector<double> radii{2.0, 4.0, 6.0};
  std::size_t samples = 20;
  int directions = 16;
  std::uint64_t seed = 1;
  double bracket_epsilon = 0.25;
  int threads = 1;
};

struct ShapeRow {
  double r = 0.0, mu = 0.0, se = 0.0;
  double bracket_fraction = 0.0;  // share of minimizing exits inside (1 +- eps) mu r
};

std::vector<ShapeRow> shape_constant(const ShapeOptions& options,
                                     const std::function<MetricPtr(std::size_t)>& metric_for_sample = {});

struct FrontierRow {
  double r = 0.0, alpha = 0.0, z = 0.0;
  bool in_q = false;
};

struct FrontierReport {
  Vec2 direction;
  std::vector<FrontierRow> rows;
  double density = 0.0;
  std::vector<double> r_sequence;

  void write_csv(std::ostream& out) const;
};

FrontierReport frontier_scan(const MetricField& g, const Vec2& v, const std::vector<double>& radii, double theta,
                             double h, double lens_spacing = 0.1, double step = 0.01);

struct ChiRow {
  double r = 0.0, mean = 0.0, sd = 0.0;
};

struct ChiReport {
  std::vector<ChiRow> rows;
  bool zero_variance = false;
  double slope = 0.0, ci_low = 0.0, ci_high = 0.0;
  bool fitted = false;
};

// Standard deviation across samples of d(0, r e) for n_dirs fixed directions, averaged over
// directions, and the log-log slope against r.
ChiReport chi_scan(const std::function<MetricPtr(std::size_t)>& metric_for_sample, std::size_t samples,
                   const GridSpec& grid, const std::vector<double>& radii, int n_dirs, int threads = 1);

}  // namespace rrg
