#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "rrg/metric.hpp"
#include "rrg/types.hpp"

namespace rrg {

// Compact region sampled on a square lattice that is carried by its own frame
// (anchor + frame * spacing * (i, j)). Rigidly moving a region together with the metric moves
// the sample points with it, so Z is exactly invariant under rigid motions.
class Region {
 public:
  using Predicate = std::function<bool(const Vec2&)>;

  Region(Predicate inside, Vec2 anchor, Mat2 frame, double spacing, double half_width);

  static Region point(const Vec2& x);
  static Region disk(const Vec2& center, double radius, double spacing, const Mat2& frame = Mat2::Identity());
  // B(c1, r1) ∩ B(c2, r2), lattice anchored at `anchor`.
  static Region lens(const Vec2& c1, double r1, const Vec2& c2, double r2, double spacing,
                     const Vec2& anchor, const Mat2& frame = Mat2::Identity());
  // {0 <= x1 <= cos(phi), |x2| <= tan(phi) x1}.
  static Region frontier_cone(double phi, double spacing);

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<std::pair<int, int>>& adjacent() const { return adjacent_; }

 private:
  std::vector<Vec2> nodes_;
  std::vector<std::pair<int, int>> adjacent_;
};

struct FluctuationValue {
  double value = 0.0;     // Z_D
  double metric_c21 = 0.0;   // |g - delta|_{C^{2,1}(D)}
  double inverse_c11 = 0.0;  // |g^{-1} - delta|_{C^{1,1}(D)}
  std::size_t nodes = 0;
};

FluctuationValue z_fluctuation(const MetricField& g, const Region& d);

// |a - b|_{C^{2,1}(D)} with the same Frobenius conventions as Z.
double c21_distance(const MetricField& a, const MetricField& b, const Region& d);
// |a - b|_{C^2} at a single point.
double c2_distance_at(const MetricField& a, const MetricField& b, const Vec2& x);

}  // namespace rrg
