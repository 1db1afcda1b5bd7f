#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "rrg/distance.hpp"
#include "rrg/geodesic.hpp"
#include "rrg/metric.hpp"

namespace rrg {

struct JacobiSolution {
  std::vector<double> t, j, jp, K;

  std::size_t size() const { return t.size(); }
  void write_csv(std::ostream& out) const;
};

// Scalar curvature sampled at the path nodes, linearly interpolated in time.
class CurvatureProfile {
 public:
  CurvatureProfile(const MetricField& g, const GeodesicPath& path, double t0, double t1);
  explicit CurvatureProfile(std::vector<double> t, std::vector<double> k);
  double operator()(double time) const;
  double max_abs() const { return max_abs_; }

 private:
  std::vector<double> t_, k_;
  double max_abs_ = 0.0;
};

// RK4 for j'' + K j = 0 on [t0, T]. The step is the path step, refined so that sqrt(max|K|) step <= 0.02.
JacobiSolution jacobi_integrate(const CurvatureProfile& K, double t0, double j0, double jp0, double T, double h);
JacobiSolution jacobi_integrate(const MetricField& g, const GeodesicPath& path, double t0, double j0, double jp0,
                                double T);

// First zero t* > t0 of the solution with j(t0) = 0, j'(t0) = 1.
std::optional<double> first_conjugate_point(const CurvatureProfile& K, double T, double h, double t0 = 0.0);
std::optional<double> first_conjugate_point(const MetricField& g, const GeodesicPath& path, double T,
                                            double t0 = 0.0);

struct TStar {
  double time = 0.0;
  bool at_horizon = false;
};

// Supremum of the times at which the path is still minimizing according to `dm`, clamped at T_max.
TStar t_star(const DistanceMap& dm, const GeodesicPath& path, double T_max);

}  // namespace rrg
