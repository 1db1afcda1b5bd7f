#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rrg/metric.hpp"

namespace rrg {

struct UnitTangentState {
  Vec2 x = Vec2::Zero();
  Vec2 v = Vec2::UnitX();
};

struct FlowValue {
  Vec2 dx;
  Vec2 dv;
};

// lambda = 1/sqrt(<v, g v>) and a = -lambda Gamma(v, v) at one state.
struct FlowTerms {
  double lambda;
  Vec2 a;
};

FlowTerms flow_terms(const MetricSample& s, const Christoffel& gamma, const Vec2& v);

// U_g(x, v) = (lambda v, a - <a, v> v).
FlowValue flow_field(const MetricField& g, const UnitTangentState& s);

// Divergence of U_g on R^2 x S^1 with respect to dx dphi, assembled from the partial derivatives
// of the two components (d/dx of lambda v, d/dphi of the angular speed <a, v_perp>).
double divergence_U(const MetricField& g, const UnitTangentState& s);

// Closed form -<grad log det g, x'> - c <x'', x'> / |x'|^2 with x' = lambda v, x'' = lambda a.
// The Liouville density det(g) lambda^2 is invariant under the flow, which fixes c = 2.
constexpr double kLiouvilleCoefficient = 2.0;
double divergence_closed_form(const MetricField& g, const UnitTangentState& s,
                              double coefficient = kLiouvilleCoefficient);

class GeodesicPath {
 public:
  std::vector<double> t;
  std::vector<Vec2> x;
  std::vector<Vec2> v;  // oriented along increasing time
  std::vector<double> lambda;
  double h = 0.0;
  std::string metric_id;

  std::size_t size() const { return t.size(); }
  double t_front() const { return t.front(); }
  double t_back() const { return t.back(); }
  double t_min() const { return std::min(t.front(), t.back()); }
  double t_max() const { return std::max(t.front(), t.back()); }

  // Cubic Hermite dense output from the stored positions and velocities lambda v.
  Vec2 position(double time) const;
  Vec2 velocity(double time) const;
  // Direction field at an arbitrary time (normalised Hermite velocity).
  Vec2 direction(double time) const;
  // O_t = [v_t | v_t^perp].
  Mat2 frame(std::size_t k) const { return frame_from(v[k]); }
  Vec2 point(std::size_t k) const { return x[k]; }

  void write_csv(std::ostream& out) const;

 private:
  std::size_t bracket(double time) const;
};

// Fixed-step RK4 with per-step renormalisation of v. Negative T integrates backward in time by
// reversing the direction. The last step is shortened to land on T exactly.
GeodesicPath integrate(const MetricField& g, const UnitTangentState& start, double T, double h);

// Integrates until the path leaves B(0, r) (one step past the exit) or until T_max.
GeodesicPath integrate_to_exit(const MetricField& g, const UnitTangentState& start, double r, double T_max,
                               double h);

// First t >= 0 with |gamma(t)| > r; nullopt is the trapped (tau_r = infinity) convention.
std::optional<double> exit_time(const GeodesicPath& path, double r);
// Exit angle in [0, pi/2]; throws NoExit.
double exit_angle(const GeodesicPath& path, double r);

}  // namespace rrg
