#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rrg/field.hpp"
#include "rrg/geodesic.hpp"
#include "rrg/metric.hpp"

namespace rrg {

// u -> translation + rotation u.
struct RigidMotion {
  Vec2 translation = Vec2::Zero();
  Mat2 rotation = Mat2::Identity();

  Vec2 apply(const Vec2& u) const { return translation + rotation * u; }
  RigidMotion then(const RigidMotion& inner) const {
    return {apply(inner.translation), rotation * inner.rotation};
  }
};

// (sigma g)(u) = O^T g(x0 + O u) O, evaluated lazily on the base metric.
class PovMetric final : public MetricField {
 public:
  PovMetric(MetricPtr base, RigidMotion motion);

  MetricSample evaluate(const Vec2& u) const override;
  Mat2 value(const Vec2& u) const override;
  bool contains(const Vec2& u) const override { return base_->contains(motion_.apply(u)); }
  std::string describe() const override { return "pov(" + base_->describe() + ")"; }

  const RigidMotion& motion() const { return motion_; }
  const MetricPtr& base() const { return base_; }

 private:
  MetricPtr base_;
  RigidMotion motion_;
};

// sigma_t g for the geodesic `path` of g from (0, e1). t must lie within the path horizon.
std::shared_ptr<PovMetric> pov_transform(const MetricPtr& g, const GeodesicPath& path, double t);
// Convenience: integrates the geodesic of g from (0, e1) to time t (t may be negative).
std::shared_ptr<PovMetric> pov_at(const MetricPtr& g, double t, double h);

struct RhoResult {
  double rho = 1.0;             // exp of the Simpson integral of the closed-form integrand
  double rho_divergence = 1.0;  // exp(-integral of divergence_U)
  double log_det_term = 0.0;    // integral of <grad log det g, gamma'>
  double accel_term = 0.0;      // integral of <gamma'', gamma'> / |gamma'|^2
  double rho_with(double coefficient) const;
};

// rho_t(g) along the backward geodesic of g from (0, e1) on [-t, 0], composite Simpson with an
// even number of steps of size at most h.
RhoResult rho_density(const MetricField& g, double t, double h);

// Functionals used by the change-of-variables verifier.
struct Functional {
  std::string name;
  std::function<double(const MetricField&)> fn;
};
Functional functional_g11();
Functional functional_tanh_curvature();
Functional functional_clipped_z(double clip = 1500.0, double spacing = 0.05);
std::vector<Functional> default_functionals();

struct PovVerifyOptions {
  CovarianceModel model;
  GridSpec grid{64, 4.0};
  double t = 0.5;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  double step = 0.01;
  int threads = 1;
};

struct PovReport {
  std::string functional;
  double t = 0.0;
  std::size_t n = 0;
  double a = 0.0, b = 0.0, se = 0.0, z = 0.0;
  std::size_t excluded = 0;
  // Same estimate with the acceleration term weighted by 3 instead of 2, kept as a diagnostic.
  double b_alt = 0.0, z_alt = 0.0;
  bool pass = false;

  std::string to_json() const;
};

std::vector<PovReport> verify_change_of_variables(const PovVerifyOptions& options,
                                                  const std::vector<Functional>& functionals);

// Atoms of {t in [0, t_max] : tau_r(sigma_{-t} g) = t}.
std::vector<double> historical_exit_times(const MetricPtr& g, double r, double t_max, double resolution,
                                          double h = 0.01);

}  // namespace rrg
