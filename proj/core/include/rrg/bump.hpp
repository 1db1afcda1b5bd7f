#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rrg/field.hpp"
#include "rrg/geodesic.hpp"
#include "rrg/metric.hpp"

namespace rrg {

// Cone and lens membership used by the bump event.
bool in_hinterland_cone(const Vec2& y, double theta);
bool in_frontier_cone(const Vec2& x, double phi);
// D^y = B(0, 2) ∩ B(y, |y|).
bool in_lens(const Vec2& x, const Vec2& y);

struct ConeFlags {
  bool in_hc = false, in_fc = false, in_lens = false;
};
ConeFlags cone_tests(const Vec2& point, const Vec2& y, double theta);

// Third order Taylor polynomial of the Fermi chart of g along the geodesic leaving the origin in
// direction e1. Coefficients c[a][b] multiply t^a n^b.
class FermiTaylor {
 public:
  explicit FermiTaylor(const MetricSample& origin);

  Vec2 operator()(const Vec2& u) const;
  Mat2 jacobian(const Vec2& u) const;
  std::array<Jet, 2> operator()(const Jet& t, const Jet& n) const;
  std::array<std::array<Jet, 2>, 2> jacobian(const Jet& t, const Jet& n) const;
  // Nearest preimage by Newton iteration from DPsi(0)^{-1} x; throws ChartFailure.
  Vec2 inverse(const Vec2& x) const;

  // gamma_b(t) = V t + P2 t^2 / 2 + P3 t^3 / 6.
  Vec2 speed() const { return c_[1][0]; }
  Vec2 accel() const { return 2.0 * c_[2][0]; }
  Vec2 jerk() const { return 6.0 * c_[3][0]; }
  const Vec2& coefficient(int a, int b) const { return c_[a][b]; }

 private:
  std::array<std::array<Vec2, 4>, 4> c_{};
  Mat2 d0_inv_;
};

// Numeric Fermi chart: follow gamma_g for time t, then the g-normal geodesic for arc length n.
// Both legs use a fixed number of RK4 steps so the chart is smooth in (t, n).
class FermiChart {
 public:
  FermiChart(MetricPtr g, int steps = 800);

  Vec2 operator()(double t, double n) const;
  Vec2 normal(double t) const;
  // DPhi^T g(Phi) DPhi, with DPhi by fourth order central differences.
  Mat2 pullback(double t, double n, double fd = 1e-4) const;
  // Christoffel symbols of the pull-back at (t, n), from fourth order differences of pullback.
  Christoffel pullback_christoffel(double t, double n, double fd = 1e-3) const;
  // d^2/dn^2 of the pulled-back g_11 at (t, n).
  double pullback_g11_nn(double t, double n, double fd = 1e-2) const;

 private:
  Vec2 base(double t) const;
  Vec2 base_velocity(double t) const;
  MetricPtr g_;
  int steps_;
};

struct BumpSpec {
  double K0 = 0.0;
  double tau = 0.0;
  double K_plus = 0.0;
  double K_max = 1.0;
  double M = 1.0;
  double L = 1.0;
  double delta_chart = 0.0;
  double theta = 0.0;
  double phi_angle = 0.0;
  double h = 0.0;
  double epsilon = 0.0;
  double rho_blend = 0.0;
  double rho_outer = 1.0;

  // Checks the four tau bounds, tau <= 1/2 and the curvature bounds; throws InvalidBumpSpec.
  static BumpSpec make(double K0, double tau, double M, double L, double delta_chart, double theta, double h,
                       double epsilon);
  std::array<double, 4> tau_bounds() const;
  // Triangle I = {0 <= t <= tau, |n| <= t / sqrt(K_max)}.
  bool in_triangle(double t, double n) const;
  std::string to_json() const;
};

// Piecewise linear profile from K0 to K_plus over [0, tau/4], then constant. Throws OutOfRange.
double curvature_profile(const BumpSpec& spec, double t);
// f = diag(1 - K(t) n^2, 1) on the triangle. Throws OutOfRegion.
Mat2 fermi_metric(const BumpSpec& spec, double t, double n);

// b(g): push-forward of the Fermi bump metric through Psi near the central curve, the pushed-forward
// flat metric away from it, and the Euclidean metric outside rho_outer.
class BumpMetric final : public MetricField {
 public:
  BumpMetric(BumpSpec spec, FermiTaylor psi);

  MetricSample evaluate(const Vec2& x) const override;
  bool contains(const Vec2&) const override { return true; }
  std::string describe() const override;

  const BumpSpec& spec() const { return spec_; }
  const FermiTaylor& chart() const { return psi_; }
  // Metric in Fermi coordinates including the strip blend; equals fermi_metric on the triangle.
  SymJet fermi_jet(const Jet& t, const Jet& n) const;

 private:
  BumpSpec spec_;
  FermiTaylor psi_;
  double n_in_, n_out_;
};

struct BumpOptions {
  double h = 0.5;         // admissibility: Z_0(g) <= 2h
  double theta = kPi / 4;  // frontier exit angle bound
  double epsilon = 0.1;
  double tau_safety = 0.9;
};

struct ChartConstants {
  double M = 1.0, L1 = 1.0, L2 = 0.0, delta = 0.0, sigma_min = 0.0;
};
ChartConstants chart_constants(const FermiTaylor& psi, double tau_for_l2 = 0.0, double K_max = 1.0);

struct Bump {
  BumpSpec spec;
  std::shared_ptr<const BumpMetric> metric;
  double z0 = 0.0;
};

// Throws PreconditionZ when Z_0(g) > 2h and ChartFailure when Psi(I) leaves the frontier cone or
// the blend radii are inconsistent.
Bump build_bump(const MetricField& g, const BumpOptions& options);

// Z_0(g) < 2h and |g - b(g)|_{C^{2,1}(FC)} < epsilon.
bool bump_event(const MetricField& g, const BumpOptions& options, double fc_spacing = 0.05);

// S cos(k.x + phase) for a unit-Frobenius symmetric S; not a metric on its own.
MetricPtr cosine_perturbation(const Mat2& S, const Vec2& k, double phase);
std::vector<MetricPtr> perturbation_directions(int count, std::uint64_t seed);
// Zero tensor field, the reference for norms of perturbations.
MetricPtr zero_field();

struct JacobiCheck {
  double tau = 0.0;
  double plateau_error = 0.0;  // max |j - sin(2 pi (t - tau/4) / tau)| on [tau/4, tau]
  double j_tau = 0.0;
  std::optional<double> conjugate;  // first zero after tau/4
};
// Jacobi field along the geodesic of `g` from (0, e1), started at tau/4 with j = 0, j' = 2 pi / tau.
JacobiCheck bump_jacobi(const MetricField& g, double tau, int steps = 4000);

struct BumpVerification {
  BumpSpec spec;
  double z0 = 0.0;
  double K0_g = 0.0, K0_b = 0.0;
  double c2_origin = 0.0;
  double chart_flatness = 0.0;  // max |pullback(t, 0) - I| over t in [0, tau]
  bool j_in_cone = false;
  JacobiCheck jacobi;
  std::vector<double> perturbed_j_tau;  // one per direction at the requested epsilon
  std::string to_json() const;
};

// Full check of one admissible sample. `g` must be shared for the numeric chart.
BumpVerification verify_bump(const MetricPtr& g, const BumpOptions& options,
                             const std::vector<MetricPtr>& directions, double fc_spacing = 0.05);

// Largest candidate epsilon for which every (sample, direction) pair keeps j(g, tau) < 0.
double calibrate_epsilon(const std::vector<Bump>& pilots, const std::vector<MetricPtr>& directions,
                         const std::vector<double>& candidates, double fc_spacing = 0.05);
// j(b + eta P, tau) with eta chosen so that |eta P|_{C^{2,1}(FC)} = 0.99 epsilon.
double perturbed_j_tau(const Bump& bump, const MetricPtr& direction, double epsilon, double fc_spacing = 0.05);

}  // namespace rrg
