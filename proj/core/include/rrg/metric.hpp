#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "rrg/field.hpp"
#include "rrg/jet.hpp"
#include "rrg/types.hpp"

namespace rrg {

// g and its partial derivatives at one point. ddg holds (11, 12, 22).
struct MetricSample {
  Mat2 g = Mat2::Identity();
  std::array<Mat2, 2> dg{Mat2::Zero(), Mat2::Zero()};
  std::array<Mat2, 3> ddg{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};

  const Mat2& second(int k, int l) const { return ddg[k + l]; }
};

// Symmetric 2x2 matrix of jets.
struct SymJet {
  Jet a11, a12, a22;
};

MetricSample to_sample(const SymJet& m);
SymJet to_symjet(const MetricSample& s);

using Christoffel = std::array<Mat2, 2>;  // gamma[k](i, j) = Gamma^k_ij

class MetricField {
 public:
  virtual ~MetricField() = default;

  // Throws OutOfDomain outside the region where the field is defined.
  virtual MetricSample evaluate(const Vec2& x) const = 0;
  virtual bool contains(const Vec2& x) const = 0;
  // Value only; implementations override when it is cheaper than a full evaluation.
  virtual Mat2 value(const Vec2& x) const { return evaluate(x).g; }
  virtual std::string describe() const = 0;
};

using MetricPtr = std::shared_ptr<const MetricField>;

// phi(u) = u + sqrt(u^2 + 1) applied by spectral calculus.
double phi_scalar(double u);
Mat2 phi_transform(const Mat2& xi);
// Same map on jets, via sqrt(X^2 + I) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M)).
SymJet phi_transform(const SymJet& xi);

Christoffel christoffel(const MetricSample& s);
// Gaussian curvature (the 2-D curvature entering the Jacobi equation).
double scalar_curvature(const MetricSample& s);
// grad log det g.
Vec2 grad_log_det(const MetricSample& s);
// Derivatives of g^{-1}.
std::array<Mat2, 2> inverse_derivatives(const MetricSample& s);

inline Christoffel christoffel(const MetricField& g, const Vec2& x) { return christoffel(g.evaluate(x)); }
inline double scalar_curvature(const MetricField& g, const Vec2& x) {
  return scalar_curvature(g.evaluate(x));
}

// Closed form metric given as a jet-valued function of the coordinates.
class AnalyticMetric final : public MetricField {
 public:
  using Fn = std::function<SymJet(const Jet& x1, const Jet& x2)>;

  AnalyticMetric(std::string name, Fn fn, double radius = 1e300);

  MetricSample evaluate(const Vec2& x) const override;
  bool contains(const Vec2& x) const override { return x.norm() <= radius_; }
  std::string describe() const override { return name_; }

 private:
  std::string name_;
  Fn fn_;
  double radius_;
};

MetricPtr flat_metric();
MetricPtr constant_metric(double c);
// e^{2 lambda(x)} delta.
MetricPtr conformal_metric(std::string name, std::function<Jet(const Jet&, const Jet&)> lambda);
// (1 + K0 |x|^2 / 4)^{-2} delta, constant curvature K0.
MetricPtr sphere_metric(double k0 = 1.0);

// g = phi(xi) for a sampled tensor field, evaluated by C^2 biquintic Hermite interpolation of
// xi from the node values and their spectral derivatives. g, dg and ddg are derivatives of one
// interpolant, so geodesics, curvature and finite differences of g are mutually consistent.
class GridMetric final : public MetricField {
 public:
  explicit GridMetric(std::shared_ptr<const TensorFieldSample> sample);

  MetricSample evaluate(const Vec2& x) const override;
  bool contains(const Vec2& x) const override;
  Mat2 value(const Vec2& x) const override;
  std::string describe() const override;

  SymJet xi_jet(const Vec2& x) const;
  Mat2 node_value(int i, int j) const;
  const TensorFieldSample& sample() const { return *sample_; }

 private:
  std::shared_ptr<const TensorFieldSample> sample_;
};

MetricPtr make_grid_metric(TensorFieldSample sample);

// Pointwise weighted sum a*A + b*B; used for perturbations and blends in tests.
class SumMetric final : public MetricField {
 public:
  SumMetric(MetricPtr a, MetricPtr b, double wa, double wb) : a_(a), b_(b), wa_(wa), wb_(wb) {}
  MetricSample evaluate(const Vec2& x) const override;
  bool contains(const Vec2& x) const override { return a_->contains(x) && b_->contains(x); }
  std::string describe() const override { return "sum(" + a_->describe() + "," + b_->describe() + ")"; }

 private:
  MetricPtr a_, b_;
  double wa_, wb_;
};

}  // namespace rrg
