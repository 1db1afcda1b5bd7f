#include "rrg/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rrg/errors.hpp"

namespace rrg {

FlowTerms flow_terms(const MetricSample& s, const Christoffel& gamma, const Vec2& v) {
  const double lambda = 1.0 / std::sqrt(v.dot(s.g * v));
  Vec2 a;
  for (int k = 0; k < 2; ++k) a[k] = -lambda * v.dot(gamma[k] * v);
  return {lambda, a};
}

FlowValue flow_field(const MetricField& g, const UnitTangentState& s) {
  const MetricSample ms = g.evaluate(s.x);
  const FlowTerms f = flow_terms(ms, christoffel(ms), s.v);
  return {f.lambda * s.v, f.a - f.a.dot(s.v) * s.v};
}

double divergence_U(const MetricField& g, const UnitTangentState& s) {
  const MetricSample ms = g.evaluate(s.x);
  const Christoffel gamma = christoffel(ms);
  const Vec2& v = s.v;
  const Vec2 w = perp(v);
  const FlowTerms f = flow_terms(ms, gamma, v);
  const double l3 = f.lambda * f.lambda * f.lambda;
  double div_x = 0.0;
  for (int k = 0; k < 2; ++k) div_x += v[k] * (-0.5 * l3 * v.dot(ms.dg[k] * v));
  // d/dphi <a(v(phi)), v_perp(phi)> with v' = v_perp, v_perp' = -v.
  Vec2 gamma_vw;
  for (int k = 0; k < 2; ++k) gamma_vw[k] = v.dot(gamma[k] * w);
  const double div_phi = -f.lambda * f.lambda * v.dot(ms.g * w) * f.a.dot(w) -
                         2.0 * f.lambda * gamma_vw.dot(w) - f.a.dot(v);
  return div_x + div_phi;
}

double divergence_closed_form(const MetricField& g, const UnitTangentState& s, double coefficient) {
  const MetricSample ms = g.evaluate(s.x);
  const FlowTerms f = flow_terms(ms, christoffel(ms), s.v);
  const Vec2 xd = f.lambda * s.v;
  const Vec2 xdd = f.lambda * f.a;
  return -grad_log_det(ms).dot(xd) - coefficient * xdd.dot(xd) / xd.squaredNorm();
}

namespace {

struct Deriv {
  Vec2 dx, dv;
};

Deriv rhs(const MetricField& g, const Vec2& x, const Vec2& v, double t) {
  MetricSample ms;
  try {
    ms = g.evaluate(x);
  } catch (const OutOfDomain& e) {
    throw LeftDomain(t, e.what());
  }
  const FlowTerms f = flow_terms(ms, christoffel(ms), v);
  return {f.lambda * v, f.a - f.a.dot(v) * v};
}

double speed_factor(const MetricField& g, const Vec2& x, const Vec2& v, double t) {
  try {
    return 1.0 / std::sqrt(v.dot(g.value(x) * v));
  } catch (const OutOfDomain& e) {
    throw LeftDomain(t, e.what());
  }
}

void rk4_step(const MetricField& g, Vec2& x, Vec2& v, double t, double h) {
  const Deriv k1 = rhs(g, x, v, t);
  const Deriv k2 = rhs(g, x + 0.5 * h * k1.dx, v + 0.5 * h * k1.dv, t + 0.5 * h);
  const Deriv k3 = rhs(g, x + 0.5 * h * k2.dx, v + 0.5 * h * k2.dv, t + 0.5 * h);
  const Deriv k4 = rhs(g, x + h * k3.dx, v + h * k3.dv, t + h);
  x += (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  v += (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  v.normalize();
}

// Shared driver: `stop` is checked after every step.
template <typename Stop>
GeodesicPath run(const MetricField& g, const UnitTangentState& start, double T, double h, Stop stop) {
  if (h <= 0.0) throw InvalidArgument("step must be positive");
  const double sign = T < 0.0 ? -1.0 : 1.0;
  const double horizon = std::abs(T);
  GeodesicPath path;
  path.h = h;
  path.metric_id = g.describe();
  Vec2 x = start.x;
  Vec2 v = sign * start.v.normalized();
  double s = 0.0;
  auto record = [&] {
    path.t.push_back(sign * s);
    path.x.push_back(x);
    path.v.push_back(sign * v);
    path.lambda.push_back(speed_factor(g, x, v, sign * s));
  };
  record();
  const auto steps = static_cast<long>(std::ceil(horizon / h - 1e-9));
  for (long k = 0; k < steps; ++k) {
    const double step = std::min(h, horizon - s);
    if (step <= 0.0) break;
    rk4_step(g, x, v, sign * s, step);
    s = (k + 1 == steps) ? horizon : s + step;
    record();
    if (stop(x)) break;
  }
  return path;
}

}  // namespace

GeodesicPath integrate(const MetricField& g, const UnitTangentState& start, double T, double h) {
  return run(g, start, T, h, [](const Vec2&) { return false; });
}

GeodesicPath integrate_to_exit(const MetricField& g, const UnitTangentState& start, double r, double T_max,
                               double h) {
  return run(g, start, T_max, h, [r](const Vec2& x) { return x.norm() > r; });
}

std::size_t GeodesicPath::bracket(double time) const {
  if (t.size() < 2) throw HorizonExceeded("path has fewer than two samples");
  if (time < t_min() - 1e-12 || time > t_max() + 1e-12) throw HorizonExceeded("time outside path horizon");
  const bool forward = t.back() >= t.front();
  std::size_t k;
  if (forward) {
    k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), time) - t.begin());
  } else {
    k = static_cast<std::size_t>(
        std::upper_bound(t.begin(), t.end(), time, [](double a, double b) { return a > b; }) - t.begin());
  }
  if (k == 0) k = 1;
  if (k >= t.size()) k = t.size() - 1;
  return k - 1;
}

namespace {

struct Hermite {
  double h00, h10, h01, h11, d00, d10, d01, d11;
};

Hermite hermite3(double s) {
  const double s2 = s * s, s3 = s2 * s;
  return {2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, -2 * s3 + 3 * s2, s3 - s2,
          6 * s2 - 6 * s,      3 * s2 - 4 * s + 1, -6 * s2 + 6 * s, 3 * s2 - 2 * s};
}

}  // namespace

Vec2 GeodesicPath::position(double time) const {
  const std::size_t k = bracket(time);
  const double dt = t[k + 1] - t[k];
  const double s = (time - t[k]) / dt;
  const Hermite b = hermite3(s);
  return b.h00 * x[k] + b.h10 * dt * lambda[k] * v[k] + b.h01 * x[k + 1] + b.h11 * dt * lambda[k + 1] * v[k + 1];
}

Vec2 GeodesicPath::velocity(double time) const {
  const std::size_t k = bracket(time);
  const double dt = t[k + 1] - t[k];
  const double s = (time - t[k]) / dt;
  const Hermite b = hermite3(s);
  return (b.d00 * x[k] + b.d01 * x[k + 1]) / dt + b.d10 * lambda[k] * v[k] + b.d11 * lambda[k + 1] * v[k + 1];
}

Vec2 GeodesicPath::direction(double time) const { return velocity(time).normalized(); }

void GeodesicPath::write_csv(std::ostream& out) const {
  out << "t,x1,x2,v1,v2,lambda\n";
  out.precision(17);
  for (std::size_t k = 0; k < size(); ++k)
    out << t[k] << ',' << x[k].x() << ',' << x[k].y() << ',' << v[k].x() << ',' << v[k].y() << ','
        << lambda[k] << '\n';
}

std::optional<double> exit_time(const GeodesicPath& path, double r) {
  if (r < 0.0) throw InvalidArgument("radius must be nonnegative");
  if (path.x.front().norm() > r) return path.t.front();
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path.x[k].norm() <= r) continue;
    double lo = path.t[k - 1], hi = path.t[k];
    const double f_lo = path.x[k - 1].norm() - r, f_hi = path.x[k].norm() - r;
    double guess = lo + (hi - lo) * (-f_lo) / (f_hi - f_lo);
    if (path.position(guess).norm() > r) hi = guess; else lo = guess;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (path.position(mid).norm() > r) hi = mid; else lo = mid;
    }
    return hi;
  }
  return std::nullopt;
}

double exit_angle(const GeodesicPath& path, double r) {
  const auto tau = exit_time(path, r);
  if (!tau) throw NoExit("path does not leave the ball within its horizon");
  const Vec2 p = path.position(*tau);
  const Vec2 vel = path.velocity(*tau);
  const double c = std::clamp(p.dot(vel) / (r * vel.norm()), 0.0, 1.0);
  return std::acos(c);
}

}  // namespace rrg
