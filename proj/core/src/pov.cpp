#include "rrg/pov.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "rrg/errors.hpp"
#include "rrg/parallel.hpp"
#include "rrg/region.hpp"
#include "rrg/rng.hpp"
#include "rrg/stats.hpp"

namespace rrg {

PovMetric::PovMetric(MetricPtr base, RigidMotion motion) : base_(std::move(base)), motion_(motion) {}

MetricSample PovMetric::evaluate(const Vec2& u) const {
  const MetricSample s = base_->evaluate(motion_.apply(u));
  const Mat2& o = motion_.rotation;
  MetricSample out;
  out.g = o.transpose() * s.g * o;
  for (int a = 0; a < 2; ++a) {
    const Mat2 d = o(0, a) * s.dg[0] + o(1, a) * s.dg[1];
    out.dg[a] = o.transpose() * d * o;
  }
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int p = 0; p < 3; ++p) {
    const int a = pairs[p][0], b = pairs[p][1];
    Mat2 d = Mat2::Zero();
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) d += o(k, a) * o(l, b) * s.second(k, l);
    out.ddg[p] = o.transpose() * d * o;
  }
  return out;
}

Mat2 PovMetric::value(const Vec2& u) const {
  const Mat2& o = motion_.rotation;
  return o.transpose() * base_->value(motion_.apply(u)) * o;
}

std::shared_ptr<PovMetric> pov_transform(const MetricPtr& g, const GeodesicPath& path, double t) {
  if (t < path.t_min() - 1e-12 || t > path.t_max() + 1e-12) throw HorizonExceeded("t outside path horizon");
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (std::abs(path.t[k] - t) <= 1e-12) return std::make_shared<PovMetric>(g, RigidMotion{path.x[k], path.frame(k)});
  }
  return std::make_shared<PovMetric>(g, RigidMotion{path.position(t), frame_from(path.direction(t))});
}

std::shared_ptr<PovMetric> pov_at(const MetricPtr& g, double t, double h) {
  const GeodesicPath path = integrate(*g, UnitTangentState{}, t, h);
  return pov_transform(g, path, t);
}

double RhoResult::rho_with(double coefficient) const {
  return std::exp(log_det_term + coefficient * accel_term);
}

RhoResult rho_density(const MetricField& g, double t, double h) {
  if (t < 0.0) throw InvalidArgument("rho_density needs t >= 0");
  RhoResult out;
  if (t == 0.0) return out;
  const long m = std::max<long>(2, 2 * static_cast<long>(std::ceil(t / (2.0 * h))));
  const double step = t / static_cast<double>(m);
  const GeodesicPath path = integrate(g, UnitTangentState{}, -t, step);
  if (static_cast<long>(path.size()) != m + 1) throw HorizonExceeded("backward path incomplete");
  double i1 = 0.0, i2 = 0.0, idiv = 0.0;
  for (long k = 0; k <= m; ++k) {
    const double w = (k == 0 || k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const MetricSample s = g.evaluate(path.x[k]);
    const FlowTerms f = flow_terms(s, christoffel(s), path.v[k]);
    i1 += w * grad_log_det(s).dot(f.lambda * path.v[k]);
    i2 += w * f.a.dot(path.v[k]);
    idiv += w * divergence_U(g, UnitTangentState{path.x[k], path.v[k]});
  }
  out.log_det_term = i1 * step / 3.0;
  out.accel_term = i2 * step / 3.0;
  out.rho = out.rho_with(kLiouvilleCoefficient);
  out.rho_divergence = std::exp(-idiv * step / 3.0);
  return out;
}

Functional functional_g11() {
  return {"g11", [](const MetricField& g) { return g.value(Vec2::Zero())(0, 0); }};
}

Functional functional_tanh_curvature() {
  return {"tanh_curvature", [](const MetricField& g) { return std::tanh(scalar_curvature(g, Vec2::Zero())); }};
}

Functional functional_clipped_z(double clip, double spacing) {
  return {"clipped_z", [clip, spacing](const MetricField& g) {
            return std::min(clip, z_fluctuation(g, Region::disk(Vec2::Zero(), 0.5, spacing)).value);
          }};
}

std::vector<Functional> default_functionals() {
  return {functional_g11(), functional_tanh_curvature(), functional_clipped_z()};
}

std::string PovReport::to_json() const {
  nlohmann::json j = {{"functional", functional}, {"t", t},   {"N", n},   {"A", a},
                      {"B", b},                   {"SE", se}, {"z", z},   {"excluded", excluded}};
  return j.dump();
}

std::vector<PovReport> verify_change_of_variables(const PovVerifyOptions& options,
                                                  const std::vector<Functional>& functionals) {
  const std::size_t nf = functionals.size();
  const std::size_t n = options.samples;
  // Per sample: f(sigma_t g), f(g), rho with the Liouville weight and with the alternative weight.
  std::vector<std::vector<double>> fa(nf, std::vector<double>(n)), fb(nf, std::vector<double>(n));
  std::vector<double> rho(n), rho_alt(n);
  std::vector<char> ok(n, 0);

  parallel_for(n, options.threads, [&](std::size_t i) {
    const auto sample = sample_field(options.model, options.grid, derive_seed(options.seed, 0x90f, i));
    const MetricPtr g = make_grid_metric(sample);
    try {
      const GeodesicPath path = integrate(*g, UnitTangentState{}, options.t, options.step);
      const auto pov = pov_transform(g, path, options.t);
      const RhoResult r = rho_density(*g, options.t, options.step);
      for (std::size_t f = 0; f < nf; ++f) {
        fa[f][i] = functionals[f].fn(*pov);
        fb[f][i] = functionals[f].fn(*g);
      }
      rho[i] = r.rho;
      rho_alt[i] = r.rho_with(3.0);
      ok[i] = 1;
    } catch (const LeftDomain&) {
    } catch (const OutOfDomain&) {
    }
  });

  std::vector<PovReport> reports;
  for (std::size_t f = 0; f < nf; ++f) {
    PovReport rep;
    rep.functional = functionals[f].name;
    rep.t = options.t;
    std::vector<double> a, b, d, b2, d2;
    for (std::size_t i = 0; i < n; ++i) {
      if (!ok[i]) continue;
      a.push_back(fa[f][i]);
      b.push_back(fb[f][i] * rho[i]);
      b2.push_back(fb[f][i] * rho_alt[i]);
      d.push_back(a.back() - b.back());
      d2.push_back(a.back() - b2.back());
    }
    rep.n = a.size();
    rep.excluded = n - rep.n;
    rep.a = mean(a);
    rep.b = mean(b);
    rep.b_alt = mean(b2);
    rep.se = standard_error(d);
    auto zscore = [](double diff, double se) {
      if (diff == 0.0) return 0.0;
      return se > 0.0 ? diff / se : std::copysign(std::numeric_limits<double>::infinity(), diff);
    };
    rep.z = zscore(rep.a - rep.b, rep.se);
    rep.z_alt = zscore(rep.a - rep.b_alt, standard_error(d2));
    rep.pass = std::abs(rep.a - rep.b) <= 3.0 * rep.se;
    reports.push_back(rep);
  }
  return reports;
}

namespace {

// tau_r(sigma_{-t} g) - t. The geodesic of sigma_{-t} g is the base geodesic restarted at
// gamma(-t), and rigid motions preserve norms, so this is the absolute time at which the base
// geodesic first leaves B(gamma(-t), r). Infinity if it does not leave within the path.
double exit_gap(const GeodesicPath& path, double t, double r) {
  const Vec2 p = path.position(-t);
  double lo = -t;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path.t[k] <= -t) continue;
    if ((path.x[k] - p).norm() <= r) {
      lo = path.t[k];
      continue;
    }
    double hi = path.t[k];
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((path.position(mid) - p).norm() > r) hi = mid; else lo = mid;
    }
    return hi;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<double> historical_exit_times(const MetricPtr& g, double r, double t_max, double resolution,
                                          double h) {
  if (r <= 0.0) throw InvalidArgument("radius must be positive");
  if (resolution <= 0.0) throw InvalidArgument("resolution must be positive");
  const GeodesicPath back = integrate(*g, UnitTangentState{}, -(t_max + resolution), h);
  const GeodesicPath fwd = integrate(*g, UnitTangentState{}, std::max(1.0, 4.0 * resolution), h);
  GeodesicPath path;
  path.h = h;
  path.metric_id = back.metric_id;
  for (std::size_t k = back.size(); k-- > 0;) {
    path.t.push_back(back.t[k]);
    path.x.push_back(back.x[k]);
    path.v.push_back(back.v[k]);
    path.lambda.push_back(back.lambda[k]);
  }
  for (std::size_t k = 1; k < fwd.size(); ++k) {
    path.t.push_back(fwd.t[k]);
    path.x.push_back(fwd.x[k]);
    path.v.push_back(fwd.v[k]);
    path.lambda.push_back(fwd.lambda[k]);
  }

  const auto steps = static_cast<long>(std::floor(t_max / resolution + 1e-9));
  std::vector<double> ts, gap;
  for (long j = 0; j <= steps; ++j) {
    ts.push_back(j * resolution);
    gap.push_back(exit_gap(path, ts.back(), r));
  }
  std::vector<double> atoms;
  auto push = [&](double t) {
    if (atoms.empty() || t - atoms.back() > resolution) atoms.push_back(t);
  };
  for (std::size_t j = 0; j < ts.size(); ++j) {
    if (gap[j] == 0.0) {
      push(ts[j]);
      continue;
    }
    if (j + 1 == ts.size() || !std::isfinite(gap[j]) || !std::isfinite(gap[j + 1])) continue;
    if ((gap[j] < 0.0) == (gap[j + 1] < 0.0) || gap[j + 1] == 0.0) continue;
    double lo = ts[j], hi = ts[j + 1];
    const bool lo_negative = gap[j] < 0.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f = exit_gap(path, mid, r);
      if ((f < 0.0) == lo_negative) lo = mid; else hi = mid;
    }
    const double root = 0.5 * (lo + hi);
    // A jump of the exit time across zero is not a solution.
    if (std::abs(exit_gap(path, root, r)) < resolution) push(root);
  }
  return atoms;
}

}  // namespace rrg
