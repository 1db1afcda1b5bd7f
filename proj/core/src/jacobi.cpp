#include "rrg/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rrg/errors.hpp"

namespace rrg {

CurvatureProfile::CurvatureProfile(const MetricField& g, const GeodesicPath& path, double t0, double t1) {
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  if (lo < path.t_min() - 1e-12 || hi > path.t_max() + 1e-12) throw OutOfDomain("jacobi interval outside path horizon");
  std::vector<std::size_t> order(path.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  if (path.t_back() < path.t_front()) std::reverse(order.begin(), order.end());
  std::size_t first = 0, last = order.size() - 1;
  while (first + 1 < order.size() && path.t[order[first + 1]] <= lo) ++first;
  while (last > 0 && path.t[order[last - 1]] >= hi) --last;
  for (std::size_t k = first; k <= last; ++k) {
    t_.push_back(path.t[order[k]]);
    k_.push_back(scalar_curvature(g, path.x[order[k]]));
  }
  if (t_.size() < 2) throw OutOfDomain("path too short for jacobi integration");
  for (double k : k_) max_abs_ = std::max(max_abs_, std::abs(k));
}

CurvatureProfile::CurvatureProfile(std::vector<double> t, std::vector<double> k) : t_(std::move(t)), k_(std::move(k)) {
  if (t_.size() != k_.size() || t_.size() < 2) throw InvalidArgument("curvature profile needs >= 2 samples");
  if (!std::is_sorted(t_.begin(), t_.end())) throw InvalidArgument("curvature profile times must increase");
  for (double v : k_) max_abs_ = std::max(max_abs_, std::abs(v));
}

double CurvatureProfile::operator()(double time) const {
  if (time <= t_.front()) return k_.front();
  if (time >= t_.back()) return k_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), time);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double s = (time - t_[i]) / (t_[i + 1] - t_[i]);
  return (1.0 - s) * k_[i] + s * k_[i + 1];
}

namespace {

double refined_step(const CurvatureProfile& K, double h) {
  const double w = std::sqrt(K.max_abs());
  return w > 0.0 ? std::min(h, 0.02 / w) : h;
}

void rk4(const CurvatureProfile& K, double t, double dt, double& j, double& jp) {
  const double k1j = jp, k1p = -K(t) * j;
  const double k2j = jp + 0.5 * dt * k1p, k2p = -K(t + 0.5 * dt) * (j + 0.5 * dt * k1j);
  const double k3j = jp + 0.5 * dt * k2p, k3p = -K(t + 0.5 * dt) * (j + 0.5 * dt * k2j);
  const double k4j = jp + dt * k3p, k4p = -K(t + dt) * (j + dt * k3j);
  j += dt / 6.0 * (k1j + 2 * k2j + 2 * k3j + k4j);
  jp += dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
}

}  // namespace

JacobiSolution jacobi_integrate(const CurvatureProfile& K, double t0, double j0, double jp0, double T, double h) {
  if (!(h > 0.0)) throw InvalidArgument("jacobi step must be positive");
  if (T < t0) throw InvalidArgument("jacobi integration runs forward: T < t0");
  const double dt = refined_step(K, h);
  JacobiSolution sol;
  double t = t0, j = j0, jp = jp0;
  sol.t.push_back(t);
  sol.j.push_back(j);
  sol.jp.push_back(jp);
  sol.K.push_back(K(t));
  const auto steps = static_cast<std::size_t>(std::ceil((T - t0) / dt - 1e-9));
  for (std::size_t k = 0; k < steps; ++k) {
    const double step = std::min(dt, T - t);
    rk4(K, t, step, j, jp);
    t = (k + 1 == steps) ? T : t + step;
    sol.t.push_back(t);
    sol.j.push_back(j);
    sol.jp.push_back(jp);
    sol.K.push_back(K(t));
  }
  return sol;
}

JacobiSolution jacobi_integrate(const MetricField& g, const GeodesicPath& path, double t0, double j0, double jp0,
                                double T) {
  const CurvatureProfile K(g, path, t0, T);
  return jacobi_integrate(K, t0, j0, jp0, T, path.h);
}

std::optional<double> first_conjugate_point(const CurvatureProfile& K, double T, double h, double t0) {
  const JacobiSolution sol = jacobi_integrate(K, t0, 0.0, 1.0, T, h);
  for (std::size_t k = 1; k < sol.size(); ++k) {
    if (sol.j[k] > 0.0) continue;
    if (sol.j[k] == 0.0) return sol.t[k];
    double lo = 0.0, hi = sol.t[k] - sol.t[k - 1];
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      double j = sol.j[k - 1], jp = sol.jp[k - 1];
      rk4(K, sol.t[k - 1], mid, j, jp);
      (j > 0.0 ? lo : hi) = mid;
    }
    return sol.t[k - 1] + 0.5 * (lo + hi);
  }
  return std::nullopt;
}

std::optional<double> first_conjugate_point(const MetricField& g, const GeodesicPath& path, double T, double t0) {
  const CurvatureProfile K(g, path, t0, T);
  return first_conjugate_point(K, T, path.h, t0);
}

TStar t_star(const DistanceMap& dm, const GeodesicPath& path, double T_max) {
  if (T_max > path.t_max() + 1e-12) throw OutOfDomain("T_max beyond path horizon");
  const auto fail = minimality_failure(dm, path, T_max);
  if (!fail) return {T_max, true};
  return {*fail, false};
}

void JacobiSolution::write_csv(std::ostream& out) const {
  out << "t,j,jp,K\n";
  out.precision(12);
  for (std::size_t k = 0; k < t.size(); ++k) out << t[k] << ',' << j[k] << ',' << jp[k] << ',' << K[k] << '\n';
}

}  // namespace rrg
