#include "rrg/distance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include <json.hpp>

#include "rrg/errors.hpp"
#include "rrg/parallel.hpp"
#include "rrg/region.hpp"
#include "rrg/rng.hpp"
#include "rrg/stats.hpp"

namespace rrg {

std::vector<std::array<int, 2>> stencil(int radius) {
  if (radius < 1) throw InvalidArgument("stencil radius must be >= 1");
  std::vector<std::array<int, 2>> out;
  for (int b = -radius; b <= radius; ++b)
    for (int a = -radius; a <= radius; ++a) {
      if (a == 0 && b == 0) continue;
      if (std::gcd(std::abs(a), std::abs(b)) != 1) continue;
      out.push_back({a, b});
    }
  return out;
}

DistanceMap distance_map(const MetricField& g, const GridSpec& grid, const Vec2& source, int stencil_radius) {
  DistanceMap dm;
  dm.grid = grid;
  dm.stencil_radius = stencil_radius;
  const int n = grid.n;
  const double h = grid.spacing();
  dm.source_i = std::clamp(static_cast<int>(std::lround((source.x() + grid.half()) / h)), 0, n - 1);
  dm.source_j = std::clamp(static_cast<int>(std::lround((source.y() + grid.half()) / h)), 0, n - 1);

  const std::size_t nn = grid.size();
  std::vector<Mat2> gn(nn);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) gn[static_cast<std::size_t>(j) * n + i] = g.value(grid.node(i, j));

  const auto offs = stencil(stencil_radius);
  std::vector<Vec2> delta;
  for (const auto& o : offs) delta.emplace_back(o[0] * h, o[1] * h);

  dm.d.assign(nn, std::numeric_limits<double>::infinity());
  dm.parent.assign(nn, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const int src = dm.source_j * n + dm.source_i;
  dm.d[src] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    const auto [dist, p] = heap.top();
    heap.pop();
    if (dist > dm.d[p]) continue;
    const int pi = p % n, pj = p / n;
    for (std::size_t s = 0; s < offs.size(); ++s) {
      const int qi = pi + offs[s][0], qj = pj + offs[s][1];
      if (qi < 0 || qj < 0 || qi >= n || qj >= n) continue;
      const int q = qj * n + qi;
      const Vec2& e = delta[s];
      const double w = 0.5 * (std::sqrt(e.dot(gn[p] * e)) + std::sqrt(e.dot(gn[q] * e)));
      if (dist + w < dm.d[q]) {
        dm.d[q] = dist + w;
        dm.parent[q] = p;
        heap.emplace(dm.d[q], q);
      }
    }
  }
  return dm;
}

double DistanceMap::query(const Vec2& x) const {
  const double h = grid.spacing();
  const double u = (x.x() + grid.half()) / h, w = (x.y() + grid.half()) / h;
  if (u < 0.0 || w < 0.0 || u > grid.n - 1 || w > grid.n - 1) throw OutOfDomain("distance query outside grid");
  const int i = std::min(static_cast<int>(u), grid.n - 2), j = std::min(static_cast<int>(w), grid.n - 2);
  const double s = u - i, r = w - j;
  return (1 - s) * (1 - r) * at(i, j) + s * (1 - r) * at(i + 1, j) + (1 - s) * r * at(i, j + 1) +
         s * r * at(i + 1, j + 1);
}

std::vector<Vec2> DistanceMap::trace(int i, int j) const {
  std::vector<Vec2> out;
  for (int p = j * grid.n + i; p >= 0; p = parent[p]) out.push_back(grid.node(p % grid.n, p / grid.n));
  std::reverse(out.begin(), out.end());
  return out;
}

std::string DistanceMap::metadata_json() const {
  nlohmann::json j = {{"kind", "distance_map"}, {"n", grid.n},          {"extent", grid.extent},
                      {"source", {source().x(), source().y()}},         {"stencil_radius", stencil_radius},
                      {"neighbours", stencil(stencil_radius).size()}};
  return j.dump();
}

void DistanceMap::write_binary(std::ostream& out) const {
  out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
}

double minimality_tolerance(const DistanceMap& dm, double t) { return 0.02 * t + 2.0 * dm.grid.spacing(); }

std::optional<double> minimality_failure(const DistanceMap& dm, const GeodesicPath& path, double T) {
  auto fails = [&](double t, const Vec2& x) { return dm.query(x) < t - minimality_tolerance(dm, t); };
  for (std::size_t k = 1; k < path.size() && path.t[k - 1] < T; ++k) {
    const double tk = std::min(path.t[k], T);
    const Vec2 xk = tk == path.t[k] ? path.x[k] : path.position(tk);
    if (!fails(tk, xk)) continue;
    double lo = path.t[k - 1], hi = tk;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (fails(mid, path.position(mid))) hi = mid; else lo = mid;
    }
    return hi;
  }
  return std::nullopt;
}

bool is_minimizing(const DistanceMap& dm, const GeodesicPath& path, double t) {
  const auto fail = minimality_failure(dm, path, t);
  return !fail || t < *fail;
}

MinimizingFractionResult minimizing_fraction(const MetricField& g, const DistanceMap& dm, int n_dirs,
                                             const std::vector<double>& radii, double h) {
  if (n_dirs < 8) throw InvalidArgument("minimizing_fraction needs at least 8 directions");
  if (radii.empty()) throw InvalidArgument("no radii");
  MinimizingFractionResult res;
  res.radii = radii;
  const double r_max = *std::max_element(radii.begin(), radii.end());
  res.fraction.assign(radii.size(), 0.0);
  for (int k = 0; k < n_dirs; ++k) {
    const double a = 2.0 * kPi * k / n_dirs;
    const UnitTangentState start{Vec2::Zero(), Vec2(std::cos(a), std::sin(a))};
    GeodesicPath path = integrate_to_exit(g, start, r_max, 10.0 * r_max, h);
    const auto fail = minimality_failure(dm, path, path.t_back());
    std::vector<char> flags(radii.size(), 0);
    for (std::size_t q = 0; q < radii.size(); ++q) {
      const auto tau = exit_time(path, radii[q]);
      flags[q] = tau && (!fail || *tau < *fail);
      res.fraction[q] += flags[q];
    }
    res.minimizing.push_back(std::move(flags));
    res.failure_time.push_back(fail);
    res.paths.push_back(std::move(path));
  }
  for (double& f : res.fraction) f /= n_dirs;

  // Closest node on the outer circle and the direction in which its Dijkstra path leaves.
  const double h_grid = dm.grid.spacing();
  double best = std::numeric_limits<double>::infinity();
  int bi = -1, bj = -1;
  for (int j = 0; j < dm.grid.n; ++j)
    for (int i = 0; i < dm.grid.n; ++i) {
      const double rad = dm.grid.node(i, j).norm();
      if (rad >= r_max && rad < r_max + 1.5 * h_grid && dm.at(i, j) < best) {
        best = dm.at(i, j);
        bi = i;
        bj = j;
      }
    }
  if (bi >= 0) {
    const auto nodes = dm.trace(bi, bj);
    const double probe = 0.5 * std::min(r_max, 1.0);
    for (const Vec2& p : nodes)
      if ((p - dm.source()).norm() >= probe) {
        res.dijkstra_direction = (p - dm.source()).normalized();
        break;
      }
  }
  return res;
}

std::vector<ShapeRow> shape_constant(const ShapeOptions& options,
                                     const std::function<MetricPtr(std::size_t)>& metric_for_sample) {
  const std::size_t ns = options.samples;
  const std::size_t nr = options.radii.size();
  std::vector<std::vector<double>> ratio(nr, std::vector<double>(ns * options.directions));
  std::vector<std::vector<double>> exits(nr, std::vector<double>(ns * options.directions, -1.0));
  parallel_for(ns, options.threads, [&](std::size_t s) {
    MetricPtr g = metric_for_sample ? metric_for_sample(s)
                                    : make_grid_metric(sample_field(options.model, options.grid,
                                                                    derive_seed(options.seed, 0x5ae, s)));
    const DistanceMap dm = distance_map(*g, options.grid, Vec2::Zero());
    const double r_max = *std::max_element(options.radii.begin(), options.radii.end());
    for (int k = 0; k < options.directions; ++k) {
      const double a = 2.0 * kPi * k / options.directions;
      const Vec2 e(std::cos(a), std::sin(a));
      for (std::size_t q = 0; q < nr; ++q) ratio[q][s * options.directions + k] = dm.query(options.radii[q] * e) / options.radii[q];
      try {
        const GeodesicPath path = integrate_to_exit(*g, {Vec2::Zero(), e}, r_max, 10.0 * r_max, 0.01);
        const auto fail = minimality_failure(dm, path, path.t_back());
        for (std::size_t q = 0; q < nr; ++q) {
          const auto tau = exit_time(path, options.radii[q]);
          if (tau && (!fail || *tau < *fail)) exits[q][s * options.directions + k] = *tau;
        }
      } catch (const LeftDomain&) {
      }
    }
  });
  std::vector<ShapeRow> rows;
  for (std::size_t q = 0; q < nr; ++q) {
    ShapeRow row;
    row.r = options.radii[q];
    row.mu = mean(ratio[q]);
    // Directions within one sample are dependent; the error bar uses per-sample means.
    std::vector<double> per_sample(ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      for (int k = 0; k < options.directions; ++k) per_sample[s] += ratio[q][s * options.directions + k];
      per_sample[s] /= options.directions;
    }
    row.se = standard_error(per_sample);
    std::size_t inside = 0, total = 0;
    for (double tau : exits[q]) {
      if (tau < 0.0) continue;
      ++total;
      const double lo = (1.0 - options.bracket_epsilon) * row.mu * row.r;
      const double hi = (1.0 + options.bracket_epsilon) * row.mu * row.r;
      inside += (tau >= lo && tau <= hi);
    }
    row.bracket_fraction = total ? static_cast<double>(inside) / total : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void FrontierReport::write_csv(std::ostream& out) const {
  out << "r,alpha,Z,in_Q\n";
  out.precision(12);
  for (const auto& row : rows) out << row.r << ',' << row.alpha << ',' << row.z << ',' << (row.in_q ? 1 : 0) << '\n';
}

FrontierReport frontier_scan(const MetricField& g, const Vec2& v, const std::vector<double>& radii, double theta,
                             double h, double lens_spacing, double step) {
  if (radii.empty()) throw InvalidArgument("no radii");
  FrontierReport rep;
  rep.direction = v.normalized();
  const double r_max = *std::max_element(radii.begin(), radii.end());
  const GeodesicPath path = integrate_to_exit(g, {Vec2::Zero(), rep.direction}, r_max, 10.0 * r_max, step);
  for (double r : radii) {
    const auto tau = exit_time(path, r);
    if (!tau) throw NoExit("geodesic does not exit radius " + std::to_string(r));
    FrontierRow row;
    row.r = r;
    row.alpha = exit_angle(path, r);
    const Vec2 c = path.position(*tau);
    const Region lens = Region::lens(c, 2.0, Vec2::Zero(), r, lens_spacing, c, frame_from(path.direction(*tau)));
    row.z = z_fluctuation(g, lens).value;
    row.in_q = row.alpha <= theta && row.z <= h;
    rep.rows.push_back(row);
  }
  std::size_t in_q = 0;
  for (const auto& row : rep.rows) in_q += row.in_q;
  rep.density = static_cast<double>(in_q) / rep.rows.size();
  double last = 0.0;
  for (;;) {
    double next = std::numeric_limits<double>::infinity();
    for (const auto& row : rep.rows)
      if (row.in_q && row.r >= last + 1.0 - 1e-9) next = std::min(next, row.r);
    if (!std::isfinite(next)) break;
    rep.r_sequence.push_back(next);
    last = next;
  }
  return rep;
}

ChiReport chi_scan(const std::function<MetricPtr(std::size_t)>& metric_for_sample, std::size_t samples,
                   const GridSpec& grid, const std::vector<double>& radii, int n_dirs, int threads) {
  const std::size_t nr = radii.size();
  std::vector<std::vector<double>> d(nr * n_dirs, std::vector<double>(samples));
  parallel_for(samples, threads, [&](std::size_t s) {
    const MetricPtr g = metric_for_sample(s);
    const DistanceMap dm = distance_map(*g, grid, Vec2::Zero());
    for (std::size_t q = 0; q < nr; ++q)
      for (int k = 0; k < n_dirs; ++k) {
        const double a = 2.0 * kPi * k / n_dirs;
        d[q * n_dirs + k][s] = dm.query(radii[q] * Vec2(std::cos(a), std::sin(a)));
      }
  });
  ChiReport rep;
  rep.zero_variance = true;
  std::vector<double> lx, ly;
  for (std::size_t q = 0; q < nr; ++q) {
    ChiRow row;
    row.r = radii[q];
    for (int k = 0; k < n_dirs; ++k) {
      row.mean += mean(d[q * n_dirs + k]);
      row.sd += std::sqrt(variance(d[q * n_dirs + k]));
    }
    row.mean /= n_dirs;
    row.sd /= n_dirs;
    if (row.sd > 0.0) {
      rep.zero_variance = false;
      lx.push_back(std::log(row.r));
      ly.push_back(std::log(row.sd));
    }
    rep.rows.push_back(row);
  }
  if (lx.size() >= 3 && lx.size() == nr) {
    const LinearFit fit = linear_fit(lx, ly);
    rep.slope = fit.slope;
    rep.ci_low = fit.ci_low;
    rep.ci_high = fit.ci_high;
    rep.fitted = true;
  }
  return rep;
}

}  // namespace rrg
