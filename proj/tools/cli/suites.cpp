#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rrg/errors.hpp"
#include "rrg/parallel.hpp"
#include "rrg/rng.hpp"

namespace rrg::cli {

namespace {

constexpr std::uint64_t kBumpStream = 0xb5;
constexpr std::uint64_t kPilotStream = 0xb1;
constexpr std::uint64_t kMinimizingStream = 0x313;
constexpr std::uint64_t kTStarStream = 0x75;

Vector observe(const GridGaussian& dist, const std::vector<int>& d, std::mt19937_64& rng) {
  const Vector full = dist.sample(rng);
  const auto idx = dist.indices(d);
  Vector obs(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) obs[i] = full[idx[i]];
  return obs;
}

std::vector<int> random_subset(int n, int k, std::mt19937_64& rng) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

MetricPtr random_metric(const CovarianceModel& model, const GridSpec& grid, std::uint64_t seed) {
  return make_grid_metric(sample_field(model, grid, seed));
}

}  // namespace

nlohmann::ordered_json Check::to_json() const {
  return {{"check", name}, {"value", value}, {"bound", bound}, {"pass", pass}};
}

Check at_most(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value <= bound};
}

Check at_least(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value >= bound};
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<Check> conditioning_suite(const ConditioningSuiteOptions& o) {
  std::vector<Check> out;
  std::mt19937_64 rng(derive_seed(o.seed, 0xc0, 0));
  const GridGaussian g = GridGaussian::square(o.model, o.n, o.spacing);
  const int nodes = o.n * o.n;

  // Conditioning set in the lower left corner so that far nodes exist.
  const std::vector<int> d{0, 1, o.n, o.n + 1};
  const Vector obs = observe(g, d, rng);
  const Conditioned c = condition(g, d, obs);
  double identity = 0.0, rows = 0.0, support = 0.0;
  for (std::size_t i = 0; i < c.observed_index.size(); ++i) {
    const int k = c.observed_index[i];
    identity = std::max(identity, std::abs(c.mean[k] - obs[i]));
    rows = std::max({rows, c.cov.row(k).cwiseAbs().maxCoeff(), c.cov.col(k).cwiseAbs().maxCoeff()});
  }
  int far = 0;
  for (int p = 0; p < nodes; ++p) {
    double dist = 1e300;
    for (int q : d) dist = std::min(dist, (g.nodes[p] - g.nodes[q]).norm());
    if (dist < o.model.support_radius) continue;
    ++far;
    for (int a = 0; a < 3; ++a) support = std::max(support, std::abs(c.mean[3 * p + a]));
  }
  out.push_back(at_most("identity_on_D", identity, 1e-8));
  out.push_back(at_most("kernel_rows_on_D", rows, 1e-10));
  out.push_back(at_most("mean_beyond_support", support, 1e-10));
  out.push_back(at_least("far_nodes", far, 1));

  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < o.trials; ++trial) {
    const auto big = random_subset(nodes, std::min(nodes, 6 + trial % 5), rng);
    const std::vector<int> sub(big.begin(), big.begin() + big.size() / 2);
    const auto rep = monotonicity_check(g, sub, big, observe(g, big, rng));
    worst = std::min(worst, rep.min_eigenvalue / rep.trace);
  }
  out.push_back(at_least("monotonicity_min_eigenvalue_over_trace", worst, -1e-8));

  const GridGaussian small = GridGaussian::square(o.model, o.covariance_grid, o.spacing);
  const std::vector<int> ds{0, o.covariance_grid + 1};
  const Conditioned cs = condition(small, ds, observe(small, ds, rng));
  const ConditionalSampler sampler(cs);
  const std::size_t dim = small.dim();
  std::vector<Vector> draws;
  double fiber = 0.0;
  for (int s = 0; s < o.draws; ++s) {
    draws.push_back(sampler.draw(rng));
    for (std::size_t i = 0; i < cs.observed_index.size(); ++i)
      fiber = std::max(fiber, std::abs(draws.back()[cs.observed_index[i]] - cs.observed[i]));
  }
  int exceed = 0, compared = 0;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = a; b < dim; ++b) {
      if (cs.cov(a, a) < 1e-12 || cs.cov(b, b) < 1e-12) continue;
      double m = 0.0, sq = 0.0;
      for (const auto& v : draws) {
        const double p = (v[a] - cs.mean[a]) * (v[b] - cs.mean[b]);
        m += p;
        sq += p * p;
      }
      m /= o.draws;
      const double se = std::sqrt(std::max(sq / o.draws - m * m, 0.0) / o.draws);
      ++compared;
      exceed += std::abs(m - cs.cov(a, b)) > 4.0 * se;
    }
  out.push_back(at_most("sample_on_fiber", fiber, 1e-6));
  // About 900 entries at 4 SE: more than two exceedances has probability ~3e-5 under the null.
  out.push_back(at_most("covariance_entries_beyond_4se", exceed, 2));
  out.push_back(at_least("covariance_entries_compared", compared, 100));
  return out;
}

BumpSuiteResult bump_suite(const BumpSuiteOptions& o) {
  BumpSuiteResult res;
  const auto dirs = perturbation_directions(o.directions, derive_seed(o.seed, 0xd1, 0));

  std::vector<Bump> pilots;
  for (std::uint64_t k = 0; pilots.size() < static_cast<std::size_t>(o.pilots) && k < 20u * o.pilots; ++k) {
    try {
      pilots.push_back(build_bump(*random_metric(o.model, o.grid, derive_seed(o.seed, kPilotStream, k)), o.bump));
    } catch (const PreconditionZ&) {
    } catch (const ChartFailure&) {
    }
  }
  if (pilots.empty()) throw ChartFailure("no admissible pilot sample");
  res.epsilon = calibrate_epsilon(pilots, dirs, o.candidates);

  BumpOptions opts = o.bump;
  opts.epsilon = res.epsilon;
  // Candidates are tried in batches of `samples`; each batch runs in parallel and is consumed in order.
  for (std::uint64_t batch = 0; res.verified.size() < static_cast<std::size_t>(o.samples) && batch < 10; ++batch) {
    const std::size_t n = o.samples;
    std::vector<std::optional<BumpVerification>> out(n);
    parallel_for(n, o.threads, [&](std::size_t i) {
      const auto seed = derive_seed(o.seed, kBumpStream, batch * n + i);
      try {
        out[i] = verify_bump(random_metric(o.model, o.grid, seed), opts, dirs);
      } catch (const PreconditionZ&) {
      } catch (const ChartFailure&) {
      }
    });
    for (std::size_t i = 0; i < n && res.verified.size() < n; ++i) {
      if (!out[i]) {
        ++res.skipped;
        continue;
      }
      res.seeds.push_back(derive_seed(o.seed, kBumpStream, batch * n + i));
      res.verified.push_back(*out[i]);
    }
  }

  double flat = 0.0, k0 = 0.0, plateau = 0.0, jt = 0.0, conj = 0.0, perturbed = -1e300;
  bool cone = true;
  for (const auto& v : res.verified) {
    flat = std::max(flat, v.chart_flatness);
    k0 = std::max(k0, std::abs(v.K0_b - v.K0_g));
    plateau = std::max(plateau, v.jacobi.plateau_error);
    jt = std::max(jt, std::abs(v.jacobi.j_tau + 1.0));
    conj = std::max(conj, v.jacobi.conjugate ? std::abs(*v.jacobi.conjugate - 0.75 * v.spec.tau) : 1e300);
    for (double j : v.perturbed_j_tau) perturbed = std::max(perturbed, j);
    cone = cone && v.j_in_cone;
  }
  res.checks.push_back(at_least("admissible_samples", static_cast<double>(res.verified.size()), o.samples));
  res.checks.push_back(at_most("chart_flatness", flat, 1e-5));
  res.checks.push_back(at_most("curvature_at_origin", k0, 1e-4));
  res.checks.push_back(at_most("plateau_error", plateau, 1e-4));
  res.checks.push_back(at_most("j_tau_plus_one", jt, 1e-3));
  res.checks.push_back(at_most("conjugate_offset", conj, 1e-3));
  Check stab{"max_perturbed_j_tau", perturbed, 0.0, perturbed < 0.0};
  res.checks.push_back(stab);
  res.checks.push_back(at_least("chart_image_in_cone", cone ? 1.0 : 0.0, 1.0));
  return res;
}

MinimizingSuiteResult minimizing_suite(const MinimizingSuiteOptions& o,
                                       const std::function<MetricPtr(std::size_t)>& metric_for_sample) {
  const std::size_t nr = o.radii.size();
  const double r_max = *std::max_element(o.radii.begin(), o.radii.end());
  std::vector<std::optional<MinimizingSample>> out(o.samples);
  parallel_for(o.samples, o.threads, [&](std::size_t s) {
    const MetricPtr g = metric_for_sample ? metric_for_sample(s)
                                          : random_metric(o.model, o.grid, derive_seed(o.seed, kMinimizingStream, s));
    try {
      const DistanceMap dm = distance_map(*g, o.grid, Vec2::Zero());
      const auto mf = minimizing_fraction(*g, dm, o.directions, o.radii, o.step);
      MinimizingSample ms;
      ms.fraction = mf.fraction;
      ms.mu.assign(nr, 0.0);
      for (int k = 0; k < o.directions; ++k) {
        const auto& flags = mf.minimizing[k];
        for (std::size_t q = 0; q + 1 < nr; ++q)
          if (o.radii[q] < o.radii[q + 1] && flags[q + 1] > flags[q]) ms.nested = false;
        const GeodesicPath& path = mf.paths[k];
        const auto tau = exit_time(path, r_max);
        const double horizon = tau ? *tau : path.t_back();
        ++ms.geodesics;
        ms.with_conjugate += first_conjugate_point(*g, path, horizon).has_value();
        const double a = 2.0 * kPi * k / o.directions;
        for (std::size_t q = 0; q < nr; ++q)
          ms.mu[q] += dm.query(o.radii[q] * Vec2(std::cos(a), std::sin(a))) / o.radii[q] / o.directions;
      }
      out[s] = std::move(ms);
    } catch (const LeftDomain&) {
    }
  });
  MinimizingSuiteResult res;
  res.mean_fraction.assign(nr, 0.0);
  res.mean_mu.assign(nr, 0.0);
  int geodesics = 0, conj = 0;
  for (auto& s : out) {
    if (!s) {
      ++res.excluded;
      continue;
    }
    for (std::size_t q = 0; q < nr; ++q) {
      res.mean_fraction[q] += s->fraction[q];
      res.mean_mu[q] += s->mu[q];
    }
    geodesics += s->geodesics;
    conj += s->with_conjugate;
    res.samples.push_back(std::move(*s));
  }
  if (!res.samples.empty())
    for (std::size_t q = 0; q < nr; ++q) {
      res.mean_fraction[q] /= res.samples.size();
      res.mean_mu[q] /= res.samples.size();
    }
  res.conjugate_share = geodesics ? static_cast<double>(conj) / geodesics : 0.0;
  return res;
}

TStarSuiteResult tstar_suite(const TStarSuiteOptions& o,
                             const std::function<MetricPtr(std::size_t)>& metric_for_sample) {
  TStarSuiteResult res;
  res.samples.resize(o.samples);
  parallel_for(o.samples, o.threads, [&](std::size_t s) {
    const MetricPtr g = metric_for_sample ? metric_for_sample(s)
                                          : random_metric(o.model, o.grid, derive_seed(o.seed, kTStarStream, s));
    try {
      const GeodesicPath path = integrate(*g, UnitTangentState{}, o.T_max, o.step);
      const DistanceMap dm = distance_map(*g, o.grid, Vec2::Zero());
      res.samples[s].t_star = t_star(dm, path, o.T_max);
      res.samples[s].conjugate = first_conjugate_point(*g, path, o.T_max);
    } catch (const LeftDomain&) {
    } catch (const OutOfDomain&) {
    }
  });
  std::vector<double> times;
  for (const auto& s : res.samples) {
    if (!s.t_star) {
      ++res.excluded;
      continue;
    }
    res.at_horizon += s.t_star->at_horizon;
    times.push_back(s.t_star->at_horizon ? std::numeric_limits<double>::infinity() : s.t_star->time);
  }
  std::vector<double> fx, fy;
  for (int k = 0; k <= o.survival_points; ++k) {
    const double t = o.T_max * k / o.survival_points;
    const auto alive = std::count_if(times.begin(), times.end(), [t](double x) { return x > t; });
    const double s = times.empty() ? 0.0 : static_cast<double>(alive) / times.size();
    if (!res.survival.empty() && s > res.survival.back()) res.nonincreasing = false;
    res.t.push_back(t);
    res.survival.push_back(s);
    if (s > 0.0 && s < 1.0) {
      fx.push_back(t);
      fy.push_back(std::log(s));
    }
  }
  if (fx.size() >= 3) res.log_fit = linear_fit(fx, fy);
  return res;
}

}  // namespace rrg::cli
