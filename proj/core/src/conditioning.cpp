#include "rrg/conditioning.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "rrg/errors.hpp"
#include "rrg/metric.hpp"
#include "rrg/rng.hpp"
#include "rrg/stats.hpp"

namespace rrg {

namespace {

constexpr int kIdx[3][2] = {{0, 0}, {0, 1}, {1, 1}};

// Solve A X = B with one step of iterative refinement.
template <class Factor>
Matrix refined_solve(const Factor& f, const Matrix& A, const Matrix& B) {
  Matrix X = f.solve(B);
  X += f.solve(B - A * X);
  return X;
}

Matrix take(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

}  // namespace

GridGaussian GridGaussian::from_model(const CovarianceModel& model, std::vector<Vec2> nodes) {
  GridGaussian g;
  g.nodes = std::move(nodes);
  const int n = static_cast<int>(g.nodes.size());
  g.cov.resize(3 * n, 3 * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          g.cov(3 * p + a, 3 * q + b) =
              cov_tensor(g.nodes[p], g.nodes[q], model, kIdx[a][0], kIdx[a][1], kIdx[b][0], kIdx[b][1]);
  g.mean = Vector::Zero(3 * n);
  return g;
}

GridGaussian GridGaussian::square(const CovarianceModel& model, int n, double spacing) {
  std::vector<Vec2> nodes;
  const double off = 0.5 * (n - 1) * spacing;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) nodes.emplace_back(i * spacing - off, j * spacing - off);
  return from_model(model, std::move(nodes));
}

std::vector<int> GridGaussian::indices(const std::vector<int>& node_set) const {
  std::vector<int> out;
  for (int p : node_set) {
    if (p < 0 || p >= static_cast<int>(nodes.size())) throw InvalidArgument("node index out of range");
    for (int a = 0; a < 3; ++a) out.push_back(3 * p + a);
  }
  return out;
}

Vector GridGaussian::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  Vector z(dim());
  for (auto& v : z) v = normal(rng);
  // Symmetric square root through the eigen-decomposition copes with semidefinite blocks.
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const Vector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return mean + es.eigenvectors() * (s.asDiagonal() * z);
}

Conditioned condition(const GridGaussian& dist, const std::vector<int>& d_nodes, const Vector& observed) {
  Conditioned c;
  c.observed_index = dist.indices(d_nodes);
  const auto& D = c.observed_index;
  if (observed.size() != static_cast<Eigen::Index>(D.size()))
    throw InvalidArgument("observed vector does not match the conditioning set");
  c.observed = observed;
  if (D.empty()) {
    c.mean = dist.mean;
    c.cov = dist.cov;
    return c;
  }
  std::vector<int> all(dist.dim());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  Matrix Sdd = take(dist.cov, D, D);
  const Matrix Sxd = take(dist.cov, all, D);
  // Scale by the whole trace: an already conditioned law has a zero block on D.
  const double tr = dist.cov.trace();
  Eigen::LLT<Matrix> llt(Sdd);
  if (llt.info() != Eigen::Success) {
    c.jitter = 1e-10;
    Sdd.diagonal().array() += c.jitter * tr;
    llt.compute(Sdd);
    if (llt.info() != Eigen::Success) throw SingularBlock("covariance block on D is singular after jitter");
  }
  Vector resid = observed;
  for (std::size_t i = 0; i < D.size(); ++i) resid[i] -= dist.mean[D[i]];
  const Vector alpha = refined_solve(llt, Sdd, resid);
  const Matrix W = refined_solve(llt, Sdd, Sxd.transpose());  // Sdd^{-1} S_{D.}
  c.mean = dist.mean + Sxd * alpha;
  c.cov = dist.cov - Sxd * W;
  c.cov = 0.5 * (c.cov + c.cov.transpose());
  return c;
}

MonotonicityReport monotonicity_check(const GridGaussian& dist, const std::vector<int>& d_sub,
                                      const std::vector<int>& d, const Vector& observed_on_d) {
  for (int p : d_sub)
    if (std::find(d.begin(), d.end(), p) == d.end()) throw InvalidArgument("D' is not a subset of D");
  Vector sub(3 * d_sub.size());
  for (std::size_t i = 0; i < d_sub.size(); ++i) {
    const auto pos = static_cast<std::size_t>(std::find(d.begin(), d.end(), d_sub[i]) - d.begin());
    sub.segment<3>(3 * i) = observed_on_d.segment<3>(3 * pos);
  }
  const Conditioned big = condition(dist, d, observed_on_d);
  const Conditioned small = condition(dist, d_sub, sub);
  MonotonicityReport r;
  const Matrix diff = small.cov - big.cov;
  r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(diff, Eigen::EigenvaluesOnly).eigenvalues()(0);
  r.trace = dist.cov.trace();
  r.pass = r.min_eigenvalue >= -1e-8 * r.trace;
  return r;
}

ConditionalSampler::ConditionalSampler(const Conditioned& c) : mean_(c.mean) {
  std::vector<char> fixed(c.mean.size(), 0);
  for (int i : c.observed_index) fixed[i] = 1;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (!fixed[i]) free_.push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < c.observed_index.size(); ++i) mean_[c.observed_index[i]] = c.observed[i];
  if (free_.empty()) return;
  Matrix K = take(c.cov, free_, free_);
  const double tr = std::max(K.trace(), 1e-300);
  Eigen::LLT<Matrix> llt(K);
  for (double j = 1e-12; llt.info() != Eigen::Success; j *= 10.0) {
    if (j > 1e-8) throw CholeskyFailure("conditional covariance is not positive semidefinite");
    jitter_ = j;
    Matrix Kj = K;
    Kj.diagonal().array() += j * tr;
    llt.compute(Kj);
  }
  factor_ = llt.matrixL();
}

Vector ConditionalSampler::draw(std::mt19937_64& rng) const {
  Vector out = mean_;
  if (free_.empty()) return out;
  std::normal_distribution<double> normal;
  Vector z(free_.size());
  for (auto& v : z) v = normal(rng);
  const Vector dx = factor_ * z;
  for (std::size_t i = 0; i < free_.size(); ++i) out[free_[i]] += dx[i];
  return out;
}

Vector conditional_sample(const Conditioned& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return ConditionalSampler(c).draw(rng);
}

bool BoxEvent::contains(const GridGaussian& dist, const Vector& values) const {
  if (whole_space) return true;
  const auto idx = dist.indices(nodes);
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (std::abs(values[idx[i]] - center[i]) > radius) return false;
  return true;
}

std::string UniformProbabilityReport::to_json() const {
  nlohmann::json j = {{"p", p}, {"ci_low", ci_low}, {"ci_high", ci_high}, {"min_p", min_p},
                      {"ci_excludes_zero", ci_excludes_zero}};
  return j.dump();
}

UniformProbabilityReport uniform_probability_demo(const GridGaussian& dist,
                                                  const std::vector<std::vector<int>>& family, double h,
                                                  const BoxEvent& event, std::size_t samples, std::uint64_t seed) {
  if (dist.nodes.size() > 200) throw InvalidArgument("uniform_probability_demo is meant for <= 200 nodes");
  UniformProbabilityReport rep;
  rep.min_p = 1.0;
  rep.ci_excludes_zero = true;
  for (std::size_t f = 0; f < family.size(); ++f) {
    std::mt19937_64 rng(derive_seed(seed, 0xc0d, f));
    const auto idx = dist.indices(family[f]);
    Vector g;
    bool admissible = false;
    for (int attempt = 0; attempt < 1000 && !admissible; ++attempt) {
      g = dist.sample(rng);
      double z = 0.0;
      for (std::size_t p = 0; p < family[f].size(); ++p) {
        Mat2 xi;
        xi << g[3 * family[f][p]], g[3 * family[f][p] + 1], g[3 * family[f][p] + 1], g[3 * family[f][p] + 2];
        z = std::max(z, (phi_transform(xi) - Mat2::Identity()).norm());
      }
      admissible = z <= h;
    }
    if (!admissible) throw InvalidArgument("no admissible sample with Z_D <= h");
    Vector obs(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) obs[i] = g[idx[i]];
    const ConditionalSampler sampler(condition(dist, family[f], obs));
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) hits += event.contains(dist, sampler.draw(rng));
    const auto [lo, hi] = wilson_interval(hits, samples);
    rep.p.push_back(static_cast<double>(hits) / samples);
    rep.ci_low.push_back(lo);
    rep.ci_high.push_back(hi);
    rep.min_p = std::min(rep.min_p, rep.p.back());
    rep.ci_excludes_zero = rep.ci_excludes_zero && lo > 0.0 && hits > 0;
  }
  return rep;
}

}  // namespace rrg
