#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rrg/field.hpp"

namespace rrg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Finite-grid Gaussian tensor field: entry 3 * node + component.
struct GridGaussian {
  std::vector<Vec2> nodes;
  Matrix cov;
  Vector mean;

  static GridGaussian from_model(const CovarianceModel& model, std::vector<Vec2> nodes);
  // n x n nodes with the given spacing, centred at the origin.
  static GridGaussian square(const CovarianceModel& model, int n, double spacing);
  std::size_t dim() const { return static_cast<std::size_t>(cov.rows()); }
  // Covariance indices of the three components at each node.
  std::vector<int> indices(const std::vector<int>& node_set) const;
  Vector sample(std::mt19937_64& rng) const;
};

struct Conditioned {
  Vector mean;  // m_D
  Matrix cov;   // K_D
  std::vector<int> observed_index;
  Vector observed;
  double jitter = 0.0;  // added to the D block, as a multiple of the full covariance trace
};

// Schur-complement conditioning on the values of all three components at `d_nodes`.
// Throws SingularBlock if the jittered block is still not positive definite.
Conditioned condition(const GridGaussian& dist, const std::vector<int>& d_nodes, const Vector& observed);

struct MonotonicityReport {
  double min_eigenvalue = 0.0;
  double trace = 0.0;
  bool pass = false;
};
// K_{D'} - K_D >= 0 for D' a subset of D.
MonotonicityReport monotonicity_check(const GridGaussian& dist, const std::vector<int>& d_sub,
                                      const std::vector<int>& d, const Vector& observed_on_d);

// Draws from N(m_D, K_D): the free entries use a Cholesky factor of K_D restricted to the
// complement of D, entries on D are the observed values.
class ConditionalSampler {
 public:
  explicit ConditionalSampler(const Conditioned& c);
  Vector draw(std::mt19937_64& rng) const;
  double jitter() const { return jitter_; }

 private:
  Vector mean_;
  std::vector<int> free_;
  Matrix factor_;
  double jitter_ = 0.0;
};

Vector conditional_sample(const Conditioned& c, std::uint64_t seed);

// Box event on the values at `nodes`: |value - center| <= radius for every entry.
struct BoxEvent {
  std::vector<int> nodes;
  Vector center;
  double radius = 0.0;
  bool whole_space = false;
  bool contains(const GridGaussian& dist, const Vector& values) const;
};

struct UniformProbabilityReport {
  std::vector<double> p;  // one estimate per set in the family
  std::vector<double> ci_low, ci_high;
  double min_p = 0.0;
  bool ci_excludes_zero = false;
  std::string to_json() const;
};

// For each D in the family, draws g with Z_D(g) <= h (node-value proxy: max Frobenius norm of
// phi(xi) - I over D), then estimates P(U | values on D) by conditional Monte Carlo.
UniformProbabilityReport uniform_probability_demo(const GridGaussian& dist,
                                                  const std::vector<std::vector<int>>& family, double h,
                                                  const BoxEvent& event, std::size_t samples, std::uint64_t seed);

}  // namespace rrg
