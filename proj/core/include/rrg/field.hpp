#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rrg/types.hpp"

namespace rrg {

// Square periodic grid with nodes at -extent/2 + i*spacing, i = 0..n-1, on both axes.
struct GridSpec {
  int n = 128;
  double extent = 8.0;

  double spacing() const { return extent / n; }
  double half() const { return 0.5 * extent; }
  Vec2 node(int i, int j) const { return {-half() + i * spacing(), -half() + j * spacing()}; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
};

// Wendland profile c(r) = amplitude (1-r)^8 (32 r^3 + 25 r^2 + 8 r + 1) on [0, 1).
struct CovarianceModel {
  double amplitude = 0.1;
  double support_radius = 1.0;

  double operator()(double r) const;
};

// c(|x-y|) (d_ik d_jl + d_il d_jk), indices in {0, 1}.
double cov_tensor(const Vec2& x, const Vec2& y, const CovarianceModel& model, int i, int j, int k,
                  int l);

enum Component : int { kXi11 = 0, kXi12 = 1, kXi22 = 2 };

// Derivative channels stored per node. The C^2 Hermite evaluator in metric needs the mixed
// third and fourth order entries as well as the ones the sampler exposes by name.
enum Channel : int { kV = 0, kX, kY, kXX, kXY, kYY, kXXY, kXYY, kXXYY, kChannels };

constexpr std::array<std::array<int, 2>, kChannels> kChannelOrders = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {2, 1}, {1, 2}, {2, 2}}};

class TensorFieldSample {
 public:
  TensorFieldSample() = default;
  TensorFieldSample(GridSpec grid, CovarianceModel model, std::uint64_t seed);

  const GridSpec& grid() const { return grid_; }
  const CovarianceModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }

  double& at(int i, int j, int comp, int channel) { return data_[offset(i, j) + comp * kChannels + channel]; }
  double at(int i, int j, int comp, int channel) const {
    return data_[offset(i, j) + comp * kChannels + channel];
  }
  // All 27 values of node (i, j), component-major.
  const double* node_data(int i, int j) const { return data_.data() + offset(i, j); }

  void write_binary(std::ostream& out) const;
  static TensorFieldSample read_binary(std::istream& in);
  std::string metadata_json() const;

 private:
  std::size_t offset(int i, int j) const {
    return (static_cast<std::size_t>(j) * grid_.n + i) * 3 * kChannels;
  }

  GridSpec grid_;
  CovarianceModel model_;
  std::uint64_t seed_ = 0;
  std::vector<double> data_;
};

// Eigenvalues of the circulant covariance of one scalar component with covariance c on the
// periodic grid. Throws NonPositiveSpectrum when one is below -1e-10 relative to the largest.
std::vector<double> circulant_spectrum(const CovarianceModel& model, const GridSpec& grid);

TensorFieldSample sample_field(const CovarianceModel& model, const GridSpec& grid, std::uint64_t seed);

}  // namespace rrg
