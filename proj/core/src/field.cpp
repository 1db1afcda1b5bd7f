#include "rrg/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

#include <json.hpp>

#include "fft.hpp"
#include "rrg/errors.hpp"
#include "rrg/rng.hpp"

namespace rrg {

double CovarianceModel::operator()(double r) const {
  const double s = r / support_radius;
  if (s >= 1.0) return 0.0;
  const double u = 1.0 - s;
  const double u2 = u * u;
  const double u4 = u2 * u2;
  return amplitude * u4 * u4 * (((32.0 * s + 25.0) * s + 8.0) * s + 1.0);
}

double cov_tensor(const Vec2& x, const Vec2& y, const CovarianceModel& model, int i, int j, int k,
                  int l) {
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  return model((x - y).norm()) * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k));
}

TensorFieldSample::TensorFieldSample(GridSpec grid, CovarianceModel model, std::uint64_t seed)
    : grid_(grid), model_(model), seed_(seed), data_(grid.size() * 3 * kChannels, 0.0) {}

std::vector<double> circulant_spectrum(const CovarianceModel& model, const GridSpec& grid) {
  if (grid.n < 4 || grid.n % 2 != 0) throw InvalidArgument("grid resolution must be even and >= 4");
  if (grid.extent < 2.0 * model.support_radius)
    throw InvalidArgument("grid extent must be at least twice the support radius");
  const int n = grid.n;
  const double h = grid.spacing();
  std::vector<std::complex<double>> k(grid.size());
  for (int j = 0; j < n; ++j) {
    const double dy = (j <= n / 2 ? j : j - n) * h;
    for (int i = 0; i < n; ++i) {
      const double dx = (i <= n / 2 ? i : i - n) * h;
      k[static_cast<std::size_t>(j) * n + i] = model(std::hypot(dx, dy));
    }
  }
  detail::fft2(k, n, -1);
  std::vector<double> lambda(grid.size());
  double top = 0.0;
  for (std::size_t q = 0; q < k.size(); ++q) {
    lambda[q] = k[q].real();
    top = std::max(top, lambda[q]);
  }
  for (double& l : lambda) {
    if (l < -1e-10 * top) throw NonPositiveSpectrum("negative circulant eigenvalue " + std::to_string(l));
    l = std::max(l, 0.0);
  }
  return lambda;
}

namespace {

// i*kappa raised to the requested orders along x (columns) and y (rows).
std::complex<double> multiplier(double kx, double ky, int ax, int ay, bool nyq_x, bool nyq_y) {
  if ((ax % 2 == 1 && nyq_x) || (ay % 2 == 1 && nyq_y)) return 0.0;
  std::complex<double> m = 1.0;
  const std::complex<double> ikx(0.0, kx), iky(0.0, ky);
  for (int a = 0; a < ax; ++a) m *= ikx;
  for (int a = 0; a < ay; ++a) m *= iky;
  return m;
}

}  // namespace

// The tensor covariance c(|x-y|)(d_ik d_jl + d_il d_jk) gives
//   Cov(xi11, xi11) = Cov(xi22, xi22) = 2c,  Cov(xi12, xi12) = c,
//   Cov(xi11, xi22) = Cov(xi11, xi12) = Cov(xi12, xi22) = 0,
// so the sample is three independent scalar fields. xi11 and xi22 share one complex synthesis
// (real and imaginary parts are independent with the same law); xi12 uses its own.
TensorFieldSample sample_field(const CovarianceModel& model, const GridSpec& grid, std::uint64_t seed) {
  TensorFieldSample out(grid, model, seed);
  const std::vector<double> lambda = circulant_spectrum(model, grid);
  const int n = grid.n;
  const std::size_t nn = grid.size();
  const double norm = 1.0 / static_cast<double>(nn);

  std::mt19937_64 rng_pair(derive_seed(seed, 1, 0));
  std::mt19937_64 rng_off(derive_seed(seed, 2, 0));
  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> pair_coef(nn), off_coef(nn);
  for (std::size_t q = 0; q < nn; ++q) {
    const double a = std::sqrt(2.0 * lambda[q] * norm);
    const double b = std::sqrt(lambda[q] * norm);
    const double p1 = normal(rng_pair), p2 = normal(rng_pair);
    const double o1 = normal(rng_off), o2 = normal(rng_off);
    pair_coef[q] = {a * p1, a * p2};
    off_coef[q] = {b * o1, b * o2};
  }

  const double dk = 2.0 * kPi / grid.extent;
  std::vector<std::complex<double>> work(nn), work_off(nn);
  for (int ch = 0; ch < kChannels; ++ch) {
    const int ax = kChannelOrders[ch][0], ay = kChannelOrders[ch][1];
    for (int j = 0; j < n; ++j) {
      const int sj = j <= n / 2 ? j : j - n;
      for (int i = 0; i < n; ++i) {
        const int si = i <= n / 2 ? i : i - n;
        const auto m = multiplier(si * dk, sj * dk, ax, ay, i == n / 2, j == n / 2);
        const std::size_t q = static_cast<std::size_t>(j) * n + i;
        work[q] = pair_coef[q] * m;
        work_off[q] = off_coef[q] * m;
      }
    }
    detail::fft2(work, n, +1);
    detail::fft2(work_off, n, +1);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t q = static_cast<std::size_t>(j) * n + i;
        out.at(i, j, kXi11, ch) = work[q].real();
        out.at(i, j, kXi22, ch) = work[q].imag();
        out.at(i, j, kXi12, ch) = work_off[q].real();
      }
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'R', 'R', 'G', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "container is little-endian");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("truncated field container");
  return value;
}

}  // namespace

// Header: magic, version, n, extent, seed, amplitude, support radius, channel count.
// Payload: for each component, for each channel, an n x n row-major float64 grid.
void TensorFieldSample::write_binary(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::int32_t>(out, grid_.n);
  put<double>(out, grid_.extent);
  put<std::uint64_t>(out, seed_);
  put<double>(out, model_.amplitude);
  put<double>(out, model_.support_radius);
  put<std::int32_t>(out, kChannels);
  for (int c = 0; c < 3; ++c)
    for (int ch = 0; ch < kChannels; ++ch)
      for (int j = 0; j < grid_.n; ++j)
        for (int i = 0; i < grid_.n; ++i) put<double>(out, at(i, j, c, ch));
}

TensorFieldSample TensorFieldSample::read_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw FormatError("not a field container");
  if (get<std::uint32_t>(in) != kVersion) throw FormatError("unsupported container version");
  GridSpec grid;
  grid.n = get<std::int32_t>(in);
  grid.extent = get<double>(in);
  const auto seed = get<std::uint64_t>(in);
  CovarianceModel model;
  model.amplitude = get<double>(in);
  model.support_radius = get<double>(in);
  if (get<std::int32_t>(in) != kChannels) throw FormatError("channel count mismatch");
  if (grid.n <= 0 || grid.n > 1 << 14) throw FormatError("bad grid size");
  TensorFieldSample s(grid, model, seed);
  for (int c = 0; c < 3; ++c)
    for (int ch = 0; ch < kChannels; ++ch)
      for (int j = 0; j < grid.n; ++j)
        for (int i = 0; i < grid.n; ++i) s.at(i, j, c, ch) = get<double>(in);
  return s;
}

std::string TensorFieldSample::metadata_json() const {
  nlohmann::json j = {{"kind", "tensor_field_sample"},
                      {"n", grid_.n},
                      {"extent", grid_.extent},
                      {"spacing", grid_.spacing()},
                      {"seed", seed_},
                      {"amplitude", model_.amplitude},
                      {"support_radius", model_.support_radius},
                      {"covariance", "wendland_8_3"},
                      {"components", {"xi11", "xi12", "xi22"}},
                      {"channels", {"v", "x", "y", "xx", "xy", "yy", "xxy", "xyy", "xxyy"}}};
  return j.dump();
}

}  // namespace rrg
