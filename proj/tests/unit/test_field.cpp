#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "rrg/errors.hpp"
#include "rrg/field.hpp"
#include "rrg/stats.hpp"

using namespace rrg;

namespace {

// Independent transcription of the profile for the oracle side.
double wendland(double r, double a) {
  if (r >= 1.0) return 0.0;
  return a * std::pow(1.0 - r, 8) * (32 * r * r * r + 25 * r * r + 8 * r + 1);
}

struct Ensemble {
  GridSpec grid{16, 4.0};
  std::vector<TensorFieldSample> samples;
  explicit Ensemble(std::size_t n) {
    CovarianceModel m{0.1, 1.0};
    for (std::size_t s = 0; s < n; ++s) samples.push_back(sample_field(m, grid, 1000 + s));
  }
  std::vector<double> values(int i, int j, int comp, int ch = kV) const {
    std::vector<double> out;
    for (const auto& s : samples) out.push_back(s.at(i, j, comp, ch));
    return out;
  }
};

const Ensemble& ensemble() {
  static const Ensemble e(5000);
  return e;
}

bool within(double est, double target, double se, double k = 4.0) { return std::abs(est - target) <= k * se; }

}  // namespace

TEST_CASE("profile matches the closed form and has compact support") {
  CovarianceModel m{0.3, 1.0};
  for (double r = 0.0; r < 2.0; r += 0.01) CHECK(m(r) == doctest::Approx(wendland(r, 0.3)).epsilon(1e-14));
  CHECK(m(0.0) > 0.0);
  CHECK(m(1.0) == 0.0);
  CHECK(m(1.5) == 0.0);
}

TEST_CASE("profile derivatives up to order five converge under step refinement") {
  CovarianceModel m{1.0, 1.0};
  const double r = 0.37;
  auto fd5 = [&](double h) {
    const double c[6] = {-1, 5, -10, 10, -5, 1};
    double acc = 0.0;
    for (int k = 0; k < 6; ++k) acc += c[k] * m(r + (k - 2.5) * h);
    return acc / std::pow(h, 5);
  };
  const double a = fd5(4e-2), b = fd5(2e-2), c = fd5(1e-2);
  CHECK(std::abs(b - c) < std::abs(a - b));
  CHECK(std::abs(b - c) < 0.05 * std::abs(c));
}

TEST_CASE("cov_tensor follows the Kronecker structure") {
  CovarianceModel m{0.1, 1.0};
  const Vec2 x(0.1, -0.2);
  CHECK(cov_tensor(x, x, m, 0, 0, 0, 0) == doctest::Approx(2 * m(0)));
  CHECK(cov_tensor(x, x, m, 0, 1, 0, 1) == doctest::Approx(m(0)));
  CHECK(cov_tensor(x, x, m, 0, 1, 1, 0) == doctest::Approx(m(0)));
  CHECK(cov_tensor(x, x, m, 0, 0, 1, 1) == 0.0);
  CHECK(cov_tensor(x, x, m, 0, 0, 0, 1) == 0.0);
  const Vec2 y = x + Vec2(1.5, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) CHECK(cov_tensor(x, y, m, i, j, k, l) == 0.0);
}

TEST_CASE("circulant spectrum is nonnegative and preconditions are enforced") {
  CovarianceModel m{0.1, 1.0};
  for (int n : {16, 64, 128}) {
    const auto lam = circulant_spectrum(m, GridSpec{n, 4.0});
    for (double l : lam) CHECK(l >= 0.0);
  }
  CHECK_THROWS_AS(circulant_spectrum(m, GridSpec{63, 4.0}), InvalidArgument);
  CHECK_THROWS_AS(circulant_spectrum(m, GridSpec{64, 1.5}), InvalidArgument);
}

TEST_CASE("amplitude zero gives identically zero grids") {
  const auto s = sample_field(CovarianceModel{0.0, 1.0}, GridSpec{16, 4.0}, 7);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i)
      for (int c = 0; c < 3; ++c)
        for (int ch = 0; ch < kChannels; ++ch) CHECK(s.at(i, j, c, ch) == 0.0);
}

TEST_CASE("same seed gives bit-identical samples") {
  const GridSpec grid{32, 4.0};
  const auto a = sample_field(CovarianceModel{}, grid, 99), b = sample_field(CovarianceModel{}, grid, 99);
  const auto c = sample_field(CovarianceModel{}, grid, 100);
  std::ostringstream sa, sb, sc;
  a.write_binary(sa);
  b.write_binary(sb);
  c.write_binary(sc);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != sc.str());
}

TEST_CASE("binary container round trip") {
  const auto a = sample_field(CovarianceModel{0.2, 1.0}, GridSpec{16, 4.0}, 5);
  std::stringstream buf;
  a.write_binary(buf);
  const auto b = TensorFieldSample::read_binary(buf);
  CHECK(b.grid().n == 16);
  CHECK(b.seed() == 5);
  CHECK(b.model().amplitude == 0.2);
  for (int c = 0; c < 3; ++c)
    for (int ch = 0; ch < kChannels; ++ch) CHECK(b.at(3, 11, c, ch) == a.at(3, 11, c, ch));
  std::stringstream bad("NOTAFIELD");
  CHECK_THROWS_AS(TensorFieldSample::read_binary(bad), FormatError);
  CHECK(a.metadata_json().find("\"seed\":5") != std::string::npos);
}

TEST_CASE("single-point moments match the covariance tensor") {
  const auto& e = ensemble();
  const double c0 = CovarianceModel{0.1, 1.0}(0.0);
  const std::size_t n = e.samples.size();
  const auto x11 = e.values(8, 8, kXi11), x12 = e.values(8, 8, kXi12), x22 = e.values(8, 8, kXi22);
  CHECK(std::abs(mean(x11)) <= 4.0 * std::sqrt(2.0 * c0 / n));
  CHECK(within(variance(x11), 2 * c0, covariance_standard_error(x11, x11)));
  CHECK(within(variance(x22), 2 * c0, covariance_standard_error(x22, x22)));
  CHECK(within(variance(x12), c0, covariance_standard_error(x12, x12)));
  CHECK(within(sample_covariance(x11, x12), 0.0, covariance_standard_error(x11, x12)));
  CHECK(within(sample_covariance(x11, x22), 0.0, covariance_standard_error(x11, x22)));
}

TEST_CASE("lagged covariance, stationarity and isotropy") {
  const auto& e = ensemble();
  const double c05 = wendland(0.5, 0.1);
  // Grid spacing 0.25: a lag of two nodes is |x| = 0.5.
  const auto a = e.values(8, 8, kXi11), b = e.values(10, 8, kXi11);
  CHECK(within(sample_covariance(a, b), 2 * c05, covariance_standard_error(a, b)));
  const auto by = e.values(8, 10, kXi11);
  CHECK(within(sample_covariance(a, by), 2 * c05, covariance_standard_error(a, by)));
  const int base[5][2] = {{1, 1}, {4, 12}, {9, 3}, {13, 13}, {6, 7}};
  for (const auto& p : base) {
    const auto u = e.values(p[0], p[1], kXi12), v = e.values((p[0] + 2) % 16, p[1], kXi12);
    CHECK(within(sample_covariance(u, v), c05, covariance_standard_error(u, v)));
  }
}

TEST_CASE("derivative channels have the variance implied by the profile") {
  const auto& e = ensemble();
  // Var d_x xi_12 = -C''(0) and Var d_xx xi_12 = C''''(0) for C(x) = c(|x|), by finite differences of c.
  CovarianceModel m{0.1, 1.0};
  const double h = 1e-2;
  const double c2 = (2 * m(h) - 2 * m(0)) / (h * h);
  const double c4 = (2 * m(2 * h) - 8 * m(h) + 6 * m(0)) / std::pow(h, 4);
  const auto dx = e.values(5, 9, kXi12, kX), dxx = e.values(5, 9, kXi12, kXX);
  // The grid is band-limited at spacing 0.25, so compare with a looser relative tolerance.
  CHECK(variance(dx) == doctest::Approx(-c2).epsilon(0.1));
  CHECK(variance(dxx) == doctest::Approx(c4).epsilon(0.25));
}

TEST_CASE("spectral derivatives agree with finite differences of the sample") {
  const GridSpec grid{128, 4.0};
  const auto s = sample_field(CovarianceModel{0.1, 1.0}, grid, 3);
  const double h = grid.spacing();
  double err = 0.0, scale = 0.0, err_y = 0.0, scale_y = 0.0;
  for (int j = 2; j < 126; j += 7)
    for (int i = 2; i < 126; i += 5) {
      const double fd = (s.at(i + 1, j, kXi11, kV) - s.at(i - 1, j, kXi11, kV)) / (2 * h);
      const double fdy = (s.at(i, j + 1, kXi22, kV) - s.at(i, j - 1, kXi22, kV)) / (2 * h);
      err = std::max(err, std::abs(fd - s.at(i, j, kXi11, kX)));
      err_y = std::max(err_y, std::abs(fdy - s.at(i, j, kXi22, kY)));
      scale = std::max(scale, std::abs(s.at(i, j, kXi11, kX)));
      scale_y = std::max(scale_y, std::abs(s.at(i, j, kXi22, kY)));
    }
  CHECK(err < 0.05 * scale);
  CHECK(err_y < 0.05 * scale_y);
}
