#include <doctest.h>

#include <cmath>

#include "rrg/region.hpp"

using namespace rrg;

namespace {

MetricPtr random_metric(std::uint64_t seed) {
  return make_grid_metric(sample_field(CovarianceModel{0.1, 1.0}, GridSpec{64, 6.4}, seed));
}

}  // namespace

TEST_CASE("region lattices") {
  const Region p = Region::point(Vec2(0.3, 0.4));
  REQUIRE(p.nodes().size() == 1);
  CHECK(p.adjacent().empty());
  const Region d = Region::disk(Vec2::Zero(), 1.0, 0.5);
  CHECK(d.nodes().size() == 13);
  CHECK(d.adjacent().size() == 16);
  for (const Vec2& x : d.nodes()) CHECK(x.norm() <= 1.0 + 1e-12);
  const Region lens = Region::lens(Vec2::Zero(), 1.0, Vec2(1.5, 0), 1.0, 0.05, Vec2(1.5, 0));
  for (const Vec2& x : lens.nodes()) {
    CHECK(x.norm() <= 1.0 + 1e-9);
    CHECK((x - Vec2(1.5, 0)).norm() <= 1.0 + 1e-9);
  }
  CHECK(!lens.nodes().empty());
  const double phi = 0.4;
  for (const Vec2& x : Region::frontier_cone(phi, 0.02).nodes()) {
    CHECK(x.x() >= 0.0);
    CHECK(x.x() <= std::cos(phi) + 1e-9);
    CHECK(std::abs(x.y()) <= std::tan(phi) * x.x() + 1e-9);
  }
}

TEST_CASE("Z vanishes on the Euclidean metric") {
  for (const Region& d : {Region::point(Vec2(1, 2)), Region::disk(Vec2::Zero(), 1.0, 0.1),
                          Region::frontier_cone(0.5, 0.05)})
    CHECK(z_fluctuation(*flat_metric(), d).value == 0.0);
}

TEST_CASE("Z closed forms") {
  const double c = 4.0;
  const auto zc = z_fluctuation(*constant_metric(c), Region::disk(Vec2::Zero(), 1.0, 0.1));
  CHECK(zc.metric_c21 == doctest::Approx(std::sqrt(2.0) * (c - 1)));
  CHECK(zc.inverse_c11 == doctest::Approx(std::sqrt(2.0) * (1 - 1 / c)));
  CHECK(zc.value == doctest::Approx(std::sqrt(2.0) * (c - 1)));
  auto conf = conformal_metric("lin", [](const Jet& x, const Jet&) { return 0.1 * x; });
  const auto zp = z_fluctuation(*conf, Region::point(Vec2::Zero()));
  CHECK(zp.value == doctest::Approx(0.2 * std::sqrt(2.0)));
  CHECK(zp.nodes == 1);
}

TEST_CASE("Z is monotone under inclusion") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto g = random_metric(seed);
    double last = 0.0;
    for (double r : {0.0, 0.25, 0.5, 1.0, 1.5}) {
      const Region d = r == 0.0 ? Region::point(Vec2::Zero()) : Region::disk(Vec2::Zero(), r, 0.05);
      const double z = z_fluctuation(*g, d).value;
      CHECK(z >= last);
      last = z;
    }
  }
}

TEST_CASE("Z is invariant under a rigid rotation of field and region") {
  auto g = random_metric(11);
  const Vec2 c(0.4, -0.3);
  const double ang = 0.7;
  Mat2 o;
  o << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  // h(u) = O^T g(c + O u) O is g seen from c with axes O.
  auto h = std::make_shared<AnalyticMetric>("rot", [&](const Jet& u1, const Jet& u2) {
    const Vec2 x = c + o * Vec2(u1.v, u2.v);
    const MetricSample s = g->evaluate(x);
    // Pull back value and derivatives through the affine map.
    MetricSample t;
    t.g = o.transpose() * s.g * o;
    for (int a = 0; a < 2; ++a) {
      Mat2 d = Mat2::Zero();
      for (int k = 0; k < 2; ++k) d += o(k, a) * s.dg[k];
      t.dg[a] = o.transpose() * d * o;
    }
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        Mat2 d = Mat2::Zero();
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) d += o(k, a) * o(l, b) * s.second(k, l);
        t.ddg[a + b] = o.transpose() * d * o;
      }
    return to_symjet(t);
  });
  const double zh = z_fluctuation(*h, Region::disk(Vec2::Zero(), 0.5, 0.05)).value;
  const double zg = z_fluctuation(*g, Region::disk(c, 0.5, 0.05, o)).value;
  CHECK(zh == doctest::Approx(zg).epsilon(1e-6));
}

TEST_CASE("C^{2,1} distance") {
  auto g = random_metric(12);
  const Region d = Region::disk(Vec2::Zero(), 0.5, 0.1);
  CHECK(c21_distance(*g, *g, d) == 0.0);
  CHECK(c21_distance(*g, *flat_metric(), d) == doctest::Approx(z_fluctuation(*g, d).metric_c21));
  CHECK(c2_distance_at(*constant_metric(2.0), *flat_metric(), Vec2(3, 3)) == doctest::Approx(std::sqrt(2.0)));
}
