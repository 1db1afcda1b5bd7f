#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rrg/errors.hpp"
#include "rrg/geodesic.hpp"

using namespace rrg;

namespace {

MetricPtr random_metric(std::uint64_t seed, double amplitude = 0.1) {
  return make_grid_metric(sample_field(CovarianceModel{amplitude, 1.0}, GridSpec{64, 6.4}, seed));
}

UnitTangentState state(double x, double y, double angle) { return {Vec2(x, y), Vec2(std::cos(angle), std::sin(angle))}; }

// Divergence of (lambda v, omega) on R^2 x S^1 by central differences of flow_field.
double fd_divergence(const MetricField& g, const Vec2& x, double angle, double h = 1e-5) {
  double div = 0.0;
  for (int a = 0; a < 2; ++a) {
    const Vec2 e = Vec2::Unit(a) * h;
    const UnitTangentState p{x + e, Vec2(std::cos(angle), std::sin(angle))};
    const UnitTangentState m{x - e, p.v};
    div += (flow_field(g, p).dx[a] - flow_field(g, m).dx[a]) / (2 * h);
  }
  auto omega = [&](double phi) {
    const UnitTangentState s = state(x.x(), x.y(), phi);
    return flow_field(g, s).dv.dot(perp(s.v));
  };
  return div + (omega(angle + h) - omega(angle - h)) / (2 * h);
}

double g_speed(const MetricField& g, const GeodesicPath& p, std::size_t k) {
  const Vec2 xd = p.lambda[k] * p.v[k];
  return std::sqrt(xd.dot(g.value(p.x[k]) * xd));
}

}  // namespace

TEST_CASE("flow field examples") {
  const auto s = state(0.2, -0.1, 0.7);
  const FlowValue flat = flow_field(*flat_metric(), s);
  CHECK((flat.dx - s.v).norm() < 1e-15);
  CHECK(flat.dv.norm() < 1e-15);
  const FlowValue c4 = flow_field(*constant_metric(4.0), s);
  CHECK((c4.dx - 0.5 * s.v).norm() < 1e-15);
  CHECK(c4.dv.norm() < 1e-15);
  auto g = random_metric(1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ang(0, 2 * kPi);
  for (int k = 0; k < 100; ++k) {
    const auto r = state(u(rng), u(rng), ang(rng));
    CHECK(std::abs(flow_field(*g, r).dv.dot(r.v)) < 1e-12);
  }
}

TEST_CASE("divergence closed form matches a finite-difference divergence with coefficient two") {
  CHECK(divergence_closed_form(*flat_metric(), state(0, 0, 1.0)) == 0.0);
  CHECK(divergence_closed_form(*constant_metric(3.0), state(0, 0, 1.0)) == 0.0);
  auto g = random_metric(2, 0.3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ang(0, 2 * kPi);
  double err2 = 0.0, err3 = 0.0;
  for (int k = 0; k < 40; ++k) {
    const auto s = state(u(rng), u(rng), ang(rng));
    const double fd = fd_divergence(*g, s.x, std::atan2(s.v.y(), s.v.x()));
    CHECK(divergence_U(*g, s) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    err2 = std::max(err2, std::abs(divergence_closed_form(*g, s, 2.0) - fd));
    err3 = std::max(err3, std::abs(divergence_closed_form(*g, s, 3.0) - fd));
  }
  CHECK(err2 < 1e-5);
  CHECK(err3 > 1e3 * err2);
}

TEST_CASE("flat geodesic is a straight line") {
  const auto p = integrate(*flat_metric(), UnitTangentState{}, 3.0, 0.01);
  CHECK((p.x.back() - Vec2(3, 0)).norm() < 1e-10);
  CHECK(p.t_back() == doctest::Approx(3.0));
  const auto q = integrate(*flat_metric(), state(0, 0, 0.3), 2.5, 0.07);
  CHECK((q.x.back() - 2.5 * Vec2(std::cos(0.3), std::sin(0.3))).norm() < 1e-10);
}

TEST_CASE("sphere great circle returns after 2 pi with fourth-order convergence") {
  auto sphere = sphere_metric(1.0);
  const UnitTangentState s{Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  double prev = 0.0;
  for (double h : {0.08, 0.04, 0.02}) {
    const auto p = integrate(*sphere, s, 2 * kPi, h);
    const double err = (p.x.back() - s.x).norm();
    if (h < 0.05) CHECK(prev / err > 10.0);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("unit Riemannian speed and unit direction along random paths") {
  auto g = random_metric(3);
  const auto p = integrate(*g, UnitTangentState{}, 2.5, 0.01);
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(std::abs(g_speed(*g, p, k) - 1.0) < 1e-6);
    CHECK(std::abs(p.v[k].norm() - 1.0) < 1e-14);
  }
}

TEST_CASE("time reversal returns to the start") {
  const auto f = integrate(*flat_metric(), state(0.1, 0.2, 0.4), 2.0, 0.01);
  const auto b = integrate(*flat_metric(), {f.x.back(), -f.v.back()}, 2.0, 0.01);
  CHECK((b.x.back() - Vec2(0.1, 0.2)).norm() < 1e-8);
  auto g = make_grid_metric(sample_field(CovarianceModel{0.1, 1.0}, GridSpec{128, 6.4}, 4));
  const auto fr = integrate(*g, UnitTangentState{}, 2.0, 0.005);
  const auto br = integrate(*g, {fr.x.back(), -fr.v.back()}, 2.0, 0.005);
  CHECK(br.x.back().norm() < 1e-5);
  // Negative T runs the same curve backward.
  const auto neg = integrate(*g, {fr.x.back(), fr.v.back()}, -2.0, 0.005);
  CHECK(neg.x.back().norm() < 1e-5);
  CHECK(neg.t_back() == doctest::Approx(-2.0));
}

TEST_CASE("leaving the sampled box raises LeftDomain") {
  auto g = random_metric(5);
  CHECK_THROWS_AS(integrate(*g, UnitTangentState{}, 10.0, 0.01), LeftDomain);
  CHECK_THROWS_AS(integrate(*flat_metric(), UnitTangentState{}, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("exit times, trapping and exit angles") {
  const auto p = integrate(*flat_metric(), UnitTangentState{}, 3.0, 0.01);
  for (double r : {0.5, 1.0, 2.0}) {
    REQUIRE(exit_time(p, r));
    CHECK(*exit_time(p, r) == doctest::Approx(r).epsilon(1e-9));
    CHECK(exit_angle(p, r) == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  }
  CHECK_FALSE(exit_time(p, 5.0));
  CHECK_THROWS_AS(exit_angle(p, 5.0), NoExit);
  const auto off = integrate(*flat_metric(), state(0, 0.5, 0.0), 3.0, 0.01);
  const double a = exit_angle(off, 1.0);
  CHECK(a == doctest::Approx(std::asin(0.5)).epsilon(1e-6));
  CHECK(a <= kPi / 2);
}

TEST_CASE("exit times are nondecreasing in r and follow the derivative formula") {
  for (std::uint64_t seed = 10; seed < 60; ++seed) {
    auto g = random_metric(seed);
    const auto p = integrate_to_exit(*g, UnitTangentState{}, 2.5, 10.0, 0.01);
    double last = 0.0;
    for (double r = 0.1; r <= 2.5; r += 0.1) {
      const auto t = exit_time(p, r);
      if (!t) break;
      CHECK(*t >= last);
      last = *t;
    }
  }
  auto g = random_metric(61);
  const auto p = integrate_to_exit(*g, UnitTangentState{}, 2.0, 10.0, 0.005);
  const double r = 1.3, dr = 1e-4;
  const double t0 = *exit_time(p, r), t1 = *exit_time(p, r + dr);
  const double rate = r / p.position(t0).dot(p.velocity(t0));
  CHECK((t1 - t0) / dr == doctest::Approx(rate).epsilon(0.01));
}

TEST_CASE("path CSV export") {
  const auto p = integrate(*flat_metric(), UnitTangentState{}, 0.02, 0.01);
  std::ostringstream os;
  p.write_csv(os);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,x1,x2,v1,v2,lambda\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
