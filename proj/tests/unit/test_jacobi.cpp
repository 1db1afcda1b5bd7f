#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rrg/jacobi.hpp"

using namespace rrg;

namespace {

CurvatureProfile constant_profile(double k, double t1 = 20.0) { return CurvatureProfile({0.0, t1}, {k, k}); }

double value_at(const JacobiSolution& s, double t) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(s.t[i] - t) < 1e-9) return s.j[i];
  FAIL("time not on the solution grid");
  return 0.0;
}

}  // namespace

TEST_CASE("closed-form solutions") {
  const auto flat = jacobi_integrate(constant_profile(0.0), 0.0, 0.0, 1.0, 5.0, 0.01);
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(std::abs(flat.j[i] - flat.t[i]) < 1e-12);
  const auto hyp = jacobi_integrate(constant_profile(-1.0), 0.0, 0.0, 1.0, 3.0, 0.01);
  for (std::size_t i = 0; i < hyp.size(); ++i) CHECK(std::abs(hyp.j[i] - std::sinh(hyp.t[i])) < 1e-6);
  const auto sph = jacobi_integrate(constant_profile(4.0), 0.0, 0.0, 2.0, 3.0, 0.01);
  for (std::size_t i = 0; i < sph.size(); ++i) CHECK(std::abs(sph.j[i] - std::sin(2 * sph.t[i])) < 1e-6);
  CHECK(sph.t.back() == doctest::Approx(3.0));
}

TEST_CASE("linearity and constant Wronskian") {
  const CurvatureProfile k({0.0, 1.0, 2.5, 4.0}, {0.3, -0.8, 1.7, 0.2});
  const auto a = jacobi_integrate(k, 0.0, 0.4, -0.3, 4.0, 0.01);
  const auto b = jacobi_integrate(k, 0.0, 1.2, -0.9, 4.0, 0.01);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b.j[i] - 3.0 * a.j[i]) < 1e-10);
  const auto u = jacobi_integrate(k, 0.0, 1.0, 0.0, 4.0, 0.01);
  const auto v = jacobi_integrate(k, 0.0, 0.0, 1.0, 4.0, 0.01);
  REQUIRE(u.size() == v.size());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u.j[i] * v.jp[i] - u.jp[i] * v.j[i] - 1.0) < 1e-6);
}

TEST_CASE("conjugate points") {
  CHECK_FALSE(first_conjugate_point(constant_profile(0.0), 10.0, 0.01));
  CHECK_FALSE(first_conjugate_point(constant_profile(-1.0), 10.0, 0.01));
  const auto c = first_conjugate_point(constant_profile(1.0), 10.0, 0.01);
  REQUIRE(c);
  CHECK(*c == doctest::Approx(kPi).epsilon(1e-10));
  const auto shifted = first_conjugate_point(constant_profile(1.0), 10.0, 0.01, 1.0);
  REQUIRE(shifted);
  CHECK(*shifted == doctest::Approx(1.0 + kPi).epsilon(1e-10));

  auto sphere = sphere_metric(1.0);
  const auto path = integrate(*sphere, {Vec2(1.0, 0.0), Vec2(0.0, 1.0)}, 4.0, 0.005);
  const auto cs = first_conjugate_point(*sphere, path, 4.0);
  REQUIRE(cs);
  CHECK(std::abs(*cs - kPi) < 1e-4);
  auto flat = flat_metric();
  const auto fp = integrate(*flat, UnitTangentState{}, 4.0, 0.01);
  CHECK_FALSE(first_conjugate_point(*flat, fp, 4.0));
}

TEST_CASE("Sturm comparison on constructed profiles") {
  for (double shift : {0.1, 0.5, 2.0}) {
    const CurvatureProfile low({0.0, 2.0, 6.0}, {0.5, 1.5, 0.8});
    const CurvatureProfile high({0.0, 2.0, 6.0}, {0.5 + shift, 1.5 + shift, 0.8 + shift});
    const auto zl = first_conjugate_point(low, 6.0, 0.01), zh = first_conjugate_point(high, 6.0, 0.01);
    REQUIRE(zl);
    REQUIRE(zh);
    CHECK(*zh <= *zl);
  }
}

TEST_CASE("curvature profile sampled along a path") {
  auto sphere = sphere_metric(2.0);
  const auto path = integrate(*sphere, UnitTangentState{}, 2.0, 0.01);
  const CurvatureProfile k(*sphere, path, 0.0, 2.0);
  for (double t : {0.0, 0.37, 1.999}) CHECK(k(t) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(k.max_abs() == doctest::Approx(2.0).epsilon(1e-8));
  const auto sol = jacobi_integrate(*sphere, path, 0.0, 0.0, 1.0, 2.0);
  CHECK(value_at(sol, 1.0) == doctest::Approx(std::sin(std::sqrt(2.0)) / std::sqrt(2.0)).epsilon(1e-6));
  std::ostringstream csv;
  sol.write_csv(csv);
  CHECK(csv.str().rfind("t,j,jp,K\n", 0) == 0);
}

TEST_CASE("maximal minimizing time") {
  const GridSpec grid{128, 12.8};
  const auto dm = distance_map(*flat_metric(), grid, Vec2::Zero());
  const auto path = integrate(*flat_metric(), UnitTangentState{}, 5.0, 0.01);
  const TStar ts = t_star(dm, path, 5.0);
  CHECK(ts.at_horizon);
  CHECK(ts.time == 5.0);

  const GridSpec sgrid{250, 10.0};
  auto sphere = sphere_metric(1.0);
  const UnitTangentState start{Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  const auto sdm = distance_map(*sphere, sgrid, start.x);
  const auto sp = integrate(*sphere, start, 5.0, 0.005);
  const TStar st = t_star(sdm, sp, 5.0);
  CHECK_FALSE(st.at_horizon);
  CHECK(st.time >= kPi);
  CHECK(st.time <= kPi + minimality_tolerance(sdm, kPi));
  const auto conj = first_conjugate_point(*sphere, sp, 5.0);
  REQUIRE(conj);
  CHECK(st.time <= *conj + minimality_tolerance(sdm, *conj));
}
