#include <doctest.h>

#include <cmath>
#include <random>

#include "rrg/errors.hpp"
#include "rrg/pov.hpp"
#include "rrg/region.hpp"

using namespace rrg;

namespace {

MetricPtr random_metric(std::uint64_t seed, double amplitude = 0.1, int n = 128, double extent = 12.8) {
  return make_grid_metric(sample_field(CovarianceModel{amplitude, 1.0}, GridSpec{n, extent}, seed));
}

std::vector<Vec2> probe_points() { return {Vec2(0, 0), Vec2(0.3, -0.2), Vec2(-1.1, 0.7), Vec2(0.9, 1.4)}; }

}  // namespace

TEST_CASE("sigma_0 is the identity and flat metrics are fixed") {
  auto g = random_metric(1);
  auto p0 = pov_at(g, 0.0, 0.01);
  for (const Vec2& u : probe_points()) CHECK((p0->value(u) - g->value(u)).norm() < 1e-15);
  auto pf = pov_at(flat_metric(), 1.7, 0.01);
  for (const Vec2& u : probe_points()) CHECK((pf->value(u) - Mat2::Identity()).norm() < 1e-14);
}

TEST_CASE("the transformed metric at the origin is the conjugated metric at gamma(t)") {
  auto g = random_metric(2);
  const auto path = integrate(*g, UnitTangentState{}, 1.3, 0.01);
  for (double t : {0.4, 0.95, 1.3}) {
    auto p = pov_transform(g, path, t);
    const Mat2 o = frame_from(path.direction(t));
    CHECK((p->value(Vec2::Zero()) - o.transpose() * g->value(path.position(t)) * o).norm() < 1e-10);
    CHECK(std::abs(p->motion().rotation.determinant() - 1.0) < 1e-12);
    CHECK((p->motion().rotation.transpose() * p->motion().rotation - Mat2::Identity()).norm() < 1e-12);
    // Derivatives transform as tensors too.
    const MetricSample s = p->evaluate(Vec2(0.2, 0.1));
    const double h = 1e-5;
    CHECK((s.dg[0] - (p->value(Vec2(0.2 + h, 0.1)) - p->value(Vec2(0.2 - h, 0.1))) / (2 * h)).norm() < 1e-6);
  }
  CHECK_THROWS_AS(pov_transform(g, path, 2.0), HorizonExceeded);
}

TEST_CASE("geodesic of sigma_t g is the shifted and rotated original") {
  auto g = random_metric(3);
  const double t = 0.8, h = 0.005;
  const auto path = integrate(*g, UnitTangentState{}, t + 1.0, h);
  auto p = pov_transform(g, path, t);
  const auto q = integrate(*p, UnitTangentState{}, 1.0, h);
  const Mat2 o = frame_from(path.direction(t));
  for (double s : {0.25, 0.5, 1.0}) {
    const Vec2 expect = o.transpose() * (path.position(s + t) - path.position(t));
    CHECK((q.position(s) - expect).norm() < 1e-6);
  }
}

TEST_CASE("sigma_{-t} inverts sigma_t") {
  auto g = random_metric(4);
  auto p = pov_at(g, 1.1, 0.002);
  auto back = pov_at(p, -1.1, 0.002);
  for (const Vec2& u : probe_points()) CHECK((back->value(u) - g->value(u)).norm() < 1e-8);
}

TEST_CASE("rho trivial cases") {
  CHECK(rho_density(*flat_metric(), 2.0, 0.01).rho == 1.0);
  CHECK(rho_density(*constant_metric(2.0), 1.0, 0.01).rho == 1.0);
  auto g = random_metric(5);
  const RhoResult zero = rho_density(*g, 0.0, 0.01);
  CHECK(zero.rho == 1.0);
  CHECK(zero.rho_divergence == 1.0);
  CHECK_THROWS_AS(rho_density(*g, -1.0, 0.01), InvalidArgument);
}

TEST_CASE("rho from the closed form agrees with rho from the divergence and stays finite") {
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    auto g = random_metric(seed, 0.1, 64, 6.4);
    const RhoResult r = rho_density(*g, 0.5, 0.01);
    CHECK(std::isfinite(r.rho));
    CHECK(r.rho > 0.0);
    CHECK(std::abs(std::log(r.rho) - std::log(r.rho_divergence)) < 1e-8);
  }
}

TEST_CASE("d/dt log rho_t is minus the divergence at gamma(-t)") {
  auto g = random_metric(6, 0.2);
  const double t = 0.7, d = 1e-3;
  const double slope = (std::log(rho_density(*g, t + d, 1e-3).rho) - std::log(rho_density(*g, t - d, 1e-3).rho)) / (2 * d);
  const auto back = integrate(*g, UnitTangentState{}, -t, 1e-3);
  const UnitTangentState s{back.x.back(), back.v.back()};
  CHECK(slope == doctest::Approx(-divergence_U(*g, s)).epsilon(1e-4).scale(1.0));
}

TEST_CASE("Z is invariant under the point-of-view motion") {
  auto g = random_metric(7);
  const auto path = integrate(*g, UnitTangentState{}, 1.0, 0.01);
  auto p = pov_transform(g, path, 1.0);
  const double z_pov = z_fluctuation(*p, Region::disk(Vec2::Zero(), 0.5, 0.05)).value;
  const double z_base =
      z_fluctuation(*g, Region::disk(p->motion().translation, 0.5, 0.05, p->motion().rotation)).value;
  CHECK(z_pov == doctest::Approx(z_base).epsilon(1e-6));
}

TEST_CASE("change of variables holds exactly in degenerate cases") {
  PovVerifyOptions opt;
  opt.model.amplitude = 0.0;
  opt.samples = 20;
  for (const auto& r : verify_change_of_variables(opt, default_functionals())) {
    CHECK(r.a == r.b);
    CHECK(r.z == 0.0);
    CHECK(r.pass);
    CHECK(r.excluded == 0);
  }
  opt.model.amplitude = 0.1;
  opt.t = 0.0;
  for (const auto& r : verify_change_of_variables(opt, {functional_g11(), functional_tanh_curvature()})) {
    CHECK(r.a == r.b);
    CHECK(r.pass);
  }
}

TEST_CASE("change of variables on a small random ensemble") {
  PovVerifyOptions opt;
  opt.samples = 200;
  opt.seed = 17;
  const auto reports = verify_change_of_variables(opt, {functional_g11()});
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].n + reports[0].excluded == 200);
  CHECK(std::abs(reports[0].z) < 4.0);
  CHECK(reports[0].to_json().find("\"functional\":\"g11\"") != std::string::npos);
}

TEST_CASE("historical exit times") {
  const auto flat = historical_exit_times(flat_metric(), 1.0, 3.0, 0.01);
  REQUIRE(flat.size() == 1);
  CHECK(flat[0] == doctest::Approx(1.0).epsilon(1e-6));

  auto g = random_metric(8);
  const double r = 1.0;
  const auto path = integrate_to_exit(*g, UnitTangentState{}, r, 10.0, 0.01);
  const double tau = *exit_time(path, r);
  auto shifted = pov_transform(g, integrate(*g, UnitTangentState{}, tau, 0.01), tau);
  const auto atoms = historical_exit_times(shifted, r, tau + 0.5, 0.01);
  bool member = false;
  for (double a : atoms) member = member || std::abs(a - tau) < 0.02;
  CHECK(member);
  for (std::size_t k = 1; k < atoms.size(); ++k) CHECK(atoms[k] - atoms[k - 1] > 0.01);
  CHECK_THROWS_AS(historical_exit_times(g, 0.0, 1.0, 0.01), InvalidArgument);
}
