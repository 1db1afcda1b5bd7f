#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rrg/distance.hpp"
#include "rrg/errors.hpp"
#include "rrg/jacobi.hpp"

using namespace rrg;

namespace {

const GridSpec kGrid{128, 12.8};

MetricPtr random_metric(std::uint64_t seed, double amplitude = 0.3) {
  return make_grid_metric(sample_field(CovarianceModel{amplitude, 1.0}, kGrid, seed));
}

int node_index(const GridSpec& grid, double c) { return static_cast<int>(std::lround((c + grid.half()) / grid.spacing())); }

}  // namespace

TEST_CASE("stencil sizes") {
  CHECK(stencil(1).size() == 8);
  CHECK(stencil(2).size() == 16);
  CHECK(stencil(3).size() == 32);
}

TEST_CASE("flat and conformal distances") {
  const auto flat = distance_map(*flat_metric(), kGrid, Vec2::Zero());
  CHECK(flat.at(flat.source_i, flat.source_j) == 0.0);
  CHECK(flat.query(Vec2(3, 4)) == doctest::Approx(5.0).epsilon(0.01));
  CHECK(distance_map(*flat_metric(), kGrid, Vec2::Zero(), 2).query(Vec2(3, 4)) == doctest::Approx(5.0).epsilon(0.015));
  const auto c4 = distance_map(*constant_metric(4.0), kGrid, Vec2::Zero());
  CHECK(c4.query(Vec2(3, 4)) == doctest::Approx(10.0).epsilon(0.01));
  // Axis and diagonal directions are exact for lattice-aligned stencil steps.
  CHECK(flat.query(Vec2(5, 0)) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(flat.query(Vec2(3, 3)) == doctest::Approx(3 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(flat.query(Vec2(7, 0)), OutOfDomain);
}

TEST_CASE("worst-case flat metrication error shrinks with the stencil") {
  double worst[4] = {};
  for (int rad = 1; rad <= 3; ++rad) {
    const auto dm = distance_map(*flat_metric(), kGrid, Vec2::Zero(), rad);
    for (int j = 0; j < kGrid.n; ++j)
      for (int i = 0; i < kGrid.n; ++i) {
        const double e = kGrid.node(i, j).norm();
        if (e > 1.0) worst[rad] = std::max(worst[rad], dm.at(i, j) / e - 1.0);
      }
  }
  CHECK(worst[1] > 0.07);
  CHECK(worst[2] < 0.03);
  CHECK(worst[3] < 0.015);
  CHECK(worst[3] < worst[2]);
}

TEST_CASE("graph distance is symmetric, nonnegative and satisfies the triangle inequality") {
  auto g = random_metric(1);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> idx(20, 107);
  for (int k = 0; k < 5; ++k) {
    const int ai = idx(rng), aj = idx(rng), bi = idx(rng), bj = idx(rng), ci = idx(rng), cj = idx(rng);
    const auto da = distance_map(*g, kGrid, kGrid.node(ai, aj));
    const auto db = distance_map(*g, kGrid, kGrid.node(bi, bj));
    CHECK(da.at(bi, bj) == doctest::Approx(db.at(ai, aj)).epsilon(1e-9));
    CHECK(da.at(ci, cj) <= da.at(bi, bj) + db.at(ci, cj) + 1e-9);
    for (double v : da.d) CHECK(v >= 0.0);
  }
}

TEST_CASE("traced paths and exports") {
  const auto dm = distance_map(*flat_metric(), kGrid, Vec2::Zero());
  const auto nodes = dm.trace(node_index(kGrid, 2.0), node_index(kGrid, 1.0));
  CHECK((nodes.front() - Vec2::Zero()).norm() < 1e-12);
  CHECK((nodes.back() - Vec2(2, 1)).norm() < 1e-9);
  CHECK(dm.metadata_json().find("\"stencil_radius\":3") != std::string::npos);
  std::ostringstream bin;
  dm.write_binary(bin);
  CHECK(bin.str().size() == kGrid.size() * sizeof(double));
}

TEST_CASE("minimality in the flat plane") {
  const auto dm = distance_map(*flat_metric(), kGrid, Vec2::Zero());
  const auto path = integrate(*flat_metric(), {Vec2::Zero(), Vec2(0.6, 0.8)}, 6.0, 0.01);
  CHECK_FALSE(minimality_failure(dm, path, 6.0));
  for (double t : {0.5, 2.0, 6.0}) CHECK(is_minimizing(dm, path, t));
  CHECK(minimality_tolerance(dm, 5.0) == doctest::Approx(0.1 + 0.2));
}

TEST_CASE("sphere geodesics stop minimizing past the antipode") {
  const GridSpec grid{250, 10.0};
  auto sphere = sphere_metric(1.0);
  const UnitTangentState start{Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  const auto dm = distance_map(*sphere, grid, start.x);
  const auto path = integrate(*sphere, start, 5.0, 0.005);
  const auto fail = minimality_failure(dm, path, 5.0);
  REQUIRE(fail);
  CHECK(*fail >= kPi);
  CHECK(*fail <= kPi + minimality_tolerance(dm, kPi));
  bool seen_false = false;
  for (double t = 0.1; t < 5.0; t += 0.1) {
    const bool m = is_minimizing(dm, path, t);
    if (seen_false) CHECK_FALSE(m);
    seen_false = seen_false || !m;
  }
  CHECK(seen_false);
  // A conjugate point rules out minimality beyond it plus the tolerance.
  const auto conj = first_conjugate_point(*sphere, path, 5.0);
  REQUIRE(conj);
  CHECK_FALSE(is_minimizing(dm, path, *conj + minimality_tolerance(dm, *conj) + 0.05));
}

TEST_CASE("minimizing fractions") {
  const auto flat_dm = distance_map(*flat_metric(), kGrid, Vec2::Zero());
  const auto flat = minimizing_fraction(*flat_metric(), flat_dm, 16, {1.0, 2.0, 4.0});
  for (double f : flat.fraction) CHECK(f == 1.0);
  CHECK_THROWS_AS(minimizing_fraction(*flat_metric(), flat_dm, 4, {1.0}), InvalidArgument);
  for (std::uint64_t seed = 2; seed < 5; ++seed) {
    auto g = random_metric(seed);
    const auto dm = distance_map(*g, kGrid, Vec2::Zero());
    const auto res = minimizing_fraction(*g, dm, 16, {1.0, 2.0, 4.0});
    for (std::size_t q = 1; q < res.fraction.size(); ++q) CHECK(res.fraction[q] <= res.fraction[q - 1]);
    for (const auto& flags : res.minimizing)
      for (std::size_t q = 1; q < flags.size(); ++q) CHECK(flags[q] <= flags[q - 1]);
    CHECK(std::abs(res.dijkstra_direction.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("shape constant") {
  ShapeOptions opt;
  opt.grid = kGrid;
  opt.radii = {2.0, 4.0};
  opt.samples = 4;
  opt.directions = 8;
  const auto rows = shape_constant(opt, [](std::size_t) { return constant_metric(2.25); });
  for (const auto& row : rows) {
    CHECK(row.mu == doctest::Approx(1.5).epsilon(0.01));
    CHECK(row.se == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(row.bracket_fraction == 1.0);
  }
  opt.model.amplitude = 0.3;
  auto se_for = [&](std::size_t n) {
    opt.samples = n;
    const auto r = shape_constant(opt);
    for (const auto& row : r) CHECK(row.mu > 0.0);
    return r[1].se;
  };
  const double ratio = se_for(6) / se_for(24);
  CHECK(ratio > 1.2);
  CHECK(ratio < 4.0);
}

TEST_CASE("frontier scan in the flat plane") {
  std::vector<double> radii;
  for (double r = 1.0; r <= 5.0 + 1e-9; r += 0.25) radii.push_back(r);
  const auto rep = frontier_scan(*flat_metric(), Vec2(1, 1), radii, kPi / 4, 1.0);
  for (const auto& row : rep.rows) {
    CHECK(row.alpha == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    CHECK(row.z == 0.0);
    CHECK(row.in_q);
  }
  CHECK(rep.density == 1.0);
  REQUIRE(rep.r_sequence.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(rep.r_sequence[k] == doctest::Approx(1.0 + k));
  std::ostringstream csv;
  rep.write_csv(csv);
  CHECK(csv.str().rfind("r,alpha,Z,in_Q\n", 0) == 0);
}

TEST_CASE("frontier scan on a random sample") {
  auto g = random_metric(9, 0.2);
  const auto rep = frontier_scan(*g, Vec2(0, 1), {1.0, 1.5, 2.0, 2.5, 3.0}, kPi / 4, 50.0, 0.2);
  CHECK(rep.density >= 0.0);
  CHECK(rep.density <= 1.0);
  for (std::size_t k = 1; k < rep.r_sequence.size(); ++k) CHECK(rep.r_sequence[k] >= rep.r_sequence[k - 1] + 1.0);
  for (const auto& row : rep.rows) CHECK(row.alpha <= kPi / 2);
}

TEST_CASE("chi scan flat control has zero variance") {
  const auto flat = chi_scan([](std::size_t) { return flat_metric(); }, 4, kGrid, {1.0, 2.0, 4.0}, 8);
  CHECK(flat.zero_variance);
  CHECK_FALSE(flat.fitted);
  const auto rnd = chi_scan([](std::size_t s) { return random_metric(100 + s); }, 6, kGrid, {1.0, 2.0, 4.0}, 8);
  CHECK_FALSE(rnd.zero_variance);
  CHECK(rnd.fitted);
  for (const auto& row : rnd.rows) CHECK(row.sd > 0.0);
}
