#include "rrg/region.hpp"

#include <cmath>
#include <map>

#include "rrg/errors.hpp"

namespace rrg {

Region::Region(Predicate inside, Vec2 anchor, Mat2 frame, double spacing, double half_width) {
  if (spacing <= 0.0) {
    if (inside(anchor)) nodes_.push_back(anchor);
    return;
  }
  const int m = static_cast<int>(std::ceil(half_width / spacing));
  std::map<std::pair<int, int>, int> index;
  for (int j = -m; j <= m; ++j)
    for (int i = -m; i <= m; ++i) {
      const Vec2 x = anchor + frame * Vec2(i * spacing, j * spacing);
      if (!inside(x)) continue;
      index[{i, j}] = static_cast<int>(nodes_.size());
      nodes_.push_back(x);
    }
  for (const auto& [key, id] : index) {
    for (const auto& step : {std::make_pair(1, 0), std::make_pair(0, 1)}) {
      auto it = index.find({key.first + step.first, key.second + step.second});
      if (it != index.end()) adjacent_.emplace_back(id, it->second);
    }
  }
}

Region Region::point(const Vec2& x) {
  return Region([](const Vec2&) { return true; }, x, Mat2::Identity(), 0.0, 0.0);
}

Region Region::disk(const Vec2& center, double radius, double spacing, const Mat2& frame) {
  const double r2 = radius * radius * (1.0 + 1e-12);
  return Region([center, r2](const Vec2& x) { return (x - center).squaredNorm() <= r2; }, center, frame,
                spacing, radius);
}

Region Region::lens(const Vec2& c1, double r1, const Vec2& c2, double r2, double spacing,
                    const Vec2& anchor, const Mat2& frame) {
  const double half = std::min((anchor - c1).norm() + r1, (anchor - c2).norm() + r2);
  return Region(
      [=](const Vec2& x) { return (x - c1).norm() <= r1 && (x - c2).norm() <= r2; }, anchor, frame,
      spacing, half);
}

Region Region::frontier_cone(double phi, double spacing) {
  const double c = std::cos(phi), t = std::tan(phi);
  return Region(
      [c, t](const Vec2& x) {
        return x.x() >= 0.0 && x.x() <= c * (1.0 + 1e-12) && std::abs(x.y()) <= t * x.x() + 1e-12;
      },
      Vec2::Zero(), Mat2::Identity(), spacing, 1.0);
}

namespace {

struct Deviation {
  Mat2 v;
  std::array<Mat2, 2> d;
  std::array<Mat2, 3> dd;
};

double norm1(const std::array<Mat2, 2>& d) {
  return std::sqrt(d[0].squaredNorm() + d[1].squaredNorm());
}

// Mixed second derivative counted twice so the norm is that of the full symmetric tensor.
double norm2(const std::array<Mat2, 3>& dd) {
  return std::sqrt(dd[0].squaredNorm() + 2.0 * dd[1].squaredNorm() + dd[2].squaredNorm());
}

template <typename Diff>
double lipschitz(const std::vector<Deviation>& devs, const Region& d, Diff diff) {
  double lip = 0.0;
  for (const auto& [a, b] : d.adjacent()) {
    const double dist = (d.nodes()[a] - d.nodes()[b]).norm();
    lip = std::max(lip, diff(devs[a], devs[b]) / dist);
  }
  return lip;
}

double c21(const std::vector<Deviation>& devs, const Region& d) {
  double out = 0.0;
  for (const auto& e : devs) out = std::max({out, e.v.norm(), norm1(e.d), norm2(e.dd)});
  return std::max(out, lipschitz(devs, d, [](const Deviation& a, const Deviation& b) {
                    return norm2({a.dd[0] - b.dd[0], a.dd[1] - b.dd[1], a.dd[2] - b.dd[2]});
                  }));
}

double c11(const std::vector<Deviation>& devs, const Region& d) {
  double out = 0.0;
  for (const auto& e : devs) out = std::max({out, e.v.norm(), norm1(e.d)});
  return std::max(out, lipschitz(devs, d, [](const Deviation& a, const Deviation& b) {
                    return norm1({a.d[0] - b.d[0], a.d[1] - b.d[1]});
                  }));
}

}  // namespace

FluctuationValue z_fluctuation(const MetricField& g, const Region& d) {
  std::vector<Deviation> dg, dinv;
  dg.reserve(d.nodes().size());
  dinv.reserve(d.nodes().size());
  for (const Vec2& x : d.nodes()) {
    const MetricSample s = g.evaluate(x);
    dg.push_back({s.g - Mat2::Identity(), s.dg, s.ddg});
    dinv.push_back({s.g.inverse() - Mat2::Identity(), inverse_derivatives(s), {}});
  }
  FluctuationValue z;
  z.metric_c21 = c21(dg, d);
  z.inverse_c11 = c11(dinv, d);
  z.value = std::max(z.metric_c21, z.inverse_c11);
  z.nodes = d.nodes().size();
  return z;
}

double c21_distance(const MetricField& a, const MetricField& b, const Region& d) {
  std::vector<Deviation> devs;
  devs.reserve(d.nodes().size());
  for (const Vec2& x : d.nodes()) {
    const MetricSample sa = a.evaluate(x), sb = b.evaluate(x);
    devs.push_back({sa.g - sb.g,
                    {sa.dg[0] - sb.dg[0], sa.dg[1] - sb.dg[1]},
                    {sa.ddg[0] - sb.ddg[0], sa.ddg[1] - sb.ddg[1], sa.ddg[2] - sb.ddg[2]}});
  }
  return c21(devs, d);
}

double c2_distance_at(const MetricField& a, const MetricField& b, const Vec2& x) {
  return c21_distance(a, b, Region::point(x));
}

}  // namespace rrg
