#include "rrg/metric.hpp"

#include <cmath>
#include <sstream>

#include "rrg/errors.hpp"

namespace rrg {

MetricSample to_sample(const SymJet& m) {
  MetricSample s;
  s.g << m.a11.v, m.a12.v, m.a12.v, m.a22.v;
  for (int k = 0; k < 2; ++k) s.dg[k] << m.a11.d[k], m.a12.d[k], m.a12.d[k], m.a22.d[k];
  for (int k = 0; k < 3; ++k) s.ddg[k] << m.a11.h[k], m.a12.h[k], m.a12.h[k], m.a22.h[k];
  return s;
}

SymJet to_symjet(const MetricSample& s) {
  auto entry = [&](int r, int c) {
    return Jet(s.g(r, c), s.dg[0](r, c), s.dg[1](r, c), s.ddg[0](r, c), s.ddg[1](r, c), s.ddg[2](r, c));
  };
  return {entry(0, 0), entry(0, 1), entry(1, 1)};
}

double phi_scalar(double u) {
  // Rewritten for u < 0 to avoid cancellation.
  const double r = std::sqrt(u * u + 1.0);
  return u >= 0.0 ? u + r : 1.0 / (r - u);
}

Mat2 phi_transform(const Mat2& xi) {
  const double a = xi(0, 0), b = 0.5 * (xi(0, 1) + xi(1, 0)), c = xi(1, 1);
  const double m = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), b);
  const double lo = m - r, hi = m + r;
  Mat2 sym;
  sym << a, b, b, c;
  if (r < 1e-12 * (1.0 + std::abs(m))) {
    // Repeated eigenvalue: phi(X) = phi(m) I + phi'(m) (X - m I).
    const double dphi = 1.0 + m / std::sqrt(m * m + 1.0);
    return phi_scalar(m) * Mat2::Identity() + dphi * (sym - m * Mat2::Identity());
  }
  // phi(X) = phi(lo) I + (phi(hi) - phi(lo)) P_hi with P_hi = (X - lo I) / (hi - lo).
  const double plo = phi_scalar(lo), phi_hi = phi_scalar(hi);
  return plo * Mat2::Identity() + (phi_hi - plo) / (hi - lo) * (sym - lo * Mat2::Identity());
}

SymJet phi_transform(const SymJet& x) {
  const Jet m11 = x.a11 * x.a11 + x.a12 * x.a12 + 1.0;
  const Jet m12 = x.a12 * (x.a11 + x.a22);
  const Jet m22 = x.a12 * x.a12 + x.a22 * x.a22 + 1.0;
  const Jet s = sqrt(m11 * m22 - m12 * m12);
  const Jet inv = recip(sqrt(m11 + m22 + 2.0 * s));
  return {x.a11 + (m11 + s) * inv, x.a12 + m12 * inv, x.a22 + (m22 + s) * inv};
}

Christoffel christoffel(const MetricSample& s) {
  const Mat2 gi = s.g.inverse();
  Christoffel gamma{Mat2::Zero(), Mat2::Zero()};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 2; ++l)
          acc += gi(k, l) * (s.dg[j](l, i) + s.dg[i](l, j) - s.dg[l](i, j));
        gamma[k](i, j) = gamma[k](j, i) = 0.5 * acc;
      }
  return gamma;
}

// Brioschi formula with E = g11, F = g12, G = g22 and coordinates (u, v) = (x1, x2).
double scalar_curvature(const MetricSample& s) {
  const double E = s.g(0, 0), F = s.g(0, 1), G = s.g(1, 1);
  const double Eu = s.dg[0](0, 0), Ev = s.dg[1](0, 0);
  const double Fu = s.dg[0](0, 1), Fv = s.dg[1](0, 1);
  const double Gu = s.dg[0](1, 1), Gv = s.dg[1](1, 1);
  const double Evv = s.ddg[2](0, 0), Fuv = s.ddg[1](0, 1), Guu = s.ddg[0](1, 1);
  Eigen::Matrix3d a, b;
  a << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
       Fv - 0.5 * Gu, E, F,
       0.5 * Gv, F, G;
  b << 0.0, 0.5 * Ev, 0.5 * Gu,
       0.5 * Ev, E, F,
       0.5 * Gu, F, G;
  const double det = E * G - F * F;
  return (a.determinant() - b.determinant()) / (det * det);
}

Vec2 grad_log_det(const MetricSample& s) {
  const Mat2 gi = s.g.inverse();
  return {(gi * s.dg[0]).trace(), (gi * s.dg[1]).trace()};
}

std::array<Mat2, 2> inverse_derivatives(const MetricSample& s) {
  const Mat2 gi = s.g.inverse();
  return {-gi * s.dg[0] * gi, -gi * s.dg[1] * gi};
}

AnalyticMetric::AnalyticMetric(std::string name, Fn fn, double radius)
    : name_(std::move(name)), fn_(std::move(fn)), radius_(radius) {}

MetricSample AnalyticMetric::evaluate(const Vec2& x) const {
  if (!contains(x)) throw OutOfDomain(name_ + ": point outside analytic domain");
  return to_sample(fn_(Jet::variable(x.x(), 0), Jet::variable(x.y(), 1)));
}

MetricPtr flat_metric() {
  return std::make_shared<AnalyticMetric>("flat", [](const Jet&, const Jet&) {
    return SymJet{Jet(1.0), Jet(0.0), Jet(1.0)};
  });
}

MetricPtr constant_metric(double c) {
  std::ostringstream name;
  name << "constant(" << c << ")";
  return std::make_shared<AnalyticMetric>(name.str(), [c](const Jet&, const Jet&) {
    return SymJet{Jet(c), Jet(0.0), Jet(c)};
  });
}

MetricPtr conformal_metric(std::string name, std::function<Jet(const Jet&, const Jet&)> lambda) {
  return std::make_shared<AnalyticMetric>(std::move(name), [lambda](const Jet& x1, const Jet& x2) {
    const Jet f = exp(2.0 * lambda(x1, x2));
    return SymJet{f, Jet(0.0), f};
  });
}

MetricPtr sphere_metric(double k0) {
  std::ostringstream name;
  name << "sphere(K0=" << k0 << ")";
  return std::make_shared<AnalyticMetric>(name.str(), [k0](const Jet& x1, const Jet& x2) {
    const Jet q = 1.0 + (0.25 * k0) * (x1 * x1 + x2 * x2);
    const Jet f = recip(q * q);
    return SymJet{f, Jet(0.0), f};
  });
}

namespace {

// Quintic Hermite basis on [0, 1]: rows are (end, derivative order p), columns the s-derivative.
struct Basis {
  double w[2][3][3];
};

Basis hermite5(double s, double h) {
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double raw[6][3] = {
      {1 - 10 * s3 + 15 * s4 - 6 * s5, -30 * s2 + 60 * s3 - 30 * s4, -60 * s + 180 * s2 - 120 * s3},
      {s - 6 * s3 + 8 * s4 - 3 * s5, 1 - 18 * s2 + 32 * s3 - 15 * s4, -36 * s + 96 * s2 - 60 * s3},
      {0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5, s - 4.5 * s2 + 6 * s3 - 2.5 * s4, 1 - 9 * s + 18 * s2 - 10 * s3},
      {10 * s3 - 15 * s4 + 6 * s5, 30 * s2 - 60 * s3 + 30 * s4, 60 * s - 180 * s2 + 120 * s3},
      {-4 * s3 + 7 * s4 - 3 * s5, -12 * s2 + 28 * s3 - 15 * s4, -24 * s + 84 * s2 - 60 * s3},
      {0.5 * s3 - s4 + 0.5 * s5, 1.5 * s2 - 4 * s3 + 2.5 * s4, 3 * s - 12 * s2 + 10 * s3}};
  Basis b;
  const double hp[3] = {1.0, h, h * h};
  const double hd[3] = {1.0, 1.0 / h, 1.0 / (h * h)};
  for (int end = 0; end < 2; ++end)
    for (int p = 0; p < 3; ++p)
      for (int d = 0; d < 3; ++d) b.w[end][p][d] = raw[3 * end + p][d] * hp[p] * hd[d];
  return b;
}

struct Cell {
  int i0, i1, j0, j1;
  double s, r;
};

Cell locate(const GridSpec& grid, const Vec2& x) {
  const double h = grid.spacing();
  auto axis = [&](double c, int& a0, int& a1, double& frac) {
    const double u = (c + grid.half()) / h;
    int k = static_cast<int>(std::floor(u));
    if (k >= grid.n) k = grid.n - 1;
    frac = u - k;
    a0 = k;
    a1 = (k + 1) % grid.n;
  };
  Cell c{};
  axis(x.x(), c.i0, c.i1, c.s);
  axis(x.y(), c.j0, c.j1, c.r);
  return c;
}

}  // namespace

GridMetric::GridMetric(std::shared_ptr<const TensorFieldSample> sample) : sample_(std::move(sample)) {}

bool GridMetric::contains(const Vec2& x) const {
  const double half = sample_->grid().half();
  return std::abs(x.x()) <= half && std::abs(x.y()) <= half;
}

SymJet GridMetric::xi_jet(const Vec2& x) const {
  if (!contains(x)) throw OutOfDomain("grid metric: point outside sampled box");
  const GridSpec& grid = sample_->grid();
  const Cell c = locate(grid, x);
  const Basis bx = hermite5(c.s, grid.spacing());
  const Basis by = hermite5(c.r, grid.spacing());
  // Output derivative orders (dx, dy) in jet order v, x, y, xx, xy, yy.
  static constexpr int out_dx[6] = {0, 1, 0, 2, 1, 0};
  static constexpr int out_dy[6] = {0, 0, 1, 0, 1, 2};
  double acc[3][6] = {};
  const int ii[2] = {c.i0, c.i1};
  const int jj[2] = {c.j0, c.j1};
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) {
      const double* node = sample_->node_data(ii[a], jj[b]);
      for (int ch = 0; ch < kChannels; ++ch) {
        const int p = kChannelOrders[ch][0], q = kChannelOrders[ch][1];
        double w[6];
        for (int o = 0; o < 6; ++o) w[o] = bx.w[a][p][out_dx[o]] * by.w[b][q][out_dy[o]];
        for (int comp = 0; comp < 3; ++comp) {
          const double val = node[comp * kChannels + ch];
          for (int o = 0; o < 6; ++o) acc[comp][o] += val * w[o];
        }
      }
    }
  auto jet = [&](int comp) {
    const double* v = acc[comp];
    return Jet(v[0], v[1], v[2], v[3], v[4], v[5]);
  };
  return {jet(kXi11), jet(kXi12), jet(kXi22)};
}

MetricSample GridMetric::evaluate(const Vec2& x) const { return to_sample(phi_transform(xi_jet(x))); }

Mat2 GridMetric::value(const Vec2& x) const {
  if (!contains(x)) throw OutOfDomain("grid metric: point outside sampled box");
  const GridSpec& grid = sample_->grid();
  const Cell c = locate(grid, x);
  const Basis bx = hermite5(c.s, grid.spacing());
  const Basis by = hermite5(c.r, grid.spacing());
  double acc[3] = {};
  const int ii[2] = {c.i0, c.i1};
  const int jj[2] = {c.j0, c.j1};
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) {
      const double* node = sample_->node_data(ii[a], jj[b]);
      for (int ch = 0; ch < kChannels; ++ch) {
        const double w = bx.w[a][kChannelOrders[ch][0]][0] * by.w[b][kChannelOrders[ch][1]][0];
        for (int comp = 0; comp < 3; ++comp) acc[comp] += node[comp * kChannels + ch] * w;
      }
    }
  Mat2 xi;
  xi << acc[kXi11], acc[kXi12], acc[kXi12], acc[kXi22];
  return phi_transform(xi);
}

Mat2 GridMetric::node_value(int i, int j) const {
  Mat2 xi;
  xi << sample_->at(i, j, kXi11, kV), sample_->at(i, j, kXi12, kV), sample_->at(i, j, kXi12, kV),
      sample_->at(i, j, kXi22, kV);
  return phi_transform(xi);
}

std::string GridMetric::describe() const {
  std::ostringstream os;
  os << "grid(n=" << sample_->grid().n << ",extent=" << sample_->grid().extent
     << ",amplitude=" << sample_->model().amplitude << ",seed=" << sample_->seed() << ")";
  return os.str();
}

MetricPtr make_grid_metric(TensorFieldSample sample) {
  return std::make_shared<GridMetric>(std::make_shared<TensorFieldSample>(std::move(sample)));
}

MetricSample SumMetric::evaluate(const Vec2& x) const {
  const MetricSample a = a_->evaluate(x), b = b_->evaluate(x);
  MetricSample s;
  s.g = wa_ * a.g + wb_ * b.g;
  for (int k = 0; k < 2; ++k) s.dg[k] = wa_ * a.dg[k] + wb_ * b.dg[k];
  for (int k = 0; k < 3; ++k) s.ddg[k] = wa_ * a.ddg[k] + wb_ * b.ddg[k];
  return s;
}

}  // namespace rrg
