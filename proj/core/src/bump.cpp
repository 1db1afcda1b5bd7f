#include "rrg/bump.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>
#include <json.hpp>

#include "rrg/errors.hpp"
#include "rrg/jacobi.hpp"
#include "rrg/region.hpp"
#include "rrg/rng.hpp"

namespace rrg {

bool in_hinterland_cone(const Vec2& y, double theta) {
  return y.x() <= 0.0 && std::abs(y.y()) <= -std::tan(theta) * y.x() + 1e-15;
}

bool in_frontier_cone(const Vec2& x, double phi) {
  return x.x() >= 0.0 && x.x() <= std::cos(phi) && std::abs(x.y()) <= std::tan(phi) * x.x() + 1e-15;
}

bool in_lens(const Vec2& x, const Vec2& y) { return x.norm() <= 2.0 && (x - y).norm() <= y.norm(); }

ConeFlags cone_tests(const Vec2& point, const Vec2& y, double theta) {
  const double phi = 0.5 * (0.5 * kPi - theta);
  return {in_hinterland_cone(point, theta), in_frontier_cone(point, phi), in_lens(point, y)};
}

namespace {

// Christoffel symbols with their gradient, from the jet of g at one point.
using GammaJets = std::array<std::array<std::array<Jet, 2>, 2>, 2>;  // [k][i][j]

Jet partial(const Jet& f, int l) {
  return {f.d[l], f.h[l], f.h[l + 1], 0.0, 0.0, 0.0};
}

GammaJets christoffel_jets(const SymJet& m) {
  const Jet g[2][2] = {{m.a11, m.a12}, {m.a12, m.a22}};
  const Jet det = m.a11 * m.a22 - m.a12 * m.a12;
  const Jet inv[2][2] = {{m.a22 / det, -m.a12 / det}, {-m.a12 / det, m.a11 / det}};
  Jet dg[2][2][2];  // dg[l][i][j] = d_l g_ij
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) dg[l][i][j] = partial(g[i][j], l);
  GammaJets out;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Jet acc(0.0);
        for (int l = 0; l < 2; ++l) acc += inv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
        out[k][i][j] = 0.5 * acc;
      }
  return out;
}

struct Connection {
  GammaJets G;
  Vec2 gamma(const Vec2& a, const Vec2& b) const {
    Vec2 r = Vec2::Zero();
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[k] += G[k][i][j].v * a[i] * b[j];
    return r;
  }
  Vec2 dgamma(const Vec2& a, const Vec2& b, const Vec2& c) const {
    Vec2 r = Vec2::Zero();
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[k] += (G[k][i][j].d[0] * c[0] + G[k][i][j].d[1] * c[1]) * a[i] * b[j];
    return r;
  }
};

Vec2 unit_normal(const Mat2& g, const Vec2& velocity) {
  const Vec2 w = perp(g * velocity);
  return w / std::sqrt(w.dot(g * w));
}

double op_norm(const Mat2& m) { return Eigen::JacobiSVD<Mat2>(m).singularValues()(0); }

Jet smoothstep(const Jet& s) {
  if (s.v <= 0.0) return Jet(0.0);
  if (s.v >= 1.0) return Jet(1.0);
  const Jet a = exp(-recip(s)), b = exp(-recip(1.0 - s));
  return a / (a + b);
}

template <class T>
std::array<T, 2> eval_poly(const std::array<std::array<Vec2, 4>, 4>& c, const T& t, const T& n, int dt, int dn) {
  // d^dt/dt^dt d^dn/dn^dn of sum c[a][b] t^a n^b with dt + dn <= 1.
  std::array<T, 2> out{T(0.0), T(0.0)};
  T tp[4] = {T(1.0), t, t * t, t * t * t};
  T np[4] = {T(1.0), n, n * n, n * n * n};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; a + b < 4; ++b) {
      if (a < dt || b < dn) continue;
      const double factor = (dt ? a : 1) * (dn ? b : 1);
      const T mono = tp[a - dt] * np[b - dn];
      for (int i = 0; i < 2; ++i) out[i] = out[i] + (factor * c[a][b][i]) * mono;
    }
  return out;
}

}  // namespace

FermiTaylor::FermiTaylor(const MetricSample& origin) {
  const Connection con{christoffel_jets(to_symjet(origin))};
  const Mat2& G0 = origin.g;
  const Vec2 V(1.0 / std::sqrt(G0(0, 0)), 0.0);
  const Vec2 N0 = unit_normal(G0, V);
  const Vec2 P2 = -con.gamma(V, V);
  const Vec2 P3 = -con.dgamma(V, V, V) - 2.0 * con.gamma(P2, V);
  const Vec2 N1 = -con.gamma(V, N0);
  const Vec2 N2 = -con.dgamma(V, N0, V) - con.gamma(P2, N0) - con.gamma(V, N1);
  const Vec2 A0 = -con.gamma(N0, N0);
  const Vec2 A1 = -con.dgamma(N0, N0, V) - 2.0 * con.gamma(N1, N0);
  const Vec2 B0 = -con.dgamma(N0, N0, N0) - 2.0 * con.gamma(A0, N0);
  for (auto& row : c_) row.fill(Vec2::Zero());
  c_[1][0] = V;
  c_[2][0] = 0.5 * P2;
  c_[3][0] = P3 / 6.0;
  c_[0][1] = N0;
  c_[1][1] = N1;
  c_[2][1] = 0.5 * N2;
  c_[0][2] = 0.5 * A0;
  c_[1][2] = 0.5 * A1;
  c_[0][3] = B0 / 6.0;
  d0_inv_ = jacobian(Vec2::Zero()).inverse();
}

Vec2 FermiTaylor::operator()(const Vec2& u) const {
  const auto r = eval_poly<double>(c_, u.x(), u.y(), 0, 0);
  return {r[0], r[1]};
}

Mat2 FermiTaylor::jacobian(const Vec2& u) const {
  const auto dt = eval_poly<double>(c_, u.x(), u.y(), 1, 0);
  const auto dn = eval_poly<double>(c_, u.x(), u.y(), 0, 1);
  Mat2 m;
  m << dt[0], dn[0], dt[1], dn[1];
  return m;
}

std::array<Jet, 2> FermiTaylor::operator()(const Jet& t, const Jet& n) const {
  return eval_poly<Jet>(c_, t, n, 0, 0);
}

std::array<std::array<Jet, 2>, 2> FermiTaylor::jacobian(const Jet& t, const Jet& n) const {
  const auto dt = eval_poly<Jet>(c_, t, n, 1, 0);
  const auto dn = eval_poly<Jet>(c_, t, n, 0, 1);
  return {{{dt[0], dn[0]}, {dt[1], dn[1]}}};
}

Vec2 FermiTaylor::inverse(const Vec2& x) const {
  Vec2 u = d0_inv_ * x;
  for (int it = 0; it < 60; ++it) {
    const Vec2 r = (*this)(u) - x;
    if (r.norm() <= 1e-15 * (1.0 + x.norm())) return u;
    const Mat2 J = jacobian(u);
    if (J.determinant() <= 0.0) break;
    u -= J.inverse() * r;
  }
  if (((*this)(u) - x).norm() <= 1e-12 * (1.0 + x.norm())) return u;
  throw ChartFailure("Fermi polynomial inversion did not converge");
}

FermiChart::FermiChart(MetricPtr g, int steps) : g_(std::move(g)), steps_(steps) {
  if (steps_ < 4) throw InvalidArgument("FermiChart needs at least 4 steps per leg");
}

Vec2 FermiChart::base(double t) const {
  if (t == 0.0) return Vec2::Zero();
  return integrate(*g_, {Vec2::Zero(), Vec2::UnitX()}, t, std::abs(t) / steps_).x.back();
}

Vec2 FermiChart::base_velocity(double t) const {
  if (t == 0.0) return Vec2::UnitX() / std::sqrt(g_->value(Vec2::Zero())(0, 0));
  const GeodesicPath p = integrate(*g_, {Vec2::Zero(), Vec2::UnitX()}, t, std::abs(t) / steps_);
  return p.lambda.back() * p.v.back();
}

Vec2 FermiChart::normal(double t) const {
  const Vec2 x = base(t);
  return unit_normal(g_->value(x), base_velocity(t));
}

Vec2 FermiChart::operator()(double t, double n) const {
  const Vec2 x = base(t);
  if (n == 0.0) return x;
  const Vec2 dir = (n > 0.0 ? 1.0 : -1.0) * unit_normal(g_->value(x), base_velocity(t));
  return integrate(*g_, {x, dir.normalized()}, std::abs(n), std::abs(n) / steps_).x.back();
}

Mat2 FermiChart::pullback(double t, double n, double fd) const {
  // Fourth order central differences; the outer derivatives in pullback_christoffel amplify errors here.
  auto diff = [&](const Vec2& e) {
    const Vec2 u(t, n);
    auto at = [&](double k) {
      const Vec2 p = u + k * fd * e;
      return (*this)(p.x(), p.y());
    };
    return (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * fd);
  };
  Mat2 D;
  D.col(0) = diff(Vec2::UnitX());
  D.col(1) = diff(Vec2::UnitY());
  return D.transpose() * g_->value((*this)(t, n)) * D;
}

Christoffel FermiChart::pullback_christoffel(double t, double n, double fd) const {
  auto diff = [&](double dt, double dn) {
    auto at = [&](double k) { return pullback(t + k * fd * dt, n + k * fd * dn); };
    return Mat2((8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * fd));
  };
  MetricSample s;
  s.g = pullback(t, n);
  s.dg[0] = diff(1.0, 0.0);
  s.dg[1] = diff(0.0, 1.0);
  return christoffel(s);
}

double FermiChart::pullback_g11_nn(double t, double n, double fd) const {
  return (pullback(t, n + fd)(0, 0) - 2.0 * pullback(t, n)(0, 0) + pullback(t, n - fd)(0, 0)) / (fd * fd);
}

BumpSpec BumpSpec::make(double K0, double tau, double M, double L, double delta_chart, double theta, double h,
                        double epsilon) {
  BumpSpec s;
  s.K0 = K0;
  s.tau = tau;
  s.M = M;
  s.L = L;
  s.delta_chart = delta_chart;
  s.theta = theta;
  s.h = h;
  s.epsilon = epsilon;
  if (!(theta >= 0.0 && theta < 0.5 * kPi)) throw InvalidBumpSpec("theta must lie in [0, pi/2)");
  if (!(M >= 1.0) || !(L >= 1.0)) throw InvalidBumpSpec("M and L must be at least 1");
  if (!(tau > 0.0)) throw InvalidBumpSpec("tau must be positive");
  s.phi_angle = 0.5 * (0.5 * kPi - theta);
  s.K_plus = 4.0 * kPi * kPi / (tau * tau);
  s.K_max = std::max({1.0, s.K_plus, std::abs(K0)});
  const auto b = s.tau_bounds();
  const char* names[4] = {"delta/sqrt2", "1/(2M)", "cos(phi)/(L sqrt2 + 3M)", "tan(phi)/(L sqrt2 + 10M^2)"};
  for (int i = 0; i < 4; ++i)
    if (!(tau < b[i])) throw InvalidBumpSpec(std::string("tau violates bound ") + names[i]);
  if (tau > 0.5) throw InvalidBumpSpec("tau must be at most 1/2");
  return s;
}

std::array<double, 4> BumpSpec::tau_bounds() const {
  const double r2 = std::sqrt(2.0);
  return {delta_chart / r2, 1.0 / (2.0 * M), std::cos(phi_angle) / (L * r2 + 3.0 * M),
          std::tan(phi_angle) / (L * r2 + 10.0 * M * M)};
}

bool BumpSpec::in_triangle(double t, double n) const {
  return t >= 0.0 && t <= tau && std::abs(n) <= t / std::sqrt(K_max);
}

std::string BumpSpec::to_json() const {
  nlohmann::json j = {{"K0", K0},       {"tau", tau},         {"K_plus", K_plus},
                      {"K_max", K_max}, {"M", M},             {"L", L},
                      {"delta_chart", delta_chart},           {"theta", theta},
                      {"phi", phi_angle},                     {"h", h},
                      {"epsilon", epsilon},                   {"rho_blend", rho_blend},
                      {"rho_outer", rho_outer}};
  return j.dump();
}

namespace {

// Profile extended by constants outside [0, tau]; returns value and slope.
std::pair<double, double> profile_ext(const BumpSpec& s, double t) {
  const double ramp = 0.25 * s.tau;
  if (t <= 0.0) return {s.K0, 0.0};
  if (t >= ramp) return {s.K_plus, 0.0};
  const double slope = (s.K_plus - s.K0) / ramp;
  return {s.K0 + slope * t, slope};
}

}  // namespace

double curvature_profile(const BumpSpec& spec, double t) {
  if (t < 0.0 || t > spec.tau) throw OutOfRange("curvature profile is defined on [0, tau]");
  return profile_ext(spec, t).first;
}

Mat2 fermi_metric(const BumpSpec& spec, double t, double n) {
  if (!spec.in_triangle(t, n)) throw OutOfRegion("(t, n) outside the triangle I");
  const double k = curvature_profile(spec, t);
  Mat2 f = Mat2::Identity();
  f(0, 0) = 1.0 - k * n * n;
  return f;
}

BumpMetric::BumpMetric(BumpSpec spec, FermiTaylor psi) : spec_(std::move(spec)), psi_(std::move(psi)) {
  const double width = spec_.tau / std::sqrt(spec_.K_max);
  n_out_ = 1.0 / std::sqrt(2.0 * spec_.K_max);
  if (!(width < n_out_)) throw InvalidBumpSpec("triangle wider than the SPD strip");
  n_in_ = width + 0.25 * (n_out_ - width);
}

SymJet BumpMetric::fermi_jet(const Jet& t, const Jet& n) const {
  const auto [k, slope] = profile_ext(spec_, t.v);
  const Jet K = t.apply(k, slope, 0.0);
  const Jet absn = n.v >= 0.0 ? n : -n;
  const Jet beta = smoothstep((absn - n_in_) / (n_out_ - n_in_));
  return {1.0 - (1.0 - beta) * K * n * n, Jet(0.0), Jet(1.0)};
}

MetricSample BumpMetric::evaluate(const Vec2& x) const {
  if (x.norm() >= spec_.rho_outer) return MetricSample{};
  const Vec2 u0 = psi_.inverse(x);
  const Jet X[2] = {Jet::variable(x.x(), 0), Jet::variable(x.y(), 1)};
  const Mat2 A0 = psi_.jacobian(u0).inverse();
  std::array<Jet, 2> U{Jet(u0.x()), Jet(u0.y())};
  // Chord Newton on jets: each pass fixes one more order of the inverse map.
  for (int it = 0; it < 3; ++it) {
    const auto P = psi_(U[0], U[1]);
    const Jet R[2] = {P[0] - X[0], P[1] - X[1]};
    const std::array<Jet, 2> next{U[0] - (A0(0, 0) * R[0] + A0(0, 1) * R[1]),
                                  U[1] - (A0(1, 0) * R[0] + A0(1, 1) * R[1])};
    U = next;
  }
  const auto J = psi_.jacobian(U[0], U[1]);
  const Jet det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const Jet A[2][2] = {{J[1][1] / det, -J[0][1] / det}, {-J[1][0] / det, J[0][0] / det}};
  const SymJet F = fermi_jet(U[0], U[1]);
  auto entry = [&](int i, int j) { return A[0][i] * F.a11 * A[0][j] + A[1][i] * A[1][j]; };
  SymJet b{entry(0, 0), entry(0, 1), entry(1, 1)};
  if (x.norm() > spec_.rho_blend) {
    const Jet r = sqrt(X[0] * X[0] + X[1] * X[1]);
    const Jet w = smoothstep((r - spec_.rho_blend) / (spec_.rho_outer - spec_.rho_blend));
    b = {(1.0 - w) * b.a11 + w, (1.0 - w) * b.a12, (1.0 - w) * b.a22 + w};
  }
  return to_sample(b);
}

std::string BumpMetric::describe() const { return "bump(tau=" + std::to_string(spec_.tau) + ")"; }

ChartConstants chart_constants(const FermiTaylor& psi, double tau_for_l2, double K_max) {
  ChartConstants c;
  for (int k = 0; k < 2; ++k) c.M = std::max({c.M, std::abs(psi.accel()[k]), std::abs(psi.jerk()[k])});
  const Mat2 D0 = psi.jacobian(Vec2::Zero());
  c.sigma_min = Eigen::JacobiSVD<Mat2>(D0).singularValues()(1);
  constexpr int kAngles = 72;
  const double r_max = std::sqrt(2.0);
  for (int ir = 1; ir <= 40; ++ir) {
    const double r = r_max * ir / 40.0;
    for (int ia = 0; ia < kAngles; ++ia) {
      const double a = 2.0 * kPi * ia / kAngles;
      c.L1 = std::max(c.L1, op_norm(psi.jacobian(r * Vec2(std::cos(a), std::sin(a)))));
    }
  }
  // Largest radius on which |DPsi - DPsi(0)| <= sigma_min / 2, which makes Psi injective there.
  c.delta = 0.0;
  for (int ir = 1; ir <= 200; ++ir) {
    const double r = 0.01 * ir;
    bool ok = true;
    for (int ia = 0; ia < kAngles && ok; ++ia) {
      const double a = 2.0 * kPi * ia / kAngles;
      ok = op_norm(psi.jacobian(r * Vec2(std::cos(a), std::sin(a))) - D0) <= 0.5 * c.sigma_min;
    }
    if (!ok) break;
    c.delta = r;
  }
  if (tau_for_l2 > 0.0) {
    const double r2tau = std::sqrt(2.0) * tau_for_l2;
    for (int it = 1; it <= 50; ++it) {
      const double t = tau_for_l2 * it / 50.0;
      const Vec2 axis = psi(Vec2(t, 0.0));
      const double q0 = axis.y() / axis.x();
      for (int in = -5; in <= 5; ++in) {
        const Vec2 p = psi(Vec2(t, t / std::sqrt(K_max) * in / 5.0));
        c.L2 = std::max(c.L2, std::abs(p.y() / p.x() - q0) / r2tau);
      }
    }
  }
  return c;
}

Bump build_bump(const MetricField& g, const BumpOptions& options) {
  Bump out;
  out.z0 = z_fluctuation(g, Region::point(Vec2::Zero())).value;
  if (out.z0 > 2.0 * options.h) throw PreconditionZ("Z_0(g) exceeds 2h");
  const MetricSample s0 = g.evaluate(Vec2::Zero());
  const FermiTaylor psi(s0);
  const double K0 = scalar_curvature(s0);
  const ChartConstants cc = chart_constants(psi);
  if (cc.delta <= 0.0) throw ChartFailure("Fermi polynomial is not injective near the origin");
  const double phi = 0.5 * (0.5 * kPi - options.theta);
  double L = std::max(1.0, cc.L1), tau = 0.0;
  for (int pass = 0; pass < 5; ++pass) {
    const double r2 = std::sqrt(2.0);
    const double bound = std::min({cc.delta / r2, 1.0 / (2.0 * cc.M), std::cos(phi) / (L * r2 + 3.0 * cc.M),
                                   std::tan(phi) / (L * r2 + 10.0 * cc.M * cc.M)});
    tau = options.tau_safety * bound;
    const double k_max = std::max({1.0, 4.0 * kPi * kPi / (tau * tau), std::abs(K0)});
    const double l2 = chart_constants(psi, tau, k_max).L2;
    if (l2 <= L) break;
    L = l2;
  }
  BumpSpec spec = BumpSpec::make(K0, tau, cc.M, L, cc.delta, options.theta, options.h, options.epsilon);

  double reach = 0.0;
  for (int it = 1; it <= 64; ++it) {
    const double t = spec.tau * it / 64.0;
    for (int in = -8; in <= 8; ++in) {
      const Vec2 x = psi(Vec2(t, t / std::sqrt(spec.K_max) * in / 8.0));
      if (!in_frontier_cone(x, spec.phi_angle)) throw ChartFailure("Psi(I) leaves the frontier cone");
      reach = std::max(reach, x.norm());
    }
  }
  spec.rho_blend = reach + 0.05;
  spec.rho_outer = std::min(1.0, 0.45 * cc.sigma_min * cc.delta);
  if (spec.rho_outer <= spec.rho_blend + 0.01) throw ChartFailure("no room for the radial blend");
  out.spec = spec;
  out.metric = std::make_shared<BumpMetric>(spec, psi);
  return out;
}

bool bump_event(const MetricField& g, const BumpOptions& options, double fc_spacing) {
  Bump b;
  try {
    b = build_bump(g, options);
  } catch (const PreconditionZ&) {
    return false;
  } catch (const ChartFailure&) {
    return false;
  }
  if (!(b.z0 < 2.0 * options.h)) return false;
  const Region fc = Region::frontier_cone(b.spec.phi_angle, fc_spacing);
  return c21_distance(g, *b.metric, fc) < options.epsilon;
}

MetricPtr cosine_perturbation(const Mat2& S, const Vec2& k, double phase) {
  return std::make_shared<AnalyticMetric>("cosine", [S, k, phase](const Jet& x1, const Jet& x2) {
    const Jet c = cos(k.x() * x1 + k.y() * x2 + phase);
    return SymJet{S(0, 0) * c, S(0, 1) * c, S(1, 1) * c};
  });
}

std::vector<MetricPtr> perturbation_directions(int count, std::uint64_t seed) {
  std::vector<MetricPtr> out;
  for (int d = 0; d < count; ++d) {
    std::mt19937_64 rng(derive_seed(seed, 0xb0b, static_cast<std::uint64_t>(d)));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uni;
    Mat2 S;
    S(0, 0) = normal(rng);
    S(0, 1) = S(1, 0) = normal(rng);
    S(1, 1) = normal(rng);
    S /= S.norm();
    const double kr = 1.0 + 2.0 * uni(rng), ka = 2.0 * kPi * uni(rng);
    out.push_back(cosine_perturbation(S, kr * Vec2(std::cos(ka), std::sin(ka)), 2.0 * kPi * uni(rng)));
  }
  return out;
}

MetricPtr zero_field() {
  return std::make_shared<AnalyticMetric>("zero", [](const Jet&, const Jet&) {
    return SymJet{Jet(0.0), Jet(0.0), Jet(0.0)};
  });
}

JacobiCheck bump_jacobi(const MetricField& g, double tau, int steps) {
  JacobiCheck out;
  out.tau = tau;
  const GeodesicPath path = integrate(g, {Vec2::Zero(), Vec2::UnitX()}, tau, tau / steps);
  const CurvatureProfile K(g, path, 0.25 * tau, tau);
  const double w = 2.0 * kPi / tau;
  const JacobiSolution sol = jacobi_integrate(K, 0.25 * tau, 0.0, w, tau, path.h);
  for (std::size_t k = 0; k < sol.size(); ++k)
    out.plateau_error = std::max(out.plateau_error, std::abs(sol.j[k] - std::sin(w * (sol.t[k] - 0.25 * tau))));
  out.j_tau = sol.j.back();
  out.conjugate = first_conjugate_point(K, tau, path.h, 0.25 * tau);
  return out;
}

double perturbed_j_tau(const Bump& bump, const MetricPtr& direction, double epsilon, double fc_spacing) {
  const Region fc = Region::frontier_cone(bump.spec.phi_angle, fc_spacing);
  const double norm = c21_distance(*direction, *zero_field(), fc);
  const double eta = 0.99 * epsilon / norm;
  const SumMetric g(bump.metric, direction, 1.0, eta);
  return bump_jacobi(g, bump.spec.tau).j_tau;
}

std::string BumpVerification::to_json() const {
  nlohmann::json j = nlohmann::json::parse(spec.to_json());
  j["z0"] = z0;
  j["K0_g"] = K0_g;
  j["K0_b"] = K0_b;
  j["c2_origin"] = c2_origin;
  j["chart_flatness"] = chart_flatness;
  j["J_in_FC"] = j_in_cone;
  j["plateau_error"] = jacobi.plateau_error;
  j["j_tau"] = jacobi.j_tau;
  j["conjugate"] = jacobi.conjugate ? nlohmann::json(*jacobi.conjugate) : nlohmann::json(nullptr);
  j["perturbed_j_tau"] = perturbed_j_tau;
  return j.dump();
}

BumpVerification verify_bump(const MetricPtr& g, const BumpOptions& options,
                             const std::vector<MetricPtr>& directions, double fc_spacing) {
  BumpVerification v;
  const Bump bump = build_bump(*g, options);
  v.spec = bump.spec;
  v.z0 = bump.z0;
  v.j_in_cone = true;
  v.K0_g = scalar_curvature(*g, Vec2::Zero());
  v.K0_b = scalar_curvature(*bump.metric, Vec2::Zero());
  v.c2_origin = c2_distance_at(*g, *bump.metric, Vec2::Zero());
  const FermiChart chart(g);
  for (int k = 0; k <= 4; ++k) {
    const Mat2 e = chart.pullback(bump.spec.tau * k / 4.0, 0.0) - Mat2::Identity();
    v.chart_flatness = std::max(v.chart_flatness, e.cwiseAbs().maxCoeff());
  }
  v.jacobi = bump_jacobi(*bump.metric, bump.spec.tau);
  for (const auto& d : directions) v.perturbed_j_tau.push_back(perturbed_j_tau(bump, d, options.epsilon, fc_spacing));
  return v;
}

double calibrate_epsilon(const std::vector<Bump>& pilots, const std::vector<MetricPtr>& directions,
                         const std::vector<double>& candidates, double fc_spacing) {
  std::vector<double> sorted = candidates;
  std::sort(sorted.rbegin(), sorted.rend());
  for (double eps : sorted) {
    bool ok = true;
    for (const auto& b : pilots) {
      for (const auto& d : directions) {
        try {
          ok = perturbed_j_tau(b, d, eps, fc_spacing) < 0.0;
        } catch (const Error&) {
          // A perturbation this large can leave the SPD cone.
          ok = false;
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (ok) return eps;
  }
  return 0.0;
}

}  // namespace rrg
