#include "vmoidx/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "vmoidx/error.hpp"
#include "vmoidx/parallel.hpp"

namespace vmoidx {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_into(double x, double a, double b) {
  const double len = b - a;
  double r = std::fmod(x - a, len);
  if (r < 0) r += len;
  return a + r;
}

}  // namespace

bool Rect::contains(const Vec2& p, double slack) const {
  return p.x() >= u0 - slack && p.x() <= u1 + slack && p.y() >= v0 - slack && p.y() <= v1 + slack;
}

Chart::Chart(ChartSpec spec) : spec_(std::move(spec)) {
  if (!spec_.embed) fail(ErrorCode::ConfigError, "chart '" + spec_.name + "' has no embedding");
}

Vec2 Chart::wrap(const Vec2& uv) const {
  Vec2 out = uv;
  if (spec_.periodic_u) out.x() = wrap_into(uv.x(), spec_.domain.u0, spec_.domain.u1);
  if (spec_.periodic_v) out.y() = wrap_into(uv.y(), spec_.domain.v0, spec_.domain.v1);
  return out;
}

Mat32 Chart::tangents(const Vec2& uv) const {
  if (spec_.tangents) return spec_.tangents(uv);
  constexpr double h = 1e-6;
  Mat32 t;
  t.col(0) = (embed(uv + Vec2(h, 0)) - embed(uv - Vec2(h, 0))) / (2 * h);
  t.col(1) = (embed(uv + Vec2(0, h)) - embed(uv - Vec2(0, h))) / (2 * h);
  return t;
}

Mat2 Chart::metric(const Vec2& uv) const {
  const Mat32 t = tangents(uv);
  return t.transpose() * t;
}

Vec3 Chart::normal(const Vec2& uv) const {
  const Mat32 t = tangents(uv);
  return spec_.orientation * t.col(0).cross(t.col(1)).normalized();
}

double Chart::area_element(const Vec2& uv) const {
  const Mat32 t = tangents(uv);
  return t.col(0).cross(t.col(1)).norm();
}

double Chart::gaussian_curvature(const Vec2& uv) const {
  if (spec_.curvature) return spec_.curvature(uv);
  constexpr double h = 1e-4;
  const Vec2 du(h, 0), dv(0, h);
  const Vec3 x0 = embed(uv);
  const Vec3 xuu = (embed(uv + du) - 2 * x0 + embed(uv - du)) / (h * h);
  const Vec3 xvv = (embed(uv + dv) - 2 * x0 + embed(uv - dv)) / (h * h);
  const Vec3 xuv =
      (embed(uv + du + dv) - embed(uv + du - dv) - embed(uv - du + dv) + embed(uv - du - dv)) /
      (4 * h * h);
  const Mat32 t = tangents(uv);
  const Vec3 n = t.col(0).cross(t.col(1)).normalized();
  const Mat2 g = t.transpose() * t;
  const double L = xuu.dot(n), M = xuv.dot(n), N = xvv.dot(n);
  return (L * N - M * M) / g.determinant();
}

bool Chart::owns(const Vec2& uv) const {
  if (spec_.owns) return spec_.owns(uv);
  return spec_.domain.contains(wrap(uv));
}

std::optional<Vec2> Chart::inverse(const Vec3& position, const Vec2* guess) const {
  if (spec_.inverse) {
    auto uv = spec_.inverse(position);
    if (uv) return wrap(*uv);
    return std::nullopt;
  }
  Vec2 uv;
  if (guess) {
    uv = *guess;
  } else {
    // Coarse search for a starting point.
    double best = std::numeric_limits<double>::infinity();
    constexpr int kCoarse = 32;
    const Rect& d = spec_.domain;
    for (int i = 0; i <= kCoarse; ++i) {
      for (int j = 0; j <= kCoarse; ++j) {
        const Vec2 c(d.u0 + d.width() * i / kCoarse, d.v0 + d.height() * j / kCoarse);
        const double dist = (embed(c) - position).squaredNorm();
        if (dist < best) {
          best = dist;
          uv = c;
        }
      }
    }
  }
  const double scale = 1.0 + position.norm();
  for (int it = 0; it < 50; ++it) {
    const Vec3 r = embed(uv) - position;
    if (r.norm() <= 1e-12 * scale) break;
    const Mat32 t = tangents(uv);
    const Vec2 step = (t.transpose() * t).ldlt().solve(t.transpose() * r);
    uv -= step;
    if (spec_.periodic_u || spec_.periodic_v) uv = wrap(uv);
    if (step.norm() < 1e-15) break;
  }
  if ((embed(uv) - position).norm() > 1e-9 * scale) return std::nullopt;
  return wrap(uv);
}

SurfacePoint chart_point(const Chart& chart, int index, const Vec2& uv) {
  SurfacePoint p;
  p.chart = index;
  p.uv = chart.wrap(uv);
  p.position = chart.embed(p.uv);
  p.tangents = chart.tangents(p.uv);
  p.normal = chart.orientation() * p.tangents.col(0).cross(p.tangents.col(1)).normalized();
  return p;
}

Surface::Surface(SurfaceSpec spec)
    : name_(std::move(spec.name)),
      patches_(std::move(spec.patches)),
      boundary_(std::move(spec.boundary)),
      collars_(std::move(spec.collars)),
      genus_(spec.genus),
      orientation_(spec.orientation),
      r0_(spec.r0),
      ball_chart_(spec.ball_chart),
      contains_(std::move(spec.contains)) {
  if (spec.charts.empty()) fail(ErrorCode::ConfigError, "surface '" + name_ + "' has no charts");
  for (auto& c : spec.charts) charts_.emplace_back(std::move(c));
  for (int i = 0; i < static_cast<int>(charts_.size()); ++i) {
    if (charts_[static_cast<std::size_t>(i)].scan()) scan_charts_.push_back(i);
  }
  if (patches_.empty()) fail(ErrorCode::ConfigError, "surface '" + name_ + "' has no patches");
  if (!collars_.empty() && collars_.size() != boundary_.size())
    fail(ErrorCode::ConfigError, "collar count differs from boundary count");
  if (r0_ <= 0) fail(ErrorCode::ConfigError, "r0 must be positive");
}

int Surface::chart_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(charts_.size()); ++i) {
    if (charts_[static_cast<std::size_t>(i)].name() == name) return i;
  }
  fail(ErrorCode::ConfigError, "no chart named '" + name + "' on " + name_);
}

SurfacePoint Surface::point(int chart_id, const Vec2& uv) const {
  return chart_point(chart(chart_id), chart_id, uv);
}

SurfacePoint Surface::to_chart(const SurfacePoint& x, int chart_id) const {
  if (x.chart == chart_id) return x;
  auto uv = chart(chart_id).inverse(x.position);
  if (!uv) fail(ErrorCode::OutOfChart, "point not in chart '" + chart(chart_id).name() + "'");
  return point(chart_id, *uv);
}

SurfacePoint Surface::canonical(const SurfacePoint& x) const {
  for (int c : scan_charts_) {
    if (c == x.chart && chart(c).owns(x.uv)) return x;
  }
  for (int c : scan_charts_) {
    if (c == x.chart) continue;
    auto uv = chart(c).inverse(x.position);
    if (uv && chart(c).owns(*uv)) return point(c, *uv);
  }
  return x;
}

std::optional<SurfacePoint> Surface::locate(const Vec3& position) const {
  for (int c : scan_charts_) {
    auto uv = chart(c).inverse(position);
    if (uv && chart(c).owns(*uv)) return point(c, *uv);
  }
  return std::nullopt;
}

bool Surface::contains(const SurfacePoint& x) const { return !contains_ || contains_(x); }

double Surface::collar_width() const {
  if (collars_.empty()) return 0.0;
  double w = std::numeric_limits<double>::infinity();
  for (const auto& c : collars_) w = std::min(w, c.width);
  return w;
}

const CollarSpec& Surface::collar(int curve) const {
  if (collars_.empty())
    fail(ErrorCode::CollarTooNarrow, "surface '" + name_ + "' has no collar");
  return collars_.at(static_cast<std::size_t>(curve));
}

SurfacePoint Surface::collar_point(int curve, double theta, double s) const {
  return collar(curve).at(theta, s);
}

std::optional<CollarCoordinates> Surface::collar_coordinates(const SurfacePoint& x) const {
  std::optional<CollarCoordinates> best;
  for (int i = 0; i < static_cast<int>(collars_.size()); ++i) {
    const auto ts = collars_[static_cast<std::size_t>(i)].coordinates(x);
    if (!ts) continue;
    if (!best || ts->y() < best->s) best = CollarCoordinates{i, ts->x(), ts->y()};
  }
  return best;
}

double Surface::collar_area_factor(int curve, double theta, double s) const {
  const CollarSpec& c = collar(curve);
  s = std::abs(s);
  if (c.area_factor) return c.area_factor(theta, s);
  constexpr double h = 1e-6;
  const Vec3 tt = (c.at(theta + h, s).position - c.at(theta - h, s).position) / (2 * h);
  const Vec3 ts = (c.at(theta, s + h).position - c.at(theta, s - h).position) / (2 * h);
  return tt.cross(ts).norm();
}

double Surface::distance_to_boundary(const SurfacePoint& x) const {
  if (closed()) return std::numeric_limits<double>::infinity();
  if (has_collar()) {
    if (auto cc = collar_coordinates(x)) return cc->s;
  }
  // Chord distance to sampled boundary points.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& curve : boundary_) {
    constexpr int kSamples = 512;
    for (int k = 0; k < kSamples; ++k) {
      const double th = kTwoPi * k / kSamples;
      best = std::min(best, (curve.point(th).position - x.position).norm());
    }
  }
  return contains(x) ? best : -best;
}

int euler_characteristic(const Surface& s) { return s.euler_characteristic(); }

double gauss_bonnet_chi(const Surface& s, const QuadratureSpec& quad) {
  if (!s.closed()) fail(ErrorCode::BoundaryPresent, "Gauss-Bonnet integral needs a closed surface");
  double total = 0.0;
  for (int pid : s.patches()) {
    const Chart& c = s.chart(pid);
    const Rect& d = c.domain();
    const Rule1D ru =
        c.periodic_u() ? periodic_trapezoid(quad.n_u, d.u0, d.u1) : gauss_legendre(quad.n_u, d.u0, d.u1);
    const Rule1D rv =
        c.periodic_v() ? periodic_trapezoid(quad.n_v, d.v0, d.v1) : gauss_legendre(quad.n_v, d.v0, d.v1);
    std::vector<double> rows(ru.size(), 0.0);
    parallel_for(ru.size(), [&](std::size_t i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < rv.size(); ++j) {
        const Vec2 uv(ru.nodes[i], rv.nodes[j]);
        acc += rv.weights[j] * c.gaussian_curvature(uv) * c.area_element(uv);
      }
      rows[i] = ru.weights[i] * acc;
    });
    for (double r : rows) total += r;
  }
  return total / kTwoPi;
}

Vec3 tangent_project(const SurfacePoint& x, const Vec3& w) {
  return w - w.dot(x.normal) * x.normal;
}

std::vector<BallNode> metric_ball_sample(const Surface& s, const SurfacePoint& x, double eps,
                                         int n, bool interior) {
  if (eps <= 0) fail(ErrorCode::EpsTooLarge, "radius must be positive");
  if (eps > s.r0() * (1 + 1e-12))
    fail(ErrorCode::EpsTooLarge, "radius " + std::to_string(eps) + " exceeds r0");
  if (interior && !s.closed() && s.distance_to_boundary(x) < 2 * eps * (1 - 1e-12))
    fail(ErrorCode::EpsTooLarge, "ball centre closer than 2 eps to the boundary");

  const int cid = s.ball_chart() >= 0 ? s.ball_chart() : s.canonical(x).chart;
  const SurfacePoint c = s.to_chart(s.canonical(x), cid);
  const Chart& chart = s.chart(cid);
  const Mat2 g0 = c.tangents.transpose() * c.tangents;
  const Mat2 L = g0.llt().matrixL();
  const Mat2 A = L.transpose().inverse();
  const double inv_sqrt_det = 1.0 / std::sqrt(g0.determinant());

  const Rule1D radial = gauss_legendre(n, 0.0, 1.0);
  const int m = 2 * n;
  const double dt = kTwoPi / m;
  std::vector<BallNode> nodes;
  nodes.reserve(radial.size() * static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double rho = radial.nodes[i];
    for (int k = 0; k < m; ++k) {
      const double t = (k + 0.5) * dt;
      const Vec2 xi = c.uv + eps * rho * (A * Vec2(std::cos(t), std::sin(t)));
      BallNode node;
      node.point = chart_point(chart, cid, xi);
      const double area = node.point.tangents.col(0).cross(node.point.tangents.col(1)).norm();
      node.weight = area * inv_sqrt_det * eps * eps * rho * radial.weights[i] * dt;
      nodes.push_back(std::move(node));
    }
  }
  return nodes;
}

std::vector<CollarBallNode> collar_ball_sample(const Surface& s, int curve, double theta0,
                                               double s0, double eps, int n) {
  if (!(eps > 0)) fail(ErrorCode::EpsTooLarge, "radius must be positive");
  const CollarSpec& col = s.collar(curve);
  if (std::abs(s0) + eps > col.width)
    fail(ErrorCode::CollarTooNarrow, "ball leaves the collar");
  // Metric of the reflected chart at the centre.
  constexpr double h = 1e-6;
  const double a0 = std::abs(s0);
  const Vec3 tt = (col.at(theta0 + h, a0).position - col.at(theta0 - h, a0).position) / (2 * h);
  const Vec3 ts = (col.at(theta0, a0 + h).position - col.at(theta0, a0 - h).position) / (2 * h);
  Mat2 g0;
  g0 << tt.dot(tt), tt.dot(ts), tt.dot(ts), ts.dot(ts);
  if (s0 < 0) {
    g0(0, 1) = -g0(0, 1);
    g0(1, 0) = -g0(1, 0);
  }
  const Mat2 L = g0.llt().matrixL();
  const Mat2 A = L.transpose().inverse();
  const double inv_sqrt_det = 1.0 / std::sqrt(g0.determinant());

  const Rule1D radial = gauss_legendre(n, 0.0, 1.0);
  const int m = 2 * n;
  const double dt = kTwoPi / m;
  std::vector<CollarBallNode> nodes;
  nodes.reserve(radial.size() * static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double rho = radial.nodes[i];
    for (int k = 0; k < m; ++k) {
      const double t = (k + 0.5) * dt;
      const Vec2 d = eps * rho * (A * Vec2(std::cos(t), std::sin(t)));
      CollarBallNode node;
      node.theta = theta0 + d.x();
      node.s = s0 + d.y();
      node.weight = s.collar_area_factor(curve, node.theta, node.s) * inv_sqrt_det * eps * eps *
                    rho * radial.weights[i] * dt;
      nodes.push_back(node);
    }
  }
  return nodes;
}

std::vector<ArcNode> boundary_arc_sample(const Surface& s, int curve, double theta0, double eps,
                                         int n) {
  const BoundaryCurve& c = s.boundary().at(static_cast<std::size_t>(curve));
  const double half = eps / c.speed(theta0);
  const Rule1D rule = gauss_legendre(n, theta0 - half, theta0 + half);
  std::vector<ArcNode> nodes(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    nodes[i].theta = rule.nodes[i];
    nodes[i].weight = rule.weights[i] * c.speed(rule.nodes[i]);
  }
  return nodes;
}

}  // namespace vmoidx
