#include "vmoidx/qtensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>

#include "vmoidx/error.hpp"
#include "vmoidx/parallel.hpp"
#include "vmoidx/roots.hpp"
#include "vmoidx/vmo.hpp"

namespace vmoidx {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
const double kSqrt2 = std::sqrt(2.0);

Mat3 sym(const Vec3& a, const Vec3& b) { return a * b.transpose() + b * a.transpose(); }

// Orthonormal frame with the chart's handedness: e1 = unit d/du.
std::pair<Vec3, Vec3> chart_frame(const SurfacePoint& x) {
  const Vec3 e1 = x.tangents.col(0).normalized();
  const Vec3 t2 = x.tangents.col(1);
  return {e1, (t2 - t2.dot(e1) * e1).normalized()};
}

double periodic_delta(double d, double period) {
  d = std::fmod(d, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

double chart_distance(const Chart& c, const Vec2& a, const Vec2& b) {
  double du = b.x() - a.x(), dv = b.y() - a.y();
  if (c.periodic_u()) du = periodic_delta(du, c.domain().width());
  if (c.periodic_v()) dv = periodic_delta(dv, c.domain().height());
  return std::hypot(du, dv);
}

}  // namespace

double q_dot(const QTensor& a, const QTensor& b) { return (a.array() * b.array()).sum(); }

double q_norm(const QTensor& q) { return std::sqrt(q_dot(q, q)); }

Mat3 tangent_projector(const SurfacePoint& x) {
  return Mat3::Identity() - x.normal * x.normal.transpose();
}

QTensor q_from_director(const SurfacePoint& x, const Vec3& n, double s) {
  if (std::abs(n.norm() - 1.0) > 1e-9 || std::abs(n.dot(x.normal)) > 1e-9)
    fail(ErrorCode::NotTangent, "director must be a unit tangent vector");
  if (s < 0) fail(ErrorCode::ConfigError, "order parameter must be nonnegative");
  return s * (n * n.transpose() - 0.5 * tangent_projector(x));
}

Director director_from_q(const SurfacePoint& x, const QTensor& q, double tol) {
  const double scale = std::max(1.0, q_norm(q));
  if ((q - q.transpose()).norm() > tol * scale || std::abs(q.trace()) > tol * scale ||
      (q * x.normal).norm() > tol * scale)
    fail(ErrorCode::NotAdmissible, "tensor is not admissible at this point");
  Director d;
  const auto [e1, e2] = chart_frame(x);
  const double norm = q_norm(q);
  if (norm < tol) {
    d.n = e1;
    d.arbitrary = true;
    return d;
  }
  d.s = kSqrt2 * norm;
  // The tangential block is (s / 2) [[cos 2a, sin 2a], [sin 2a, -cos 2a]].
  const double a = e1.dot(q * e1) - e2.dot(q * e2);
  const double b = 2.0 * e1.dot(q * e2);
  const double alpha = 0.5 * std::atan2(b, a);
  d.n = std::cos(alpha) * e1 + std::sin(alpha) * e2;
  return d;
}

const Mat3& QFrame::operator[](int k) const {
  switch (k) {
    case 0: return X;
    case 1: return Y;
    case 2: return E;
    case 3: return F;
    default: return G;
  }
}

QFrame q_frame(const SurfacePoint& x) {
  QFrame f;
  f.gamma = x.normal;
  f.n = x.tangents.col(0).normalized();
  f.m = f.gamma.cross(f.n);
  f.X = f.n * f.n.transpose() - f.m * f.m.transpose();
  f.Y = sym(f.n, f.m);
  f.E = f.gamma * f.gamma.transpose() - Mat3::Identity() / 3.0;
  f.F = sym(f.n, f.gamma);
  f.G = sym(f.m, f.gamma);
  return f;
}

std::array<double, 5> frame_coefficients(const QFrame& f, const QTensor& q) {
  std::array<double, 5> c{};
  for (int k = 0; k < 5; ++k) c[static_cast<std::size_t>(k)] = q_dot(q, f[k]) / q_dot(f[k], f[k]);
  return c;
}

QTensor project_admissible(const SurfacePoint& x, const QTensor& q) {
  const Mat3 P = tangent_projector(x);
  const Mat3 t = P * (0.5 * (q + q.transpose())) * P;
  return t - 0.5 * t.trace() * P;
}

QField q_field(const LineField& l) {
  return [l](const SurfacePoint& x) -> QTensor {
    const double s = l.order(x);
    const Vec3 d = tangent_project(x, l.direction(x));
    const double n = d.norm();
    if (s == 0.0 || n == 0.0) return Mat3::Zero();
    return q_from_director(x, d / n, s);
  };
}

LineField line_field_from_vector(const TangentField& v) {
  LineField l;
  l.direction = [v](const SurfacePoint& x) { return v(x); };
  l.order = [v](const SurfacePoint& x) { return v(x).norm() > 0 ? kSqrt2 : 0.0; };
  l.label = "lines(" + v.label() + ")";
  return l;
}

QField q_field_from_vector(const TangentField& v) {
  return [v](const SurfacePoint& x) -> QTensor {
    const Vec3 w = v(x);
    return w * w.transpose() - 0.5 * w.squaredNorm() * tangent_projector(x);
  };
}

LineField torus_half_turn_field(double k) {
  LineField l;
  l.direction = [k](const SurfacePoint& x) {
    const Vec3 et = x.tangents.col(0).normalized();
    const Vec3 ep = x.tangents.col(1).normalized();
    const double a = k * x.uv.y();
    return Vec3(std::cos(a) * et + std::sin(a) * ep);
  };
  l.order = [](const SurfacePoint&) { return kSqrt2; };
  l.label = "half-turn(" + std::to_string(k) + ")";
  return l;
}

QField mollify_q(const Surface& s_in, const QField& q, double eps, const MollifyQOptions& opts) {
  if (!s_in.closed()) fail(ErrorCode::BoundaryPresent, "Q mollification is implemented on closed surfaces");
  if (!(eps > 0) || eps > s_in.r0()) fail(ErrorCode::EpsTooLarge, "eps outside (0, r0]");
  auto s = std::make_shared<const Surface>(s_in);
  const int nodes = opts.ball_nodes;
  return [s, q, eps, nodes](const SurfacePoint& x) -> QTensor {
    Mat3 acc = Mat3::Zero();
    double mass = 0.0;
    for (const auto& node : metric_ball_sample(*s, x, eps, nodes)) {
      acc += node.weight * q(node.point);
      mass += node.weight;
    }
    return project_admissible(x, acc / mass);
  };
}

QNormRange q_norm_range(const Surface& s, const QField& q, int n) {
  QNormRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (int pid : s.patches()) {
    const Rect& d = s.chart(pid).domain();
    std::vector<QNormRange> rows(static_cast<std::size_t>(n), r);
    parallel_for(rows.size(), [&](std::size_t i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 uv(d.u0 + d.width() * (static_cast<double>(i) + 0.5) / n,
                      d.v0 + d.height() * (j + 0.5) / n);
        const SurfacePoint p = s.point(pid, uv);
        if (!s.contains(p)) continue;
        const double val = q_norm(q(p));
        rows[i].min = std::min(rows[i].min, val);
        rows[i].max = std::max(rows[i].max, val);
      }
    });
    for (const auto& row : rows) {
      r.min = std::min(r.min, row.min);
      r.max = std::max(r.max, row.max);
    }
  }
  return r;
}

Vec2 doubled_angle_coefficients(const SurfacePoint& x, const QTensor& q) {
  const auto [e1, e2] = chart_frame(x);
  return Vec2(e1.dot(q * e1) - e2.dot(q * e2), 2.0 * e1.dot(q * e2));
}

double linefield_index(const Surface& s, const QField& q, const SurfacePoint& z, double r) {
  const int cid = z.chart;
  const Chart& c = s.chart(cid);
  const int w = winding_number([&](double t) {
    const SurfacePoint p = chart_point(c, cid, z.uv + r * Vec2(std::cos(t), std::sin(t)));
    return doubled_angle_coefficients(p, q(p));
  });
  return 0.5 * w;
}

std::vector<LineSingularity> linefield_singularities(const Surface& s, const QField& q,
                                                     const RootSearchOptions& opts) {
  std::vector<LineSingularity> found;
  for (int cid : s.scan_charts()) {
    const Chart& chart = s.chart(cid);
    ChartFunction f = [&](const Vec2& uv) -> std::optional<Vec2> {
      const SurfacePoint p = chart_point(chart, cid, uv);
      return doubled_angle_coefficients(p, q(p));
    };
    const RootSearchResult res = locate_roots(chart, f, opts);
    if (!res.unresolved.empty())
      fail(ErrorCode::ClusterUnresolved, "unresolved line-field singularity on chart '" + chart.name() + "'");
    for (const auto& root : res.roots) {
      const SurfacePoint p = s.point(cid, root.uv);
      if (!chart.owns(p.uv) || !s.contains(p)) continue;
      bool duplicate = false;
      for (const auto& o : found)
        duplicate = duplicate || (o.location.position - p.position).norm() < opts.separation_tol;
      if (!duplicate) found.push_back({p, 0.0});
    }
  }
  for (auto& z : found) {
    const Chart& c = s.chart(z.location.chart);
    const Rect& d = c.domain();
    double r = 0.25 * std::min(d.width(), d.height());
    if (!c.periodic_u()) r = std::min(r, 0.9 * std::min(z.location.uv.x() - d.u0, d.u1 - z.location.uv.x()));
    if (!c.periodic_v()) r = std::min(r, 0.9 * std::min(z.location.uv.y() - d.v0, d.v1 - z.location.uv.y()));
    for (const auto& o : found) {
      if (&o == &z) continue;
      try {
        const SurfacePoint w = s.to_chart(o.location, z.location.chart);
        r = std::min(r, 0.5 * chart_distance(c, z.location.uv, w.uv));
      } catch (const Error&) {
      }
    }
    z.index = linefield_index(s, q, z.location, r);
  }
  return found;
}

Loop chart_loop(const Surface& s_in, int chart, std::function<Vec2(double)> path, std::string name) {
  auto s = std::make_shared<const Surface>(s_in);
  Loop l;
  l.name = std::move(name);
  l.at = [s, chart, path](double t) { return s->point(chart, path(t)); };
  return l;
}

std::vector<Loop> generating_loops(const Surface& s, double theta0, double phi0) {
  if (!s.closed()) fail(ErrorCode::Unsupported, "generating loops are defined for closed surfaces");
  if (s.genus() == 0) return {};
  if (s.name() != "torus") fail(ErrorCode::Unsupported, "no generating loops for '" + s.name() + "'");
  return {chart_loop(s, 0, [phi0](double t) { return Vec2(kTwoPi * t, phi0); }, "theta-loop"),
          chart_loop(s, 0, [theta0](double t) { return Vec2(theta0, kTwoPi * t); }, "phi-loop")};
}

Holonomy orientability_check([[maybe_unused]] const Surface& s, const QField& q, const std::vector<Loop>& loops,
                             int samples) {
  Holonomy h;
  for (const Loop& loop : loops) {
    auto dir = [&](double t) {
      const SurfacePoint p = loop.at(t);
      const Director d = director_from_q(p, q(p), 1e-8);
      if (d.arbitrary) fail(ErrorCode::UnderResolved, "Q vanishes on loop '" + loop.name + "'");
      return d.n;
    };
    // Continue the sign so that consecutive directions stay within pi/4.
    const double limit = std::cos(0.25 * kPi);
    std::function<Vec3(double, const Vec3&, double, int)> advance =
        [&](double ta, const Vec3& da, double tb, int depth) -> Vec3 {
      Vec3 db = dir(tb);
      if (std::abs(da.dot(db)) >= limit) return da.dot(db) < 0 ? Vec3(-db) : db;
      if (depth >= 20) fail(ErrorCode::UnderResolved, "direction jumps on loop '" + loop.name + "'");
      const double tm = 0.5 * (ta + tb);
      const Vec3 dm = advance(ta, da, tm, depth + 1);
      return advance(tm, dm, tb, depth + 1);
    };
    const Vec3 start = dir(0.0);
    Vec3 cur = start;
    for (int k = 0; k < samples; ++k)
      cur = advance(static_cast<double>(k) / samples, cur, static_cast<double>(k + 1) / samples, 0);
    const int sign = cur.dot(start) > 0 ? 1 : -1;
    h.signs.push_back(sign);
    h.orientable = h.orientable && sign == 1;
  }
  return h;
}

LineFieldVerdict vmo_linefield_obstruction(const Surface& s, const QField& q,
                                           const LineFieldVerdictOptions& opts) {
  if (!s.closed()) fail(ErrorCode::ConfigError, "line-field verdicts need a closed surface");
  LineFieldVerdict v;
  v.chi = s.euler_characteristic();
  const QNormRange raw = q_norm_range(s, q, opts.samples);
  v.c1 = raw.min;
  v.c2 = raw.max;
  v.bounds_hold = raw.min > opts.bound_floor * std::max(1.0, raw.max);
  if (v.bounds_hold) {
    v.certified = true;
    const std::vector<double> grid = opts.eps_grid.empty() ? default_eps_grid(s) : opts.eps_grid;
    for (double eps : grid) {
      const QNormRange m = q_norm_range(s, mollify_q(s, q, eps, opts.mollify), opts.samples);
      QEpsEntry e{eps, m.min, m.max, m.min >= 0.5 * v.c1 && m.max <= 2.0 * v.c2};
      v.certified = v.certified && e.within;
      v.entries.push_back(e);
    }
  }
  if (v.chi != 0) v.verdict = v.certified ? "inconsistent" : "obstructed";
  else if (!v.bounds_hold) v.verdict = "bounds-violated";
  else v.verdict = v.certified ? "certified" : "not-certified";
  return v;
}

void write_q_csv(std::ostream& out, const Surface& s, const QField& q, int n) {
  out << "chart,u,v,qX,qY,qE,qF,qG\n";
  out.precision(15);
  for (int pid : s.patches()) {
    const Chart& c = s.chart(pid);
    const Rect& d = c.domain();
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Vec2 uv(d.u0 + d.width() * i / n, d.v0 + d.height() * j / n);
        const SurfacePoint p = s.point(pid, uv);
        const auto coef = frame_coefficients(q_frame(p), q(p));
        out << c.name() << ',' << uv.x() << ',' << uv.y();
        for (double x : coef) out << ',' << x;
        out << '\n';
      }
    }
  }
}

}  // namespace vmoidx
