#include "vmoidx/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>

#include "vmoidx/error.hpp"
#include "vmoidx/parallel.hpp"
#include "vmoidx/vmo.hpp"

namespace vmoidx {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double periodic_delta(double d, double period) {
  d = std::fmod(d, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

// Representative of b nearest to a on a chart with periodic directions.
Vec2 unwrap_near(const Chart& c, const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  if (c.periodic_u()) d.x() = periodic_delta(d.x(), c.domain().width());
  if (c.periodic_v()) d.y() = periodic_delta(d.y(), c.domain().height());
  return a + d;
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

// Value of the raw collar interpolant for curve i.
Vec3 collar_bar(const Surface& s, const BoundaryDatum& g, int curve, double theta, double sv, int nodes) {
  if (sv <= 0) return g.curves[static_cast<std::size_t>(curve)](theta);
  return boundary_average(s, g, curve, theta, sv, nodes);
}

BoundaryCurve level_curve(std::shared_ptr<const Surface> s, int curve, double r) {
  BoundaryCurve c;
  c.name = s->boundary()[static_cast<std::size_t>(curve)].name + "@r";
  constexpr double h = 1e-6;
  c.point = [s, curve, r](double th) { return s->collar_point(curve, th, r); };
  auto d_theta = [s, curve, r](double th) {
    return Vec3((s->collar_point(curve, th + h, r).position - s->collar_point(curve, th - h, r).position) /
                (2 * h));
  };
  c.speed = [d_theta](double th) { return d_theta(th).norm(); };
  c.tangent = [d_theta](double th) { return Vec3(d_theta(th).normalized()); };
  c.conormal = [s, curve, r, d_theta](double th) {
    const Vec3 ds = (s->collar_point(curve, th, r + h).position -
                     s->collar_point(curve, th, r - h).position) / (2 * h);
    const Vec3 t = d_theta(th).normalized();
    const Vec3 out = -(ds - ds.dot(t) * t);
    return Vec3(out.normalized());
  };
  return c;
}

// Stadium {dist(xi, [a, b]) < R} in chart coordinates.
struct Tube {
  Vec2 a, b, e, nrm;
  double L = 0.0, R = 0.0;

  double perimeter() const { return 2 * L + kTwoPi * R; }

  Vec2 boundary(double tau) const {
    tau = std::fmod(tau, perimeter());
    if (tau < 0) tau += perimeter();
    if (tau < L) return a + tau * e + R * nrm;
    tau -= L;
    if (tau < kPi * R) {
      const double phi = tau / R;
      return b + R * (std::cos(phi) * nrm + std::sin(phi) * e);
    }
    tau -= kPi * R;
    if (tau < L) return b - tau * e - R * nrm;
    tau -= L;
    const double phi = tau / R;
    return a + R * (-std::cos(phi) * nrm - std::sin(phi) * e);
  }

  // (rho, tau) of a point, rho = 1 on the boundary; nullopt outside.
  std::optional<std::pair<double, double>> locate(const Vec2& xi) const {
    const double t = std::clamp((xi - a).dot(e), 0.0, L);
    const Vec2 q = a + t * e;
    const double delta = (xi - q).norm();
    if (delta >= R) return std::nullopt;
    const double rho = delta / R;
    if (delta == 0.0) return std::make_pair(0.0, 0.0);
    const Vec2 d = (xi - q) / delta;
    double tau;
    if (t > 0 && t < L) {
      tau = d.dot(nrm) >= 0 ? t : L + kPi * R + (L - t);
    } else if (t >= L) {
      tau = L + R * std::atan2(std::max(0.0, d.dot(e)), d.dot(nrm));
    } else {
      tau = 2 * L + kPi * R + R * std::atan2(std::max(0.0, -d.dot(e)), -d.dot(nrm));
    }
    return std::make_pair(rho, tau);
  }
};

}  // namespace

CollarExtension collar_extension(const Surface& s_in, const BoundaryDatum& g, double r,
                                 const ExtensionOptions& opts) {
  if (s_in.closed()) fail(ErrorCode::ConfigError, "collar extension needs a boundary");
  if (!s_in.has_collar()) fail(ErrorCode::Unsupported, "surface has no collar");
  if (g.curves.size() != s_in.boundary().size())
    fail(ErrorCode::ConfigError, "datum does not match the boundary curves");
  if (!(r > 0) || r > s_in.collar_width())
    fail(ErrorCode::CollarTooNarrow, "collar radius " + std::to_string(r) + " outside the collar");
  auto s = std::make_shared<const Surface>(s_in);
  CollarExtension ext;
  ext.r = r;
  const NormRange gr = datum_norm_range(*s, g, opts.theta_samples * 4);
  ext.c1 = gr.min;
  ext.c2 = gr.max;
  if (!(gr.min > 0)) fail(ErrorCode::VanishingOnBoundary, "datum vanishes on the boundary");

  const int nodes = opts.arc_nodes;
  ext.v = TangentField(
      [s, g, nodes](const SurfacePoint& x) -> Vec3 {
        const auto cc = s->collar_coordinates(x);
        if (!cc) return Vec3::Zero();
        return collar_bar(*s, g, cc->curve, cc->theta, cc->s, nodes);
      },
      g.label + "-collar");

  // Norm certificate on a theta x s sample.
  ext.min_norm = std::numeric_limits<double>::infinity();
  ext.max_norm = 0.0;
  const std::size_t nc = s->boundary().size();
  for (std::size_t i = 0; i < nc; ++i) {
    const int curve = static_cast<int>(i);
    std::vector<double> lo(static_cast<std::size_t>(opts.theta_samples)), hi(lo.size());
    parallel_for(lo.size(), [&](std::size_t k) {
      const double th = kTwoPi * static_cast<double>(k) / opts.theta_samples;
      double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
      for (int j = 0; j <= opts.s_samples; ++j) {
        const double sv = r * j / opts.s_samples;
        const SurfacePoint p = s->collar_point(curve, th, sv);
        const double n = tangent_project(p, collar_bar(*s, g, curve, th, sv, nodes)).norm();
        mn = std::min(mn, n);
        mx = std::max(mx, n);
      }
      lo[k] = mn;
      hi[k] = mx;
    });
    ext.min_norm = std::min(ext.min_norm, *std::min_element(lo.begin(), lo.end()));
    ext.max_norm = std::max(ext.max_norm, *std::max_element(hi.begin(), hi.end()));
  }
  if (ext.min_norm < ext.c1 / 3 || ext.max_norm > 3 * ext.c2)
    fail(ErrorCode::NormCollapse, "collar field leaves [c1/3, 3 c2] at r = " + std::to_string(r));

  for (std::size_t i = 0; i < nc; ++i) {
    const int curve = static_cast<int>(i);
    ext.c_r.push_back(level_curve(s, curve, r));
    ext.on_c_r.curves.push_back([s, g, curve, r, nodes](double th) {
      return tangent_project(s->collar_point(curve, th, r), collar_bar(*s, g, curve, th, r, nodes));
    });
  }
  ext.on_c_r.label = g.label + "@C_r";
  ext.ind_minus_g = inward_boundary_index(*s, g, opts.index);
  ext.ind_minus_c_r = inward_boundary_index(ext.c_r, ext.on_c_r, opts.index);
  if (ext.ind_minus_g != ext.ind_minus_c_r)
    fail(ErrorCode::IndexMismatch, "inward index on C_r (" + std::to_string(ext.ind_minus_c_r) +
                                       ") differs from the datum's (" +
                                       std::to_string(ext.ind_minus_g) + ")");
  return ext;
}

CollarExtension collar_extension(const Surface& s, const BoundaryDatum& g, const ExtensionOptions& opts) {
  if (!s.has_collar()) fail(ErrorCode::Unsupported, "surface has no collar");
  double r = 0.5 * s.collar_width();
  for (int k = 0;; ++k) {
    try {
      return collar_extension(s, g, r, opts);
    } catch (const Error& e) {
      const bool retry = e.code() == ErrorCode::NormCollapse || e.code() == ErrorCode::IndexMismatch ||
                         e.code() == ErrorCode::DegenerateBoundaryZero;
      if (!retry || k >= opts.max_halvings) throw;
    }
    r *= 0.5;
  }
}

InteriorFill interior_fill(const Surface& s_in, const CollarExtension& ext, const ExtensionOptions& opts) {
  auto s = std::make_shared<const Surface>(s_in);
  const double r = ext.r;
  const std::size_t nc = s->boundary().size();
  double reach = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nc; ++i) reach = std::min(reach, s->collar(static_cast<int>(i)).reach);
  const double W = reach - r;
  if (!(W > 0)) fail(ErrorCode::CollarTooNarrow, "collar radius leaves no interior");

  const TangentField v = ext.v;
  const BoundaryDatum on_c = ext.on_c_r;
  // Depth below C_r: min over curves of s_i - r.
  auto depth = [s, r, nc](const SurfacePoint& x) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nc; ++i) {
      if (auto ts = s->collar(static_cast<int>(i)).coordinates(x)) d = std::min(d, ts->y() - r);
    }
    return d;
  };
  TangentField base(
      [s, r, nc, W, v, on_c, depth](const SurfacePoint& x) -> Vec3 {
        if (depth(x) <= 0) return v(x);
        if (nc == 1) {
          const auto ts = s->collar(0).coordinates(x);
          if (!ts) return Vec3::Zero();
          return collar_cutoff((ts->y() - r) / W) * on_c.curves[0](ts->x());
        }
        Vec3 acc = Vec3::Zero();
        double wsum = 0.0;
        for (std::size_t i = 0; i < nc; ++i) {
          const auto ts = s->collar(static_cast<int>(i)).coordinates(x);
          if (!ts) continue;
          const double d = ts->y() - r;
          const double w = 1.0 / (d * d);
          acc += w * on_c.curves[i](ts->x());
          wsum += w;
        }
        return wsum > 0 ? Vec3(acc / wsum) : Vec3(Vec3::Zero());
      },
      ext.on_c_r.label + "-fill");

  PerturbOptions popts;
  popts.freeze_boundary = true;
  popts.freeze_distance = depth;
  popts.freeze_width = 0.25 * W;
  popts.search = opts.index.search;
  popts.max_retries = opts.index.perturb_retries;
  InteriorFill fill;
  fill.field = transverse_perturb(*s, base, 0.25 * ext.c1, opts.seed, popts);
  fill.zeros = find_zeros(*s, fill.field, opts.index.search);
  for (const auto& z : fill.zeros) fill.index += z.sign;
  return fill;
}

TangentField cancel_zeros(const Surface& s_in, const TangentField& F, const std::vector<Zero>& zeros,
                          CancelReport* report, const ExtensionOptions& opts) {
  int total = 0;
  for (const auto& z : zeros) total += z.sign;
  if (total != 0) fail(ErrorCode::NonzeroIndex, "zero signs sum to " + std::to_string(total));
  if (report) *report = CancelReport{};
  if (zeros.empty()) return F;
  auto s = std::make_shared<const Surface>(s_in);

  int cid;
  if (!s->closed()) cid = s->boundary()[0].point(0.0).chart;
  else if (s->ball_chart() >= 0) cid = s->ball_chart();
  else cid = zeros[0].location.chart;
  const Chart& chart = s->chart(cid);

  struct Item {
    Vec2 uv;
    int sign;
    bool done = false;
  };
  std::vector<Item> items;
  for (const auto& z : zeros) {
    SurfacePoint p;
    try {
      p = s->to_chart(z.location, cid);
    } catch (const Error&) {
      fail(ErrorCode::Unsupported, "zeros do not share one chart");
    }
    items.push_back({p.uv, z.sign});
  }
  auto chart_dist = [&](const Vec2& a, const Vec2& b) { return (unwrap_near(chart, a, b) - a).norm(); };

  // Boundary curves in chart coordinates, to keep tubes away from them.
  std::vector<Vec2> boundary_uv;
  for (const auto& curve : s->boundary()) {
    for (int k = 0; k < 720; ++k) {
      try {
        boundary_uv.push_back(s->to_chart(curve.point(kTwoPi * k / 720), cid).uv);
      } catch (const Error&) {
      }
    }
  }

  TangentField current = F;
  while (true) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].done) continue;
      for (std::size_t j = i + 1; j < items.size(); ++j) {
        if (items[j].done || items[i].sign == items[j].sign) continue;
        const double d = chart_dist(items[i].uv, items[j].uv);
        if (d < best) {
          best = d;
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    }
    if (bi < 0) break;
    Tube tube;
    tube.a = items[static_cast<std::size_t>(bi)].uv;
    tube.b = unwrap_near(chart, tube.a, items[static_cast<std::size_t>(bj)].uv);
    tube.L = (tube.b - tube.a).norm();
    tube.e = (tube.b - tube.a) / tube.L;
    tube.nrm = Vec2(-tube.e.y(), tube.e.x());
    double room = 0.25 * std::min(chart.domain().width(), chart.domain().height());
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (static_cast<int>(k) == bi || static_cast<int>(k) == bj || items[k].done) continue;
      room = std::min(room, segment_distance(tube.a, tube.b, unwrap_near(chart, tube.a, items[k].uv)));
    }
    for (const Vec2& q : boundary_uv)
      room = std::min(room, segment_distance(tube.a, tube.b, unwrap_near(chart, tube.a, q)));
    const Rect& dom = chart.domain();
    for (const Vec2& end : {tube.a, tube.b}) {
      if (!chart.periodic_u()) room = std::min(room, std::min(end.x() - dom.u0, dom.u1 - end.x()));
      if (!chart.periodic_v()) room = std::min(room, std::min(end.y() - dom.v0, dom.v1 - end.y()));
    }
    tube.R = 0.45 * room;
    if (!(tube.R > 1e-9)) fail(ErrorCode::CancellationFailed, "no room for a cancellation tube");

    auto coeff = [s, cid, current](const Vec2& xi) { return pushforward(*s, cid, current, xi); };
    // Continuous angle lift of F along the tube boundary.
    int m = opts.cancel_boundary_samples;
    std::vector<double> lift;
    for (int attempt = 0;; ++attempt) {
      lift.assign(static_cast<std::size_t>(m) + 1, 0.0);
      bool smooth = true;
      Vec2 prev = coeff(tube.boundary(0.0));
      lift[0] = std::atan2(prev.y(), prev.x());
      for (int k = 1; k <= m && smooth; ++k) {
        const Vec2 cur = coeff(tube.boundary(tube.perimeter() * k / m));
        if (!(cur.norm() > 0)) fail(ErrorCode::CancellationFailed, "field vanishes on a tube boundary");
        const double d = std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.dot(cur));
        smooth = std::abs(d) < 0.5 * kPi;
        lift[static_cast<std::size_t>(k)] = lift[static_cast<std::size_t>(k) - 1] + d;
        prev = cur;
      }
      if (smooth) break;
      if (attempt >= 4) fail(ErrorCode::CancellationFailed, "tube boundary under-resolved");
      m *= 2;
    }
    if (std::abs(lift.back() - lift.front()) > kPi)
      fail(ErrorCode::CancellationFailed, "nonzero winding on a cancellation tube");
    double mean = 0.0;
    for (int k = 0; k < m; ++k) mean += lift[static_cast<std::size_t>(k)];
    mean /= m;

    auto lifted = std::make_shared<const std::vector<double>>(std::move(lift));
    const Tube t = tube;
    TangentField prev_field = current;
    current = TangentField(
        [s, cid, t, lifted, mean, m, prev_field](const SurfacePoint& x) -> Vec3 {
          const Chart& c = s->chart(cid);
          SurfacePoint p;
          if (x.chart == cid) {
            p = x;
          } else {
            try {
              p = s->to_chart(x, cid);
            } catch (const Error&) {
              return prev_field(x);
            }
          }
          const Vec2 xi = unwrap_near(c, t.a, p.uv);
          const auto loc = t.locate(xi);
          if (!loc) return prev_field(x);
          const auto [rho, tau] = *loc;
          const double pos = tau / t.perimeter() * m;
          const int k = std::clamp(static_cast<int>(pos), 0, m - 1);
          const double frac = pos - k;
          const double guess = (1 - frac) * (*lifted)[static_cast<std::size_t>(k)] +
                               frac * (*lifted)[static_cast<std::size_t>(k) + 1];
          const Vec2 fb = pushforward(*s, cid, prev_field, t.boundary(tau));
          double alpha = std::atan2(fb.y(), fb.x());
          alpha += kTwoPi * std::round((guess - alpha) / kTwoPi);
          const double A = alpha + (1 - rho) * (mean - alpha);
          const double lambda = std::min(1.0, 2 * (1 - rho));
          const double mag = lambda + (1 - lambda) * pushforward(*s, cid, prev_field, p.uv).norm();
          return Vec3(p.tangents * (mag * Vec2(std::cos(A), std::sin(A))));
        },
        F.label() + "-cancelled");
    items[static_cast<std::size_t>(bi)].done = true;
    items[static_cast<std::size_t>(bj)].done = true;
    if (report) {
      ++report->pairs;
      report->tube_radii.push_back(tube.R);
    }
  }
  return current;
}

TangentField clamp_norm(const Surface& s, const TangentField& v, double c1, double c2, int samples) {
  if (!(c1 > 0) || c2 < c1) fail(ErrorCode::ConfigError, "clamp needs 0 < c1 <= c2");
  double mn = norm_scan(s, v, samples).min_norm;
  if (!s.closed()) mn = std::min(mn, boundary_norm_range(s, v, 4 * samples).min);
  if (!(mn > 1e-14)) fail(ErrorCode::ZeroNorm, "field vanishes at a sample point");
  return TangentField(
      [v, c1, c2](const SurfacePoint& x) -> Vec3 {
        const Vec3 w = v(x);
        const double n = w.norm();
        if (n == 0.0) return w;
        return w * (std::clamp(n, c1, c2) / n);
      },
      v.label() + "-clamped");
}

ExtensionResult extend_boundary_datum(const Surface& s, const BoundaryDatum& g, double c1, double c2,
                                      const ExtensionOptions& opts) {
  if (s.closed()) fail(ErrorCode::ConfigError, "extension needs a surface with boundary");
  if (!s.has_collar()) fail(ErrorCode::Unsupported, "surface has no collar");
  if (g.curves.size() != s.boundary().size())
    fail(ErrorCode::ConfigError, "datum does not match the boundary curves");
  if (!(c1 > 0) || c2 < c1) fail(ErrorCode::ConfigError, "bounds need 0 < c1 <= c2");
  const int samples = 4096;
  for (std::size_t i = 0; i < g.curves.size(); ++i) {
    const BoundaryCurve& curve = s.boundary()[i];
    for (int k = 0; k < samples; ++k) {
      const double th = kTwoPi * k / samples;
      const Vec3 w = g.curves[i](th);
      const double n = w.norm();
      if (n < c1 * (1 - 1e-9) || n > c2 * (1 + 1e-9))
        fail(ErrorCode::NotAdmissible, "datum norm " + std::to_string(n) + " outside [c1, c2]");
      if (std::abs(w.dot(curve.point(th).normal)) > 1e-9 * std::max(1.0, n))
        fail(ErrorCode::NotTangent, "datum is not tangent to the surface");
    }
  }
  ExtensionResult res;
  res.chi = s.euler_characteristic();
  res.ind_minus_g = inward_boundary_index(s, g, opts.index);
  if (res.ind_minus_g != res.chi) throw TopologicalObstruction(res.ind_minus_g, res.chi);

  const CollarExtension ext = collar_extension(s, g, opts);
  const InteriorFill fill = interior_fill(s, ext, opts);
  if (fill.index != 0)
    fail(ErrorCode::IndexMismatch, "interior fill has index " + std::to_string(fill.index));
  CancelReport cr;
  const TangentField cancelled = cancel_zeros(s, fill.field, fill.zeros, &cr, opts);
  if (!find_zeros(s, cancelled, opts.index.search).empty())
    fail(ErrorCode::CancellationFailed, "zeros remain after cancellation");
  res.field = clamp_norm(s, cancelled, c1, c2);
  res.r = ext.r;
  res.certificates["collar_radius"] = ext.r;
  res.certificates["collar_min_norm"] = ext.min_norm;
  res.certificates["collar_max_norm"] = ext.max_norm;
  res.certificates["ind_minus_c_r"] = ext.ind_minus_c_r;
  res.certificates["fill_zero_count"] = static_cast<double>(fill.zeros.size());
  res.certificates["cancelled_pairs"] = cr.pairs;
  return res;
}

ScanResult norm_scan(const Surface& s, const TangentField& v, int n) {
  ScanResult res;
  res.min_norm = std::numeric_limits<double>::infinity();
  for (int pid : s.patches()) {
    const Rect& d = s.chart(pid).domain();
    std::vector<double> lo(static_cast<std::size_t>(n) + 1, std::numeric_limits<double>::infinity());
    std::vector<double> hi(lo.size(), 0.0);
    std::vector<std::size_t> cnt(lo.size(), 0);
    parallel_for(lo.size(), [&](std::size_t i) {
      for (int j = 0; j <= n; ++j) {
        const SurfacePoint p =
            s.point(pid, Vec2(d.u0 + d.width() * static_cast<double>(i) / n, d.v0 + d.height() * j / n));
        if (!s.contains(p)) continue;
        const double m = v(p).norm();
        lo[i] = std::min(lo[i], m);
        hi[i] = std::max(hi[i], m);
        ++cnt[i];
      }
    });
    for (std::size_t i = 0; i < lo.size(); ++i) {
      res.min_norm = std::min(res.min_norm, lo[i]);
      res.max_norm = std::max(res.max_norm, hi[i]);
      res.points += cnt[i];
    }
  }
  return res;
}

void write_field_csv(std::ostream& out, const Surface& s, const TangentField& v, int n) {
  out << "chart,u,v,w1,w2,w3\n";
  out.precision(15);
  for (int pid : s.patches()) {
    const Chart& c = s.chart(pid);
    const Rect& d = c.domain();
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Vec2 uv(d.u0 + d.width() * i / n, d.v0 + d.height() * j / n);
        const Vec3 w = v(s.point(pid, uv));
        out << c.name() << ',' << uv.x() << ',' << uv.y() << ',' << w.x() << ',' << w.y() << ','
            << w.z() << '\n';
      }
    }
  }
}

}  // namespace vmoidx
