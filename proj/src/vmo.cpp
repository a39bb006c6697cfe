#include "vmoidx/vmo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>

#include "vmoidx/error.hpp"
#include "vmoidx/parallel.hpp"

namespace vmoidx {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double smooth_step01(double u) {
  if (u <= 0) return 0.0;
  if (u >= 1) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double cutoff_for(const Surface& s, const VmoOptions& opts) {
  if (opts.cutoff_width > 0) return opts.cutoff_width;
  return s.has_collar() ? s.collar_width() : 0.0;
}

// Outside measure of the circle |p - c| = r, by sampling and bisection.
double outside_angle(const Surface& s, const Vec3& c, double r) {
  constexpr int kAngles = 720;
  auto out = [&](double phi) {
    SurfacePoint p;
    p.position = c + r * Vec3(std::cos(phi), std::sin(phi), 0.0);
    return !s.contains(p);
  };
  double total = 0.0;
  bool prev = out(0.0);
  double run_start = 0.0;
  for (int k = 1; k <= kAngles; ++k) {
    const double hi = kTwoPi * k / kAngles;
    const bool cur = out(hi);
    if (cur != prev) {
      double a = kTwoPi * (k - 1) / kAngles, b = hi;
      while (b - a > 1e-14) {
        const double m = 0.5 * (a + b);
        if (out(m) == prev) a = m;
        else b = m;
      }
      const double t = 0.5 * (a + b);
      if (prev) total += t - run_start;
      run_start = t;
      prev = cur;
    }
  }
  if (prev) total += kTwoPi - run_start;
  return total;
}

}  // namespace

VmoField vmo_field(const Surface& s, const TangentField& v) {
  return {[v](const SurfacePoint& x) { return v(x); }, trace(s, v), v.label()};
}

std::vector<double> default_eps_grid(const Surface& s) {
  std::vector<double> g;
  for (int k = 1; k <= 6; ++k) g.push_back(s.r0() / std::pow(2.0, k));
  return g;
}

Vec3 ball_average(const Surface& s, const AmbientField& u, const SurfacePoint& x, double eps, int n) {
  const auto nodes = metric_ball_sample(s, x, eps, n, true);
  Vec3 acc = Vec3::Zero();
  double mass = 0.0;
  for (const auto& node : nodes) {
    acc += node.weight * u(node.point);
    mass += node.weight;
  }
  return acc / mass;
}

Vec3 boundary_average(const Surface& s, const BoundaryDatum& g, int curve, double theta, double eps,
                      int n) {
  const auto& gc = g.curves.at(static_cast<std::size_t>(curve));
  // Arcs below round-off of theta carry no information beyond g(theta).
  if (eps <= 1e-12 * (1.0 + std::abs(theta))) return gc(theta);
  const auto nodes = boundary_arc_sample(s, curve, theta, eps, n);
  Vec3 acc = Vec3::Zero();
  double mass = 0.0;
  for (const auto& node : nodes) {
    acc += node.weight * gc(node.theta);
    mass += node.weight;
  }
  return acc / mass;
}

double collar_cutoff(double t) { return 1.0 - smooth_step01(2.0 * t - 1.0); }

CollarField standard_extension_G(const Surface& s, const BoundaryDatum& g, double cutoff_width) {
  if (!s.has_collar()) fail(ErrorCode::CollarTooNarrow, "surface has no collar");
  if (!(cutoff_width > 0) || cutoff_width > s.collar_width() * (1 + 1e-12))
    fail(ErrorCode::CollarTooNarrow, "cutoff width " + std::to_string(cutoff_width) +
                                         " exceeds the collar width");
  if (g.curves.size() != s.boundary().size())
    fail(ErrorCode::ConfigError, "datum does not match the boundary curves");
  return [g, cutoff_width](int curve, double theta, double sv) {
    return Vec3(g.curves[static_cast<std::size_t>(curve)](theta) *
                collar_cutoff(std::abs(sv) / cutoff_width));
  };
}

Vec3 glued_average(const Surface& s, const VmoField& f, const CollarField& G, const SurfacePoint& x,
                   double eps, int n) {
  if (!s.closed() && s.has_collar()) {
    if (auto cc = s.collar_coordinates(x); cc && cc->s < 2 * eps) {
      // Points outside N (seen by chart scans) are clamped inside the double.
      const double s0 = std::max(cc->s, -(s.collar(cc->curve).width - eps));
      const auto nodes = collar_ball_sample(s, cc->curve, cc->theta, s0, eps, n);
      Vec3 acc = Vec3::Zero();
      double mass = 0.0;
      for (const auto& node : nodes) {
        const Vec3 val = node.s >= 0 ? f.values(s.collar_point(cc->curve, node.theta, node.s))
                                     : G(cc->curve, node.theta, node.s);
        acc += node.weight * val;
        mass += node.weight;
      }
      return acc / mass;
    }
  }
  return ball_average(s, f.values, x, eps, n);
}

MollifiedField mollify(const Surface& s_in, const VmoField& f, double eps, const VmoOptions& opts) {
  if (!(eps > 0) || eps > s_in.r0() * (1 + 1e-12))
    fail(ErrorCode::EpsTooLarge, "eps must lie in (0, r0]");
  auto s = std::make_shared<const Surface>(s_in);
  CollarField G;
  if (!s->closed()) {
    if (f.trace.curves.size() != s->boundary().size())
      fail(ErrorCode::ConfigError, "field needs a boundary trace on every curve");
    if (s->has_collar()) G = standard_extension_G(*s, f.trace, cutoff_for(*s, opts));
  }
  const int n = opts.ball_nodes;
  MollifiedField m;
  m.eps = eps;
  m.raw = [s, f, G, eps, n](const SurfacePoint& x) { return glued_average(*s, f, G, x, eps, n); };
  m.u_eps = TangentField(m.raw, f.label + "_eps");
  for (std::size_t i = 0; i < s->boundary().size(); ++i) {
    const int curve = static_cast<int>(i);
    const int an = opts.arc_nodes;
    auto bar = [s, g = f.trace, curve, eps, an](double th) {
      return boundary_average(*s, g, curve, th, eps, an);
    };
    m.g_bar.curves.push_back(bar);
    m.g_eps.curves.push_back([s, bar, curve](double th) {
      return tangent_project(s->boundary()[static_cast<std::size_t>(curve)].point(th), bar(th));
    });
  }
  m.g_bar.label = f.label + "_gbar";
  m.g_eps.label = f.label + "_geps";
  return m;
}

std::vector<SurfacePoint> sample_points(const Surface& s, int n) {
  std::vector<SurfacePoint> pts;
  for (int pid : s.patches()) {
    const Rect& d = s.chart(pid).domain();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        pts.push_back(s.point(pid, Vec2(d.u0 + d.width() * (i + 0.5) / n, d.v0 + d.height() * (j + 0.5) / n)));
  }
  return pts;
}

VmoModulus bmo_modulus(const Surface& s, const AmbientField& u, const std::vector<double>& eps_grid,
                       const std::vector<SurfacePoint>& x_grid, int n) {
  VmoModulus mod;
  mod.eps_grid = eps_grid;
  for (double eps : eps_grid) {
    std::vector<double> osc(x_grid.size(), 0.0);
    parallel_for(x_grid.size(), [&](std::size_t i) {
      const SurfacePoint& x = x_grid[i];
      if (!s.closed() && s.distance_to_boundary(x) < 2 * eps) return;
      const auto nodes = metric_ball_sample(s, x, eps, n, true);
      std::vector<Vec3> vals(nodes.size());
      Vec3 mean = Vec3::Zero();
      double mass = 0.0;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        vals[k] = u(nodes[k].point);
        mean += nodes[k].weight * vals[k];
        mass += nodes[k].weight;
      }
      mean /= mass;
      double acc = 0.0;
      for (std::size_t k = 0; k < nodes.size(); ++k) acc += nodes[k].weight * (vals[k] - mean).norm();
      osc[i] = acc / mass;
    });
    mod.omega.push_back(osc.empty() ? 0.0 : *std::max_element(osc.begin(), osc.end()));
  }
  return mod;
}

VmoIndexResult vmo_index(const Surface& s, const VmoField& f, const std::vector<double>& eps_grid,
                         const VmoOptions& opts) {
  if (eps_grid.empty()) fail(ErrorCode::ConfigError, "empty eps grid");
  VmoIndexResult res;
  const int chi = s.euler_characteristic();
  std::size_t smallest = 0;
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    const MollifiedField m = mollify(s, f, eps_grid[k], opts);
    VmoIndexEntry e;
    e.eps = eps_grid[k];
    std::vector<Zero> zeros;
    e.ind = index_continuous(s, m.u_eps, zeros, opts.index);
    e.ind_minus = s.closed() ? 0 : inward_boundary_index(s, m.g_eps, opts.index);
    e.residual = chi - e.ind - e.ind_minus;
    res.entries.push_back(e);
    if (eps_grid[k] <= eps_grid[smallest]) {
      smallest = k;
      res.report.zeros = std::move(zeros);
      res.report.epsilon1 = s.closed() ? 0.0 : stability_radius(s, m.g_eps, opts.index.boundary_samples);
    }
  }
  // Certificate over the smallest grid values.
  std::vector<VmoIndexEntry> sorted = res.entries;
  std::sort(sorted.begin(), sorted.end(),
            [](const VmoIndexEntry& a, const VmoIndexEntry& b) { return a.eps < b.eps; });
  const std::size_t tail = std::min(sorted.size(), static_cast<std::size_t>(std::max(1, opts.certificate_tail)));
  res.certified = true;
  for (std::size_t k = 1; k < tail; ++k) {
    res.certified = res.certified && sorted[k].ind == sorted[0].ind &&
                    sorted[k].ind_minus == sorted[0].ind_minus;
  }
  const VmoIndexEntry& e = res.entries[smallest];
  res.report.chi = chi;
  res.report.ind = e.ind;
  res.report.ind_minus = e.ind_minus;
  res.report.morse_residual = e.residual;
  res.report.diagnostics["eps"] = std::to_string(e.eps);
  res.report.diagnostics["certified"] = res.certified ? "true" : "false";
  res.report.diagnostics["zero_count"] = std::to_string(res.report.zeros.size());
  if (!res.certified && opts.require_certificate)
    fail(ErrorCode::NotConstantOverGrid, "index is not constant over the smallest " +
                                             std::to_string(tail) + " eps values");
  return res;
}

std::vector<DensityEntry> boundary_density_check(const Surface& s, int curve, double theta0,
                                                 const std::vector<double>& eps_grid, int n) {
  std::vector<DensityEntry> out;
  for (double eps : eps_grid) {
    const auto nodes = collar_ball_sample(s, curve, theta0, 0.0, eps, n);
    double outside = 0.0, total = 0.0;
    for (const auto& node : nodes) {
      total += node.weight;
      if (node.s < 0) outside += node.weight;
    }
    const double ratio = outside / total;
    out.push_back({eps, ratio, std::abs(ratio - 0.5)});
  }
  return out;
}

std::vector<DensityEntry> planar_density_check(const Surface& s, int curve, double theta0,
                                               const std::vector<double>& eps_grid, int n) {
  const Vec3 c = s.boundary().at(static_cast<std::size_t>(curve)).point(theta0).position;
  if (std::abs(c.z()) > 1e-12) fail(ErrorCode::Unsupported, "surface is not in the plane z = 0");
  std::vector<DensityEntry> out;
  for (double eps : eps_grid) {
    const Rule1D rule = gauss_legendre(n, 0.0, eps);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      acc += rule.weights[i] * rule.nodes[i] * outside_angle(s, c, rule.nodes[i]);
    const double ratio = acc / (kPi * eps * eps);
    out.push_back({eps, ratio, std::abs(ratio - 0.5)});
  }
  return out;
}

double loglog_slope(const std::vector<DensityEntry>& entries) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& e : entries) {
    if (!(e.deviation > 0)) continue;
    const double x = std::log(e.eps), y = std::log(e.deviation);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<VmoDiagnosticRow> vmo_diagnostics(const Surface& s, const VmoField& f,
                                              const std::vector<double>& eps_grid,
                                              const VmoOptions& opts, int interior_n,
                                              int boundary_samples) {
  const std::vector<SurfacePoint> pts = sample_points(s, interior_n);
  std::vector<VmoDiagnosticRow> rows;
  for (double eps : eps_grid) {
    VmoDiagnosticRow row;
    row.eps = eps;
    row.omega = bmo_modulus(s, f.values, {eps}, pts, opts.ball_nodes).omega.front();
    const MollifiedField m = mollify(s, f, eps, opts);
    std::vector<double> gap(pts.size(), 0.0);
    parallel_for(pts.size(), [&](std::size_t i) {
      const Vec3 bar = m.raw(pts[i]);
      gap[i] = (tangent_project(pts[i], bar) - bar).norm();
    });
    for (double g : gap) row.sup_u_minus_bar = std::max(row.sup_u_minus_bar, g);
    if (!s.closed()) {
      row.min_g_eps = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < s.boundary().size(); ++c) {
        const BoundaryCurve& curve = s.boundary()[c];
        std::vector<double> diff(static_cast<std::size_t>(boundary_samples));
        std::vector<double> gn(static_cast<std::size_t>(boundary_samples));
        parallel_for(diff.size(), [&](std::size_t k) {
          const double th = kTwoPi * static_cast<double>(k) / boundary_samples;
          const Vec3 ge = m.g_eps.curves[c](th);
          diff[k] = (m.u_eps(curve.point(th)) - ge).norm();
          gn[k] = ge.norm();
        });
        for (std::size_t k = 0; k < diff.size(); ++k) {
          row.sup_boundary_u_minus_g = std::max(row.sup_boundary_u_minus_g, diff[k]);
          row.min_g_eps = std::min(row.min_g_eps, gn[k]);
          row.max_g_eps = std::max(row.max_g_eps, gn[k]);
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<VmoDiagnosticRow>& rows) {
  out << "eps,omega,sup_u_eps_minus_bar_u_eps,sup_boundary_u_eps_minus_g_eps,min_g_eps,max_g_eps\n";
  out.precision(12);
  for (const auto& r : rows) {
    out << r.eps << ',' << r.omega << ',' << r.sup_u_minus_bar << ',' << r.sup_boundary_u_minus_g
        << ',' << r.min_g_eps << ',' << r.max_g_eps << '\n';
  }
}

}  // namespace vmoidx
