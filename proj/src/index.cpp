#include "vmoidx/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "vmoidx/error.hpp"

namespace vmoidx {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double periodic_delta(double a, double period) {
  double d = std::fmod(a, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

double chart_distance(const Chart& c, const Vec2& a, const Vec2& b) {
  double du = a.x() - b.x(), dv = a.y() - b.y();
  if (c.periodic_u()) du = periodic_delta(du, c.domain().width());
  if (c.periodic_v()) dv = periodic_delta(dv, c.domain().height());
  return std::hypot(du, dv);
}

std::optional<Vec2> uv_in_chart(const Surface& s, const SurfacePoint& x, int chart) {
  if (x.chart == chart) return x.uv;
  try {
    return s.to_chart(x, chart).uv;
  } catch (const Error&) {
    return std::nullopt;
  }
}

void require_datum_shape(const std::vector<BoundaryCurve>& curves, const BoundaryDatum& g) {
  if (g.curves.size() != curves.size())
    fail(ErrorCode::ConfigError, "datum has " + std::to_string(g.curves.size()) +
                                     " curves, expected " + std::to_string(curves.size()));
}

NormRange curve_norm_range(const BoundaryDatum& g, int samples) {
  NormRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& gc : g.curves) {
    for (int k = 0; k < samples; ++k) {
      const double n = gc(kTwoPi * k / samples).norm();
      r.min = std::min(r.min, n);
      r.max = std::max(r.max, n);
    }
  }
  return r;
}

double datum_max_norm(const BoundaryDatum& g, int samples) {
  const NormRange r = curve_norm_range(g, samples);
  if (r.min <= 1e-9)
    fail(ErrorCode::VanishingOnBoundary,
         "boundary datum vanishes (min |g| = " + std::to_string(r.min) + ")");
  return r.max;
}

struct ContinuousResult {
  int index = 0;
  std::vector<Zero> zeros;
  bool perturbed = false;
  TangentField field;
};

ContinuousResult continuous_index(const Surface& s, const TangentField& v, const IndexOptions& opts) {
  ContinuousResult out;
  out.field = v;
  try {
    out.index = index_transverse(s, v, out.zeros, opts);
    return out;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateZero && e.code() != ErrorCode::ClusterUnresolved) throw;
  }
  double budget;
  if (s.closed()) {
    // Any small perturbation preserves the total on a closed surface.
    budget = 0.05 * interior_norm_range(s, v).max;
  } else {
    budget = opts.budget_fraction * boundary_norm_range(s, v, opts.boundary_samples).min;
  }
  PerturbOptions popts;
  popts.max_retries = opts.perturb_retries;
  popts.search = opts.search;
  if (opts.seeds.empty()) fail(ErrorCode::ConfigError, "no perturbation seeds");
  bool first = true;
  for (std::uint64_t seed : opts.seeds) {
    const TangentField u = transverse_perturb(s, v, budget, seed, popts);
    std::vector<Zero> zeros;
    const int ind = index_transverse(s, u, zeros, opts);
    if (first) {
      out.index = ind;
      out.zeros = std::move(zeros);
      out.field = u;
      first = false;
    } else if (ind != out.index) {
      fail(ErrorCode::UnderResolved, "perturbed index depends on the seed (" +
                                         std::to_string(out.index) + " vs " + std::to_string(ind) + ")");
    }
  }
  out.perturbed = true;
  return out;
}

// 1D index of tau over (a, b): zeros from sign changes on a sample grid.
int arc_index(const std::function<double(double)>& tau, const std::function<double(double)>& speed,
              double a, double b, int samples, double tol, double jac_tol) {
  const int n = std::max(16, samples);
  std::vector<double> vals(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) vals[static_cast<std::size_t>(k)] = tau(a + (b - a) * k / n);
  int total = 0;
  for (int k = 0; k < n; ++k) {
    const double fa = vals[static_cast<std::size_t>(k)], fb = vals[static_cast<std::size_t>(k) + 1];
    if (!((fa < 0 && fb >= 0) || (fa > 0 && fb <= 0))) continue;
    double lo = a + (b - a) * k / n, hi = a + (b - a) * (k + 1) / n;
    const bool rising = fa < 0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = tau(mid);
      if ((fm < 0) == rising && fm != 0) lo = mid;
      else hi = mid;
    }
    const double root = 0.5 * (lo + hi);
    constexpr double h = 1e-6;
    const double d = (tau(root + h) - tau(root - h)) / (2 * h);
    if (std::abs(d) / speed(root) <= jac_tol)
      fail(ErrorCode::DegenerateBoundaryZero, "tangential zero with vanishing derivative at theta = " +
                                                  std::to_string(root));
    total += d > 0 ? 1 : -1;
  }
  return total;
}

}  // namespace

bool InwardBoundaryRegion::empty() const {
  return std::all_of(arcs.begin(), arcs.end(), [](const auto& a) { return a.empty(); });
}

int planar_winding_index(const std::function<Vec2(const Vec2&)>& f, const Vec2& c, double r) {
  return winding_number([&](double t) { return f(c + r * Vec2(std::cos(t), std::sin(t))); });
}

double default_winding_radius(const Surface& s, const Zero& z, const std::vector<Zero>& others) {
  const Chart& c = s.chart(z.location.chart);
  const Rect& d = c.domain();
  const Vec2 uv = z.location.uv;
  double r = 0.25 * std::min(d.width(), d.height());
  if (!c.periodic_u()) r = std::min(r, 0.9 * std::min(uv.x() - d.u0, d.u1 - uv.x()));
  if (!c.periodic_v()) r = std::min(r, 0.9 * std::min(uv.y() - d.v0, d.v1 - uv.y()));
  for (const auto& o : others) {
    if ((o.location.position - z.location.position).norm() < 1e-12) continue;
    if (auto w = uv_in_chart(s, o.location, z.location.chart)) {
      r = std::min(r, 0.5 * chart_distance(c, uv, *w));
    }
  }
  if (!s.closed()) {
    // Metric distance to chart units through the largest metric eigenvalue.
    const double lmax = c.metric(uv).selfadjointView<Eigen::Upper>().eigenvalues().maxCoeff();
    r = std::min(r, 0.5 * s.distance_to_boundary(z.location) / std::sqrt(lmax));
  }
  return r;
}

int index_winding(const Surface& s, const TangentField& v, const Zero& z, double r,
                  const std::vector<Zero>& others) {
  const int cid = z.location.chart;
  const Chart& c = s.chart(cid);
  for (const auto& o : others) {
    if ((o.location.position - z.location.position).norm() < 1e-12) continue;
    if (auto w = uv_in_chart(s, o.location, cid)) {
      if (chart_distance(c, z.location.uv, *w) <= r)
        fail(ErrorCode::BallContainsOtherZero, "winding circle encloses another zero");
    }
  }
  return winding_number(
      [&](double t) { return pushforward(s, cid, v, z.location.uv + r * Vec2(std::cos(t), std::sin(t))); });
}

int index_transverse(const Surface& s, const TangentField& v, std::vector<Zero>& zeros,
                     const IndexOptions& opts) {
  zeros = find_zeros(s, v, opts.search);
  int total = 0;
  for (const auto& z : zeros) {
    if (!z.nondegenerate)
      fail(ErrorCode::DegenerateZero, "zero with |det| = " +
                                          std::to_string(std::abs(z.chart_jacobian.determinant())));
    const int w = index_winding(s, v, z, default_winding_radius(s, z, zeros), zeros);
    if (w != z.sign)
      fail(ErrorCode::UnderResolved, "Jacobian sign and local winding disagree at a zero");
    total += z.sign;
  }
  return total;
}

int index_transverse(const Surface& s, const TangentField& v, const IndexOptions& opts) {
  std::vector<Zero> zeros;
  return index_transverse(s, v, zeros, opts);
}

int index_continuous(const Surface& s, const TangentField& v, const IndexOptions& opts) {
  return continuous_index(s, v, opts).index;
}

int index_continuous(const Surface& s, const TangentField& v, std::vector<Zero>& zeros,
                     const IndexOptions& opts) {
  ContinuousResult cr = continuous_index(s, v, opts);
  zeros = std::move(cr.zeros);
  return cr.index;
}

InwardBoundaryRegion inward_boundary_region(const Surface& s, const BoundaryDatum& g,
                                            const IndexOptions& opts) {
  return inward_boundary_region(s.boundary(), g, opts);
}

InwardBoundaryRegion inward_boundary_region(const std::vector<BoundaryCurve>& curves,
                                            const BoundaryDatum& g, const IndexOptions& opts) {
  require_datum_shape(curves, g);
  InwardBoundaryRegion region;
  region.band = opts.band_relative * datum_max_norm(g, opts.boundary_samples);
  const int n = opts.boundary_samples;
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const BoundaryCurve& curve = curves[ci];
    const auto& gc = g.curves[ci];
    auto normal_part = [&](double th) { return gc(th).dot(curve.conormal(th)); };
    std::vector<char> inside(static_cast<std::size_t>(n));
    int count = 0;
    for (int k = 0; k < n; ++k) {
      inside[static_cast<std::size_t>(k)] = normal_part(kTwoPi * k / n) < -region.band;
      count += inside[static_cast<std::size_t>(k)];
    }
    std::vector<Arc> arcs;
    if (count == n) {
      arcs.push_back({0.0, kTwoPi});
    } else if (count > 0) {
      // Bisect between an outside node and an inside node.
      auto edge = [&](double out_t, double in_t) {
        while (std::abs(in_t - out_t) > opts.bisection_tol) {
          const double mid = 0.5 * (out_t + in_t);
          if (normal_part(mid) < -region.band) in_t = mid;
          else out_t = mid;
        }
        return 0.5 * (out_t + in_t);
      };
      int k0 = 0;
      while (inside[static_cast<std::size_t>(k0)]) ++k0;  // start on an outside node
      for (int step = 0; step < n; ++step) {
        const int k = (k0 + step) % n;
        const int next = (k + 1) % n;
        if (!inside[static_cast<std::size_t>(k)] && inside[static_cast<std::size_t>(next)]) {
          const double t_out = kTwoPi * (k0 + step) / n;
          const double start = edge(t_out, t_out + kTwoPi / n);
          int len = 1;
          while (inside[static_cast<std::size_t>((next + len) % n)]) ++len;
          const double t_last = t_out + kTwoPi * len / n;
          const double end = edge(t_last + kTwoPi / n, t_last);
          double a = std::fmod(start, kTwoPi);
          if (a < 0) a += kTwoPi;
          arcs.push_back({a, a + (end - start)});
        }
      }
      std::sort(arcs.begin(), arcs.end(),
                [](const Arc& x, const Arc& y) { return x.theta_start < y.theta_start; });
    }
    region.arcs.push_back(std::move(arcs));
  }
  return region;
}

InwardBoundaryRegion inward_boundary_region(const Surface& s, const TangentField& v,
                                            const IndexOptions& opts) {
  return inward_boundary_region(s, trace(s, v), opts);
}

int inward_boundary_index(const Surface& s, const BoundaryDatum& g, const IndexOptions& opts) {
  return inward_boundary_index(s.boundary(), g, opts);
}

int inward_boundary_index(const std::vector<BoundaryCurve>& curves, const BoundaryDatum& g,
                          const IndexOptions& opts) {
  const InwardBoundaryRegion region = inward_boundary_region(curves, g, opts);
  const double gmax = datum_max_norm(g, opts.boundary_samples);
  const double jac_tol = opts.search.roots.jac_tol;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> U(0.5, 1.0);
  double shift = 0.0;
  for (int attempt = 0;; ++attempt) {
    try {
      int total = 0;
      for (std::size_t ci = 0; ci < region.arcs.size(); ++ci) {
        const BoundaryCurve& curve = curves[ci];
        const auto& gc = g.curves[ci];
        auto tau = [&](double th) { return gc(th).dot(curve.tangent(th).normalized()) + shift; };
        for (const Arc& arc : region.arcs[ci]) {
          const double len = arc.theta_end - arc.theta_start;
          const int m = static_cast<int>(std::ceil(opts.boundary_samples * len / kTwoPi));
          if (len >= kTwoPi) {
            // Whole curve inward: a closed loop, count every crossing.
            total += arc_index(tau, curve.speed, 0.0, kTwoPi, m, opts.bisection_tol, jac_tol);
          } else {
            total += arc_index(tau, curve.speed, arc.theta_start, arc.theta_end, m,
                               opts.bisection_tol, jac_tol);
          }
        }
      }
      return total;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateBoundaryZero || attempt >= 5) throw;
    }
    // Shift the tangential component by a tiny constant; simple zeros are
    // stable and a degenerate one splits into a pair or disappears.
    shift = (rng() % 2 ? 1.0 : -1.0) * 1e-7 * gmax * U(rng);
  }
}

int inward_boundary_index(const Surface& s, const TangentField& v, const IndexOptions& opts) {
  return inward_boundary_index(s, trace(s, v), opts);
}

double stability_radius(const Surface& s, const BoundaryDatum& g, int samples) {
  require_datum_shape(s.boundary(), g);
  if (s.closed()) fail(ErrorCode::ConfigError, "stability radius needs a boundary");
  const NormRange r = curve_norm_range(g, samples);
  if (r.min <= 1e-9) fail(ErrorCode::VanishingOnBoundary, "field vanishes on the boundary");
  return (std::sqrt(5.0) - 1.0) / 4.0 * r.min;
}

double stability_radius(const Surface& s, const TangentField& v, int samples) {
  return stability_radius(s, trace(s, v), samples);
}

IndexReport morse_check(const Surface& s, const TangentField& v, const IndexOptions& opts) {
  IndexReport rep;
  rep.chi = s.euler_characteristic();
  const ContinuousResult cr = continuous_index(s, v, opts);
  rep.ind = cr.index;
  rep.zeros = cr.zeros;
  rep.diagnostics["perturbed"] = cr.perturbed ? "true" : "false";
  rep.diagnostics["zero_count"] = std::to_string(cr.zeros.size());
  if (!s.closed()) {
    const BoundaryDatum g = trace(s, v);
    const InwardBoundaryRegion region = inward_boundary_region(s, g, opts);
    std::size_t arcs = 0;
    for (const auto& a : region.arcs) arcs += a.size();
    rep.diagnostics["inward_arcs"] = std::to_string(arcs);
    rep.ind_minus = inward_boundary_index(s, g, opts);
    rep.epsilon1 = stability_radius(s, g, opts.boundary_samples);
  } else {
    rep.diagnostics["inward_arcs"] = "0";
  }
  rep.morse_residual = rep.chi - rep.ind - rep.ind_minus;
  return rep;
}

ExcisionResult excision_check(const Surface& s, const TangentField& v, const Region& u,
                              const Region& u1, const Region& u2, const IndexOptions& opts) {
  const ContinuousResult cr = continuous_index(s, v, opts);
  ExcisionResult res;
  for (const auto& z : cr.zeros) {
    if (!u(z.location)) continue;
    const bool in1 = u1 && u1(z.location);
    const bool in2 = u2 && u2(z.location);
    if (in1 && in2) fail(ErrorCode::ConfigError, "excision subregions overlap at a zero");
    if (!in1 && !in2) fail(ErrorCode::ZeroOutsideSubregions, "zero outside both subregions");
    const int w = index_winding(s, cr.field, z, default_winding_radius(s, z, cr.zeros), cr.zeros);
    res.ind_total += w;
    (in1 ? res.ind_u1 : res.ind_u2) += w;
  }
  res.holds = res.ind_total == res.ind_u1 + res.ind_u2;
  return res;
}

}  // namespace vmoidx
