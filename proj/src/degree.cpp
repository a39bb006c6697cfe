#include "vmoidx/degree.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "vmoidx/error.hpp"
#include "vmoidx/parallel.hpp"

namespace vmoidx {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double angular_velocity(const CircleMap& phi, double th) {
  constexpr double h = 1e-5;
  const Vec2 d = (phi.evaluate(th + h) - phi.evaluate(th - h)) / (2 * h);
  return cross2(phi.evaluate(th), d);
}

// Right-handed orthonormal (e1, e2) with e1 x e2 = p.
std::pair<Vec3, Vec3> frame_for(const Vec3& p) {
  const Vec3 a = std::abs(p.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (a - a.dot(p) * p).normalized();
  return {e1, p.cross(e1)};
}

Vec3 random_tilt(const Vec3& p, std::mt19937_64& rng, double max_angle) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto [e1, e2] = frame_for(p);
  const double dir = kTwoPi * U(rng);
  const double ang = max_angle * U(rng);
  return (std::cos(ang) * p + std::sin(ang) * (std::cos(dir) * e1 + std::sin(dir) * e2)).normalized();
}

void check_integer(double value, const std::string& what) {
  if (std::abs(value - std::round(value)) > 1e-3)
    fail(ErrorCode::NonIntegerResult, what + " = " + std::to_string(value));
}

}  // namespace

CircleMap power_map(int k) {
  return {[k](double th) { return Vec2(std::cos(k * th), std::sin(k * th)); },
          "z^" + std::to_string(k)};
}

SphereMap identity_map(const Surface& sphere) {
  return {std::make_shared<const Surface>(sphere),
          [](const SurfacePoint& x) { return Vec3(x.position.normalized()); }, "identity"};
}

SphereMap antipodal_map(const Surface& sphere) {
  return {std::make_shared<const Surface>(sphere),
          [](const SurfacePoint& x) { return Vec3(-x.position.normalized()); }, "antipodal"};
}

SphereMap gauss_map(const Surface& s) {
  return {std::make_shared<const Surface>(s), [](const SurfacePoint& x) { return x.normal; },
          "gauss-map"};
}

SphereMap constant_map(const Surface& s, const Vec3& value) {
  const Vec3 v = value.normalized();
  return {std::make_shared<const Surface>(s), [v](const SurfacePoint&) { return v; }, "constant"};
}

int degree_preimage(const CircleMap& phi, const Vec2& p_in, const DegreeOptions& opts) {
  const Vec2 p = p_in.normalized();
  const int n = opts.circle_grid;
  // Offset grid so that targets at round angles do not sit on a node.
  const double t0 = 0.318309886 * kTwoPi / n;
  auto node = [&](int k) { return t0 + kTwoPi * k / n; };
  std::vector<double> psi(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k < n; ++k) {
    const Vec2 f = phi.evaluate(node(k));
    psi[static_cast<std::size_t>(k)] = cross2(f, p);
    if (psi[static_cast<std::size_t>(k)] == 0.0 && f.dot(p) > 0 &&
        std::abs(angular_velocity(phi, node(k))) <= opts.roots.jac_tol)
      fail(ErrorCode::NotRegularValue, "critical preimage of the target point");
  }
  psi.back() = psi.front();
  int degree = 0;
  for (int k = 0; k < n; ++k) {
    const double a = psi[static_cast<std::size_t>(k)], b = psi[static_cast<std::size_t>(k) + 1];
    if (!((a < 0 && b >= 0) || (a > 0 && b <= 0))) continue;
    double lo = node(k), hi = node(k + 1);
    double flo = a;
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = cross2(phi.evaluate(mid), p);
      if ((fm < 0) == (flo < 0) && fm != 0) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double root = 0.5 * (lo + hi);
    if (phi.evaluate(root).dot(p) <= 0) continue;
    const double w = angular_velocity(phi, root);
    if (std::abs(w) <= opts.roots.jac_tol)
      fail(ErrorCode::NotRegularValue, "critical preimage of the target point");
    degree += w > 0 ? 1 : -1;
  }
  return degree;
}

int degree_preimage(const SphereMap& phi, const Vec3& p_in, const DegreeOptions& opts) {
  const Surface& s = *phi.domain;
  if (!s.closed()) fail(ErrorCode::BoundaryPresent, "preimage degree needs a closed domain");
  const Vec3 p = p_in.normalized();
  const auto [e1, e2] = frame_for(p);
  struct Pre {
    Vec3 position;
    int sign;
  };
  std::vector<Pre> found;
  for (int cid : s.scan_charts()) {
    const Chart& chart = s.chart(cid);
    ChartFunction f = [&, cid](const Vec2& uv) -> std::optional<Vec2> {
      const Vec3 y = phi.evaluate(chart_point(chart, cid, uv));
      if (y.dot(p) <= 0) return std::nullopt;
      return Vec2(y.dot(e1), y.dot(e2));
    };
    const RootSearchResult res = locate_roots(chart, f, opts.roots);
    for (const auto& r : res.roots) {
      if (!chart.owns(r.uv)) continue;
      const Vec3 pos = chart.embed(r.uv);
      bool dup = false;
      for (const auto& q : found) dup = dup || (q.position - pos).norm() < opts.roots.separation_tol;
      if (dup) continue;
      const double det = r.jacobian.determinant();
      if (std::abs(det) <= opts.roots.jac_tol)
        fail(ErrorCode::NotRegularValue, "critical preimage of the target point");
      found.push_back({pos, chart.orientation() * (det > 0 ? 1 : -1)});
    }
    for (const Vec2& c : res.unresolved) {
      if (chart.owns(c)) fail(ErrorCode::NotRegularValue, "unresolved preimage cluster");
    }
  }
  int degree = 0;
  for (const auto& q : found) degree += q.sign;
  return degree;
}

int degree_preimage_retry(const CircleMap& phi, const Vec2& p, std::uint64_t seed,
                          const DegreeOptions& opts, int max_retries, double max_angle) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-max_angle, max_angle);
  Vec2 q = p.normalized();
  for (int attempt = 0;; ++attempt) {
    try {
      return degree_preimage(phi, q, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotRegularValue || attempt >= max_retries) throw;
    }
    const double a = U(rng);
    q = Vec2(std::cos(a) * p.x() - std::sin(a) * p.y(), std::sin(a) * p.x() + std::cos(a) * p.y())
            .normalized();
  }
}

int degree_preimage_retry(const SphereMap& phi, const Vec3& p, std::uint64_t seed,
                          const DegreeOptions& opts, int max_retries, double max_angle) {
  std::mt19937_64 rng(seed);
  Vec3 q = p.normalized();
  for (int attempt = 0;; ++attempt) {
    try {
      return degree_preimage(phi, q, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotRegularValue || attempt >= max_retries) throw;
    }
    q = random_tilt(p.normalized(), rng, max_angle);
  }
}

double degree_integral(const CircleMap& phi, int n) {
  double total = 0.0;
  for (int k = 0; k < n; ++k) total += angular_velocity(phi, kTwoPi * (k + 0.5) / n);
  const double deg = total / n;
  check_integer(deg, "circle degree integral");
  return deg;
}

double degree_integral(const SphereMap& phi, const QuadratureSpec& quad) {
  const Surface& s = *phi.domain;
  if (!s.closed()) fail(ErrorCode::BoundaryPresent, "degree integral needs a closed domain");
  constexpr double h = 1e-5;
  double total = 0.0;
  for (int pid : s.patches()) {
    const Chart& c = s.chart(pid);
    const Rect& d = c.domain();
    const Rule1D ru = c.periodic_u() ? periodic_trapezoid(quad.n_u, d.u0, d.u1)
                                     : gauss_legendre(quad.n_u, d.u0, d.u1);
    const Rule1D rv = c.periodic_v() ? periodic_trapezoid(quad.n_v, d.v0, d.v1)
                                     : gauss_legendre(quad.n_v, d.v0, d.v1);
    std::vector<double> rows(ru.size(), 0.0);
    parallel_for(ru.size(), [&](std::size_t i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < rv.size(); ++j) {
        const Vec2 uv(ru.nodes[i], rv.nodes[j]);
        auto at = [&](const Vec2& q) { return phi.evaluate(chart_point(c, pid, q)); };
        const Vec3 y = at(uv);
        const Vec3 yu = (at(uv + Vec2(h, 0)) - at(uv - Vec2(h, 0))) / (2 * h);
        const Vec3 yv = (at(uv + Vec2(0, h)) - at(uv - Vec2(0, h))) / (2 * h);
        acc += rv.weights[j] * y.dot(yu.cross(yv));
      }
      rows[i] = ru.weights[i] * acc;
    });
    double patch = 0.0;
    for (double r : rows) patch += r;
    total += c.orientation() * patch;
  }
  const double deg = total / (4 * kPi);
  check_integer(deg, "sphere degree integral");
  return deg;
}

HomotopyTrace homotopy_degrees(const Surface& domain,
                               const std::function<Vec3(const SurfacePoint&, double)>& H,
                               double t0, double t1, int steps, const QuadratureSpec& quad) {
  HomotopyTrace trace;
  auto surf = std::make_shared<const Surface>(domain);
  // Sup-norm differences are sampled on a coarse patch grid.
  std::vector<SurfacePoint> probes;
  for (int pid : domain.patches()) {
    const Rect& d = domain.chart(pid).domain();
    for (int i = 0; i < 48; ++i)
      for (int j = 0; j < 48; ++j)
        probes.push_back(domain.point(pid, Vec2(d.u0 + d.width() * (i + 0.5) / 48,
                                                d.v0 + d.height() * (j + 0.5) / 48)));
  }
  std::vector<Vec3> prev;
  for (int k = 0; k <= steps; ++k) {
    const double t = t0 + (t1 - t0) * k / steps;
    SphereMap m{surf, [&H, t](const SurfacePoint& x) { return Vec3(H(x, t).normalized()); }, "H_t"};
    trace.times.push_back(t);
    trace.degrees.push_back(static_cast<int>(std::lround(degree_integral(m, quad))));
    std::vector<Vec3> cur;
    cur.reserve(probes.size());
    for (const auto& x : probes) cur.push_back(m.evaluate(x));
    if (!prev.empty()) {
      for (std::size_t i = 0; i < cur.size(); ++i)
        trace.max_step_difference = std::max(trace.max_step_difference, (cur[i] - prev[i]).norm());
    }
    prev = std::move(cur);
  }
  return trace;
}

}  // namespace vmoidx
