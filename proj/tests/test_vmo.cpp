#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "vmoidx/error.hpp"
#include "vmoidx/vmo.hpp"

using namespace vmoidx;

namespace {

constexpr double kPi = std::numbers::pi;

AmbientField planar(std::function<Vec2(double, double)> f) {
  return [f](const SurfacePoint& x) {
    const Vec2 w = f(x.position.x(), x.position.y());
    return Vec3(w.x(), w.y(), 0.0);
  };
}

SurfacePoint disk_point(const Surface& disk, double x, double y) { return disk.point(0, Vec2(x, y)); }

// (-y, x) / |x|: bounded, tangential on the circle, winding 1 about the origin.
VmoField singular_vortex(const Surface& disk) {
  VmoField f;
  f.values = [](const SurfacePoint& p) {
    const double r = p.position.head<2>().norm();
    if (r < 1e-300) return Vec3(0, 0, 0);
    return Vec3(-p.position.y() / r, p.position.x() / r, 0.0);
  };
  f.trace.curves = {[](double t) { return Vec3(-std::sin(t), std::cos(t), 0.0); }};
  f.label = "vortex";
  (void)disk;
  return f;
}

int boundary_winding(const VmoField& f) {
  const int n = 20000;
  double total = 0.0;
  Vec3 prev = f.trace.curves[0](0.0);
  for (int k = 1; k <= n; ++k) {
    const Vec3 cur = f.trace.curves[0](2 * kPi * k / n);
    total += std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.head<2>().dot(cur.head<2>()));
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

}  // namespace

TEST_CASE("ball averages") {
  const Surface disk = make_disk();
  const SurfacePoint o = disk_point(disk, 0, 0);
  const Vec3 c(0.3, -1.2, 0.0);
  CHECK((ball_average(disk, [c](const SurfacePoint&) { return c; }, o, 0.1) - c).norm() < 1e-14);
  CHECK(ball_average(disk, planar([](double x, double y) { return Vec2(x, y); }), o, 0.1).norm() < 1e-14);
  for (double eps : {0.2, 0.1, 0.05}) {
    // Mean of x^2 over the disc of radius eps is eps^2 / 4.
    const Vec3 m = ball_average(disk, planar([](double x, double) { return Vec2(x * x, 0); }), o, eps);
    CHECK(m.x() == doctest::Approx(eps * eps / 4).epsilon(1e-12));
    CHECK(std::abs(m.y()) < 1e-15);
  }
  CHECK_THROWS_AS(ball_average(disk, planar([](double, double) { return Vec2(1, 0); }),
                               disk_point(disk, 0.9, 0), 0.1),
                  Error);
}

TEST_CASE("BMO modulus") {
  const Surface disk = make_disk();
  std::vector<SurfacePoint> grid = sample_points(disk, 12);
  for (double y : {-0.5, -0.2, 0.0, 0.3, 0.6}) grid.push_back(disk_point(disk, 0.0, y));
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};

  const auto zero = bmo_modulus(disk, [](const SurfacePoint&) { return Vec3(1, 2, 0); }, eps, grid);
  for (double w : zero.omega) CHECK(w < 1e-14);

  const auto lip = bmo_modulus(disk, planar([](double x, double y) { return Vec2(x, y); }), eps, grid);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    CHECK(lip.omega[k] <= 2 * eps[k]);
    // The mean of |x - x0| over a disc of radius eps is 2 eps / 3.
    CHECK(lip.omega[k] == doctest::Approx(2 * eps[k] / 3).epsilon(1e-6));
  }

  // Two half-disk values: the jump is 2, half-ball oscillation stays >= 1.
  const AmbientField sign = planar([](double x, double) { return Vec2(0, x >= 0 ? 1.0 : -1.0); });
  const auto jump = bmo_modulus(disk, sign, eps, grid);
  for (double w : jump.omega) CHECK(w >= 1.0 - 1e-12);

  // A mollified field is continuous, so its modulus vanishes with the radius.
  const MollifiedField m = mollify(disk, singular_vortex(disk), 0.05);
  const auto inner = bmo_modulus(disk, m.raw, {0.04, 0.02, 0.01, 0.005}, grid);
  for (std::size_t k = 1; k < inner.omega.size(); ++k) CHECK(inner.omega[k] < inner.omega[k - 1]);
  CHECK(inner.omega.back() < 0.2 * inner.omega.front());
  // The raw vortex is not: balls centred at the origin always see a full turn.
  const auto raw = bmo_modulus(disk, singular_vortex(disk).values, {0.04, 0.02, 0.01, 0.005}, grid);
  for (double w : raw.omega) CHECK(w > 0.9);
}

TEST_CASE("standard extension on the collar") {
  const Surface disk = make_disk();
  BoundaryDatum g{{[](double t) { return Vec3(std::cos(2 * t), 0.5, 0.0); }}, "g"};
  const double w = disk.collar_width();
  const CollarField G = standard_extension_G(disk, g, w);
  for (double t : {0.0, 1.0, 4.0}) {
    CHECK((G(0, t, 0.0) - g.curves[0](t)).norm() < 1e-15);
    CHECK((G(0, t, 0.25 * w) - g.curves[0](t)).norm() < 1e-15);
    CHECK((G(0, t, -0.25 * w) - g.curves[0](t)).norm() < 1e-15);
    CHECK(G(0, t, 1.01 * w).norm() == 0.0);
    CHECK(G(0, t, -w).norm() == 0.0);
  }
  CHECK(collar_cutoff(0.75) > 0.0);
  CHECK(collar_cutoff(0.75) < 1.0);
  CHECK_THROWS_AS(standard_extension_G(disk, g, 2 * w), Error);
}

TEST_CASE("mollified fields") {
  const Surface disk = make_disk();
  const TangentField v2([](const SurfacePoint& x) { return Vec3(-x.position.y(), x.position.x(), 0); }, "v2");
  const VmoField f2 = vmo_field(disk, v2);
  for (double eps : {0.1, 0.05}) {
    const MollifiedField m = mollify(disk, f2, eps);
    // Linear field, centred discs: the mean is the centre value.
    for (const auto& p : sample_points(disk, 10)) {
      if (disk.distance_to_boundary(p) < 2 * eps) continue;
      CHECK((m.u_eps(p) - v2(p)).norm() < 1e-12);
    }
  }

  // Continuous nowhere-vanishing field: |u_eps| >= min |v| / 2.
  const TangentField w([](const SurfacePoint& x) {
    return Vec3(0.3 * x.position.x(), 1.0 + 0.3 * x.position.y(), 0.0);
  });
  const MollifiedField mw = mollify(disk, vmo_field(disk, w), 0.05);
  for (const auto& p : sample_points(disk, 16)) CHECK(mw.u_eps(p).norm() >= 0.35);
  for (int k = 0; k < 64; ++k) CHECK(mw.u_eps(disk.boundary()[0].point(2 * kPi * k / 64)).norm() >= 0.35);

  // Datum with 1 <= |g| <= 3 stays within delta of those bounds for small eps.
  BoundaryDatum g{{[](double t) { return Vec3((2 + std::sin(3 * t)) * Vec3(-std::sin(t), std::cos(t), 0)); }},
                  "g"};
  VmoField fg{[](const SurfacePoint&) { return Vec3(0, 0, 0); }, g, "g"};
  const double delta = 0.01;
  for (double eps : {0.05, 0.025, 0.0125}) {
    const MollifiedField m = mollify(disk, fg, eps);
    const NormRange r = datum_norm_range(disk, m.g_eps, 2048);
    CHECK(r.min >= 1 - delta);
    CHECK(r.max <= 3 + delta);
  }
  CHECK_THROWS_AS(mollify(disk, f2, 0.5), Error);
}

TEST_CASE("VMO index of continuous fields matches the continuous index") {
  const Surface disk = make_disk();
  const TangentField v3([](const SurfacePoint& x) { return Vec3(x.position.y(), x.position.x(), 0); }, "v3");
  const auto res = vmo_index(disk, vmo_field(disk, v3), default_eps_grid(disk));
  CHECK(res.certified);
  CHECK(res.report.ind == -1);
  CHECK(res.report.ind_minus == 2);
  CHECK(res.report.morse_residual == 0);
  CHECK(res.report.ind == index_continuous(disk, v3));
  for (const auto& e : res.entries) CHECK(e.residual == 0);

  const Surface torus = make_torus();
  const TangentField around([](const SurfacePoint& x) { return Vec3(-x.position.y(), x.position.x(), 0); },
                            "longitude");
  const auto rt = vmo_index(torus, vmo_field(torus, around), {torus.r0() / 8, torus.r0() / 64});
  CHECK(rt.certified);
  CHECK(rt.report.ind == 0);
  CHECK(rt.report.morse_residual == 0);
}

TEST_CASE("VMO index of a bounded point-singular field") {
  const Surface disk = make_disk();
  const VmoField f = singular_vortex(disk);
  const int oracle = boundary_winding(f);
  CHECK(oracle == 1);
  std::vector<double> grid;
  for (int k = 3; k <= 6; ++k) grid.push_back(disk.r0() / std::pow(2.0, k));
  const auto res = vmo_index(disk, f, grid);
  CHECK(res.certified);
  CHECK(res.report.ind == oracle);
  CHECK(res.report.ind_minus == 0);
  CHECK(res.report.morse_residual == 0);
}

TEST_CASE("certificate over the eps grid") {
  const Surface disk = make_disk();
  // Radial datum with an extra full turn packed into an arc of length 0.1
  // near theta = pi. Large eps averages the turn away.
  const double delta = 0.1;
  auto phi = [delta](double t) {
    t = std::fmod(t, 2 * kPi);
    if (t < 0) t += 2 * kPi;
    const double u = std::clamp((t - kPi) / delta, 0.0, 1.0);
    return t + 2 * kPi * u * u * (3 - 2 * u);
  };
  VmoField f;
  f.values = [phi](const SurfacePoint& x) {
    const double r = x.position.head<2>().norm();
    const double a = phi(std::atan2(x.position.y(), x.position.x()));
    return Vec3(r * std::cos(a), r * std::sin(a), 0);
  };
  f.trace.curves = {[phi](double t) { return Vec3(std::cos(phi(t)), std::sin(phi(t)), 0); }};
  VmoOptions opts;
  opts.index.search.roots.grid = 256;
  const auto res = vmo_index(disk, f, default_eps_grid(disk), opts);
  CHECK(res.certified);
  CHECK(res.report.ind == 2);
  CHECK(res.report.ind_minus == -1);
  CHECK(res.report.morse_residual == 0);
  CHECK(res.entries.front().ind == 1);  // eps = r0 / 2 is beyond the constancy range

  opts.certificate_tail = 6;
  try {
    vmo_index(disk, f, default_eps_grid(disk), opts);
    FAIL("expected NotConstantOverGrid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConstantOverGrid);
  }
}

TEST_CASE("mollification error diagnostics") {
  const Surface sphere = make_sphere();
  // Tangential part of a constant: zeros at the poles, not rotation-equivariant.
  const TangentField up([](const SurfacePoint&) { return Vec3(0.2, 0, 1); });
  const auto grid = default_eps_grid(sphere);
  const auto rows = vmo_diagnostics(sphere, vmo_field(sphere, up), grid, {}, 16, 64);
  int violations = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) violations += rows[k].sup_u_minus_bar > rows[k - 1].sup_u_minus_bar;
  CHECK(violations <= 1);
  CHECK(rows.front().sup_u_minus_bar >= 10 * rows.back().sup_u_minus_bar);

  const Surface disk = make_disk();
  const TangentField v3([](const SurfacePoint& x) { return Vec3(x.position.y(), x.position.x(), 0); });
  const auto drows = vmo_diagnostics(disk, vmo_field(disk, v3), default_eps_grid(disk), {}, 16, 128);
  for (const auto& r : drows) CHECK(r.sup_u_minus_bar < 1e-14);  // flat: projection is the identity
  CHECK(drows.front().sup_boundary_u_minus_g >= 10 * drows.back().sup_boundary_u_minus_g);
  for (const auto& r : drows) {
    CHECK(r.min_g_eps > 0.9);
    CHECK(r.max_g_eps < 1.1);
  }
  std::ostringstream csv;
  write_diagnostics_csv(csv, drows);
  const std::string text = csv.str();
  CHECK(text.rfind("eps,omega,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("boundary density on the doubled collar") {
  const Surface disk = make_disk();
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
  for (const auto& e : boundary_density_check(disk, 0, 0.7, eps)) CHECK(e.deviation < 1e-12);
  const auto wide = boundary_density_check(disk, 0, 0.0, {disk.collar_width()});
  CHECK(wide[0].ratio > 0.0);
  CHECK(wide[0].ratio < 1.0);

  // In the plane the outside share of a disc centred on the unit circle is
  // 1 - lens / (pi eps^2), the lens being its intersection with the unit disk.
  for (const auto& e : planar_density_check(disk, 0, 0.3, eps)) {
    const double r = e.eps;
    const double lens = r * r * std::acos(r / 2) + std::acos(1 - r * r / 2) -
                        0.5 * std::sqrt((-r + 2) * r * r * (r + 2));
    CHECK(e.ratio == doctest::Approx(1 - lens / (kPi * r * r)).epsilon(1e-9));
  }
  const double slope = loglog_slope(planar_density_check(disk, 0, 0.3, eps));
  CHECK(slope == doctest::Approx(1.0).epsilon(0.05));
}
