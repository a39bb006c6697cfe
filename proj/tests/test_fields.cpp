#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "vmoidx/error.hpp"
#include "vmoidx/fields.hpp"

using namespace vmoidx;

namespace {

constexpr double kPi = std::numbers::pi;

TangentField planar(std::function<Vec2(double, double)> f) {
  return TangentField([f](const SurfacePoint& x) {
    const Vec2 w = f(x.position.x(), x.position.y());
    return Vec3(w.x(), w.y(), 0.0);
  });
}

}  // namespace

TEST_CASE("winding numbers") {
  CHECK(winding_number([](double t) { return Vec2(std::cos(t), std::sin(t)); }) == 1);
  CHECK(winding_number([](double t) { return Vec2(std::cos(2 * t), -std::sin(2 * t)); }) == -2);
  CHECK(winding_number([](double) { return Vec2(1, 0); }) == 0);
  // Coarse sampling is refined automatically.
  CHECK(winding_number([](double t) { return Vec2(std::cos(40 * t), std::sin(40 * t)); }, 64) == 40);
  CHECK_THROWS_AS(winding_number([](double t) { return Vec2(std::cos(t) - 1, 0); }), Error);
}

TEST_CASE("pushforward") {
  const Surface disk = make_disk();
  const TangentField v1 = planar([](double, double) { return Vec2(0, 1); });
  CHECK((pushforward(disk, 0, v1, Vec2(0.2, 0.3)) - Vec2(0, 1)).norm() < 1e-15);
  const TangentField zero = planar([](double, double) { return Vec2(0, 0); });
  CHECK(pushforward(disk, 0, zero, Vec2(0.2, 0.3)).norm() == 0.0);
  CHECK_THROWS_AS(pushforward(disk, 0, v1, Vec2(2.0, 0)), Error);

  // At the equator d/dphi of the latitude-longitude chart is (0, 1, 0).
  const Surface sphere = make_sphere();
  const TangentField rot([](const SurfacePoint& x) { return Vec3(-x.position.y(), x.position.x(), 0); });
  const Vec2 c = pushforward(sphere, sphere.chart_index("latlong"), rot, Vec2(kPi / 2, 0.0));
  CHECK(std::abs(c.x()) < 1e-14);
  CHECK(std::abs(c.y() - 1.0) < 1e-14);
}

TEST_CASE("projection closure") {
  const Surface sphere = make_sphere();
  const TangentField w([](const SurfacePoint& x) { return Vec3(1.0 + x.position.z(), 2.0, -3.0); });
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 200; ++k) {
    const SurfacePoint p = sphere.point(k % 2, Vec2(U(rng), U(rng)));
    const Vec3 val = w(p);
    CHECK(std::abs(val.dot(p.normal)) <= 1e-10 * val.norm());
  }
}

TEST_CASE("zeros of the model fields on the disk") {
  const Surface disk = make_disk();
  const auto z2 = find_zeros(disk, planar([](double x, double y) { return Vec2(-y, x); }));
  REQUIRE(z2.size() == 1);
  CHECK(z2[0].location.position.norm() < 1e-9);
  CHECK(z2[0].sign == 1);
  CHECK(z2[0].nondegenerate);

  CHECK(find_zeros(disk, planar([](double, double) { return Vec2(0, 1); })).empty());

  const auto z3 = find_zeros(disk, planar([](double x, double y) { return Vec2(y, x); }));
  REQUIRE(z3.size() == 1);
  CHECK(z3[0].sign == -1);

  CHECK_THROWS_AS(find_zeros(disk, planar([](double x, double) { return Vec2(x, 0); })), Error);
}

TEST_CASE("zeros on closed surfaces sum to chi") {
  const Surface sphere = make_sphere();
  const TangentField rot([](const SurfacePoint& x) { return Vec3(-x.position.y(), x.position.x(), 0); });
  const auto zs = find_zeros(sphere, rot);
  REQUIRE(zs.size() == 2);
  for (const auto& z : zs) CHECK(z.sign == 1);

  // Gradient of the height function: two zeros of index +1 at the poles.
  const TangentField grad([](const SurfacePoint&) { return Vec3(0, 0, 1); });
  int sum = 0;
  for (const auto& z : find_zeros(sphere, grad)) sum += z.sign;
  CHECK(sum == 2);

  // Gradient of the height x on the torus: four zeros, signs + - - +.
  const Surface torus = make_torus();
  const TangentField tgrad([](const SurfacePoint&) { return Vec3(1, 0, 0); });
  const auto tz = find_zeros(torus, tgrad);
  CHECK(tz.size() == 4);
  sum = 0;
  for (const auto& z : tz) sum += z.sign;
  CHECK(sum == 0);
}

TEST_CASE("transverse perturbation") {
  const Surface disk = make_disk();
  const TangentField v2 = planar([](double x, double y) { return Vec2(-y, x); });
  const TangentField same = transverse_perturb(disk, v2, 0.0, 1);
  const SurfacePoint p = disk.point(0, Vec2(0.3, -0.4));
  CHECK((same(p) - v2(p)).norm() == 0.0);

  // Degenerate zero at the origin; index 0.
  const TangentField deg = planar([](double x, double y) { return Vec2(x * x, y); });
  CHECK_FALSE(all_nondegenerate(find_zeros(disk, deg)));
  const double bmin = boundary_norm_range(disk, deg).min;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TangentField u = transverse_perturb(disk, deg, 0.25 * bmin, seed);
    const auto zs = find_zeros(disk, u);
    int sum = 0;
    for (const auto& z : zs) {
      CHECK(z.nondegenerate);
      // Independent sign check with a coarser difference step.
      ChartFunction f = [&](const Vec2& uv) -> std::optional<Vec2> {
        return pushforward(disk, 0, u, uv);
      };
      const double det = fd_jacobian(f, z.location.uv, 1e-4).determinant();
      CHECK(det * z.sign > 0);
      sum += z.sign;
    }
    CHECK(sum == 0);
    for (int k = 0; k < 50; ++k) {
      const SurfacePoint q = disk.point(0, Vec2(std::cos(k) * 0.9, std::sin(k) * 0.9));
      CHECK((u(q) - deg(q)).norm() <= 0.25 * bmin + 1e-12);
    }
  }
  CHECK_THROWS_AS(transverse_perturb(disk, deg, 2 * bmin, 3), Error);
}

TEST_CASE("perturbation on closed surfaces keeps the index sum") {
  const Surface torus = make_torus();
  const TangentField tgrad([](const SurfacePoint&) { return Vec3(1, 0, 0.3); });
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const TangentField u = transverse_perturb(torus, tgrad, 0.2, seed);
    int sum = 0;
    for (const auto& z : find_zeros(torus, u)) sum += z.sign;
    CHECK(sum == 0);
  }
}

TEST_CASE("sampled fields interpolate bilinearly") {
  const Surface disk = make_disk();
  std::ostringstream csv;
  csv << "chart,u,v,w1,w2,w3\n";
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double u = -1.05 + 2.1 * i / 20, v = -1.05 + 2.1 * j / 20;
      csv << 0 << "," << u << "," << v << "," << -v << "," << u << ",0\n";
    }
  const TangentField f = sampled_field_from_csv_text(disk, csv.str());
  const SurfacePoint p = disk.point(0, Vec2(0.123, -0.456));
  CHECK((f(p) - Vec3(0.456, 0.123, 0)).norm() < 1e-12);
  const auto zs = find_zeros(disk, f);
  REQUIRE(zs.size() == 1);
  CHECK(zs[0].sign == 1);
}

TEST_CASE("expression fields") {
  const Surface disk = make_disk();
  const TangentField v = field_from_expression(disk, "-y, x, 0");
  const SurfacePoint p = disk.point(0, Vec2(0.5, 0.25));
  CHECK((v(p) - Vec3(-0.25, 0.5, 0)).norm() < 1e-15);
  const Surface torus = make_torus();
  const TangentField e = field_from_expression(torus, "1, 0");
  const SurfacePoint q = torus.point(0, Vec2(1.0, 2.0));
  CHECK((e(q) - q.tangents.col(0)).norm() < 1e-12);
}
