#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "vmoidx/error.hpp"
#include "vmoidx/index.hpp"

using namespace vmoidx;

namespace {

constexpr double kPi = std::numbers::pi;
const double kEps1Factor = (std::sqrt(5.0) - 1.0) / 4.0;

TangentField planar(std::function<Vec2(double, double)> f, std::string label = "planar") {
  return TangentField(
      [f](const SurfacePoint& x) {
        const Vec2 w = f(x.position.x(), x.position.y());
        return Vec3(w.x(), w.y(), 0.0);
      },
      std::move(label));
}

// Winding of a planar field along the circle of radius r about the origin.
int circle_winding(const TangentField& v, const Surface& s, double r) {
  const int n = 20000;
  double total = 0.0;
  auto at = [&](int k) {
    const double t = 2 * kPi * k / n;
    SurfacePoint p = s.point(0, Vec2::Zero());
    p.position = Vec3(r * std::cos(t), r * std::sin(t), 0.0);
    p.normal = Vec3::UnitZ();
    const Vec3 w = v(p);
    return Vec2(w.x(), w.y());
  };
  Vec2 prev = at(0);
  for (int k = 1; k <= n; ++k) {
    const Vec2 cur = at(k);
    total += std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.dot(cur));
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

bool boundary_clear(const Surface& s, const TangentField& v, double tol) {
  return boundary_norm_range(s, v, 4096).min > tol;
}

}  // namespace

TEST_CASE("model fields on the disk") {
  const Surface disk = make_disk();
  const TangentField v1 = planar([](double, double) { return Vec2(0, 1); });
  const TangentField v2 = planar([](double x, double y) { return Vec2(-y, x); });
  const TangentField v3 = planar([](double x, double y) { return Vec2(y, x); });

  CHECK(index_continuous(disk, v1) == 0);
  CHECK(index_transverse(disk, v2) == 1);
  CHECK(index_transverse(disk, v3) == -1);
  CHECK(inward_boundary_index(disk, v1) == 1);
  CHECK(inward_boundary_index(disk, v2) == 0);
  CHECK(inward_boundary_index(disk, v3) == 2);
  for (const auto* v : {&v1, &v2, &v3}) {
    const IndexReport r = morse_check(disk, *v);
    CHECK(r.morse_residual == 0);
    CHECK(r.chi == 1);
  }
}

TEST_CASE("inward boundary region") {
  const Surface disk = make_disk();
  const auto r1 = inward_boundary_region(disk, planar([](double, double) { return Vec2(0, 1); }));
  REQUIRE(r1.arcs.size() == 1);
  REQUIRE(r1.arcs[0].size() == 1);
  CHECK(std::abs(r1.arcs[0][0].theta_start - kPi) < 1e-9);
  CHECK(std::abs(r1.arcs[0][0].theta_end - 2 * kPi) < 1e-9);
  CHECK(inward_boundary_region(disk, planar([](double x, double y) { return Vec2(-y, x); })).empty());
  CHECK(inward_boundary_region(disk, planar([](double x, double y) { return Vec2(x, y); })).empty());

  // v3: v.nu = sin 2 theta, negative on (pi/2, pi) and (3 pi/2, 2 pi).
  const auto r3 = inward_boundary_region(disk, planar([](double x, double y) { return Vec2(y, x); }));
  REQUIRE(r3.arcs[0].size() == 2);
  CHECK(std::abs(r3.arcs[0][0].theta_start - kPi / 2) < 1e-9);
  CHECK(std::abs(r3.arcs[0][0].theta_end - kPi) < 1e-9);
  CHECK(std::abs(r3.arcs[0][1].theta_start - 3 * kPi / 2) < 1e-9);
  CHECK(std::abs(r3.arcs[0][1].theta_end - 2 * kPi) < 1e-9);

  // Inward everywhere: the inward-pointing radial field.
  const auto rin = inward_boundary_region(disk, planar([](double x, double y) { return Vec2(-x, -y); }));
  REQUIRE(rin.arcs[0].size() == 1);
  CHECK(rin.arcs[0][0].theta_end - rin.arcs[0][0].theta_start == doctest::Approx(2 * kPi));
  CHECK(inward_boundary_index(disk, planar([](double x, double y) { return Vec2(-x, -y); })) == 0);

  CHECK_THROWS_AS(inward_boundary_region(disk, planar([](double x, double) { return Vec2(x - 1, 0); })),
                  Error);
}

TEST_CASE("local winding indices") {
  auto hedgehog = [](const Vec2& p) { return Vec2(p / p.norm()); };
  auto saddle = [](const Vec2& p) { return Vec2(p.y(), p.x()); };
  auto square = [](const Vec2& p) {
    return Vec2(p.x() * p.x() - p.y() * p.y(), 2 * p.x() * p.y());
  };
  CHECK(planar_winding_index(hedgehog, Vec2::Zero(), 0.3) == 1);
  CHECK(planar_winding_index(saddle, Vec2::Zero(), 0.3) == -1);
  CHECK(planar_winding_index(square, Vec2::Zero(), 0.3) == 2);

  const Surface disk = make_disk();
  const TangentField z2 = planar([](double x, double y) { return Vec2(x * x - y * y, 2 * x * y); });
  const auto zeros = find_zeros(disk, z2);
  REQUIRE(zeros.size() == 1);
  CHECK_FALSE(zeros[0].nondegenerate);
  CHECK(index_winding(disk, z2, zeros[0], 0.2) == 2);
  CHECK_THROWS_AS(index_transverse(disk, z2), Error);
  CHECK(index_continuous(disk, z2) == 2);
  CHECK(index_continuous(disk, z2) == circle_winding(z2, disk, 1.0));

  // Two zeros at (+-0.5, 0); a circle about one that reaches the other is rejected.
  const TangentField two = planar([](double x, double y) { return Vec2(x * x - 0.25, y); });
  const auto zz = find_zeros(disk, two);
  REQUIRE(zz.size() == 2);
  CHECK_THROWS_AS(index_winding(disk, two, zz[0], 1.2, zz), Error);
  CHECK(index_winding(disk, two, zz[0], 0.3, zz) == zz[0].sign);
}

TEST_CASE("sphere rotation field and excision") {
  const Surface sphere = make_sphere();
  const TangentField rot([](const SurfacePoint& x) { return Vec3(-x.position.y(), x.position.x(), 0.0); },
                         "rotation");
  std::vector<Zero> zeros;
  CHECK(index_transverse(sphere, rot, zeros) == 2);
  REQUIRE(zeros.size() == 2);
  for (const auto& z : zeros) CHECK(index_winding(sphere, rot, z, 0.1, zeros) == 1);
  const IndexReport r = morse_check(sphere, rot);
  CHECK(r.ind == 2);
  CHECK(r.ind_minus == 0);
  CHECK(r.morse_residual == 0);

  auto all = [](const SurfacePoint&) { return true; };
  auto north = [](const SurfacePoint& x) { return x.position.z() > 0.5; };
  auto south = [](const SurfacePoint& x) { return x.position.z() < -0.5; };
  auto none = [](const SurfacePoint&) { return false; };
  const ExcisionResult e = excision_check(sphere, rot, all, north, south);
  CHECK(e.holds);
  CHECK(e.ind_total == 2);
  CHECK(e.ind_u1 == 1);
  CHECK(e.ind_u2 == 1);
  const ExcisionResult e2 = excision_check(sphere, rot, all, none, all);
  CHECK(e2.ind_u1 == 0);
  CHECK(e2.ind_u2 == 2);
  CHECK_THROWS_AS(excision_check(sphere, rot, all, north, none), Error);

  const Surface disk = make_disk();
  const TangentField v2 = planar([](double x, double y) { return Vec2(-y, x); });
  auto small = [](const SurfacePoint& x) { return x.position.head<2>().norm() < 0.2; };
  auto sector = [](const SurfacePoint& x) {
    return x.position.head<2>().norm() > 0.5 && x.position.x() > 0 && x.position.y() > 0;
  };
  const ExcisionResult d = excision_check(disk, v2, all, small, sector);
  CHECK(d.holds);
  CHECK(d.ind_u1 == 1);
  CHECK(d.ind_u2 == 0);
}

TEST_CASE("continuous index of a degenerate zero") {
  const Surface disk = make_disk();
  // (x^2 + y^2)(-y, x): degenerate zero at the origin, winding 1 on the circle.
  const TangentField v = planar([](double x, double y) { return Vec2(-(x * x + y * y) * y, (x * x + y * y) * x); });
  CHECK_THROWS_AS(index_transverse(disk, v), Error);
  const int oracle = circle_winding(v, disk, 1.0);
  CHECK(oracle == 1);
  IndexOptions opts;
  for (std::uint64_t seed : {3u, 17u, 101u, 4242u}) {
    opts.seeds = {seed};
    CHECK(index_continuous(disk, v, opts) == oracle);
  }
  CHECK(morse_check(disk, v).morse_residual == 0);
  // A vanishing boundary value is rejected.
  const TangentField bad = planar([](double x, double) { return Vec2(x - 1.0, 0.0); });
  CHECK_THROWS_AS(index_continuous(disk, bad), Error);
}

TEST_CASE("stability radius") {
  const Surface disk = make_disk();
  const TangentField v2 = planar([](double x, double y) { return Vec2(-y, x); });
  CHECK(stability_radius(disk, v2) == doctest::Approx(kEps1Factor).epsilon(1e-12));
  CHECK(stability_radius(disk, v2.scaled(2.0)) == doctest::Approx(2 * kEps1Factor).epsilon(1e-12));
  const TangentField one = planar([](double, double) { return Vec2(0, 1); });
  CHECK(stability_radius(disk, one) == doctest::Approx(0.30901699437494745).epsilon(1e-12));
  CHECK_THROWS_AS(stability_radius(disk, planar([](double x, double) { return Vec2(x - 1, 0); })), Error);
}

TEST_CASE("Morse identity for random transverse polynomial fields") {
  const Surface disk = make_disk();
  const Surface annulus = make_annulus();
  int checked_disk = 0, checked_annulus = 0;
  for (std::uint64_t seed = 1; checked_disk < 200 || checked_annulus < 200; ++seed) {
    const TangentField v = random_planar_polynomial_field(3, seed);
    for (const Surface* s : {&disk, &annulus}) {
      int& counter = s == &disk ? checked_disk : checked_annulus;
      if (counter >= 200 || !boundary_clear(*s, v, 1e-3)) continue;
      std::vector<Zero> zeros;
      int ind;
      try {
        ind = index_transverse(*s, v, zeros);
      } catch (const Error&) {
        continue;  // not transverse; the property is about transverse fields
      }
      const int ind_minus = inward_boundary_index(*s, v);
      CHECK(s->euler_characteristic() - ind - ind_minus == 0);
      // Independent oracle for ind: boundary winding (outer minus inner).
      int oracle = circle_winding(v, *s, 1.0);
      if (s == &annulus) oracle -= circle_winding(v, *s, 0.5);
      CHECK(ind == oracle);
      ++counter;
    }
    REQUIRE(seed < 2000);
  }
}

TEST_CASE("stability under boundary perturbations") {
  const Surface disk = make_disk();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<TangentField> bases = {
      planar([](double, double) { return Vec2(0, 1); }),
      planar([](double x, double y) { return Vec2(y, x); }),
      planar([](double x, double y) { return Vec2(x * x - y * y + 0.3, 2 * x * y - 0.1); }),
  };
  int trials = 0;
  for (int k = 0; k < 1000; ++k) {
    const TangentField& v = bases[static_cast<std::size_t>(k) % bases.size()];
    const double eps1 = stability_radius(disk, v);
    const double amp = 0.999 * eps1 * U(rng);
    const TangentField p = random_polynomial_perturbation(disk, amp, rng());
    const TangentField w(
        [v, p](const SurfacePoint& x) { return Vec3(v(x) + p(x)); }, "w");
    if (!boundary_clear(disk, w, 1e-6)) continue;
    CHECK(inward_boundary_index(disk, w) == inward_boundary_index(disk, v));
    CHECK(circle_winding(w, disk, 1.0) == circle_winding(v, disk, 1.0));
    if (k % 20 == 0) CHECK(index_continuous(disk, w) == index_continuous(disk, v));
    ++trials;
  }
  CHECK(trials > 900);
}

TEST_CASE("scale invariance and empty inward boundary") {
  const Surface disk = make_disk();
  const Surface annulus = make_annulus();
  for (std::uint64_t seed = 5; seed < 15; ++seed) {
    const TangentField v = random_planar_polynomial_field(2, seed);
    for (const Surface* s : {&disk, &annulus}) {
      if (!boundary_clear(*s, v, 1e-3)) continue;
      for (double lambda : {1e-3, 0.5, 7.0}) {
        CHECK(inward_boundary_index(*s, v.scaled(lambda)) == inward_boundary_index(*s, v));
        CHECK(index_continuous(*s, v.scaled(lambda)) == index_continuous(*s, v));
      }
    }
  }
  const TangentField radial = planar([](double x, double y) { return Vec2(x, y); });
  CHECK(inward_boundary_region(disk, radial).empty());
  CHECK(inward_boundary_index(disk, radial) == 0);
}
