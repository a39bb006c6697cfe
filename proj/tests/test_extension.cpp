#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "vmoidx/error.hpp"
#include "vmoidx/extension.hpp"
#include "vmoidx/index.hpp"

using namespace vmoidx;

namespace {

constexpr double kPi = std::numbers::pi;

TangentField planar(std::function<Vec2(double, double)> f) {
  return TangentField([f](const SurfacePoint& x) {
    const Vec2 w = f(x.position.x(), x.position.y());
    return Vec3(w.x(), w.y(), 0.0);
  });
}

BoundaryDatum constant_datum(const Surface& s, const Vec2& w) {
  BoundaryDatum g;
  for (std::size_t i = 0; i < s.boundary().size(); ++i)
    g.curves.push_back([w](double) { return Vec3(w.x(), w.y(), 0.0); });
  g.label = "constant";
  return g;
}

BoundaryDatum tangent_datum(const Surface& s) {
  BoundaryDatum g;
  for (std::size_t i = 0; i < s.boundary().size(); ++i)
    g.curves.push_back([](double t) { return Vec3(-std::sin(t), std::cos(t), 0.0); });
  g.label = "tangent";
  return g;
}

// Direction k*theta + beta0 + bounded wiggle, norm between c1 and c2.
std::function<Vec3(double)> random_curve_datum(std::mt19937_64& rng, int k, double c1, double c2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double beta0 = 2 * kPi * u(rng);
  std::vector<double> amp(3), phase(3), namp(2), nphase(2);
  for (int j = 0; j < 3; ++j) {
    amp[static_cast<std::size_t>(j)] = 0.5 * u(rng);
    phase[static_cast<std::size_t>(j)] = 2 * kPi * u(rng);
  }
  for (int j = 0; j < 2; ++j) {
    namp[static_cast<std::size_t>(j)] = 0.5 * u(rng);
    nphase[static_cast<std::size_t>(j)] = 2 * kPi * u(rng);
  }
  return [=](double t) {
    double beta = k * t + beta0;
    for (int j = 0; j < 3; ++j)
      beta += amp[static_cast<std::size_t>(j)] * std::sin((j + 1) * t + phase[static_cast<std::size_t>(j)]);
    double w = 0.0;
    for (int j = 0; j < 2; ++j)
      w += namp[static_cast<std::size_t>(j)] * std::sin((j + 1) * t + nphase[static_cast<std::size_t>(j)]);
    const double mag = c1 + (c2 - c1) * (0.5 + 0.5 * w);
    return Vec3(mag * std::cos(beta), mag * std::sin(beta), 0.0);
  };
}

void check_extension(const Surface& s, const BoundaryDatum& g, double c1, double c2) {
  CAPTURE(c1);
  CAPTURE(c2);
  const ExtensionResult res = extend_boundary_datum(s, g, c1, c2);
  const ScanResult scan = norm_scan(s, res.field, 128);
  CHECK(scan.min_norm >= c1 * (1 - 1e-6));
  CHECK(scan.max_norm <= c2 * (1 + 1e-6));
  const IndexReport rep = morse_check(s, res.field);
  CHECK(rep.ind == 0);
  CHECK(rep.morse_residual == 0);
  CHECK(rep.ind_minus == res.ind_minus_g);
}

}  // namespace

TEST_CASE("collar extension of a constant datum stays constant") {
  const Surface disk = make_disk();
  const CollarExtension ext = collar_extension(disk, constant_datum(disk, Vec2(0, 1)), 0.2);
  for (double th : {0.0, 1.0, 2.5, 4.0}) {
    for (double sv : {0.0, 0.05, 0.2}) {
      const Vec3 w = ext.v(disk.collar_point(0, th, sv));
      CHECK((w - Vec3(0, 1, 0)).norm() < 1e-12);
    }
  }
  CHECK(ext.min_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ext.max_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ext.ind_minus_g == 1);
  CHECK(ext.ind_minus_c_r == 1);
}

TEST_CASE("collar extension converges to the datum at the boundary") {
  const Surface disk = make_disk();
  BoundaryDatum g;
  g.curves = {[](double t) { return Vec3(std::cos(3 * t) + 2, std::sin(2 * t), 0.0); }};
  const CollarExtension ext = collar_extension(disk, g, 0.25);
  double prev = 1e300;
  for (double sv : {0.1, 0.01, 0.001}) {
    double err = 0.0;
    for (int k = 0; k < 64; ++k) {
      const double th = 2 * kPi * k / 64;
      err = std::max(err, (ext.v(disk.collar_point(0, th, sv)) - g.curves[0](th)).norm());
    }
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("tangent datum has zero inward index on the inner curve") {
  const Surface disk = make_disk();
  const CollarExtension ext = collar_extension(disk, tangent_datum(disk), 0.2);
  CHECK(ext.ind_minus_g == 0);
  CHECK(ext.ind_minus_c_r == 0);
  const InteriorFill fill = interior_fill(disk, ext);
  CHECK(fill.index == 1);
}

TEST_CASE("adaptive collar radius starts at half the collar width") {
  const Surface disk = make_disk();
  const CollarExtension ext = collar_extension(disk, constant_datum(disk, Vec2(1, 0)));
  CHECK(ext.r == doctest::Approx(0.5 * disk.collar_width()));
}

TEST_CASE("collar radius outside the collar is rejected") {
  const Surface disk = make_disk();
  CHECK_THROWS_AS(collar_extension(disk, constant_datum(disk, Vec2(1, 0)), 2.0), Error);
}

TEST_CASE("interior fill of an admissible datum has index zero") {
  const Surface disk = make_disk();
  const CollarExtension ext = collar_extension(disk, constant_datum(disk, Vec2(0, 1)));
  const InteriorFill fill = interior_fill(disk, ext);
  CHECK(fill.index == 0);
  CHECK(all_nondegenerate(fill.zeros));
  for (int k = 0; k < 64; ++k) {
    const double th = 2 * kPi * k / 64;
    CHECK((fill.field(disk.collar_point(0, th, ext.r)) - ext.on_c_r.curves[0](th)).norm() < 1e-12);
  }
}

TEST_CASE("annulus angular datum fills without zeros") {
  const Surface ann = make_annulus();
  const CollarExtension ext = collar_extension(ann, tangent_datum(ann));
  CHECK(ext.ind_minus_g == 0);
  const InteriorFill fill = interior_fill(ann, ext);
  CHECK(fill.index == 0);
  CHECK(fill.zeros.empty());
}

TEST_CASE("cancel_zeros removes a dipole") {
  const Surface disk = make_disk();
  // Zeros at (+-0.3, 0) with signs +1 and -1.
  const TangentField F = planar([](double x, double y) { return Vec2(x * x - 0.09, y); });
  const auto zeros = find_zeros(disk, F);
  REQUIRE(zeros.size() == 2);
  CancelReport rep;
  const TangentField G = cancel_zeros(disk, F, zeros, &rep);
  CHECK(rep.pairs == 1);
  double agree = 0.0;
  for (int k = 0; k < 4096; ++k) {
    const double th = 2 * kPi * k / 4096;
    const SurfacePoint p = disk.boundary()[0].point(th);
    agree = std::max(agree, (G(p) - F(p)).norm());
  }
  CHECK(agree <= 1e-12);
  CHECK(norm_scan(disk, G, 512).min_norm > 0);
  CHECK(find_zeros(disk, G).empty());
}

TEST_CASE("cancel_zeros removes two dipoles") {
  const Surface disk = make_disk();
  // Zeros at x in {-0.5, -0.2, 0.2, 0.5} on the x axis with alternating signs.
  const TangentField F = planar([](double x, double y) {
    return Vec2((x * x - 0.04) * (x * x - 0.25), y);
  });
  const auto zeros = find_zeros(disk, F);
  REQUIRE(zeros.size() == 4);
  CancelReport rep;
  const TangentField G = cancel_zeros(disk, F, zeros, &rep);
  CHECK(rep.pairs == 2);
  CHECK(norm_scan(disk, G, 512).min_norm > 0);
}

TEST_CASE("cancel_zeros identity and obstruction") {
  const Surface disk = make_disk();
  const TangentField F = planar([](double, double) { return Vec2(1, 0); });
  const TangentField G = cancel_zeros(disk, F, {});
  const SurfacePoint p = disk.point(0, Vec2(0.3, -0.2));
  CHECK((G(p) - F(p)).norm() == 0.0);
  const TangentField H = planar([](double x, double y) { return Vec2(x, y); });
  try {
    cancel_zeros(disk, H, find_zeros(disk, H));
    FAIL("expected NonzeroIndex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonzeroIndex);
  }
}

TEST_CASE("clamp_norm") {
  const Surface disk = make_disk();
  const SurfacePoint p = disk.point(0, Vec2(0.1, 0.2));
  const Vec3 dir = Vec3(0.6, 0.8, 0.0);
  auto field = [&](double m) { return TangentField([dir, m](const SurfacePoint&) { return Vec3(m * dir); }); };
  CHECK((clamp_norm(disk, field(0.1), 0.5, 2.0)(p) - 0.5 * dir).norm() < 1e-15);
  CHECK((clamp_norm(disk, field(1.3), 0.5, 2.0)(p) - 1.3 * dir).norm() < 1e-15);
  CHECK((clamp_norm(disk, field(10.0), 0.5, 2.0)(p) - 2.0 * dir).norm() < 1e-14);
  const TangentField H = planar([](double x, double y) { return Vec2(x, y); });
  CHECK_THROWS_AS(clamp_norm(disk, H, 0.5, 2.0, 128), Error);
}

TEST_CASE("constant datum on the disk extends") {
  const Surface disk = make_disk();
  check_extension(disk, constant_datum(disk, Vec2(0, 1)), 1.0, 1.0);
  check_extension(disk, constant_datum(disk, Vec2(0, 1)), 0.5, 2.0);
}

TEST_CASE("tangent datum on the disk is obstructed") {
  const Surface disk = make_disk();
  try {
    extend_boundary_datum(disk, tangent_datum(disk), 1.0, 1.0);
    FAIL("expected an obstruction");
  } catch (const TopologicalObstruction& e) {
    CHECK(e.inward_index() == 0);
    CHECK(e.euler_characteristic() == 1);
  }
}

TEST_CASE("angular datum on the annulus extends") {
  const Surface ann = make_annulus();
  check_extension(ann, tangent_datum(ann), 1.0, 1.0);
}

TEST_CASE("extension input checks") {
  const Surface disk = make_disk();
  CHECK_THROWS_AS(extend_boundary_datum(make_sphere(), BoundaryDatum{}, 1.0, 1.0), Error);
  try {
    extend_boundary_datum(disk, constant_datum(disk, Vec2(0, 3)), 1.0, 2.0);
    FAIL("expected NotAdmissible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAdmissible);
  }
  BoundaryDatum normal;
  normal.curves = {[](double) { return Vec3(0, 0, 1); }};
  try {
    extend_boundary_datum(disk, normal, 0.5, 2.0);
    FAIL("expected NotTangent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotTangent);
  }
}

TEST_CASE("random admissible data extend on the disk and the annulus") {
  std::mt19937_64 rng(20261016);
  const Surface disk = make_disk();
  const Surface ann = make_annulus();
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    const double c1 = 0.5 + 0.5 * std::uniform_real_distribution<double>(0, 1)(rng);
    const double c2 = c1 * (1.0 + std::uniform_real_distribution<double>(0, 1)(rng));
    if (trial % 2 == 0) {
      BoundaryDatum g;
      g.curves = {random_curve_datum(rng, 0, c1, c2)};
      check_extension(disk, g, c1, c2);
    } else {
      const int k = std::uniform_int_distribution<int>(-1, 2)(rng);
      BoundaryDatum g;
      g.curves = {random_curve_datum(rng, k, c1, c2), random_curve_datum(rng, k, c1, c2)};
      check_extension(ann, g, c1, c2);
    }
  }
}

TEST_CASE("field CSV export") {
  const Surface disk = make_disk();
  std::ostringstream out;
  write_field_csv(out, disk, planar([](double, double) { return Vec2(1, 0); }), 4);
  const std::string text = out.str();
  CHECK(text.rfind("chart,u,v,w1,w2,w3\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') > 25);
}
