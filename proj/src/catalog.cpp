#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "vmoidx/error.hpp"
#include "vmoidx/expression.hpp"
#include "vmoidx/geometry.hpp"

namespace vmoidx {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double angle_of(double x, double y) {
  double a = std::atan2(y, x);
  if (a < 0) a += kTwoPi;
  return a;
}

ChartSpec plane_chart(const std::string& name, double half, bool scan,
                      std::function<bool(const Vec2&)> owns) {
  ChartSpec c;
  c.name = name;
  c.domain = {-half, half, -half, half};
  c.embed = [](const Vec2& uv) { return Vec3(uv.x(), uv.y(), 0.0); };
  c.tangents = [](const Vec2&) {
    Mat32 t = Mat32::Zero();
    t(0, 0) = 1.0;
    t(1, 1) = 1.0;
    return t;
  };
  c.curvature = [](const Vec2&) { return 0.0; };
  c.inverse = [](const Vec3& p) -> std::optional<Vec2> { return Vec2(p.x(), p.y()); };
  c.owns = std::move(owns);
  c.scan = scan;
  return c;
}

// (rho, theta) coordinates of the plane, theta periodic.
ChartSpec polar_chart(const std::string& name, double rho0, double rho1, bool scan,
                      std::function<bool(const Vec2&)> owns) {
  ChartSpec c;
  c.name = name;
  c.domain = {rho0, rho1, 0.0, kTwoPi};
  c.periodic_v = true;
  c.embed = [](const Vec2& uv) {
    return Vec3(uv.x() * std::cos(uv.y()), uv.x() * std::sin(uv.y()), 0.0);
  };
  c.tangents = [](const Vec2& uv) {
    const double co = std::cos(uv.y()), si = std::sin(uv.y());
    Mat32 t;
    t << co, -uv.x() * si, si, uv.x() * co, 0.0, 0.0;
    return t;
  };
  c.curvature = [](const Vec2&) { return 0.0; };
  c.inverse = [](const Vec3& p) -> std::optional<Vec2> {
    return Vec2(std::hypot(p.x(), p.y()), angle_of(p.x(), p.y()));
  };
  c.owns = std::move(owns);
  c.scan = scan;
  return c;
}

BoundaryCurve circle_boundary(const std::string& name, std::shared_ptr<const Chart> chart,
                              int chart_id, double radius, bool polar, double conormal_sign) {
  BoundaryCurve b;
  b.name = name;
  b.point = [chart, chart_id, radius, polar](double th) {
    const Vec2 uv = polar ? Vec2(radius, th) : Vec2(radius * std::cos(th), radius * std::sin(th));
    return chart_point(*chart, chart_id, uv);
  };
  b.conormal = [conormal_sign](double th) {
    return Vec3(conormal_sign * std::cos(th), conormal_sign * std::sin(th), 0.0);
  };
  b.tangent = [](double th) { return Vec3(-std::sin(th), std::cos(th), 0.0); };
  b.speed = [radius](double) { return radius; };
  return b;
}

}  // namespace

Surface make_disk() {
  SurfaceSpec spec;
  spec.name = "disk";
  auto inside = [](const Vec2& uv) { return uv.squaredNorm() <= 1.0 + 1e-12; };
  spec.charts.push_back(plane_chart("plane", 1.05, true, inside));
  spec.charts.push_back(polar_chart("polar", 0.0, 1.0, false, nullptr));
  spec.patches = {1};
  spec.ball_chart = 0;
  spec.r0 = 0.2;
  auto plane = std::make_shared<const Chart>(spec.charts[0]);
  spec.boundary.push_back(circle_boundary("outer", plane, 0, 1.0, false, 1.0));

  CollarSpec col;
  col.width = 0.5;
  col.reach = 1.0;
  col.at = [plane](double th, double s) {
    return chart_point(*plane, 0, Vec2((1 - s) * std::cos(th), (1 - s) * std::sin(th)));
  };
  col.coordinates = [](const SurfacePoint& x) -> std::optional<Vec2> {
    const double rho = std::hypot(x.position.x(), x.position.y());
    if (rho < 1e-14) return std::nullopt;
    return Vec2(angle_of(x.position.x(), x.position.y()), 1.0 - rho);
  };
  col.area_factor = [](double, double s) { return 1.0 - s; };
  spec.collars.push_back(col);
  spec.contains = [](const SurfacePoint& x) {
    return x.position.head<2>().squaredNorm() <= 1.0 + 1e-12;
  };
  return Surface(std::move(spec));
}

Surface make_annulus(double a, double b) {
  if (!(a > 0 && b > a)) fail(ErrorCode::ConfigError, "annulus needs 0 < inner < outer");
  SurfaceSpec spec;
  spec.name = "annulus";
  const double pad = 0.05 * (b - a);
  auto owns = [a, b](const Vec2& uv) { return uv.x() >= a - 1e-12 && uv.x() <= b + 1e-12; };
  spec.charts.push_back(polar_chart("polar", a - pad, b + pad, true, owns));
  spec.charts.push_back(plane_chart("plane", 1.05 * b, false, nullptr));
  spec.charts.push_back(polar_chart("polar-patch", a, b, false, nullptr));
  spec.patches = {2};
  spec.ball_chart = 1;
  spec.r0 = 0.12 * (b - a);
  auto polar = std::make_shared<const Chart>(spec.charts[0]);
  spec.boundary.push_back(circle_boundary("outer", polar, 0, b, true, 1.0));
  spec.boundary.push_back(circle_boundary("inner", polar, 0, a, true, -1.0));

  const double reach = 0.5 * (b - a);
  const double width = 0.4 * (b - a);
  CollarSpec outer;
  outer.width = width;
  outer.reach = reach;
  outer.at = [polar, b](double th, double s) { return chart_point(*polar, 0, Vec2(b - s, th)); };
  outer.coordinates = [b](const SurfacePoint& x) -> std::optional<Vec2> {
    const double rho = std::hypot(x.position.x(), x.position.y());
    return Vec2(angle_of(x.position.x(), x.position.y()), b - rho);
  };
  outer.area_factor = [b](double, double s) { return b - s; };
  CollarSpec inner;
  inner.width = width;
  inner.reach = reach;
  inner.at = [polar, a](double th, double s) { return chart_point(*polar, 0, Vec2(a + s, th)); };
  inner.coordinates = [a](const SurfacePoint& x) -> std::optional<Vec2> {
    const double rho = std::hypot(x.position.x(), x.position.y());
    return Vec2(angle_of(x.position.x(), x.position.y()), rho - a);
  };
  inner.area_factor = [a](double, double s) { return a + s; };
  spec.collars = {outer, inner};
  spec.contains = [a, b](const SurfacePoint& x) {
    const double r2 = x.position.head<2>().squaredNorm();
    return r2 >= a * a * (1 - 1e-12) && r2 <= b * b * (1 + 1e-12);
  };
  return Surface(std::move(spec));
}

namespace {

// Stereographic chart; flip = false projects from the south pole (covers the
// north hemisphere for |xi| <= 1), flip = true from the north pole.
ChartSpec stereographic_chart(const std::string& name, double R, bool flip) {
  ChartSpec c;
  c.name = name;
  c.domain = {-1.3, 1.3, -1.3, 1.3};
  const double sy = flip ? -1.0 : 1.0;
  const double sz = flip ? -1.0 : 1.0;
  c.embed = [R, sy, sz](const Vec2& xi) {
    const double q = xi.squaredNorm();
    const double d = 1.0 + q;
    return Vec3(R * 2 * xi.x() / d, R * sy * 2 * xi.y() / d, R * sz * (1 - q) / d);
  };
  c.tangents = [R, sy, sz](const Vec2& xi) {
    const double q = xi.squaredNorm();
    const double d = 1.0 + q;
    const Vec3 N(2 * xi.x(), sy * 2 * xi.y(), sz * (1 - q));
    Mat32 t;
    for (int k = 0; k < 2; ++k) {
      Vec3 dN = Vec3::Zero();
      dN(k) = k == 0 ? 2.0 : 2.0 * sy;
      dN(2) = -sz * 2 * xi(k);
      const double dD = 2 * xi(k);
      t.col(k) = R * (dN * d - N * dD) / (d * d);
    }
    return t;
  };
  c.curvature = [R](const Vec2&) { return 1.0 / (R * R); };
  c.inverse = [R, sy, sz](const Vec3& p) -> std::optional<Vec2> {
    const double den = R + sz * p.z();
    if (den <= 1e-12 * R) return std::nullopt;
    return Vec2(p.x() / den, sy * p.y() / den);
  };
  c.owns = [](const Vec2& xi) { return xi.squaredNorm() <= 1.0 + 1e-12; };
  return c;
}

}  // namespace

Surface make_sphere(double R) {
  if (!(R > 0)) fail(ErrorCode::ConfigError, "sphere radius must be positive");
  SurfaceSpec spec;
  spec.name = "sphere";
  spec.charts.push_back(stereographic_chart("north", R, false));
  spec.charts.push_back(stereographic_chart("south", R, true));
  ChartSpec ll;
  ll.name = "latlong";
  ll.domain = {0.0, kPi, 0.0, kTwoPi};
  ll.periodic_v = true;
  ll.scan = false;
  ll.embed = [R](const Vec2& a) {
    return Vec3(R * std::sin(a.x()) * std::cos(a.y()), R * std::sin(a.x()) * std::sin(a.y()),
                R * std::cos(a.x()));
  };
  ll.tangents = [R](const Vec2& a) {
    const double st = std::sin(a.x()), ct = std::cos(a.x());
    const double sp = std::sin(a.y()), cp = std::cos(a.y());
    Mat32 t;
    t << R * ct * cp, -R * st * sp, R * ct * sp, R * st * cp, -R * st, 0.0;
    return t;
  };
  ll.curvature = [R](const Vec2&) { return 1.0 / (R * R); };
  ll.inverse = [R](const Vec3& p) -> std::optional<Vec2> {
    const double c = std::clamp(p.z() / R, -1.0, 1.0);
    return Vec2(std::acos(c), angle_of(p.x(), p.y()));
  };
  spec.charts.push_back(ll);
  spec.patches = {2};
  spec.r0 = 0.5 * R;
  return Surface(std::move(spec));
}

Surface make_torus(double R, double r) {
  if (!(r > 0 && R > r)) fail(ErrorCode::ConfigError, "torus needs 0 < minor < major");
  SurfaceSpec spec;
  spec.name = "torus";
  ChartSpec c;
  c.name = "angles";
  c.domain = {0.0, kTwoPi, 0.0, kTwoPi};
  c.periodic_u = true;
  c.periodic_v = true;
  // d/dtheta x d/dphi points inward; the orientation flag restores the outward normal.
  c.orientation = -1;
  c.embed = [R, r](const Vec2& a) {
    const double w = R + r * std::cos(a.x());
    return Vec3(w * std::cos(a.y()), w * std::sin(a.y()), r * std::sin(a.x()));
  };
  c.tangents = [R, r](const Vec2& a) {
    const double st = std::sin(a.x()), ct = std::cos(a.x());
    const double sp = std::sin(a.y()), cp = std::cos(a.y());
    const double w = R + r * ct;
    Mat32 t;
    t << -r * st * cp, -w * sp, -r * st * sp, w * cp, r * ct, 0.0;
    return t;
  };
  c.curvature = [R, r](const Vec2& a) {
    const double ct = std::cos(a.x());
    return ct / (r * (R + r * ct));
  };
  c.inverse = [R](const Vec3& p) -> std::optional<Vec2> {
    const double rho = std::hypot(p.x(), p.y()) - R;
    return Vec2(angle_of(rho, p.z()), angle_of(p.x(), p.y()));
  };
  spec.charts.push_back(c);
  spec.patches = {0};
  spec.genus = 1;
  spec.r0 = 0.5 * r;
  return Surface(std::move(spec));
}

std::vector<std::string> catalog_names() { return {"disk", "annulus", "sphere", "torus"}; }

Surface catalog_surface(const std::string& name) {
  if (name == "disk" || name == "unit-disk") return make_disk();
  if (name == "annulus") return make_annulus();
  if (name == "sphere" || name == "unit-sphere") return make_sphere();
  if (name == "torus") return make_torus();
  fail(ErrorCode::ConfigError, "unknown surface '" + name + "'");
}

namespace {

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

double number_or(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  return Expression::parse(it->second).eval(VarValues{});
}

std::pair<double, double> range_of(const std::map<std::string, std::string>& kv,
                                   const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) fail(ErrorCode::ConfigError, "missing key '" + key + "'");
  auto parts = parse_expression_list(it->second);
  if (parts.size() != 2) fail(ErrorCode::ConfigError, key + " needs two bounds");
  const double a = parts[0].eval(VarValues{}), b = parts[1].eval(VarValues{});
  if (!(b > a)) fail(ErrorCode::ConfigError, key + " must be increasing");
  return {a, b};
}

bool flag_of(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) return false;
  return it->second == "true" || it->second == "1" || it->second == "yes";
}

// Boundary loop along a coordinate line v = const of a u-periodic chart.
BoundaryCurve coordinate_line_boundary(std::shared_ptr<const Chart> chart, double v_const,
                                       double outward_sign, const Rect& d) {
  BoundaryCurve b;
  b.name = outward_sign > 0 ? "v-max" : "v-min";
  const double scale = d.width() / kTwoPi;
  auto uv_of = [d, v_const, scale](double th) { return Vec2(d.u0 + scale * th, v_const); };
  b.point = [chart, uv_of](double th) { return chart_point(*chart, 0, uv_of(th)); };
  b.tangent = [chart, uv_of](double th) {
    return Vec3(chart->tangents(uv_of(th)).col(0).normalized());
  };
  b.conormal = [chart, uv_of, outward_sign](double th) {
    const Mat32 t = chart->tangents(uv_of(th));
    const Vec3 tu = t.col(0).normalized();
    const Vec3 tv = t.col(1) - t.col(1).dot(tu) * tu;
    return Vec3(outward_sign * tv.normalized());
  };
  b.speed = [chart, uv_of, scale](double th) {
    return chart->tangents(uv_of(th)).col(0).norm() * scale;
  };
  return b;
}

}  // namespace

Surface surface_from_config_text(const std::string& text) {
  const auto kv = parse_key_values(text);
  if (auto it = kv.find("catalog"); it != kv.end()) {
    const std::string& name = it->second;
    if (name == "disk" || name == "unit-disk") return make_disk();
    if (name == "annulus")
      return make_annulus(number_or(kv, "inner", 0.5), number_or(kv, "outer", 1.0));
    if (name == "sphere" || name == "unit-sphere") return make_sphere(number_or(kv, "radius", 1.0));
    if (name == "torus") return make_torus(number_or(kv, "major", 2.0), number_or(kv, "minor", 1.0));
    fail(ErrorCode::ConfigError, "unknown catalog surface '" + name + "'");
  }

  auto embed_it = kv.find("embed");
  if (embed_it == kv.end()) fail(ErrorCode::ConfigError, "config needs 'catalog' or 'embed'");
  const auto comps = parse_expression_list(embed_it->second);
  if (comps.size() != 3) fail(ErrorCode::ConfigError, "embed needs three components");
  const auto [u0, u1] = range_of(kv, "u_range");
  const auto [v0, v1] = range_of(kv, "v_range");
  const bool pu = flag_of(kv, "periodic_u");
  const bool pv = flag_of(kv, "periodic_v");
  if (!pu && !pv)
    fail(ErrorCode::Unsupported, "custom surfaces need at least one periodic direction");
  if (!pu && pv)
    fail(ErrorCode::Unsupported, "put the periodic direction first (periodic_u)");

  SurfaceSpec spec;
  spec.name = kv.count("name") ? kv.at("name") : std::string("custom");
  ChartSpec c;
  c.name = "custom";
  c.domain = {u0, u1, v0, v1};
  c.periodic_u = pu;
  c.periodic_v = pv;
  c.orientation = static_cast<int>(number_or(kv, "orientation", 1.0)) >= 0 ? 1 : -1;
  c.embed = [comps](const Vec2& uv) {
    VarValues vars{};
    vars[static_cast<std::size_t>(Var::U)] = uv.x();
    vars[static_cast<std::size_t>(Var::V)] = uv.y();
    return Vec3(comps[0].eval(vars), comps[1].eval(vars), comps[2].eval(vars));
  };
  spec.charts.push_back(c);
  spec.patches = {0};
  spec.r0 = number_or(kv, "r0", 0.1);
  spec.genus = static_cast<int>(number_or(kv, "genus", pv ? 1.0 : 0.0));
  if (!pv) {
    auto chart = std::make_shared<const Chart>(spec.charts[0]);
    spec.boundary.push_back(coordinate_line_boundary(chart, v1, 1.0, c.domain));
    spec.boundary.push_back(coordinate_line_boundary(chart, v0, -1.0, c.domain));
    spec.contains = [v0, v1](const SurfacePoint& x) {
      return x.chart != 0 || (x.uv.y() >= v0 - 1e-12 && x.uv.y() <= v1 + 1e-12);
    };
  }
  return Surface(std::move(spec));
}

Surface load_surface_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open surface config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return surface_from_config_text(ss.str());
}

}  // namespace vmoidx
