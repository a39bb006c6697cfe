#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vmoidx/quadrature.hpp"

namespace vmoidx {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

struct Rect {
  double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
  bool contains(const Vec2& p, double slack = 0.0) const;
  double width() const { return u1 - u0; }
  double height() const { return v1 - v0; }
};

struct ChartSpec {
  std::string name;
  Rect domain;
  bool periodic_u = false;
  bool periodic_v = false;
  int orientation = 1;
  std::function<Vec3(const Vec2&)> embed;
  // Optional analytic data; finite differences are used when absent.
  std::function<Mat32(const Vec2&)> tangents;
  std::function<double(const Vec2&)> curvature;
  std::function<std::optional<Vec2>(const Vec3&)> inverse;
  // Region of the domain this chart is responsible for in zero searches.
  std::function<bool(const Vec2&)> owns;
  bool scan = true;
};

class Chart {
 public:
  explicit Chart(ChartSpec spec);

  const std::string& name() const { return spec_.name; }
  const Rect& domain() const { return spec_.domain; }
  bool periodic_u() const { return spec_.periodic_u; }
  bool periodic_v() const { return spec_.periodic_v; }
  int orientation() const { return spec_.orientation; }
  bool scan() const { return spec_.scan; }

  Vec2 wrap(const Vec2& uv) const;
  Vec3 embed(const Vec2& uv) const { return spec_.embed(uv); }
  Mat32 tangents(const Vec2& uv) const;
  Mat2 metric(const Vec2& uv) const;
  // Oriented unit normal: orientation * (t_u x t_v) / |t_u x t_v|.
  Vec3 normal(const Vec2& uv) const;
  double area_element(const Vec2& uv) const;
  double gaussian_curvature(const Vec2& uv) const;
  bool owns(const Vec2& uv) const;
  // Chart parameters of an ambient point lying on the image, if found.
  std::optional<Vec2> inverse(const Vec3& position, const Vec2* guess = nullptr) const;

 private:
  ChartSpec spec_;
};

struct SurfacePoint {
  int chart = -1;
  Vec2 uv = Vec2::Zero();
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Mat32 tangents = Mat32::Zero();
};

// Evaluates a chart at uv (wrapped) and tags the result with the chart index.
SurfacePoint chart_point(const Chart& chart, int index, const Vec2& uv);

// A boundary loop parametrized by theta in [0, 2pi). tangent is the unit
// velocity dx/dtheta; conormal is the outward unit normal inside T_xN.
struct BoundaryCurve {
  std::string name;
  std::function<SurfacePoint(double)> point;
  std::function<Vec3(double)> conormal;
  std::function<Vec3(double)> tangent;
  std::function<double(double)> speed;
};

// Collar coordinates (theta, s): s is the distance to the boundary curve.
// Negative s denotes the mirror point of the reflected double.
struct CollarCoordinates {
  int curve = 0;
  double theta = 0.0;
  double s = 0.0;
};

struct CollarSpec {
  double width = 0.0;
  // Largest s for which nearest-point coordinates are unique.
  double reach = 0.0;
  std::function<SurfacePoint(double, double)> at;
  std::function<std::optional<Vec2>(const SurfacePoint&)> coordinates;
  // sqrt(det g) of the (theta, s) chart; finite differences when absent.
  std::function<double(double, double)> area_factor;
};

struct SurfaceSpec {
  std::string name;
  std::vector<ChartSpec> charts;
  std::vector<int> patches;
  std::vector<BoundaryCurve> boundary;
  std::vector<CollarSpec> collars;
  int genus = 0;
  int orientation = 1;
  double r0 = 0.1;
  int ball_chart = -1;
  // Membership in N for points of the ambient chart images; all points when absent.
  std::function<bool(const SurfacePoint&)> contains;
};

class Surface {
 public:
  explicit Surface(SurfaceSpec spec);

  const std::string& name() const { return name_; }
  int genus() const { return genus_; }
  int boundary_count() const { return static_cast<int>(boundary_.size()); }
  int orientation() const { return orientation_; }
  double r0() const { return r0_; }
  bool closed() const { return boundary_.empty(); }
  int euler_characteristic() const { return 2 - 2 * genus_ - boundary_count(); }

  const std::vector<Chart>& charts() const { return charts_; }
  const Chart& chart(int i) const { return charts_.at(static_cast<std::size_t>(i)); }
  int chart_index(const std::string& name) const;
  const std::vector<int>& patches() const { return patches_; }
  const std::vector<int>& scan_charts() const { return scan_charts_; }
  const std::vector<BoundaryCurve>& boundary() const { return boundary_; }

  SurfacePoint point(int chart, const Vec2& uv) const;
  // Re-expresses x in the given chart; throws OutOfChart on failure.
  SurfacePoint to_chart(const SurfacePoint& x, int chart) const;
  // Re-expresses x in the first scan chart that owns it.
  SurfacePoint canonical(const SurfacePoint& x) const;
  std::optional<SurfacePoint> locate(const Vec3& position) const;
  bool contains(const SurfacePoint& x) const;

  bool has_collar() const { return !collars_.empty(); }
  double collar_width() const;
  const CollarSpec& collar(int curve) const;
  SurfacePoint collar_point(int curve, double theta, double s) const;
  // Nearest boundary curve with coordinates; nullopt when closed or outside every reach.
  std::optional<CollarCoordinates> collar_coordinates(const SurfacePoint& x) const;
  double collar_area_factor(int curve, double theta, double s) const;
  double distance_to_boundary(const SurfacePoint& x) const;
  int ball_chart() const { return ball_chart_; }

 private:
  std::string name_;
  std::vector<Chart> charts_;
  std::vector<int> patches_;
  std::vector<int> scan_charts_;
  std::vector<BoundaryCurve> boundary_;
  std::vector<CollarSpec> collars_;
  int genus_;
  int orientation_;
  double r0_;
  int ball_chart_;
  std::function<bool(const SurfacePoint&)> contains_;
};

int euler_characteristic(const Surface& s);

// (1/2pi) times the integral of Gaussian curvature over a closed surface.
double gauss_bonnet_chi(const Surface& s, const QuadratureSpec& quad);

Vec3 tangent_project(const SurfacePoint& x, const Vec3& w);

struct BallNode {
  SurfacePoint point;
  double weight = 0.0;
};

// Quadrature over the chart ellipse {xi : (xi - xi0)^T g0 (xi - xi0) <= eps^2}.
// n radial Gauss nodes times 2n angular nodes.
std::vector<BallNode> metric_ball_sample(const Surface& s, const SurfacePoint& x, double eps,
                                         int n, bool interior = true);

struct CollarBallNode {
  double theta = 0.0;
  double s = 0.0;
  double weight = 0.0;
};

// Ball of radius eps about collar coordinates (theta0, s0) in the reflected
// (theta, s) chart. Nodes with s < 0 lie on the mirror copy.
std::vector<CollarBallNode> collar_ball_sample(const Surface& s, int curve, double theta0,
                                               double s0, double eps, int n);

struct ArcNode {
  double theta = 0.0;
  double weight = 0.0;
};

// Arclength ball of radius eps about theta0 on a boundary curve.
std::vector<ArcNode> boundary_arc_sample(const Surface& s, int curve, double theta0, double eps,
                                         int n);

// Built-in catalog.
Surface make_disk();
Surface make_annulus(double inner = 0.5, double outer = 1.0);
Surface make_sphere(double radius = 1.0);
Surface make_torus(double major = 2.0, double minor = 1.0);
Surface catalog_surface(const std::string& name);
std::vector<std::string> catalog_names();

// Declarative surface description in key = value form; see README.
Surface load_surface_config(const std::string& path);
Surface surface_from_config_text(const std::string& text);

}  // namespace vmoidx
