#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmoidx/fields.hpp"
#include "vmoidx/geometry.hpp"

namespace vmoidx {

// Symmetric traceless 3x3 matrix. Admissible at x when Q gamma(x) = 0.
using QTensor = Mat3;

double q_dot(const QTensor& a, const QTensor& b);
double q_norm(const QTensor& q);
Mat3 tangent_projector(const SurfacePoint& x);

// s (n n^T - P_x / 2). NotTangent unless |n| = 1 and n . gamma = 0.
QTensor q_from_director(const SurfacePoint& x, const Vec3& n, double s);

struct Director {
  double s = 0.0;
  Vec3 n = Vec3::Zero();
  // Set when |Q| is below tolerance: s = 0 and n is an arbitrary tangent unit vector.
  bool arbitrary = false;
};

// NotAdmissible when |Q gamma| or the symmetric/trace defects exceed tol * max(1, |Q|).
Director director_from_q(const SurfacePoint& x, const QTensor& q, double tol = 1e-9);

// Frame of S_0 built from (n, m, gamma) with n = unit d/du and m = gamma x n.
// X and Y span the admissible tensors at x.
struct QFrame {
  Vec3 n, m, gamma;
  Mat3 X, Y, E, F, G;
  const Mat3& operator[](int k) const;
};

QFrame q_frame(const SurfacePoint& x);
// Coefficients c with Q = sum c_k frame[k].
std::array<double, 5> frame_coefficients(const QFrame& f, const QTensor& q);
// Orthogonal projection onto span(X, Y).
QTensor project_admissible(const SurfacePoint& x, const QTensor& q);

using QField = std::function<QTensor(const SurfacePoint&)>;

// Unoriented directions: any representative of the line, plus order parameter.
struct LineField {
  std::function<Vec3(const SurfacePoint&)> direction;
  std::function<double(const SurfacePoint&)> order;
  std::string label = "line field";
};

QField q_field(const LineField& l);
// Director v / |v| with s = sqrt(2); Q = 0 where v = 0.
LineField line_field_from_vector(const TangentField& v);
// Q = v v^T - |v|^2 P / 2, continuous wherever v is.
QField q_field_from_vector(const TangentField& v);

// Director angle k * phi against (e_theta, e_phi) on the torus angles chart, s = sqrt(2).
LineField torus_half_turn_field(double k);

struct MollifyQOptions {
  int ball_nodes = 6;
};

// Ball average followed by projection onto the admissible tensors at x.
QField mollify_q(const Surface& s, const QField& q, double eps, const MollifyQOptions& opts = {});

struct QNormRange {
  double min = 0.0;
  double max = 0.0;
};

// |Q| on an n x n cell-centre grid over the quadrature patches.
QNormRange q_norm_range(const Surface& s, const QField& q, int n = 64);

// Doubled-angle coefficients (Q_11 - Q_22, 2 Q_12) in the orthonormalised chart frame.
Vec2 doubled_angle_coefficients(const SurfacePoint& x, const QTensor& q);

// Half the winding of the doubled-angle coefficients on the chart circle of
// radius r about z.
double linefield_index(const Surface& s, const QField& q, const SurfacePoint& z, double r);

struct LineSingularity {
  SurfacePoint location;
  double index = 0.0;
};

std::vector<LineSingularity> linefield_singularities(const Surface& s, const QField& q,
                                                     const RootSearchOptions& opts = {});

struct Loop {
  std::string name;
  std::function<SurfacePoint(double)> at;  // t in [0, 1], closed
};

// Torus: theta-loop at phi = phi0 and phi-loop at theta = theta0. Sphere: none.
std::vector<Loop> generating_loops(const Surface& s, double theta0 = 0.0, double phi0 = 0.0);
Loop chart_loop(const Surface& s, int chart, std::function<Vec2(double)> path, std::string name);

struct Holonomy {
  std::vector<int> signs;
  bool orientable = true;
};

// Direction continued along each loop with line-angle steps below pi/4.
Holonomy orientability_check(const Surface& s, const QField& q, const std::vector<Loop>& loops,
                             int samples = 512);

struct QEpsEntry {
  double eps = 0.0;
  double min_norm = 0.0;
  double max_norm = 0.0;
  bool within = false;
};

struct LineFieldVerdict {
  int chi = 0;
  double c1 = 0.0, c2 = 0.0;
  bool bounds_hold = false;
  bool certified = false;
  std::vector<QEpsEntry> entries;
  // "certified", "obstructed", "bounds-violated", "not-certified" or "inconsistent".
  std::string verdict;
};

struct LineFieldVerdictOptions {
  std::vector<double> eps_grid;  // empty: r0/2 ... r0/64
  int samples = 64;
  double bound_floor = 1e-6;
  MollifyQOptions mollify;
};

LineFieldVerdict vmo_linefield_obstruction(const Surface& s, const QField& q,
                                           const LineFieldVerdictOptions& opts = {});

// Rows "chart,u,v,qX,qY,qE,qF,qG".
void write_q_csv(std::ostream& out, const Surface& s, const QField& q, int n);

}  // namespace vmoidx
