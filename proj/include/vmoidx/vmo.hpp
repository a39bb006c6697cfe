#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmoidx/index.hpp"

namespace vmoidx {

using AmbientField = std::function<Vec3(const SurfacePoint&)>;
// Value on the two-sided collar of one boundary curve: (curve, theta, s).
using CollarField = std::function<Vec3(int, double, double)>;

// A possibly discontinuous field on N together with its boundary trace.
struct VmoField {
  AmbientField values;
  BoundaryDatum trace;
  std::string label = "field";
};

VmoField vmo_field(const Surface& s, const TangentField& v);

struct VmoOptions {
  int ball_nodes = 6;   // radial Gauss nodes; twice as many angles
  int arc_nodes = 16;
  // Cutoff width of the standard extension; <= 0 means the collar width.
  double cutoff_width = 0.0;
  IndexOptions index;
  // Grid entries, counted from the smallest eps, that must agree.
  int certificate_tail = 4;
  bool require_certificate = true;
};

// eps_k = r0 / 2^k for k = 1..6.
std::vector<double> default_eps_grid(const Surface& s);

// Mean over the metric ball; the centre must be at least 2 eps inside N.
Vec3 ball_average(const Surface& s, const AmbientField& u, const SurfacePoint& x, double eps,
                  int n = 6);
// Arclength mean of g over the boundary ball about theta.
Vec3 boundary_average(const Surface& s, const BoundaryDatum& g, int curve, double theta, double eps,
                      int n = 16);

// Smooth cutoff: 1 on [0, 1/2], 0 on [1, inf).
double collar_cutoff(double t);
// G(curve, theta, s) = g(theta) chi(|s| / width).
CollarField standard_extension_G(const Surface& s, const BoundaryDatum& g, double cutoff_width);

struct MollifiedField {
  double eps = 0.0;
  AmbientField raw;      // bar u_eps
  TangentField u_eps;    // projected
  BoundaryDatum g_bar;   // bar g_eps
  BoundaryDatum g_eps;   // projected
};

// Average of the glued field (v on N, G on the mirrored collar).
Vec3 glued_average(const Surface& s, const VmoField& f, const CollarField& G, const SurfacePoint& x,
                   double eps, int n);
MollifiedField mollify(const Surface& s, const VmoField& f, double eps, const VmoOptions& opts = {});

struct VmoModulus {
  std::vector<double> eps_grid;
  std::vector<double> omega;
};

// omega(eps) = max over x in x_grid with dist(x, boundary) >= 2 eps of the
// mean of |u - bar u_eps(x)| over B_eps(x).
VmoModulus bmo_modulus(const Surface& s, const AmbientField& u, const std::vector<double>& eps_grid,
                       const std::vector<SurfacePoint>& x_grid, int n = 6);

// Cell centres of an n x n grid on every quadrature patch.
std::vector<SurfacePoint> sample_points(const Surface& s, int n);

struct VmoIndexEntry {
  double eps = 0.0;
  int ind = 0;
  int ind_minus = 0;
  int residual = 0;
};

struct VmoIndexResult {
  IndexReport report;  // common values at the smallest eps
  std::vector<VmoIndexEntry> entries;
  bool certified = false;
};

// Index data of u_eps and g_eps over the grid; throws NotConstantOverGrid when
// the last certificate_tail entries disagree and require_certificate is set.
VmoIndexResult vmo_index(const Surface& s, const VmoField& f, const std::vector<double>& eps_grid,
                         const VmoOptions& opts = {});

struct DensityEntry {
  double eps = 0.0;
  double ratio = 0.0;
  double deviation = 0.0;  // |ratio - 1/2|
};

// sigma(B_eps(x) \ N) / sigma(B_eps(x)) on the doubled collar at theta0.
std::vector<DensityEntry> boundary_density_check(const Surface& s, int curve, double theta0,
                                                 const std::vector<double>& eps_grid, int n = 24);
// The same ratio for a surface lying in the plane z = 0, measured with
// Euclidean discs of the plane.
std::vector<DensityEntry> planar_density_check(const Surface& s, int curve, double theta0,
                                               const std::vector<double>& eps_grid, int n = 48);
// Least-squares slope of log(deviation) against log(eps).
double loglog_slope(const std::vector<DensityEntry>& entries);

struct VmoDiagnosticRow {
  double eps = 0.0;
  double omega = 0.0;
  double sup_u_minus_bar = 0.0;
  double sup_boundary_u_minus_g = 0.0;
  double min_g_eps = 0.0;
  double max_g_eps = 0.0;
};

std::vector<VmoDiagnosticRow> vmo_diagnostics(const Surface& s, const VmoField& f,
                                              const std::vector<double>& eps_grid,
                                              const VmoOptions& opts = {}, int interior_n = 24,
                                              int boundary_samples = 256);
void write_diagnostics_csv(std::ostream& out, const std::vector<VmoDiagnosticRow>& rows);

}  // namespace vmoidx
