#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vmoidx/geometry.hpp"
#include "vmoidx/roots.hpp"

namespace vmoidx {

// Evaluable tangent field. Values are always projected onto T_xN.
class TangentField {
 public:
  using Ambient = std::function<Vec3(const SurfacePoint&)>;

  TangentField() = default;
  explicit TangentField(Ambient f, std::string label = "field");

  Vec3 operator()(const SurfacePoint& x) const { return tangent_project(x, f_(x)); }
  const std::string& label() const { return label_; }
  explicit operator bool() const { return static_cast<bool>(f_); }
  TangentField scaled(double factor) const;

 private:
  Ambient f_;
  std::string label_;
};

// Three comma-separated components are ambient (x, y, z, u, v available);
// two components are coefficients of the canonical chart's d/du and d/dv.
TangentField field_from_expression(const Surface& s, const std::string& text);

// Sampled field from CSV rows "chart,u,v,w1,w2,w3" on a regular grid per chart,
// bilinearly interpolated.
TangentField load_sampled_field(const Surface& s, const std::string& path);
TangentField sampled_field_from_csv_text(const Surface& s, const std::string& text);

// Coefficients of v in the chart basis (d/du, d/dv) at xi.
Vec2 pushforward(const Surface& s, int chart, const TangentField& v, const Vec2& xi);

struct Zero {
  SurfacePoint location;
  Mat2 chart_jacobian = Mat2::Zero();
  int sign = 0;
  bool nondegenerate = false;
  double refine_residual = 0.0;
};

struct ZeroSearchOptions {
  RootSearchOptions roots;
  // Optional restriction of the search region.
  std::function<bool(const SurfacePoint&)> region;
  bool check_boundary = true;
  int boundary_samples = 4096;
};

std::vector<Zero> find_zeros(const Surface& s, const TangentField& v,
                             const ZeroSearchOptions& opts = {});

bool all_nondegenerate(const std::vector<Zero>& zeros);

struct NormRange {
  double min = 0.0;
  double max = 0.0;
};

NormRange boundary_norm_range(const Surface& s, const TangentField& v, int samples = 4096);
// Sampled over the quadrature patches at resolution n x n.
NormRange interior_norm_range(const Surface& s, const TangentField& v, int n = 128);

struct PerturbOptions {
  int max_retries = 10;
  // Keep u = v near the boundary: the perturbation is multiplied by a cutoff
  // of distance(x) / freeze_width.
  bool freeze_boundary = false;
  double freeze_width = 0.1;
  std::function<double(const SurfacePoint&)> freeze_distance;
  ZeroSearchOptions search;
};

// Random ambient polynomial of degree <= 2 in x / L, projected to T_xN, with
// coefficient l1-norm equal to amplitude (so its sup norm is <= amplitude).
TangentField random_polynomial_perturbation(const Surface& s, double amplitude,
                                            std::uint64_t seed);

TangentField transverse_perturb(const Surface& s, const TangentField& v, double budget,
                                std::uint64_t seed, const PerturbOptions& opts = {});

// Random planar polynomial field (x, y) -> (P(x, y), Q(x, y), 0) with
// standard normal coefficients up to the given total degree.
TangentField random_planar_polynomial_field(int degree, std::uint64_t seed);

// Per boundary curve, theta -> tangent vector at the curve point.
struct BoundaryDatum {
  std::vector<std::function<Vec3(double)>> curves;
  std::string label = "datum";
};

BoundaryDatum trace(const Surface& s, const TangentField& v);
// Ambient components over x, y, z and theta, projected to T_xN.
BoundaryDatum datum_from_expression(const Surface& s, const std::string& text);
NormRange datum_norm_range(const Surface& s, const BoundaryDatum& g, int samples = 4096);

}  // namespace vmoidx
