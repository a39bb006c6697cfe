#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vmoidx/index.hpp"

namespace vmoidx {

struct ExtensionOptions {
  IndexOptions index;
  int arc_nodes = 16;
  // Norm and index certificates are sampled on this many theta values per
  // curve and s levels across the collar.
  int theta_samples = 512;
  int s_samples = 16;
  int max_halvings = 8;
  std::uint64_t seed = 1;
  int cancel_boundary_samples = 2048;
};

// v on U_r with v(phi(theta, s)) = P(bar g_s(theta)), and its restriction to C_r.
struct CollarExtension {
  double r = 0.0;
  TangentField v;                  // meaningful where collar coordinates have s <= r
  std::vector<BoundaryCurve> c_r;  // the curves C_r, conormal pointing towards the boundary
  BoundaryDatum on_c_r;
  double c1 = 0.0, c2 = 0.0;       // sampled bounds of |g|
  double min_norm = 0.0, max_norm = 0.0;
  int ind_minus_g = 0;
  int ind_minus_c_r = 0;
};

// Fixed r; throws NormCollapse or IndexMismatch when the certificates fail.
CollarExtension collar_extension(const Surface& s, const BoundaryDatum& g, double r,
                                 const ExtensionOptions& opts = {});
// Starts at half the collar width and halves r until the certificates hold.
CollarExtension collar_extension(const Surface& s, const BoundaryDatum& g,
                                 const ExtensionOptions& opts = {});

struct InteriorFill {
  TangentField field;  // collar extension on U_r, filled and perturbed on N_r
  std::vector<Zero> zeros;
  int index = 0;       // ind(F, N_r)
};

InteriorFill interior_fill(const Surface& s, const CollarExtension& ext,
                           const ExtensionOptions& opts = {});

struct CancelReport {
  int pairs = 0;
  std::vector<double> tube_radii;  // chart units
};

// Removes zeros of F pairwise inside stadium-shaped chart tubes; F is
// unchanged outside the tubes. Throws NonzeroIndex when the signs do not sum to 0.
TangentField cancel_zeros(const Surface& s, const TangentField& F, const std::vector<Zero>& zeros,
                          CancelReport* report = nullptr, const ExtensionOptions& opts = {});

// Magnitude clamped to [c1, c2], direction kept; throws ZeroNorm if a sampled
// value vanishes.
TangentField clamp_norm(const Surface& s, const TangentField& v, double c1, double c2,
                        int samples = 128);

struct ExtensionResult {
  TangentField field;
  double r = 0.0;
  int ind_minus_g = 0;
  int chi = 0;
  std::map<std::string, double> certificates;
};

// Nowhere-vanishing extension with c1 <= |v| <= c2; throws
// TopologicalObstruction when ind_-(g) differs from chi.
ExtensionResult extend_boundary_datum(const Surface& s, const BoundaryDatum& g, double c1, double c2,
                                      const ExtensionOptions& opts = {});

struct ScanResult {
  double min_norm = 0.0;
  double max_norm = 0.0;
  std::size_t points = 0;
};

// |v| over an n x n grid on each chart in the surface's patches, keeping
// points inside N.
ScanResult norm_scan(const Surface& s, const TangentField& v, int n);

// Rows "chart,u,v,w1,w2,w3" on an n x n grid per patch.
void write_field_csv(std::ostream& out, const Surface& s, const TangentField& v, int n);

}  // namespace vmoidx
