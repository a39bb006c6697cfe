#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vmoidx/fields.hpp"

namespace vmoidx {

struct Arc {
  double theta_start = 0.0;
  // theta_end > theta_start; arcs may run past 2 pi.
  double theta_end = 0.0;
};

struct InwardBoundaryRegion {
  std::vector<std::vector<Arc>> arcs;  // one list per boundary curve
  double band = 0.0;
  bool empty() const;
};

struct IndexOptions {
  ZeroSearchOptions search;
  int boundary_samples = 4096;
  // Band for v.nu, relative to max |v| on the boundary.
  double band_relative = 1e-9;
  double bisection_tol = 1e-10;
  // index_continuous: budget as a fraction of min |v| on the boundary
  // (of max |v| on closed surfaces), and the seeds that must agree.
  double budget_fraction = 0.25;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  int perturb_retries = 10;
};

// Sum of zero signs; throws DegenerateZero. Each zero is cross-checked by a
// chart winding number.
int index_transverse(const Surface& s, const TangentField& v, const IndexOptions& opts = {});
int index_transverse(const Surface& s, const TangentField& v, std::vector<Zero>& zeros,
                     const IndexOptions& opts = {});

// Winding of the chart pushforward of v on the chart circle of radius r about z.
int index_winding(const Surface& s, const TangentField& v, const Zero& z, double r,
                  const std::vector<Zero>& others = {});
// Half the distance to the nearest other zero, chart edge or boundary, in chart units.
double default_winding_radius(const Surface& s, const Zero& z, const std::vector<Zero>& others);
// Winding of a planar map on the circle of radius r about c.
int planar_winding_index(const std::function<Vec2(const Vec2&)>& f, const Vec2& c, double r);

int index_continuous(const Surface& s, const TangentField& v, const IndexOptions& opts = {});
// Also returns the zeros of the transverse field that was counted.
int index_continuous(const Surface& s, const TangentField& v, std::vector<Zero>& zeros,
                     const IndexOptions& opts = {});

InwardBoundaryRegion inward_boundary_region(const Surface& s, const BoundaryDatum& g,
                                            const IndexOptions& opts = {});
// Same for arbitrary closed curves with their own conormals (e.g. C_r).
InwardBoundaryRegion inward_boundary_region(const std::vector<BoundaryCurve>& curves,
                                            const BoundaryDatum& g, const IndexOptions& opts = {});
InwardBoundaryRegion inward_boundary_region(const Surface& s, const TangentField& v,
                                            const IndexOptions& opts = {});

// Index of the tangential part of g over the inward arcs; a zero where
// g.t changes from negative to positive in increasing theta counts +1.
int inward_boundary_index(const Surface& s, const BoundaryDatum& g, const IndexOptions& opts = {});
int inward_boundary_index(const std::vector<BoundaryCurve>& curves, const BoundaryDatum& g,
                          const IndexOptions& opts = {});
int inward_boundary_index(const Surface& s, const TangentField& v, const IndexOptions& opts = {});

struct IndexReport {
  int chi = 0;
  int ind = 0;
  int ind_minus = 0;
  int morse_residual = 0;
  std::vector<Zero> zeros;
  double epsilon1 = 0.0;
  std::map<std::string, std::string> diagnostics;
};

IndexReport morse_check(const Surface& s, const TangentField& v, const IndexOptions& opts = {});

// (sqrt 5 - 1) / 4 times the sampled minimum of |v| on the boundary.
double stability_radius(const Surface& s, const TangentField& v, int samples = 4096);
double stability_radius(const Surface& s, const BoundaryDatum& g, int samples = 4096);

struct ExcisionResult {
  int ind_total = 0;
  int ind_u1 = 0;
  int ind_u2 = 0;
  bool holds = false;
};

using Region = std::function<bool(const SurfacePoint&)>;

// ind(v, U) = ind(v, U1) + ind(v, U2) with U1, U2 disjoint; throws
// ZeroOutsideSubregions when a zero of v in U lies in neither.
ExcisionResult excision_check(const Surface& s, const TangentField& v, const Region& u,
                              const Region& u1, const Region& u2, const IndexOptions& opts = {});

}  // namespace vmoidx
