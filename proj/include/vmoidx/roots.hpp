#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vmoidx/geometry.hpp"

namespace vmoidx {

// Total turning of f over theta in [0, 2pi] divided by 2pi. Intervals whose
// angle jump exceeds pi/2 are bisected up to max_refine times.
int winding_number(const std::function<Vec2(double)>& f, int samples = 256, int max_refine = 16);

// Chart-coordinate map whose zeros are sought; nullopt marks points where the
// map is undefined (such cells are skipped).
using ChartFunction = std::function<std::optional<Vec2>(const Vec2&)>;

struct RootSearchOptions {
  int grid = 64;
  double zero_tol = 1e-9;
  double jac_tol = 1e-8;
  double separation_tol = 1e-5;
  double fd_step = 1e-5;
  int max_newton = 100;
};

struct ChartRoot {
  Vec2 uv = Vec2::Zero();
  Mat2 jacobian = Mat2::Zero();
  double residual = 0.0;
};

struct RootSearchResult {
  std::vector<ChartRoot> roots;
  // Cells whose boundary winding is nonzero although Newton did not converge.
  std::vector<Vec2> unresolved;
};

Mat2 fd_jacobian(const ChartFunction& f, const Vec2& uv, double h);

// Grid sign scan over the chart domain seeding damped Newton iterations.
RootSearchResult locate_roots(const Chart& chart, const ChartFunction& f,
                              const RootSearchOptions& opts);

// Damped Newton from a single start; nullopt on failure.
std::optional<ChartRoot> refine_root(const Chart& chart, const ChartFunction& f, const Vec2& start,
                                     const RootSearchOptions& opts);

}  // namespace vmoidx
