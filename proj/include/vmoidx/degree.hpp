#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vmoidx/geometry.hpp"
#include "vmoidx/roots.hpp"

namespace vmoidx {

// Map S^1 -> S^1 written on the angle theta.
struct CircleMap {
  std::function<Vec2(double)> evaluate;
  std::string label = "circle-map";
};

// Map from a closed surface to the unit sphere.
struct SphereMap {
  std::shared_ptr<const Surface> domain;
  std::function<Vec3(const SurfacePoint&)> evaluate;
  std::string label = "sphere-map";
};

CircleMap power_map(int k);
SphereMap identity_map(const Surface& sphere);
SphereMap antipodal_map(const Surface& sphere);
// The oriented Gauss map of a closed surface.
SphereMap gauss_map(const Surface& s);
SphereMap constant_map(const Surface& s, const Vec3& value);

struct DegreeOptions {
  int circle_grid = 4096;
  RootSearchOptions roots;
};

// Signed count of preimages of p; throws NotRegularValue.
int degree_preimage(const CircleMap& phi, const Vec2& p, const DegreeOptions& opts = {});
int degree_preimage(const SphereMap& phi, const Vec3& p, const DegreeOptions& opts = {});

// Retries with p rotated by a random angle <= max_angle while p is not regular.
int degree_preimage_retry(const CircleMap& phi, const Vec2& p, std::uint64_t seed,
                          const DegreeOptions& opts = {}, int max_retries = 10,
                          double max_angle = 1e-2);
int degree_preimage_retry(const SphereMap& phi, const Vec3& p, std::uint64_t seed,
                          const DegreeOptions& opts = {}, int max_retries = 10,
                          double max_angle = 1e-2);

// (1 / |target|) times the integral of the Jacobian determinant; throws
// NonIntegerResult when farther than 1e-3 from an integer.
double degree_integral(const CircleMap& phi, int n = 2048);
double degree_integral(const SphereMap& phi, const QuadratureSpec& quad = {256, 256});

struct HomotopyTrace {
  std::vector<double> times;
  std::vector<int> degrees;
  // Largest sampled sup-norm difference between consecutive maps.
  double max_step_difference = 0.0;
};

// Degrees of x -> H(x, t) along a uniform t grid.
HomotopyTrace homotopy_degrees(const Surface& domain,
                               const std::function<Vec3(const SurfacePoint&, double)>& H,
                               double t0, double t1, int steps,
                               const QuadratureSpec& quad = {96, 96});

}  // namespace vmoidx
