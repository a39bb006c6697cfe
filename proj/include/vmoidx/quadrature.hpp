#pragma once

#include <vector>

namespace vmoidx {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre rule with n nodes mapped to [a, b].
Rule1D gauss_legendre(int n, double a, double b);

// Trapezoid rule for periodic integrands on [a, b); spectrally accurate for smooth data.
Rule1D periodic_trapezoid(int n, double a, double b);

// Per-axis resolution used by surface integrals.
struct QuadratureSpec {
  int n_u = 256;
  int n_v = 256;
};

}  // namespace vmoidx
