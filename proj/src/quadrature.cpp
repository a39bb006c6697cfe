#include "vmoidx/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "vmoidx/error.hpp"

namespace vmoidx {
namespace {

// Reference rule on [-1, 1], cached per order.
const Rule1D& reference_gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // legendre_p_zeros returns the nonnegative roots in increasing order.
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(n);
  Rule1D rule;
  for (auto r = half.rbegin(); r != half.rend(); ++r) {
    if (*r == 0.0) continue;
    rule.nodes.push_back(-*r);
  }
  for (double r : half) rule.nodes.push_back(r);
  rule.weights.reserve(rule.nodes.size());
  for (double x : rule.nodes) {
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) fail(ErrorCode::ConfigError, "Gauss-Legendre order must be positive");
  const Rule1D& ref = reference_gauss_legendre(n);
  Rule1D rule;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  rule.nodes.reserve(ref.size());
  rule.weights.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    rule.nodes.push_back(mid + half * ref.nodes[i]);
    rule.weights.push_back(half * ref.weights[i]);
  }
  return rule;
}

Rule1D periodic_trapezoid(int n, double a, double b) {
  if (n < 1) fail(ErrorCode::ConfigError, "trapezoid order must be positive");
  Rule1D rule;
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(a + (i + 0.5) * h);
    rule.weights.push_back(h);
  }
  return rule;
}

}  // namespace vmoidx
