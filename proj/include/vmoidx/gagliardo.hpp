#pragma once

#include <functional>

namespace vmoidx {

// Extension of scalar boundary data g on the flat chart {t = 0} into the
// half-plane by sliding averages:
//   v(y, t) = (1 / 2t) * integral of g over [y - t, y + t].
// In dimension n the same formula reads v(x', x_n) = (2 x_n)^(1-n) times the
// integral of g over the cube of half-side x_n about x'; only n = 2 is
// implemented.

using ScalarDatum = std::function<double(double)>;

struct GagliardoOptions {
  double p = 2.0;
  // Data live on [a, b]; the estimator region is [a + eps, b - eps] x (0, eps].
  double a = 0.0;
  double b = 1.0;
  double eps = 0.1;
  int grid = 64;
  // Seminorm grids m, 2m, 4m for the divergence test.
  int seminorm_grid = 128;
  double quad_tol = 1e-12;
};

double gagliardo_value(const ScalarDatum& g, double y, double t, double tol = 1e-12);

// W^{1,p} norm of v over the estimator region: midpoint rule with centred
// differences at the cell scale.
double w1p_estimate(const ScalarDatum& g, const GagliardoOptions& opts);

// Discrete W^{1-1/p,p} seminorm^p of g on [a, b] with m midpoint nodes:
// sum over i != j of |g_i - g_j|^p / |x_i - x_j|^p * h^2.
double gagliardo_seminorm(const ScalarDatum& g, double p, double a, double b, int m);

struct TraceError {
  double sup = 0.0;
  double mean = 0.0;
};

// |v(., t) - g| over [a + t, b - t] sampled at n points.
TraceError trace_error(const ScalarDatum& g, double t, double a, double b, int n = 1000);

struct GagliardoResult {
  double w1p = 0.0;
  double seminorm[3] = {0.0, 0.0, 0.0};
  TraceError trace;  // at t = eps / 1000
};

// Unsupported for p = infinity, ConfigError for p <= 1, NonIntegrableDatum
// when the seminorm estimates fail to settle across m, 2m, 4m.
GagliardoResult gagliardo_extension(const ScalarDatum& g, const GagliardoOptions& opts = {});

}  // namespace vmoidx
