#include <cmath>

#include "doctest.h"
#include "vmoidx/error.hpp"
#include "vmoidx/gagliardo.hpp"

using namespace vmoidx;

TEST_CASE("constant datum extends to a constant") {
  const ScalarDatum g = [](double) { return 0.7; };
  for (double y : {0.2, 0.5}) {
    for (double t : {1e-3, 0.05, 0.1}) CHECK(gagliardo_value(g, y, t) == doctest::Approx(0.7).epsilon(1e-14));
  }
  GagliardoOptions opts;
  opts.grid = 16;
  // Only the |v|^p term survives: 0.7 * sqrt(area).
  CHECK(w1p_estimate(g, opts) == doctest::Approx(0.7 * std::sqrt(0.8 * 0.1)).epsilon(1e-12));
  CHECK(gagliardo_seminorm(g, 2.0, 0.0, 1.0, 64) == 0.0);
}

TEST_CASE("sine datum matches the closed form") {
  const ScalarDatum g = [](double y) { return std::sin(y); };
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double y = -1.0 + 0.15 * i;
    for (double t : {1e-4, 1e-2, 0.1, 0.5, 1.0}) {
      const double exact = std::sin(y) * std::sin(t) / t;
      worst = std::max(worst, std::abs(gagliardo_value(g, y, t) - exact));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("W^{1,2} estimate is stable under refinement") {
  GagliardoOptions opts;
  opts.grid = 16;
  for (auto g : {ScalarDatum([](double y) { return std::sin(y); }),
                 ScalarDatum([](double y) { return std::abs(y - 0.5); })}) {
    const double coarse = w1p_estimate(g, opts);
    GagliardoOptions fine = opts;
    fine.grid = 64;
    const double ratio = w1p_estimate(g, fine) / coarse;
    CHECK(ratio >= 0.9);
    CHECK(ratio <= 1.1);
  }
}

TEST_CASE("step datum: sup trace fails, mean trace holds") {
  const ScalarDatum g = [](double y) { return y < 0.5 ? 0.0 : 1.0; };
  double prev_mean = 1.0;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const TraceError e = trace_error(g, t, 0.0, 1.0, 4001);
    CHECK(e.sup > 0.25);
    CHECK(e.mean < prev_mean);
    prev_mean = e.mean;
  }
  CHECK(prev_mean < 1e-3);
  // Smooth in t > 0: v is continuous across y = 1/2.
  const double t = 0.01;
  CHECK(std::abs(gagliardo_value(g, 0.5 + 1e-7, t) - gagliardo_value(g, 0.5 - 1e-7, t)) < 1e-4);
}

TEST_CASE("continuous datum recovers its trace") {
  const ScalarDatum g = [](double y) { return std::cos(3 * y); };
  double prev = 1.0;
  for (double t : {1e-1, 1e-2, 1e-3}) {
    const double sup = trace_error(g, t, 0.0, 1.0).sup;
    CHECK(sup < prev);
    prev = sup;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("extension driver") {
  const ScalarDatum lip = [](double y) { return std::abs(y - 0.3); };
  GagliardoOptions opts;
  opts.grid = 16;
  const GagliardoResult r = gagliardo_extension(lip, opts);
  CHECK(r.w1p > 0);
  CHECK(r.trace.sup < 1e-3);
  const ScalarDatum step = [](double y) { return y < 0.5 ? 0.0 : 1.0; };
  try {
    gagliardo_extension(step, opts);
    FAIL("expected NonIntegrableDatum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonIntegrableDatum);
  }
  opts.p = INFINITY;
  try {
    gagliardo_extension(lip, opts);
    FAIL("expected Unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unsupported);
  }
  opts.p = 1.0;
  CHECK_THROWS_AS(gagliardo_extension(lip, opts), Error);
}
