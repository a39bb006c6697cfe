#include "vmoidx/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vmoidx/error.hpp"
#include "vmoidx/parallel.hpp"

namespace vmoidx {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double turn(const Vec2& a, const Vec2& b) {
  return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
}

struct WindingState {
  const std::function<Vec2(double)>* f;
  double tiny;
  int max_refine;
};

double accumulate(const WindingState& st, double ta, const Vec2& fa, double tb, const Vec2& fb,
                  int depth) {
  const double d = turn(fa, fb);
  if (std::abs(d) <= 0.5 * kPi) return d;
  if (depth >= st.max_refine) fail(ErrorCode::UnderResolved, "winding refinement cap reached");
  const double tm = 0.5 * (ta + tb);
  const Vec2 fm = (*st.f)(tm);
  if (!(fm.norm() > st.tiny)) fail(ErrorCode::VanishingOnCircle, "map vanishes on the circle");
  return accumulate(st, ta, fa, tm, fm, depth + 1) + accumulate(st, tm, fm, tb, fb, depth + 1);
}

double periodic_delta(double a, double b, double period) {
  double d = std::fmod(a - b, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

double uv_distance(const Chart& c, const Vec2& a, const Vec2& b) {
  const Rect& d = c.domain();
  const double du = c.periodic_u() ? periodic_delta(a.x(), b.x(), d.width()) : a.x() - b.x();
  const double dv = c.periodic_v() ? periodic_delta(a.y(), b.y(), d.height()) : a.y() - b.y();
  return std::hypot(du, dv);
}

}  // namespace

int winding_number(const std::function<Vec2(double)>& f, int samples, int max_refine) {
  if (samples < 4) samples = 4;
  std::vector<Vec2> vals(static_cast<std::size_t>(samples) + 1);
  double scale = 0.0;
  for (int k = 0; k < samples; ++k) {
    vals[static_cast<std::size_t>(k)] = f(kTwoPi * k / samples);
    scale = std::max(scale, vals[static_cast<std::size_t>(k)].norm());
  }
  vals.back() = vals.front();
  const double tiny = 1e-14 * scale;
  if (!(scale > 0)) fail(ErrorCode::VanishingOnCircle, "map vanishes on the circle");
  for (const auto& v : vals) {
    if (!(v.norm() > tiny)) fail(ErrorCode::VanishingOnCircle, "map vanishes on the circle");
  }
  WindingState st{&f, tiny, max_refine};
  double total = 0.0;
  for (int k = 0; k < samples; ++k) {
    total += accumulate(st, kTwoPi * k / samples, vals[static_cast<std::size_t>(k)],
                        kTwoPi * (k + 1) / samples, vals[static_cast<std::size_t>(k) + 1], 0);
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6) fail(ErrorCode::UnderResolved, "non-integer winding");
  return static_cast<int>(rounded);
}

Mat2 fd_jacobian(const ChartFunction& f, const Vec2& uv, double h) {
  Mat2 J;
  for (int k = 0; k < 2; ++k) {
    Vec2 e = Vec2::Zero();
    e(k) = h;
    const auto fp = f(uv + e);
    const auto fm = f(uv - e);
    if (!fp || !fm) fail(ErrorCode::OutOfChart, "Jacobian stencil leaves the map's domain");
    J.col(k) = (*fp - *fm) / (2 * h);
  }
  return J;
}

std::optional<ChartRoot> refine_root(const Chart& chart, const ChartFunction& f, const Vec2& start,
                                     const RootSearchOptions& opts) {
  const Rect& d = chart.domain();
  const double cell = std::max(d.width(), d.height()) / opts.grid;
  auto in_domain = [&](const Vec2& p) {
    const bool ok_u = chart.periodic_u() || (p.x() >= d.u0 - cell && p.x() <= d.u1 + cell);
    const bool ok_v = chart.periodic_v() || (p.y() >= d.v0 - cell && p.y() <= d.v1 + cell);
    return ok_u && ok_v;
  };
  Vec2 x = start;
  auto fx = f(x);
  if (!fx) return std::nullopt;
  double r = fx->norm();
  double mu = 0.0;
  for (int it = 0; it < opts.max_newton && r > opts.zero_tol; ++it) {
    Mat2 J;
    try {
      J = fd_jacobian(f, x, opts.fd_step);
    } catch (const Error&) {
      return std::nullopt;
    }
    const Mat2 JtJ = J.transpose() * J;
    const Vec2 g = J.transpose() * *fx;
    bool improved = false;
    for (int attempt = 0; attempt < 8 && !improved; ++attempt) {
      Vec2 step;
      if (mu == 0.0 && std::abs(J.determinant()) > 1e-14 * (1.0 + JtJ.norm())) {
        step = -J.partialPivLu().solve(*fx);
      } else {
        const double damp = std::max(mu, 1e-12 * (1.0 + JtJ.trace()));
        step = -(JtJ + damp * Mat2::Identity()).ldlt().solve(g);
      }
      // Keep steps below a few cells so iterates stay near their seed.
      const double len = step.norm();
      if (len > 4 * cell) step *= 4 * cell / len;
      double lambda = 1.0;
      for (int ls = 0; ls < 30; ++ls) {
        const Vec2 cand = x + lambda * step;
        if (!in_domain(cand)) {
          lambda *= 0.5;
          continue;
        }
        const auto fc = f(cand);
        if (fc && fc->norm() < r) {
          x = cand;
          fx = fc;
          r = fc->norm();
          improved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (improved) {
        mu *= 0.3;
        if (mu < 1e-14) mu = 0.0;
      } else {
        mu = mu == 0.0 ? 1e-6 * (1.0 + JtJ.trace()) : mu * 100.0;
      }
    }
    if (!improved) break;
  }
  if (r > opts.zero_tol) return std::nullopt;
  // Polish: plain Newton steps while they still reduce the residual. Simple
  // zeros reach round-off in a step or two; degenerate ones keep creeping
  // towards the zero, which exposes their small Jacobian.
  for (int it = 0; it < 80 && r > 0; ++it) {
    Mat2 J;
    try {
      J = fd_jacobian(f, x, opts.fd_step);
    } catch (const Error&) {
      break;
    }
    const double det = J.determinant();
    if (det == 0.0) break;
    const Vec2 cand = x - J.inverse() * *fx;
    const auto fc = f(cand);
    if (!fc || !(fc->norm() < r)) break;
    x = cand;
    fx = fc;
    r = fc->norm();
  }
  ChartRoot root;
  root.uv = chart.wrap(x);
  root.residual = r;
  try {
    root.jacobian = fd_jacobian(f, x, opts.fd_step);
  } catch (const Error&) {
    return std::nullopt;
  }
  return root;
}

RootSearchResult locate_roots(const Chart& chart, const ChartFunction& f,
                              const RootSearchOptions& opts) {
  const Rect& d = chart.domain();
  const int n = opts.grid;
  const double hu = d.width() / n;
  const double hv = d.height() / n;
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  std::vector<std::optional<Vec2>> vals(stride * stride);
  parallel_for(stride, [&](std::size_t i) {
    for (std::size_t j = 0; j < stride; ++j) {
      vals[i * stride + j] = f(Vec2(d.u0 + hu * static_cast<double>(i), d.v0 + hv * static_cast<double>(j)));
    }
  });

  std::vector<std::size_t> candidates;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t idx[4] = {i * stride + j, (i + 1) * stride + j, (i + 1) * stride + j + 1,
                                  i * stride + j + 1};
      bool valid = true;
      for (auto k : idx) valid = valid && vals[k].has_value();
      if (!valid) continue;
      bool maybe = true;
      for (int c = 0; c < 2 && maybe; ++c) {
        double lo = (*vals[idx[0]])(c), hi = lo, amin = std::abs(lo);
        for (auto k : idx) {
          const double val = (*vals[k])(c);
          lo = std::min(lo, val);
          hi = std::max(hi, val);
          amin = std::min(amin, std::abs(val));
        }
        maybe = (lo <= 0 && hi >= 0) || amin <= hi - lo;
      }
      if (maybe) candidates.push_back(static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j));
    }
  }

  struct Outcome {
    std::optional<ChartRoot> root;
    bool unresolved = false;
    Vec2 centre = Vec2::Zero();
  };
  std::vector<Outcome> outcomes(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t c) {
    const int i = static_cast<int>(candidates[c] / static_cast<std::size_t>(n));
    const int j = static_cast<int>(candidates[c] % static_cast<std::size_t>(n));
    const Vec2 lo(d.u0 + hu * i, d.v0 + hv * j);
    const Vec2 centre = lo + Vec2(0.5 * hu, 0.5 * hv);
    Outcome& out = outcomes[c];
    out.centre = centre;
    out.root = refine_root(chart, f, centre, opts);
    if (out.root) return;
    // Boundary winding of the cell decides whether a zero was missed.
    auto edge = [&](double t) -> Vec2 {
      const double s = t / kTwoPi * 4.0;
      Vec2 p;
      if (s < 1) p = lo + Vec2(s * hu, 0);
      else if (s < 2) p = lo + Vec2(hu, (s - 1) * hv);
      else if (s < 3) p = lo + Vec2((3 - s) * hu, hv);
      else p = lo + Vec2(0, (4 - s) * hv);
      const auto v = f(p);
      return v ? *v : Vec2(0, 0);
    };
    try {
      out.unresolved = winding_number(edge, 64, 10) != 0;
    } catch (const Error&) {
      out.unresolved = true;
    }
  });

  RootSearchResult result;
  for (const auto& o : outcomes) {
    if (o.root) {
      bool duplicate = false;
      for (auto& r : result.roots) {
        if (uv_distance(chart, r.uv, o.root->uv) < opts.separation_tol) {
          duplicate = true;
          if (o.root->residual < r.residual) r = *o.root;
          break;
        }
      }
      if (!duplicate) result.roots.push_back(*o.root);
    } else if (o.unresolved) {
      result.unresolved.push_back(o.centre);
    }
  }
  std::sort(result.roots.begin(), result.roots.end(), [](const ChartRoot& a, const ChartRoot& b) {
    return a.uv.x() != b.uv.x() ? a.uv.x() < b.uv.x() : a.uv.y() < b.uv.y();
  });
  return result;
}

}  // namespace vmoidx
