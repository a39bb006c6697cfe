#include "vmoidx/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "vmoidx/error.hpp"
#include "vmoidx/expression.hpp"
#include "vmoidx/parallel.hpp"

namespace vmoidx {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3 - 2 * t);
}

VarValues vars_at(const SurfacePoint& x) {
  VarValues vars{};
  vars[static_cast<std::size_t>(Var::X)] = x.position.x();
  vars[static_cast<std::size_t>(Var::Y)] = x.position.y();
  vars[static_cast<std::size_t>(Var::Z)] = x.position.z();
  vars[static_cast<std::size_t>(Var::U)] = x.uv.x();
  vars[static_cast<std::size_t>(Var::V)] = x.uv.y();
  return vars;
}

Vec2 frame_coefficients(const Mat32& t, const Vec3& w) {
  return (t.transpose() * t).ldlt().solve(t.transpose() * w);
}

double bounding_radius(const Surface& s) {
  double r = 0.0;
  for (int pid : s.patches()) {
    const Rect& d = s.chart(pid).domain();
    constexpr int n = 24;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Vec2 uv(d.u0 + d.width() * i / n, d.v0 + d.height() * j / n);
        r = std::max(r, s.chart(pid).embed(uv).norm());
      }
    }
  }
  return r > 0 ? r : 1.0;
}

}  // namespace

TangentField::TangentField(Ambient f, std::string label) : f_(std::move(f)), label_(std::move(label)) {}

TangentField TangentField::scaled(double factor) const {
  auto f = f_;
  return TangentField([f, factor](const SurfacePoint& x) { return Vec3(factor * f(x)); },
                      label_ + "*" + std::to_string(factor));
}

TangentField field_from_expression(const Surface& s, const std::string& text) {
  const auto comps = parse_expression_list(text);
  if (comps.size() == 3) {
    return TangentField(
        [comps](const SurfacePoint& x) {
          const VarValues vars = vars_at(x);
          return Vec3(comps[0].eval(vars), comps[1].eval(vars), comps[2].eval(vars));
        },
        text);
  }
  if (comps.size() == 2) {
    auto surf = std::make_shared<const Surface>(s);
    return TangentField(
        [comps, surf](const SurfacePoint& x) {
          const SurfacePoint c = surf->canonical(x);
          const VarValues vars = vars_at(c);
          return Vec3(comps[0].eval(vars) * c.tangents.col(0) + comps[1].eval(vars) * c.tangents.col(1));
        },
        text);
  }
  fail(ErrorCode::ParseError, "field needs 2 or 3 components: \"" + text + "\"");
}

namespace {

struct ChartGrid {
  int chart = 0;
  std::vector<double> us, vs;
  std::vector<Vec3> values;  // row-major in u
  const Vec3& at(std::size_t i, std::size_t j) const { return values[i * vs.size() + j]; }
};

std::size_t bracket(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  return std::min(i, xs.size() - 2);
}

}  // namespace

TangentField sampled_field_from_csv_text(const Surface& s, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<int, std::map<std::pair<double, double>, Vec3>> rows;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen && line.find_first_of("abcdefghijklmnopqrstuvwxyz") != std::string::npos) {
      header_seen = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    int chart = 0;
    double u = 0, v = 0;
    Vec3 w;
    if (!(ls >> chart >> u >> v >> w.x() >> w.y() >> w.z()))
      fail(ErrorCode::ConfigError, "bad sample row at line " + std::to_string(lineno));
    if (chart < 0 || chart >= static_cast<int>(s.charts().size()))
      fail(ErrorCode::ConfigError, "unknown chart id at line " + std::to_string(lineno));
    rows[chart][{u, v}] = w;
  }
  if (rows.empty()) fail(ErrorCode::ConfigError, "no samples in field CSV");
  auto grids = std::make_shared<std::vector<ChartGrid>>();
  for (const auto& [chart, samples] : rows) {
    ChartGrid g;
    g.chart = chart;
    for (const auto& [uv, w] : samples) {
      g.us.push_back(uv.first);
      g.vs.push_back(uv.second);
    }
    std::sort(g.us.begin(), g.us.end());
    g.us.erase(std::unique(g.us.begin(), g.us.end()), g.us.end());
    std::sort(g.vs.begin(), g.vs.end());
    g.vs.erase(std::unique(g.vs.begin(), g.vs.end()), g.vs.end());
    if (g.us.size() < 2 || g.vs.size() < 2 || g.us.size() * g.vs.size() != samples.size())
      fail(ErrorCode::ConfigError, "samples of chart " + std::to_string(chart) + " are not a full grid");
    for (double u : g.us)
      for (double v : g.vs) g.values.push_back(samples.at({u, v}));
    grids->push_back(std::move(g));
  }
  auto surf = std::make_shared<const Surface>(s);
  return TangentField(
      [grids, surf](const SurfacePoint& x) -> Vec3 {
        for (const auto& g : *grids) {
          SurfacePoint p;
          try {
            p = surf->to_chart(x, g.chart);
          } catch (const Error&) {
            continue;
          }
          const double u = p.uv.x(), v = p.uv.y();
          if (u < g.us.front() || u > g.us.back() || v < g.vs.front() || v > g.vs.back()) continue;
          const std::size_t i = bracket(g.us, u), j = bracket(g.vs, v);
          const double a = (u - g.us[i]) / (g.us[i + 1] - g.us[i]);
          const double b = (v - g.vs[j]) / (g.vs[j + 1] - g.vs[j]);
          return (1 - a) * (1 - b) * g.at(i, j) + a * (1 - b) * g.at(i + 1, j) +
                 (1 - a) * b * g.at(i, j + 1) + a * b * g.at(i + 1, j + 1);
        }
        return Vec3::Zero();
      },
      "sampled");
}

TangentField load_sampled_field(const Surface& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open field CSV '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return sampled_field_from_csv_text(s, ss.str());
}

Vec2 pushforward(const Surface& s, int chart, const TangentField& v, const Vec2& xi) {
  const Chart& c = s.chart(chart);
  if (!c.domain().contains(c.wrap(xi), 1e-12))
    fail(ErrorCode::OutOfChart, "parameter outside chart '" + c.name() + "'");
  const SurfacePoint p = s.point(chart, xi);
  return frame_coefficients(p.tangents, v(p));
}

NormRange boundary_norm_range(const Surface& s, const TangentField& v, int samples) {
  NormRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& curve : s.boundary()) {
    for (int k = 0; k < samples; ++k) {
      const double n = v(curve.point(kTwoPi * k / samples)).norm();
      r.min = std::min(r.min, n);
      r.max = std::max(r.max, n);
    }
  }
  if (s.closed()) r.min = 0.0;
  return r;
}

NormRange interior_norm_range(const Surface& s, const TangentField& v, int n) {
  NormRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (int pid : s.patches()) {
    const Chart& c = s.chart(pid);
    const Rect& d = c.domain();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 uv(d.u0 + d.width() * (i + 0.5) / n, d.v0 + d.height() * (j + 0.5) / n);
        const double val = v(s.point(pid, uv)).norm();
        r.min = std::min(r.min, val);
        r.max = std::max(r.max, val);
      }
    }
  }
  return r;
}

std::vector<Zero> find_zeros(const Surface& s, const TangentField& v, const ZeroSearchOptions& opts) {
  if (opts.check_boundary && !s.closed()) {
    const NormRange br = boundary_norm_range(s, v, opts.boundary_samples);
    if (br.min <= opts.roots.zero_tol)
      fail(ErrorCode::ZeroOnBoundary, "field vanishes on the boundary (min |v| = " +
                                          std::to_string(br.min) + ")");
  }
  std::vector<Zero> zeros;
  for (int cid : s.scan_charts()) {
    const Chart& chart = s.chart(cid);
    ChartFunction f = [&v, &chart, cid](const Vec2& uv) -> std::optional<Vec2> {
      const SurfacePoint p = chart_point(chart, cid, uv);
      return frame_coefficients(p.tangents, v(p));
    };
    const RootSearchResult res = locate_roots(chart, f, opts.roots);
    auto accepted = [&](const SurfacePoint& p) {
      return chart.owns(p.uv) && s.contains(p) && (!opts.region || opts.region(p));
    };
    std::vector<Zero> local;
    for (const auto& r : res.roots) {
      const SurfacePoint p = s.point(cid, r.uv);
      if (!accepted(p)) continue;
      Zero z;
      z.location = p;
      z.chart_jacobian = r.jacobian;
      const double det = r.jacobian.determinant();
      z.sign = det > 0 ? 1 : (det < 0 ? -1 : 0);
      z.nondegenerate = std::abs(det) > opts.roots.jac_tol;
      z.refine_residual = r.residual;
      local.push_back(z);
    }
    const double cell =
        std::max(chart.domain().width(), chart.domain().height()) / opts.roots.grid;
    for (const Vec2& centre : res.unresolved) {
      const SurfacePoint p = s.point(cid, centre);
      if (!accepted(p)) continue;
      bool explained = false;
      for (const auto& z : local) {
        const Vec2 d = z.location.uv - centre;
        if (d.norm() < 2.5 * cell) explained = true;
      }
      for (const auto& z : zeros) {
        if ((z.location.position - p.position).norm() < 2.5 * cell) explained = true;
      }
      if (!explained)
        fail(ErrorCode::ClusterUnresolved,
             "Newton did not converge in a cell with nonzero winding on chart '" + chart.name() + "'");
    }
    for (const auto& z : local) {
      bool duplicate = false;
      for (const auto& other : zeros) {
        if ((other.location.position - z.location.position).norm() < opts.roots.separation_tol) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) zeros.push_back(z);
    }
  }
  return zeros;
}

bool all_nondegenerate(const std::vector<Zero>& zeros) {
  return std::all_of(zeros.begin(), zeros.end(), [](const Zero& z) { return z.nondegenerate; });
}

TangentField random_polynomial_perturbation(const Surface& s, double amplitude, std::uint64_t seed) {
  const double L = bounding_radius(s);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Monomials of degree <= 2 in (x, y, z): 10 terms, each a 3-vector coefficient.
  std::array<Vec3, 10> coef;
  double l1 = 0.0;
  for (auto& c : coef) {
    c = Vec3(normal(rng), normal(rng), normal(rng));
    l1 += c.norm();
  }
  for (auto& c : coef) c *= amplitude / l1;
  return TangentField(
      [coef, L](const SurfacePoint& x) {
        const Vec3 p = x.position / L;
        const double m[10] = {1.0,         p.x(),       p.y(),       p.z(),       p.x() * p.x(),
                              p.y() * p.y(), p.z() * p.z(), p.x() * p.y(), p.x() * p.z(), p.y() * p.z()};
        Vec3 w = Vec3::Zero();
        for (int k = 0; k < 10; ++k) w += m[k] * coef[static_cast<std::size_t>(k)];
        return w;
      },
      "perturbation");
}

TangentField transverse_perturb(const Surface& s, const TangentField& v, double budget,
                                std::uint64_t seed, const PerturbOptions& opts) {
  try {
    if (all_nondegenerate(find_zeros(s, v, opts.search))) return v;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ClusterUnresolved) throw;
  }
  if (!(budget > 0)) fail(ErrorCode::BudgetExceeded, "field is degenerate and the budget is zero");
  if (!s.closed() && !opts.freeze_boundary) {
    const double bmin = boundary_norm_range(s, v, opts.search.boundary_samples).min;
    if (budget >= bmin)
      fail(ErrorCode::BudgetExceeded, "budget must stay below the boundary norm " + std::to_string(bmin));
  }
  auto dist = opts.freeze_distance;
  if (!dist) dist = [&s](const SurfacePoint& x) { return s.distance_to_boundary(x); };
  const bool freeze = opts.freeze_boundary && !s.closed();
  const double width = opts.freeze_width;
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    const std::uint64_t trial_seed = seed * 1000003ULL + static_cast<std::uint64_t>(attempt);
    const TangentField p = random_polynomial_perturbation(s, budget, trial_seed);
    TangentField u(
        [v, p, freeze, dist, width](const SurfacePoint& x) {
          const double eta = freeze ? smoothstep(dist(x) / width) : 1.0;
          return Vec3(v(x) + eta * p(x));
        },
        v.label() + "+perturbation");
    try {
      if (all_nondegenerate(find_zeros(s, u, opts.search))) return u;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ClusterUnresolved) throw;
    }
  }
  fail(ErrorCode::BudgetExceeded,
       "no transverse perturbation found in " + std::to_string(opts.max_retries) + " attempts");
}

TangentField random_planar_polynomial_field(int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::array<double, 4>> terms;  // (i, j, a, b): x^i y^j (a, b)
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; i + j <= degree; ++j) {
      const double a = normal(rng);
      const double b = normal(rng);
      terms.push_back({static_cast<double>(i), static_cast<double>(j), a, b});
    }
  }
  return TangentField(
      [terms](const SurfacePoint& x) {
        Vec3 w = Vec3::Zero();
        for (const auto& t : terms) {
          const double m = std::pow(x.position.x(), t[0]) * std::pow(x.position.y(), t[1]);
          w.x() += t[2] * m;
          w.y() += t[3] * m;
        }
        return w;
      },
      "random-polynomial");
}

BoundaryDatum trace(const Surface& s, const TangentField& v) {
  BoundaryDatum g;
  g.label = "trace(" + v.label() + ")";
  for (const auto& curve : s.boundary()) {
    auto point = curve.point;
    g.curves.push_back([point, v](double th) { return v(point(th)); });
  }
  return g;
}

BoundaryDatum datum_from_expression(const Surface& s, const std::string& text) {
  const auto comps = parse_expression_list(text);
  if (comps.size() != 3) fail(ErrorCode::ParseError, "datum needs three ambient components");
  BoundaryDatum g;
  g.label = text;
  for (const auto& curve : s.boundary()) {
    auto point = curve.point;
    g.curves.push_back([point, comps](double th) {
      const SurfacePoint x = point(th);
      VarValues vars = vars_at(x);
      vars[static_cast<std::size_t>(Var::Theta)] = th;
      return tangent_project(x, Vec3(comps[0].eval(vars), comps[1].eval(vars), comps[2].eval(vars)));
    });
  }
  return g;
}

NormRange datum_norm_range(const Surface& s, const BoundaryDatum& g, int samples) {
  NormRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t c = 0; c < g.curves.size() && c < s.boundary().size(); ++c) {
    for (int k = 0; k < samples; ++k) {
      const double n = g.curves[c](kTwoPi * k / samples).norm();
      r.min = std::min(r.min, n);
      r.max = std::max(r.max, n);
    }
  }
  return r;
}

}  // namespace vmoidx
