#include "vmoidx/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "vmoidx/commands.hpp"
#include "vmoidx/degree.hpp"
#include "vmoidx/error.hpp"
#include "vmoidx/extension.hpp"
#include "vmoidx/gagliardo.hpp"
#include "vmoidx/index.hpp"
#include "vmoidx/qtensor.hpp"
#include "vmoidx/vmo.hpp"

namespace vmoidx {
namespace {

constexpr double kPi = std::numbers::pi;

// Tolerances and limits of the acceptance suite.
constexpr double kTripleSeconds = 5.0;
constexpr double kPoincareSeconds = 10.0;
constexpr double kGaussBonnetSeconds = 30.0;
constexpr double kGaussBonnetTol = 1e-4;
constexpr double kDegreeIntegralTol = 1e-6;
constexpr double kMorseSuiteSeconds = 300.0;
constexpr int kMorseFields = 200;
constexpr int kStabilityTrials = 1000;
constexpr double kDiagnosticDecrease = 10.0;
constexpr double kNormSlack = 1e-6;
constexpr int kExtensionScan = 512;
constexpr double kSineTol = 1e-8;
constexpr double kRefineLo = 0.9, kRefineHi = 1.1;
constexpr double kNormIdentityTol = 1e-12;
constexpr double kRoundTripTol = 1e-10;
constexpr int kRandomTensors = 10000;
constexpr double kDensitySlope = 1.9;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

TangentField planar(std::function<Vec2(double, double)> f, std::string label) {
  return TangentField(
      [f](const SurfacePoint& x) {
        const Vec2 w = f(x.position.x(), x.position.y());
        return Vec3(w.x(), w.y(), 0.0);
      },
      std::move(label));
}

// Brute-force winding of a planar field on the circle of radius r about the origin.
int circle_winding(const TangentField& v, const Surface& s, double r, int n = 20000) {
  double total = 0.0;
  auto at = [&](int k) {
    const double t = 2 * kPi * k / n;
    SurfacePoint p = s.point(0, Vec2::Zero());
    p.position = Vec3(r * std::cos(t), r * std::sin(t), 0.0);
    p.normal = Vec3::UnitZ();
    const Vec3 w = v(p);
    return Vec2(w.x(), w.y());
  };
  Vec2 prev = at(0);
  for (int k = 1; k <= n; ++k) {
    const Vec2 cur = at(k);
    total += std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.dot(cur));
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

int trace_winding(const BoundaryDatum& g, int n = 20000) {
  double total = 0.0;
  Vec3 prev = g.curves[0](0.0);
  for (int k = 1; k <= n; ++k) {
    const Vec3 cur = g.curves[0](2 * kPi * k / n);
    total += std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.head<2>().dot(cur.head<2>()));
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

IndexOptions index_options(const AcceptanceOptions& o) {
  IndexOptions io;
  io.search.roots = o.roots;
  io.seeds = {o.seed, o.seed + 1, o.seed + 2};
  return io;
}

using Check = CriterionResult (*)(const AcceptanceOptions&);

CriterionResult model_triple(const AcceptanceOptions& o) {
  CriterionResult r{1, "disk model fields", true, "", 0};
  const Surface disk = make_disk();
  struct Case {
    TangentField v;
    int ind, ind_minus;
  };
  const std::vector<Case> cases = {
      {planar([](double, double) { return Vec2(0, 1); }, "(0,1)"), 0, 1},
      {planar([](double x, double y) { return Vec2(-y, x); }, "(-y,x)"), 1, 0},
      {planar([](double x, double y) { return Vec2(y, x); }, "(y,x)"), -1, 2},
  };
  std::ostringstream d;
  for (const auto& c : cases) {
    Stopwatch w;
    const IndexReport rep = morse_check(disk, c.v, index_options(o));
    const double t = w.seconds();
    const bool ok = rep.ind == c.ind && rep.ind_minus == c.ind_minus && rep.morse_residual == 0 &&
                    t < kTripleSeconds;
    r.pass = r.pass && ok;
    d << c.v.label() << " -> (" << rep.ind << ", " << rep.ind_minus << ", residual " << rep.morse_residual
      << ", " << fmt("%.2f", t) << " s); ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult poincare_hopf(const AcceptanceOptions& o) {
  CriterionResult r{2, "closed-surface index equals chi", true, "", 0};
  const TangentField rot = planar([](double x, double y) { return Vec2(-y, x); }, "rotation");
  std::ostringstream d;
  for (const Surface& s : {make_sphere(), make_torus()}) {
    Stopwatch w;
    const IndexReport rep = morse_check(s, rot, index_options(o));
    const double t = w.seconds();
    const bool ok = rep.ind == s.euler_characteristic() && rep.morse_residual == 0 && t < kPoincareSeconds;
    r.pass = r.pass && ok;
    d << s.name() << ": ind " << rep.ind << ", chi " << s.euler_characteristic() << " (" << fmt("%.2f", t)
      << " s); ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult gauss_bonnet(const AcceptanceOptions&) {
  CriterionResult r{3, "gauss-bonnet degree identity", true, "", 0};
  Stopwatch w;
  const double sphere = gauss_bonnet_chi(make_sphere(), {512, 512}) / 2.0;
  const double torus = gauss_bonnet_chi(make_torus(2.0, 1.0), {512, 512}) / 2.0;
  const double t = w.seconds();
  r.pass = std::abs(sphere - 1.0) <= kGaussBonnetTol && std::abs(torus) <= kGaussBonnetTol &&
           t < kGaussBonnetSeconds;
  r.detail = "sphere " + fmt("%.10f", sphere) + ", torus " + fmt("%.3e", torus) + " (" + fmt("%.2f", t) + " s)";
  return r;
}

CriterionResult degree_consistency(const AcceptanceOptions& o) {
  CriterionResult r{4, "degree by preimages and by integral", true, "", 0};
  DegreeOptions dopt;
  dopt.roots = o.roots;
  double worst = 0.0;
  std::ostringstream d;
  for (int k = -3; k <= 3; ++k) {
    const CircleMap m = power_map(k);
    const double integral = degree_integral(m);
    const long rounded = std::lround(integral);
    worst = std::max(worst, std::abs(integral - static_cast<double>(rounded)));
    // The power map z^0 hits only (1, 0), so any other point is regular.
    const int pre = k == 0 ? degree_preimage(m, Vec2(0, 1), dopt) : degree_preimage_retry(m, Vec2(1, 0), o.seed, dopt);
    r.pass = r.pass && pre == rounded && rounded == k;
    d << "z^" << k << ": " << pre << "; ";
  }
  const Surface sphere = make_sphere();
  const Vec3 p = Vec3(0.3, -0.2, 0.9).normalized();
  for (const SphereMap& m : {identity_map(sphere), antipodal_map(sphere)}) {
    const double integral = degree_integral(m);
    const long rounded = std::lround(integral);
    worst = std::max(worst, std::abs(integral - static_cast<double>(rounded)));
    const int pre = degree_preimage_retry(m, p, o.seed, dopt);
    r.pass = r.pass && pre == rounded;
    d << m.label << ": " << pre << "; ";
  }
  r.pass = r.pass && worst <= kDegreeIntegralTol;
  d << "max integral offset " << fmt("%.2e", worst);
  r.detail = d.str();
  return r;
}

CriterionResult morse_suite(const AcceptanceOptions& o) {
  CriterionResult r{5, "morse identity on random transverse fields", true, "", 0};
  Stopwatch w;
  const Surface disk = make_disk();
  const Surface annulus = make_annulus();
  const IndexOptions io = index_options(o);
  int checked[2] = {0, 0};
  int failures = 0;
  std::uint64_t seed = o.seed * 100003;
  const std::uint64_t last = seed + 20 * kMorseFields;
  for (; (checked[0] < kMorseFields || checked[1] < kMorseFields) && seed < last; ++seed) {
    const TangentField v = random_planar_polynomial_field(3, seed);
    for (int which = 0; which < 2; ++which) {
      const Surface& s = which == 0 ? disk : annulus;
      if (checked[which] >= kMorseFields || boundary_norm_range(s, v, 4096).min <= 1e-3) continue;
      int ind;
      try {
        ind = index_transverse(s, v, io);
      } catch (const Error&) {
        continue;
      }
      const int ind_minus = inward_boundary_index(s, v, io);
      int oracle = circle_winding(v, s, 1.0);
      if (which == 1) oracle -= circle_winding(v, s, 0.5);
      if (s.euler_characteristic() - ind - ind_minus != 0 || ind != oracle) ++failures;
      ++checked[which];
    }
  }
  const double t = w.seconds();
  r.pass = failures == 0 && checked[0] == kMorseFields && checked[1] == kMorseFields && t < kMorseSuiteSeconds;
  r.detail = std::to_string(checked[0]) + " disk + " + std::to_string(checked[1]) + " annulus fields, " +
             std::to_string(failures) + " failures (" + fmt("%.1f", t) + " s)";
  return r;
}

CriterionResult stability(const AcceptanceOptions& o) {
  CriterionResult r{6, "stability under small boundary perturbations", true, "", 0};
  const Surface disk = make_disk();
  const IndexOptions io = index_options(o);
  std::mt19937_64 rng(o.seed + 2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<TangentField> bases = {
      planar([](double, double) { return Vec2(0, 1); }, "(0,1)"),
      planar([](double x, double y) { return Vec2(y, x); }, "(y,x)"),
      planar([](double x, double y) { return Vec2(x * x - y * y + 0.3, 2 * x * y - 0.1); }, "(x^2-y^2+0.3,2xy-0.1)"),
  };
  std::ostringstream d;
  for (const auto& v : bases) {
    const double eps1 = stability_radius(disk, v);
    const int ind_minus = inward_boundary_index(disk, v, io);
    const int winding = circle_winding(v, disk, 1.0);
    const int ind = index_continuous(disk, v, io);
    int changed = 0, continuous_checks = 0;
    for (int k = 0; k < kStabilityTrials; ++k) {
      const double amp = 0.999 * eps1 * U(rng);
      const TangentField p = random_polynomial_perturbation(disk, amp, rng());
      const TangentField pert([v, p](const SurfacePoint& x) { return Vec3(v(x) + p(x)); }, "perturbed");
      bool same = inward_boundary_index(disk, pert, io) == ind_minus && circle_winding(pert, disk, 1.0) == winding;
      if (k % 50 == 0) {
        same = same && index_continuous(disk, pert, io) == ind;
        ++continuous_checks;
      }
      changed += !same;
    }
    r.pass = r.pass && changed == 0;
    d << v.label() << ": " << changed << "/" << kStabilityTrials << " changed; ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult vmo_pipeline(const AcceptanceOptions& o) {
  CriterionResult r{7, "vmo index certificate and diagnostics", true, "", 0};
  VmoOptions vo;
  vo.index = index_options(o);
  std::ostringstream d;
  auto grid = [](const Surface& s) {
    std::vector<double> g;
    for (int k = 3; k <= 6; ++k) g.push_back(s.r0() / std::pow(2.0, k));
    return g;
  };

  const Surface disk = make_disk();
  const Surface torus = make_torus();
  const TangentField saddle = planar([](double x, double y) { return Vec2(y, x); }, "(y,x)");
  const TangentField around = planar([](double x, double y) { return Vec2(-y, x); }, "longitude");
  for (auto [s, v] : {std::pair{&disk, &saddle}, std::pair{&torus, &around}}) {
    const VmoIndexResult res = vmo_index(*s, vmo_field(*s, *v), grid(*s), vo);
    const int cont = index_continuous(*s, *v, vo.index);
    const bool ok = res.certified && res.report.ind == cont && res.report.morse_residual == 0;
    r.pass = r.pass && ok;
    d << s->name() << " " << v->label() << ": ind " << res.report.ind << " vs continuous " << cont << "; ";
  }

  VmoField vortex;
  vortex.values = [](const SurfacePoint& p) {
    const double rad = p.position.head<2>().norm();
    if (rad < 1e-300) return Vec3(0, 0, 0);
    return Vec3(-p.position.y() / rad, p.position.x() / rad, 0.0);
  };
  vortex.trace.curves = {[](double t) { return Vec3(-std::sin(t), std::cos(t), 0.0); }};
  vortex.label = "vortex";
  const int oracle = trace_winding(vortex.trace);
  const VmoIndexResult vr = vmo_index(disk, vortex, grid(disk), vo);
  r.pass = r.pass && vr.certified && vr.report.ind == oracle && vr.report.morse_residual == 0;
  d << "vortex: ind " << vr.report.ind << " vs winding " << oracle << "; ";

  // Diagnostics over the default grid r0/2 ... r0/64.
  const Surface sphere = make_sphere();
  const TangentField up([](const SurfacePoint&) { return Vec3(0.2, 0, 1); }, "up");
  const auto srows = vmo_diagnostics(sphere, vmo_field(sphere, up), default_eps_grid(sphere), vo, 16, 64);
  const double interior = srows.front().sup_u_minus_bar / srows.back().sup_u_minus_bar;
  const auto drows = vmo_diagnostics(disk, vmo_field(disk, saddle), default_eps_grid(disk), vo, 16, 128);
  const double boundary = drows.front().sup_boundary_u_minus_g / drows.back().sup_boundary_u_minus_g;
  r.pass = r.pass && interior >= kDiagnosticDecrease && boundary >= kDiagnosticDecrease;
  d << "sup|u-ubar| drops " << fmt("%.1f", interior) << "x, sup|u-g| on the boundary drops "
    << fmt("%.1f", boundary) << "x";
  r.detail = d.str();
  return r;
}

CriterionResult extension(const AcceptanceOptions& o) {
  CriterionResult r{8, "boundary datum extension", true, "", 0};
  ExtensionOptions eo;
  eo.index = index_options(o);
  eo.seed = o.seed;
  std::ostringstream d;
  struct Case {
    Surface s;
    std::string datum;
  };
  for (const Case& c : {Case{make_disk(), "0, 1, 0"}, Case{make_annulus(), "-sin(theta), cos(theta), 0"}}) {
    const BoundaryDatum g = datum_from_expression(c.s, c.datum);
    const NormRange range = datum_norm_range(c.s, g);
    const ExtensionResult ext = extend_boundary_datum(c.s, g, range.min, range.max, eo);
    const ScanResult scan = norm_scan(c.s, ext.field, kExtensionScan);
    const IndexReport rep = morse_check(c.s, ext.field, eo.index);
    const bool ok = scan.min_norm >= range.min * (1 - kNormSlack) && scan.max_norm <= range.max * (1 + kNormSlack) &&
                    rep.morse_residual == 0 && rep.ind == 0 && ext.ind_minus_g == c.s.euler_characteristic();
    r.pass = r.pass && ok;
    d << c.s.name() << ": ind_- " << ext.ind_minus_g << ", |v| in [" << fmt("%.9f", scan.min_norm) << ", "
      << fmt("%.9f", scan.max_norm) << "], residual " << rep.morse_residual << "; ";
  }
  RunConfig cfg;
  cfg.preset = "extend-tangent";
  cfg.seed = o.seed;
  cfg.tol_zero = o.roots.zero_tol;
  cfg.tol_jac = o.roots.jac_tol;
  cfg.grid = o.roots.grid;
  const RunReport rep = run_command("extend", cfg);
  r.pass = r.pass && rep.exit_code == 2;
  d << "tangent datum on the disk: exit " << rep.exit_code;
  r.detail = d.str();
  return r;
}

CriterionResult gagliardo(const AcceptanceOptions&) {
  CriterionResult r{9, "gagliardo extension", true, "", 0};
  const ScalarDatum g = [](double y) { return std::sin(y); };
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double y = -1.0 + 0.15 * i;
    for (double t : {1e-4, 1e-2, 0.1, 0.5, 1.0}) {
      worst = std::max(worst, std::abs(gagliardo_value(g, y, t) - std::sin(y) * std::sin(t) / t));
    }
  }
  GagliardoOptions coarse;
  coarse.grid = 16;
  GagliardoOptions fine = coarse;
  fine.grid = 64;
  const double ratio = w1p_estimate(g, fine) / w1p_estimate(g, coarse);
  r.pass = worst <= kSineTol && ratio >= kRefineLo && ratio <= kRefineHi;
  r.detail = "sine error " + fmt("%.2e", worst) + ", refinement ratio " + fmt("%.4f", ratio);
  return r;
}

SurfacePoint random_point(const Surface& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (true) {
    const auto& patches = s.patches();
    const int pid = patches[static_cast<std::size_t>(u(rng) * static_cast<double>(patches.size())) % patches.size()];
    const Rect& d = s.chart(pid).domain();
    const SurfacePoint p = s.point(pid, Vec2(d.u0 + d.width() * u(rng), d.v0 + d.height() * u(rng)));
    if (s.contains(p) && p.tangents.col(0).norm() > 1e-6 && p.tangents.col(1).norm() > 1e-6) return p;
  }
}

CriterionResult line_fields(const AcceptanceOptions& o) {
  CriterionResult r{10, "q-tensors and line fields", true, "", 0};
  std::ostringstream d;
  std::mt19937_64 rng(o.seed + 11);
  std::uniform_real_distribution<double> us(0.0, 3.0), ua(0.0, 2 * kPi);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Surface torus = make_torus(2.0, 1.0);
  const Surface sphere = make_sphere();
  double norm_err = 0.0, trip_err = 0.0;
  for (int k = 0; k < kRandomTensors; ++k) {
    const Surface& s = k % 2 ? torus : sphere;
    const SurfacePoint x = random_point(s, rng);
    const Vec3 e1 = x.tangents.col(0).normalized();
    const Vec3 e2 = x.normal.cross(e1);
    const double a = ua(rng), sv = us(rng);
    const QTensor q = q_from_director(x, std::cos(a) * e1 + std::sin(a) * e2, sv);
    norm_err = std::max(norm_err, std::abs(q_dot(q, q) - 0.5 * sv * sv));
    const QFrame f = q_frame(x);
    const QTensor g = normal(rng) * f.X + normal(rng) * f.Y;
    const Director dir = director_from_q(x, g);
    trip_err = std::max(trip_err, (q_from_director(x, dir.n, dir.s) - g).norm());
  }
  r.pass = norm_err <= kNormIdentityTol && trip_err <= kRoundTripTol;
  d << "norm identity " << fmt("%.1e", norm_err) << ", round trip " << fmt("%.1e", trip_err) << "; ";

  RootSearchOptions ro = o.roots;
  for (double k : {0.5, 1.5}) {
    const QField q = q_field(torus_half_turn_field(k));
    const Holonomy h = orientability_check(torus, q, generating_loops(torus));
    double total = 0.0;
    for (const auto& sing : linefield_singularities(torus, q, ro)) total += sing.index;
    const bool ok = h.signs.size() == 2 && h.signs[1] == -1 && !h.orientable &&
                    total == static_cast<double>(torus.euler_characteristic());
    r.pass = r.pass && ok;
    d << "torus k=" << k << ": phi-loop holonomy " << (h.signs.size() == 2 ? h.signs[1] : 0) << ", index sum "
      << total << "; ";
  }

  const Surface disk = make_disk();
  LineField half;
  half.direction = [](const SurfacePoint& x) {
    const double a = 0.5 * std::atan2(x.position.y(), x.position.x());
    return Vec3(std::cos(a), std::sin(a), 0.0);
  };
  half.order = [](const SurfacePoint&) { return std::sqrt(2.0); };
  const double idx = linefield_index(disk, q_field(half), disk.point(0, Vec2(0, 0)), 0.5);
  r.pass = r.pass && idx == 0.5;
  d << "planar theta/2 index " << idx;
  r.detail = d.str();
  return r;
}

CriterionResult density(const AcceptanceOptions&) {
  CriterionResult r{11, "boundary density slope", false, "", 0};
  const Surface disk = make_disk();
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
  double doubled = 0.0;
  for (const auto& e : boundary_density_check(disk, 0, 0.3, eps)) doubled = std::max(doubled, e.deviation);
  const double planar_slope = loglog_slope(planar_density_check(disk, 0, 0.3, eps));
  // A slope needs deviations above round-off.
  const bool doubled_measurable = doubled > 1e-12;
  const double doubled_slope = doubled_measurable ? loglog_slope(boundary_density_check(disk, 0, 0.3, eps)) : 0.0;
  r.pass = (doubled_measurable && doubled_slope >= kDensitySlope) || planar_slope >= kDensitySlope;
  std::ostringstream d;
  d << "doubled collar: max deviation " << fmt("%.1e", doubled)
    << (doubled_measurable ? ", slope " + fmt("%.2f", doubled_slope) : std::string(", slope undefined"))
    << "; planar discs: slope " << fmt("%.3f", planar_slope) << " (need " << kDensitySlope << ")";
  r.detail = d.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  static const std::vector<std::pair<int, Check>> checks = {
      {1, model_triple}, {2, poincare_hopf}, {3, gauss_bonnet}, {4, degree_consistency},
      {5, morse_suite},  {6, stability},     {7, vmo_pipeline}, {8, extension},
      {9, gagliardo},    {10, line_fields},  {11, density},
  };
  static const char* names[] = {"",
                                "disk model fields",
                                "closed-surface index equals chi",
                                "gauss-bonnet degree identity",
                                "degree by preimages and by integral",
                                "morse identity on random transverse fields",
                                "stability under small boundary perturbations",
                                "vmo index certificate and diagnostics",
                                "boundary datum extension",
                                "gagliardo extension",
                                "q-tensors and line fields",
                                "boundary density slope"};
  std::vector<CriterionResult> out;
  for (const auto& [id, check] : checks) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
    Stopwatch w;
    CriterionResult r;
    try {
      r = check(opts);
    } catch (const std::exception& e) {
      r = CriterionResult{id, names[id], false, std::string("error: ") + e.what(), 0};
    }
    r.seconds = w.seconds();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  char head[32];
  std::snprintf(head, sizeof head, "%s %2d ", r.pass ? "PASS" : "FAIL", r.id);
  std::string detail = r.detail;
  while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
  return head + r.name + ": " + detail + " (" + fmt("%.2f", r.seconds) + " s)";
}

}  // namespace vmoidx
