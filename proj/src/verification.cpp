#include "conekit/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "conekit/parallel.hpp"

namespace conekit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kWorstKept = 5;
constexpr double kHuge = std::numeric_limits<double>::max();

double sanitize(double v) { return std::isfinite(v) ? v : kHuge; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Offenders sorted by residual (descending), ties by sample index.
std::vector<Offender> worst_of(const std::vector<std::vector<double>>& points, const std::vector<double>& residuals) {
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return sanitize(residuals[a]) > sanitize(residuals[b]);
  });
  std::vector<Offender> out;
  for (std::size_t i = 0; i < std::min(kWorstKept, idx.size()); ++i)
    out.push_back({points[idx[i]], sanitize(residuals[idx[i]])});
  return out;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, sanitize(x));
  return m;
}

std::vector<Jet2> constants(std::span<const double> p) { return std::vector<Jet2>(p.begin(), p.end()); }

// Records the first few distinct failure messages.
void add_errors(VerificationReport& rep, const std::vector<std::string>& errors) {
  std::size_t kept = 0;
  for (std::size_t i = 0; i < errors.size() && kept < 3; ++i) {
    if (errors[i].empty()) continue;
    rep.notes.push_back("sample " + std::to_string(i) + ": " + errors[i]);
    ++kept;
  }
}

double interval_sample(double lo, double hi, double margin, double u) {
  const double len = hi - lo;
  return lo + len * (margin + (1.0 - 2.0 * margin) * u);
}

std::vector<double> link_sample(const LinkMetric& lm, SampleStream& s, const SampleSpec& spec) {
  std::vector<double> p;
  p.push_back(s.uniform(0.0, kTwoPi));
  p.push_back(interval_sample(lm.y1, lm.y2, spec.margin, s.uniform()));
  p.push_back(s.uniform(0.0, kTwoPi));
  const auto b = sample_base(lm.base, s, spec.base_radius);
  p.insert(p.end(), b.begin(), b.end());
  return p;
}

std::string str(const Rational& r) { return r.str(); }


double y_prime(double y, double nu, int n) { return Y_func(Jet2::variable(y, 0, 1), nu, n).d(0); }
double x_prime(double x, double mu, int n) { return X_func(Jet2::variable(x, 0, 1), mu, n).d(0); }

}  // namespace

void SampleSpec::validate() const {
  if (interior_points < 1 || link_points < 1 || asymptotic_points < 1 || calabi_points < 1 || lemma_grid < 2)
    throw PreconditionError("sample counts must be >= 1 (lemma grid >= 2)");
  if (!(margin > 0.0 && margin < 0.5)) throw PreconditionError("sampling margin must lie in (0, 0.5)");
  if (!(x_span > 0.0)) throw PreconditionError("x span must be positive");
  if (!(base_radius > 0.0)) throw PreconditionError("base radius must be positive");
  if (r_grid.size() < 2) throw PreconditionError("r grid needs at least two radii");
  if (collapse_radii.size() != 2 || !(collapse_radii[0] > 0.0 && collapse_radii[1] > 0.0) ||
      collapse_radii[0] == collapse_radii[1])
    throw PreconditionError("collapse extraction needs two distinct positive radii");
}

void VerificationReport::add_check(const std::string& name, double residual, double tolerance) {
  Check c;
  c.name = name;
  c.residual = sanitize(residual);
  c.tolerance = tolerance;
  c.pass = std::isfinite(residual) && residual < tolerance;
  checks.push_back(c);
}

void VerificationReport::add_exact(const std::string& name, bool equal) { add_check(name, equal ? 0.0 : 1.0, 1.0); }

void VerificationReport::finalize() {
  if (checks.empty()) {
    max_residual = 0.0;
    tolerance = 0.0;
    pass = false;
    return;
  }
  std::size_t worst_i = 0;
  double worst_ratio = -1.0;
  pass = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const double ratio = checks[i].residual / checks[i].tolerance;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_i = i;
    }
    pass = pass && checks[i].pass;
  }
  max_residual = checks[worst_i].residual;
  tolerance = checks[worst_i].tolerance;
}

SampleStream::SampleStream(std::uint64_t seed, const std::string& salt) : rng_(seed ^ fnv1a(salt)) {}

double SampleStream::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::vector<double> sample_base(const BaseManifold& base, SampleStream& s, double radius) {
  std::vector<double> out;
  for (int d : base.factor_dims()) {
    // Square of half-width radius/√(2m) per factor keeps |z| ≤ radius.
    const int m = d - 1;
    const double half = radius / std::sqrt(2.0 * m);
    for (int i = 0; i < 2 * m; ++i) out.push_back(s.uniform(-half, half));
  }
  return out;
}

std::vector<std::vector<double>> sample_interior(const AssembledMetric& am, const SampleSpec& spec) {
  spec.validate();
  SampleStream s(spec.seed, "interior:" + am.family().id());
  const RootSolution& rs = am.roots();
  const double lo = rs.branch == Branch::XMinus ? rs.x_star - spec.x_span : rs.x_star;
  const double hi = rs.branch == Branch::XMinus ? rs.x_star : rs.x_star + spec.x_span;
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < spec.interior_points; ++i) {
    std::vector<double> p;
    p.push_back(interval_sample(lo, hi, spec.margin, s.uniform()));
    p.push_back(interval_sample(rs.y1, rs.y2, spec.margin, s.uniform()));
    p.push_back(s.uniform(0.0, kTwoPi));
    p.push_back(s.uniform(0.0, kTwoPi));
    const auto b = sample_base(am.base(), s, spec.base_radius);
    p.insert(p.end(), b.begin(), b.end());
    pts.push_back(std::move(p));
  }
  return pts;
}

VerificationReport verify_einstein(const MetricField& m, const std::vector<std::vector<double>>& points, double lambda,
                                   double tolerance, const std::string& family_id, const std::string& suite) {
  Stopwatch sw;
  std::vector<double> res(points.size());
  std::vector<std::string> errors(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      res[i] = ricci(m, points[i]).einstein_residual(lambda);
    } catch (const std::exception& e) {
      res[i] = std::numeric_limits<double>::infinity();
      errors[i] = e.what();
    }
  });
  VerificationReport rep;
  rep.family_id = family_id;
  rep.suite = suite;
  rep.sample_count = static_cast<int>(points.size());
  rep.add_check(lambda == 0.0 ? "ricci" : "einstein", max_of(res), tolerance);
  rep.metrics["einstein_constant"] = lambda;
  rep.worst = worst_of(points, res);
  add_errors(rep, errors);
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

VerificationReport verify_ricci_flat(const AssembledMetric& am, const SampleSpec& spec, const Tolerances& tol) {
  Stopwatch sw;
  const auto pts = sample_interior(am, spec);
  VerificationReport rep = verify_einstein(am.metric_field(), pts, 0.0, tol.curvature, am.family().id(), "ricci");

  // The sampled domain ends where X vanishes; a wrong μ moves that zero.
  double anchor = std::numeric_limits<double>::infinity();
  try {
    anchor = std::abs(am.X(am.roots().x_star));
  } catch (const DomainError& e) {
    rep.notes.push_back(std::string("boundary anchor: ") + e.what());
  }
  rep.add_check("boundary_anchor", anchor, tol.closed);

  std::size_t indefinite = 0;
  double min_eig = kHuge;
  for (const auto& p : pts) {
    try {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(am.metric_at(p));
      const double e = es.eigenvalues().minCoeff();
      min_eig = std::min(min_eig, e);
      if (!(e > 0.0)) ++indefinite;
    } catch (const std::exception&) {
      ++indefinite;
    }
  }
  rep.add_check("positive_definite", static_cast<double>(indefinite), 1.0);
  rep.metrics["min_eigenvalue"] = min_eig;
  rep.metrics["mu"] = am.mu();
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

VerificationReport verify_kahler(const AssembledMetric& am, const SampleSpec& spec, const Tolerances& tol) {
  Stopwatch sw;
  const auto pts = sample_interior(am, spec);
  const MetricField g = am.metric_field();
  const TwoFormField w = am.kahler_form_field();
  const EndomorphismField jf = complex_structure(g, w);
  const std::size_t np = pts.size();
  std::vector<double> antisym(np), dw(np), jsq(np), compat(np), nij(np), score(np);
  std::vector<std::string> errors(np);
  parallel_for(np, [&](std::size_t i) {
    const auto& p = pts[i];
    try {
      const Eigen::MatrixXd gv = am.metric_at(p);
      const Eigen::MatrixXd wv = am.kahler_form_at(p);
      antisym[i] = max_abs(Eigen::MatrixXd(wv + wv.transpose()));
      dw[i] = max_abs(exterior_derivative(w, p));
      const Eigen::MatrixXd jv = jf.eval(constants(p)).values();
      const int d = static_cast<int>(jv.rows());
      jsq[i] = max_abs(Eigen::MatrixXd(jv * jv + Eigen::MatrixXd::Identity(d, d)));
      compat[i] = max_abs(Eigen::MatrixXd(jv.transpose() * gv * jv - gv));
      try {
        nij[i] = max_abs(nijenhuis(jf, p, tol.nijenhuis));
      } catch (const PreconditionError& e) {
        nij[i] = std::numeric_limits<double>::infinity();
        errors[i] = e.what();
      }
    } catch (const std::exception& e) {
      antisym[i] = dw[i] = jsq[i] = compat[i] = nij[i] = std::numeric_limits<double>::infinity();
      errors[i] = e.what();
    }
    score[i] = std::max({sanitize(dw[i]) / tol.closed, sanitize(jsq[i]) / tol.j_squared,
                         sanitize(nij[i]) / tol.nijenhuis, sanitize(compat[i]) / tol.compatibility});
  });
  VerificationReport rep;
  rep.family_id = am.family().id();
  rep.suite = "kahler";
  rep.sample_count = static_cast<int>(np);
  rep.add_check("omega_antisymmetry", max_of(antisym), tol.closed);
  rep.add_check("d_omega", max_of(dw), tol.closed);
  rep.add_check("j_squared", max_of(jsq), tol.j_squared);
  rep.add_check("compatibility", max_of(compat), tol.compatibility);
  rep.add_check("nijenhuis", max_of(nij), tol.nijenhuis);
  rep.worst = worst_of(pts, score);
  for (auto& o : rep.worst) o.residual = 0.0;
  for (std::size_t k = 0; k < rep.worst.size(); ++k) {
    const auto it = std::find(pts.begin(), pts.end(), rep.worst[k].point);
    const std::size_t i = static_cast<std::size_t>(it - pts.begin());
    rep.worst[k].residual = sanitize(std::max({dw[i], jsq[i], nij[i], compat[i]}));
  }
  add_errors(rep, errors);
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

VerificationReport verify_link_einstein(const LinkMetric& lm, const std::string& family_id, const SampleSpec& spec,
                                        const Tolerances& tol, double einstein_constant) {
  Stopwatch sw;
  spec.validate();
  const double lambda = einstein_constant < 0.0 ? 2.0 * lm.n + 2.0 : einstein_constant;
  SampleStream s(spec.seed, "link:" + family_id);
  std::vector<std::vector<double>> pts, tpts;
  for (int i = 0; i < spec.link_points; ++i) {
    pts.push_back(link_sample(lm, s, spec));
    tpts.emplace_back(pts.back().begin() + 1, pts.back().end());
  }
  VerificationReport rep = verify_einstein(lm.metric, pts, lambda, tol.curvature, family_id, "link");
  rep.checks.front().name = "link_einstein";
  const VerificationReport trans =
      verify_einstein(lm.transverse, tpts, 2.0 * (lm.n + 2.0), tol.curvature, family_id, "transverse");
  rep.add_check("transverse_einstein", trans.max_residual, tol.curvature);
  rep.notes.insert(rep.notes.end(), trans.notes.begin(), trans.notes.end());

  double reeb = 0.0;
  for (const auto& p : pts) {
    try {
      const Eigen::MatrixXd g = lm.metric.eval(constants(p)).values();
      reeb = std::max(reeb, std::abs(lm.reeb_coefficient * lm.reeb_coefficient * g(0, 0) - 1.0));
    } catch (const std::exception& e) {
      reeb = std::numeric_limits<double>::infinity();
      rep.notes.push_back(e.what());
    }
  }
  rep.add_check("reeb_unit_norm", reeb, tol.reeb);
  rep.metrics["transverse_einstein_constant"] = 2.0 * (lm.n + 2.0);
  rep.metrics["reeb_coefficient"] = lm.reeb_coefficient;
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

std::vector<double> cone_deviation(const MetricField& pulled, const MetricField& cone,
                                   const std::vector<std::vector<double>>& link_points,
                                   const std::vector<double>& r_grid) {
  std::vector<double> out;
  for (double r : r_grid) {
    double e = 0.0;
    for (const auto& lp : link_points) {
      std::vector<double> p{r};
      p.insert(p.end(), lp.begin(), lp.end());
      const auto q = constants(p);
      const Eigen::MatrixXd diff = (pulled.eval(q).values() - cone.eval(q).values()) / (r * r);
      e = std::max(e, max_abs(diff));
    }
    out.push_back(e);
  }
  return out;
}

double log_log_slope(const std::vector<double>& r, const std::vector<double>& e) {
  const std::size_t n = r.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(r[i]), ly = std::log(e[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

VerificationReport verify_asymptotics(const AssembledMetric& am, const LinkMetric& lm, const SampleSpec& spec,
                                      const Tolerances& tol) {
  Stopwatch sw;
  spec.validate();
  const int n = am.n();
  VerificationReport rep;
  rep.family_id = am.family().id();
  rep.suite = "asymptotics";
  SampleStream s(spec.seed, "asymptotic:" + rep.family_id);
  std::vector<std::vector<double>> lpts;
  for (int i = 0; i < spec.asymptotic_points; ++i) lpts.push_back(link_sample(lm, s, spec));
  rep.sample_count = static_cast<int>(lpts.size() * spec.r_grid.size());

  const MetricField cone = cone_metric(lm);
  const auto& grid = spec.r_grid;
  try {
    const MetricField pulled = pullback(am.metric_field(), asymptotic_chart(am));
    const auto e = cone_deviation(pulled, cone, lpts, grid);
    int rises = 0;
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
      if (!(e[i + 1] < e[i])) ++rises;
    rep.add_check("strictly_decreasing", rises, 1.0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      std::ostringstream key;
      key << "e_r" << grid[i];
      rep.metrics[key.str()] = e[i];
    }
    rep.metrics["decay_exponent"] = log_log_slope(grid, e);
    if (e.size() >= 4) {
      const double early = e[1] / e[0];
      const double late = e[e.size() - 1] / e[e.size() - 2];
      rep.metrics["ratio_early"] = early;
      rep.metrics["ratio_late"] = late;
    }
  } catch (const std::exception& ex) {
    rep.add_check("strictly_decreasing", std::numeric_limits<double>::infinity(), 1.0);
    rep.notes.push_back(ex.what());
  }

  // Calabi-limit controls on the same link samples.
  try {
    const auto e0 = cone_deviation(calabi_limit_metric(0.0, lm), cone, lpts, grid);
    rep.add_check("calabi_mu0_cone", max_of(e0), tol.cone_control);

    double mu_c = am.roots().mu;
    if (mu_c == 0.0) mu_c = (n % 2 == 1 ? -1.0 : 1.0) * am.roots().nu;
    const MetricField calabi = calabi_limit_metric(mu_c, lm);
    const auto ec = cone_deviation(calabi, cone, lpts, grid);
    const double slope = log_log_slope(grid, ec);
    const double expected = -(2.0 * n + 4.0);
    rep.add_check("calabi_slope", std::abs(slope / expected - 1.0), tol.slope);
    rep.metrics["calabi_mu"] = mu_c;
    rep.metrics["calabi_slope"] = slope;

    // Ricci-flatness of the cone and the Calabi metric at moderate radii
    // where H is far from 1.
    std::vector<std::vector<double>> cpts;
    for (int i = 0; i < spec.calabi_points; ++i) {
      std::vector<double> p{s.uniform(2.0, 4.0)};
      const auto lp = link_sample(lm, s, spec);
      p.insert(p.end(), lp.begin(), lp.end());
      cpts.push_back(std::move(p));
    }
    const auto rc = verify_einstein(cone, cpts, 0.0, tol.cone_curvature, rep.family_id, "cone");
    rep.add_check("cone_ricci_flat", rc.max_residual, tol.cone_curvature);
    const auto rk = verify_einstein(calabi, cpts, 0.0, tol.cone_curvature, rep.family_id, "calabi");
    rep.add_check("calabi_ricci_flat", rk.max_residual, tol.cone_curvature);
    rep.notes.insert(rep.notes.end(), rk.notes.begin(), rk.notes.end());
  } catch (const std::exception& ex) {
    rep.add_check("calabi_controls", std::numeric_limits<double>::infinity(), 1.0);
    rep.notes.push_back(ex.what());
  }
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

double richardson(double r1, double c1, double r2, double c2) {
  return (r1 * r1 * c2 - r2 * r2 * c1) / (r1 * r1 - r2 * r2);
}

namespace {

struct Extraction {
  double radial = 0.0;  // coefficient of dR²
  double circle = 0.0;  // |K|²/R² for the collapsing Killing field
  double base = 0.0;    // first base component over its cone value R²(g_V + A²)
};

// Collapse of the Killing field K = ∂γ − κ∂α̃ where the coordinate `which`
// (kX or kY) reaches `root`; the other coordinate is held at `fixed`.
Extraction collapse_limit(const AssembledMetric& am, int which, double root, double fixed, double kappa,
                          const std::vector<double>& base, const std::vector<double>& radii) {
  const RootSolution& rs = am.roots();
  const int n = am.n();
  const double sign = am.sign();
  // R² = sign·(other − root)(t − root)/F'(root) with F = X or Y
  const double fprime = which == kY ? y_prime(root, rs.nu, n) : x_prime(root, am.mu(), n);
  const double other_minus_root = which == kY ? root - fixed : fixed - root;
  const double scale = fprime / (sign * other_minus_root);  // t − root = scale·R²
  // Expected first base component of the collapsing cone: g_V + A⊗A.
  const BaseValues bv = eval_base(am.base(), VChartPoint{base});
  const double gv = bv.g(0, 0) + bv.a(0) * bv.a(0);
  double radial[2], circle[2], vb[2];
  for (int k = 0; k < 2; ++k) {
    const double r = radii[static_cast<std::size_t>(k)];
    std::vector<double> p(4, 0.0);
    p[which] = root + scale * r * r;
    p[which == kY ? kX : kY] = fixed;
    p.insert(p.end(), base.begin(), base.end());
    const Eigen::MatrixXd g = am.metric_at(p);
    const double dt_dr = 2.0 * scale * r;
    radial[k] = g(which, which) * dt_dr * dt_dr;
    const double kk = g(kGamma, kGamma) - 2.0 * kappa * g(kGamma, kAlpha) + kappa * kappa * g(kAlpha, kAlpha);
    circle[k] = kk / (r * r);
    vb[k] = g(kBase, kBase) / (r * r * gv);
  }
  return {richardson(radii[0], radial[0], radii[1], radial[1]), richardson(radii[0], circle[0], radii[1], circle[1]),
          richardson(radii[0], vb[0], radii[1], vb[1])};
}

}  // namespace

VerificationReport verify_collapse(const AssembledMetric& am, const SampleSpec& spec, const Tolerances& tol) {
  Stopwatch sw;
  spec.validate();
  const FamilyParams& fp = am.family();
  const RootSolution& rs = am.roots();
  const int n = fp.n;
  const double n1 = n + 1.0;
  const double sign = am.sign();
  VerificationReport rep;
  rep.family_id = fp.id();
  rep.suite = "collapse";
  SampleStream s(spec.seed, "collapse:" + rep.family_id);
  const auto base = sample_base(am.base(), s, spec.base_radius);
  const auto& radii = spec.collapse_radii;
  int samples = 0;

  auto record = [&](const std::string& tag, const Extraction& ex) {
    rep.add_check(tag + "_radial", std::abs(ex.radial - 1.0), tol.collapse);
    rep.add_check(tag + "_circle", std::abs(ex.circle - 1.0), tol.collapse);
    rep.metrics[tag + "_angle"] = kTwoPi * std::sqrt(ex.circle);
    samples += 2;
  };

  try {
    // (a) Circle collapse at y = y_i for fixed x, and at x = x* for fixed y;
    // K normalised so that γ-period 2π closes it smoothly.
    const double x_fix = rs.branch == Branch::XMinus ? rs.x_star - 1.0 : rs.x_star + 1.0;
    const double y_mid = 0.5 * (rs.y1 + rs.y2);
    const double k1 = twist_function(rs.y1) / (n1 * rs.ell);
    const double k2 = twist_function(rs.y2) / (n1 * rs.ell);
    const double kx = (1.0 - 1.0 / rs.x_star) / (n1 * rs.ell);
    record("y1", collapse_limit(am, kY, rs.y1, x_fix, k1, base, radii));
    record("y2", collapse_limit(am, kY, rs.y2, x_fix, k2, base, radii));
    const Extraction ex = collapse_limit(am, kX, rs.x_star, y_mid, kx, base, radii);
    if (fp.kind == ResolutionCase::SmallResolutionII) {
      // V collapses with the circle at x = 1: the fibre is the cone
      // dR² + R²(g_V + (dγ + (n+1)A)²/(n+1)²) over the regular link.
      rep.add_check("x_star_radial", std::abs(ex.radial - 1.0), tol.collapse);
      rep.add_check("x_star_cone_circle", std::abs(ex.circle * n1 * n1 - 1.0), tol.collapse);
      rep.add_check("x_star_cone_base", std::abs(ex.base - 1.0), tol.collapse);
      samples += 2;
    } else {
      record("x_star", ex);
    }
  } catch (const std::exception& e) {
    rep.add_check("circle_collapse", std::numeric_limits<double>::infinity(), tol.collapse);
    rep.notes.push_back(e.what());
  }

  try {
    switch (fp.kind) {
      case ResolutionCase::SmallResolutionI: {
        // (b) Corner {x = y1, y = y2}: flat ℂ² limit in (R1, φ1, R2, φ2).
        const VChartPoint v{base};
        Eigen::Matrix4d c[2];
        for (int k = 0; k < 2; ++k) {
          const double r = radii[static_cast<std::size_t>(k)];
          const Eigen::Matrix4d g = fibre_metric_polar(am, {r, r, 0.3, 0.5}, v);
          Eigen::Matrix4d scaled = g;
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
              const int angular = (a % 2) + (b % 2);  // φ indices are odd
              scaled(a, b) = g(a, b) / std::pow(r, angular);
            }
          c[k] = scaled;
        }
        Eigen::Matrix4d limit;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) limit(a, b) = richardson(radii[0], c[0](a, b), radii[1], c[1](a, b));
        rep.add_check("fibre_flat_limit", max_abs(Eigen::MatrixXd(limit - Eigen::Matrix4d::Identity())), tol.collapse);
        rep.metrics["fibre_angle_1"] = kTwoPi * std::sqrt(limit(1, 1));
        rep.metrics["fibre_angle_2"] = kTwoPi * std::sqrt(limit(3, 3));
        const auto m = fibre_angle_matrix(fp);
        const Rational det = m[0] * m[3] - m[1] * m[2];
        rep.add_exact("fibre_jacobian_det", det == -Rational(1, fp.p));
        rep.exact["fibre_jacobian_det"] = str(det);
        rep.exact["quotient_order"] = str(Rational(fp.p));
        rep.metrics["quotient_order"] = fp.p;
        samples += 2;
        break;
      }
      case ResolutionCase::Canonical: {
        // (c) Induced metric on M = {x = x*} near its two poles.
        const double x = rs.x_star;
        const CanonicalAngles chart = canonical_angle_chart(fp);
        const double expected_ratio = static_cast<double>(fp.m()) / fp.fano_index;
        for (int i = 0; i < 2; ++i) {
          const double yi = i == 0 ? rs.y1 : rs.y2;
          const double scale = y_prime(yi, rs.nu, n) / (sign * (yi - x));
          double radial[2], aa[2], ag[2];
          for (int k = 0; k < 2; ++k) {
            const double r = radii[static_cast<std::size_t>(k)];
            const double y = yi + scale * r * r;
            const auto h = am.helpers(x, y);
            const double dy_dr = 2.0 * scale * r;
            radial[k] = sign * (y - x) / (4.0 * h.Y) * dy_dr * dy_dr;
            aa[k] = sign * h.w * rs.ell * rs.ell / (r * r);
            ag[k] = sign * h.w * rs.ell * h.f / n1 / (r * r);
          }
          const double c_rad = richardson(radii[0], radial[0], radii[1], radial[1]);
          const double c_aa = richardson(radii[0], aa[0], radii[1], aa[1]);
          const double c_ag = richardson(radii[0], ag[0], radii[1], ag[1]);
          const std::string tag = i == 0 ? "pole1" : "pole2";
          const double period = kTwoPi * std::sqrt(c_aa);
          const double declared = i == 0 ? chart.period1() : chart.period2();
          rep.add_check(tag + "_radial", std::abs(c_rad - 1.0), tol.collapse);
          rep.add_check(tag + "_period", std::abs(period / declared - 1.0), tol.collapse);
          rep.add_check(tag + "_gamma_ratio", std::abs(c_ag / c_aa - expected_ratio), tol.collapse);
          rep.metrics[tag + "_period"] = period;
          rep.metrics[tag + "_declared_period"] = declared;
          samples += 2;
        }
        rep.exact["phi1"] = str(chart.a1) + " alpha + " + str(chart.b1) + " gamma";
        rep.exact["minus_phi2"] = str(chart.a2) + " alpha + " + str(chart.b2) + " gamma";
        rep.add_exact("p_equals_r_plus_s", chart.r + chart.s == fp.p);
        break;
      }
      case ResolutionCase::SmallResolutionII: {
        // (d) Weighted projective line at x = 1.
        const MetricField wm = wcp_metric(am);
        const int d = fp.d();
        const double pole_angle[2] = {kTwoPi / d, kTwoPi / (fp.p - d)};
        double consistency = 0.0;
        for (int i = 0; i < 2; ++i) {
          const double yi = i == 0 ? rs.y1 : rs.y2;
          const double scale = n1 * yi / (yi - 1.0);  // y − y_i = scale·R²
          double radial[2], circle[2];
          for (int k = 0; k < 2; ++k) {
            const double r = radii[static_cast<std::size_t>(k)];
            const double y = yi + scale * r * r;
            const std::vector<Jet2> q{Jet2(y), Jet2(0.0)};
            const Eigen::MatrixXd g = wm.eval(q).values();
            const double dy_dr = 2.0 * scale * r;
            radial[k] = g(0, 0) * dy_dr * dy_dr;
            circle[k] = g(1, 1) / (r * r);
            // The same restriction read off the assembled helpers at x = 1.
            const auto h = am.helpers(1.0, y);
            consistency = std::max({consistency, std::abs(sign * (y - 1.0) / (4.0 * h.Y) - g(0, 0)) / g(0, 0),
                                    std::abs(sign * h.w * rs.ell * rs.ell - g(1, 1)) / g(1, 1)});
          }
          const double c_rad = richardson(radii[0], radial[0], radii[1], radial[1]);
          const double c_circ = richardson(radii[0], circle[0], radii[1], circle[1]);
          const double angle = kTwoPi * std::sqrt(c_circ);
          const std::string tag = i == 0 ? "pole1" : "pole2";
          rep.add_check(tag + "_radial", std::abs(c_rad - 1.0), tol.collapse);
          rep.add_check(tag + "_angle", std::abs(angle / pole_angle[i] - 1.0), tol.angle);
          rep.metrics[tag + "_angle"] = angle;
          rep.metrics[tag + "_expected_angle"] = pole_angle[i];
          samples += 2;
        }
        rep.add_check("wcp_restriction", consistency, tol.identity);
        // Δγ over the poles: 2π(n+1)y_iℓ/(1 − y_i).
        const double dg1 = kTwoPi * n1 * rs.y1 * rs.ell / (1.0 - rs.y1);
        const double dg2 = kTwoPi * n1 * rs.y2 * rs.ell / (1.0 - rs.y2);
        const double e1 = -kTwoPi * fp.fano_index / fp.k;
        const double e2 = kTwoPi * fp.fano_index / (fp.p * fp.fano_index - fp.k);
        rep.add_check("delta_gamma_pole1", std::abs(dg1 - e1), tol.period);
        rep.add_check("delta_gamma_pole2", std::abs(dg2 - e2), tol.period);
        rep.metrics["delta_gamma_pole1"] = dg1;
        rep.metrics["delta_gamma_pole2"] = dg2;
        rep.exact["delta_gamma_pole1_over_2pi"] = str(-Rational(fp.fano_index, fp.k));
        rep.exact["delta_gamma_pole2_over_2pi"] = str(Rational(fp.fano_index, fp.p * fp.fano_index - fp.k));
        break;
      }
    }
  } catch (const std::exception& e) {
    rep.add_check("case_specific_collapse", std::numeric_limits<double>::infinity(), tol.collapse);
    rep.notes.push_back(e.what());
  }
  rep.sample_count = samples;
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

VerificationReport verify_identities(const FamilyParams& fp, const RootSolution& rs, const Tolerances& tol) {
  Stopwatch sw;
  const int n = fp.n;
  const double n1 = n + 1.0;
  const double y1 = rs.y1, y2 = rs.y2, x = rs.x_star;
  const double kp = static_cast<double>(fp.k) / (fp.p * fp.fano_index);
  VerificationReport rep;
  rep.family_id = fp.id();
  rep.suite = "identities";
  rep.sample_count = 1;

  rep.add_check("q_of_nu", std::abs(period_ratio(rs.nu, n) - 1.0 / kp), tol.q_residual);
  rep.add_check("p_root_y1", std::abs(momentum_polynomial(y1, rs.nu, n)), tol.q_residual);
  rep.add_check("p_root_y2", std::abs(momentum_polynomial(y2, rs.nu, n)), tol.q_residual);
  rep.add_check("q_root_x_star", std::abs(collapse_polynomial(x, rs.mu, n)), tol.q_residual);
  rep.add_exact("root_bounds", -1.0 / n1 < y1 && y1 < 0.0 && 0.0 < y2 && y2 < 1.0);
  rep.add_exact("branch_side", rs.branch == Branch::XMinus ? x <= y1 : x >= 1.0);
  rep.add_exact("nu_range", rs.nu > 0.0 && rs.nu < nu_max(n));

  const double equal_l = std::pow(1.0 - y2, n + 1) / std::pow(1.0 - y1, n + 1);
  const double equal_r = (1.0 + n1 * y1) / (1.0 + n1 * y2);
  rep.add_check("equal_p_values", std::abs(equal_l - equal_r), tol.identity);
  rep.add_check("twist_ratio_first", std::abs(y2 * (1.0 - y1) / (y2 - y1) - kp), tol.identity);
  rep.add_check("twist_ratio_second", std::abs(y1 * (1.0 - y2) / (y2 - y1) - (kp - 1.0)), tol.identity);
  rep.add_check("y_prime_y1", std::abs(y_prime(y1, rs.nu, n) + n1 * y1), tol.identity);
  rep.add_check("y_prime_y2", std::abs(y_prime(y2, rs.nu, n) + n1 * y2), tol.identity);
  rep.add_check("ell_definition",
                std::abs(rs.ell * fp.k * n1 / fp.fano_index - twist_function(y1)), tol.identity);

  if (fp.kind == ResolutionCase::Canonical) {
    const double r = fp.r, s = fp.s();
    const double pI = static_cast<double>(fp.p) * fp.fano_index;
    rep.add_check("pole_balance", std::abs(-r * y1 / (y1 - x) - s * y2 / (y2 - x)), tol.identity);
    rep.add_check("collapse_root_closed_form", std::abs(y1 * (x - 1.0) / (y1 - x) - ((fp.k - pI) / pI + (s / r) * fp.k / pI)),
                  tol.identity);
    rep.add_check("root_linear_relation",
                  std::abs(r * y1 + s * y2 - (fp.p * y1 * y2 + static_cast<double>(fp.m()) / fp.fano_index * (y2 - y1))),
                  tol.identity);
    // Coefficients of the angle chart computed from the solved root.
    const CanonicalAngles chart = canonical_angle_chart(fp);
    const double a1 = n1 * x * y1 * rs.ell / (y1 - x), b1 = y1 * (x - 1.0) / (y1 - x);
    const double a2 = n1 * x * y2 * rs.ell / (y2 - x), b2 = y2 * (x - 1.0) / (y2 - x);
    const double chart_res = std::max({std::abs(a1 - chart.a1.to_double()), std::abs(b1 - chart.b1.to_double()),
                                       std::abs(-a2 - chart.a2.to_double()), std::abs(-b2 - chart.b2.to_double())});
    rep.add_check("canonical_chart", chart_res, tol.identity);
  }
  rep.metrics["nu"] = rs.nu;
  rep.metrics["y1"] = y1;
  rep.metrics["y2"] = y2;
  rep.metrics["mu"] = rs.mu;
  rep.metrics["x_star"] = x;
  rep.metrics["ell"] = rs.ell;
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

VerificationReport verify_chern(const FamilyParams& fp, const RootSolution& rs, const BaseManifold& base,
                                const Tolerances& tol) {
  Stopwatch sw;
  VerificationReport rep;
  rep.family_id = fp.id();
  rep.suite = "chern";
  rep.sample_count = 1;
  const int n = fp.n;

  const ChernData cd = periods(fp, base);
  rep.add_exact("fibre_period", cd.fibre_period == Rational(fp.p));
  rep.exact["fibre_period"] = str(cd.fibre_period);
  bool base_ok = true;
  for (int i = 0; i < base.cycle_count(); ++i) {
    const Rational& bp = cd.base_periods[static_cast<std::size_t>(i)];
    base_ok = base_ok && bp.is_integer() && bp == Rational(fp.k) * Rational(base.chern_pairing(i));
    rep.exact["base_period_" + std::to_string(i)] = str(bp);
  }
  rep.add_exact("base_periods", base_ok);
  rep.add_exact("ell_coefficient", cd.ell_coefficient == Rational(fp.fano_index, static_cast<long>(fp.k) * (n + 1)));
  rep.exact["ell_coefficient"] = str(cd.ell_coefficient);
  rep.add_check("ell_numeric", std::abs(rs.ell - cd.ell_coefficient.to_double() * twist_function(rs.y1)),
                tol.identity);

  // Flux across the fibre at two values of x.
  const double step = rs.branch == Branch::XMinus ? -1.0 : 1.0;
  const FluxQuadrature f1 = fibre_flux(fp, rs, rs.x_star + step);
  const FluxQuadrature f2 = fibre_flux(fp, rs, rs.x_star + 2.0 * step);
  rep.add_check("flux_quadrature", std::abs(f1.integral - f1.exact), tol.flux);
  rep.add_check("flux_x_independent", std::abs(f1.integral - f2.integral), tol.flux);
  rep.add_check("flux_period", std::abs(f1.period - fp.p), tol.identity);
  rep.metrics["flux_integral"] = f1.integral;
  rep.metrics["flux_period"] = f1.period;

  for (const auto& [k, v] : cd.exponents) rep.exact["exponent_" + k] = str(v);
  switch (fp.kind) {
    case ResolutionCase::SmallResolutionI: {
      const auto b = small_res_bundles(fp);
      rep.add_exact("exponents_sum_to_p", b.first + b.second == Rational(fp.p));
      if (fp.p == 1) rep.add_exact("p1_m_range", b.m > 0 && 2 * b.m < fp.fano_index);
      break;
    }
    case ResolutionCase::SmallResolutionII: {
      const Rational c = wcp_chern(fp);
      rep.add_exact("wcp_chern_orbifold_integral", c == wcp_orbifold_euler(fp.p, fp.d()));
      rep.exact["wcp_chern"] = str(c);
      break;
    }
    case ResolutionCase::Canonical: {
      const auto deg = canonical_orbifold_degrees(fp, base);
      const Rational c = deg.sigma_pairing;
      rep.add_exact("degree_first", deg.deg1 == Rational(fp.k, fp.r) * c);
      rep.add_exact("degree_second",
                    deg.deg2 == Rational(static_cast<long>(fp.p) * fp.fano_index - fp.k, fp.p - fp.r) * c);
      rep.add_exact("fano_flag", deg.fano == (fp.k < fp.p * fp.fano_index));
      rep.add_exact("divisor_relation", deg.divisor_relation == -Rational(fp.m()));
      rep.add_exact("orbifold_forms_agree", deg.canonical_orbifold_via_d2.d1 == deg.canonical_orbifold.d1 &&
                                               deg.canonical_orbifold_via_d2.k == deg.canonical_orbifold.k);
      rep.exact["degree_first"] = str(deg.deg1);
      rep.exact["degree_second"] = str(deg.deg2);
      rep.exact["fano"] = deg.fano ? "true" : "false";
      rep.exact["orbifold_divisor_coefficient"] = str(deg.orbifold_divisor_coefficient);
      rep.exact["orbifold_first_coefficient"] = str(deg.orbifold_first_coefficient);
      rep.exact["orbifold_second_coefficient"] = str(deg.orbifold_second_coefficient);
      break;
    }
  }
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

std::vector<double> nu_grid(int n, int count) {
  // u uniform on [−ln 1e16, ln 1e10] mapped through the logistic function:
  // the first point sits 1e−16·ν_max above 0, the last 1e−10·ν_max below ν_max.
  const double top = nu_max(n);
  const double lo = -std::log(1e16), hi = std::log(1e10);
  std::vector<double> out;
  for (int j = 0; j < count; ++j) {
    const double u = lo + (hi - lo) * j / (count - 1);
    out.push_back(top / (1.0 + std::exp(-u)));
  }
  return out;
}

VerificationReport run_lemma_suites(int n, const SampleSpec& spec, const Tolerances& tol) {
  Stopwatch sw;
  spec.validate();
  VerificationReport rep;
  rep.family_id = "n" + std::to_string(n);
  rep.suite = "lemmas";
  const double n1 = n + 1.0;
  const double top = nu_max(n);
  const auto grid = nu_grid(n, spec.lemma_grid);
  const std::size_t g = grid.size();
  std::vector<double> q(g), r(g), d(g);
  std::vector<RootPair> roots(g);
  parallel_for(g, [&](std::size_t i) {
    roots[i] = roots_of_p(grid[i], n);
    const auto [y1, y2] = roots[i];
    q[i] = (y2 - y1) / (y2 * (1.0 - y1));
    r[i] = y1 * (1.0 - y2) / (y2 * (1.0 - y1));
    d[i] = y1 + y2 + n1 * y1 * y2;
  });
  rep.sample_count = static_cast<int>(g);

  int q_bad = 0, r_bad = 0, bounds_bad = 0;
  double qr = 0.0, equal_p = 0.0, proot = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    if (i + 1 < g) {
      if (!(q[i + 1] > q[i])) ++q_bad;
      if (!(r[i + 1] < r[i])) ++r_bad;
    }
    const auto [y1, y2] = roots[i];
    // At ν ~ 1e−17 the outer roots sit closer to −1/(n+1) and 1 than one ulp.
    if (!(-1.0 / n1 <= y1 && y1 < 0.0 && 0.0 < y2 && y2 <= 1.0)) ++bounds_bad;
    qr = std::max(qr, std::abs(q[i] + r[i] - 1.0));
    equal_p = std::max(equal_p, std::abs(std::pow(1.0 - y2, n + 1) / std::pow(1.0 - y1, n + 1) -
                                       (1.0 + n1 * y1) / (1.0 + n1 * y2)));
    proot = std::max({proot, std::abs(momentum_polynomial(y1, grid[i], n)),
                      std::abs(momentum_polynomial(y2, grid[i], n))});
  }
  rep.add_check("q_strictly_increasing", q_bad, 1.0);
  rep.add_check("r_strictly_decreasing", r_bad, 1.0);
  rep.add_check("root_bounds", bounds_bad, 1.0);
  rep.add_check("q_plus_r", qr, tol.q_residual);
  rep.add_check("equal_p_grid", equal_p, tol.identity);
  rep.add_check("p_roots_grid", proot, tol.q_residual);
  rep.add_check("q_low_end", std::abs(q.front() - 1.0), tol.endpoint);
  rep.add_check("q_high_end", std::abs(q.back() - 2.0), tol.endpoint);
  rep.metrics["q_first"] = q.front();
  rep.metrics["q_last"] = q.back();
  rep.metrics["nu_first"] = grid.front();
  rep.metrics["nu_last"] = grid.back();
  rep.metrics["d_first"] = d.front();
  rep.metrics["d_last"] = d.back();

  // Degenerate endpoints as explicit limits.
  const RootPair z = roots_at_zero_nu(n), t = roots_at_nu_max(n);
  const double d0 = z.y1 + z.y2 + n1 * z.y1 * z.y2;
  const double dt = t.y1 + t.y2 + n1 * t.y1 * t.y2;
  rep.add_check("d_at_zero", std::abs(d0 + 1.0 / n1), tol.identity);
  rep.add_check("d_at_nu_max", std::abs(dt), tol.identity);
  rep.add_check("p_at_zero_limits", std::max(std::abs(momentum_polynomial(z.y1, 0.0, n)),
                                             std::abs(momentum_polynomial(z.y2, 0.0, n))),
                tol.identity);
  rep.add_check("p_at_nu_max_limit", std::abs(momentum_polynomial(0.0, top, n)), tol.identity);

  // Root derivative law against central differences.
  double deriv = 0.0;
  for (int j = 1; j <= 19; ++j) {
    const double nu = top * j / 20.0;
    const double h = top * 1e-6;
    const auto lo = roots_of_p(nu - h, n), hi = roots_of_p(nu + h, n), mid = roots_of_p(nu, n);
    const double fd[2] = {(hi.y1 - lo.y1) / (2 * h), (hi.y2 - lo.y2) / (2 * h)};
    const double ys[2] = {mid.y1, mid.y2};
    for (int i = 0; i < 2; ++i) {
      const double law = -2.0 / (n1 * ys[i] * std::pow(1.0 - ys[i], n));
      deriv = std::max(deriv, std::abs(fd[i] / law - 1.0));
    }
  }
  rep.add_check("root_derivative_law", deriv, tol.derivative);

  // Series near ν_max with ν = ν_max − (n+1)δ²: remainder ratios ≈ 2³ on halving δ.
  const double deltas[3] = {1e-2, 5e-3, 2.5e-3};
  double rem1[3], rem2[3];
  for (int i = 0; i < 3; ++i) {
    const double dl = deltas[i];
    const auto rp = roots_of_p(top - n1 * dl * dl, n);
    rem2[i] = rp.y2 - (2.0 * dl + (4.0 / 3.0) * n * dl * dl);
    rem1[i] = rp.y1 - (-2.0 * dl + (4.0 / 3.0) * n * dl * dl);
  }
  double series = 0.0;
  for (int i = 0; i < 2; ++i) {
    series = std::max(series, std::abs(std::log2(rem2[i] / rem2[i + 1]) - 3.0));
    series = std::max(series, std::abs(std::log2(rem1[i] / rem1[i + 1]) - 3.0));
  }
  rep.add_check("near_nu_max_series", series, 0.25);
  rep.metrics["series_ratio_y2"] = rem2[0] / rem2[1];
  rep.metrics["series_ratio_y1"] = rem1[0] / rem1[1];

  // Collapse roots of X as functions of μ: smallest zero decreasing in μ for
  // n odd and increasing for n even; largest zero decreasing. Both sweeps move
  // away from μ̄ (resp. 0), so x− always decreases and x+ increases.
  const double bar = mu_bar(n);
  int xm_bad = 0, xp_bad = 0;
  double qres = 0.0;
  const int steps = 50;
  double prev_m = 0.0, prev_p = 0.0;
  for (int j = 0; j <= steps; ++j) {
    const double t01 = 0.01 + 0.98 * j / steps;
    const double mu_m = n % 2 == 1 ? bar + t01 : bar - t01;
    const double mu_p = -t01;
    const double xm = smallest_zero_of_x(mu_m, n);
    const double xp = largest_zero_of_x(mu_p, n);
    qres = std::max({qres, std::abs(collapse_polynomial(xm, mu_m, n)), std::abs(collapse_polynomial(xp, mu_p, n))});
    if (j > 0) {
      if (!(xm < prev_m)) ++xm_bad;
      if (!(xp > prev_p)) ++xp_bad;
    }
    prev_m = xm;
    prev_p = xp;
  }
  rep.add_check("x_minus_monotone", xm_bad, 1.0);
  rep.add_check("x_plus_monotone", xp_bad, 1.0);
  rep.add_check("x_roots_residual", qres, tol.q_residual);
  rep.wall_time_s = sw.seconds();
  rep.finalize();
  return rep;
}

std::vector<VerificationReport> run_suites(const FamilyParams& fp, const BaseManifold& base,
                                           const std::vector<std::string>& suites, const SampleSpec& spec,
                                           const Tolerances& tol, const ControlOptions& controls) {
  for (const auto& s : suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw PreconditionError("unknown suite '" + s + "'");
  spec.validate();
  const RootSolution rs = solve_family(fp);
  AssembledMetric am = assemble(fp, rs, base);
  if (controls.mu_shift != 0.0) am = am.with_mu(rs.mu + controls.mu_shift);
  if (controls.omega_scale != 1.0) am = am.with_omega_scale(controls.omega_scale);
  const LinkMetric lm = link_metric(fp, rs, base);

  std::vector<VerificationReport> out;
  for (const auto& s : suites) {
    if (s == "ricci") out.push_back(verify_ricci_flat(am, spec, tol));
    else if (s == "kahler") out.push_back(verify_kahler(am, spec, tol));
    else if (s == "link") out.push_back(verify_link_einstein(lm, fp.id(), spec, tol, controls.einstein_constant));
    else if (s == "asymptotics") out.push_back(verify_asymptotics(am, lm, spec, tol));
    else if (s == "collapse") out.push_back(verify_collapse(am, spec, tol));
    else if (s == "identities") out.push_back(verify_identities(fp, rs, tol));
    else if (s == "chern") out.push_back(verify_chern(fp, rs, base, tol));
    else if (s == "lemmas") out.push_back(run_lemma_suites(fp.n, spec, tol));
  }
  return out;
}

}  // namespace conekit
