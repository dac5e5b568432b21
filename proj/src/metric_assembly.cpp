#include "conekit/metric_assembly.hpp"

#include <numbers>
#include <sstream>

namespace conekit {

namespace {

JetVector zeros(int d) { return JetVector(static_cast<std::size_t>(d), Jet2(0.0)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Pieces of the link metric at (τ, y, ψ, v): the contact-like covector
// η = c dτ + σ and the transverse metric g_T, both in link coordinates.
struct LinkPieces {
  JetVector eta;
  JetMatrix transverse;
};

LinkPieces link_pieces(int n, double nu, const BaseManifold& base, CoordinateSpan q) {
  const int d = 2 * n + 3;
  const double c = (n + 1.0) / (n + 2.0);
  const Jet2& y = q[1];
  const BaseTensors bt = base.evaluate(q.subspan(3, static_cast<std::size_t>(2 * n)));
  const Jet2 yy = Y_func(y, nu, n);

  JetVector e = zeros(d);  // dψ + A
  e[2] = Jet2(1.0);
  for (int i = 0; i < 2 * n; ++i) e[3 + i] = bt.a[i];

  LinkPieces out{zeros(d), JetMatrix(d)};
  const Jet2 sc = c * (1.0 - y);
  for (int i = 0; i < d; ++i) out.eta[i] = sc * e[i];
  out.eta[0] += c;

  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) out.transverse(3 + i, 3 + j) = sc * bt.g(i, j);
  out.transverse(1, 1) = c / (4.0 * yy);
  add_symmetric_product(out.transverse, e, e, c * yy);
  return out;
}

void check_link_domain(const LinkMetric& lm, double y) {
  if (!(y > lm.y1 && y < lm.y2)) throw DomainError("link point has y = " + fmt(y) + " outside (y1, y2)");
}

}  // namespace

std::vector<double> ChartPoint::flatten() const {
  std::vector<double> out{x, y, alpha_tilde, gamma};
  out.insert(out.end(), v.coords.begin(), v.coords.end());
  return out;
}

AssembledMetric::AssembledMetric(FamilyParams family, RootSolution roots, BaseManifold base)
    : family_(family), roots_(std::move(roots)), base_(std::move(base)) {
  if (base_.n() != family_.n) throw PreconditionError("base dimension does not match family n");
  if (base_.fano_index() != family_.fano_index) throw PreconditionError("base Fano index does not match family I");
  if (2 * family_.n + 4 > kMaxJetDim) throw PreconditionError("total dimension exceeds jet capacity");
}

AssembledMetric AssembledMetric::with_mu(double mu) const {
  AssembledMetric out = *this;
  out.roots_.mu = mu;
  return out;
}

AssembledMetric AssembledMetric::with_omega_scale(double factor) const {
  AssembledMetric out = *this;
  out.omega_scale_ = factor;
  return out;
}

void AssembledMetric::check_domain(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim()) throw PreconditionError("chart point has wrong dimension");
  const double x = p[kX], y = p[kY];
  if (roots_.branch == Branch::XMinus ? !(x < roots_.x_star) : !(x > roots_.x_star))
    throw DomainError("x = " + fmt(x) + " not beyond the collapse root " + fmt(roots_.x_star) + " on branch " +
                      to_string(roots_.branch));
  if (!(y > roots_.y1 && y < roots_.y2)) throw DomainError("y = " + fmt(y) + " outside (y1, y2)");
  base_.check_chart(p.subspan(kBase));
}

JetMatrix AssembledMetric::metric(CoordinateSpan q) const {
  const int n = family_.n;
  const int d = dim();
  const double n1 = n + 1.0;
  const Jet2& x = q[kX];
  const Jet2& y = q[kY];
  const BaseTensors bt = base_.evaluate(q.subspan(kBase, static_cast<std::size_t>(2 * n)));
  const auto h = helper_scalars(x, y, roots_.mu, roots_.nu, n);

  JetVector theta = zeros(d);  // dγ + (n+1)A
  theta[kGamma] = Jet2(1.0);
  for (int i = 0; i < 2 * n; ++i) theta[kBase + i] = n1 * bt.a[i];
  JetVector phi = zeros(d);  // ℓ dα̃ + (f/(n+1))Θ
  const Jet2 fs = h.f / n1;
  for (int i = 0; i < d; ++i) phi[i] = fs * theta[i];
  phi[kAlpha] += roots_.ell;

  JetMatrix g(d);
  const Jet2 conf = (1.0 - x) * (1.0 - y);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) g(kBase + i, kBase + j) = conf * bt.g(i, j);
  g(kX, kX) = (y - x) / (4.0 * h.X);
  g(kY, kY) = (y - x) / (4.0 * h.Y);
  add_symmetric_product(g, theta, theta, h.v / (n1 * n1));
  add_symmetric_product(g, phi, phi, h.w);
  return static_cast<double>(roots_.sign) * g;
}

JetMatrix AssembledMetric::kahler_form(CoordinateSpan q) const {
  const int n = family_.n;
  const int d = dim();
  const double n1 = n + 1.0;
  const Jet2& x = q[kX];
  const Jet2& y = q[kY];
  const BaseTensors bt = base_.evaluate(q.subspan(kBase, static_cast<std::size_t>(2 * n)));

  JetVector theta = zeros(d);
  theta[kGamma] = Jet2(1.0);
  for (int i = 0; i < 2 * n; ++i) theta[kBase + i] = n1 * bt.a[i];
  JetVector theta_x = zeros(d), theta_y = zeros(d);
  for (int i = 0; i < d; ++i) {
    theta_x[i] = ((1.0 - x) / n1) * theta[i];
    theta_y[i] = ((1.0 - y) / n1) * theta[i];
  }
  theta_x[kAlpha] -= roots_.ell * x;
  theta_y[kAlpha] -= roots_.ell * y;
  JetVector dx = zeros(d), dy = zeros(d);
  dx[kX] = Jet2(1.0);
  dy[kY] = Jet2(1.0);

  JetMatrix w(d);
  const Jet2 conf = (1.0 - x) * (1.0 - y);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) w(kBase + i, kBase + j) = conf * bt.omega(i, j);
  add_wedge(w, dx, theta_y, Jet2(-0.5));
  add_wedge(w, dy, theta_x, Jet2(-0.5));
  return (roots_.sign * omega_scale_) * w;
}

Eigen::MatrixXd AssembledMetric::metric_at(std::span<const double> p) const {
  check_domain(p);
  const std::vector<Jet2> q(p.begin(), p.end());
  return metric(q).values();
}

Eigen::MatrixXd AssembledMetric::kahler_form_at(std::span<const double> p) const {
  check_domain(p);
  const std::vector<Jet2> q(p.begin(), p.end());
  return kahler_form(q).values();
}

MetricField AssembledMetric::metric_field() const {
  MetricField f;
  f.dim = dim();
  f.name = "assembled " + family_.id();
  f.eval = [am = *this](CoordinateSpan q) {
    std::vector<double> p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p[i] = q[i].value();
    am.check_domain(p);
    return am.metric(q);
  };
  return f;
}

TwoFormField AssembledMetric::kahler_form_field() const {
  TwoFormField f;
  f.dim = dim();
  f.eval = [am = *this](CoordinateSpan q) {
    std::vector<double> p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p[i] = q[i].value();
    am.check_domain(p);
    return am.kahler_form(q);
  };
  return f;
}

AssembledMetric assemble(const FamilyParams& family, const RootSolution& roots, const BaseManifold& base) {
  family.validate();
  return AssembledMetric(family, roots, base);
}

LinkMetric link_metric(const FamilyParams& family, const RootSolution& roots, const BaseManifold& base) {
  if (base.n() != family.n) throw PreconditionError("base dimension does not match family n");
  LinkMetric lm;
  lm.n = family.n;
  lm.nu = roots.nu;
  lm.reeb_coefficient = (family.n + 2.0) / (family.n + 1.0);
  lm.base = base;
  lm.y1 = roots.y1;
  lm.y2 = roots.y2;
  const int n = family.n;
  const double nu = roots.nu;

  lm.metric.dim = 2 * n + 3;
  lm.metric.name = "link " + family.id();
  lm.metric.eval = [lm](CoordinateSpan q) {
    check_link_domain(lm, q[1].value());
    LinkPieces pc = link_pieces(lm.n, lm.nu, lm.base, q);
    add_symmetric_product(pc.transverse, pc.eta, pc.eta, Jet2(1.0));
    return pc.transverse;
  };

  lm.transverse.dim = 2 * n + 2;
  lm.transverse.name = "transverse " + family.id();
  lm.transverse.eval = [lm](CoordinateSpan q) {
    check_link_domain(lm, q[0].value());
    // Pad with a dummy τ so the link layout can be reused.
    std::vector<Jet2> padded;
    padded.reserve(q.size() + 1);
    padded.push_back(Jet2(0.0));
    padded.insert(padded.end(), q.begin(), q.end());
    const LinkPieces pc = link_pieces(lm.n, lm.nu, lm.base, padded);
    const int d = 2 * lm.n + 2;
    JetMatrix out(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out(i, j) = pc.transverse(i + 1, j + 1);
    return out;
  };

  lm.sigma.dim = 2 * n + 3;
  lm.sigma.eval = [n, nu, base](CoordinateSpan q) {
    LinkPieces pc = link_pieces(n, nu, base, q);
    pc.eta[0] -= (n + 1.0) / (n + 2.0);
    return pc.eta;
  };
  return lm;
}

MetricField cone_metric(const LinkMetric& link) {
  MetricField f;
  f.dim = link.metric.dim + 1;
  f.name = "cone over " + link.metric.name;
  f.eval = [link](CoordinateSpan q) {
    const Jet2& r = q[0];
    const JetMatrix gl = link.metric.eval(q.subspan(1));
    const int d = link.metric.dim + 1;
    JetMatrix g(d);
    g(0, 0) = Jet2(1.0);
    const Jet2 r2 = r * r;
    for (int i = 1; i < d; ++i)
      for (int j = 1; j < d; ++j) g(i, j) = r2 * gl(i - 1, j - 1);
    return g;
  };
  return f;
}

double calabi_profile(double mu, int n, double r) {
  const double c = (n + 1.0) / (n + 2.0);
  const double parity = n % 2 == 0 ? 1.0 : -1.0;
  return 1.0 + 2.0 * mu * ipow(c, n + 3) * parity / ipow(r, 2 * n + 4);
}

MetricField calabi_limit_metric(double mu, const LinkMetric& link) {
  MetricField f;
  f.dim = link.metric.dim + 1;
  f.name = "calabi limit mu=" + fmt(mu);
  f.eval = [link, mu](CoordinateSpan q) {
    const int n = link.n;
    const Jet2& r = q[0];
    const double c = (n + 1.0) / (n + 2.0);
    const double parity = n % 2 == 0 ? 1.0 : -1.0;
    const Jet2 h = 1.0 + (2.0 * mu * ipow(c, n + 3) * parity) / ipow(r, 2 * n + 4);
    if (!(h.value() > 0.0)) throw DomainError("Calabi profile H <= 0 at r = " + fmt(r.value()));
    check_link_domain(link, q[2].value());
    LinkPieces pc = link_pieces(n, link.nu, link.base, q.subspan(1));
    add_symmetric_product(pc.transverse, pc.eta, pc.eta, h);
    const int d = link.metric.dim + 1;
    JetMatrix g(d);
    g(0, 0) = reciprocal(h);
    const Jet2 r2 = r * r;
    for (int i = 1; i < d; ++i)
      for (int j = 1; j < d; ++j) g(i, j) = r2 * pc.transverse(i - 1, j - 1);
    return g;
  };
  return f;
}

ChartMap asymptotic_chart(const AssembledMetric& am) {
  const int n = am.n();
  const int d = am.dim();
  const double c = (n + 1.0) / (n + 2.0);
  const double side = am.roots().branch == Branch::XPlus ? 1.0 : -1.0;
  const double ell = am.roots().ell;
  ChartMap m;
  m.new_dim = d;
  m.old_dim = d;
  m.coords = [=](CoordinateSpan q) {
    JetVector out(static_cast<std::size_t>(d));
    out[kX] = (side * c) * (q[0] * q[0]);
    out[kY] = q[2];
    out[kAlpha] = q[1] * (-1.0 / ell);
    out[kGamma] = (n + 1.0) * (q[3] + q[1]);
    for (int i = kBase; i < d; ++i) out[i] = q[i];
    return out;
  };
  m.jacobian = [=](CoordinateSpan q) {
    std::vector<JetVector> jac(static_cast<std::size_t>(d), zeros(d));
    jac[kX][0] = (2.0 * side * c) * q[0];
    jac[kY][2] = Jet2(1.0);
    jac[kAlpha][1] = Jet2(-1.0 / ell);
    jac[kGamma][1] = Jet2(n + 1.0);
    jac[kGamma][3] = Jet2(n + 1.0);
    for (int i = kBase; i < d; ++i) jac[i][i] = Jet2(1.0);
    return jac;
  };
  return m;
}

MetricField wcp_metric(const AssembledMetric& am) {
  MetricField f;
  f.dim = 2;
  f.name = "wcp " + am.family().id();
  const double nu = am.roots().nu, ell = am.roots().ell;
  const int n = am.n();
  f.eval = [=](CoordinateSpan q) {
    const Jet2& y = q[0];
    const Jet2 yy = Y_func(y, nu, n);
    JetMatrix g(2);
    g(0, 0) = (1.0 - y) / (4.0 * yy);
    g(1, 1) = (ell * ell) * yy / (1.0 - y);
    g(0, 1) = Jet2(0.0);
    g(1, 0) = Jet2(0.0);
    return g;
  };
  return f;
}

FibrePolar fibre_polar(const FamilyParams& fp, const RootSolution& rs, double x, double y, double alpha_tilde,
                       double gamma) {
  if (fp.kind != ResolutionCase::SmallResolutionI) throw PreconditionError("fibre polar chart needs small resolution I");
  if (!(x <= rs.y1) || !(y >= rs.y1 && y <= rs.y2))
    throw DomainError("fibre polar chart needs x <= y1 <= y <= y2");
  const auto out = fibre_polar_map(fp, rs, x, y, alpha_tilde, gamma);
  return {out[0], out[1], out[2], out[3]};
}

std::array<double, 4> fibre_polar_inverse(const FamilyParams& fp, const RootSolution& rs, const FibrePolar& c) {
  if (!(c.r1 >= 0.0 && c.r2 >= 0.0)) throw DomainError("fibre polar radii must be non-negative");
  const double n1 = fp.n + 1.0;
  const double y1 = rs.y1, y2 = rs.y2;
  const double delta = y2 - y1;
  const double a = n1 * y2 * c.r1 * c.r1;   // (y2 − x)(y2 − y)
  const double b = -n1 * y1 * c.r2 * c.r2;  // (y1 − x)(y − y1)
  const double s = (a + b + delta * delta) / delta;  // (y2 − x) + (y2 − y)
  const double root = s + std::sqrt(s * s - 4.0 * a);
  const double u = 0.5 * root;
  const double w = root > 0.0 ? 2.0 * a / root : 0.0;
  if (w > delta) throw DomainError("fibre polar point outside the chart quadrant");
  const double gamma = c.phi1 - c.phi2;
  const double alpha_tilde = fp.p * c.phi1 - (static_cast<double>(fp.k) / fp.fano_index) * gamma;
  return {y2 - u, y2 - w, alpha_tilde, gamma};
}

std::array<Rational, 4> fibre_angle_matrix(const FamilyParams& fp) {
  const Rational inv_p(1, fp.p);
  const Rational kp(fp.k, static_cast<long>(fp.p) * fp.fano_index);
  return {inv_p, kp, inv_p, kp - Rational(1)};
}

Eigen::Matrix4d fibre_metric_polar(const AssembledMetric& am, const FibrePolar& c, const VChartPoint& v) {
  const auto old = fibre_polar_inverse(am.family(), am.roots(), c);
  std::vector<double> p{old[0], old[1], old[2], old[3]};
  p.insert(p.end(), v.coords.begin(), v.coords.end());
  const Eigen::MatrixXd g = am.metric_at(p);

  const std::vector<double> four{old[0], old[1], old[2], old[3]};
  const auto jets = seed_variables(four);
  const auto fwd = fibre_polar_map(am.family(), am.roots(), jets[0], jets[1], jets[2], jets[3]);
  // Rows ordered (R1, φ1, R2, φ2).
  const int order[4] = {0, 2, 1, 3};
  Eigen::Matrix4d jac;
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) jac(a, i) = fwd[static_cast<std::size_t>(order[a])].d(i);
  const Eigen::Matrix4d inv = jac.inverse();
  const Eigen::Matrix4d block = g.topLeftCorner(4, 4);
  return inv.transpose() * block * inv;
}

double CanonicalAngles::period1() const { return 2.0 * std::numbers::pi / r; }
double CanonicalAngles::period2() const { return 2.0 * std::numbers::pi / s; }

CanonicalAngles canonical_angle_chart(const FamilyParams& fp) {
  if (fp.kind != ResolutionCase::Canonical) throw PreconditionError("canonical angle chart needs a canonical family");
  fp.validate();
  if (fp.r + fp.s() != fp.p) throw AdmissibilityError("p = r + s violated");
  CanonicalAngles out;
  out.r = fp.r;
  out.s = fp.s();
  const long ki = fp.k;
  out.a1 = Rational(1, fp.r);
  out.b1 = Rational(ki, static_cast<long>(fp.r) * fp.fano_index) - Rational(1);
  out.a2 = Rational(1, out.s);
  // Both angles must vanish on the Killing field that collapses at x = x*,
  // which fixes the γ-coefficient of −φ2 to m/(sI).
  out.b2 = Rational(fp.m(), static_cast<long>(out.s) * fp.fano_index);
  return out;
}

}  // namespace conekit
