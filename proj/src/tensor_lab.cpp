#include "conekit/tensor_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conekit/errors.hpp"

namespace conekit {

namespace {

int jet_dim(const JetMatrix& m) {
  int d = 0;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) d = std::max(d, m(i, j).dim());
  return d;
}

void require_dim(int field_dim, std::span<const double> p) {
  if (static_cast<int>(p.size()) != field_dim)
    throw PreconditionError("point dimension does not match field dimension");
}

}  // namespace

Eigen::MatrixXd JetMatrix::values() const {
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j).value();
  return out;
}

Eigen::MatrixXd JetMatrix::derivative(int k) const {
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j).d(k);
  return out;
}

JetMatrix operator*(const JetMatrix& a, const JetMatrix& b) {
  const int n = a.size();
  JetMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet2 acc(0.0);
      for (int k = 0; k < n; ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

JetMatrix operator*(double s, const JetMatrix& a) {
  JetMatrix out(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) out(i, j) = s * a(i, j);
  return out;
}

JetMatrix inverse(const JetMatrix& m) {
  const int n = m.size();
  const int dim = jet_dim(m);
  const Eigen::MatrixXd inv = checked_inverse(m.values());

  std::vector<Eigen::MatrixXd> dm(static_cast<std::size_t>(dim));
  std::vector<Eigen::MatrixXd> inv_dm_inv(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    dm[k] = m.derivative(k);
    inv_dm_inv[k] = inv * dm[k] * inv;
  }

  JetMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = Jet2(inv(i, j));

  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j).set_gradient(k, -inv_dm_inv[k](i, j));

  Eigen::MatrixXd d2(n, n);
  for (int k = 0; k < dim; ++k)
    for (int l = 0; l <= k; ++l) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d2(i, j) = m(i, j).dd(k, l);
      // ∂_k∂_l M⁻¹ = M⁻¹(∂_kM M⁻¹ ∂_lM + ∂_lM M⁻¹ ∂_kM − ∂_k∂_lM)M⁻¹
      const Eigen::MatrixXd second = inv * (dm[k] * inv_dm_inv[l] + dm[l] * inv_dm_inv[k]) - inv * d2 * inv;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j).set_hessian(k, l, second(i, j));
    }
  return out;
}

void add_symmetric_product(JetMatrix& out, const JetVector& a, const JetVector& b, const Jet2& weight) {
  const int n = out.size();
  for (int i = 0; i < n; ++i) {
    if (a[i].value() == 0.0 && a[i].dim() == 0 && b[i].value() == 0.0 && b[i].dim() == 0) continue;
    for (int j = 0; j < n; ++j) {
      const Jet2 t = a[i] * b[j] + a[j] * b[i];
      out(i, j) += 0.5 * (weight * t);
    }
  }
}

void add_wedge(JetMatrix& out, const JetVector& a, const JetVector& b, const Jet2& weight) {
  const int n = out.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet2 t = a[i] * b[j] - a[j] * b[i];
      out(i, j) += weight * t;
    }
}

MetricField pullback(const MetricField& m, const ChartMap& map) {
  if (map.old_dim != m.dim) throw PreconditionError("pullback: chart map target dimension mismatch");
  MetricField out;
  out.dim = map.new_dim;
  out.name = m.name + " (pulled back)";
  out.eval = [m, map](CoordinateSpan q) {
    const JetVector old = map.coords(q);
    const auto jac = map.jacobian(q);
    const JetMatrix g = m.eval(old);
    const int nd = map.new_dim, od = map.old_dim;
    // Intermediate t[a][j] = g_ab J^b_j.
    std::vector<JetVector> t(static_cast<std::size_t>(od), JetVector(static_cast<std::size_t>(nd)));
    for (int a = 0; a < od; ++a)
      for (int j = 0; j < nd; ++j) {
        Jet2 acc(0.0);
        for (int b = 0; b < od; ++b)
          if (jac[b][j].value() != 0.0 || jac[b][j].dim() != 0) acc += g(a, b) * jac[b][j];
        t[a][j] = acc;
      }
    JetMatrix out_g(nd);
    for (int i = 0; i < nd; ++i)
      for (int j = i; j < nd; ++j) {
        Jet2 acc(0.0);
        for (int a = 0; a < od; ++a)
          if (jac[a][i].value() != 0.0 || jac[a][i].dim() != 0) acc += jac[a][i] * t[a][j];
        out_g(i, j) = acc;
        out_g(j, i) = acc;
      }
    return out_g;
  };
  return out;
}

MetricField scaled(const MetricField& m, double factor) {
  MetricField out = m;
  out.eval = [m, factor](CoordinateSpan q) { return factor * m.eval(q); };
  return out;
}

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& g, double max_condition) {
  if (!g.allFinite()) throw NumericError("metric has non-finite entries", std::numeric_limits<double>::infinity());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond < max_condition)) throw NumericError("singular metric matrix", cond);
  return g.fullPivLu().inverse();
}

namespace {

struct MetricJets {
  Eigen::MatrixXd g;
  Eigen::MatrixXd ginv;
  std::vector<Eigen::MatrixXd> dg;  // dg[k](i,j) = ∂_k g_ij
  JetMatrix jets;
};

MetricJets metric_jets(const MetricField& m, std::span<const double> p) {
  require_dim(m.dim, p);
  MetricJets out;
  const auto vars = seed_variables(p);
  out.jets = m.eval(vars);
  out.g = out.jets.values();
  out.ginv = checked_inverse(out.g);
  out.dg.resize(static_cast<std::size_t>(m.dim));
  for (int k = 0; k < m.dim; ++k) out.dg[k] = out.jets.derivative(k);
  return out;
}

// Γ_l,ij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij) at (l*D + i)*D + j.
std::vector<double> christoffel_first_kind(const MetricJets& mj, int dim) {
  std::vector<double> out(static_cast<std::size_t>(dim * dim * dim));
  for (int l = 0; l < dim; ++l)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        out[static_cast<std::size_t>((l * dim + i) * dim + j)] =
            0.5 * (mj.dg[i](j, l) + mj.dg[j](i, l) - mj.dg[l](i, j));
  return out;
}

Christoffel raise(const std::vector<double>& first, const Eigen::MatrixXd& ginv, int dim) {
  Christoffel c;
  c.dim = dim;
  c.data.assign(static_cast<std::size_t>(dim * dim * dim), 0.0);
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double acc = 0.0;
        for (int l = 0; l < dim; ++l) acc += ginv(k, l) * first[static_cast<std::size_t>((l * dim + i) * dim + j)];
        c.data[static_cast<std::size_t>((k * dim + i) * dim + j)] = acc;
      }
  return c;
}

}  // namespace

Christoffel christoffel(const MetricField& m, std::span<const double> p) {
  const MetricJets mj = metric_jets(m, p);
  return raise(christoffel_first_kind(mj, m.dim), mj.ginv, m.dim);
}

Riemann riemann(const MetricField& m, std::span<const double> p) {
  const int n = m.dim;
  const MetricJets mj = metric_jets(m, p);
  const auto first = christoffel_first_kind(mj, n);
  const Christoffel second = raise(first, mj.ginv, n);
  auto g2 = [&](int a, int b, int c, int d) { return mj.jets(a, b).dd(c, d); };
  auto low = [&](int l, int i, int j) { return first[static_cast<std::size_t>((l * n + i) * n + j)]; };

  Riemann r;
  r.dim = n;
  r.data.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double v = 0.5 * (g2(a, d, b, c) + g2(b, c, a, d) - g2(a, c, b, d) - g2(b, d, a, c));
          for (int e = 0; e < n; ++e) v += second(e, b, c) * low(e, a, d) - second(e, b, d) * low(e, a, c);
          r.data[static_cast<std::size_t>(((a * n + b) * n + c) * n + d)] = v;
        }
  return r;
}

CurvatureReport ricci(const MetricField& m, std::span<const double> p) {
  const int n = m.dim;
  const Riemann r = riemann(m, p);
  CurvatureReport rep;
  rep.point.assign(p.begin(), p.end());
  const auto vars = seed_variables(p);
  rep.metric = m.eval(vars).values();
  const Eigen::MatrixXd ginv = checked_inverse(rep.metric);
  rep.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) acc += ginv(a, c) * r(a, b, c, d);
      rep.ricci(b, d) = acc;
    }
  rep.scalar = (ginv.cwiseProduct(rep.ricci)).sum();
  rep.max_abs_ricci = max_abs(rep.ricci);
  return rep;
}

double CurvatureReport::einstein_residual(double lambda) const { return max_abs(ricci - lambda * metric); }

Eigen::VectorXd exterior_derivative(const ScalarField& f, std::span<const double> p) {
  require_dim(f.dim, p);
  const Jet2 v = f.eval(seed_variables(p));
  Eigen::VectorXd out(f.dim);
  for (int i = 0; i < f.dim; ++i) out(i) = v.d(i);
  return out;
}

Eigen::MatrixXd second_exterior_derivative(const ScalarField& f, std::span<const double> p) {
  require_dim(f.dim, p);
  const Jet2 v = f.eval(seed_variables(p));
  Eigen::MatrixXd out(f.dim, f.dim);
  for (int i = 0; i < f.dim; ++i)
    for (int j = 0; j < f.dim; ++j) out(i, j) = v.dd(i, j) - v.dd(j, i);
  return out;
}

Eigen::MatrixXd exterior_derivative(const CovectorField& a, std::span<const double> p) {
  require_dim(a.dim, p);
  const JetVector v = a.eval(seed_variables(p));
  Eigen::MatrixXd out(a.dim, a.dim);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) out(i, j) = v[j].d(i) - v[i].d(j);
  return out;
}

std::vector<double> exterior_derivative(const TwoFormField& w, std::span<const double> p) {
  require_dim(w.dim, p);
  const int n = w.dim;
  const JetMatrix v = w.eval(seed_variables(p));
  std::vector<double> out(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out[static_cast<std::size_t>((i * n + j) * n + k)] = v(j, k).d(i) + v(k, i).d(j) + v(i, j).d(k);
  return out;
}

EndomorphismField complex_structure(const MetricField& g, const TwoFormField& omega) {
  if (g.dim != omega.dim) throw PreconditionError("complex_structure: dimension mismatch");
  EndomorphismField j;
  j.dim = g.dim;
  j.eval = [g, omega](CoordinateSpan q) { return inverse(g.eval(q)) * omega.eval(q); };
  return j;
}

std::vector<double> nijenhuis(const EndomorphismField& jf, std::span<const double> p, double square_tolerance) {
  require_dim(jf.dim, p);
  const int n = jf.dim;
  const JetMatrix jm = jf.eval(seed_variables(p));
  const Eigen::MatrixXd j0 = jm.values();
  const double sq = max_abs(Eigen::MatrixXd(j0 * j0 + Eigen::MatrixXd::Identity(n, n)));
  if (!(sq <= square_tolerance))
    throw PreconditionError("nijenhuis: J^2 + 1 = " + std::to_string(sq) + " exceeds tolerance");
  // dj[l](k, j) = ∂_l J^k_j
  std::vector<Eigen::MatrixXd> dj(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) dj[l] = jm.derivative(l);

  std::vector<double> out(static_cast<std::size_t>(n * n * n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int l = 0; l < n; ++l) {
          v += j0(l, i) * dj[l](k, j) - j0(l, j) * dj[l](k, i);
          v -= j0(k, l) * (dj[i](l, j) - dj[j](l, i));
        }
        out[static_cast<std::size_t>((k * n + i) * n + j)] = v;
      }
  return out;
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) {
    if (std::isnan(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(v));
  }
  return m;
}

double max_abs(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.hasNaN()) return std::numeric_limits<double>::infinity();
  return m.cwiseAbs().maxCoeff();
}

}  // namespace conekit
