#include "conekit/base_geometry.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "conekit/errors.hpp"

namespace conekit {

BaseTensors fubini_study_tensors(int m, double a, CoordinateSpan q) {
  const int d = 2 * m;
  Jet2 s(1.0);
  for (int i = 0; i < d; ++i) s += q[i] * q[i];
  const Jet2 inv_s = reciprocal(s);
  const Jet2 inv_s2 = inv_s * inv_s;

  auto u = [&](int j) -> const Jet2& { return q[2 * j]; };
  auto v = [&](int j) -> const Jet2& { return q[2 * j + 1]; };

  BaseTensors t{JetMatrix(d), JetMatrix(d), JetVector(static_cast<std::size_t>(d))};
  // Hermitian form H_{j k̄} = a(δ_jk/S − z̄_j z_k/S²) split into real and imaginary parts.
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      Jet2 re = -a * ((u(j) * u(k) + v(j) * v(k)) * inv_s2);
      if (j == k) re += a * inv_s;
      const Jet2 im = -a * ((u(j) * v(k) - v(j) * u(k)) * inv_s2);
      t.g(2 * j, 2 * k) = re;
      t.g(2 * j + 1, 2 * k + 1) = re;
      t.g(2 * j, 2 * k + 1) = im;
      t.g(2 * j + 1, 2 * k) = -im;
      // ω(X, Y) = g(JX, Y) with J∂u = ∂v, J∂v = −∂u.
      t.omega(2 * j, 2 * k) = -im;
      t.omega(2 * j, 2 * k + 1) = re;
      t.omega(2 * j + 1, 2 * k) = -re;
      t.omega(2 * j + 1, 2 * k + 1) = -im;
    }
  // A = −½ dφ∘J
  for (int j = 0; j < m; ++j) {
    t.a[2 * j] = -a * (v(j) * inv_s);
    t.a[2 * j + 1] = a * (u(j) * inv_s);
  }
  return t;
}

double unit_fubini_study_einstein_constant(int m) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(m); it != cache.end()) return it->second;
  MetricField f;
  f.dim = 2 * m;
  f.eval = [m](CoordinateSpan q) { return fubini_study_tensors(m, 1.0, q).g; };
  const std::vector<double> origin(static_cast<std::size_t>(2 * m), 0.0);
  const CurvatureReport rep = ricci(f, origin);
  const double c0 = rep.ricci(0, 0) / rep.metric(0, 0);
  cache.emplace(m, c0);
  return c0;
}

BaseManifold product_base(std::span<const int> dims, double chart_radius) {
  if (dims.empty()) throw PreconditionError("product_base: empty factor list");
  BaseManifold b;
  b.dims_.assign(dims.begin(), dims.end());
  int n = 0;
  int hcf = 0;
  for (int d : dims) {
    if (d < 2) throw PreconditionError("product_base: every factor dimension d_a must be >= 2");
    n += d - 1;
    hcf = std::gcd(hcf, d);
  }
  if (2 * n > kMaxJetDim) throw PreconditionError("product_base: base dimension exceeds jet capacity");
  b.n_ = n;
  b.fano_index_ = hcf;
  b.chart_radius_ = chart_radius;
  // Ricci is invariant under constant rescaling, so a factor with unit-scale
  // Einstein constant c₀ reaches 2(n+1) at scale c₀ / (2(n+1)).
  for (int d : dims) b.scales_.push_back(unit_fubini_study_einstein_constant(d - 1) / (2.0 * (n + 1)));
  return b;
}

BaseManifold fubini_study_base(int n, double chart_radius) {
  if (n < 1) throw PreconditionError("fubini_study_base: n must be >= 1");
  const int dims[] = {n + 1};
  return product_base(dims, chart_radius);
}

std::string BaseManifold::describe() const {
  std::ostringstream os;
  if (dims_.size() == 1) {
    os << "CP" << n_;
  } else {
    for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "xCP" : "CP") << dims_[i] - 1;
  }
  return os.str();
}

int BaseManifold::chern_pairing(int cycle) const {
  if (cycle < 0 || cycle >= cycle_count()) throw std::out_of_range("chern_pairing: cycle index");
  return dims_[static_cast<std::size_t>(cycle)] / fano_index_;
}

void BaseManifold::check_chart(std::span<const double> q) const {
  if (static_cast<int>(q.size()) != real_dim()) throw PreconditionError("base chart point has wrong dimension");
  std::size_t offset = 0;
  for (int d : dims_) {
    double r2 = 0.0;
    for (int i = 0; i < 2 * (d - 1); ++i) r2 += q[offset + i] * q[offset + i];
    if (!(r2 <= chart_radius_ * chart_radius_)) throw DomainError("base point outside chart radius");
    offset += static_cast<std::size_t>(2 * (d - 1));
  }
}

BaseTensors BaseManifold::evaluate(CoordinateSpan q) const {
  const int dim = real_dim();
  BaseTensors out{JetMatrix(dim), JetMatrix(dim), JetVector(static_cast<std::size_t>(dim))};
  int offset = 0;
  for (std::size_t f = 0; f < dims_.size(); ++f) {
    const int m = dims_[f] - 1;
    const BaseTensors t = fubini_study_tensors(m, scales_[f], q.subspan(static_cast<std::size_t>(offset), 2 * m));
    for (int i = 0; i < 2 * m; ++i) {
      out.a[offset + i] = t.a[i];
      for (int j = 0; j < 2 * m; ++j) {
        out.g(offset + i, offset + j) = t.g(i, j);
        out.omega(offset + i, offset + j) = t.omega(i, j);
      }
    }
    offset += 2 * m;
  }
  return out;
}

MetricField BaseManifold::metric_field() const {
  MetricField f;
  f.dim = real_dim();
  f.name = "g_V " + describe();
  f.eval = [b = *this](CoordinateSpan q) { return b.evaluate(q).g; };
  return f;
}

TwoFormField BaseManifold::kahler_form_field() const {
  TwoFormField f;
  f.dim = real_dim();
  f.eval = [b = *this](CoordinateSpan q) { return b.evaluate(q).omega; };
  return f;
}

CovectorField BaseManifold::connection_field() const {
  CovectorField f;
  f.dim = real_dim();
  f.eval = [b = *this](CoordinateSpan q) { return b.evaluate(q).a; };
  return f;
}

BaseValues eval_base(const BaseManifold& b, const VChartPoint& q) {
  b.check_chart(q.coords);
  std::vector<Jet2> consts(q.coords.begin(), q.coords.end());
  const BaseTensors t = b.evaluate(consts);
  BaseValues out;
  out.g = t.g.values();
  out.omega = t.omega.values();
  out.a.resize(b.real_dim());
  for (int i = 0; i < b.real_dim(); ++i) out.a(i) = t.a[i].value();
  return out;
}

}  // namespace conekit
