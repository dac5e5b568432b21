#include "conekit/topology_arith.hpp"

#include <cmath>

#include "conekit/errors.hpp"
#include "conekit/metric_assembly.hpp"

namespace conekit {

namespace {

Rational frac(long a, long b) { return Rational(a, b); }

// Intersection of a divisor class with the section curve over Σ in D_i.
// ⟨D1, s1Σ⟩ = −m c, ⟨D1, s2Σ⟩ = 0, ⟨K, s_iΣ⟩ = c.
Rational pair_with_section(const DivisorClass& d, int section, const Rational& m, const Rational& c) {
  const Rational d1_pair = section == 1 ? -m * c : Rational(0);
  return d.d1 * d1_pair + d.k * c;
}

DivisorClass add(const DivisorClass& a, const DivisorClass& b) { return {a.d1 + b.d1, a.k + b.k}; }
DivisorClass mul(const Rational& s, const DivisorClass& a) { return {s * a.d1, s * a.k}; }

}  // namespace

ChernData periods(const FamilyParams& fp, const BaseManifold& base) {
  fp.validate();
  if (base.fano_index() != fp.fano_index) throw PreconditionError("base Fano index does not match family");
  ChernData out;
  out.family_id = fp.id();
  out.fibre_period = Rational(fp.p);
  for (int i = 0; i < base.cycle_count(); ++i) out.base_periods.push_back(Rational(fp.k) * Rational(base.chern_pairing(i)));
  out.ell_coefficient = frac(fp.fano_index, static_cast<long>(fp.k) * (fp.n + 1));
  switch (fp.kind) {
    case ResolutionCase::SmallResolutionI: {
      const auto b = small_res_bundles(fp);
      out.exponents = {{"first", b.first}, {"second", b.second}};
      break;
    }
    case ResolutionCase::SmallResolutionII:
      out.exponents = {{"d", Rational(fp.d())}, {"wcp_chern", wcp_chern(fp)}};
      break;
    case ResolutionCase::Canonical:
      out.exponents = {{"m_over_I", frac(fp.m(), fp.fano_index)}};
      break;
  }
  return out;
}

BundleExponents small_res_bundles(const FamilyParams& fp) {
  fp.validate();
  if (fp.kind != ResolutionCase::SmallResolutionI) throw PreconditionError("small_res_bundles needs small resolution I");
  BundleExponents out;
  const long pi = static_cast<long>(fp.p) * fp.fano_index;
  if (fp.p == 1) {
    out.m = fp.fano_index - fp.k;
    if (!(out.m > 0 && 2 * out.m < fp.fano_index)) throw AdmissibilityError("p = 1 requires 0 < m < I/2");
    out.first = frac(out.m, fp.fano_index);
    out.second = frac(fp.fano_index - out.m, fp.fano_index);
  } else {
    out.first = frac(fp.k, fp.fano_index);
    out.second = frac(pi - fp.k, fp.fano_index);
  }
  return out;
}

Rational wcp_chern(int p, int d) {
  if (!(d > 0 && d < p)) throw AdmissibilityError("weighted projective line needs 0 < d < p");
  return frac(p, static_cast<long>(d) * (p - d));
}

Rational wcp_orbifold_euler(int p, int d) {
  if (!(d > 0 && d < p)) throw AdmissibilityError("weighted projective line needs 0 < d < p");
  return Rational(2) - (Rational(1) - frac(1, d)) - (Rational(1) - frac(1, p - d));
}

Rational wcp_chern(const FamilyParams& fp) {
  if (fp.kind != ResolutionCase::SmallResolutionII) throw PreconditionError("wcp_chern needs small resolution II");
  fp.validate();
  return wcp_chern(fp.p, fp.d());
}

CanonicalDegrees canonical_orbifold_degrees(const FamilyParams& fp, const BaseManifold& base, int cycle) {
  if (fp.kind != ResolutionCase::Canonical) throw PreconditionError("canonical degrees need a canonical family");
  fp.validate();
  const Rational i(fp.fano_index), m(fp.m()), r(fp.r), s(fp.s());
  const Rational c = -Rational(base.chern_pairing(cycle));

  // D2 = D1 + m K, K_M = (I − m) K − 2 D1,
  // K_M^orb = K_M + (1 − 1/r) D1 + (1 − 1/s) D2.
  const DivisorClass d1{Rational(1), Rational(0)};
  const DivisorClass d2{Rational(1), m};
  const DivisorClass km{Rational(-2), i - m};
  const Rational one(1);
  const DivisorClass korb = add(add(km, mul(one - one / r, d1)), mul(one - one / s, d2));

  CanonicalDegrees out;
  out.sigma_pairing = c;
  out.canonical_orbifold = korb;
  out.deg1 = pair_with_section(korb, 1, m, c);
  out.deg2 = pair_with_section(korb, 2, m, c);
  out.fano = fp.k - fp.p * fp.fano_index < 0;
  out.divisor_relation = -m;
  out.orbifold_divisor_coefficient = -Rational(fp.p) / (r * s);
  out.orbifold_first_coefficient = i - m / s;
  out.orbifold_second_coefficient = i + m / r;
  // Rewrite c_d·D2 + c2·K in the (D1, K) basis using the divisor relation.
  out.canonical_orbifold_via_d2 = add(mul(out.orbifold_divisor_coefficient, d2), DivisorClass{Rational(0), out.orbifold_second_coefficient});
  return out;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  struct Rec {
    const std::function<double(double)>& f;
    int max_depth;
    double run(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
      return run(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + run(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec{f, max_depth}.run(a, b, fa, fm, fb, whole, tol, 0);
}

FluxQuadrature fibre_flux(const FamilyParams& fp, const RootSolution& rs, double x, double tol) {
  const int n = fp.n;
  const double n1 = n + 1.0;
  auto integrand = [&](double y) {
    const Jet2 xj(x);
    const Jet2 yj = Jet2::variable(y, 0, 1);
    return helper_scalars(xj, yj, rs.mu, rs.nu, n).f.d(0) / n1;
  };
  FluxQuadrature out;
  out.integral = adaptive_simpson(integrand, rs.y1, rs.y2, tol);
  out.exact = (twist_function(rs.y2) - twist_function(rs.y1)) / n1;
  out.period = (twist_function(rs.y1) - twist_function(rs.y2)) / (n1 * rs.ell);
  return out;
}

}  // namespace conekit
