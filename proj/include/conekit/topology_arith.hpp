#pragma once

// Exact characteristic-class and period data for each family, plus a
// quadrature cross-check of the fibre flux.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "conekit/base_geometry.hpp"
#include "conekit/family_solver.hpp"
#include "conekit/rational.hpp"

namespace conekit {

struct ChernData {
  std::string family_id;
  Rational fibre_period;              // p
  std::vector<Rational> base_periods;  // k·⟨c₁(K_V^{−1/I}), Σ_i⟩
  // ℓ = ell_coefficient · f(y1)
  Rational ell_coefficient;
  // Case-specific line-bundle exponents, in a fixed order per case.
  std::vector<std::pair<std::string, Rational>> exponents;
};

ChernData periods(const FamilyParams& fp, const BaseManifold& base);

struct BundleExponents {
  Rational first;   // k/I, or m/I when p = 1
  Rational second;  // (pI − k)/I, or (I − m)/I when p = 1
  int m = 0;        // I − k when p = 1, else 0
};
// Small resolution I. For p = 1 the pair is reported as (m/I, (I − m)/I) with
// 0 < m < I/2 asserted.
BundleExponents small_res_bundles(const FamilyParams& fp);

// Small resolution II: p/(d(p − d)).
Rational wcp_chern(const FamilyParams& fp);
Rational wcp_chern(int p, int d);
// 2 − (1 − 1/d) − (1 − 1/(p − d))
Rational wcp_orbifold_euler(int p, int d);

// A divisor class a·D1 + b·K in the basis (D1, K = π*(K_V/I)) of the canonical
// resolution divisor M.
struct DivisorClass {
  Rational d1;
  Rational k;
};

struct CanonicalDegrees {
  Rational deg1;  // ⟨K_M^orb, section over D1⟩
  Rational deg2;  // ⟨K_M^orb, section over D2⟩
  bool fano = false;
  Rational divisor_relation;  // D1 − D2 = divisor_relation · K
  // K_M^orb = c_d · D1 + c1 · K = c_d · D2 + c2 · K
  Rational orbifold_divisor_coefficient;
  Rational orbifold_first_coefficient;
  Rational orbifold_second_coefficient;
  DivisorClass canonical_orbifold;  // in (D1, K)
  DivisorClass canonical_orbifold_via_d2;  // the D2 form rewritten into (D1, K)
  Rational sigma_pairing;  // ⟨c₁(K_V^{1/I}), Σ⟩
};
CanonicalDegrees canonical_orbifold_degrees(const FamilyParams& fp, const BaseManifold& base, int cycle = 0);

// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 48);

struct FluxQuadrature {
  double integral = 0.0;  // ∫_{y1}^{y2} ∂_y f(x, y) dy / (n+1)
  double exact = 0.0;     // (f(y2) − f(y1))/(n+1)
  double period = 0.0;    // ℓ⁻¹ (f(y1) − f(y2))/(n+1); equals p
};
// Flux of the fibre connection across the fibre at fixed x, integrated
// numerically in y from jet derivatives of the helper f(x, y).
FluxQuadrature fibre_flux(const FamilyParams& fp, const RootSolution& rs, double x, double tol = 1e-10);

}  // namespace conekit
