#pragma once

// Discrete family selectors (n, I, p, k, case, r) and the continuous
// parameters (ν, y₁, y₂, μ, x±, ℓ) they determine.

#include <string>
#include <vector>

namespace conekit {

enum class ResolutionCase { SmallResolutionI, SmallResolutionII, Canonical };
enum class Branch { XMinus, XPlus };

std::string to_string(ResolutionCase c);
std::string to_string(Branch b);
// Accepts "small1", "small2", "canonical" and the enum spellings.
ResolutionCase parse_case(const std::string& s);

struct FamilyParams {
  int n = 1;
  int fano_index = 2;
  int p = 1;
  int k = 1;
  ResolutionCase kind = ResolutionCase::SmallResolutionI;
  int r = 0;  // Canonical only

  int m() const { return k - r * fano_index; }
  int d() const { return k / fano_index; }
  int s() const { return p - r; }
  std::string id() const;

  // Throws AdmissibilityError naming the first violated constraint.
  void validate() const;
  bool operator==(const FamilyParams&) const = default;
};

struct RootPair {
  double y1 = 0.0;
  double y2 = 0.0;
};

struct RootSolution {
  double nu = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;
  double mu = 0.0;
  double x_star = 0.0;
  Branch branch = Branch::XMinus;
  double ell = 0.0;
  int sign = 1;  // multiplies the local metric to make it positive definite
  std::string mu_interval;  // which monotone μ-interval the collapse root lives in
  bool operator==(const RootSolution&) const = default;
};

// 1/(2(n+2)): above it p(y) has no pair of adjacent zeros around y = 0.
double nu_max(int n);

// p(y) = (1−y)^{n+1} − ((n+1)/(n+2))(1−y)^{n+2} − 2ν
double momentum_polynomial(double y, double nu, int n);
// q(x) = (x−1)^{n+1} + ((n+1)/(n+2))(x−1)^{n+2} + 2μ
double collapse_polynomial(double x, double mu, int n);

// Roots y₁ ∈ (−1/(n+1), 0), y₂ ∈ (0, 1) of p(y) by bisection.
RootPair roots_of_p(double nu, int n);
// Limits at the degenerate endpoints ν = 0 and ν = ν_max.
RootPair roots_at_zero_nu(int n);
RootPair roots_at_nu_max(int n);

// Q = (y₂ − y₁)/(y₂(1 − y₁)); increases from 1 to 2 across (0, ν_max).
double period_ratio(double nu, int n);
// R = y₁(1 − y₂)/(y₂(1 − y₁)) = 1 − Q.
double complement_ratio(double nu, int n);
// D = y₁ + y₂ + (n+1)y₁y₂.
double root_combination(double nu, int n);

// f(y) = (y − 1)/y
double twist_function(double y);

// Unique ν with Q(ν) = pI/k.
double solve_nu(const FamilyParams& fp);

struct MuSolution {
  double mu = 0.0;
  double x_star = 0.0;
  Branch branch = Branch::XMinus;
};
MuSolution solve_mu(const FamilyParams& fp, double nu, double y1, double y2);

// Full solve: ν, roots, μ, branch, ℓ and sign.
RootSolution solve_family(const FamilyParams& fp);

// Smallest zero of X(x) = q(x)/(x−1)ⁿ in (−∞, 0]; requires μ ≥ μ̄ (n odd) or
// μ ≤ μ̄ (n even). Largest zero in [1, ∞); requires μ ≤ 0.
double smallest_zero_of_x(double mu, int n);
double largest_zero_of_x(double mu, int n);
// μ̄ = (−1)ⁿ/(2(n+2)): the value at which x = 0 is a root of q.
double mu_bar(int n);

// Admissible families for fixed (n, I), ordered by p, k, case, r.
std::vector<FamilyParams> enumerate_families(int n, int fano_index, int p_max);

struct FamilyCandidate {
  FamilyParams family;
  bool admissible = false;
  std::string reason;  // empty when admissible
};
// Every candidate considered by enumerate_families, including rejected
// neighbours with the reason for rejection.
std::vector<FamilyCandidate> enumerate_candidates(int n, int fano_index, int p_max);

// Generic bisection for a sign change of `f` on [lo, hi]; iterates until the
// bracket stops shrinking in double precision.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace conekit
