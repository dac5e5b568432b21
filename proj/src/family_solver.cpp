#include "conekit/family_solver.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "conekit/errors.hpp"

namespace conekit {

std::string to_string(ResolutionCase c) {
  switch (c) {
    case ResolutionCase::SmallResolutionI: return "small1";
    case ResolutionCase::SmallResolutionII: return "small2";
    case ResolutionCase::Canonical: return "canonical";
  }
  return "?";
}

std::string to_string(Branch b) { return b == Branch::XMinus ? "XMinus" : "XPlus"; }

ResolutionCase parse_case(const std::string& s) {
  if (s == "small1" || s == "SmallResolutionI") return ResolutionCase::SmallResolutionI;
  if (s == "small2" || s == "SmallResolutionII") return ResolutionCase::SmallResolutionII;
  if (s == "canonical" || s == "Canonical") return ResolutionCase::Canonical;
  throw PreconditionError("unknown resolution case '" + s + "' (expected small1, small2 or canonical)");
}

std::string FamilyParams::id() const {
  std::ostringstream os;
  os << "n" << n << "_I" << fano_index << "_p" << p << "_k" << k << "_" << to_string(kind);
  if (kind == ResolutionCase::Canonical) os << "_r" << r;
  return os.str();
}

void FamilyParams::validate() const {
  if (n < 1) throw AdmissibilityError("n >= 1 required");
  if (fano_index < 1) throw AdmissibilityError("I >= 1 required");
  if (p < 1) throw AdmissibilityError("p >= 1 required");
  if (k < 1) throw AdmissibilityError("k >= 1 required");
  if (2 * k <= p * fano_index) throw AdmissibilityError("pI/2 < k violated");
  if (k >= p * fano_index) throw AdmissibilityError("k < pI violated");
  if (kind == ResolutionCase::SmallResolutionII && k % fano_index != 0)
    throw AdmissibilityError("small resolution II requires I | k");
  if (kind == ResolutionCase::Canonical) {
    if (r < 1) throw AdmissibilityError("canonical case requires r >= 1");
    if (m() <= 0) throw AdmissibilityError("m = k - rI > 0 violated (regular only if m > 0)");
    if (s() <= 0) throw AdmissibilityError("s = p - r > 0 violated");
  }
}

double nu_max(int n) {
  if (n < 1) throw PreconditionError("n >= 1 required");
  return 1.0 / (2.0 * (n + 2));
}

double mu_bar(int n) { return (n % 2 == 0 ? 1.0 : -1.0) / (2.0 * (n + 2)); }

double momentum_polynomial(double y, double nu, int n) {
  const double t = 1.0 - y;
  const double c = static_cast<double>(n + 1) / (n + 2);
  return std::pow(t, n + 1) * (1.0 - c * t) - 2.0 * nu;
}

double collapse_polynomial(double x, double mu, int n) {
  const double t = x - 1.0;
  const double c = static_cast<double>(n + 1) / (n + 2);
  return std::pow(t, n + 1) * (1.0 + c * t) + 2.0 * mu;
}

RootPair roots_of_p(double nu, int n) {
  const double top = nu_max(n);
  if (!(nu > 0.0 && nu < top)) {
    std::ostringstream os;
    os.precision(17);
    os << "nu = " << nu << " outside (0, " << top << "); endpoints are degenerate limits";
    throw DomainError(os.str());
  }
  // Near y = 0 the factored form cancels to ~1e−17 absolute while both roots
  // shrink like √(ν_max − ν); expand around 0 there, where p = 2(ν_max − ν) + O(y²).
  std::vector<double> a(static_cast<std::size_t>(n + 3), 0.0);
  for (int j = 0; j <= n + 2; ++j) {
    double binom_j = 1.0, binom_jm1 = 0.0;
    for (int i = 1; i <= j; ++i) binom_j = binom_j * (n + 2 - i) / i;  // C(n+1, j), zero past n+1
    if (j >= 1) {
      binom_jm1 = 1.0;
      for (int i = 1; i <= j - 1; ++i) binom_jm1 = binom_jm1 * (n + 2 - i) / i;
    }
    const double sj = j % 2 == 0 ? 1.0 : -1.0;
    a[static_cast<std::size_t>(j)] = sj * binom_j / (n + 2) - sj * (static_cast<double>(n + 1) / (n + 2)) * binom_jm1;
  }
  const double gap = 2.0 * (top - nu);
  auto pf = [&](double y) {
    if (std::abs(y) >= 0.25) return momentum_polynomial(y, nu, n);
    double h = 0.0;
    for (int j = n + 2; j >= 2; --j) h = h * y + a[static_cast<std::size_t>(j)];
    return gap + y * y * h;
  };
  RootPair out;
  out.y1 = bisect(pf, -1.0 / (n + 1), 0.0);
  out.y2 = bisect(pf, 0.0, 1.0);
  return out;
}

RootPair roots_at_zero_nu(int n) { return {-1.0 / (n + 1), 1.0}; }
RootPair roots_at_nu_max(int) { return {0.0, 0.0}; }

double period_ratio(double nu, int n) {
  const auto [y1, y2] = roots_of_p(nu, n);
  return (y2 - y1) / (y2 * (1.0 - y1));
}

double complement_ratio(double nu, int n) {
  const auto [y1, y2] = roots_of_p(nu, n);
  return y1 * (1.0 - y2) / (y2 * (1.0 - y1));
}

double root_combination(double nu, int n) {
  const auto [y1, y2] = roots_of_p(nu, n);
  return y1 + y2 + (n + 1) * y1 * y2;
}

double twist_function(double y) { return (y - 1.0) / y; }

double solve_nu(const FamilyParams& fp) {
  if (2 * fp.k <= fp.p * fp.fano_index) throw AdmissibilityError("pI/2 < k violated");
  if (fp.k >= fp.p * fp.fano_index) throw AdmissibilityError("k < pI violated");
  const double target = static_cast<double>(fp.p * fp.fano_index) / fp.k;
  const double top = nu_max(fp.n);
  // Q is continuous and increasing, running from 1 to 2; the open bracket
  // endpoints stand in for the limits.
  auto g = [&](double nu) {
    if (nu <= 0.0) return 1.0 - target;
    if (nu >= top) return 2.0 - target;
    return period_ratio(nu, fp.n) - target;
  };
  return bisect(g, 0.0, top);
}

double smallest_zero_of_x(double mu, int n) {
  const bool odd = n % 2 == 1;
  const double bar = mu_bar(n);
  if (odd ? mu < bar : mu > bar) {
    std::ostringstream os;
    os.precision(17);
    os << "X has no zero in (-inf, 0] for mu = " << mu << " (n = " << n << ", mu_bar = " << bar << ")";
    throw DomainError(os.str());
  }
  auto q = [&](double x) { return collapse_polynomial(x, mu, n); };
  const double q0 = q(0.0);
  if (q0 == 0.0) return 0.0;
  double lo = -1.0;
  while ((q(lo) < 0.0) == (q0 < 0.0)) lo *= 2.0;
  return bisect(q, lo, 0.0);
}

double largest_zero_of_x(double mu, int n) {
  if (mu > 0.0) throw DomainError("X has no zero in [1, inf) for mu > 0");
  if (mu == 0.0) return 1.0;
  auto q = [&](double x) { return collapse_polynomial(x, mu, n); };
  double hi = 2.0;
  while (q(hi) <= 0.0) hi = 1.0 + 2.0 * (hi - 1.0);
  return bisect(q, 1.0, hi);
}

MuSolution solve_mu(const FamilyParams& fp, double nu, double y1, double y2) {
  fp.validate();
  const int n = fp.n;
  MuSolution out;
  switch (fp.kind) {
    case ResolutionCase::SmallResolutionI:
      out.mu = (n % 2 == 0) ? nu : -nu;
      out.x_star = y1;
      out.branch = Branch::XMinus;
      return out;
    case ResolutionCase::SmallResolutionII:
      out.mu = 0.0;
      out.x_star = 1.0;
      out.branch = Branch::XPlus;
      return out;
    case ResolutionCase::Canonical: {
      const double r = fp.r;
      const double s = fp.s();
      const double den = r * y1 + s * y2;
      if (den == 0.0) throw NumericError("r y1 + s y2 vanishes", 0.0);
      const double x = (r + s) * y1 * y2 / den;
      const double t = x - 1.0;
      const double c = static_cast<double>(n + 1) / (n + 2);
      out.x_star = x;
      out.branch = den > 0.0 ? Branch::XMinus : Branch::XPlus;
      out.mu = -0.5 * std::pow(t, n + 1) * (1.0 + c * t);
      if (out.branch == Branch::XPlus && !(x > 1.0))
        throw AdmissibilityError("canonical root x+ <= 1; m > 0 criterion");
      if (out.branch == Branch::XMinus && !(x < y1))
        throw AdmissibilityError("canonical root x- >= y1");
      return out;
    }
  }
  throw PreconditionError("unknown case");
}

RootSolution solve_family(const FamilyParams& fp) {
  fp.validate();
  RootSolution sol;
  sol.nu = solve_nu(fp);
  const auto roots = roots_of_p(sol.nu, fp.n);
  sol.y1 = roots.y1;
  sol.y2 = roots.y2;
  const auto mu = solve_mu(fp, sol.nu, sol.y1, sol.y2);
  sol.mu = mu.mu;
  sol.x_star = mu.x_star;
  sol.branch = mu.branch;
  sol.ell = fp.fano_index * twist_function(sol.y1) / (fp.k * (fp.n + 1.0));
  sol.sign = sol.branch == Branch::XMinus ? 1 : -1;
  if (sol.branch == Branch::XMinus) {
    sol.mu_interval = fp.n % 2 == 1 ? "smallest zero, n odd: mu >= mu_bar, x- decreasing in mu"
                                    : "smallest zero, n even: mu <= mu_bar, x- increasing in mu";
  } else {
    sol.mu_interval = "largest zero: mu <= 0, x+ decreasing in mu";
  }
  return sol;
}

std::vector<FamilyCandidate> enumerate_candidates(int n, int fano_index, int p_max) {
  std::vector<FamilyCandidate> out;
  auto push = [&](FamilyParams fp) {
    FamilyCandidate c;
    c.family = fp;
    try {
      fp.validate();
      c.admissible = true;
    } catch (const AdmissibilityError& e) {
      c.reason = e.what();
    }
    out.push_back(c);
  };
  for (int p = 1; p <= p_max; ++p) {
    const int lo = p * fano_index / 2;  // largest k with 2k <= pI
    const int hi = p * fano_index;
    FamilyParams base{n, fano_index, p, lo, ResolutionCase::SmallResolutionI, 0};
    if (lo >= 1) push(base);
    if (hi - lo <= 1) {
      FamilyCandidate c;
      c.family = base;
      c.family.k = 0;
      c.reason = "pI/2<k<pI empty";
      out.push_back(c);
    }
    for (int k = lo + 1; k < hi; ++k) {
      FamilyParams fp{n, fano_index, p, k, ResolutionCase::SmallResolutionI, 0};
      push(fp);
      fp.kind = ResolutionCase::SmallResolutionII;
      push(fp);
      fp.kind = ResolutionCase::Canonical;
      for (int r = 1; r < p; ++r) {
        fp.r = r;
        push(fp);
        if (r * fano_index >= k) break;  // first rejected r is kept as a neighbour
      }
    }
    base.k = hi;
    push(base);
  }
  return out;
}

std::vector<FamilyParams> enumerate_families(int n, int fano_index, int p_max) {
  if (n < 1 || fano_index < 1 || p_max < 1) throw PreconditionError("enumerate bounds must be positive");
  std::vector<FamilyParams> out;
  for (const auto& c : enumerate_candidates(n, fano_index, p_max))
    if (c.admissible) out.push_back(c.family);
  return out;
}

}  // namespace conekit
