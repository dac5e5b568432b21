#pragma once

// Sampled and exact verification suites. Every suite returns a
// VerificationReport whose top-level residual/tolerance pair is the check
// with the worst residual-to-tolerance ratio, so pass ⟺ max_residual < tolerance.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "conekit/metric_assembly.hpp"
#include "conekit/topology_arith.hpp"

namespace conekit {

struct Tolerances {
  double curvature = 1e-7;
  double closed = 1e-9;
  double j_squared = 1e-10;
  double nijenhuis = 1e-8;
  double compatibility = 1e-10;
  double reeb = 1e-10;
  double collapse = 1e-6;
  double angle = 1e-5;  // relative, weighted-projective pole angles
  double period = 1e-10;
  double identity = 1e-11;
  double q_residual = 1e-12;
  double flux = 1e-9;
  double endpoint = 1e-4;
  double cone_control = 1e-10;
  double cone_curvature = 1e-8;
  double slope = 0.10;  // relative
  double derivative = 1e-5;  // relative, root derivative law
};

struct SampleSpec {
  std::uint64_t seed = 1;
  int interior_points = 50;
  int link_points = 20;
  int asymptotic_points = 8;
  int calabi_points = 5;
  double margin = 0.05;
  double x_span = 3.0;     // sampled x-interval length beyond the collapse root
  double base_radius = 1.0;  // |z| bound for base samples (inside the chart radius)
  std::vector<double> r_grid{5.0, 10.0, 20.0, 40.0};
  std::vector<double> collapse_radii{1e-2, 1e-3};
  int lemma_grid = 1000;

  // Throws PreconditionError on non-positive counts or margins.
  void validate() const;
};

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool operator==(const Check&) const = default;
};

struct Offender {
  std::vector<double> point;
  double residual = 0.0;
  bool operator==(const Offender&) const = default;
};

struct VerificationReport {
  std::string family_id;
  std::string suite;
  int sample_count = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<Offender> worst;
  double wall_time_s = 0.0;
  std::vector<Check> checks;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> exact;  // rational values as "a/b"
  std::vector<std::string> notes;

  // Adds a check with pass = residual < tolerance (NaN counts as failure).
  void add_check(const std::string& name, double residual, double tolerance);
  // Exact comparison recorded as a mismatch count against tolerance 1.
  void add_exact(const std::string& name, bool equal);
  // Recomputes the top-level fields from the checks.
  void finalize();
  bool operator==(const VerificationReport&) const = default;
};

// Uniform doubles in [0, 1) from a 64-bit Mersenne twister using the top
// 53 bits, so the stream is identical across standard libraries.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, const std::string& salt);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 rng_;
};

// Interior sample points of the assembled chart (shared by the curvature and
// Kähler suites).
std::vector<std::vector<double>> sample_interior(const AssembledMetric& am, const SampleSpec& spec);
// Base chart sample with every complex coordinate inside spec.base_radius.
std::vector<double> sample_base(const BaseManifold& base, SampleStream& s, double radius);

struct ControlOptions {
  double mu_shift = 0.0;
  double omega_scale = 1.0;
  double einstein_constant = -1.0;  // < 0: use 2n + 2
};

// Generic curvature runner: ‖Ric − λ g‖∞ at each point.
VerificationReport verify_einstein(const MetricField& m, const std::vector<std::vector<double>>& points, double lambda,
                                   double tolerance, const std::string& family_id, const std::string& suite);

VerificationReport verify_ricci_flat(const AssembledMetric& am, const SampleSpec& spec, const Tolerances& tol);
VerificationReport verify_kahler(const AssembledMetric& am, const SampleSpec& spec, const Tolerances& tol);
VerificationReport verify_link_einstein(const LinkMetric& lm, const std::string& family_id, const SampleSpec& spec,
                                        const Tolerances& tol, double einstein_constant = -1.0);
VerificationReport verify_asymptotics(const AssembledMetric& am, const LinkMetric& lm, const SampleSpec& spec,
                                      const Tolerances& tol);
VerificationReport verify_collapse(const AssembledMetric& am, const SampleSpec& spec, const Tolerances& tol);
VerificationReport verify_identities(const FamilyParams& fp, const RootSolution& rs, const Tolerances& tol);
VerificationReport verify_chern(const FamilyParams& fp, const RootSolution& rs, const BaseManifold& base,
                                const Tolerances& tol);
VerificationReport run_lemma_suites(int n, const SampleSpec& spec, const Tolerances& tol);

// Cone deviation e(r) = max over link samples of ‖(g − g_cone)/r²‖∞ with g
// pulled back along the asymptotic chart.
std::vector<double> cone_deviation(const MetricField& pulled, const MetricField& cone,
                                   const std::vector<std::vector<double>>& link_points,
                                   const std::vector<double>& r_grid);
// Least-squares slope of log e against log r.
double log_log_slope(const std::vector<double>& r, const std::vector<double>& e);

// Logistic ν-grid clustered at both ends of (0, ν_max).
std::vector<double> nu_grid(int n, int count);

// Coefficient c₀ of c(R) = c₀ + c₂R² + O(R⁴) from two radii.
double richardson(double r1, double c1, double r2, double c2);

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"ricci",    "kahler",     "link",  "asymptotics",
                                              "collapse", "identities", "chern", "lemmas"};
  return names;
}

// Runs the named suites for one family. Unknown suite names throw
// PreconditionError.
std::vector<VerificationReport> run_suites(const FamilyParams& fp, const BaseManifold& base,
                                           const std::vector<std::string>& suites, const SampleSpec& spec,
                                           const Tolerances& tol, const ControlOptions& controls = {});

}  // namespace conekit
