#pragma once

// The Ricci-flat Kähler metric in (x, y, α̃, γ, v) coordinates, its Kähler
// form, the asymptotic link and cone, the Calabi-limit comparison metric and
// the coordinate changes used by the collapse analyses.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "conekit/base_geometry.hpp"
#include "conekit/errors.hpp"
#include "conekit/family_solver.hpp"
#include "conekit/rational.hpp"
#include "conekit/tensor_lab.hpp"

namespace conekit {

// Chart layout of the assembled metric.
inline constexpr int kX = 0;
inline constexpr int kY = 1;
inline constexpr int kAlpha = 2;
inline constexpr int kGamma = 3;
inline constexpr int kBase = 4;

template <class T>
T X_func(const T& x, double mu, int n) {
  const double c = static_cast<double>(n + 1) / (n + 2);
  const T t = x - 1.0;
  if (mu == 0.0) return t * (1.0 + c * t);
  if (value_of(t) == 0.0) throw DomainError("X evaluated at its pole x = 1 with mu != 0");
  return t + c * t * t + 2.0 * mu / ipow(t, n);
}

template <class T>
T Y_func(const T& y, double nu, int n) {
  const double c = static_cast<double>(n + 1) / (n + 2);
  const T t = 1.0 - y;
  if (value_of(t) == 0.0) throw DomainError("Y evaluated at y = 1");
  return t - c * t * t - 2.0 * nu / ipow(t, n);
}

template <class T>
struct HelperScalars {
  T X, Y, w, f, v;
};

// w = (y²X + x²Y)/(y − x), f = 1 − (yX + xY)/(y²X + x²Y), v = XY/w.
template <class T>
HelperScalars<T> helper_scalars(const T& x, const T& y, double mu, double nu, int n) {
  HelperScalars<T> h;
  h.X = X_func(x, mu, n);
  h.Y = Y_func(y, nu, n);
  const T num = y * y * h.X + x * x * h.Y;
  h.w = num / (y - x);
  h.f = 1.0 - (y * h.X + x * h.Y) / num;
  h.v = h.X * h.Y / h.w;
  return h;
}

struct ChartPoint {
  double x = 0.0;
  double y = 0.0;
  double alpha_tilde = 0.0;
  double gamma = 0.0;
  VChartPoint v;

  std::vector<double> flatten() const;
};

class AssembledMetric {
 public:
  AssembledMetric(FamilyParams family, RootSolution roots, BaseManifold base);

  const FamilyParams& family() const { return family_; }
  const RootSolution& roots() const { return roots_; }
  const BaseManifold& base() const { return base_; }
  int n() const { return family_.n; }
  int dim() const { return 2 * family_.n + 4; }
  int sign() const { return roots_.sign; }
  double mu() const { return roots_.mu; }

  // Copy with μ replaced (everything else, including the stored collapse
  // root, untouched). Used for sensitivity controls.
  AssembledMetric with_mu(double mu) const;
  // Copy whose Kähler form is multiplied by `factor`.
  AssembledMetric with_omega_scale(double factor) const;

  double X(double x) const { return X_func(x, roots_.mu, family_.n); }
  double Y(double y) const { return Y_func(y, roots_.nu, family_.n); }
  HelperScalars<double> helpers(double x, double y) const {
    return helper_scalars(x, y, roots_.mu, roots_.nu, family_.n);
  }

  // Throws DomainError unless x lies strictly beyond the collapse root on the
  // branch side, y ∈ (y1, y2) and the base point is inside the chart.
  void check_domain(std::span<const double> p) const;

  JetMatrix metric(CoordinateSpan q) const;
  JetMatrix kahler_form(CoordinateSpan q) const;
  Eigen::MatrixXd metric_at(std::span<const double> p) const;
  Eigen::MatrixXd kahler_form_at(std::span<const double> p) const;

  MetricField metric_field() const;
  TwoFormField kahler_form_field() const;

 private:
  FamilyParams family_;
  RootSolution roots_;
  BaseManifold base_;
  double omega_scale_ = 1.0;
};

AssembledMetric assemble(const FamilyParams& family, const RootSolution& roots, const BaseManifold& base);

// Sasaki–Einstein link in (τ, y, ψ, v) and its transverse Kähler–Einstein
// metric in (y, ψ, v).
struct LinkMetric {
  int n = 0;
  double nu = 0.0;
  double reeb_coefficient = 0.0;  // ξ = reeb_coefficient · ∂_τ
  MetricField metric;
  MetricField transverse;
  CovectorField sigma;
  BaseManifold base;
  double y1 = 0.0;
  double y2 = 0.0;
};

LinkMetric link_metric(const FamilyParams& family, const RootSolution& roots, const BaseManifold& base);
// dr² + r²g_L in (r, τ, y, ψ, v).
MetricField cone_metric(const LinkMetric& link);
// H⁻¹dr² + H r²((n+1)/(n+2)dτ + σ)² + r²g_T with
// H = 1 + 2μ((n+1)/(n+2))^{n+3}(−1)ⁿ/r^{2n+4}.
MetricField calabi_limit_metric(double mu, const LinkMetric& link);
double calabi_profile(double mu, int n, double r);

// (r, τ, y, ψ, v) → (x, y, α̃, γ, v) with x = ±((n+1)/(n+2))r², the sign
// following the branch (x → −∞ on XMinus).
ChartMap asymptotic_chart(const AssembledMetric& am);

// Restriction to constant x = 1 of the small resolution II metric, in (y, α̃):
// ((1−y)/(4Y))dy² + (Yℓ²/(1−y))dα̃².
MetricField wcp_metric(const AssembledMetric& am);

// Fibre coordinates near the corner {x = y1, y = y2} (small resolution I).
struct FibrePolar {
  double r1 = 0.0;
  double r2 = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

template <class T>
std::array<T, 4> fibre_polar_map(const FamilyParams& fp, const RootSolution& rs, const T& x, const T& y,
                                 const T& alpha_tilde, const T& gamma) {
  using std::sqrt;
  const double n1 = fp.n + 1.0;
  const double y1 = rs.y1, y2 = rs.y2;
  const T r1 = sqrt((y2 - x) * (y2 - y) / (n1 * y2));
  const T r2 = sqrt(-((y1 - x) * (y - y1)) / (n1 * y1));
  const double kp = static_cast<double>(fp.k) / (fp.p * fp.fano_index);
  const T phi1 = alpha_tilde / fp.p + kp * gamma;
  const T phi2 = alpha_tilde / fp.p + (kp - 1.0) * gamma;
  return {r1, r2, phi1, phi2};
}

FibrePolar fibre_polar(const FamilyParams& fp, const RootSolution& rs, double x, double y, double alpha_tilde,
                       double gamma);
// Inverse of fibre_polar on x ≤ y1 ≤ y ≤ y2; returns (x, y, α̃, γ).
std::array<double, 4> fibre_polar_inverse(const FamilyParams& fp, const RootSolution& rs, const FibrePolar& c);
// ∂(φ1, φ2)/∂(α̃, γ) as exact rationals, row-major.
std::array<Rational, 4> fibre_angle_matrix(const FamilyParams& fp);
// 4×4 fibre block of the metric in (R1, φ1, R2, φ2) at a base point.
Eigen::Matrix4d fibre_metric_polar(const AssembledMetric& am, const FibrePolar& c, const VChartPoint& v);

// φ1 = a1·α̃ + b1·γ, −φ2 = a2·α̃ + b2·γ with declared periods 2π/r, 2π/s.
struct CanonicalAngles {
  Rational a1, b1, a2, b2;
  int r = 0;
  int s = 0;
  double period1() const;
  double period2() const;
};
CanonicalAngles canonical_angle_chart(const FamilyParams& fp);

}  // namespace conekit
