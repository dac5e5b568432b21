#pragma once

// Chart-based Riemannian and almost-complex geometry on jet-valued fields.
//
// Every field is a callable from seeded coordinate jets to jet-valued
// components, so first and second coordinate derivatives come out exactly
// (up to rounding) without finite differencing.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "conekit/jet.hpp"

namespace conekit {

// Dense square matrix of jets, row-major.
class JetMatrix {
 public:
  JetMatrix() = default;
  explicit JetMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n * n)) {}

  int size() const { return n_; }
  Jet2& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * n_ + j)]; }
  const Jet2& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * n_ + j)]; }

  Eigen::MatrixXd values() const;
  // Partial derivative of every entry along coordinate k.
  Eigen::MatrixXd derivative(int k) const;

 private:
  int n_ = 0;
  std::vector<Jet2> data_;
};

using JetVector = std::vector<Jet2>;
using CoordinateSpan = std::span<const Jet2>;

JetMatrix operator*(const JetMatrix& a, const JetMatrix& b);
JetMatrix operator*(double s, const JetMatrix& a);
// Inverse with exact first and second derivatives propagated.
JetMatrix inverse(const JetMatrix& m);
// out += weight·(a⊗b + b⊗a)/2
void add_symmetric_product(JetMatrix& out, const JetVector& a, const JetVector& b, const Jet2& weight);
// out += weight·(a⊗b − b⊗a)
void add_wedge(JetMatrix& out, const JetVector& a, const JetVector& b, const Jet2& weight);

// A symmetric (0,2)-tensor field in a chart of dimension `dim`.
struct MetricField {
  int dim = 0;
  std::function<JetMatrix(CoordinateSpan)> eval;
  std::string name;
};

// Antisymmetric (0,2)-tensor field.
struct TwoFormField {
  int dim = 0;
  std::function<JetMatrix(CoordinateSpan)> eval;
};

struct CovectorField {
  int dim = 0;
  std::function<JetVector(CoordinateSpan)> eval;
};

struct ScalarField {
  int dim = 0;
  std::function<Jet2(CoordinateSpan)> eval;
};

// (1,1)-tensor field: entry (a, b) is J^a_b.
struct EndomorphismField {
  int dim = 0;
  std::function<JetMatrix(CoordinateSpan)> eval;
};

// Smooth map from new coordinates to old ones. `jacobian` returns
// d(old^a)/d(new^i) as jets in the new coordinates.
struct ChartMap {
  int new_dim = 0;
  int old_dim = 0;
  std::function<JetVector(CoordinateSpan)> coords;
  std::function<std::vector<JetVector>(CoordinateSpan)> jacobian;  // [a][i]
};

MetricField pullback(const MetricField& m, const ChartMap& map);
MetricField scaled(const MetricField& m, double factor);

// Γ^k_ij stored at k*D*D + i*D + j.
struct Christoffel {
  int dim = 0;
  std::vector<double> data;
  double operator()(int k, int i, int j) const {
    return data[static_cast<std::size_t>((k * dim + i) * dim + j)];
  }
};

// Fully covariant Riemann tensor R_abcd with Ric_bd = g^ac R_abcd.
struct Riemann {
  int dim = 0;
  std::vector<double> data;
  double operator()(int a, int b, int c, int d) const {
    return data[static_cast<std::size_t>(((a * dim + b) * dim + c) * dim + d)];
  }
};

struct CurvatureReport {
  std::vector<double> point;
  Eigen::MatrixXd metric;
  Eigen::MatrixXd ricci;
  double scalar = 0.0;
  double max_abs_ricci = 0.0;

  // ‖Ric − λ g‖∞
  double einstein_residual(double lambda) const;
};

// Inverse of a symmetric metric value; throws NumericError when the
// condition number exceeds `max_condition` or entries are non-finite.
Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& g, double max_condition = 1e13);

Christoffel christoffel(const MetricField& m, std::span<const double> p);
Riemann riemann(const MetricField& m, std::span<const double> p);
CurvatureReport ricci(const MetricField& m, std::span<const double> p);

// d f, as a covector.
Eigen::VectorXd exterior_derivative(const ScalarField& f, std::span<const double> p);
// (dA)_ij = ∂_i A_j − ∂_j A_i.
Eigen::MatrixXd exterior_derivative(const CovectorField& a, std::span<const double> p);
// (dω)_ijk = ∂_i ω_jk + ∂_j ω_ki + ∂_k ω_ij, stored at (i*D + j)*D + k.
std::vector<double> exterior_derivative(const TwoFormField& w, std::span<const double> p);
// d(df) from second jets; identically zero up to rounding.
Eigen::MatrixXd second_exterior_derivative(const ScalarField& f, std::span<const double> p);

// J = g⁻¹ω as a jet field.
EndomorphismField complex_structure(const MetricField& g, const TwoFormField& omega);

// N^k_ij stored at (k*D + i)*D + j. Throws PreconditionError when
// ‖J² + 1‖∞ exceeds `square_tolerance` at p.
std::vector<double> nijenhuis(const EndomorphismField& j, std::span<const double> p,
                              double square_tolerance = 1e-8);

double max_abs(std::span<const double> values);
double max_abs(const Eigen::MatrixXd& m);

}  // namespace conekit
