#pragma once

// Kähler–Einstein bases (V, g_V, ω_V, A) normalised so that
// Ric(g_V) = 2(n+1) g_V and dA = 2 ω_V.

#include <Eigen/Dense>

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "conekit/tensor_lab.hpp"

namespace conekit {

inline constexpr double kDefaultChartRadius = 2.0;

struct VChartPoint {
  std::vector<double> coords;  // (Re z_1, Im z_1, Re z_2, ...) factor by factor
};

struct BaseTensors {
  JetMatrix g;
  JetMatrix omega;
  JetVector a;
};

struct BaseValues {
  Eigen::MatrixXd g;
  Eigen::MatrixXd omega;
  Eigen::VectorXd a;
};

// Product of Fubini–Study factors CP^{d_a − 1}, each in its standard
// affine chart and each scaled so the product is Kähler–Einstein with
// Einstein constant 2(n+1).
class BaseManifold {
 public:
  int n() const { return n_; }
  int real_dim() const { return 2 * n_; }
  int fano_index() const { return fano_index_; }
  const std::vector<int>& factor_dims() const { return dims_; }
  // Potential scale a_f of each factor: φ = a_f log(1 + |z|²).
  const std::vector<double>& potential_scales() const { return scales_; }
  double potential_scale() const { return scales_.front(); }
  double chart_radius() const { return chart_radius_; }
  std::string describe() const;

  // ⟨c₁(K_V^{−1/I}), Σ_i⟩ for the hyperplane generator of factor i.
  int chern_pairing(int cycle) const;
  int cycle_count() const { return static_cast<int>(dims_.size()); }

  // Jet evaluation at chart coordinates given as jets (for assembly).
  BaseTensors evaluate(CoordinateSpan q) const;
  // Throws DomainError when a factor's complex coordinate leaves the chart radius.
  void check_chart(std::span<const double> q) const;

  MetricField metric_field() const;
  TwoFormField kahler_form_field() const;
  CovectorField connection_field() const;

 private:
  friend BaseManifold product_base(std::span<const int> dims, double chart_radius);
  int n_ = 0;
  int fano_index_ = 0;
  double chart_radius_ = kDefaultChartRadius;
  std::vector<int> dims_;
  std::vector<double> scales_;
};

BaseManifold fubini_study_base(int n, double chart_radius = kDefaultChartRadius);
BaseManifold product_base(std::span<const int> dims, double chart_radius = kDefaultChartRadius);
inline BaseManifold product_base(std::initializer_list<int> dims) {
  return product_base(std::span<const int>(dims.begin(), dims.size()));
}

BaseValues eval_base(const BaseManifold& b, const VChartPoint& q);

// Einstein constant of the unit-scale Fubini–Study metric on CP^m, read off
// a Ricci evaluation at the chart origin. Cached per m.
double unit_fubini_study_einstein_constant(int m);

// Fubini–Study tensors of CP^m with potential a·log(1+|z|²), as jets.
BaseTensors fubini_study_tensors(int m, double a, CoordinateSpan q);

}  // namespace conekit
