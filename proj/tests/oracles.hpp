#pragma once

// Independent reference computations used by the unit tests. Nothing here
// touches jets: values come from plain double (or long double) evaluation.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "conekit/tensor_lab.hpp"

namespace oracle {

inline Eigen::MatrixXd metric_value(const conekit::MetricField& m, const std::vector<double>& p) {
  const std::vector<conekit::Jet2> q(p.begin(), p.end());
  return m.eval(q).values();
}

// ∂_k g by central differences.
inline Eigen::MatrixXd fd_metric_derivative(const conekit::MetricField& m, std::vector<double> p, int k,
                                            double h = 1e-5) {
  const double x = p[static_cast<std::size_t>(k)];
  p[static_cast<std::size_t>(k)] = x + h;
  const Eigen::MatrixXd gp = metric_value(m, p);
  p[static_cast<std::size_t>(k)] = x - h;
  const Eigen::MatrixXd gm = metric_value(m, p);
  return (gp - gm) / (2.0 * h);
}

// Γ^k_ij from finite-differenced metric derivatives.
inline std::vector<double> fd_christoffel(const conekit::MetricField& m, const std::vector<double>& p,
                                          double h = 1e-5) {
  const int d = m.dim;
  const Eigen::MatrixXd ginv = metric_value(m, p).inverse();
  std::vector<Eigen::MatrixXd> dg;
  for (int k = 0; k < d; ++k) dg.push_back(fd_metric_derivative(m, p, k, h));
  std::vector<double> out(static_cast<std::size_t>(d * d * d), 0.0);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        out[static_cast<std::size_t>((k * d + i) * d + j)] = 0.5 * s;
      }
  return out;
}

// Gaussian curvature of e^{2φ}(du² + dv²) from −e^{−2φ}Δφ, Δ by a 5-point stencil.
inline double conformal_gaussian_curvature(const std::function<double(double, double)>& phi, double u, double v,
                                           double h = 1e-4) {
  const double lap = (phi(u + h, v) + phi(u - h, v) + phi(u, v + h) + phi(u, v - h) - 4.0 * phi(u, v)) / (h * h);
  return -std::exp(-2.0 * phi(u, v)) * lap;
}

// Root of a monotone function on [lo, hi] by bisection in long double.
template <class F>
long double bisect_ld(F f, long double lo, long double hi) {
  long double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    const long double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5L * (lo + hi);
}

// Roots of (1−y)^{n+1}(1 − c(1−y)) − 2ν, evaluated in long double.
struct Roots {
  long double y1, y2;
};
inline Roots momentum_roots(long double nu, int n) {
  const long double c = static_cast<long double>(n + 1) / (n + 2);
  auto p = [&](long double y) { return std::pow(1.0L - y, n + 1) * (1.0L - c * (1.0L - y)) - 2.0L * nu; };
  return {bisect_ld(p, -1.0L / (n + 1), 0.0L), bisect_ld(p, 0.0L, 1.0L)};
}

}  // namespace oracle
