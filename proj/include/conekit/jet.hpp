#pragma once

// Second-order forward-mode jets: a value together with its gradient and
// Hessian with respect to up to kMaxJetDim independent variables.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace conekit {

inline constexpr int kMaxJetDim = 12;

class Jet2 {
 public:
  static constexpr int kPacked = kMaxJetDim * (kMaxJetDim + 1) / 2;

  Jet2() = default;
  // Implicit so that literals mix freely with jets in formulas.
  Jet2(double value) : val_(value) {}  // NOLINT

  static Jet2 variable(double value, int index, int dim) {
    check_dim(dim);
    if (index < 0 || index >= dim) throw std::out_of_range("Jet2: variable index out of range");
    Jet2 j(value);
    j.dim_ = dim;
    j.grad_[index] = 1.0;
    return j;
  }

  double value() const { return val_; }
  int dim() const { return dim_; }
  double d(int i) const { return i < dim_ ? grad_[i] : 0.0; }
  double dd(int i, int j) const {
    if (i >= dim_ || j >= dim_) return 0.0;
    return hess_[packed(i, j)];
  }

  void set_gradient(int i, double v) {
    grow(i + 1);
    grad_[i] = v;
  }
  void set_hessian(int i, int j, double v) {
    grow((i > j ? i : j) + 1);
    hess_[packed(i, j)] = v;
  }

  // f(u) given f, f', f'' evaluated at the value of u.
  Jet2 chain(double f0, double f1, double f2) const {
    Jet2 r(f0);
    r.dim_ = dim_;
    for (int i = 0; i < dim_; ++i) r.grad_[i] = f1 * grad_[i];
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i <= j; ++i) {
        const auto k = packed(i, j);
        r.hess_[k] = f1 * hess_[k] + f2 * grad_[i] * grad_[j];
      }
    return r;
  }

  friend Jet2 operator+(const Jet2& a) { return a; }
  friend Jet2 operator-(const Jet2& a) { return a.chain(-a.val_, -1.0, 0.0); }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r(a.val_ + b.val_);
    r.dim_ = a.dim_ > b.dim_ ? a.dim_ : b.dim_;
    for (int i = 0; i < r.dim_; ++i) r.grad_[i] = a.grad_[i] + b.grad_[i];
    const int np = r.dim_ * (r.dim_ + 1) / 2;
    for (int k = 0; k < np; ++k) r.hess_[k] = a.hess_[k] + b.hess_[k];
    return r;
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r(a.val_ - b.val_);
    r.dim_ = a.dim_ > b.dim_ ? a.dim_ : b.dim_;
    for (int i = 0; i < r.dim_; ++i) r.grad_[i] = a.grad_[i] - b.grad_[i];
    const int np = r.dim_ * (r.dim_ + 1) / 2;
    for (int k = 0; k < np; ++k) r.hess_[k] = a.hess_[k] - b.hess_[k];
    return r;
  }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r(a.val_ * b.val_);
    r.dim_ = a.dim_ > b.dim_ ? a.dim_ : b.dim_;
    for (int i = 0; i < r.dim_; ++i) r.grad_[i] = a.val_ * b.grad_[i] + b.val_ * a.grad_[i];
    for (int j = 0; j < r.dim_; ++j)
      for (int i = 0; i <= j; ++i) {
        const auto k = packed(i, j);
        r.hess_[k] = a.val_ * b.hess_[k] + b.val_ * a.hess_[k] + a.grad_[i] * b.grad_[j] +
                     a.grad_[j] * b.grad_[i];
      }
    return r;
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

  friend Jet2 operator*(double s, const Jet2& a) { return a.scaled(s); }
  friend Jet2 operator*(const Jet2& a, double s) { return a.scaled(s); }
  friend Jet2 operator/(const Jet2& a, double s) { return a.scaled(1.0 / s); }

  Jet2& operator+=(const Jet2& o) { return *this = *this + o; }
  Jet2& operator-=(const Jet2& o) { return *this = *this - o; }
  Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
  Jet2& operator/=(const Jet2& o) { return *this = *this / o; }

  friend Jet2 reciprocal(const Jet2& a) {
    const double u = a.val_;
    return a.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u));
  }

 private:
  static constexpr std::size_t packed(int i, int j) {
    return i <= j ? static_cast<std::size_t>(j * (j + 1) / 2 + i)
                  : static_cast<std::size_t>(i * (i + 1) / 2 + j);
  }
  static void check_dim(int dim) {
    if (dim < 0 || dim > kMaxJetDim) throw std::out_of_range("Jet2: dimension exceeds kMaxJetDim");
  }
  void grow(int dim) {
    check_dim(dim);
    if (dim > dim_) dim_ = dim;
  }
  Jet2 scaled(double s) const {
    Jet2 r(val_ * s);
    r.dim_ = dim_;
    for (int i = 0; i < dim_; ++i) r.grad_[i] = s * grad_[i];
    const int np = dim_ * (dim_ + 1) / 2;
    for (int k = 0; k < np; ++k) r.hess_[k] = s * hess_[k];
    return r;
  }

  int dim_ = 0;
  double val_ = 0.0;
  std::array<double, kMaxJetDim> grad_{};
  std::array<double, kPacked> hess_{};
};

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.value(); }

inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.value());
  return a.chain(s, 0.5 / s, -0.25 / (s * a.value()));
}
inline Jet2 log(const Jet2& a) {
  const double u = a.value();
  return a.chain(std::log(u), 1.0 / u, -1.0 / (u * u));
}
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value());
  return a.chain(e, e, e);
}
inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.chain(s, c, -s);
}
inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.chain(c, -s, -c);
}

// Integer power; exact at zero for non-negative exponents.
inline double ipow(double u, int k) {
  if (k < 0) return 1.0 / ipow(u, -k);
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= u;
  return r;
}
inline Jet2 ipow(const Jet2& a, int k) {
  const double u = a.value();
  if (k == 0) return Jet2(1.0);
  const double f1 = k * ipow(u, k - 1);
  const double f2 = (k == 1) ? 0.0 : static_cast<double>(k) * (k - 1) * ipow(u, k - 2);
  return a.chain(ipow(u, k), f1, f2);
}

// Independent variables seeded at the given point.
inline std::vector<Jet2> seed_variables(std::span<const double> point) {
  const int dim = static_cast<int>(point.size());
  std::vector<Jet2> vars;
  vars.reserve(point.size());
  for (int i = 0; i < dim; ++i) vars.push_back(Jet2::variable(point[static_cast<std::size_t>(i)], i, dim));
  return vars;
}

}  // namespace conekit
