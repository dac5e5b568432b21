#include "conekit/rational.hpp"

#include <stdexcept>

namespace conekit {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational Rational::parse(const std::string& s) {
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: '" + s + "'");
  if (q.get_den() == 0) throw std::domain_error("rational with zero denominator");
  q.canonicalize();
  return Rational(q);
}

Rational Rational::operator-() const { return Rational(mpq_class(-q_)); }
Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ + b.q_)); }
Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ - b.q_)); }
Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ * b.q_)); }
Rational operator/(const Rational& a, const Rational& b) {
  if (sgn(b.q_) == 0) throw std::domain_error("rational division by zero");
  return Rational(mpq_class(a.q_ / b.q_));
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace conekit
