#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <cstdlib>
#include <string>

namespace gpdr {

// Exact rational arithmetic for dimension exponents and repair objectives.
// Values stay tiny (dyadic exponents, sums of reciprocal depths), so 64-bit
// components never come close to overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t value) : r_(value) {}
  Rational(std::int64_t num, std::int64_t den) : r_(num, den) {}

  std::int64_t num() const { return r_.numerator(); }
  std::int64_t den() const { return r_.denominator(); }

  Rational half() const { return Rational(r_ / 2); }
  Rational twice() const { return Rational(r_ * 2); }

  double to_double() const {
    return static_cast<double>(num()) / static_cast<double>(den());
  }

  std::string str() const {
    std::string s = std::to_string(num());
    if (den() != 1) s += "/" + std::to_string(den());
    return s;
  }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.r_ + b.r_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.r_ - b.r_); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.r_ * b.r_); }
  friend Rational operator/(const Rational& a, const Rational& b) { return Rational(a.r_ / b.r_); }
  Rational operator-() const { return Rational(-r_); }
  Rational& operator+=(const Rational& o) { r_ += o.r_; return *this; }
  Rational& operator-=(const Rational& o) { r_ -= o.r_; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.r_ == b.r_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.r_ != b.r_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.r_ < b.r_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.r_ <= b.r_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.r_ > b.r_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.r_ >= b.r_; }

  friend Rational abs(const Rational& a) { return a < Rational(0) ? -a : a; }

 private:
  explicit Rational(boost::rational<std::int64_t> r) : r_(r) {}
  boost::rational<std::int64_t> r_;
};

}  // namespace gpdr
