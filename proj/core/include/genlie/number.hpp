#pragma once

#include <cstdint>
#include <string>

namespace genlie {

// Numeric constant inside an expression tree: an exact rational while all
// arithmetic stays within 64-bit numerators/denominators, a double otherwise.
class Number {
 public:
  Number() = default;
  Number(std::int64_t value) : num_(value) {}  // NOLINT: implicit by intent
  static Number rational(std::int64_t num, std::int64_t den);
  static Number real(double value);

  bool exact() const { return exact_; }
  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double value() const;

  bool is_zero() const;
  bool is_one() const;
  bool is_minus_one() const;
  bool is_integer() const;
  bool is_negative() const;

  Number operator-() const;
  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a, const Number& b) { return a + (-b); }
  friend Number operator*(const Number& a, const Number& b);
  friend Number operator/(const Number& a, const Number& b);
  // Integer power; falls back to floating point on overflow.
  Number pow(std::int64_t exponent) const;

  // Total order consistent with numeric value; exact sorts before inexact on
  // ties so structural comparison stays deterministic.
  int compare(const Number& other) const;
  bool identical(const Number& other) const;

  std::string to_string() const;

 private:
  bool exact_ = true;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double real_ = 0.0;
};

}  // namespace genlie
