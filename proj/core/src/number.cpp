#include "genlie/number.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "genlie/error.hpp"

namespace genlie {
namespace {

using i128 = __int128;

bool fits(i128 v) {
  return v >= static_cast<i128>(INT64_MIN) + 1 && v <= static_cast<i128>(INT64_MAX);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Number make_exact(i128 num, i128 den) {
  if (den == 0) throw DomainError("division by zero in constant arithmetic");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits(num) || !fits(den)) {
    return Number::real(static_cast<double>(num) / static_cast<double>(den));
  }
  return Number::rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Number Number::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("zero denominator in rational constant");
  Number n;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  n.num_ = num;
  n.den_ = den;
  return n;
}

Number Number::real(double value) {
  Number n;
  n.exact_ = false;
  n.real_ = value;
  return n;
}

double Number::value() const {
  return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : real_;
}

bool Number::is_zero() const { return exact_ ? num_ == 0 : real_ == 0.0; }
bool Number::is_one() const { return exact_ ? (num_ == 1 && den_ == 1) : real_ == 1.0; }
bool Number::is_minus_one() const {
  return exact_ ? (num_ == -1 && den_ == 1) : real_ == -1.0;
}
bool Number::is_integer() const {
  return exact_ ? den_ == 1 : (std::isfinite(real_) && std::floor(real_) == real_);
}
bool Number::is_negative() const { return exact_ ? num_ < 0 : real_ < 0.0; }

Number Number::operator-() const {
  if (exact_) return make_exact(-static_cast<i128>(num_), den_);
  return real(-real_);
}

Number operator+(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    i128 num = static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_;
    i128 den = static_cast<i128>(a.den_) * b.den_;
    return make_exact(num, den);
  }
  return Number::real(a.value() + b.value());
}

Number operator*(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    return make_exact(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
  }
  return Number::real(a.value() * b.value());
}

Number operator/(const Number& a, const Number& b) {
  if (b.is_zero()) throw DomainError("division by zero in constant arithmetic");
  if (a.exact_ && b.exact_) {
    return make_exact(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
  }
  return Number::real(a.value() / b.value());
}

Number Number::pow(std::int64_t exponent) const {
  if (exponent == 0) return Number(1);
  if (exponent < 0) {
    if (is_zero()) throw DomainError("zero raised to a negative power");
    return Number(1) / pow(-exponent);
  }
  if (!exact_) return real(std::pow(real_, static_cast<double>(exponent)));
  Number result(1);
  Number base = *this;
  std::int64_t e = exponent;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
    if (!result.exact_ || !base.exact_) return real(std::pow(value(), static_cast<double>(exponent)));
  }
  return result;
}

int Number::compare(const Number& other) const {
  if (exact_ && other.exact_) {
    i128 lhs = static_cast<i128>(num_) * other.den_;
    i128 rhs = static_cast<i128>(other.num_) * den_;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  double a = value();
  double b = other.value();
  if (a < b) return -1;
  if (a > b) return 1;
  if (exact_ != other.exact_) return exact_ ? -1 : 1;
  return 0;
}

bool Number::identical(const Number& other) const {
  if (exact_ != other.exact_) return false;
  if (exact_) return num_ == other.num_ && den_ == other.den_;
  return real_ == other.real_ || (std::isnan(real_) && std::isnan(other.real_));
}

std::string Number::to_string() const {
  if (exact_) {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", real_);
  std::string s(buf);
  // Keep a marker so the printed constant re-parses as floating point.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace genlie
