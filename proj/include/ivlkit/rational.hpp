#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ivl {

// Exact rational arithmetic on 64-bit components. Permission amounts and the
// built-in prover's linear arithmetic both require exact equality, so floating
// point is banned throughout.
class Rational {
public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) { normalize(); }
  static Rational from_int(std::int64_t n) { return Rational(n, 1); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator+(const Rational& o) const {
    return Rational(checked(mul128(num_, o.den_) + mul128(o.num_, den_)),
                    checked(mul128(den_, o.den_)));
  }
  Rational operator-(const Rational& o) const {
    return Rational(checked(mul128(num_, o.den_) - mul128(o.num_, den_)),
                    checked(mul128(den_, o.den_)));
  }
  Rational operator*(const Rational& o) const {
    return Rational(checked(mul128(num_, o.num_)), checked(mul128(den_, o.den_)));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational(checked(mul128(num_, o.den_)), checked(mul128(den_, o.num_)));
  }
  Rational operator-() const { return Rational(-num_, den_); }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return mul128(num_, o.den_) < mul128(o.num_, den_); }
  bool operator<=(const Rational& o) const { return mul128(num_, o.den_) <= mul128(o.num_, den_); }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

private:
  using i128 = __int128;

  static i128 mul128(std::int64_t a, std::int64_t b) { return i128(a) * i128(b); }

  static std::int64_t checked(i128 v) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
      throw std::overflow_error("rational component overflow");
    return std::int64_t(v);
  }

  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_;
  std::int64_t den_;
};

// Fractional permission amount: a rational confined to [0, 1].
inline bool is_valid_perm(const Rational& r) {
  return !r.is_negative() && r <= Rational::from_int(1);
}

}  // namespace ivl
