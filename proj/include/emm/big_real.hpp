#pragma once

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace emm {

/// Mantissa width, in bits, carried by a BigReal.
struct PrecisionBits {
  long bits = 128;

  friend constexpr bool operator==(PrecisionBits, PrecisionBits) = default;
};

/// Arbitrary-precision real backed by MPFR, round-to-nearest throughout.
///
/// Every object owns its own precision. Binary operations produce a result
/// at the larger of the two operand precisions, so mixing widths never
/// silently truncates. Assignment copies both value and precision.
class BigReal {
 public:
  BigReal();
  explicit BigReal(PrecisionBits prec);
  BigReal(long value, PrecisionBits prec);
  BigReal(double value, PrecisionBits prec);
  /// Parses a decimal (or "inf"/"nan") string; throws std::invalid_argument.
  BigReal(std::string_view text, PrecisionBits prec);

  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  ~BigReal();

  PrecisionBits precision() const { return PrecisionBits{static_cast<long>(mpfr_get_prec(v_))}; }

  /// Changes the precision in place, rounding the stored value if narrowing.
  void set_precision(PrecisionBits prec);

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long_floor() const { return mpfr_get_si(v_, MPFR_RNDD); }

  /// Decimal scientific form with `digits` significant digits (0 = enough to round-trip).
  std::string to_string(int digits = 0) const;
  /// Fixed-point form with `decimals` digits after the point, using the given rounding.
  std::string to_fixed(int decimals, mpfr_rnd_t rounding = MPFR_RNDN) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// Binary exponent e with value = m * 2^e, 0.5 <= |m| < 1. Zero maps to LONG_MIN.
  long exponent() const;

  BigReal& operator+=(const BigReal& rhs);
  BigReal& operator-=(const BigReal& rhs);
  BigReal& operator*=(const BigReal& rhs);
  BigReal& operator/=(const BigReal& rhs);
  BigReal& operator+=(long rhs);
  BigReal& operator-=(long rhs);
  BigReal& operator*=(long rhs);
  BigReal& operator/=(long rhs);

  /// this += a * b, with a single rounding.
  BigReal& add_product(const BigReal& a, const BigReal& b);
  /// this -= a * b, with a single rounding.
  BigReal& sub_product(const BigReal& a, const BigReal& b);

  BigReal operator-() const;

  friend BigReal operator+(BigReal lhs, const BigReal& rhs) { return lhs += rhs; }
  friend BigReal operator-(BigReal lhs, const BigReal& rhs) { return lhs -= rhs; }
  friend BigReal operator*(BigReal lhs, const BigReal& rhs) { return lhs *= rhs; }
  friend BigReal operator/(BigReal lhs, const BigReal& rhs) { return lhs /= rhs; }
  friend BigReal operator+(BigReal lhs, long rhs) { return lhs += rhs; }
  friend BigReal operator-(BigReal lhs, long rhs) { return lhs -= rhs; }
  friend BigReal operator*(BigReal lhs, long rhs) { return lhs *= rhs; }
  friend BigReal operator/(BigReal lhs, long rhs) { return lhs /= rhs; }
  friend BigReal operator*(long lhs, BigReal rhs) { return rhs *= lhs; }

  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);
  friend bool operator==(const BigReal& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const BigReal& a, long b);

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  void widen_to(const BigReal& other);

  mpfr_t v_;
};

BigReal abs(BigReal x);
BigReal sqrt(BigReal x);
BigReal hypot(const BigReal& a, const BigReal& b);
BigReal min(const BigReal& a, const BigReal& b);
BigReal max(const BigReal& a, const BigReal& b);
/// x * 2^e, exact.
BigReal ldexp(BigReal x, long e);
/// 2^e at the given precision, exact.
BigReal pow2(long e, PrecisionBits prec);

std::ostream& operator<<(std::ostream& os, const BigReal& x);

}  // namespace emm
