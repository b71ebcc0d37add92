#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

namespace ietlab {

namespace detail {
using i128 = __int128;

constexpr std::int64_t kSmallMax = INT64_MAX;  // |v| <= kSmallMax is "small"

inline bool fits_small(i128 v) { return v >= -i128(kSmallMax) && v <= i128(kSmallMax); }

inline int sgn128(i128 v) { return (v > 0) - (v < 0); }

// Sign of a + b*sqrt(d) for d square-free (or d == 0 with b == 0).
// Returns false when the decision would overflow 128 bits.
inline bool try_sign128(i128 a, i128 b, std::int64_t d, int& out) {
  const int sa = sgn128(a);
  const int sb = sgn128(b);
  if (sb == 0) { out = sa; return true; }
  if (sa == 0 || sa == sb) { out = sb; return true; }
  i128 a2, b2, b2d;
  if (__builtin_mul_overflow(a, a, &a2) || __builtin_mul_overflow(b, b, &b2) ||
      __builtin_mul_overflow(b2, i128(d), &b2d)) {
    return false;
  }
  const int c = (a2 > b2d) - (a2 < b2d);
  out = sa > 0 ? c : -c;
  return true;
}
}  // namespace detail

// An element (p + q*sqrt(D)) / r of Q or of a real quadratic field Q(sqrt D).
//
// Canonical form: r > 0, gcd(p, q, r) == 1, D square-free, q == 0 iff D == 0.
// Integers that fit in 63 bits are stored inline and the arithmetic runs in
// 128-bit with overflow checks; anything larger spills to GMP. The
// representation is unique either way, so equality is structural.
//
// Mixing two different radicands in one operation throws DomainError.
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(long long v) : p_(v) {  // NOLINT(google-explicit-constructor)
    if (v == INT64_MIN) *this = ExactScalar(mpq_class(mpz_class(std::to_string(v))));
  }
  explicit ExactScalar(const mpq_class& a);
  ExactScalar(const mpq_class& a, const mpq_class& b, long long radicand);

  static ExactScalar fraction(long long num, long long den);
  static ExactScalar sqrt(long long radicand);
  // Accepts "p", "p/q", "a+b*sqrt(D)", "a-b*sqrt(D)", "b*sqrt(D)", "sqrt(D)"
  // (whitespace ignored). Throws ParseError.
  static ExactScalar parse(std::string_view text);

  mpq_class rational_part() const;
  mpq_class irrational_part() const;
  long long radicand() const { return d_; }
  bool is_rational() const { return wide_ ? wide_->q == 0 : q_ == 0; }
  bool is_zero() const { return !wide_ && p_ == 0 && q_ == 0; }
  bool is_inline() const { return !wide_; }

  int sign() const;
  // Canonical text: "p/q" (or "p"), or "A+B*sqrt(D)" / "A-B*sqrt(D)".
  std::string str() const;
  // Rounded half away from zero to `digits` places. Display only.
  std::string to_decimal(int digits) const;
  mpz_class floor() const;
  double to_double() const;  // display / diagnostics only
  std::size_t hash() const;

  ExactScalar operator-() const;
  friend ExactScalar operator+(const ExactScalar& x, const ExactScalar& y);
  friend ExactScalar operator-(const ExactScalar& x, const ExactScalar& y);
  friend ExactScalar operator*(const ExactScalar& x, const ExactScalar& y);
  friend ExactScalar operator/(const ExactScalar& x, const ExactScalar& y);
  ExactScalar& operator+=(const ExactScalar& y) { return *this = *this + y; }
  ExactScalar& operator-=(const ExactScalar& y) { return *this = *this - y; }
  ExactScalar& operator*=(const ExactScalar& y) { return *this = *this * y; }
  ExactScalar& operator/=(const ExactScalar& y) { return *this = *this / y; }

  friend bool operator==(const ExactScalar& x, const ExactScalar& y);
  friend int compare(const ExactScalar& x, const ExactScalar& y);
  friend std::strong_ordering operator<=>(const ExactScalar& x, const ExactScalar& y) {
    const int c = compare(x, y);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  struct Wide {
    mpz_class p, q, r;
  };

  static ExactScalar from128(detail::i128 p, detail::i128 q, detail::i128 r, std::int64_t d);
  static ExactScalar from_wide(mpz_class p, mpz_class q, mpz_class r, std::int64_t d);
  Wide widen() const;
  static std::int64_t common_radicand(const ExactScalar& x, const ExactScalar& y);
  static ExactScalar add_slow(const ExactScalar& x, const ExactScalar& y, int ysign);
  static int compare_slow(const ExactScalar& x, const ExactScalar& y);

  std::int64_t p_ = 0, q_ = 0, r_ = 1, d_ = 0;
  std::shared_ptr<const Wide> wide_;
};

std::ostream& operator<<(std::ostream& os, const ExactScalar& x);

inline ExactScalar abs(const ExactScalar& x) { return x.sign() < 0 ? -x : x; }
inline const ExactScalar& min(const ExactScalar& x, const ExactScalar& y) { return y < x ? y : x; }
inline const ExactScalar& max(const ExactScalar& x, const ExactScalar& y) { return x < y ? y : x; }

// ---- inline fast paths ------------------------------------------------------

inline std::int64_t ExactScalar::common_radicand(const ExactScalar& x, const ExactScalar& y) {
  if (x.d_ == 0) return y.d_;
  if (y.d_ == 0 || y.d_ == x.d_) return x.d_;
  return -1;
}

inline ExactScalar operator+(const ExactScalar& x, const ExactScalar& y) {
  if (!x.wide_ && !y.wide_) {
    const std::int64_t d = ExactScalar::common_radicand(x, y);
    if (d >= 0) {
      using detail::i128;
      if (x.r_ == y.r_) {
        return ExactScalar::from128(i128(x.p_) + y.p_, i128(x.q_) + y.q_, x.r_, d);
      }
      return ExactScalar::from128(i128(x.p_) * y.r_ + i128(y.p_) * x.r_,
                                  i128(x.q_) * y.r_ + i128(y.q_) * x.r_,
                                  i128(x.r_) * y.r_, d);
    }
  }
  return ExactScalar::add_slow(x, y, +1);
}

inline ExactScalar operator-(const ExactScalar& x, const ExactScalar& y) {
  if (!x.wide_ && !y.wide_) {
    const std::int64_t d = ExactScalar::common_radicand(x, y);
    if (d >= 0) {
      using detail::i128;
      if (x.r_ == y.r_) {
        return ExactScalar::from128(i128(x.p_) - y.p_, i128(x.q_) - y.q_, x.r_, d);
      }
      return ExactScalar::from128(i128(x.p_) * y.r_ - i128(y.p_) * x.r_,
                                  i128(x.q_) * y.r_ - i128(y.q_) * x.r_,
                                  i128(x.r_) * y.r_, d);
    }
  }
  return ExactScalar::add_slow(x, y, -1);
}

inline int compare(const ExactScalar& x, const ExactScalar& y) {
  if (!x.wide_ && !y.wide_) {
    const std::int64_t d = ExactScalar::common_radicand(x, y);
    if (d >= 0) {
      using detail::i128;
      i128 a, b;
      if (x.r_ == y.r_) {
        a = i128(x.p_) - y.p_;
        b = i128(x.q_) - y.q_;
      } else {
        a = i128(x.p_) * y.r_ - i128(y.p_) * x.r_;
        b = i128(x.q_) * y.r_ - i128(y.q_) * x.r_;
      }
      int s;
      if (detail::try_sign128(a, b, d, s)) return s;
    }
  }
  return ExactScalar::compare_slow(x, y);
}

inline bool operator==(const ExactScalar& x, const ExactScalar& y) {
  if (!x.wide_ && !y.wide_) {
    return x.p_ == y.p_ && x.q_ == y.q_ && x.r_ == y.r_ && x.d_ == y.d_;
  }
  if (!x.wide_ || !y.wide_) return false;  // canonical: inline iff it fits
  return x.d_ == y.d_ && x.wide_->p == y.wide_->p && x.wide_->q == y.wide_->q &&
         x.wide_->r == y.wide_->r;
}

struct ExactScalarHash {
  std::size_t operator()(const ExactScalar& x) const { return x.hash(); }
};

}  // namespace ietlab
