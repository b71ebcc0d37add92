#include "ietlab/exact_scalar.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>

#include "ietlab/error.hpp"

namespace ietlab {

using detail::i128;

namespace {

using u128 = unsigned __int128;

u128 uabs(i128 v) { return v < 0 ? u128(-v) : u128(v); }

u128 gcd_u128(u128 a, u128 b) {
  if (a <= UINT64_MAX && b <= UINT64_MAX) {
    return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
  }
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

mpz_class to_mpz(i128 v) {
  const bool neg = v < 0;
  u128 u = uabs(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
  mpz_class out = (hi << 64) + lo;
  return neg ? mpz_class(-out) : out;
}

mpz_class to_mpz(std::int64_t v) { return mpz_class(static_cast<long>(v)); }

bool mpz_fits_small(const mpz_class& v) { return mpz_fits_slong_p(v.get_mpz_t()) && v != LONG_MIN; }

// Writes D = s^2 * f with f square-free.
void square_free_split(std::int64_t d, std::int64_t& square_root, std::int64_t& free_part) {
  square_root = 1;
  free_part = 1;
  std::int64_t rest = d;
  for (std::int64_t f = 2; f * f <= rest; ++f) {
    int e = 0;
    while (rest % f == 0) {
      rest /= f;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) square_root *= f;
    if (e % 2 == 1) free_part *= f;
  }
  free_part *= rest;
}

// Sign of a + b*sqrt(d) with big integers.
int sign_wide(const mpz_class& a, const mpz_class& b, std::int64_t d) {
  const int sa = sgn(a);
  const int sb = sgn(b);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  const mpz_class a2 = a * a;
  const mpz_class b2d = b * b * to_mpz(d);
  const int c = cmp(a2, b2d);
  return sa > 0 ? (c > 0) - (c < 0) : (c < 0) - (c > 0);
}

std::string rational_text(const mpq_class& v) {
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

bool is_rational_token(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  const std::size_t digits_start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == digits_start) return false;
  if (i == s.size()) return true;
  if (s[i] != '/') return false;
  ++i;
  const std::size_t den_start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  return i == s.size() && i > den_start;
}

mpq_class parse_rational(std::string_view s, std::string_view whole) {
  if (!is_rational_token(s)) {
    throw ParseError("malformed scalar '" + std::string(whole) + "'");
  }
  std::string t(s);
  if (t[0] == '+') t.erase(0, 1);
  mpq_class v;
  const std::size_t slash = t.find('/');
  if (slash == std::string::npos) {
    v = mpq_class(mpz_class(t));
  } else {
    mpz_class num(t.substr(0, slash));
    mpz_class den(t.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(whole) + "'");
    v = mpq_class(num, den);
    v.canonicalize();
  }
  return v;
}

}  // namespace

ExactScalar ExactScalar::from128(i128 p, i128 q, i128 r, std::int64_t d) {
  if (r < 0) {
    p = -p;
    q = -q;
    r = -r;
  }
  ExactScalar out;
  if (q == 0) d = 0;
  if (p == 0 && q == 0) return out;
  u128 g = gcd_u128(uabs(p), uabs(q));
  g = gcd_u128(g, u128(r));
  if (g > 1) {
    p /= i128(g);
    q /= i128(g);
    r /= i128(g);
  }
  if (detail::fits_small(p) && detail::fits_small(q) && detail::fits_small(r)) {
    out.p_ = static_cast<std::int64_t>(p);
    out.q_ = static_cast<std::int64_t>(q);
    out.r_ = static_cast<std::int64_t>(r);
    out.d_ = d;
    return out;
  }
  return from_wide(to_mpz(p), to_mpz(q), to_mpz(r), d);
}

ExactScalar ExactScalar::from_wide(mpz_class p, mpz_class q, mpz_class r, std::int64_t d) {
  if (r == 0) throw DomainError("division by zero");
  if (r < 0) {
    p = -p;
    q = -q;
    r = -r;
  }
  ExactScalar out;
  if (q == 0) d = 0;
  if (p == 0 && q == 0) return out;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), r.get_mpz_t());
  if (g != 1) {
    mpz_divexact(p.get_mpz_t(), p.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(q.get_mpz_t(), q.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), g.get_mpz_t());
  }
  out.d_ = d;
  if (mpz_fits_small(p) && mpz_fits_small(q) && mpz_fits_small(r)) {
    out.p_ = p.get_si();
    out.q_ = q.get_si();
    out.r_ = r.get_si();
    return out;
  }
  out.p_ = out.q_ = 0;
  out.r_ = 1;
  out.wide_ = std::make_shared<const Wide>(Wide{std::move(p), std::move(q), std::move(r)});
  return out;
}

ExactScalar::Wide ExactScalar::widen() const {
  if (wide_) return *wide_;
  return Wide{to_mpz(p_), to_mpz(q_), to_mpz(r_)};
}

ExactScalar::ExactScalar(const mpq_class& a) {
  mpq_class c(a);
  c.canonicalize();
  *this = from_wide(c.get_num(), mpz_class(0), c.get_den(), 0);
}

ExactScalar::ExactScalar(const mpq_class& a, const mpq_class& b, long long radicand) {
  mpq_class ca(a), cb(b);
  ca.canonicalize();
  cb.canonicalize();
  if (radicand < 0) throw DomainError("negative radicand " + std::to_string(radicand));
  if (cb == 0 || radicand == 0) {
    if (cb != 0) throw DomainError("irrational part with radicand 0");
    *this = ExactScalar(ca);
    return;
  }
  std::int64_t s = 1, f = 1;
  square_free_split(radicand, s, f);
  cb *= s;
  if (f == 1) {
    *this = ExactScalar(mpq_class(ca + cb));
    return;
  }
  mpz_class r;
  mpz_lcm(r.get_mpz_t(), ca.get_den_mpz_t(), cb.get_den_mpz_t());
  mpz_class p = ca.get_num() * (r / ca.get_den());
  mpz_class q = cb.get_num() * (r / cb.get_den());
  *this = from_wide(std::move(p), std::move(q), std::move(r), f);
}

ExactScalar ExactScalar::fraction(long long num, long long den) {
  if (den == 0) throw DomainError("division by zero");
  return from128(num, 0, den, 0);
}

ExactScalar ExactScalar::sqrt(long long radicand) { return ExactScalar(0, 1, radicand); }

mpq_class ExactScalar::rational_part() const {
  const Wide w = widen();
  mpq_class v(w.p, w.r);
  v.canonicalize();
  return v;
}

mpq_class ExactScalar::irrational_part() const {
  const Wide w = widen();
  mpq_class v(w.q, w.r);
  v.canonicalize();
  return v;
}

int ExactScalar::sign() const {
  if (!wide_) {
    int s;
    if (detail::try_sign128(p_, q_, d_, s)) return s;
  }
  const Wide w = widen();
  return sign_wide(w.p, w.q, d_);
}

ExactScalar ExactScalar::operator-() const {
  if (!wide_) {
    ExactScalar out(*this);
    out.p_ = -p_;
    out.q_ = -q_;
    return out;
  }
  return from_wide(-wide_->p, -wide_->q, wide_->r, d_);
}

ExactScalar ExactScalar::add_slow(const ExactScalar& x, const ExactScalar& y, int ysign) {
  const std::int64_t d = common_radicand(x, y);
  if (d < 0) {
    throw DomainError("incompatible radicands sqrt(" + std::to_string(x.d_) + ") and sqrt(" +
                      std::to_string(y.d_) + ")");
  }
  const Wide a = x.widen();
  const Wide b = y.widen();
  if (ysign > 0) {
    return from_wide(a.p * b.r + b.p * a.r, a.q * b.r + b.q * a.r, a.r * b.r, d);
  }
  return from_wide(a.p * b.r - b.p * a.r, a.q * b.r - b.q * a.r, a.r * b.r, d);
}

int ExactScalar::compare_slow(const ExactScalar& x, const ExactScalar& y) {
  const std::int64_t d = common_radicand(x, y);
  if (d < 0) {
    throw DomainError("incompatible radicands sqrt(" + std::to_string(x.d_) + ") and sqrt(" +
                      std::to_string(y.d_) + ")");
  }
  const Wide a = x.widen();
  const Wide b = y.widen();
  return sign_wide(a.p * b.r - b.p * a.r, a.q * b.r - b.q * a.r, d);
}

ExactScalar operator*(const ExactScalar& x, const ExactScalar& y) {
  const std::int64_t d = ExactScalar::common_radicand(x, y);
  if (d < 0) {
    throw DomainError("incompatible radicands sqrt(" + std::to_string(x.d_) + ") and sqrt(" +
                      std::to_string(y.d_) + ")");
  }
  if (!x.wide_ && !y.wide_) {
    i128 pp, qq, qqd, p, q1, q2, q, r;
    const bool overflow = __builtin_mul_overflow(i128(x.p_), i128(y.p_), &pp) ||
                          __builtin_mul_overflow(i128(x.q_), i128(y.q_), &qq) ||
                          __builtin_mul_overflow(qq, i128(d), &qqd) ||
                          __builtin_add_overflow(pp, qqd, &p) ||
                          __builtin_mul_overflow(i128(x.p_), i128(y.q_), &q1) ||
                          __builtin_mul_overflow(i128(x.q_), i128(y.p_), &q2) ||
                          __builtin_add_overflow(q1, q2, &q) ||
                          __builtin_mul_overflow(i128(x.r_), i128(y.r_), &r);
    if (!overflow) return ExactScalar::from128(p, q, r, d);
  }
  const ExactScalar::Wide a = x.widen();
  const ExactScalar::Wide b = y.widen();
  const mpz_class dd = to_mpz(d);
  return ExactScalar::from_wide(a.p * b.p + a.q * b.q * dd, a.p * b.q + a.q * b.p, a.r * b.r, d);
}

ExactScalar operator/(const ExactScalar& x, const ExactScalar& y) {
  if (y.is_zero()) throw DomainError("division by zero");
  const std::int64_t d = ExactScalar::common_radicand(x, y);
  if (d < 0) {
    throw DomainError("incompatible radicands sqrt(" + std::to_string(x.d_) + ") and sqrt(" +
                      std::to_string(y.d_) + ")");
  }
  if (!x.wide_ && !y.wide_ && y.q_ == 0) {
    // (p + q sqrt D)/r divided by s/t = (p + q sqrt D) t / (r s)
    return ExactScalar::from128(i128(x.p_) * y.r_, i128(x.q_) * y.r_, i128(x.r_) * y.p_, d);
  }
  const ExactScalar::Wide a = x.widen();
  const ExactScalar::Wide b = y.widen();
  const mpz_class dd = to_mpz(d);
  // x / y = r_b (p_a + q_a s)(p_b - q_b s) / (r_a (p_b^2 - q_b^2 D))
  const mpz_class num_p = b.r * (a.p * b.p - a.q * b.q * dd);
  const mpz_class num_q = b.r * (a.q * b.p - a.p * b.q);
  const mpz_class den = a.r * (b.p * b.p - b.q * b.q * dd);
  return ExactScalar::from_wide(num_p, num_q, den, d);
}

mpz_class ExactScalar::floor() const {
  const Wide w = widen();
  mpz_class c;
  if (w.q == 0) {
    mpz_fdiv_q(c.get_mpz_t(), w.p.get_mpz_t(), w.r.get_mpz_t());
    return c;
  }
  // s < |q| sqrt(D) < s + 1, so x < upper / r.
  mpz_class s2 = w.q * w.q * to_mpz(d_);
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), s2.get_mpz_t());
  const mpz_class upper = w.q > 0 ? mpz_class(w.p + s + 1) : mpz_class(w.p - s);
  mpz_fdiv_q(c.get_mpz_t(), upper.get_mpz_t(), w.r.get_mpz_t());
  if (compare(ExactScalar(mpq_class(c)), *this) <= 0) return c;
  return c - 1;
}

double ExactScalar::to_double() const {
  return rational_part().get_d() + irrational_part().get_d() * std::sqrt(static_cast<double>(d_));
}

std::string ExactScalar::str() const {
  const mpq_class a = rational_part();
  if (is_rational()) return rational_text(a);
  const mpq_class b = irrational_part();
  std::string out = rational_text(a);
  out += b > 0 ? "+" : "-";
  out += rational_text(mpq_class(b > 0 ? b : mpq_class(-b)));
  out += "*sqrt(" + std::to_string(d_) + ")";
  return out;
}

std::string ExactScalar::to_decimal(int digits) const {
  if (digits < 1) throw PreconditionError("to_decimal requires digits >= 1");
  const int s = sign();
  const ExactScalar mag = s < 0 ? -*this : *this;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  const ExactScalar shifted = mag * ExactScalar(mpq_class(scale)) + ExactScalar::fraction(1, 2);
  const mpz_class n = shifted.floor();
  mpz_class ip, fp;
  mpz_tdiv_qr(ip.get_mpz_t(), fp.get_mpz_t(), n.get_mpz_t(), scale.get_mpz_t());
  std::string frac = fp.get_str();
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  std::string out = (s < 0 && n != 0) ? "-" : "";
  return out + ip.get_str() + "." + frac;
}

std::size_t ExactScalar::hash() const {
  if (!wide_) {
    std::size_t h = std::hash<std::int64_t>{}(p_);
    h ^= std::hash<std::int64_t>{}(q_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::int64_t>{}(r_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::int64_t>{}(d_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
  return std::hash<std::string>{}(str());
}

ExactScalar ExactScalar::parse(std::string_view text) {
  std::string s;
  s.reserve(text.size());
  for (const char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw ParseError("empty scalar");
  const std::size_t sq = s.find("sqrt(");
  if (sq == std::string::npos) return ExactScalar(parse_rational(s, text));

  if (s.back() != ')') throw ParseError("malformed scalar '" + std::string(text) + "'");
  const std::string rad = s.substr(sq + 5, s.size() - sq - 6);
  if (rad.empty() || rad.size() > 18 ||
      rad.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("malformed radicand in '" + std::string(text) + "'");
  }
  const long long d = std::stoll(rad);

  // Coefficient: from the last sign before "sqrt(" (not at position 0).
  std::string head = s.substr(0, sq);
  std::size_t split = std::string::npos;
  for (std::size_t i = head.size(); i-- > 1;) {
    if (head[i] == '+' || head[i] == '-') {
      split = i;
      break;
    }
  }
  std::string rational_str, coef_str;
  if (split == std::string::npos) {
    coef_str = head;
  } else {
    rational_str = head.substr(0, split);
    coef_str = head.substr(split);
  }
  if (!coef_str.empty() && coef_str.back() == '*') {
    coef_str.pop_back();
    if (coef_str.empty() || coef_str == "+" || coef_str == "-") {
      throw ParseError("malformed coefficient in '" + std::string(text) + "'");
    }
  }
  mpq_class b;
  if (coef_str.empty() || coef_str == "+") {
    b = 1;
  } else if (coef_str == "-") {
    b = -1;
  } else {
    b = parse_rational(coef_str, text);
  }
  const mpq_class a = rational_str.empty() ? mpq_class(0) : parse_rational(rational_str, text);
  if (d == 0) throw ParseError("sqrt(0) is not a valid radicand in '" + std::string(text) + "'");
  return ExactScalar(a, b, d);
}

std::ostream& operator<<(std::ostream& os, const ExactScalar& x) { return os << x.str(); }

}  // namespace ietlab
