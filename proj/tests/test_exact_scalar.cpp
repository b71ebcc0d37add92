#include <doctest.h>

#include <gmpxx.h>

#include "ietlab/error.hpp"
#include "ietlab/exact_scalar.hpp"
#include "support.hpp"

using ietlab::ExactScalar;
using testsupport::Gen;

namespace {

ExactScalar S(const char* s) { return ExactScalar::parse(s); }

// Independent high-precision evaluation from the stored rational parts.
mpf_class eval(const ExactScalar& x, mp_bitcnt_t bits = 2048) {
  mpf_class a(x.rational_part(), bits), b(x.irrational_part(), bits), r(static_cast<long>(x.radicand()), bits);
  return a + b * sqrt(r);
}

int oracle_sign(const ExactScalar& x) {
  const mpf_class v = eval(x);
  const mpf_class tiny("1e-300", 2048);
  if (abs(v) < tiny) return 0;
  return sgn(v);
}

// Round-half-away decimal from the float oracle.
std::string oracle_decimal(const ExactScalar& x, int digits) {
  mpf_class v = eval(x);
  const bool neg = v < 0;
  if (neg) v = -v;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpf_class shifted = v * mpf_class(scale, 2048) + mpf_class(0.5, 2048);
  mpf_floor(shifted.get_mpf_t(), shifted.get_mpf_t());
  const mpz_class n(shifted);
  mpz_class ip = n / scale, fp = n % scale;
  std::string frac = fp.get_str();
  frac.insert(0, digits - frac.size(), '0');
  return std::string(neg && n != 0 ? "-" : "") + ip.get_str() + "." + frac;
}

}  // namespace

TEST_CASE("arithmetic examples") {
  CHECK(ExactScalar::fraction(1, 2) + ExactScalar::fraction(1, 3) == ExactScalar::fraction(5, 6));
  const ExactScalar r5 = ExactScalar::sqrt(5);
  CHECK(r5 * r5 == ExactScalar(5));
  CHECK((r5 * r5).is_rational());
  CHECK((S("1-1/2*sqrt(5)") + S("-1+1/2*sqrt(5)")).is_zero());
}

TEST_CASE("sign examples") {
  CHECK((ExactScalar::sqrt(5) - ExactScalar(2)).sign() == 1);
  CHECK(ExactScalar(0).sign() == 0);
  CHECK(S("3-4/3*sqrt(5)").sign() == 1);
  CHECK(S("2-sqrt(5)").sign() == -1);
}

TEST_CASE("to_decimal examples") {
  CHECK(ExactScalar::fraction(1, 3).to_decimal(4) == "0.3333");
  CHECK(S("-1/2+1/2*sqrt(5)").to_decimal(6) == "0.618034");
  CHECK(ExactScalar(0).to_decimal(2) == "0.00");
  CHECK(ExactScalar::fraction(-1, 1000).to_decimal(2) == "0.00");
  CHECK(ExactScalar::fraction(-2, 3).to_decimal(3) == "-0.667");
  CHECK_THROWS_AS(ExactScalar(1).to_decimal(0), ietlab::PreconditionError);
}

TEST_CASE("text format round trip and canonical form") {
  CHECK(S("2/4").str() == "1/2");
  CHECK(S("sqrt(8)").str() == "0+2*sqrt(2)");
  CHECK(S("1/2 + 3/4*sqrt(5)").str() == "1/2+3/4*sqrt(5)");
  CHECK(S("-sqrt(5)").str() == "0-1*sqrt(5)");
  CHECK(S("sqrt(4)") == ExactScalar(2));
  CHECK(S("1+sqrt(5)") == ExactScalar(1) + ExactScalar::sqrt(5));
  CHECK_THROWS_AS(S(""), ietlab::ParseError);
  CHECK_THROWS_AS(S("1/0"), ietlab::ParseError);
  CHECK_THROWS_AS(S("sqrt(0)"), ietlab::ParseError);
  CHECK_THROWS_AS(S("1+2*sqrt(x)"), ietlab::ParseError);
  CHECK_THROWS_AS(S("abc"), ietlab::ParseError);
  Gen g(11);
  for (int i = 0; i < 500; ++i) {
    const ExactScalar x = g.quadratic(i % 2 ? 2 : 5);
    CHECK(S(x.str().c_str()) == x);
  }
}

TEST_CASE("errors: division by zero and mixed radicands") {
  CHECK_THROWS_AS(ExactScalar(1) / ExactScalar(0), ietlab::DomainError);
  CHECK_THROWS_AS(ExactScalar::sqrt(2) + ExactScalar::sqrt(5), ietlab::DomainError);
  CHECK_THROWS_AS(ExactScalar::sqrt(2) < ExactScalar::sqrt(3), ietlab::DomainError);
  CHECK_NOTHROW(ExactScalar::sqrt(2) + ExactScalar(1));
}

TEST_CASE("field axioms on random triples") {
  Gen g(1234);
  for (long long D : {0LL, 2LL, 5LL}) {
    for (int i = 0; i < 400; ++i) {
      const ExactScalar x = g.quadratic(D), y = g.quadratic(D), z = g.quadratic(D);
      CHECK((x + y) + z == x + (y + z));
      CHECK((x * y) * z == x * (y * z));
      CHECK(x * (y + z) == x * y + x * z);
      CHECK(x + y == y + x);
      CHECK(x * y == y * x);
      CHECK((x - x).is_zero());
      if (!x.is_zero()) CHECK(x * (ExactScalar(1) / x) == ExactScalar(1));
      if (!y.is_zero()) CHECK((x / y) * y == x);
    }
  }
}

TEST_CASE("sign is multiplicative") {
  Gen g(99);
  for (int i = 0; i < 2000; ++i) {
    const long long D = i % 2 ? 2 : 5;
    const ExactScalar x = g.quadratic(D), y = g.quadratic(D);
    CHECK((x * y).sign() == x.sign() * y.sign());
  }
}

TEST_CASE("sign agrees with a high-precision oracle on 10^4 elements") {
  Gen g(2024);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const long long D = i % 2 ? 2 : 5;
    // Near-cancelling elements exercise the a^2 vs b^2 D decision.
    ExactScalar x = g.quadratic(D);
    if (i % 3 == 0) {
      const long long q = g.integer(1, 1000000);
      const mpf_class approx = sqrt(mpf_class(static_cast<long>(D), 512)) * static_cast<long>(q);
      const mpz_class p(approx);
      x = ExactScalar(mpq_class(p)) - ExactScalar(q) * ExactScalar::sqrt(D);
    }
    if (x.sign() != oracle_sign(x)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("to_decimal matches the oracle") {
  Gen g(5);
  for (int i = 0; i < 500; ++i) {
    const ExactScalar x = g.quadratic(i % 2 ? 2 : 5);
    const int digits = static_cast<int>(g.integer(1, 40));
    CHECK(x.to_decimal(digits) == oracle_decimal(x, digits));
  }
  CHECK(S("-1/2+1/2*sqrt(5)").to_decimal(50) == oracle_decimal(S("-1/2+1/2*sqrt(5)"), 50));
}

TEST_CASE("wide values spill to GMP and stay canonical") {
  ExactScalar x = S("-1/2+1/2*sqrt(5)");
  ExactScalar p(1);
  for (int i = 0; i < 200; ++i) p *= x;  // phi^-200: huge coefficients
  CHECK(!p.is_inline());
  CHECK(p.sign() == 1);
  CHECK(p < ExactScalar::fraction(1, 1000000));
  ExactScalar back = p;
  for (int i = 0; i < 200; ++i) back /= x;
  CHECK(back == ExactScalar(1));
  CHECK(back.is_inline());
  CHECK(S(p.str().c_str()) == p);
  // floor against the oracle
  const ExactScalar big = p * ExactScalar(mpq_class("1000000000000000000000000000000000000000000000"));
  const mpf_class v = eval(big);
  mpf_class fl;
  mpf_floor(fl.get_mpf_t(), v.get_mpf_t());
  CHECK(big.floor() == mpz_class(fl));
}

TEST_CASE("floor and comparisons") {
  CHECK(S("-1/2+1/2*sqrt(5)").floor() == 0);
  CHECK(S("-1/2-1/2*sqrt(5)").floor() == -2);
  CHECK(ExactScalar(-3).floor() == -3);
  CHECK(ExactScalar::fraction(-7, 2).floor() == -4);
  CHECK(ExactScalar::sqrt(2) < ExactScalar::fraction(3, 2));
  CHECK(ExactScalar::fraction(7, 5) < ExactScalar::sqrt(2));
  CHECK(ietlab::abs(ExactScalar(-3)) == ExactScalar(3));
  CHECK(ietlab::min(ExactScalar(1), ExactScalar(2)) == ExactScalar(1));
}
