#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ietlab/iet.hpp"
#include "ietlab/json_io.hpp"

#ifndef IETLAB_CORPUS_DIR
#define IETLAB_CORPUS_DIR "corpus"
#endif

namespace testsupport {

using ietlab::ExactScalar;
using ietlab::IET;
using ietlab::Interval;
using ietlab::IntervalSet;

inline std::string corpus_path(const std::string& name) {
  return std::string(IETLAB_CORPUS_DIR) + "/" + name + ".json";
}

inline IET load(const std::string& name) {
  const std::string p = corpus_path(name);
  return ietlab::iet_from_json(ietlab::parse_json_text(ietlab::read_text_file(p), p)).iet;
}

inline const std::vector<std::string>& minimal_corpus() {
  static const std::vector<std::string> v{"golden", "silver", "iet3_sqrt2", "iet3_sqrt5", "iet4_sqrt2"};
  return v;
}

inline const std::vector<std::string>& full_corpus() {
  static const std::vector<std::string> v{"identity", "rotation_1_3", "rotation_1_4", "golden",
                                          "silver",   "iet3_sqrt2",   "iet3_sqrt5",   "iet4_sqrt2"};
  return v;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long long integer(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng_);
  }
  bool coin() { return integer(0, 1) == 1; }

  ExactScalar rational(long long max_num = 50, long long max_den = 50) {
    return ExactScalar::fraction(integer(-max_num, max_num), integer(1, max_den));
  }

  // a + b sqrt(D) with small random rationals; b may be 0.
  ExactScalar quadratic(long long D) {
    const ExactScalar a = rational();
    if (D == 0 || integer(0, 4) == 0) return a;
    return a + rational() * ExactScalar::sqrt(D);
  }

  ExactScalar nonzero_quadratic(long long D) {
    while (true) {
      ExactScalar x = quadratic(D);
      if (!x.is_zero()) return x;
    }
  }

  // Exact point lo + len * u / 2^30.
  ExactScalar point_in(const Interval& i) {
    const ExactScalar u = ExactScalar::fraction(integer(0, (1LL << 30) - 1), 1LL << 30);
    return i.lo() + i.length() * u;
  }

  ExactScalar unit_point() { return point_in(Interval(ExactScalar(0), ExactScalar(1))); }

  // Rational interval inside [0,1), denominators up to den.
  Interval rational_interval(long long den = 64) {
    long long a = integer(0, den - 1), b = integer(0, den - 1);
    if (a == b) b = a + 1;
    if (a > b) std::swap(a, b);
    return Interval(ExactScalar::fraction(a, den), ExactScalar::fraction(b, den));
  }

  IntervalSet interval_set(int max_parts = 4, long long den = 64) {
    std::vector<Interval> parts;
    const int k = static_cast<int>(integer(0, max_parts));
    for (int i = 0; i < k; ++i) parts.push_back(rational_interval(den));
    return IntervalSet(parts);
  }

  std::vector<int> permutation(int d) {
    std::vector<int> p(static_cast<std::size_t>(d));
    std::iota(p.begin(), p.end(), 1);
    std::shuffle(p.begin(), p.end(), rng_);
    return p;
  }

  // Random d-IET with rational lengths (common denominator den).
  IET rational_iet(int d, long long den = 97) {
    std::vector<long long> cuts;
    while (static_cast<int>(cuts.size()) < d - 1) {
      const long long c = integer(1, den - 1);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), 0);
    cuts.push_back(den);
    std::vector<ExactScalar> lengths;
    for (int i = 0; i < d; ++i) lengths.push_back(ExactScalar::fraction(cuts[i + 1] - cuts[i], den));
    return IET(lengths, permutation(d));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
