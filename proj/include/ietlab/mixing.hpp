#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ietlab/iet.hpp"
#include "ietlab/rigidity.hpp"

namespace ietlab {

struct CorrelationReport {
  long long n = 0;
  IntervalSet A, B;
  ExactScalar value;      // lambda(T^{-n} A ∩ B)
  ExactScalar target;     // lambda(A) lambda(B)
  ExactScalar deviation;  // |value - target|
};

CorrelationReport correlation(const IET& t, const IntervalSet& A, const IntervalSet& B, long long n);
// Same, with T^{-n} supplied; lets callers reuse one power across many pairs.
CorrelationReport correlation_with(const PiecewiseTranslation& t_minus_n, long long n,
                                   const IntervalSet& A, const IntervalSet& B);

// Dyadic interval [index/2^level, (index+1)/2^level).
struct DyadicLabel {
  int level = 0;
  long long index = 0;
  std::string str() const;  // "level:index"
  Interval interval() const { return dyadic(level, index); }
};

// All dyadic intervals of levels 0..depth, ordered by (level, index).
std::vector<DyadicLabel> dyadic_family(int depth);

struct CorrelationRow {
  long long n;
  DyadicLabel a, b;
  CorrelationReport report;
};

// Rows for every n in ns and every ordered pair of dyadic_family(depth);
// order n, then a, then b.
std::vector<CorrelationRow> correlation_table(const IET& t, const std::vector<long long>& ns, int depth);

struct MixingWindowResult {
  bool pass = true;
  long long pairs_checked = 0;
  std::optional<CorrelationRow> witness;  // first failure in (n, a, b) order
};

// Membership of T in the open set where every dyadic pair up to depth has
// correlation deviation < eps for all j <= n <= k.
MixingWindowResult mixing_window_check(const IET& t, long long j, long long k,
                                       const ExactScalar& eps, int depth);

// Smallest kappa >= 0 with 2^{-kappa} < c/4; requires c > 0.
int required_kappa(const ExactScalar& c);
// 2^{-kappa-4}
ExactScalar kappa_epsilon(int kappa);

struct BlockWitness {
  int kappa = 0;
  ExactScalar epsilon_threshold;  // 2^{-kappa-4}
  long long block = 0;            // b
  ExactScalar block_mass;         // lambda(A ∩ [b/2^kappa, (b+1)/2^kappa))
  Interval enlarged;              // block widened by 2^{-kappa-4}, clipped to [0,1)
  long long k = 0;
  ExactScalar value;  // lambda(T^k I ∩ I)
  ExactScalar bound;  // 2 lambda(I)^2
  long long blocks_tried = 0;

  friend bool operator==(const BlockWitness&, const BlockWitness&) = default;
};

// Throws PreconditionError when cert.epsilon > 2^{-kappa-4}, VerificationError
// when the certificate does not re-verify or no block satisfies the
// inequality.
BlockWitness rigidity_blocks_mixing(const IET& t, const RigidityCertificate& cert);

// Named integer functions: "pow_self" (j^j), "double" (2j), "square" (j^2),
// "poly:c0,c1,..." (c0 + c1 j + ...). Values saturate at INT64_MAX.
class ThicknessFunction {
 public:
  static ThicknessFunction parse(const std::string& name);  // throws ParseError
  long long operator()(long long j) const;
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<long long> coeffs_;  // empty for the fixed builtins
};

struct ThicknessReport {
  std::vector<long long> sequence;
  std::string f;
  std::vector<long long> witnesses;  // j with [j, f(j)] contained in the sequence
  long long min_witnesses = 0;
  bool pass = false;
};

ThicknessReport thickness_check(std::vector<long long> sequence, const ThicknessFunction& f,
                                long long min_witnesses);

}  // namespace ietlab
