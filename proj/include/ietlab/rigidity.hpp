#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ietlab/iet.hpp"
#include "ietlab/error.hpp"
#include "ietlab/intervals.hpp"
#include "ietlab/return_map.hpp"

namespace ietlab {

// Endpoint label: T^steps(point) == discontinuity #delta, or, for delta ==
// kBoundary, the point is 0 (left endpoints) or 1 (right endpoints).
struct EndpointLabel {
  static constexpr int kBoundary = -1;
  int delta;
  long long steps;

  friend bool operator==(const EndpointLabel&, const EndpointLabel&) = default;
};

struct PartitionElement {
  Interval interval;
  std::vector<EndpointLabel> left;   // T^i a = delta
  std::vector<EndpointLabel> right;  // lim_{x -> b^-} T^j x = delta'

  friend bool operator==(const PartitionElement&, const PartitionElement&) = default;
};

// The partition of [0,1) cut at S = union_{i<=n} T^{-i} D. Every T^i with
// 0 <= i <= n is a single translation on each element.
struct BackwardPartition {
  long long n = 0;
  PointSet points;                                   // S
  std::vector<std::vector<EndpointLabel>> provenance;  // per point of S
  std::vector<PartitionElement> elements;            // sorted, tile [0,1)

  friend bool operator==(const BackwardPartition&, const BackwardPartition&) = default;
};

BackwardPartition backward_partition(const IET& t, long long n);

struct ClassMember {
  Interval interval;
  long long left_steps;   // T^left_steps(lo) == delta (0 for the boundary label)
  long long right_steps;  // left limit of T^right_steps at hi == delta'

  friend bool operator==(const ClassMember&, const ClassMember&) = default;
};

// Partition elements whose endpoints witness the ordered pair (delta, delta').
// delta_index / delta_prime_index are positions in D, or kBoundary.
struct PairClass {
  int delta_index;
  int delta_prime_index;
  ExactScalar delta;        // 0 for a boundary left label
  ExactScalar delta_prime;  // 1 for a boundary right label
  std::vector<ClassMember> members;
  ExactScalar total_measure;
  // True when the class was widened with the boundary labels 0 and 1.
  bool extended = false;

  friend bool operator==(const PairClass&, const PairClass&) = default;
};

std::vector<PairClass> classify_pairs(const BackwardPartition& bp, const IET& t);

// 1 / (d-1)^2
ExactScalar sizable_threshold(int d);

// All classes meeting the threshold, best first (largest measure, then
// lexicographic (delta, delta')). Falls back to classes widened by the
// boundary labels only when no plain class is sizable.
std::vector<PairClass> sizable_pairs(const std::vector<PairClass>& classes, int d);

// First of sizable_pairs; throws VerificationError when there is none.
PairClass find_sizable_pair(const std::vector<PairClass>& classes, int d);

// Smallest even n0 <= cap with union_{i <= n0/2} T^{-i} D eps-dense.
long long n0_for_density(const IET& t, const ExactScalar& eps, long long cap);

// 1 / (10 d^2 n)
ExactScalar sizable_length(int d, long long n);

struct PossibilityI {
  Interval J;      // satisfies continuity to n and T^i J ∩ J = ∅ for 0 < i < n/2
  Interval probe;  // [a, a + 1/(10 d^2 n)), the interval that was scanned
  std::size_t member = 0;
};

struct PossibilityII {
  enum class Side { Right, Left };
  long long k = 0;
  Side side = Side::Right;
  // Right: T^k delta - delta. Left: delta' - lim_{x -> delta'^-} T^k x.
  ExactScalar drift;
  std::size_t member = 0;
};

using DichotomyOutcome = std::variant<PossibilityI, PossibilityII>;

// Members longer than 1/(10 d^2 n), longest first (ties: leftmost).
std::vector<std::size_t> dichotomy_candidates(const PairClass& pc, int d, long long n);

// `choice` indexes dichotomy_candidates.
DichotomyOutcome sizable_dichotomy(const IET& t, const PairClass& pc, long long n,
                                   std::size_t choice = 0);

struct Tower {
  IntervalSet A;     // union_{i=0}^{m-2} T^i J'
  long long j = 0;   // return time of J' to J
  Interval base;     // J'
  ExactScalar shift;  // T^j x - x on A
};

Tower easy_rig_tower(const IET& t, const Interval& J, long long m);

struct DisplacementPiece {
  Interval piece;
  ExactScalar displacement;  // T^k x - x on the piece

  friend bool operator==(const DisplacementPiece&, const DisplacementPiece&) = default;
};

struct RigidityCertificate {
  IET iet;
  long long n = 0;
  ExactScalar epsilon;
  long long k = 0;
  IntervalSet A;
  std::vector<DisplacementPiece> pieces;  // tile A
  std::string branch;
  long long minimality_depth = 0;
  std::map<std::string, std::string> details;

  friend bool operator==(const RigidityCertificate&, const RigidityCertificate&) = default;
};

// Raised when a constructed k falls outside [n/(20d), 20nd]; the pipeline
// retries with other members and classes before giving up.
class KRangeError : public VerificationError {
 public:
  using VerificationError::VerificationError;
};

// Refines A by the pieces of T^k and checks k-range, measure, displacement.
// Throws VerificationError on any failure.
RigidityCertificate make_certificate(const IET& t, long long n, const ExactScalar& eps,
                                     long long k, IntervalSet A, std::string branch);

// The k-range [n/(20d), 20nd] and measure bound 1/(10^5 d^5).
bool k_in_range(long long k, long long n, int d);
ExactScalar measure_bound(int d);

RigidityCertificate possibility2_construct(const IET& t, const PairClass& pc,
                                           const PossibilityII& p2, long long n,
                                           const ExactScalar& eps);

struct CertifyOptions {
  long long idoc_depth = 0;   // 0: use n
  std::size_t max_classes = 4;
  std::size_t max_members = 8;
};

RigidityCertificate certify_rigidity(const IET& t, const ExactScalar& eps, long long n,
                                     const CertifyOptions& options = {});

}  // namespace ietlab
