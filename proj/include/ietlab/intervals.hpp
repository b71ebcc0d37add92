#pragma once

#include <initializer_list>
#include <vector>

#include "ietlab/exact_scalar.hpp"

namespace ietlab {

// Half-open interval [lo, hi) with 0 <= lo < hi <= 1.
class Interval {
 public:
  Interval(ExactScalar lo, ExactScalar hi);

  const ExactScalar& lo() const { return lo_; }
  const ExactScalar& hi() const { return hi_; }
  ExactScalar length() const { return hi_ - lo_; }
  bool contains(const ExactScalar& x) const { return lo_ <= x && x < hi_; }

  friend bool operator==(const Interval& a, const Interval& b) = default;

 private:
  ExactScalar lo_, hi_;
};

// Finite disjoint union of half-open intervals, kept sorted with touching
// parts merged. Two sets are equal iff they are equal as subsets of [0,1).
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);  // any order, may overlap
  IntervalSet(std::initializer_list<Interval> parts)
      : IntervalSet(std::vector<Interval>(parts)) {}
  IntervalSet(const Interval& single) : parts_{single} {}  // NOLINT

  static IntervalSet unit();

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }
  ExactScalar measure() const;
  bool contains(const ExactScalar& x) const;
  IntervalSet complement() const;

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) = default;

 private:
  std::vector<Interval> parts_;
};

IntervalSet intersect(const IntervalSet& s, const IntervalSet& t);
IntervalSet unite(const IntervalSet& s, const IntervalSet& t);
IntervalSet difference(const IntervalSet& s, const IntervalSet& t);

// Strictly increasing finite set of points of [0,1).
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<ExactScalar> points);  // sorts and dedups

  const std::vector<ExactScalar>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  bool contains(const ExactScalar& x) const;

  friend bool operator==(const PointSet& a, const PointSet& b) = default;

 private:
  std::vector<ExactScalar> points_;
};

// [b / 2^k, (b + 1) / 2^k); requires 0 <= b < 2^k.
Interval dyadic(int k, long long b);

// Largest distance between consecutive points of p together with the virtual
// endpoints 0 and 1. A point set is eps-dense iff max_gap < eps.
ExactScalar max_gap(const PointSet& p);

}  // namespace ietlab
