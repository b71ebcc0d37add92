#include "ietlab/intervals.hpp"

#include <algorithm>

#include "ietlab/error.hpp"

namespace ietlab {

Interval::Interval(ExactScalar lo, ExactScalar hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.sign() < 0 || !(lo_ < hi_) || ExactScalar(1) < hi_) {
    throw PreconditionError("interval [" + lo_.str() + ", " + hi_.str() +
                            ") is not a nonempty subinterval of [0,1)");
  }
}

IntervalSet::IntervalSet(std::vector<Interval> parts) {
  const bool sorted = std::is_sorted(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
    return a.lo() < b.lo();
  });
  if (!sorted) {
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo() < b.lo(); });
  }
  parts_.reserve(parts.size());
  for (auto& p : parts) {
    if (!parts_.empty() && p.lo() <= parts_.back().hi()) {
      if (parts_.back().hi() < p.hi()) {
        parts_.back() = Interval(parts_.back().lo(), p.hi());
      }
    } else {
      parts_.push_back(std::move(p));
    }
  }
}

IntervalSet IntervalSet::unit() { return IntervalSet(Interval(0, 1)); }

ExactScalar IntervalSet::measure() const {
  ExactScalar total;
  for (const auto& p : parts_) total += p.length();
  return total;
}

bool IntervalSet::contains(const ExactScalar& x) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                             [](const ExactScalar& v, const Interval& p) { return v < p.lo(); });
  if (it == parts_.begin()) return false;
  return std::prev(it)->contains(x);
}

IntervalSet IntervalSet::complement() const { return difference(unit(), *this); }

IntervalSet intersect(const IntervalSet& s, const IntervalSet& t) {
  std::vector<Interval> out;
  const auto& a = s.parts();
  const auto& b = t.parts();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const ExactScalar& lo = max(a[i].lo(), b[j].lo());
    const ExactScalar& hi = min(a[i].hi(), b[j].hi());
    if (lo < hi) out.emplace_back(lo, hi);
    if (a[i].hi() < b[j].hi()) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet unite(const IntervalSet& s, const IntervalSet& t) {
  std::vector<Interval> all;
  all.reserve(s.size() + t.size());
  std::merge(s.parts().begin(), s.parts().end(), t.parts().begin(), t.parts().end(),
             std::back_inserter(all),
             [](const Interval& a, const Interval& b) { return a.lo() < b.lo(); });
  return IntervalSet(std::move(all));
}

IntervalSet difference(const IntervalSet& s, const IntervalSet& t) {
  std::vector<Interval> out;
  const auto& b = t.parts();
  std::size_t j = 0;
  for (const auto& piece : s.parts()) {
    ExactScalar cur = piece.lo();
    while (j < b.size() && b[j].hi() <= cur) ++j;
    std::size_t k = j;
    while (k < b.size() && b[k].lo() < piece.hi()) {
      if (cur < b[k].lo()) out.emplace_back(cur, b[k].lo());
      if (cur < b[k].hi()) cur = b[k].hi();
      if (!(cur < piece.hi())) break;
      ++k;
    }
    if (cur < piece.hi()) out.emplace_back(cur, piece.hi());
  }
  return IntervalSet(std::move(out));
}

PointSet::PointSet(std::vector<ExactScalar> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  if (!points_.empty() && (points_.front().sign() < 0 || !(points_.back() < ExactScalar(1)))) {
    throw PreconditionError("point set must lie in [0,1)");
  }
}

bool PointSet::contains(const ExactScalar& x) const {
  return std::binary_search(points_.begin(), points_.end(), x);
}

Interval dyadic(int k, long long b) {
  if (k < 0 || k > 62) throw PreconditionError("dyadic depth out of range");
  const long long n = 1LL << k;
  if (b < 0 || b >= n) {
    throw PreconditionError("dyadic index " + std::to_string(b) + " out of range for depth " +
                            std::to_string(k));
  }
  return Interval(ExactScalar::fraction(b, n), ExactScalar::fraction(b + 1, n));
}

ExactScalar max_gap(const PointSet& p) {
  ExactScalar prev, best;
  for (const auto& x : p.points()) {
    const ExactScalar gap = x - prev;
    if (best < gap) best = gap;
    prev = x;
  }
  const ExactScalar last = ExactScalar(1) - prev;
  if (best < last) best = last;
  return best;
}

}  // namespace ietlab
