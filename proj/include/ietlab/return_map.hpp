#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ietlab/iet.hpp"

namespace ietlab {

struct ReturnPiece {
  Interval piece;
  long long return_time;
  ExactScalar translation;  // T^{return_time} x = x + translation on the piece

  friend bool operator==(const ReturnPiece&, const ReturnPiece&) = default;
};

// First-return map of T to an interval: pieces tile `base` (when complete),
// each with a constant return time and translation.
struct ReturnSystem {
  Interval base;
  std::vector<ReturnPiece> pieces;  // sorted by position in base

  // The induced map as an IET rescaled to [0,1). Requires full coverage.
  IET induced() const;

  friend bool operator==(const ReturnSystem&, const ReturnSystem&) = default;
};

// Coverage reached within a step cap; `uncovered` is what had not returned.
struct PartialReturn {
  ReturnSystem system;
  IntervalSet uncovered;
};

// ceil(4/|I|) + 4d
long long default_step_cap(const IET& t, const Interval& base);

// Pushes the base forward, cutting at discontinuities and at the endpoints of
// the base, and records each sub-interval at its first return.
PartialReturn first_return_partial(const IET& t, const Interval& base, long long step_cap);

// Throws PreconditionError listing the uncovered remainder if some point has
// not returned within the cap.
ReturnSystem first_return(const IET& t, const Interval& base,
                          std::optional<long long> step_cap = std::nullopt);

// (return time, total measure) in increasing return time.
std::vector<std::pair<long long, ExactScalar>> return_time_histogram(const ReturnSystem& rs);

}  // namespace ietlab
