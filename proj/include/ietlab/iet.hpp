#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ietlab/exact_scalar.hpp"
#include "ietlab/intervals.hpp"

namespace ietlab {

// A bijection of [0,1) that is a translation x -> x + shift[i] on each piece
// [start[i], start[i+1]). Adjacent pieces with equal shifts are merged, so the
// representation is canonical and interior starts are true discontinuities.
class PiecewiseTranslation {
 public:
  PiecewiseTranslation();  // identity
  PiecewiseTranslation(std::vector<ExactScalar> starts, std::vector<ExactScalar> shifts);

  std::size_t piece_count() const { return starts_.size(); }
  const std::vector<ExactScalar>& starts() const { return starts_; }
  const std::vector<ExactScalar>& shifts() const { return shifts_; }
  ExactScalar piece_end(std::size_t i) const;
  Interval piece(std::size_t i) const { return Interval(starts_[i], piece_end(i)); }

  // Index of the piece containing x in [0,1).
  std::size_t piece_index(const ExactScalar& x) const;
  // Index of the piece whose interior approaches x from the left, x in (0,1].
  std::size_t piece_index_left(const ExactScalar& x) const;

  ExactScalar apply(const ExactScalar& x) const;
  // lim_{y -> x^-} f(y), for x in (0,1].
  ExactScalar apply_left(const ExactScalar& x) const;

  PointSet breakpoints() const;  // interior discontinuities
  PiecewiseTranslation inverse() const;
  IntervalSet image(const IntervalSet& s) const;
  IntervalSet preimage(const IntervalSet& s) const { return inverse().image(s); }

  friend bool operator==(const PiecewiseTranslation& a, const PiecewiseTranslation& b) = default;

 private:
  std::vector<ExactScalar> starts_;
  std::vector<ExactScalar> shifts_;
};

// f o g
PiecewiseTranslation compose(const PiecewiseTranslation& f, const PiecewiseTranslation& g);

// Interval exchange transformation on d pieces with lengths lengths[i] and
// permutation perm (1-based): piece i lands in position perm[i] of the image.
class IET {
 public:
  // Validates: lengths > 0, sum 1, perm a bijection of {1..d}, one radicand.
  IET(std::vector<ExactScalar> lengths, std::vector<int> perm);

  int d() const { return static_cast<int>(lengths_.size()); }
  const std::vector<ExactScalar>& lengths() const { return lengths_; }
  const std::vector<int>& perm() const { return perm_; }
  // beta_0 = 0 < beta_1 < ... < beta_d = 1
  const std::vector<ExactScalar>& endpoints() const { return endpoints_; }
  // Piece i (0-based) is translated by translations()[i].
  const std::vector<ExactScalar>& translations() const { return translations_; }
  // 0 for rational data, else the common square-free radicand.
  long long field() const { return field_; }

  // No proper prefix {1..k} is mapped onto itself. Reducible IETs are never
  // minimal; they are accepted for use as negative controls.
  bool irreducible() const;
  // Some interior endpoint has equal translations on both sides.
  bool has_removable_endpoints() const;

  const PointSet& discontinuities() const { return discontinuities_; }
  const PiecewiseTranslation& map() const { return map_; }
  const PiecewiseTranslation& inverse_map() const { return inverse_map_; }

  ExactScalar apply(const ExactScalar& x) const;
  ExactScalar apply_inverse(const ExactScalar& x) const;
  ExactScalar apply_left(const ExactScalar& x) const;
  ExactScalar apply_inverse_left(const ExactScalar& x) const;

  IET inverse() const;

  friend bool operator==(const IET& a, const IET& b) {
    return a.lengths_ == b.lengths_ && a.perm_ == b.perm_;
  }

 private:
  std::vector<ExactScalar> lengths_;
  std::vector<int> perm_;
  std::vector<ExactScalar> endpoints_;
  std::vector<ExactScalar> translations_;
  long long field_ = 0;
  PointSet discontinuities_;
  PiecewiseTranslation map_;
  PiecewiseTranslation inverse_map_;
};

inline IET make_iet(std::vector<ExactScalar> lengths, std::vector<int> perm) {
  return IET(std::move(lengths), std::move(perm));
}

// T^n as an explicit piecewise translation; negative n uses T^{-1}. The
// breakpoints are drawn from the backward orbit of the discontinuities, so
// the piece count is at most |n|(d-1)+1.
PiecewiseTranslation power(const IET& t, long long n);

// [x, T^{dir} x, ..., T^{dir n} x], dir = +1 or -1.
std::vector<ExactScalar> orbit(const IET& t, const ExactScalar& x, long long n, int direction);

// Keane's infinite distinct orbit condition, checked to a finite depth.
struct IdocReport {
  enum class Status { CertifiedToDepth, NoDiscontinuities, Reducible, OrbitCollision };
  Status status = Status::CertifiedToDepth;
  long long depth = 0;
  // Witness for OrbitCollision: T^step(delta) == delta_prime.
  long long step = 0;
  ExactScalar delta, delta_prime;

  bool certified() const { return status == Status::CertifiedToDepth; }
  std::string describe() const;

  friend bool operator==(const IdocReport&, const IdocReport&) = default;
};

IdocReport check_idoc(const IET& t, long long depth);

}  // namespace ietlab
