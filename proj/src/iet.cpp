#include "ietlab/iet.hpp"

#include <algorithm>
#include <numeric>

#include "ietlab/error.hpp"

namespace ietlab {

namespace {

void require_unit_domain(const ExactScalar& x, const char* what) {
  if (x.sign() < 0 || !(x < ExactScalar(1))) {
    throw PreconditionError(std::string(what) + ": point " + x.str() + " outside [0,1)");
  }
}

void require_left_domain(const ExactScalar& x, const char* what) {
  if (x.sign() <= 0 || ExactScalar(1) < x) {
    throw PreconditionError(std::string(what) + ": point " + x.str() + " outside (0,1]");
  }
}

}  // namespace

// ---- PiecewiseTranslation ---------------------------------------------------

PiecewiseTranslation::PiecewiseTranslation() : starts_{ExactScalar(0)}, shifts_{ExactScalar(0)} {}

PiecewiseTranslation::PiecewiseTranslation(std::vector<ExactScalar> starts,
                                           std::vector<ExactScalar> shifts) {
  if (starts.empty() || starts.size() != shifts.size() || !starts.front().is_zero()) {
    throw PreconditionError("piecewise translation needs matching starts/shifts beginning at 0");
  }
  for (std::size_t i = 1; i < starts.size(); ++i) {
    if (!(starts[i - 1] < starts[i])) {
      throw PreconditionError("piecewise translation starts must increase");
    }
  }
  if (!(starts.back() < ExactScalar(1))) {
    throw PreconditionError("piecewise translation starts must lie in [0,1)");
  }
  starts_.reserve(starts.size());
  shifts_.reserve(shifts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (!shifts_.empty() && shifts_.back() == shifts[i]) continue;
    starts_.push_back(std::move(starts[i]));
    shifts_.push_back(std::move(shifts[i]));
  }
  // The images must tile [0,1).
  std::vector<std::size_t> order(starts_.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<ExactScalar> image_lo(starts_.size());
  for (std::size_t i = 0; i < starts_.size(); ++i) image_lo[i] = starts_[i] + shifts_[i];
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return image_lo[a] < image_lo[b]; });
  ExactScalar expect(0);
  for (const std::size_t i : order) {
    if (!(image_lo[i] == expect)) {
      throw PreconditionError("piecewise translation is not a bijection of [0,1)");
    }
    expect = piece_end(i) + shifts_[i];
  }
  if (!(expect == ExactScalar(1))) {
    throw PreconditionError("piecewise translation is not a bijection of [0,1)");
  }
}

ExactScalar PiecewiseTranslation::piece_end(std::size_t i) const {
  return i + 1 < starts_.size() ? starts_[i + 1] : ExactScalar(1);
}

std::size_t PiecewiseTranslation::piece_index(const ExactScalar& x) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), x);
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

std::size_t PiecewiseTranslation::piece_index_left(const ExactScalar& x) const {
  auto it = std::lower_bound(starts_.begin(), starts_.end(), x);
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

ExactScalar PiecewiseTranslation::apply(const ExactScalar& x) const {
  require_unit_domain(x, "apply");
  return x + shifts_[piece_index(x)];
}

ExactScalar PiecewiseTranslation::apply_left(const ExactScalar& x) const {
  require_left_domain(x, "apply_left");
  return x + shifts_[piece_index_left(x)];
}

PointSet PiecewiseTranslation::breakpoints() const {
  return PointSet(std::vector<ExactScalar>(starts_.begin() + 1, starts_.end()));
}

PiecewiseTranslation PiecewiseTranslation::inverse() const {
  std::vector<std::size_t> order(starts_.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<ExactScalar> image_lo(starts_.size());
  for (std::size_t i = 0; i < starts_.size(); ++i) image_lo[i] = starts_[i] + shifts_[i];
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return image_lo[a] < image_lo[b]; });
  std::vector<ExactScalar> starts, shifts;
  starts.reserve(order.size());
  shifts.reserve(order.size());
  for (const std::size_t i : order) {
    starts.push_back(image_lo[i]);
    shifts.push_back(-shifts_[i]);
  }
  return PiecewiseTranslation(std::move(starts), std::move(shifts));
}

IntervalSet PiecewiseTranslation::image(const IntervalSet& s) const {
  std::vector<Interval> out;
  for (const auto& part : s.parts()) {
    std::size_t i = piece_index(part.lo());
    ExactScalar lo = part.lo();
    while (true) {
      const ExactScalar end = piece_end(i);
      const ExactScalar& hi = min(end, part.hi());
      out.emplace_back(lo + shifts_[i], hi + shifts_[i]);
      if (!(end < part.hi())) break;
      lo = end;
      ++i;
    }
  }
  return IntervalSet(std::move(out));
}

PiecewiseTranslation compose(const PiecewiseTranslation& f, const PiecewiseTranslation& g) {
  // On a piece P of g, f o g = f restricted to g(P), pulled back.
  std::vector<std::pair<ExactScalar, ExactScalar>> pieces;
  for (std::size_t i = 0; i < g.piece_count(); ++i) {
    const ExactScalar& gs = g.shifts()[i];
    const ExactScalar lo_img = g.starts()[i] + gs;
    const ExactScalar hi_img = g.piece_end(i) + gs;
    std::size_t j = f.piece_index(lo_img);
    ExactScalar cur = lo_img;
    while (true) {
      pieces.emplace_back(cur - gs, gs + f.shifts()[j]);
      const ExactScalar end = f.piece_end(j);
      if (!(end < hi_img)) break;
      cur = end;
      ++j;
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ExactScalar> starts, shifts;
  starts.reserve(pieces.size());
  shifts.reserve(pieces.size());
  for (auto& [s, t] : pieces) {
    starts.push_back(std::move(s));
    shifts.push_back(std::move(t));
  }
  return PiecewiseTranslation(std::move(starts), std::move(shifts));
}

// ---- IET --------------------------------------------------------------------

IET::IET(std::vector<ExactScalar> lengths, std::vector<int> perm)
    : lengths_(std::move(lengths)), perm_(std::move(perm)) {
  const int d = static_cast<int>(lengths_.size());
  if (d == 0) throw PreconditionError("IET needs at least one interval");
  if (static_cast<int>(perm_.size()) != d) {
    throw PreconditionError("permutation size " + std::to_string(perm_.size()) +
                            " does not match " + std::to_string(d) + " lengths");
  }
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  for (const int p : perm_) {
    if (p < 1 || p > d || seen[static_cast<std::size_t>(p - 1)]) {
      throw PreconditionError("invalid permutation");
    }
    seen[static_cast<std::size_t>(p - 1)] = true;
  }
  ExactScalar total;
  for (const auto& l : lengths_) {
    if (l.sign() <= 0) throw PreconditionError("IET length " + l.str() + " is not positive");
    if (!l.is_rational()) {
      if (field_ != 0 && field_ != l.radicand()) {
        throw DomainError("IET lengths mix radicands");
      }
      field_ = l.radicand();
    }
    total += l;
  }
  if (!(total == ExactScalar(1))) {
    throw PreconditionError("IET lengths sum to " + total.str() + ", not 1");
  }
  endpoints_.reserve(static_cast<std::size_t>(d) + 1);
  endpoints_.emplace_back(0);
  for (const auto& l : lengths_) endpoints_.push_back(endpoints_.back() + l);

  // Image position of piece i: sum of lengths of pieces j with perm[j] < perm[i].
  std::vector<int> at_position(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) at_position[static_cast<std::size_t>(perm_[i] - 1)] = i;
  std::vector<ExactScalar> image_start(static_cast<std::size_t>(d));
  ExactScalar acc;
  for (int pos = 0; pos < d; ++pos) {
    const std::size_t i = static_cast<std::size_t>(at_position[static_cast<std::size_t>(pos)]);
    image_start[i] = acc;
    acc += lengths_[i];
  }
  translations_.reserve(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
    translations_.push_back(image_start[i] - endpoints_[i]);
  }

  map_ = PiecewiseTranslation(std::vector<ExactScalar>(endpoints_.begin(), endpoints_.end() - 1),
                              translations_);
  inverse_map_ = map_.inverse();
  discontinuities_ = map_.breakpoints();
}

bool IET::irreducible() const {
  int running_max = 0;
  for (std::size_t k = 0; k + 1 < perm_.size(); ++k) {
    running_max = std::max(running_max, perm_[k]);
    if (running_max == static_cast<int>(k) + 1) return false;
  }
  return true;
}

bool IET::has_removable_endpoints() const {
  for (std::size_t i = 0; i + 1 < translations_.size(); ++i) {
    if (translations_[i] == translations_[i + 1]) return true;
  }
  return false;
}

ExactScalar IET::apply(const ExactScalar& x) const { return map_.apply(x); }
ExactScalar IET::apply_inverse(const ExactScalar& x) const { return inverse_map_.apply(x); }
ExactScalar IET::apply_left(const ExactScalar& x) const { return map_.apply_left(x); }
ExactScalar IET::apply_inverse_left(const ExactScalar& x) const {
  return inverse_map_.apply_left(x);
}

IET IET::inverse() const {
  const std::size_t d = lengths_.size();
  std::vector<ExactScalar> lengths(d);
  std::vector<int> perm(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t pos = static_cast<std::size_t>(perm_[i] - 1);
    lengths[pos] = lengths_[i];
    perm[pos] = static_cast<int>(i) + 1;
  }
  return IET(std::move(lengths), std::move(perm));
}

// ---- powers and orbits ------------------------------------------------------

namespace {

PiecewiseTranslation power_of(const PiecewiseTranslation& f, const PiecewiseTranslation& f_inv,
                              long long n) {
  if (n == 0) return PiecewiseTranslation();
  const auto& disc = f.starts();  // disc[0] == 0 is not a discontinuity
  const std::size_t nd = disc.size() - 1;
  const std::size_t steps = static_cast<std::size_t>(n);

  // Breakpoints of f^n: f^{-i}(delta) for 0 <= i < n, labelled (i, delta).
  struct Point {
    ExactScalar x;
    std::size_t back_steps;
    std::size_t which;
  };
  std::vector<Point> points;
  points.reserve(nd * steps);
  for (std::size_t j = 0; j < nd; ++j) {
    ExactScalar x = disc[j + 1];
    for (std::size_t i = 0; i < steps; ++i) {
      points.push_back({x, i, j});
      if (i + 1 < steps) x = f_inv.apply(x);
    }
  }
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.x < b.x; });

  // forward[j][t] = f^t(delta_j)
  std::vector<std::vector<ExactScalar>> forward(nd);
  for (std::size_t j = 0; j < nd; ++j) {
    forward[j].reserve(steps + 1);
    forward[j].push_back(disc[j + 1]);
    for (std::size_t t = 0; t < steps; ++t) forward[j].push_back(f.apply(forward[j].back()));
  }
  ExactScalar zero_image(0);
  for (std::size_t t = 0; t < steps; ++t) zero_image = f.apply(zero_image);

  std::vector<ExactScalar> starts{ExactScalar(0)};
  std::vector<ExactScalar> shifts{zero_image};
  for (const auto& p : points) {
    if (p.x == starts.back()) continue;
    const ExactScalar& img = forward[p.which][steps - p.back_steps];
    starts.push_back(p.x);
    shifts.push_back(img - p.x);
  }
  return PiecewiseTranslation(std::move(starts), std::move(shifts));
}

}  // namespace

PiecewiseTranslation power(const IET& t, long long n) {
  if (n >= 0) return power_of(t.map(), t.inverse_map(), n);
  return power_of(t.inverse_map(), t.map(), -n);
}

std::vector<ExactScalar> orbit(const IET& t, const ExactScalar& x, long long n, int direction) {
  if (n < 0) throw PreconditionError("orbit length must be non-negative");
  if (direction != 1 && direction != -1) throw PreconditionError("orbit direction must be +1 or -1");
  std::vector<ExactScalar> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back(x);
  for (long long i = 0; i < n; ++i) {
    out.push_back(direction > 0 ? t.apply(out.back()) : t.apply_inverse(out.back()));
  }
  return out;
}

std::string IdocReport::describe() const {
  switch (status) {
    case Status::CertifiedToDepth:
      return "certified_minimal_up_to_" + std::to_string(depth);
    case Status::NoDiscontinuities:
      return "violation: no discontinuities (T is the identity)";
    case Status::Reducible:
      return "violation: reducible permutation";
    case Status::OrbitCollision:
      return "violation: T^" + std::to_string(step) + "(" + delta.str() + ") = " +
             delta_prime.str();
  }
  return {};
}

IdocReport check_idoc(const IET& t, long long depth) {
  if (depth < 1) throw PreconditionError("idoc depth must be >= 1");
  IdocReport report;
  report.depth = depth;
  const auto& disc = t.discontinuities();
  if (disc.empty()) {
    report.status = IdocReport::Status::NoDiscontinuities;
    return report;
  }
  if (!t.irreducible()) {
    report.status = IdocReport::Status::Reducible;
    return report;
  }
  std::vector<ExactScalar> current = disc.points();
  for (long long i = 1; i <= depth; ++i) {
    for (std::size_t j = 0; j < current.size(); ++j) {
      current[j] = t.apply(current[j]);
      if (disc.contains(current[j])) {
        report.status = IdocReport::Status::OrbitCollision;
        report.step = i;
        report.delta = disc.points()[j];
        report.delta_prime = current[j];
        return report;
      }
    }
  }
  return report;
}

}  // namespace ietlab
