#include "ietlab/return_map.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ietlab/error.hpp"

namespace ietlab {

namespace {

// A sub-interval [src_lo, src_hi) of the base whose current image is the
// source shifted by `shift`.
struct Strand {
  ExactScalar src_lo, src_hi, shift;
};

long long to_long(const mpz_class& v) {
  if (!mpz_fits_slong_p(v.get_mpz_t())) throw PreconditionError("step cap overflows");
  return v.get_si();
}

}  // namespace

long long default_step_cap(const IET& t, const Interval& base) {
  const ExactScalar q = ExactScalar(4) / base.length();
  const long long ceil4 = -to_long((-q).floor());
  return ceil4 + 4LL * t.d();
}

PartialReturn first_return_partial(const IET& t, const Interval& base, long long step_cap) {
  if (step_cap < 1) throw PreconditionError("step cap must be >= 1");
  const PiecewiseTranslation& f = t.map();
  const ExactScalar& lo_b = base.lo();
  const ExactScalar& hi_b = base.hi();

  std::vector<ReturnPiece> raw;
  std::vector<Strand> active{{lo_b, hi_b, ExactScalar(0)}};
  std::vector<Strand> next;
  for (long long step = 1; step <= step_cap && !active.empty(); ++step) {
    next.clear();
    for (const auto& s : active) {
      // Split the current image by the pieces of T.
      const ExactScalar cur_hi = s.src_hi + s.shift;
      ExactScalar cur = s.src_lo + s.shift;
      std::size_t i = f.piece_index(cur);
      while (true) {
        const ExactScalar end = f.piece_end(i);
        const ExactScalar& sub_hi = min(end, cur_hi);
        const ExactScalar shift = s.shift + f.shifts()[i];
        // Image of [cur, sub_hi) is [cur + t_i, sub_hi + t_i); cut it by the base.
        const ExactScalar img_lo = cur + f.shifts()[i];
        const ExactScalar img_hi = sub_hi + f.shifts()[i];
        const ExactScalar& in_lo = max(img_lo, lo_b);
        const ExactScalar& in_hi = min(img_hi, hi_b);
        if (img_lo < in_lo) next.push_back({img_lo - shift, min(img_hi, lo_b) - shift, shift});
        if (in_lo < in_hi) {
          raw.push_back({Interval(in_lo - shift, in_hi - shift), step, shift});
        }
        if (in_hi < img_hi) next.push_back({max(img_lo, hi_b) - shift, img_hi - shift, shift});
        if (!(end < cur_hi)) break;
        cur = end;
        ++i;
      }
    }
    std::swap(active, next);
  }

  std::sort(raw.begin(), raw.end(),
            [](const ReturnPiece& a, const ReturnPiece& b) { return a.piece.lo() < b.piece.lo(); });
  std::vector<ReturnPiece> merged;
  for (auto& p : raw) {
    if (!merged.empty() && merged.back().piece.hi() == p.piece.lo() &&
        merged.back().return_time == p.return_time && merged.back().translation == p.translation) {
      merged.back().piece = Interval(merged.back().piece.lo(), p.piece.hi());
    } else {
      merged.push_back(std::move(p));
    }
  }
  std::vector<Interval> rest;
  for (const auto& s : active) rest.emplace_back(s.src_lo, s.src_hi);

  ReturnSystem rs{base, std::move(merged)};
  if (static_cast<int>(rs.pieces.size()) > t.d() + 2) {
    throw VerificationError("first-return map has " + std::to_string(rs.pieces.size()) +
                            " pieces, more than d+2 = " + std::to_string(t.d() + 2));
  }
  return PartialReturn{std::move(rs), IntervalSet(std::move(rest))};
}

ReturnSystem first_return(const IET& t, const Interval& base, std::optional<long long> step_cap) {
  const long long cap = step_cap.value_or(default_step_cap(t, base));
  PartialReturn pr = first_return_partial(t, base, cap);
  if (!pr.uncovered.empty()) {
    std::string parts;
    for (const auto& p : pr.uncovered.parts()) {
      parts += " [" + p.lo().str() + ", " + p.hi().str() + ")";
    }
    throw PreconditionError("first return not complete within " + std::to_string(cap) +
                            " steps; uncovered measure " + pr.uncovered.measure().str() + ":" +
                            parts);
  }
  return std::move(pr.system);
}

IET ReturnSystem::induced() const {
  const ExactScalar len = base.length();
  ExactScalar covered;
  for (const auto& p : pieces) covered += p.piece.length();
  if (!(covered == len)) throw PreconditionError("return system does not cover its base");
  const std::size_t r = pieces.size();
  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pieces[a].piece.lo() + pieces[a].translation < pieces[b].piece.lo() + pieces[b].translation;
  });
  std::vector<int> perm(r);
  for (std::size_t pos = 0; pos < r; ++pos) perm[order[pos]] = static_cast<int>(pos) + 1;
  std::vector<ExactScalar> lengths;
  lengths.reserve(r);
  for (const auto& p : pieces) lengths.push_back(p.piece.length() / len);
  return IET(std::move(lengths), std::move(perm));
}

std::vector<std::pair<long long, ExactScalar>> return_time_histogram(const ReturnSystem& rs) {
  std::map<long long, ExactScalar> acc;
  for (const auto& p : rs.pieces) acc[p.return_time] += p.piece.length();
  return {acc.begin(), acc.end()};
}

}  // namespace ietlab
