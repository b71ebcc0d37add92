#include "ietlab/verifier.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace ietlab {

namespace {

void fail(VerificationReport& r, std::string msg) {
  r.ok = false;
  if (r.failures.size() < 20) r.failures.push_back(std::move(msg));
}

std::string show(const Interval& i) { return "[" + i.lo().str() + ", " + i.hi().str() + ")"; }

// Piece table of T: starts[i] <= x < starts[i+1] moves by shifts[i].
struct Table {
  const std::vector<ExactScalar>& starts;
  const std::vector<ExactScalar>& shifts;

  std::size_t piece(const ExactScalar& x) const {
    const auto it = std::upper_bound(starts.begin() + 1, starts.end() - 1, x);
    return static_cast<std::size_t>(it - starts.begin()) - 1;
  }
};

// Pushes [lo, lo+len) k steps, cutting where it meets a discontinuity, and
// compares every fragment's total shift with the recorded one.
void check_by_fragments(const Table& tab, const DisplacementPiece& p, long long k, VerificationReport& rep) {
  struct Frag {
    ExactScalar lo, hi, shift;  // piece coordinates; T^s x = x + shift
  };
  std::vector<Frag> frags{{p.piece.lo(), p.piece.hi(), ExactScalar(0)}}, next;
  for (long long s = 0; s < k; ++s) {
    next.clear();
    for (const auto& f : frags) {
      ExactScalar lo = f.lo;
      while (lo < f.hi) {
        const std::size_t i = tab.piece(lo + f.shift);
        const ExactScalar cut = tab.starts[i + 1] - f.shift;
        const ExactScalar hi = cut < f.hi ? cut : f.hi;
        Frag g{lo, hi, f.shift + tab.shifts[i]};
        // T^s cuts, but neighbours landing on the same shift are one fragment
        if (!next.empty() && next.back().shift == g.shift && next.back().hi == g.lo) {
          next.back().hi = g.hi;
        } else {
          next.push_back(std::move(g));
        }
        lo = hi;
      }
    }
    std::swap(frags, next);
    if (frags.size() > 4096) {
      fail(rep, "T^" + std::to_string(s + 1) + " cuts " + show(p.piece) + " into too many fragments");
      return;
    }
  }
  for (const auto& f : frags) {
    if (!(f.shift == p.displacement)) {
      fail(rep, "displacement on " + show(Interval(f.lo, f.hi)) + " is " + f.shift.str() + ", recorded " +
                    p.displacement.str());
    }
  }
}

}  // namespace

VerificationReport verify_certificate(const RigidityCertificate& cert, long long samples,
                                      std::uint64_t seed) {
  VerificationReport rep;
  const IET& t = cert.iet;
  const int d = t.d();
  if (!k_in_range(cert.k, cert.n, d)) fail(rep, "k = " + std::to_string(cert.k) + " out of range");
  if (!(cert.A.measure() > measure_bound(d))) fail(rep, "measure(A) = " + cert.A.measure().str());

  std::vector<Interval> tiles;
  for (const auto& p : cert.pieces) tiles.push_back(p.piece);
  ExactScalar total;
  for (const auto& p : tiles) total += p.length();
  if (!(IntervalSet(tiles) == cert.A) || !(total == cert.A.measure())) {
    fail(rep, "pieces do not tile A");
  }

  // Interval propagation against the piece table of T alone. Pieces are often
  // images of one another (tower floors), so each orbit is walked once as a
  // chain and every piece met along it reads its k-step shift off the chain.
  const Table tab{t.endpoints(), t.translations()};
  std::map<ExactScalar, std::size_t> by_lo;
  for (std::size_t i = 0; i < cert.pieces.size(); ++i) by_lo.emplace(cert.pieces[i].piece.lo(), i);
  std::vector<char> done(cert.pieces.size(), 0);
  const long long k = cert.k;

  for (std::size_t seed_piece = 0; seed_piece < cert.pieces.size(); ++seed_piece) {
    if (done[seed_piece]) continue;
    const ExactScalar len = cert.pieces[seed_piece].piece.length();
    // pos[s] = lo of T^s(seed); cut[s] = T is not one translation on T^s(seed)
    std::vector<ExactScalar> pos{cert.pieces[seed_piece].piece.lo()};
    std::vector<char> cut;
    std::vector<std::pair<std::size_t, long long>> members{{seed_piece, 0}};
    done[seed_piece] = 1;
    long long until = k;
    for (long long s = 0; s < until; ++s) {
      const ExactScalar& lo = pos.back();
      const std::size_t i = tab.piece(lo);
      cut.push_back(tab.starts[i + 1] < lo + len ? 1 : 0);
      pos.push_back(lo + tab.shifts[i]);
      const auto it = by_lo.find(pos.back());
      if (it != by_lo.end() && !done[it->second] && cert.pieces[it->second].piece.length() == len) {
        done[it->second] = 1;
        members.emplace_back(it->second, s + 1);
        until = s + 1 + k;
      }
    }
    std::vector<long long> cuts_before(cut.size() + 1, 0);
    for (std::size_t s = 0; s < cut.size(); ++s) cuts_before[s + 1] = cuts_before[s] + cut[s];

    for (const auto& [idx, off] : members) {
      const DisplacementPiece& p = cert.pieces[idx];
      ++rep.pieces_checked;
      if (!(abs(p.displacement) < cert.epsilon)) {
        fail(rep, "displacement " + p.displacement.str() + " on " + show(p.piece) + " too large");
      }
      const auto o = static_cast<std::size_t>(off);
      const auto e = static_cast<std::size_t>(off + k);
      if (cuts_before[e] - cuts_before[o] > 0) {
        // T^k may still be one translation even though some T^s is not
        check_by_fragments(tab, p, k, rep);
      } else if (!(pos[e] - pos[o] == p.displacement)) {
        fail(rep, "displacement on " + show(p.piece) + " is " + (pos[e] - pos[o]).str() + ", recorded " +
                      p.displacement.str());
      }
    }
  }

  // Sampled points iterated one step at a time.
  std::mt19937_64 rng(seed);
  const auto& parts = cert.A.parts();
  if (!parts.empty() && samples > 0) {
    std::vector<double> weights;
    for (const auto& q : parts) weights.push_back(q.length().to_double());
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const ExactScalar scale = ExactScalar::fraction(1, 1LL << 30);
    for (long long s = 0; s < samples; ++s) {
      const Interval& q = parts[pick(rng)];
      const long long u = static_cast<long long>(rng() >> 34);  // 30 bits
      const ExactScalar x = q.lo() + q.length() * ExactScalar(u) * scale;
      ExactScalar y = x;
      for (long long i = 0; i < cert.k; ++i) y = t.apply(y);
      ++rep.samples_checked;
      if (!(abs(y - x) < cert.epsilon)) {
        fail(rep, "sample " + x.str() + " moves by " + (y - x).str());
      }
    }
  }
  return rep;
}

}  // namespace ietlab
