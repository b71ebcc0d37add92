#include "ietlab/rigidity.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

namespace ietlab {

namespace {

struct Labelled {
  ExactScalar x;
  EndpointLabel label;
};

void sort_labelled(std::vector<Labelled>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Labelled& a, const Labelled& b) { return a.x < b.x; });
}

void require_d(const IET& t) {
  if (t.d() < 2) throw PreconditionError("rigidity needs d >= 2");
}

std::string str_ll(long long v) { return std::to_string(v); }

// Lexicographic key for a class: measure descending, then (delta, delta').
bool better_class(const PairClass& a, const PairClass& b) {
  const int c = compare(a.total_measure, b.total_measure);
  if (c != 0) return c > 0;
  const int c1 = compare(a.delta, b.delta);
  if (c1 != 0) return c1 < 0;
  const int c2 = compare(a.delta_prime, b.delta_prime);
  if (c2 != 0) return c2 < 0;
  return a.extended < b.extended;
}

// lo of the member pushed forward `steps` steps.
ExactScalar forward(const IET& t, ExactScalar x, long long steps) {
  for (long long i = 0; i < steps; ++i) x = t.apply(x);
  return x;
}

ExactScalar forward_left(const IET& t, ExactScalar x, long long steps) {
  for (long long i = 0; i < steps; ++i) x = t.apply_left(x);
  return x;
}

long long floor_ll(const ExactScalar& q) {
  const mpz_class f = q.floor();
  if (!mpz_fits_slong_p(f.get_mpz_t())) throw PreconditionError("value " + q.str() + " overflows");
  return f.get_si();
}

}  // namespace

// ---- partition --------------------------------------------------------------

BackwardPartition backward_partition(const IET& t, long long n) {
  if (n < 0) throw PreconditionError("n must be >= 0");
  const auto& disc = t.discontinuities().points();
  std::vector<Labelled> s, s_left;
  s.reserve(disc.size() * static_cast<std::size_t>(n + 1));
  s_left.reserve(s.capacity());
  for (std::size_t j = 0; j < disc.size(); ++j) {
    ExactScalar x = disc[j];
    ExactScalar y = disc[j];
    for (long long i = 0; i <= n; ++i) {
      s.push_back({x, {static_cast<int>(j), i}});
      s_left.push_back({y, {static_cast<int>(j), i}});
      if (i < n) {
        x = t.apply_inverse(x);
        y = t.apply_inverse_left(y);
      }
    }
  }
  sort_labelled(s);
  sort_labelled(s_left);

  BackwardPartition bp;
  bp.n = n;
  std::vector<ExactScalar> pts;
  for (const auto& p : s) {
    if (pts.empty() || !(pts.back() == p.x)) {
      pts.push_back(p.x);
      bp.provenance.emplace_back();
    }
    bp.provenance.back().push_back(p.label);
  }
  bp.points = PointSet(pts);

  auto right_labels = [&](const ExactScalar& b) {
    std::vector<EndpointLabel> out;
    auto it = std::lower_bound(s_left.begin(), s_left.end(), b,
                               [](const Labelled& l, const ExactScalar& v) { return l.x < v; });
    for (; it != s_left.end() && it->x == b; ++it) out.push_back(it->label);
    if (b == ExactScalar(1)) out.push_back({EndpointLabel::kBoundary, 0});
    return out;
  };

  ExactScalar lo(0);
  std::vector<EndpointLabel> lo_labels{{EndpointLabel::kBoundary, 0}};
  std::size_t k = 0;
  if (!pts.empty() && pts[0].is_zero()) {
    lo_labels.insert(lo_labels.begin(), bp.provenance[0].begin(), bp.provenance[0].end());
    k = 1;
  }
  for (;; ++k) {
    const ExactScalar hi = k < pts.size() ? pts[k] : ExactScalar(1);
    bp.elements.push_back({Interval(lo, hi), std::move(lo_labels), right_labels(hi)});
    if (k >= pts.size()) break;
    lo = hi;
    lo_labels = bp.provenance[k];
  }
  return bp;
}

std::vector<PairClass> classify_pairs(const BackwardPartition& bp, const IET& t) {
  const auto& disc = t.discontinuities().points();
  if (disc.empty()) return {};
  auto value = [&](int idx, bool left) {
    if (idx == EndpointLabel::kBoundary) return ExactScalar(left ? 0 : 1);
    return disc[static_cast<std::size_t>(idx)];
  };
  std::map<std::pair<int, int>, PairClass> acc;
  for (const auto& el : bp.elements) {
    // One witness (smallest steps) per distinct pair.
    std::map<std::pair<int, int>, std::pair<long long, long long>> seen;
    for (const auto& l : el.left) {
      for (const auto& r : el.right) {
        const auto key = std::make_pair(l.delta, r.delta);
        auto it = seen.find(key);
        if (it == seen.end()) {
          seen.emplace(key, std::make_pair(l.steps, r.steps));
        } else {
          it->second = std::min(it->second, std::make_pair(l.steps, r.steps));
        }
      }
    }
    for (const auto& [key, steps] : seen) {
      auto it = acc.find(key);
      if (it == acc.end()) {
        it = acc.emplace(key, PairClass{key.first, key.second, value(key.first, true),
                                        value(key.second, false), {}, ExactScalar(0), false})
                 .first;
      }
      it->second.members.push_back({el.interval, steps.first, steps.second});
      it->second.total_measure += el.interval.length();
    }
  }
  std::vector<PairClass> out;
  out.reserve(acc.size());
  for (auto& [key, pc] : acc) out.push_back(std::move(pc));
  std::sort(out.begin(), out.end(), [](const PairClass& a, const PairClass& b) {
    return std::tie(a.delta, a.delta_prime) < std::tie(b.delta, b.delta_prime);
  });
  return out;
}

ExactScalar sizable_threshold(int d) {
  if (d < 2) throw PreconditionError("sizable threshold needs d >= 2");
  return ExactScalar::fraction(1, static_cast<long long>(d - 1) * (d - 1));
}

std::vector<PairClass> sizable_pairs(const std::vector<PairClass>& classes, int d) {
  const ExactScalar theta = sizable_threshold(d);
  std::vector<PairClass> out;
  for (const auto& pc : classes) {
    if (pc.delta_index != EndpointLabel::kBoundary &&
        pc.delta_prime_index != EndpointLabel::kBoundary && pc.total_measure >= theta) {
      out.push_back(pc);
    }
  }
  if (out.empty()) {
    // Widen: a boundary label may stand in for either side.
    std::map<int, ExactScalar> lefts, rights;
    for (const auto& pc : classes) {
      if (pc.delta_index != EndpointLabel::kBoundary) lefts.emplace(pc.delta_index, pc.delta);
      if (pc.delta_prime_index != EndpointLabel::kBoundary) {
        rights.emplace(pc.delta_prime_index, pc.delta_prime);
      }
    }
    for (const auto& [l, lv] : lefts) {
      for (const auto& [r, rv] : rights) {
        PairClass w{l, r, lv, rv, {}, ExactScalar(0), true};
        std::vector<ClassMember> members;
        for (const auto& pc : classes) {
          const bool lok = pc.delta_index == l || pc.delta_index == EndpointLabel::kBoundary;
          const bool rok = pc.delta_prime_index == r || pc.delta_prime_index == EndpointLabel::kBoundary;
          if (lok && rok) members.insert(members.end(), pc.members.begin(), pc.members.end());
        }
        // An element may sit in several of the merged classes.
        std::stable_sort(members.begin(), members.end(), [](const ClassMember& a, const ClassMember& b) {
          return a.interval.lo() < b.interval.lo();
        });
        for (auto& m : members) {
          if (!w.members.empty() && w.members.back().interval == m.interval) continue;
          w.total_measure += m.interval.length();
          w.members.push_back(std::move(m));
        }
        if (w.total_measure >= theta) out.push_back(std::move(w));
      }
    }
  }
  std::sort(out.begin(), out.end(), better_class);
  return out;
}

PairClass find_sizable_pair(const std::vector<PairClass>& classes, int d) {
  auto s = sizable_pairs(classes, d);
  if (s.empty()) {
    ExactScalar best(0);
    for (const auto& pc : classes) best = max(best, pc.total_measure);
    throw VerificationError("no sizable pair among " + std::to_string(classes.size()) +
                            " classes; largest measure " + best.str() + " < " +
                            sizable_threshold(d).str());
  }
  return std::move(s.front());
}

long long n0_for_density(const IET& t, const ExactScalar& eps, long long cap) {
  if (eps.sign() <= 0) throw PreconditionError("epsilon must be positive");
  const auto& disc = t.discontinuities().points();
  std::set<ExactScalar> pts;
  std::multiset<ExactScalar> gaps{ExactScalar(1)};
  auto insert = [&](const ExactScalar& p) {
    auto [it, fresh] = pts.insert(p);
    if (!fresh) return;
    const ExactScalar lo = it == pts.begin() ? ExactScalar(0) : *std::prev(it);
    const ExactScalar hi = std::next(it) == pts.end() ? ExactScalar(1) : *std::next(it);
    gaps.erase(gaps.find(hi - lo));
    gaps.insert(p - lo);
    gaps.insert(hi - p);
  };
  auto dense = [&] { return *gaps.rbegin() < eps; };
  if (eps > ExactScalar(1)) return 0;  // max_gap <= 1 always
  if (disc.empty()) throw PreconditionError("no discontinuities: backward orbits are never dense");
  std::vector<ExactScalar> cur = disc;
  for (const auto& p : cur) insert(p);
  for (long long h = 0;; ++h) {
    if (dense()) return 2 * h;
    if (2 * (h + 1) > cap) {
      throw PreconditionError("backward orbits not " + eps.str() + "-dense within cap " +
                              str_ll(cap) + " (max gap " + gaps.rbegin()->str() + ")");
    }
    for (auto& p : cur) {
      p = t.apply_inverse(p);
      insert(p);
    }
  }
}

ExactScalar sizable_length(int d, long long n) {
  if (d < 1 || n < 1) throw PreconditionError("sizable length needs d >= 1 and n >= 1");
  return ExactScalar(1) / ExactScalar(10LL * d * d * n);
}

// ---- dichotomy --------------------------------------------------------------

std::vector<std::size_t> dichotomy_candidates(const PairClass& pc, int d, long long n) {
  const ExactScalar l0 = sizable_length(d, n);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pc.members.size(); ++i) {
    if (pc.members[i].interval.length() > l0) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pc.members[a].interval.length() > pc.members[b].interval.length();
  });
  return idx;
}

DichotomyOutcome sizable_dichotomy(const IET& t, const PairClass& pc, long long n,
                                   std::size_t choice) {
  require_d(t);
  if (n < 2) throw PreconditionError("dichotomy needs n >= 2");
  const int d = t.d();
  const ExactScalar l0 = sizable_length(d, n);
  const auto cands = dichotomy_candidates(pc, d, n);
  if (cands.empty()) {
    ExactScalar longest(0);
    for (const auto& m : pc.members) longest = max(longest, m.interval.length());
    throw VerificationError("no member of the class (" + std::to_string(pc.members.size()) +
                            " members, measure " + pc.total_measure.str() +
                            ") is longer than " + l0.str() + "; longest " + longest.str());
  }
  if (choice >= cands.size()) throw PreconditionError("dichotomy choice out of range");
  const std::size_t mi = cands[choice];
  const ClassMember& m = pc.members[mi];
  const ExactScalar& a = m.interval.lo();

  ExactScalar x = a;
  ExactScalar closest = m.interval.length();
  for (long long i = 1; 2 * i < n; ++i) {
    x = t.apply(x);
    const ExactScalar e = x - a;
    const ExactScalar ae = abs(e);
    if (ae < l0) {
      if (e.is_zero()) {
        throw VerificationError("T^" + str_ll(i) + " fixes " + a.str() + ": T is not minimal");
      }
      PossibilityII p2;
      p2.k = i;
      p2.member = mi;
      if (e.sign() > 0) {
        // Right case: T^i is a translation on [a, b) and a = T^{-left_steps} delta.
        p2.side = PossibilityII::Side::Right;
        const ExactScalar delta = forward(t, a, m.left_steps);
        p2.drift = forward(t, delta, i) - delta;
        if (!(p2.drift == e)) {
          throw VerificationError("right drift " + p2.drift.str() + " disagrees with shift " + e.str());
        }
      } else {
        p2.side = PossibilityII::Side::Left;
        const ExactScalar dp = forward_left(t, m.interval.hi(), m.right_steps);
        p2.drift = dp - forward_left(t, dp, i);
        if (!(p2.drift == -e)) {
          throw VerificationError("left drift " + p2.drift.str() + " disagrees with shift " + e.str());
        }
      }
      return p2;
    }
    closest = min(closest, ae);
  }
  // No close return before n/2. Any length up to the closest return keeps the
  // translates disjoint; use it (capped by the member) rather than l0 alone so
  // first-return times stay near n.
  const ExactScalar len = max(l0, closest);
  return PossibilityI{Interval(a, a + len), Interval(a, a + l0), mi};
}

// ---- towers and certificates ------------------------------------------------

Tower easy_rig_tower(const IET& t, const Interval& J, long long m) {
  if (m < 2) throw PreconditionError("tower height m must be >= 2");
  const PiecewiseTranslation& f = t.map();
  const ExactScalar len = J.length();
  std::vector<ExactScalar> lo_orbit{J.lo()};
  lo_orbit.reserve(static_cast<std::size_t>(m) + 1);
  for (long long i = 0; i < m; ++i) {
    const ExactScalar& cur = lo_orbit.back();
    const std::size_t p = f.piece_index(cur);
    if (f.piece_end(p) < cur + len) {
      throw PreconditionError("T^" + str_ll(i + 1) + " is not a translation on J: T^" + str_ll(i) +
                              " J straddles " + f.piece_end(p).str());
    }
    lo_orbit.push_back(cur + f.shifts()[p]);
  }
  for (long long i = 1; i <= m - 2; ++i) {
    if (abs(lo_orbit[static_cast<std::size_t>(i)] - J.lo()) < len) {
      throw PreconditionError("T^" + str_ll(i) + " J meets J");
    }
  }

  const long long cap = floor_ll(ExactScalar(2) / len);
  if (cap < 1) throw PreconditionError("J too long for a return-time cap");
  const PartialReturn pr = first_return_partial(t, J, cap);
  const ExactScalar need = len / ExactScalar(2LL * (t.d() + 2));
  const ReturnPiece* best = nullptr;
  for (const auto& p : pr.system.pieces) {
    if (p.piece.length() >= need && (!best || p.return_time < best->return_time)) best = &p;
  }
  if (!best) {
    throw VerificationError("no return piece of measure >= " + need.str() + " within " +
                            str_ll(cap) + " steps (" + std::to_string(pr.system.pieces.size()) +
                            " pieces, uncovered " + pr.uncovered.measure().str() + ")");
  }
  std::vector<Interval> floors;
  for (long long i = 0; i <= m - 2; ++i) {
    const ExactScalar off = lo_orbit[static_cast<std::size_t>(i)] - J.lo();
    floors.emplace_back(best->piece.lo() + off, best->piece.hi() + off);
  }
  Tower tw{IntervalSet(floors), best->return_time, best->piece, best->translation};
  if (!(tw.A.measure() == ExactScalar(m - 1) * best->piece.length())) {
    throw VerificationError("tower floors overlap");
  }
  return tw;
}

bool k_in_range(long long k, long long n, int d) {
  // n/(20d) <= k <= 20nd
  return k >= 1 && 20LL * d * k >= n && k <= 20LL * n * d;
}

ExactScalar measure_bound(int d) {
  long long d5 = 1;
  for (int i = 0; i < 5; ++i) d5 *= d;
  return ExactScalar(1) / ExactScalar(100000LL * d5);
}

RigidityCertificate make_certificate(const IET& t, long long n, const ExactScalar& eps, long long k,
                                     IntervalSet A, std::string branch) {
  const int d = t.d();
  if (!k_in_range(k, n, d)) {
    throw KRangeError("k = " + str_ll(k) + " outside [" + str_ll(n) + "/" + str_ll(20LL * d) +
                      ", " + str_ll(20LL * n * d) + "]");
  }
  const ExactScalar mA = A.measure();
  if (!(mA > measure_bound(d))) {
    throw VerificationError("measure(A) = " + mA.str() + " not above " + measure_bound(d).str());
  }
  const PiecewiseTranslation p = power(t, k);
  RigidityCertificate cert{t, n, eps, k, std::move(A), {}, std::move(branch), 0, {}};
  for (const auto& part : cert.A.parts()) {
    ExactScalar cur = part.lo();
    std::size_t i = p.piece_index(cur);
    while (cur < part.hi()) {
      const ExactScalar end = min(p.piece_end(i), part.hi());
      const ExactScalar& disp = p.shifts()[i];
      if (!(abs(disp) < eps)) {
        throw VerificationError("displacement " + disp.str() + " on [" + cur.str() + ", " +
                                end.str() + ") not below " + eps.str());
      }
      auto& ps = cert.pieces;
      if (!ps.empty() && ps.back().piece.hi() == cur && ps.back().displacement == disp) {
        ps.back().piece = Interval(ps.back().piece.lo(), end);
      } else {
        ps.push_back({Interval(cur, end), disp});
      }
      cur = end;
      ++i;
    }
  }
  return cert;
}

RigidityCertificate possibility2_construct(const IET& t, const PairClass& pc,
                                           const PossibilityII& p2, long long n,
                                           const ExactScalar& eps) {
  require_d(t);
  const int d = t.d();
  const ExactScalar l0 = sizable_length(d, n);
  if (!(p2.drift.sign() > 0 && p2.drift < l0)) {
    throw PreconditionError("drift " + p2.drift.str() + " not in (0, " + l0.str() + ")");
  }
  if (p2.k < 1 || 2 * p2.k > n) throw PreconditionError("k must satisfy 0 < k <= n/2");
  for (const auto& m : pc.members) {
    if (!(m.interval.length() < eps)) {
      throw PreconditionError("class member of length " + m.interval.length().str() +
                              " not shorter than epsilon");
    }
  }
  const long long k = p2.k;
  const long long big_n = n / (2 * k);

  std::vector<Interval> tilde;
  long long in_b = 0;
  for (const auto& m : pc.members) {
    const ExactScalar& a = m.interval.lo();
    const ExactScalar len = m.interval.length();
    ExactScalar x = forward(t, a, k);
    const ExactScalar e = x - a;
    if (!(abs(e) < len)) continue;  // T^k J misses J
    ++in_b;
    // T^{ik} a = a + i e for i <= 2N (ik <= n).
    for (long long i = 2; i <= 2 * big_n; ++i) {
      x = forward(t, x, k);
      if (!(x == a + ExactScalar(i) * e)) {
        throw VerificationError("translation law fails on [" + a.str() + ", " +
                                m.interval.hi().str() + ") at i = " + str_ll(i));
      }
    }
    const ExactScalar span = ExactScalar(big_n) * e;
    tilde.emplace_back(a + min(ExactScalar(0), span), m.interval.hi() + max(ExactScalar(0), span));
  }
  if (tilde.empty()) throw VerificationError("no class member meets its T^k image");
  RigidityCertificate cert =
      make_certificate(t, n, eps, big_n * k, IntervalSet(std::move(tilde)), "possibility-2");
  cert.details["step"] = str_ll(k);
  cert.details["multiplier"] = str_ll(big_n);
  cert.details["drift"] = p2.drift.str();
  cert.details["side"] = p2.side == PossibilityII::Side::Right ? "right" : "left";
  cert.details["overlapping_members"] = str_ll(in_b);
  return cert;
}

RigidityCertificate certify_rigidity(const IET& t, const ExactScalar& eps, long long n,
                                     const CertifyOptions& options) {
  require_d(t);
  if (eps.sign() <= 0) throw PreconditionError("epsilon must be positive");
  if (n < 4) throw PreconditionError("n must be >= 4");
  const long long depth = options.idoc_depth > 0 ? options.idoc_depth : n;
  const IdocReport idoc = check_idoc(t, depth);
  if (!idoc.certified()) throw PreconditionError("T is not minimal-certified: " + idoc.describe());
  const long long n0 = n0_for_density(t, eps, n);

  const BackwardPartition bp = backward_partition(t, n);
  const auto classes = sizable_pairs(classify_pairs(bp, t), t.d());
  if (classes.empty()) find_sizable_pair(classify_pairs(bp, t), t.d());  // throws with diagnostics

  std::string failures;
  long long attempts = 0;
  for (std::size_t ci = 0; ci < std::min(options.max_classes, classes.size()); ++ci) {
    const PairClass& pc = classes[ci];
    const auto cands = dichotomy_candidates(pc, t.d(), n);
    if (cands.empty()) sizable_dichotomy(t, pc, n);  // throws with diagnostics
    for (std::size_t mi = 0; mi < std::min(options.max_members, cands.size()); ++mi) {
      ++attempts;
      try {
        const DichotomyOutcome out = sizable_dichotomy(t, pc, n, mi);
        RigidityCertificate cert = [&] {
          if (const auto* p1 = std::get_if<PossibilityI>(&out)) {
            const Tower tw = easy_rig_tower(t, p1->J, n / 2);
            RigidityCertificate c = make_certificate(t, n, eps, tw.j, tw.A, "possibility-1");
            c.details["tower_base"] = "[" + tw.base.lo().str() + ", " + tw.base.hi().str() + ")";
            c.details["tower_J"] = "[" + p1->J.lo().str() + ", " + p1->J.hi().str() + ")";
            c.details["tower_shift"] = tw.shift.str();
            return c;
          }
          return possibility2_construct(t, pc, std::get<PossibilityII>(out), n, eps);
        }();
        cert.minimality_depth = depth;
        cert.details["n0"] = str_ll(n0);
        cert.details["pair"] = "(" + pc.delta.str() + ", " + pc.delta_prime.str() + ")";
        cert.details["pair_measure"] = pc.total_measure.str();
        cert.details["boundary_labels"] = pc.extended ? "used" : "unused";
        cert.details["attempts"] = str_ll(attempts);
        return cert;
      } catch (const KRangeError& e) {
        failures += std::string(failures.empty() ? "" : "; ") + e.what();
      }
    }
  }
  throw VerificationError("no certificate with k in range after " + str_ll(attempts) +
                          " attempts: " + failures);
}

}  // namespace ietlab
