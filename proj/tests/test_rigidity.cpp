#include <doctest.h>

#include <set>

#include "ietlab/error.hpp"
#include "ietlab/rigidity.hpp"
#include "ietlab/verifier.hpp"
#include "support.hpp"

using namespace ietlab;
using testsupport::Gen;

namespace {

ExactScalar F(long long a, long long b) { return ExactScalar::fraction(a, b); }
ExactScalar S(const char* s) { return ExactScalar::parse(s); }

ExactScalar forward(const IET& t, ExactScalar x, long long n) {
  for (long long i = 0; i < n; ++i) x = t.apply(x);
  return x;
}

ExactScalar forward_left(const IET& t, ExactScalar x, long long n) {
  for (long long i = 0; i < n; ++i) x = t.apply_left(x);
  return x;
}

// Rotation x -> x + alpha mod 1.
IET rotation(const ExactScalar& alpha) { return make_iet({ExactScalar(1) - alpha, alpha}, {2, 1}); }

// Brute-force smallest even n0 with the backward orbits up to n0/2 eps-dense.
long long n0_oracle(const IET& t, const ExactScalar& eps) {
  std::vector<ExactScalar> pts, cur = t.discontinuities().points();
  for (long long h = 0; h < 10000; ++h) {
    pts.insert(pts.end(), cur.begin(), cur.end());
    if (max_gap(PointSet(pts)) < eps) return 2 * h;
    for (auto& p : cur) p = t.apply_inverse(p);
  }
  return -1;
}

// Replays a certificate with T::apply only.
void replay(const RigidityCertificate& c, Gen& g, int points) {
  std::vector<Interval> parts = c.A.parts();
  std::vector<double> w;
  for (const auto& p : parts) w.push_back(p.length().to_double());
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  for (int i = 0; i < points; ++i) {
    const ExactScalar x = g.point_in(parts[pick(g.engine())]);
    CHECK(abs(forward(c.iet, x, c.k) - x) < c.epsilon);
  }
}

}  // namespace

TEST_CASE("backward partition examples") {
  const IET id = testsupport::load("identity");
  for (long long n : {0LL, 3LL, 50LL}) {
    const BackwardPartition bp = backward_partition(id, n);
    CHECK(bp.points.empty());
    REQUIRE(bp.elements.size() == 1);
    CHECK(bp.elements[0].interval == Interval(ExactScalar(0), ExactScalar(1)));
  }

  const IET g = testsupport::load("golden");
  const BackwardPartition bp = backward_partition(g, 2);
  const ExactScalar delta = g.discontinuities().points()[0];
  const PointSet expected({delta, g.apply_inverse(delta), g.apply_inverse(g.apply_inverse(delta))});
  CHECK(bp.points == expected);
  CHECK(bp.points.size() == 3);
  CHECK(bp.elements.size() == 4);

  const IET swap = make_iet({F(1, 3), F(2, 3)}, {2, 1});
  const BackwardPartition sp = backward_partition(swap, 1);
  CHECK(sp.points == PointSet({F(1, 3), F(2, 3)}));
  CHECK(sp.elements.size() == 3);
  CHECK_THROWS_AS(backward_partition(swap, -1), PreconditionError);
}

TEST_CASE("backward partition properties over the corpus") {
  for (const auto& name : testsupport::full_corpus()) {
    const IET t = testsupport::load(name);
    for (long long n : {0LL, 1LL, 4LL, 17LL}) {
      const BackwardPartition bp = backward_partition(t, n);
      CHECK(bp.points.size() <= static_cast<std::size_t>((n + 1) * (t.d() - 1)));
      REQUIRE(bp.provenance.size() == bp.points.size());
      const auto& disc = t.discontinuities().points();
      // provenance is exact
      for (std::size_t i = 0; i < bp.points.size(); ++i) {
        CHECK(!bp.provenance[i].empty());
        for (const auto& lab : bp.provenance[i]) {
          CHECK(lab.steps <= n);
          CHECK(forward(t, bp.points.points()[i], lab.steps) == disc[static_cast<std::size_t>(lab.delta)]);
        }
      }
      // elements tile [0,1) and every T^i is one translation on each
      ExactScalar total;
      for (std::size_t e = 0; e < bp.elements.size(); ++e) {
        const Interval& iv = bp.elements[e].interval;
        total += iv.length();
        if (e > 0) CHECK(bp.elements[e - 1].interval.hi() == iv.lo());
        for (long long i = 0; i <= n; ++i) {
          const PointSet cuts = power(t, i).breakpoints();
          for (const auto& b : cuts.points()) CHECK(!(iv.lo() < b && b < iv.hi()));
        }
      }
      CHECK(total == ExactScalar(1));
    }
  }
}

TEST_CASE("classify pairs: labels re-check by iteration") {
  for (const auto& name : testsupport::minimal_corpus()) {
    const IET t = testsupport::load(name);
    const auto& disc = t.discontinuities().points();
    for (long long n : {0LL, 3LL, 20LL}) {
      const auto classes = classify_pairs(backward_partition(t, n), t);
      for (const auto& pc : classes) {
        ExactScalar m;
        for (const auto& mem : pc.members) {
          m += mem.interval.length();
          if (pc.delta_index == EndpointLabel::kBoundary) {
            CHECK(mem.interval.lo().is_zero());
          } else {
            CHECK(pc.delta == disc[static_cast<std::size_t>(pc.delta_index)]);
            CHECK(forward(t, mem.interval.lo(), mem.left_steps) == pc.delta);
          }
          if (pc.delta_prime_index == EndpointLabel::kBoundary) {
            CHECK(mem.interval.hi() == ExactScalar(1));
          } else {
            CHECK(forward_left(t, mem.interval.hi(), mem.right_steps) == pc.delta_prime);
          }
        }
        CHECK(m == pc.total_measure);
      }
    }
  }
}

TEST_CASE("classify pairs examples") {
  CHECK(classify_pairs(backward_partition(testsupport::load("identity"), 5), testsupport::load("identity"))
            .empty());

  // d = 2: every interior element carries (delta, delta); the plain class
  // falls short of measure 1 by the two boundary elements.
  const IET g = testsupport::load("golden");
  const BackwardPartition bp = backward_partition(g, 40);
  const auto classes = classify_pairs(bp, g);
  ExactScalar plain, boundary_len;
  for (const auto& pc : classes) {
    if (pc.delta_index == 0 && pc.delta_prime_index == 0) plain = pc.total_measure;
  }
  boundary_len = bp.elements.front().interval.length() + bp.elements.back().interval.length();
  CHECK(plain == ExactScalar(1) - boundary_len);
  CHECK(plain > F(9, 10));
  const PairClass best = find_sizable_pair(classes, 2);
  CHECK(best.extended);
  CHECK(best.total_measure == ExactScalar(1));

  // 3-IET (1/4,1/4,1/2), perm (3,2,1), n = 0: only [1/4,1/2) is bounded by
  // two discontinuities.
  const IET t3 = make_iet({F(1, 4), F(1, 4), F(1, 2)}, {3, 2, 1});
  const auto c3 = classify_pairs(backward_partition(t3, 0), t3);
  bool found = false;
  for (const auto& pc : c3) {
    if (pc.delta_index == EndpointLabel::kBoundary || pc.delta_prime_index == EndpointLabel::kBoundary) continue;
    CHECK(pc.delta == F(1, 4));
    CHECK(pc.delta_prime == F(1, 2));
    REQUIRE(pc.members.size() == 1);
    CHECK(pc.members[0].interval == Interval(F(1, 4), F(1, 2)));
    CHECK(pc.members[0].left_steps == 0);
    CHECK(pc.members[0].right_steps == 0);
    found = true;
  }
  CHECK(found);
}

TEST_CASE("find sizable pair on synthetic classes") {
  auto make = [](int l, int r, ExactScalar m) {
    PairClass pc{l, r, F(l + 1, 10), F(r + 1, 10), {}, m, false};
    pc.members.push_back(ClassMember{Interval(ExactScalar(0), m), 0, 0});
    return pc;
  };
  const std::vector<PairClass> classes{make(0, 1, F(1, 5)), make(1, 0, F(1, 3)), make(1, 1, F(1, 2))};
  CHECK(sizable_threshold(3) == F(1, 4));
  const PairClass best = find_sizable_pair(classes, 3);
  CHECK(best.total_measure == F(1, 2));
  CHECK(sizable_pairs(classes, 3).size() == 2);
  const std::vector<PairClass> small{make(0, 1, F(1, 5)), make(1, 0, F(1, 6))};
  CHECK_THROWS_AS(find_sizable_pair(small, 3), VerificationError);
  CHECK_THROWS_AS(sizable_threshold(1), PreconditionError);
}

TEST_CASE("n0 for density") {
  const IET g = testsupport::load("golden");
  CHECK(n0_for_density(g, ExactScalar(2), 100) == 0);
  const long long n0 = n0_for_density(g, F(1, 10), 1000);
  CHECK(n0 == n0_oracle(g, F(1, 10)));
  CHECK(n0 % 2 == 0);
  CHECK(n0 >= 20);
  CHECK(n0 <= 32);
  CHECK_THROWS_AS(n0_for_density(testsupport::load("identity"), F(1, 10), 100), PreconditionError);
  CHECK_THROWS_AS(n0_for_density(g, F(1, 1000), 10), PreconditionError);
  CHECK_THROWS_AS(n0_for_density(g, ExactScalar(0), 10), PreconditionError);

  for (const auto& name : testsupport::minimal_corpus()) {
    const IET t = testsupport::load(name);
    long long prev = -1;
    // eps grows, n0 must not
    for (long long den : {200LL, 100LL, 60LL, 30LL, 12LL, 5LL, 2LL}) {
      const long long v = n0_for_density(t, F(1, den), 100000);
      CHECK(v == n0_oracle(t, F(1, den)));
      if (prev >= 0) CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("dichotomy: near-rational rotation gives a close return") {
  // alpha = 1/100 + sqrt(2)/10^7; T^100 is within 1.5e-5 of the identity
  const ExactScalar alpha = F(1, 100) + ExactScalar::sqrt(2) / ExactScalar(10000000);
  const IET t = rotation(alpha);
  const long long n = 500;
  const PairClass pc = find_sizable_pair(classify_pairs(backward_partition(t, n), t), 2);
  const DichotomyOutcome out = sizable_dichotomy(t, pc, n);
  REQUIRE(std::holds_alternative<PossibilityII>(out));
  const PossibilityII p2 = std::get<PossibilityII>(out);
  CHECK(p2.k == 100);
  CHECK(p2.drift.sign() > 0);
  CHECK(p2.drift < sizable_length(2, n));
  // exact oracle: the drift is the k-step shift of the rotation mod 1
  const ExactScalar shift = alpha * ExactScalar(100) - ExactScalar(1);
  CHECK(abs(p2.drift) == abs(shift));

  const RigidityCertificate c = possibility2_construct(t, pc, p2, n, F(1, 10));
  const long long N = n / (2 * p2.k);
  CHECK(c.k == N * p2.k);
  CHECK(c.branch == "possibility-2");
  // Translation law, checked pointwise: T^{ik} x = x + i * drift on each member used
  for (const auto& piece : c.pieces) {
    for (long long i = 0; i <= N; ++i) {
      const ExactScalar x = piece.piece.lo();
      CHECK(abs(forward(t, x, i * p2.k) - x) == ExactScalar(i) * abs(shift));
    }
  }
  CHECK(c.A.measure() > F(9, 10));
  CHECK(verify_certificate(c, 300).ok);

  PossibilityII bad = p2;
  bad.drift = sizable_length(2, n);
  CHECK_THROWS_AS(possibility2_construct(t, pc, bad, n, F(1, 10)), PreconditionError);
  // members longer than eps are outside the construction
  CHECK_THROWS_AS(possibility2_construct(t, pc, p2, n, F(1, 1000)), PreconditionError);
}

TEST_CASE("dichotomy: golden rotation takes the tower branch") {
  const IET g = testsupport::load("golden");
  const long long n = 200;
  const PairClass pc = find_sizable_pair(classify_pairs(backward_partition(g, n), g), 2);
  const DichotomyOutcome out = sizable_dichotomy(g, pc, n);
  REQUIRE(std::holds_alternative<PossibilityI>(out));
  const PossibilityI p1 = std::get<PossibilityI>(out);
  CHECK(p1.probe.length() == sizable_length(2, n));
  CHECK(p1.J.lo() == p1.probe.lo());
  CHECK(p1.J.length() >= p1.probe.length());
  // exact scan: T^i J misses J for 0 < i < n/2
  for (long long i = 1; 2 * i < n; ++i) {
    CHECK(intersect(power(g, i).image(IntervalSet(p1.J)), IntervalSet(p1.J)).empty());
  }
  CHECK_THROWS_AS(sizable_dichotomy(g, pc, n, 1000), PreconditionError);
}

TEST_CASE("easy rig tower") {
  const ExactScalar omega = ExactScalar::sqrt(2) / ExactScalar(1000);
  const IET t = rotation(F(1, 4) + omega);
  const Interval J(ExactScalar(0), F(1, 8));
  const Tower tw = easy_rig_tower(t, J, 3);
  CHECK(tw.j == 4);
  CHECK(tw.j <= 16);
  CHECK(abs(tw.shift) <= J.length());
  const IntervalSet floor0(tw.base);
  const IntervalSet floor1 = t.map().image(floor0);
  CHECK(intersect(floor0, floor1).empty());
  CHECK(tw.A == unite(floor0, floor1));
  CHECK(tw.A.measure() == tw.base.length() * ExactScalar(2));
  CHECK(tw.base.length() >= J.length() / ExactScalar(8));
  // every floor shifts by the same amount after j steps
  Gen g(51);
  for (int i = 0; i < 200; ++i) {
    const ExactScalar x = g.point_in(tw.A.parts()[static_cast<std::size_t>(g.integer(0, static_cast<long long>(tw.A.size()) - 1))]);
    CHECK(forward(t, x, tw.j) - x == tw.shift);
  }

  const Tower flat = easy_rig_tower(t, J, 2);
  CHECK(flat.A == IntervalSet(flat.base));

  CHECK_THROWS_AS(easy_rig_tower(t, J, 1), PreconditionError);
  // J too long: T J meets J
  CHECK_THROWS_AS(easy_rig_tower(t, Interval(ExactScalar(0), F(1, 2)), 3), PreconditionError);
}

TEST_CASE("k range and measure bound") {
  CHECK(measure_bound(2) == F(1, 3200000));
  CHECK(measure_bound(3) == F(1, 24300000));
  CHECK(k_in_range(13, 500, 2));
  CHECK(!k_in_range(12, 500, 2));
  CHECK(k_in_range(20000, 500, 2));
  CHECK(!k_in_range(20001, 500, 2));
  CHECK(k_in_range(9, 500, 3));
  CHECK(!k_in_range(8, 500, 3));
}

TEST_CASE("make certificate rejects bad data") {
  const IET g = testsupport::load("golden");
  const IntervalSet A(Interval(ExactScalar(0), F(1, 10)));
  CHECK_THROWS_AS(make_certificate(g, 500, F(1, 10), 1, A, "test"), KRangeError);
  // T^20 moves everything by about 0.36
  CHECK_THROWS_AS(make_certificate(g, 500, F(1, 10), 20, A, "test"), VerificationError);
  CHECK_THROWS_AS(make_certificate(g, 500, F(1, 10), 377, IntervalSet(), "test"), VerificationError);
  const RigidityCertificate ok = make_certificate(g, 500, F(1, 10), 377, A, "test");
  CHECK(ok.k == 377);
  const VerificationReport rep = verify_certificate(ok);
  for (const auto& f : rep.failures) MESSAGE(f);
  CHECK(rep.ok);
}

TEST_CASE("certify rigidity examples") {
  Gen g(52);
  const IET golden = testsupport::load("golden");
  const RigidityCertificate c = certify_rigidity(golden, F(1, 10), 500);
  CHECK(k_in_range(c.k, 500, 2));
  CHECK(c.k * 40 >= 500);
  CHECK(c.k <= 40 * 500);
  CHECK(c.A.measure() > F(1, 3200000));
  CHECK(c.minimality_depth == 500);
  CHECK(c.details.at("n0") == std::to_string(n0_for_density(golden, F(1, 10), 500)));
  replay(c, g, 1000);

  const IET t3 = testsupport::load("iet3_sqrt2");
  const RigidityCertificate c3 = certify_rigidity(t3, F(1, 10), 500);
  CHECK(k_in_range(c3.k, 500, 3));
  CHECK(c3.k * 60 >= 500);
  CHECK(c3.k <= 60 * 500);
  CHECK(c3.A.measure() > F(1, 24300000));
  replay(c3, g, 1000);

  CHECK_THROWS_AS(certify_rigidity(testsupport::load("rotation_1_3"), F(1, 10), 500), PreconditionError);
  CHECK_THROWS_AS(certify_rigidity(testsupport::load("identity"), F(1, 10), 500), PreconditionError);
  // n below n0
  CHECK_THROWS_AS(certify_rigidity(golden, F(1, 10), 10), PreconditionError);
  CHECK_THROWS_AS(certify_rigidity(golden, ExactScalar(0), 500), PreconditionError);
}

TEST_CASE("certificate soundness across the minimal corpus") {
  Gen g(53);
  for (const auto& name : testsupport::minimal_corpus()) {
    const IET t = testsupport::load(name);
    for (long long n : {60LL, 150LL, 400LL}) {
      for (const ExactScalar& eps : {F(1, 10), F(1, 4)}) {
        if (n < n0_for_density(t, eps, 100000)) continue;
        const RigidityCertificate c = certify_rigidity(t, eps, n);
        CHECK(k_in_range(c.k, n, t.d()));
        CHECK(c.A.measure() > measure_bound(t.d()));
        ExactScalar tiled;
        for (const auto& p : c.pieces) {
          tiled += p.piece.length();
          CHECK(abs(p.displacement) < eps);
          CHECK(forward(t, p.piece.lo(), c.k) - p.piece.lo() == p.displacement);
        }
        CHECK(tiled == c.A.measure());
        const VerificationReport rep = verify_certificate(c, 200, 7);
        CHECK(rep.ok);
        replay(c, g, 100);
      }
    }
  }
}

TEST_CASE("verifier on arbitrary piece tables") {
  Gen g(54);
  for (int trial = 0; trial < 150; ++trial) {
    const IET t = trial % 3 ? g.rational_iet(static_cast<int>(g.integer(2, 5)), 60)
                            : testsupport::load(testsupport::minimal_corpus()[trial % 5]);
    const long long k = g.integer(1, 40);
    const IntervalSet A = g.interval_set(4, 128);
    if (A.empty()) continue;
    // the pieces of T^k inside A, with their true displacements
    RigidityCertificate c{t, k, ExactScalar(2), k, A, {}, "table", 0, {}};
    const PiecewiseTranslation pk = power(t, k);
    for (const auto& part : A.parts()) {
      ExactScalar lo = part.lo();
      while (lo < part.hi()) {
        const std::size_t i = pk.piece_index(lo);
        const ExactScalar hi = min(pk.piece_end(i), part.hi());
        c.pieces.push_back({Interval(lo, hi), pk.shifts()[i]});
        lo = hi;
      }
    }
    if (!(A.measure() > measure_bound(t.d()))) continue;
    CHECK(verify_certificate(c, 20, 3).ok);
    // merging two neighbours with different shifts must be caught
    RigidityCertificate bad = c;
    const std::size_t j = static_cast<std::size_t>(g.integer(0, static_cast<long long>(c.pieces.size()) - 1));
    bad.pieces[j].displacement += F(1, 1000);
    CHECK(!verify_certificate(bad, 0).ok);
  }
}

TEST_CASE("verifier catches tampering with pipeline certificates") {
  const RigidityCertificate c = certify_rigidity(testsupport::load("iet3_sqrt2"), F(1, 10), 300);
  REQUIRE(verify_certificate(c, 100).ok);
  RigidityCertificate k = c;
  k.k += 1;
  CHECK(!verify_certificate(k, 0).ok);
  RigidityCertificate d = c;
  d.pieces.back().displacement = -d.pieces.back().displacement;
  const VerificationReport r = verify_certificate(d, 0);
  CHECK(!r.ok);
  CHECK(r.failures.front().find("recorded") != std::string::npos);
  RigidityCertificate a = c;
  a.pieces.pop_back();
  CHECK(!verify_certificate(a, 0).ok);
  RigidityCertificate e = c;
  e.epsilon = F(1, 1000000);
  CHECK(!verify_certificate(e, 0).ok);
}
