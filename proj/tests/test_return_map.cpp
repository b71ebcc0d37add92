#include <doctest.h>

#include "ietlab/error.hpp"
#include "ietlab/return_map.hpp"
#include "support.hpp"

using namespace ietlab;
using testsupport::Gen;

namespace {

ExactScalar F(long long a, long long b) { return ExactScalar::fraction(a, b); }
ExactScalar S(const char* s) { return ExactScalar::parse(s); }

// First return by plain iteration.
std::pair<long long, ExactScalar> brute_return(const IET& t, const Interval& base, const ExactScalar& x,
                                               long long cap) {
  ExactScalar y = x;
  for (long long i = 1; i <= cap; ++i) {
    y = t.apply(y);
    if (base.contains(y)) return {i, y - x};
  }
  return {-1, ExactScalar()};
}

const ReturnPiece& piece_at(const ReturnSystem& rs, const ExactScalar& x) {
  for (const auto& p : rs.pieces)
    if (p.piece.contains(x)) return p;
  FAIL("point not covered");
  return rs.pieces.front();
}

void check_against_iteration(const IET& t, const ReturnSystem& rs, Gen& g, int points) {
  long long cap = 0;
  for (const auto& p : rs.pieces) cap = std::max(cap, p.return_time);
  for (int i = 0; i < points; ++i) {
    const ExactScalar x = g.point_in(rs.base);
    const auto [r, shift] = brute_return(t, rs.base, x, cap + 1);
    const ReturnPiece& p = piece_at(rs, x);
    CHECK(r == p.return_time);
    CHECK(shift == p.translation);
  }
  // piece endpoints are where the return data can change, so test them too
  for (const auto& p : rs.pieces) {
    const auto [r, shift] = brute_return(t, rs.base, p.piece.lo(), cap + 1);
    CHECK(r == p.return_time);
    CHECK(shift == p.translation);
  }
}

}  // namespace

TEST_CASE("rotation by 1/4 returns to [0,1/4) rigidly") {
  const IET r4 = testsupport::load("rotation_1_4");
  const ReturnSystem rs = first_return(r4, Interval(ExactScalar(0), F(1, 4)));
  REQUIRE(rs.pieces.size() == 1);
  CHECK(rs.pieces[0].return_time == 4);
  CHECK(rs.pieces[0].translation.is_zero());
  CHECK(rs.induced() == make_iet({ExactScalar(1)}, {1}));
  const auto h = return_time_histogram(rs);
  REQUIRE(h.size() == 1);
  CHECK(h[0] == std::pair<long long, ExactScalar>{4, F(1, 4)});
}

TEST_CASE("golden rotation returns in 2 and 3 steps") {
  const IET g = testsupport::load("golden");
  const ExactScalar alpha = S("3/2-1/2*sqrt(5)");
  const ReturnSystem rs = first_return(g, Interval(ExactScalar(0), alpha));
  REQUIRE(rs.pieces.size() == 2);
  // [0, 1-2a) needs three steps, the rest two
  CHECK(rs.pieces[0].piece == Interval(ExactScalar(0), ExactScalar(1) - alpha * ExactScalar(2)));
  CHECK(rs.pieces[0].return_time == 3);
  CHECK(rs.pieces[1].return_time == 2);
  const IET ind = rs.induced();
  CHECK(ind.d() == 2);
  CHECK(ind.perm() == std::vector<int>{2, 1});
  const auto h = return_time_histogram(rs);
  REQUIRE(h.size() == 2);
  CHECK(h[0].first == 2);
  CHECK(h[1].first == 3);
  CHECK(h[0].second + h[1].second == alpha);
  Gen gen(3);
  check_against_iteration(g, rs, gen, 400);
}

TEST_CASE("identity returns in one step") {
  const IET id = testsupport::load("identity");
  const ReturnSystem rs = first_return(id, Interval(ExactScalar(0), F(1, 2)), 10);
  REQUIRE(rs.pieces.size() == 1);
  CHECK(rs.pieces[0].return_time == 1);
  CHECK(return_time_histogram(rs) == std::vector<std::pair<long long, ExactScalar>>{{1, F(1, 2)}});
}

TEST_CASE("step cap exceeded reports the remainder") {
  const IET r3 = testsupport::load("rotation_1_3");
  const Interval base(ExactScalar(0), F(1, 10));
  CHECK_THROWS_AS(first_return(r3, base, 2), PreconditionError);
  const PartialReturn pr = first_return_partial(r3, base, 2);
  CHECK(pr.uncovered == IntervalSet(base));
  CHECK(pr.system.pieces.empty());
  CHECK_THROWS_AS(pr.system.induced(), PreconditionError);
  CHECK_THROWS_AS(first_return_partial(r3, base, 0), PreconditionError);
  CHECK(first_return(r3, base, 3).pieces.size() == 1);
}

TEST_CASE("default step cap") {
  const IET g = testsupport::load("golden");
  CHECK(default_step_cap(g, Interval(ExactScalar(0), F(1, 3))) == 12 + 8);
  CHECK(default_step_cap(g, Interval(ExactScalar(0), F(2, 7))) == 14 + 8);
}

TEST_CASE("return systems on minimal IETs: Kac, piece bound, iteration oracle") {
  Gen g(41);
  for (const auto& name : testsupport::minimal_corpus()) {
    const IET t = testsupport::load(name);
    for (int trial = 0; trial < 25; ++trial) {
      const Interval base = g.rational_interval(trial < 12 ? 16 : 300);
      const ReturnSystem rs = first_return(t, base, 100000);
      CHECK(rs.pieces.size() <= static_cast<std::size_t>(t.d() + 2));
      ExactScalar kac, covered;
      for (const auto& p : rs.pieces) {
        kac += ExactScalar(p.return_time) * p.piece.length();
        covered += p.piece.length();
        CHECK(base.contains(p.piece.lo() + p.translation));
      }
      CHECK(kac == ExactScalar(1));
      CHECK(covered == base.length());
      for (std::size_t i = 1; i < rs.pieces.size(); ++i)
        CHECK(rs.pieces[i - 1].piece.hi() == rs.pieces[i].piece.lo());
      // images of the pieces tile the base as well
      IntervalSet images;
      for (const auto& p : rs.pieces)
        images = unite(images, IntervalSet(Interval(p.piece.lo() + p.translation, p.piece.hi() + p.translation)));
      CHECK(images == IntervalSet(base));
      check_against_iteration(t, rs, g, 20);
    }
  }
}

TEST_CASE("induced map matches first returns after rescaling") {
  Gen g(42);
  for (const auto& name : testsupport::minimal_corpus()) {
    const IET t = testsupport::load(name);
    for (int trial = 0; trial < 10; ++trial) {
      const Interval base = g.rational_interval(40);
      const ReturnSystem rs = first_return(t, base, 100000);
      const IET ind = rs.induced();
      const ExactScalar len = base.length();
      for (int i = 0; i < 30; ++i) {
        const ExactScalar x = g.point_in(base);
        const ExactScalar y = x + piece_at(rs, x).translation;
        CHECK(ind.apply((x - base.lo()) / len) == (y - base.lo()) / len);
      }
      const IntervalSet probe = g.interval_set(3, 64);
      CHECK(ind.map().image(probe).measure() == probe.measure());
    }
  }
}
