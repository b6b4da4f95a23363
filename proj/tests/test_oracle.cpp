#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>
#include <tuple>

#include "nam/oracle.hpp"
#include "nam/store.hpp"
#include "support.hpp"

using namespace nam;

namespace {

Machine fsm_from(int states, const std::vector<std::tuple<int, std::string, int>>& edges, ValueTable& values,
                 Role role) {
  std::ostringstream text;
  text << "fsm\nstates";
  for (int i = 0; i < states; ++i) text << " s" << i;
  text << "\ninit s0\n";
  for (const auto& [a, l, b] : edges) text << 's' << a << ' ' << l << " s" << b << '\n';
  return parse_machine(text.str(), values, role);
}

Network net_of(int ds, const std::vector<std::tuple<int, std::string, int>>& de, int cs,
               const std::vector<std::tuple<int, std::string, int>>& ce) {
  ValueTable values;
  Machine d = fsm_from(ds, de, values, Role::Leader);
  Machine c = fsm_from(cs, ce, values, Role::Contributor);
  return make_network(d, c, values);
}

Network hash_writer() { return net_of(1, {}, 2, {{0, "w(#)", 1}}); }
Network reader_only() { return net_of(2, {{0, "w(g)", 1}}, 2, {{0, "r(g)", 1}, {1, "r(g)", 1}}); }
Network read_then_hash() { return net_of(2, {{0, "w(g)", 1}}, 3, {{0, "r(g)", 1}, {1, "w(#)", 2}}); }

// Two contributors in different states are needed at the same time: one
// writes a and waits for b, the other turns a into b.
Network handshake() {
  return net_of(2, {{0, "w(go)", 1}}, 6,
                {{0, "r(go)", 1}, {1, "w(a)", 2}, {2, "r(b)", 3}, {3, "w(#)", 4}, {0, "r(a)", 5}, {5, "w(b)", 0}});
}

// Leader writes a; a contributor relays a into b; another reads b twice
// before writing #.
Network relay() {
  return net_of(2, {{0, "w(a)", 1}}, 6, {{0, "r(a)", 1}, {1, "w(b)", 2}, {0, "r(b)", 3}, {3, "r(b)", 4}, {4, "w(#)", 5}});
}

}  // namespace

TEST_CASE("bounded exploration examples") {
  auto r = explore_bounded(hash_writer(), 1, 1);
  CHECK(r.status == BoundedStatus::Unsafe);
  CHECK(explore_bounded(reader_only(), 3, 12).status == BoundedStatus::SafeAtBound);

  Network n = read_then_hash();
  CHECK(explore_bounded(n, 1, 2).status == BoundedStatus::SafeAtBound);
  auto w = explore_bounded(n, 1, 3);
  REQUIRE(w.status == BoundedStatus::Unsafe);
  const int g = n.values.find("g"), h = n.hash();
  CHECK(w.witness.letters == Word{wd(g), rc(g), wc(h)});
  CHECK(w.witness.owner == std::vector<int>{-1, 0, 0});
  CHECK(replay_concrete(n, w.witness).ok);
}

TEST_CASE("saturation examples") {
  CHECK(saturate_fsm(hash_writer()).unsafe);
  CHECK_FALSE(saturate_fsm(reader_only()).unsafe);
  auto s = saturate_fsm(read_then_hash());
  CHECK(s.unsafe);
  CHECK(s.abstract_path.back() == wc(read_then_hash().hash()));

  Network hs = handshake();
  CHECK(saturate_fsm(hs).unsafe);
  CHECK(explore_bounded(hs, 1, 12).status == BoundedStatus::SafeAtBound);
  CHECK(explore_bounded(hs, 2, 12).status == BoundedStatus::Unsafe);
}

TEST_CASE("bounded exploration reports stack truncation") {
  ValueTable values;
  Machine d = parse_machine("pdm\nstates p\nstack Z\ninit p Z\np Z eps p Z,Z\n", values, Role::Leader);
  Machine c = parse_machine("fsm\nstates a b\ninit a\na r(x) b\nb w(#) b\n", values, Role::Contributor);
  Machine d2 = parse_machine("pdm\nstates p\nstack Z\ninit p Z\np Z eps p Z,Z\np Z w(x) p Z\n", values, Role::Leader);
  ExploreOptions opt;
  opt.limits.stack_cap = 4;
  CHECK(explore_bounded(make_network(d2, c, values), 1, 12, opt).status == BoundedStatus::Unsafe);
  Network stuck = make_network(d, parse_machine("fsm\nstates a\ninit a\na r(x) a\n", values, Role::Contributor), values);
  CHECK(explore_bounded(stuck, 1, 12, opt).status == BoundedStatus::BoundHit);
}

TEST_CASE("bounded exploration is monotone and agrees with saturation") {
  int unsafe = 0, confirmed = 0;
  for (int seed = 0; seed < 300; ++seed) {
    std::mt19937_64 rng(20'000 + seed);
    Network net = gen_random_network(200'000 + seed, testkit::small_sizes(rng, 4, 2), false, false);
    const bool sat = saturate_fsm(net).unsafe;
    bool found = false;
    ExploreOptions opt;
    opt.state_cap = 300'000;
    BoundedStatus prev_k = BoundedStatus::SafeAtBound;
    for (int k = 1; k <= 4 && !found; ++k) {
      BoundedStatus prev_d = BoundedStatus::SafeAtBound;
      for (int depth : {4, 8, 12}) {
        BoundedStatus s;
        try {
          s = explore_bounded(net, k, depth, opt).status;
        } catch (const ResourceError&) {
          break;
        }
        if (prev_d == BoundedStatus::Unsafe) CHECK(s == BoundedStatus::Unsafe);
        prev_d = s;
        if (depth == 12) {
          if (prev_k == BoundedStatus::Unsafe) CHECK(s == BoundedStatus::Unsafe);
          prev_k = s;
        }
        found = found || s == BoundedStatus::Unsafe;
      }
    }
    if (found) CHECK(sat);
    unsafe += sat;
    confirmed += sat && found;
  }
  CHECK(unsafe > 0);
  CHECK(confirmed == unsafe);
}

TEST_CASE("compatibility examples") {
  const int g1 = 0, g2 = 1;
  auto r = check_compatibility({rd(g1)}, {{fc(g1), fc(g2)}}, 2);
  REQUIRE(r.compatible);
  CHECK(r.interleaving.size() == 3);
  CHECK(accepts(build_extended_store(2).fsa, r.interleaving));
  CHECK_FALSE(check_compatibility({rd(g1)}, {}, 2).compatible);
  CHECK_FALSE(check_compatibility({}, {{rc(g1)}}, 2).compatible);
  // Copycat extension of the example.
  auto c = check_compatibility({rd(g1)}, {{fc(g1), fc(g2)}, {wc(g1), wc(g2)}}, 2);
  CHECK(c.compatible);
  CHECK(accepts(build_extended_store(2).fsa, {fc(g1), wc(g1), rd(g1), fc(g2), wc(g2)}));
  // Following a first-write sequence.
  std::vector<int> t12{g1, g2}, t21{g2, g1};
  CHECK(check_compatibility({rd(g1)}, {{fc(g1), fc(g2)}}, 2, &t12).compatible);
  CHECK_FALSE(check_compatibility({rd(g1)}, {{fc(g1), fc(g2)}}, 2, &t21).compatible);
}

TEST_CASE("compatibility witnesses are interleavings of the inputs") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + i % 3;
    auto p = testkit::random_compatible(rng, n, 1 + i % 3, 2 + i % 9);
    auto r = check_compatibility(p.u, p.m, n);
    REQUIRE(r.compatible);
    CHECK(accepts(build_extended_store(n).fsa, r.interleaving));
    REQUIRE(r.owner.size() == r.interleaving.size());
    Word u;
    std::vector<Word> m(p.m.size());
    for (std::size_t j = 0; j < r.owner.size(); ++j)
      (r.owner[j] < 0 ? u : m[r.owner[j]]).push_back(r.interleaving[j]);
    CHECK(u == p.u);
    CHECK(m == p.m);
  }
}

TEST_CASE("bounded safety oracle examples") {
  CHECK_FALSE(bounded_safety_oracle(hash_writer(), 0).unsafe);
  auto one = bounded_safety_oracle(hash_writer(), 1);
  CHECK(one.unsafe);
  CHECK(replay_concrete(hash_writer(), one.witness).ok);
  CHECK_FALSE(bounded_safety_oracle(relay(), 2).unsafe);
  auto three = bounded_safety_oracle(relay(), 3);
  CHECK(three.unsafe);
  CHECK(replay_concrete(relay(), three.witness).ok);
}

TEST_CASE("bounded safety oracle is monotone in k") {
  for (int seed = 0; seed < 60; ++seed) {
    std::mt19937_64 rng(30'000 + seed);
    Network net = gen_random_network(300'000 + seed, testkit::small_sizes(rng, 3, 2), seed & 1, seed & 2);
    bool prev = false;
    for (int k = 0; k <= 3; ++k) {
      auto r = bounded_safety_oracle(net, k);
      if (prev && !r.incomplete) CHECK(r.unsafe);
      prev = prev || r.unsafe;
      if (r.unsafe) CHECK(replay_concrete(net, r.witness).ok);
    }
  }
}
