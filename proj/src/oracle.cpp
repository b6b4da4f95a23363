#include "nam/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace nam {

std::string bounded_status_name(BoundedStatus s) {
  switch (s) {
    case BoundedStatus::Unsafe: return "unsafe";
    case BoundedStatus::SafeAtBound: return "safe-at-bound";
    case BoundedStatus::BoundHit: return "bound-hit";
  }
  return "?";
}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<int>& c) const {
    std::size_t h = c.size();
    for (int x : c) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

// Plain register semantics; -1 is the initial value.
bool store_step(int& store, Letter l) {
  if (l == kEps) return true;
  Action a = decode(l);
  if (a.kind == Kind::Read) return store == a.value;
  store = a.value;
  return true;
}

bool is_hash_write(Letter l, int hash) {
  if (l == kEps) return false;
  Action a = decode(l);
  return a.role == Role::Contributor && a.kind != Kind::Read && a.value == hash;
}

void append_config(std::vector<int>& key, const Config& c) {
  key.push_back(static_cast<int>(c.size()));
  key.insert(key.end(), c.begin(), c.end());
}

// Step record used to rebuild process identities along a path of
// symmetric (sorted) global states.
struct Step {
  Letter label;
  int mover;  // -1 leader, otherwise index into the parent's sorted contributor list
  Config from;
  Config to;
};

ConcreteTrace assign_owners(const std::vector<Step>& steps, const Config& init, int spawn_limit) {
  ConcreteTrace t;
  std::vector<Config> procs;
  for (int i = 0; i < spawn_limit; ++i) procs.push_back(init);
  for (const auto& s : steps) {
    t.letters.push_back(s.label);
    if (s.mover < 0) {
      t.owner.push_back(-1);
      continue;
    }
    int id = -1;
    for (std::size_t i = 0; i < procs.size(); ++i)
      if (procs[i] == s.from) {
        id = static_cast<int>(i);
        break;
      }
    if (id < 0) {
      procs.push_back(s.from);
      id = static_cast<int>(procs.size()) - 1;
    }
    procs[id] = s.to;
    t.owner.push_back(id);
  }
  // Drop silent steps from the reported trace.
  ConcreteTrace out;
  for (std::size_t i = 0; i < t.letters.size(); ++i)
    if (t.letters[i] != kEps) {
      out.letters.push_back(t.letters[i]);
      out.owner.push_back(t.owner[i]);
    }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ExploreResult explore_bounded(const Network& net, int k, int depth, const ExploreOptions& opt) {
  if (k < 1 || depth < 1) throw std::invalid_argument("explore_bounded needs k >= 1 and depth >= 1");
  Process leader(net.leader, opt.limits), contrib(net.contributor, opt.limits);
  const int hash = net.hash();
  struct State {
    int store;
    Config leader;
    std::vector<Config> contribs;
  };
  struct Node {
    int parent;
    Step step;
    int depth;
  };
  std::vector<State> states;
  std::vector<Node> nodes;
  std::unordered_map<std::vector<int>, int, VecHash> index;
  auto key_of = [](const State& s) {
    std::vector<int> key{s.store};
    append_config(key, s.leader);
    for (const auto& c : s.contribs) append_config(key, c);
    return key;
  };
  ExploreResult res;
  bool capped = false;
  auto add = [&](State s, int parent, Step step, int d) {
    std::sort(s.contribs.begin(), s.contribs.end());
    auto key = key_of(s);
    if (index.count(key)) return;
    if (states.size() >= opt.state_cap) throw ResourceError("explore_bounded exceeded the state cap");
    index.emplace(std::move(key), static_cast<int>(states.size()));
    states.push_back(std::move(s));
    nodes.push_back({parent, std::move(step), d});
  };
  auto witness = [&](int node, Step last) {
    std::vector<Step> steps{std::move(last)};
    for (int n = node; nodes[n].parent >= 0; n = nodes[n].parent) steps.push_back(nodes[n].step);
    std::reverse(steps.begin(), steps.end());
    return assign_owners(steps, contrib.initial(), k);
  };

  add(State{-1, leader.initial(), std::vector<Config>(k, contrib.initial())}, -1, Step{kEps, -1, {}, {}}, 0);
  std::vector<Move> buf;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (nodes[i].depth >= depth) continue;
    const State cur = states[i];
    const int d = nodes[i].depth + 1;
    buf.clear();
    leader.successors(cur.leader, buf, &capped);
    for (auto& mv : buf) {
      State n = cur;
      if (!store_step(n.store, mv.label)) continue;
      n.leader = mv.next;
      add(std::move(n), static_cast<int>(i), Step{mv.label, -1, {}, {}}, d);
    }
    for (std::size_t c = 0; c < cur.contribs.size(); ++c) {
      if (c > 0 && cur.contribs[c] == cur.contribs[c - 1]) continue;
      buf.clear();
      contrib.successors(cur.contribs[c], buf, &capped);
      for (auto& mv : buf) {
        State n = cur;
        if (!store_step(n.store, mv.label)) continue;
        Step step{mv.label, static_cast<int>(c), cur.contribs[c], mv.next};
        if (is_hash_write(mv.label, hash)) {
          res.status = BoundedStatus::Unsafe;
          res.witness = witness(static_cast<int>(i), std::move(step));
          res.states = states.size();
          return res;
        }
        n.contribs[c] = mv.next;
        add(std::move(n), static_cast<int>(i), std::move(step), d);
      }
    }
  }
  res.states = states.size();
  res.status = capped ? BoundedStatus::BoundHit : BoundedStatus::SafeAtBound;
  return res;
}

// ---------------------------------------------------------------------------

SaturationResult saturate_fsm(const Network& net) {
  if (net.leader.kind != MachineKind::Fsm || net.contributor.kind != MachineKind::Fsm)
    throw std::invalid_argument("saturation needs FSM leader and contributor");
  const Fsa& d = net.leader.fsm;
  const Fsa& c = net.contributor.fsm;
  const int hash = net.hash();
  const int nc = c.num_states;
  const int words = (nc + 63) / 64;
  auto dadj = d.adjacency();
  auto cadj = c.adjacency();
  std::vector<char> danger(nc, 0);
  for (const auto& e : c.edges)
    if (is_hash_write(e.label, hash)) danger[e.from] = 1;

  using Bits = std::vector<std::uint64_t>;
  struct Abs {
    int q;
    int g;
    Bits s;
    int parent;
    Letter label;
  };
  std::vector<Abs> states;
  std::map<std::pair<int, int>, std::vector<int>> maximal;  // (q, g) -> ids of maximal sets
  auto subset = [&](const Bits& a, const Bits& b) {
    for (int i = 0; i < words; ++i)
      if ((a[i] & ~b[i]) != 0) return false;
    return true;
  };
  auto has = [](const Bits& s, int x) { return (s[x / 64] >> (x % 64)) & 1u; };
  SaturationResult res;
  std::deque<int> queue;
  auto path_to = [&](int id, Letter last) {
    Word w{last};
    for (int n = id; states[n].parent >= 0; n = states[n].parent)
      if (states[n].label != kEps) w.push_back(states[n].label);
    std::reverse(w.begin(), w.end());
    return w;
  };
  auto add = [&](int q, int g, Bits s, int parent, Letter label) {
    auto& list = maximal[{q, g}];
    for (int id : list)
      if (subset(s, states[id].s)) return;
    list.erase(std::remove_if(list.begin(), list.end(), [&](int id) { return subset(states[id].s, s); }), list.end());
    int id = static_cast<int>(states.size());
    states.push_back({q, g, std::move(s), parent, label});
    list.push_back(id);
    queue.push_back(id);
  };
  Bits init(words, 0);
  init[c.init / 64] |= 1ULL << (c.init % 64);
  add(d.init, -1, init, -1, kEps);
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    // Skip states that a superset replaced after they were queued.
    const auto& list = maximal[{states[id].q, states[id].g}];
    if (std::find(list.begin(), list.end(), id) == list.end()) continue;
    const Abs cur = states[id];
    for (int x = 0; x < nc; ++x) {
      if (!has(cur.s, x)) continue;
      if (danger[x]) {
        res.unsafe = true;
        res.states = states.size();
        res.abstract_path = path_to(id, wc(hash));
        return res;
      }
    }
    for (auto [l, t] : dadj[cur.q]) {
      int g = cur.g;
      if (!store_step(g, l)) continue;
      add(t, g, cur.s, id, l);
    }
    for (int x = 0; x < nc; ++x) {
      if (!has(cur.s, x)) continue;
      for (auto [l, t] : cadj[x]) {
        int g = cur.g;
        if (!store_step(g, l)) continue;
        if (g == cur.g && has(cur.s, t)) continue;
        Bits s = cur.s;
        s[t / 64] |= 1ULL << (t % 64);
        add(cur.q, g, std::move(s), id, l);
      }
    }
  }
  res.states = states.size();
  return res;
}

// ---------------------------------------------------------------------------

CompatResult check_compatibility(const Word& u, const std::vector<Word>& m, int nvalues, const std::vector<int>* tau) {
  if (nvalues > 30) throw ResourceError("compatibility check supports at most 30 values");
  const std::size_t nm = m.size();
  struct St {
    int pu;
    std::vector<int> pos;
    int value;
    unsigned record;
    bool useless;
    int progress;
  };
  std::unordered_set<std::vector<int>, VecHash> dead;
  CompatResult res;
  const int need = tau ? static_cast<int>(tau->size()) : 0;

  // Extended-store step; returns false when blocked.
  auto step = [&](St& s, Letter l) {
    Action a = decode(l);
    unsigned bit = 1u << a.value;
    switch (a.kind) {
      case Kind::Read:
        if (s.value != a.value || s.useless) return false;
        return true;
      case Kind::Write:
        if (a.role == Role::Contributor && !(s.record & bit)) return false;
        s.value = a.value;
        s.useless = false;
        return true;
      case Kind::FirstWrite:
        if (s.record & bit) return false;
        if (tau && (s.progress >= need || (*tau)[s.progress] != a.value)) return false;
        s.record |= bit;
        s.value = a.value;
        s.useless = false;
        ++s.progress;
        return true;
      case Kind::UselessWrite:
        if (!(s.record & bit)) return false;
        s.value = a.value;
        s.useless = true;
        return true;
    }
    return false;
  };
  auto key_of = [](const St& s) {
    std::vector<int> k{s.pu, s.value, static_cast<int>(s.record), s.useless ? 1 : 0, s.progress};
    k.insert(k.end(), s.pos.begin(), s.pos.end());
    return k;
  };
  std::function<bool(St&)> dfs = [&](St& s) -> bool {
    bool done = s.pu == static_cast<int>(u.size());
    for (std::size_t i = 0; i < nm && done; ++i) done = s.pos[i] == static_cast<int>(m[i].size());
    if (done) return !tau || s.progress == need;
    auto key = key_of(s);
    if (dead.count(key)) return false;
    auto try_letter = [&](Letter l, int who) {
      St n = s;
      if (!step(n, l)) return false;
      if (who < 0) ++n.pu;
      else ++n.pos[who];
      res.interleaving.push_back(l);
      res.owner.push_back(who);
      if (dfs(n)) return true;
      res.interleaving.pop_back();
      res.owner.pop_back();
      return false;
    };
    if (s.pu < static_cast<int>(u.size()) && try_letter(u[s.pu], -1)) return true;
    for (std::size_t i = 0; i < nm; ++i) {
      if (s.pos[i] >= static_cast<int>(m[i].size())) continue;
      // Identical words at identical positions are interchangeable.
      bool dup = false;
      for (std::size_t j = 0; j < i && !dup; ++j) dup = s.pos[j] == s.pos[i] && m[j] == m[i];
      if (dup) continue;
      if (try_letter(m[i][s.pos[i]], static_cast<int>(i))) return true;
    }
    dead.insert(std::move(key));
    return false;
  };
  St start{0, std::vector<int>(nm, 0), -1, 0u, false, 0};
  res.compatible = dfs(start);
  if (!res.compatible) {
    res.interleaving.clear();
    res.owner.clear();
  }
  return res;
}

// ---------------------------------------------------------------------------

BoundedOracleResult bounded_safety_oracle(const Network& net, int k, const BoundedOracleOptions& opt) {
  BoundedOracleResult res;
  if (k <= 0) return res;
  Process leader(net.leader, opt.limits), contrib(net.contributor, opt.limits);
  const int hash = net.hash();
  bool capped = false;
  std::unordered_map<Config, std::vector<Move>, VecHash> lcache, ccache;
  auto moves = [&](const Process& p, auto& cache, const Config& c) -> const std::vector<Move>& {
    auto it = cache.find(c);
    if (it == cache.end()) it = cache.emplace(c, p.register_moves(c, &capped)).first;
    return it->second;
  };
  // A contributor entry: {ops, config...}.
  struct State {
    int store;
    int lops;
    Config leader;
    std::vector<std::vector<int>> contribs;
  };
  struct Node {
    int parent;
    Step step;
  };
  std::vector<State> states;
  std::vector<Node> nodes;
  std::unordered_map<std::vector<int>, int, VecHash> index;
  auto add = [&](State s, int parent, Step step) {
    std::sort(s.contribs.begin(), s.contribs.end());
    std::vector<int> key{s.store, s.lops};
    append_config(key, s.leader);
    for (const auto& c : s.contribs) append_config(key, c);
    if (index.count(key)) return;
    if (states.size() >= opt.state_cap) throw ResourceError("bounded oracle exceeded the state cap");
    index.emplace(std::move(key), static_cast<int>(states.size()));
    res.max_population = std::max(res.max_population, static_cast<int>(s.contribs.size()));
    states.push_back(std::move(s));
    nodes.push_back({parent, std::move(step)});
  };
  auto entry = [](int ops, const Config& c) {
    std::vector<int> e{ops};
    e.insert(e.end(), c.begin(), c.end());
    return e;
  };
  auto finish = [&](int node, Step last) {
    std::vector<Step> steps{std::move(last)};
    for (int n = node; nodes[n].parent >= 0; n = nodes[n].parent) steps.push_back(nodes[n].step);
    std::reverse(steps.begin(), steps.end());
    res.unsafe = true;
    res.witness = assign_owners(steps, entry(0, contrib.initial()), 0);
    res.states = states.size();
  };

  add(State{-1, 0, leader.initial(), {}}, -1, Step{kEps, -1, {}, {}});
  const Config cinit = contrib.initial();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State cur = states[i];
    if (cur.lops < k) {
      for (const auto& mv : moves(leader, lcache, cur.leader)) {
        State n = cur;
        if (!store_step(n.store, mv.label)) continue;
        n.leader = mv.next;
        ++n.lops;
        add(std::move(n), static_cast<int>(i), Step{mv.label, -1, {}, {}});
      }
    }
    // Existing contributors, then a freshly spawned one.
    const int existing = static_cast<int>(cur.contribs.size());
    for (int c = 0; c <= existing; ++c) {
      if (c < existing && c > 0 && cur.contribs[c] == cur.contribs[c - 1]) continue;
      std::vector<int> from = c < existing ? cur.contribs[c] : entry(0, cinit);
      Config cfg(from.begin() + 1, from.end());
      for (const auto& mv : moves(contrib, ccache, cfg)) {
        State n = cur;
        if (!store_step(n.store, mv.label)) continue;
        std::vector<int> to = entry(from[0] + 1, mv.next);
        Step step{mv.label, c, from, to};
        if (is_hash_write(mv.label, hash)) {
          finish(static_cast<int>(i), std::move(step));
          res.incomplete = capped;
          return res;
        }
        if (c == existing) {
          if (existing >= opt.population_cap) {
            res.incomplete = true;
            continue;
          }
          n.contribs.push_back(to);
        } else {
          n.contribs[c] = to;
        }
        // A contributor out of operations can never act again.
        if (to[0] >= k) n.contribs.erase(std::find(n.contribs.begin(), n.contribs.end(), to));
        add(std::move(n), static_cast<int>(i), std::move(step));
      }
    }
  }
  res.states = states.size();
  res.incomplete = res.incomplete || capped;
  return res;
}

}  // namespace nam
