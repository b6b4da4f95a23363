#include "sim_search.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

namespace nam::detail {

namespace {

using Bits = std::vector<std::uint64_t>;

int words_for(int n) { return (n + 63) / 64; }
bool test(const Bits& b, int i) { return (b[i >> 6] >> (i & 63)) & 1u; }
void set_bit(Bits& b, int i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }
void reset_bit(Bits& b, int i) { b[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
void append_bits(std::string& s, const Bits& b) { s.append(reinterpret_cast<const char*>(b.data()), b.size() * 8); }

constexpr int kDead = -1;
constexpr int kDone = -2;

// One abstract configuration of store and simulators. A live simulator holds
// the set of contributor states it may occupy, closed under silent moves and
// the reads the register has offered since its last write. Useless writes are
// never observed, so they are folded into that set right before each write.
struct SimState {
  int value = -1;
  Bits recorded;
  std::vector<int> sim;  // interned state set, kDead or kDone
};

struct Event {
  Letter letter = kEps;
  int actor = -1;  // -1 leader, -2 copycat, otherwise the simulator's value
};

struct LeaderRule {
  int from, top;
  Letter label;
  int to;
  std::vector<int> push;  // at most two symbols
};

class Engine {
 public:
  Engine(const Pdm& leader, const Fsa& contributor, int n, int hash, std::size_t cap)
      : c_(contributor), n_(n), hash_(hash), cap_(cap), nw_(words_for(n)), cw_(words_for(contributor.num_states)) {
    prepare_contributor();
    prepare_leader(leader);
    empty_set_ = intern_set(Bits(cw_, 0));
    all_pairs_.assign(n_, 0);
    for (int g = 0; g < n_; ++g)
      for (int st = 0; st < c_.num_states; ++st) all_pairs_[g] |= pair_bit(g, st);
  }

  SimSearchResult run(bool want_witness);

 private:
  // Contributor analyses.
  void prepare_contributor() {
    const int m = c_.num_states;
    out_.assign(m, {});
    in_.assign(m, {});
    writes_of_.assign(n_, Bits(cw_, 0));
    for (const auto& e : c_.edges) {
      out_[e.from].push_back({e.label, e.to});
      in_[e.to].push_back({e.label, e.from});
      if (e.label != kEps && decode(e.label).kind == Kind::Write) set_bit(writes_of_[decode(e.label).value], e.from);
    }
  }

  // Closure under silent moves and either reads of `read_value` or, when
  // `recorded` is given, useless writes of recorded values other than g.
  Bits closure(Bits x, int read_value, const Bits* recorded = nullptr, int g = -1) const {
    std::vector<int> stack;
    for (int s = 0; s < c_.num_states; ++s)
      if (test(x, s)) stack.push_back(s);
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (auto [l, t] : out_[s]) {
        bool ok = l == kEps;
        if (!ok) {
          Action a = decode(l);
          if (recorded) ok = a.kind == Kind::Write && a.value != g && test(*recorded, a.value);
          else ok = a.kind == Kind::Read && a.value == read_value;
        }
        if (ok && !test(x, t)) {
          set_bit(x, t);
          stack.push_back(t);
        }
      }
    }
    return x;
  }

  // Edge usable by simulator g before its first write while the register can
  // still offer the values in `fw`; g itself may be read if the leader wrote it.
  static bool allowed(Letter l, int g, const Bits& fw) {
    if (l == kEps) return true;
    Action a = decode(l);
    if (a.value == g && a.kind == Kind::Write) return false;
    return test(fw, a.value);
  }

  struct Region {
    Bits live;     // states from which a write of g is reachable
    Bits touched;  // values read or overwritten inside the region
  };

  const Region& region(int g, int fw_id) {
    const std::uint64_t key = (static_cast<std::uint64_t>(g) << 32) | static_cast<std::uint32_t>(fw_id);
    auto it = regions_.find(key);
    if (it != regions_.end()) return it->second;
    const Bits& fw = value_sets_[fw_id];
    Region r{writes_of_[g], Bits(nw_, 0)};
    std::vector<int> stack;
    for (int s = 0; s < c_.num_states; ++s)
      if (test(r.live, s)) stack.push_back(s);
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (auto [l, p] : in_[s])
        if (allowed(l, g, fw) && !test(r.live, p)) {
          set_bit(r.live, p);
          stack.push_back(p);
        }
    }
    for (int s = 0; s < c_.num_states; ++s) {
      if (!test(r.live, s)) continue;
      for (auto [l, t] : out_[s])
        if (l != kEps && test(r.live, t) && allowed(l, g, fw)) set_bit(r.touched, decode(l).value);
    }
    return regions_.emplace(key, std::move(r)).first->second;
  }

  int intern_set(const Bits& x) {
    std::string key;
    append_bits(key, x);
    if (auto it = set_ids_.find(key); it != set_ids_.end()) return it->second;
    set_ids_.emplace(std::move(key), static_cast<int>(sets_.size()));
    sets_.push_back(x);
    return static_cast<int>(sets_.size()) - 1;
  }

  // Leader analyses.
  void prepare_leader(const Pdm& p) {
    num_controls_ = p.num_states;
    num_symbols_ = std::max(p.num_symbols, 1);
    empty_symbol_ = num_symbols_;
    for (const auto& r : p.rules) {
      if (r.push.size() <= 2) {
        rules_.push_back({r.from, r.top, r.label, r.to, r.push});
        continue;
      }
      // Split long pushes into two-symbol steps through fresh controls.
      const std::size_t k = r.push.size();
      int cur = num_controls_++;
      rules_.push_back({r.from, r.top, r.label, cur, {r.push[k - 2], r.push[k - 1]}});
      for (std::size_t i = k - 2; i > 1; --i) {
        int nxt = num_controls_++;
        rules_.push_back({cur, r.push[i], kEps, nxt, {r.push[i - 1], r.push[i]}});
        cur = nxt;
      }
      rules_.push_back({cur, r.push[1], kEps, r.to, {r.push[0], r.push[1]}});
    }
    if (num_controls_ >= (1 << 20) || num_symbols_ + 1 >= (1 << 12))
      throw ResourceError("leader too large for the simulation search");
    init_control_ = p.init;
    init_symbol_ = p.init_symbol;
    rules_at_.assign(static_cast<std::size_t>(num_controls_) * num_symbols_, {});
    std::vector<std::vector<int>> succ(num_controls_);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      rules_at_[static_cast<std::size_t>(rules_[i].from) * num_symbols_ + rules_[i].top].push_back(static_cast<int>(i));
      succ[rules_[i].from].push_back(rules_[i].to);
    }
    future_writes_.assign(num_controls_, Bits(nw_, 0));
    future_reads_.assign(num_controls_, Bits(nw_, 0));
    std::vector<Bits> own_w(num_controls_, Bits(nw_, 0)), own_r(num_controls_, Bits(nw_, 0));
    for (const auto& r : rules_) {
      if (r.label == kEps) continue;
      Action a = decode(r.label);
      set_bit(a.kind == Kind::Read ? own_r[r.from] : own_w[r.from], a.value);
    }
    for (int s = 0; s < num_controls_; ++s) {
      std::vector<char> seen(num_controls_, 0);
      std::vector<int> stack{s};
      seen[s] = 1;
      while (!stack.empty()) {
        int q = stack.back();
        stack.pop_back();
        for (int i = 0; i < nw_; ++i) {
          future_writes_[s][i] |= own_w[q][i];
          future_reads_[s][i] |= own_r[q][i];
        }
        for (int t : succ[q])
          if (!seen[t]) {
            seen[t] = 1;
            stack.push_back(t);
          }
      }
    }
  }

  int intern_values(const Bits& v) {
    std::string key;
    append_bits(key, v);
    if (auto it = value_set_ids_.find(key); it != value_set_ids_.end()) return it->second;
    value_set_ids_.emplace(std::move(key), static_cast<int>(value_sets_.size()));
    value_sets_.push_back(v);
    return static_cast<int>(value_sets_.size()) - 1;
  }

  using Triple = std::array<int, 3>;
  struct TripleHash {
    std::size_t operator()(const Triple& t) const {
      std::uint64_t h = static_cast<std::uint32_t>(t[0]);
      h = h * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint32_t>(t[1]);
      h = h * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint32_t>(t[2]);
      return std::hash<std::uint64_t>()(h);
    }
  };

  int read_closure(int x, int value) {
    const Triple key{x, value, 0};
    if (auto hit = read_cache_.find(key); hit != read_cache_.end()) return hit->second;
    const int y = intern_set(closure(sets_[x], value));
    read_cache_.emplace(key, y);
    return y;
  }

  int useless_closure(int x, int g, int rec_id) {
    const Triple key{x, g, rec_id};
    if (auto hit = useless_cache_.find(key); hit != useless_cache_.end()) return hit->second;
    const int y = intern_set(closure(sets_[x], -1, &value_sets_[rec_id], g));
    useless_cache_.emplace(key, y);
    return y;
  }

  // States of x from which g can still be first-written; empty set when none.
  int pruned(int x, int g, int fw_id) {
    const Triple key{x, g, fw_id};
    if (auto hit = prune_cache_.find(key); hit != prune_cache_.end()) return hit->second;
    Bits y = sets_[x];
    const Bits& live = region(g, fw_id).live;
    for (int i = 0; i < cw_; ++i) y[i] &= live[i];
    const int id = intern_set(y);
    prune_cache_.emplace(key, id);
    return id;
  }

  // Useless writes placed right before a write.
  void before_write(SimState& s) {
    const int rec = intern_values(s.recorded);
    for (int g = 0; g < n_; ++g)
      if (s.sim[g] >= 0) s.sim[g] = useless_closure(s.sim[g], g, rec);
  }

  // Reads of the value just written.
  void after_write(SimState& s) {
    for (int g = 0; g < n_; ++g)
      if (s.sim[g] >= 0) s.sim[g] = read_closure(s.sim[g], s.value);
  }

  // Drops simulator states that can no longer first-write their value, and
  // values whose contributor writes can no longer be observed by anyone.
  void canonicalize(SimState& s, int control) {
    std::vector<int> kept(n_);
    while (true) {
      Bits fw = future_writes_[control];
      for (int i = 0; i < nw_; ++i) fw[i] |= s.recorded[i];
      if (s.value >= 0) set_bit(fw, s.value);
      std::fill(kept.begin(), kept.end(), kEmptyPruned);
      for (bool grew = true; grew;) {
        grew = false;
        const int fw_id = intern_values(fw);
        for (int g = 0; g < n_; ++g) {
          if (s.sim[g] < 0 || kept[g] != kEmptyPruned) continue;
          const int y = pruned(s.sim[g], g, fw_id);
          if (y == empty_set_) continue;
          kept[g] = y;
          if (!test(fw, g)) {
            set_bit(fw, g);
            grew = true;
          }
        }
      }
      const int fw_id = intern_values(fw);
      Bits touched(nw_, 0);
      for (int g = 0; g < n_; ++g) {
        if (s.sim[g] < 0) continue;
        if (kept[g] == kEmptyPruned) {
          s.sim[g] = kDead;
          continue;
        }
        s.sim[g] = pruned(s.sim[g], g, fw_id);
        const Region& r = region(g, fw_id);
        for (int i = 0; i < nw_; ++i) touched[i] |= r.touched[i];
      }
      bool changed = false;
      for (int g = 0; g < n_; ++g) {
        if (g == hash_ || s.sim[g] == kDead) continue;
        if (test(future_reads_[control], g) || test(touched, g)) continue;
        s.sim[g] = kDead;
        reset_bit(s.recorded, g);
        changed = true;
      }
      if (!changed) return;
    }
  }

  std::string encode_state(const SimState& s) const {
    std::string k;
    k.reserve(4 + nw_ * 8 + n_ * 4);
    k.append(reinterpret_cast<const char*>(&s.value), sizeof s.value);
    append_bits(k, s.recorded);
    k.append(reinterpret_cast<const char*>(s.sim.data()), s.sim.size() * sizeof(int));
    return k;
  }

  SimState decode_state(int id) const {
    const std::string& k = *state_keys_[id];
    SimState s;
    std::size_t off = 0;
    std::memcpy(&s.value, k.data(), sizeof s.value);
    off += sizeof s.value;
    s.recorded.resize(nw_);
    std::memcpy(s.recorded.data(), k.data() + off, nw_ * 8);
    off += nw_ * 8;
    s.sim.resize(n_);
    std::memcpy(s.sim.data(), k.data() + off, n_ * sizeof(int));
    return s;
  }

  int intern_state(const SimState& s) {
    std::string key = encode_state(s);
    auto it = state_ids_.find(key);
    if (it != state_ids_.end()) return it->second;
    if (state_keys_.size() >= cap_) throw ResourceError("simulation search exceeds the state cap");
    state_store_.push_back(std::move(key));
    const int id = static_cast<int>(state_keys_.size());
    state_keys_.push_back(&state_store_.back());
    state_ids_.emplace(*state_keys_.back(), id);
    filters_.push_back(filter_of(s));
    return id;
  }

  // Folded summary of a state; covers(a, b) implies every word of b's filter
  // is contained in the matching word of a's.
  using Filter = std::array<std::uint64_t, 4>;
  Filter filter_of(const SimState& s) const {
    Filter f{};
    for (int g = 0; g < n_; ++g) {
      const std::uint64_t bit = std::uint64_t{1} << (g & 63);
      if (test(s.recorded, g)) f[0] |= bit;
      if (s.sim[g] == kDead) continue;
      f[1] |= bit;
      if (s.sim[g] == kDone) {
        f[2] |= bit;
        f[3] |= all_pairs_[g];
        continue;
      }
      const Bits& x = sets_[s.sim[g]];
      for (int st = 0; st < c_.num_states; ++st)
        if (test(x, st)) f[3] |= pair_bit(g, st);
    }
    return f;
  }
  static std::uint64_t pair_bit(int g, int st) {
    return std::uint64_t{1} << ((static_cast<std::uint64_t>(g) * 0x9e3779b1u + static_cast<std::uint64_t>(st) * 0x85ebca6bu) >> 7 & 63);
  }

  // Search graph.
  using NodeKey = std::uint64_t;
  NodeKey node(int control, int sid, int symbol) const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(sid)) << 32) |
           (static_cast<std::uint64_t>(control) << 12) | static_cast<std::uint64_t>(symbol);
  }
  static int node_control(NodeKey k) { return static_cast<int>((k >> 12) & ((1u << 20) - 1)); }
  static int node_state(NodeKey k) { return static_cast<int>(k >> 32); }
  static int node_symbol(NodeKey k) { return static_cast<int>(k & ((1u << 12) - 1)); }

  enum class PredKind { Start, Step, Return };
  struct Pred {
    PredKind kind = PredKind::Start;
    NodeKey prev = 0;
    Event ev;
    int callee = -1;
    NodeKey exit = 0;
    Event pop;
    bool covered = false;
  };
  struct Caller {
    int entry;
    NodeKey from;
    Event push;
    int below;
  };
  struct Exit {
    int control, sid;
    NodeKey from;
    Event pop;
  };
  struct Entry {
    std::unordered_map<NodeKey, Pred> reached;
    std::vector<Exit> exits;
    std::unordered_map<std::uint64_t, char> exit_seen;
    std::vector<Caller> callers;
  };

  // s1 covers s2 when it can mimic every move of s2: same register, more
  // recorded values, and each simulator finished or holding more states.
  bool covers(int id1, int id2) const {
    if (id1 == id2) return true;
    const Filter &fa = filters_[id1], &fb = filters_[id2];
    for (int i = 0; i < 4; ++i)
      if (fb[i] & ~fa[i]) return false;
    const char* ka = state_keys_[id1]->data();
    const char* kb = state_keys_[id2]->data();
    if (std::memcmp(ka, kb, sizeof(int)) != 0) return false;
    ka += sizeof(int);
    kb += sizeof(int);
    for (int i = 0; i < nw_; ++i) {
      std::uint64_t ra, rb;
      std::memcpy(&ra, ka + 8 * i, 8);
      std::memcpy(&rb, kb + 8 * i, 8);
      if (rb & ~ra) return false;
    }
    ka += 8 * nw_;
    kb += 8 * nw_;
    for (int g = 0; g < n_; ++g) {
      int x, y;
      std::memcpy(&x, ka + sizeof(int) * g, sizeof x);
      std::memcpy(&y, kb + sizeof(int) * g, sizeof y);
      if (y == kDead || x == y || x == kDone) continue;
      if (x < 0 || y < 0) return false;
      const Bits &sx = sets_[x], &sy = sets_[y];
      for (int i = 0; i < cw_; ++i)
        if (sy[i] & ~sx[i]) return false;
    }
    return true;
  }

  struct GroupKey {
    std::uint64_t a, b;
    bool operator==(const GroupKey&) const = default;
  };
  struct GroupHash {
    std::size_t operator()(const GroupKey& k) const { return std::hash<std::uint64_t>()(k.a * 0x9e3779b97f4a7c15ULL ^ k.b); }
  };

  // Skips nodes covered by a node of the same entry, control and stack top;
  // marks older nodes that the new one covers.
  bool covered(int e, NodeKey k) {
    const int sid = node_state(k);
    const GroupKey g{(static_cast<std::uint64_t>(e) << 32) | static_cast<std::uint32_t>(decode_value(sid)),
                     k & 0xffffffffULL};
    auto& members = groups_[g];
    for (int other : members)
      if (covers(other, sid)) return true;
    std::size_t keep = 0;
    for (int other : members) {
      if (covers(sid, other)) {
        entries_[e].reached.at(node(node_control(k), other, node_symbol(k))).covered = true;
        continue;
      }
      members[keep++] = other;
    }
    members.resize(keep);
    members.push_back(sid);
    return false;
  }

  int decode_value(int id) const {
    int v;
    std::memcpy(&v, state_keys_[id]->data(), sizeof v);
    return v;
  }

  bool add(int e, NodeKey k, const Pred& p) {
    if (entries_[e].reached.count(k)) return false;
    if (p.kind != PredKind::Start && covered(e, k)) return false;
    entries_[e].reached.emplace(k, p);
    if (p.kind == PredKind::Start) groups_[GroupKey{(static_cast<std::uint64_t>(e) << 32) |
                                                    static_cast<std::uint32_t>(decode_value(node_state(k))),
                                                k & 0xffffffffULL}].push_back(node_state(k));
    if (++nodes_ > cap_ * 4) throw ResourceError("simulation search exceeds the node cap");
    if (target_[node_state(k)]) {
      found_ = true;
      found_entry_ = e;
      found_node_ = k;
    }
    work_.push_back({e, k});
    return true;
  }

  int entry_for(NodeKey k) {
    auto [it, fresh] = entry_ids_.emplace(k, static_cast<int>(entries_.size()));
    if (fresh) {
      entries_.emplace_back();
      add(it->second, k, Pred{});
    }
    return it->second;
  }

  int finish(SimState& s, int control) {
    std::string raw = encode_state(s);
    raw.append(reinterpret_cast<const char*>(&control), sizeof control);
    if (auto it = finished_.find(raw); it != finished_.end()) return it->second;
    canonicalize(s, control);
    int id = intern_state(s);
    if (static_cast<std::size_t>(id) >= target_.size()) target_.resize(id + 1, 0);
    target_[id] = test(s.recorded, hash_) ? 1 : 0;
    if (finished_.size() < cap_) finished_.emplace(std::move(raw), id);
    return id;
  }

  void expand(int e, NodeKey k);
  std::vector<Event> events_to(int e, NodeKey k) const;
  Word simulation_word(const std::vector<Event>& events, std::vector<int>& owner) const;

  const Fsa& c_;
  const int n_, hash_;
  const std::size_t cap_;
  const int nw_, cw_;
  std::vector<std::vector<std::pair<Letter, int>>> out_, in_;
  std::vector<Bits> writes_of_;
  std::unordered_map<std::uint64_t, Region> regions_;
  std::vector<Bits> sets_;
  std::unordered_map<std::string, int> set_ids_;
  int empty_set_ = 0;
  static constexpr int kEmptyPruned = -3;
  std::vector<Bits> value_sets_;
  std::unordered_map<std::string, int> value_set_ids_;
  std::unordered_map<Triple, int, TripleHash> read_cache_, useless_cache_, prune_cache_;

  int num_controls_ = 0, num_symbols_ = 1, empty_symbol_ = 1, init_control_ = 0, init_symbol_ = 0;
  std::vector<LeaderRule> rules_;
  std::vector<std::vector<int>> rules_at_;
  std::vector<Bits> future_writes_, future_reads_;

  std::deque<std::string> state_store_;
  std::vector<const std::string*> state_keys_;
  std::unordered_map<std::string_view, int> state_ids_;
  std::vector<char> target_;
  std::unordered_map<std::string, int> finished_;
  std::vector<Filter> filters_;
  std::vector<std::uint64_t> all_pairs_;

  std::deque<Entry> entries_;
  std::unordered_map<NodeKey, int> entry_ids_;
  std::unordered_map<GroupKey, std::vector<int>, GroupHash> groups_;
  std::deque<std::pair<int, NodeKey>> work_;
  std::size_t nodes_ = 0;
  bool found_ = false;
  int found_entry_ = -1;
  NodeKey found_node_ = 0;
};

void Engine::expand(int e, NodeKey k) {
  const int control = node_control(k);
  const int symbol = node_symbol(k);
  const SimState base = decode_state(node_state(k));
  auto step = [&](SimState s, int to_control, int to_symbol, Event ev) {
    int id = finish(s, to_control);
    Pred p;
    p.kind = PredKind::Step;
    p.prev = k;
    p.ev = ev;
    add(e, node(to_control, id, to_symbol), p);
  };

  // First writes and copycat writes.
  SimState pre = base;
  before_write(pre);
  for (int g = 0; g < n_ && !found_; ++g) {
    if (pre.sim[g] == kDone) {
      SimState s = pre;
      s.value = g;
      after_write(s);
      step(std::move(s), control, symbol, Event{wc(g), -2});
      continue;
    }
    if (pre.sim[g] < 0) continue;
    const Bits& x = sets_[pre.sim[g]];
    bool can = false;
    for (int i = 0; i < cw_ && !can; ++i) can = (x[i] & writes_of_[g][i]) != 0;
    if (!can) continue;
    SimState s = pre;
    set_bit(s.recorded, g);
    s.sim[g] = kDone;
    s.value = g;
    after_write(s);
    step(std::move(s), control, symbol, Event{fc(g), g});
  }
  if (found_ || symbol == empty_symbol_) return;

  // Leader moves.
  for (int ri : rules_at_[static_cast<std::size_t>(control) * num_symbols_ + symbol]) {
    if (found_) return;
    const LeaderRule& r = rules_[ri];
    SimState s = base;
    if (r.label != kEps) {
      Action a = decode(r.label);
      if (a.kind == Kind::Read) {
        if (s.value != a.value) continue;
      } else {
        s = pre;
        s.value = a.value;
        after_write(s);
      }
    }
    const Event ev{r.label, -1};
    if (r.push.size() == 1) {
      step(std::move(s), r.to, r.push[0], ev);
      continue;
    }
    const int id = finish(s, r.to);
    if (r.push.empty()) {
      const std::uint64_t ek = (static_cast<std::uint64_t>(id) << 20) | static_cast<std::uint64_t>(r.to);
      if (!entries_[e].exit_seen.emplace(ek, 1).second) continue;
      entries_[e].exits.push_back({r.to, id, k, ev});
      if (e == 0) {
        Pred p;
        p.kind = PredKind::Step;
        p.prev = k;
        p.ev = ev;
        add(e, node(r.to, id, empty_symbol_), p);
      }
      // Callers may grow while we iterate; index-based on purpose.
      for (std::size_t i = 0; i < entries_[e].callers.size() && !found_; ++i) {
        const Caller c = entries_[e].callers[i];
        Pred p;
        p.kind = PredKind::Return;
        p.prev = c.from;
        p.ev = c.push;
        p.callee = e;
        p.exit = k;
        p.pop = ev;
        add(c.entry, node(r.to, id, c.below), p);
      }
      continue;
    }
    const int callee = entry_for(node(r.to, id, r.push[0]));
    entries_[callee].callers.push_back({e, k, ev, r.push[1]});
    for (std::size_t i = 0; i < entries_[callee].exits.size() && !found_; ++i) {
      const Exit x = entries_[callee].exits[i];
      Pred p;
      p.kind = PredKind::Return;
      p.prev = k;
      p.ev = ev;
      p.callee = callee;
      p.exit = x.from;
      p.pop = x.pop;
      add(e, node(x.control, x.sid, r.push[1]), p);
    }
  }
}

std::vector<Event> Engine::events_to(int e, NodeKey k) const {
  std::vector<Event> rev;
  std::function<void(int, NodeKey)> walk = [&](int entry, NodeKey cur) {
    while (true) {
      const Pred& p = entries_[entry].reached.at(cur);
      if (p.kind == PredKind::Start) return;
      if (p.kind == PredKind::Step) {
        rev.push_back(p.ev);
      } else {
        rev.push_back(p.pop);
        walk(p.callee, p.exit);
        rev.push_back(p.ev);
      }
      cur = p.prev;
    }
  };
  walk(e, k);
  return {rev.rbegin(), rev.rend()};
}

// Realizes each simulator run between the recorded events: reads right after
// the write that offered the value, useless writes right before a write.
Word Engine::simulation_word(const std::vector<Event>& events, std::vector<int>& owner) const {
  const int t_count = static_cast<int>(events.size());
  std::vector<int> reg(t_count + 1, -1);  // register after t events
  std::vector<Bits> recorded(t_count + 1, Bits(nw_, 0));
  std::vector<char> write_next(t_count + 1, 0);
  for (int t = 0; t < t_count; ++t) {
    reg[t + 1] = reg[t];
    recorded[t + 1] = recorded[t];
    const Letter l = events[t].letter;
    if (l == kEps) continue;
    Action a = decode(l);
    if (a.kind == Kind::Read) continue;
    write_next[t] = 1;
    reg[t + 1] = a.value;
    if (a.kind == Kind::FirstWrite) set_bit(recorded[t + 1], a.value);
  }
  std::vector<std::vector<std::pair<Letter, int>>> reads(t_count + 1), useless(t_count + 1);
  const int m = c_.num_states;
  for (int g = 0; g < n_; ++g) {
    int last = -1;
    for (int t = 0; t < t_count; ++t)
      if (events[t].actor == g) last = t;
    if (last < 0) continue;
    const int goal = last + 1;
    // Breadth-first search over (events passed, phase, contributor state);
    // phase 1 means a useless write already happened in this interval.
    auto id = [&](int t, int phase, int st) { return (t * 2 + phase) * m + st; };
    std::vector<int> parent((goal + 1) * 2 * m, -2);
    std::vector<Letter> via(parent.size(), kEps);
    std::deque<int> q;
    parent[id(0, 0, c_.init)] = -1;
    q.push_back(id(0, 0, c_.init));
    int hit = -1;
    while (!q.empty()) {
      const int cur = q.front();
      q.pop_front();
      const int st = cur % m, phase = (cur / m) % 2, t = cur / m / 2;
      if (t == goal) {
        hit = cur;
        break;
      }
      auto push = [&](int to, Letter l) {
        if (parent[to] != -2) return;
        parent[to] = cur;
        via[to] = l;
        q.push_back(to);
      };
      const bool ours = events[t].actor == g;
      if (!ours) push(id(t + 1, 0, st), kEps);
      for (auto [l, s2] : out_[st]) {
        if (l == kEps) {
          push(id(t, phase, s2), kEps);
          continue;
        }
        Action a = decode(l);
        if (a.kind == Kind::Read) {
          if (phase == 0 && reg[t] == a.value) push(id(t, 0, s2), l);
        } else if (a.value == g) {
          if (ours) push(id(t + 1, 0, s2), kEps);
        } else if (write_next[t] && test(recorded[t], a.value)) {
          push(id(t, 1, s2), uc(a.value));
        }
      }
    }
    if (hit < 0) throw std::logic_error("simulation search: cannot realize a simulator run");
    for (int cur = hit; parent[cur] >= 0; cur = parent[cur]) {
      if (via[cur] == kEps) continue;
      const int t = cur / m / 2;
      (decode(via[cur]).kind == Kind::Read ? reads : useless)[t].push_back({via[cur], g});
    }
  }
  Word w;
  owner.clear();
  auto emit = [&](std::vector<std::pair<Letter, int>>& part) {
    std::reverse(part.begin(), part.end());
    for (auto [l, g] : part) {
      w.push_back(l);
      owner.push_back(g);
    }
  };
  for (int t = 0; t <= t_count; ++t) {
    emit(reads[t]);
    emit(useless[t]);
    if (t == t_count || events[t].letter == kEps) continue;
    w.push_back(events[t].letter);
    const int actor = events[t].actor;
    owner.push_back(actor == -2 ? decode(events[t].letter).value : actor);
  }
  return w;
}

SimSearchResult Engine::run(bool want_witness) {
  SimSearchResult res;
  SimState init;
  init.recorded.assign(nw_, 0);
  init.sim.assign(n_, kDead);
  Bits start(cw_, 0);
  set_bit(start, c_.init);
  const int x0 = intern_set(closure(start, -1));
  for (int g = 0; g < n_; ++g) init.sim[g] = x0;
  const int id = finish(init, init_control_);
  entry_for(node(init_control_, id, init_symbol_));
  while (!work_.empty() && !found_) {
    auto [e, k] = work_.front();
    work_.pop_front();
    if (!entries_[e].reached.at(k).covered) expand(e, k);
  }
  res.sim_states = state_keys_.size();
  res.nodes = nodes_;
  res.entries = entries_.size();
  if (!found_) return res;
  res.unsafe = true;
  auto events = events_to(found_entry_, found_node_);
  for (const auto& ev : events)
    if (ev.letter != kEps && decode(ev.letter).kind == Kind::FirstWrite) res.tau.push_back(decode(ev.letter).value);
  if (want_witness) res.simulation = simulation_word(events, res.owner);
  return res;
}

}  // namespace

SimSearchResult simulation_search(const Pdm& leader, const Fsa& contributor, int nvalues, int hash,
                                  std::size_t state_cap, bool want_witness) {
  if (contributor.num_states <= 0) return {};
  Engine engine(leader, contributor, nvalues, hash, state_cap);
  return engine.run(want_witness);
}

}  // namespace nam::detail
