#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "nam/verifier.hpp"

namespace nam {

namespace {

bool is_read_label(Letter l) { return l != kEps && decode(l).kind == Kind::Read; }

enum class Conflict { None, ReadOnly, WriteOnly, Mixed };

using Option = std::pair<Letter, int>;  // label, target

std::vector<std::vector<Option>> options_by_state(const Fsa& m) {
  std::vector<std::set<Option>> tmp(m.num_states);
  for (const auto& e : m.edges) tmp[e.from].insert({e.label, e.to});
  std::vector<std::vector<Option>> out(m.num_states);
  for (int s = 0; s < m.num_states; ++s) out[s].assign(tmp[s].begin(), tmp[s].end());
  return out;
}

bool conflicting(const Option& a, const Option& b) {
  if (a.second == b.second) return false;
  if (is_read_label(a.first) && is_read_label(b.first)) return decode(a.first).value == decode(b.first).value;
  return true;
}

Conflict classify(const std::vector<Option>& opts) {
  bool any = false;
  for (std::size_t i = 0; i < opts.size() && !any; ++i)
    for (std::size_t j = i + 1; j < opts.size() && !any; ++j) any = conflicting(opts[i], opts[j]);
  if (!any) return Conflict::None;
  bool all_reads = std::all_of(opts.begin(), opts.end(), [](const Option& o) { return is_read_label(o.first); });
  if (all_reads) return Conflict::ReadOnly;
  bool all_writes = std::all_of(opts.begin(), opts.end(),
                                [](const Option& o) { return o.first != kEps && decode(o.first).kind == Kind::Write; });
  return all_writes ? Conflict::WriteOnly : Conflict::Mixed;
}

std::string fresh_name(const ValueTable& values, const std::string& base) {
  std::string name = base;
  while (values.find(name) >= 0) name += "'";
  return name;
}

struct Aux {
  Role role;
  int nd, zero, one;
  std::vector<int> all_values;  // every value that can sit in the register
};

class Builder {
 public:
  Builder(Fsa& m, const Aux& aux) : m_(m), aux_(aux) {}

  // Arbitrates among `opts` starting at `entry`; read and silent options
  // restore `restore` before reaching their target.
  void arbitrate(int entry, const std::vector<Option>& opts, int restore) {
    if (opts.size() == 1) {
      leaf(entry, opts[0], restore);
      return;
    }
    int b = m_.add_state(true);
    m_.add_edge(entry, act(aux_.role, Kind::Write, aux_.nd), b);
    int x0 = m_.add_state(true);
    m_.add_edge(b, act(aux_.role, Kind::Read, aux_.zero), x0);
    leaf(x0, opts[0], restore);
    int x1 = m_.add_state(true);
    m_.add_edge(b, act(aux_.role, Kind::Read, aux_.one), x1);
    arbitrate(x1, std::vector<Option>(opts.begin() + 1, opts.end()), restore);
  }

 private:
  void leaf(int x, const Option& o, int restore) {
    if (o.first != kEps && decode(o.first).kind == Kind::Write) {
      m_.add_edge(x, o.first, o.second);
      return;
    }
    if (restore < 0) throw std::logic_error("arbitration leaf without a value to restore");
    m_.add_edge(x, act(aux_.role, Kind::Write, restore), o.second);
  }

  Fsa& m_;
  const Aux& aux_;
};

// Rewrites every conflicting state of `m`; returns the number of added states.
int resolve(Fsa& m, const Aux& aux) {
  const int before = m.num_states;
  auto opts = options_by_state(m);
  std::vector<Conflict> kind(before);
  for (int s = 0; s < before; ++s) kind[s] = classify(opts[s]);
  std::vector<Edge> kept;
  for (const auto& e : m.edges) {
    Conflict k = kind[e.from];
    if (k == Conflict::WriteOnly || k == Conflict::Mixed) continue;
    if (k == Conflict::ReadOnly) {
      int g = decode(e.label).value;
      std::set<int> targets;
      for (const auto& o : opts[e.from])
        if (decode(o.first).value == g) targets.insert(o.second);
      if (targets.size() > 1) continue;
    }
    kept.push_back(e);
  }
  m.edges = std::move(kept);
  Builder b(m, aux);
  for (int s = 0; s < before; ++s) {
    switch (kind[s]) {
      case Conflict::None: break;
      case Conflict::ReadOnly: {
        std::map<int, std::vector<Option>> by_value;
        for (const auto& o : opts[s]) by_value[decode(o.first).value].push_back(o);
        for (auto& [g, list] : by_value) {
          std::set<int> targets;
          for (const auto& o : list) targets.insert(o.second);
          if (targets.size() < 2) continue;
          int e = m.add_state(true);
          m.add_edge(s, act(aux.role, Kind::Read, g), e);
          b.arbitrate(e, list, g);
        }
        break;
      }
      case Conflict::WriteOnly:
        b.arbitrate(s, opts[s], -1);
        break;
      case Conflict::Mixed:
        for (int h : aux.all_values) {
          std::vector<Option> avail;
          for (const auto& o : opts[s])
            if (!is_read_label(o.first) || decode(o.first).value == h) avail.push_back(o);
          if (avail.empty()) continue;
          int d = m.add_state(true);
          m.add_edge(s, act(aux.role, Kind::Read, h), d);
          b.arbitrate(d, avail, h);
        }
        break;
    }
  }
  return m.num_states - before;
}

}  // namespace

bool is_deterministic(const Fsa& m) {
  auto opts = options_by_state(m);
  for (const auto& list : opts)
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j)
        if (conflicting(list[i], list[j])) return false;
  return true;
}

DeterminizeResult determinize(const Network& net) {
  if (net.leader.kind != MachineKind::Fsm || net.contributor.kind != MachineKind::Fsm)
    throw std::invalid_argument("determinization needs finite leader and contributor");
  DeterminizeResult res;
  Fsa d = net.leader.fsm;
  Fsa c = net.contributor.fsm;
  if (is_deterministic(d) && is_deterministic(c)) {
    res.net = net;
    return res;
  }
  ValueTable values = net.values;
  const int hash = net.hash();
  auto kinds = [](const Fsa& m) {
    std::vector<Conflict> out;
    for (const auto& o : options_by_state(m)) out.push_back(classify(o));
    return out;
  };
  auto dk = kinds(d), ck = kinds(c);
  bool leader_mixed = std::count(dk.begin(), dk.end(), Conflict::Mixed) > 0;
  bool contrib_mixed = std::count(ck.begin(), ck.end(), Conflict::Mixed) > 0;
  bool c0_reads_only = std::all_of(c.edges.begin(), c.edges.end(),
                                   [&](const Edge& e) { return e.from != c.init || is_read_label(e.label); });
  c0_reads_only = c0_reads_only && ck[c.init] != Conflict::WriteOnly && ck[c.init] != Conflict::Mixed;
  const bool prologue = leader_mixed || contrib_mixed || !c0_reads_only;

  const int nd = values.intern(fresh_name(values, "nd"));
  const int zero = values.intern(fresh_name(values, "0"));
  const int one = values.intern(fresh_name(values, "1"));
  const int go = prologue ? values.intern(fresh_name(values, "go")) : -1;

  // A contributor that restores the register after arbitration must not
  // re-issue a # the leader wrote, so the leader writes a private copy.
  if (contrib_mixed) {
    const int hash_leader = values.intern(fresh_name(values, "#L"));
    std::vector<Edge> extra;
    for (auto& e : d.edges) {
      if (e.label == kEps) continue;
      Action a = decode(e.label);
      if (a.value != hash) continue;
      if (a.kind == Kind::Write) e.label = wd(hash_leader);
      else extra.push_back({e.from, rd(hash_leader), e.to});
    }
    d.edges.insert(d.edges.end(), extra.begin(), extra.end());
    extra.clear();
    for (const auto& e : c.edges)
      if (e.label != kEps && decode(e.label).kind == Kind::Read && decode(e.label).value == hash)
        extra.push_back({e.from, rc(hash_leader), e.to});
    c.edges.insert(c.edges.end(), extra.begin(), extra.end());
  }

  std::vector<int> all;
  for (int v = 0; v < values.size(); ++v) all.push_back(v);
  Aux laux{Role::Leader, nd, zero, one, all};
  Aux caux{Role::Contributor, nd, zero, one, all};
  const int d_states = d.num_states, c_states = c.num_states;
  resolve(d, laux);
  resolve(c, caux);

  if (prologue) {
    int start = d.add_state(true);
    d.add_edge(start, wd(go), d.init);
    d.init = start;
    int cstart = c.add_state(true);
    c.add_edge(cstart, rc(go), c.init);
    c.init = cstart;
  }
  int h = c.add_state(true), q = c.add_state(true);
  c.add_edge(c.init, rc(nd), h);
  c.add_edge(h, wc(zero), q);
  c.add_edge(q, wc(one), c.init);

  res.leader_states_added = d.num_states - d_states;
  res.contributor_states_added = c.num_states - c_states;
  Machine lm = net.leader, cm = net.contributor;
  lm.fsm = d;
  cm.fsm = c;
  lm.fsm_state_names.clear();
  cm.fsm_state_names.clear();
  res.net = make_network(lm, cm, values);
  return res;
}

}  // namespace nam
