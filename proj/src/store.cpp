#include "nam/store.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

namespace nam {

Fsa build_store(int n) {
  if (n <= 0) throw std::invalid_argument("store needs a non-empty value set");
  Fsa s;
  s.set_alphabet([&] {
    auto a = leader_alphabet(n);
    auto c = contributor_alphabet(n);
    a.insert(a.end(), c.begin(), c.end());
    return a;
  }());
  for (int i = 0; i <= n; ++i) s.add_state(true);
  for (int from = 0; from <= n; ++from) {
    for (int v = 0; v < n; ++v) {
      s.add_edge(from, wd(v), v + 1);
      s.add_edge(from, wc(v), v + 1);
    }
  }
  for (int v = 0; v < n; ++v) {
    s.add_edge(v + 1, rd(v), v + 1);
    s.add_edge(v + 1, rc(v), v + 1);
  }
  return s;
}

namespace {

void check_contributor(Letter l) {
  if (l != kEps && decode(l).role != Role::Contributor)
    throw std::invalid_argument("extension applies to contributor machines only");
}

std::vector<Letter> extend_alphabet(const std::vector<Letter>& alpha) {
  std::vector<Letter> out = alpha;
  for (Letter l : alpha) {
    check_contributor(l);
    Action a = decode(l);
    if (a.kind == Kind::Write) {
      out.push_back(fc(a.value));
      out.push_back(uc(a.value));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Fsa extend_lts(const Fsa& m) {
  Fsa out = m;
  out.edges.clear();
  for (const auto& e : m.edges) {
    check_contributor(e.label);
    out.edges.push_back(e);
    if (e.label != kEps && decode(e.label).kind == Kind::Write) {
      int v = decode(e.label).value;
      out.edges.push_back({e.from, fc(v), e.to});
      out.edges.push_back({e.from, uc(v), e.to});
    }
  }
  out.alphabet = extend_alphabet(m.alphabet);
  return out;
}

Pdm extend_lts(const Pdm& p) {
  Pdm out = p;
  out.rules.clear();
  for (const auto& r : p.rules) {
    check_contributor(r.label);
    out.rules.push_back(r);
    if (r.label != kEps && decode(r.label).kind == Kind::Write) {
      int v = decode(r.label).value;
      PdmRule f = r, u = r;
      f.label = fc(v);
      u.label = uc(v);
      out.rules.push_back(f);
      out.rules.push_back(u);
    }
  }
  out.alphabet = extend_alphabet(p.alphabet);
  return out;
}

namespace {

// Successor of an extended-store triple; nullopt when blocked.
std::optional<ExtState> ext_step(const ExtState& s, Letter l, bool leader_store) {
  Action a = decode(l);
  unsigned bit = 1u << a.value;
  switch (a.kind) {
    case Kind::Read:
      if (s.value == a.value && !s.useless) return s;
      return std::nullopt;
    case Kind::Write:
      if (a.role == Role::Leader) return ExtState{a.value, s.record, false};
      if (s.record & bit) return ExtState{a.value, s.record, false};
      return std::nullopt;
    case Kind::FirstWrite:
      if (!(s.record & bit)) return ExtState{a.value, s.record | bit, false};
      return std::nullopt;
    case Kind::UselessWrite:
      if (leader_store) return std::nullopt;
      if (s.record & bit) return ExtState{a.value, s.record, true};
      return std::nullopt;
  }
  return std::nullopt;
}

ExtendedStore explore_store(int n, bool leader_store) {
  if (n <= 0) throw std::invalid_argument("store needs a non-empty value set");
  if (n > 30) throw ResourceError("extended store supports at most 30 values");
  ExtendedStore out;
  out.fsa.set_alphabet(leader_store ? leader_store_alphabet(n) : extended_alphabet(n));
  std::map<ExtState, int> ids;
  auto get = [&](const ExtState& s) {
    auto [it, fresh] = ids.emplace(s, out.fsa.num_states);
    if (fresh) {
      out.fsa.add_state(true);
      out.states.push_back(s);
    }
    return it->second;
  };
  out.fsa.init = get(ExtState{-1, 0u, false});
  for (std::size_t i = 0; i < out.states.size(); ++i) {
    ExtState s = out.states[i];
    for (Letter l : out.fsa.alphabet) {
      auto t = ext_step(s, l, leader_store);
      if (t) out.fsa.add_edge(static_cast<int>(i), l, get(*t));
    }
  }
  return out;
}

Fsa store_tau(int n, const std::vector<int>& tau, bool leader_store) {
  Fsa f;
  f.set_alphabet(leader_store ? leader_store_alphabet(n) : extended_alphabet(n));
  const int d = static_cast<int>(tau.size());
  // State id: ((value+1) * (d+1) + progress) * 2 + useless.
  auto id = [&](int value, int progress, bool useless) { return ((value + 1) * (d + 1) + progress) * 2 + (useless ? 1 : 0); };
  const int total = (n + 1) * (d + 1) * 2;
  for (int i = 0; i < total; ++i) f.add_state(((i / 2) % (d + 1)) == d);
  f.init = id(-1, 0, false);
  // Value v is recorded after progress p iff it occurs in tau before p.
  std::vector<int> pos(n, d);
  for (int i = 0; i < d; ++i) pos[tau[i]] = i;
  for (int value = -1; value < n; ++value) {
    for (int p = 0; p <= d; ++p) {
      for (int b = 0; b < (leader_store ? 1 : 2); ++b) {
        const bool useless = b != 0;
        int from = id(value, p, useless);
        for (Letter l : f.alphabet) {
          Action a = decode(l);
          const bool recorded = pos[a.value] < p;
          switch (a.kind) {
            case Kind::Read:
              if (value == a.value && !useless) f.add_edge(from, l, from);
              break;
            case Kind::Write:
              if (a.role == Role::Leader || recorded) f.add_edge(from, l, id(a.value, p, false));
              break;
            case Kind::FirstWrite:
              if (p < d && tau[p] == a.value) f.add_edge(from, l, id(a.value, p + 1, false));
              break;
            case Kind::UselessWrite:
              if (!leader_store && recorded) f.add_edge(from, l, id(a.value, p, true));
              break;
          }
        }
      }
    }
  }
  return trim(f);
}

}  // namespace

ExtendedStore build_extended_store(int n) { return explore_store(n, false); }
ExtendedStore build_leader_store(int n) { return explore_store(n, true); }

Fsa extended_store_tau(int n, const std::vector<int>& tau) { return store_tau(n, tau, false); }
Fsa leader_store_tau(int n, const std::vector<int>& tau) { return store_tau(n, tau, true); }

Word classify_trace(const Word& t) {
  Word out = t;
  std::set<int> written;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == kEps) continue;
    Action a = decode(t[i]);
    if (a.role != Role::Contributor || a.kind != Kind::Write) continue;
    if (!written.count(a.value)) {
      written.insert(a.value);
      out[i] = fc(a.value);
    } else if (i + 1 < t.size() && t[i + 1] != kEps && decode(t[i + 1]).kind != Kind::Read) {
      out[i] = uc(a.value);
    }
  }
  return out;
}

Word erase_extension(const Word& t) {
  Word out = t;
  for (auto& l : out) {
    if (l == kEps) continue;
    Action a = decode(l);
    if (a.kind == Kind::FirstWrite || a.kind == Kind::UselessWrite) l = wc(a.value);
  }
  return out;
}

std::vector<std::vector<int>> enumerate_tau(int n, bool require_hash, int hash) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::vector<char> used(n, 0);
  std::function<void()> go = [&] {
    if (!require_hash || (!cur.empty() && cur.back() == hash)) out.push_back(cur);
    if (!cur.empty() && require_hash && cur.back() == hash) return;
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = 1;
      cur.push_back(v);
      go();
      cur.pop_back();
      used[v] = 0;
    }
  };
  go();
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

Fsa p_tau_automaton(const std::vector<int>& tau, const std::vector<Letter>& alphabet) {
  Fsa f;
  f.set_alphabet(alphabet);
  const int d = static_cast<int>(tau.size());
  for (int i = 0; i <= d; ++i) f.add_state(i == d);
  for (Letter l : f.alphabet) {
    Action a = decode(l);
    if (a.kind == Kind::FirstWrite) {
      for (int i = 0; i < d; ++i)
        if (tau[i] == a.value) f.add_edge(i, l, i + 1);
    } else {
      for (int i = 0; i <= d; ++i) f.add_edge(i, l, i);
    }
  }
  return f;
}

}  // namespace nam
