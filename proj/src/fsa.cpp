#include "nam/fsa.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>

namespace nam {

bool Fsa::in_alphabet(Letter a) const { return std::binary_search(alphabet.begin(), alphabet.end(), a); }

void Fsa::set_alphabet(std::vector<Letter> letters) {
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  alphabet = std::move(letters);
}

std::vector<std::vector<std::pair<Letter, int>>> Fsa::adjacency() const {
  std::vector<std::vector<std::pair<Letter, int>>> adj(num_states);
  for (const auto& e : edges) adj[e.from].emplace_back(e.label, e.to);
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

Fsa make_lts(int num_states, int init, std::vector<Edge> edges, std::vector<Letter> alphabet) {
  Fsa f;
  f.num_states = num_states;
  f.init = init;
  f.accepting.assign(num_states, 1);
  f.edges = std::move(edges);
  f.set_alphabet(std::move(alphabet));
  return f;
}

namespace {

template <class Moves>
Fsa explore_pairs(const Fsa& a, const Fsa& b, std::size_t cap, Moves moves) {
  Fsa out;
  std::vector<Letter> alpha = a.alphabet;
  alpha.insert(alpha.end(), b.alphabet.begin(), b.alphabet.end());
  out.set_alphabet(std::move(alpha));
  if (a.num_states == 0 || b.num_states == 0) {
    out.add_state(false);
    return out;
  }
  auto adj_a = a.adjacency();
  auto adj_b = b.adjacency();
  std::unordered_map<std::uint64_t, int> ids;
  std::vector<std::pair<int, int>> pairs;
  auto get = [&](int s, int t) {
    std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(t);
    auto [it, fresh] = ids.emplace(key, out.num_states);
    if (fresh) {
      if (static_cast<std::size_t>(out.num_states) >= cap) {
        throw ResourceError("product state cap exceeded (" + std::to_string(cap) + " states)");
      }
      out.add_state(a.accepting[s] && b.accepting[t]);
      pairs.emplace_back(s, t);
    }
    return it->second;
  };
  out.init = get(a.init, b.init);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [s, t] = pairs[i];
    int from = static_cast<int>(i);
    moves(s, t, adj_a[s], adj_b[t], [&](Letter l, int s2, int t2) { out.add_edge(from, l, get(s2, t2)); });
  }
  return out;
}

}  // namespace

Fsa async_product(const Fsa& a, const Fsa& b, std::size_t cap) {
  return explore_pairs(a, b, cap, [&](int s, int t, const auto& as, const auto& bs, auto emit) {
    for (auto [l, s2] : as) {
      if (l == kEps || !b.in_alphabet(l)) {
        emit(l, s2, t);
      } else {
        auto lo = std::lower_bound(bs.begin(), bs.end(), std::make_pair(l, -1));
        for (auto it = lo; it != bs.end() && it->first == l; ++it) emit(l, s2, it->second);
      }
    }
    for (auto [l, t2] : bs) {
      if (l == kEps || !a.in_alphabet(l)) emit(l, s, t2);
    }
  });
}

Fsa shuffle(const Fsa& a, const Fsa& b, std::size_t cap) {
  return explore_pairs(a, b, cap, [&](int s, int t, const auto& as, const auto& bs, auto emit) {
    for (auto [l, s2] : as) emit(l, s2, t);
    for (auto [l, t2] : bs) emit(l, s, t2);
  });
}

std::vector<char> reachable_states(const Fsa& a) {
  std::vector<char> seen(a.num_states, 0);
  if (a.num_states == 0) return seen;
  auto adj = a.adjacency();
  std::vector<int> stack{a.init};
  seen[a.init] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (auto [l, t] : adj[s]) {
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

std::vector<char> coreachable_states(const Fsa& a) {
  std::vector<std::vector<int>> pred(a.num_states);
  for (const auto& e : a.edges) pred[e.to].push_back(e.from);
  std::vector<char> seen(a.num_states, 0);
  std::vector<int> stack;
  for (int s = 0; s < a.num_states; ++s) {
    if (a.accepting[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int p : pred[s]) {
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return seen;
}

Fsa trim(const Fsa& a) {
  auto fwd = reachable_states(a);
  auto bwd = coreachable_states(a);
  Fsa out;
  out.alphabet = a.alphabet;
  if (a.num_states == 0 || !fwd[a.init] || !bwd[a.init]) {
    out.add_state(false);
    return out;
  }
  std::vector<int> rename(a.num_states, -1);
  for (int s = 0; s < a.num_states; ++s) {
    if (fwd[s] && bwd[s]) rename[s] = out.add_state(a.accepting[s]);
  }
  out.init = rename[a.init];
  for (const auto& e : a.edges) {
    if (rename[e.from] >= 0 && rename[e.to] >= 0) out.add_edge(rename[e.from], e.label, rename[e.to]);
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return out;
}

Fsa prefix_closure(const Fsa& a) {
  Fsa out = trim(a);
  if (is_empty(out)) return out;
  std::fill(out.accepting.begin(), out.accepting.end(), 1);
  return out;
}

bool is_empty(const Fsa& a) {
  if (a.num_states == 0) return true;
  auto fwd = reachable_states(a);
  for (int s = 0; s < a.num_states; ++s)
    if (fwd[s] && a.accepting[s]) return false;
  return true;
}

namespace {

using StateSet = std::vector<int>;

StateSet eps_closure(const std::vector<std::vector<std::pair<Letter, int>>>& adj, StateSet set) {
  std::vector<char> in(adj.size(), 0);
  for (int s : set) in[s] = 1;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (auto [l, t] : adj[set[i]]) {
      if (l == kEps && !in[t]) {
        in[t] = 1;
        set.push_back(t);
      }
    }
  }
  std::sort(set.begin(), set.end());
  return set;
}

StateSet step(const std::vector<std::vector<std::pair<Letter, int>>>& adj, const StateSet& set, Letter a) {
  StateSet next;
  for (int s : set)
    for (auto [l, t] : adj[s])
      if (l == a) next.push_back(t);
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  return eps_closure(adj, std::move(next));
}

}  // namespace

bool accepts(const Fsa& a, const Word& w) {
  if (a.num_states == 0) return false;
  auto adj = a.adjacency();
  StateSet cur = eps_closure(adj, {a.init});
  for (Letter l : w) {
    cur = step(adj, cur, l);
    if (cur.empty()) return false;
  }
  for (int s : cur)
    if (a.accepting[s]) return true;
  return false;
}

std::optional<Word> shortest_word(const Fsa& a) {
  if (is_empty(a)) return std::nullopt;
  const int inf = 1 << 30;
  std::vector<std::vector<std::pair<Letter, int>>> pred(a.num_states);
  for (const auto& e : a.edges) pred[e.to].emplace_back(e.label, e.from);
  std::vector<int> dist(a.num_states, inf);
  std::deque<int> dq;
  for (int s = 0; s < a.num_states; ++s) {
    if (a.accepting[s]) {
      dist[s] = 0;
      dq.push_back(s);
    }
  }
  while (!dq.empty()) {
    int s = dq.front();
    dq.pop_front();
    for (auto [l, p] : pred[s]) {
      int w = l == kEps ? 0 : 1;
      if (dist[s] + w < dist[p]) {
        dist[p] = dist[s] + w;
        if (w == 0) dq.push_front(p);
        else dq.push_back(p);
      }
    }
  }
  auto adj = a.adjacency();
  StateSet cur = eps_closure(adj, {a.init});
  int d = inf;
  for (int s : cur) d = std::min(d, dist[s]);
  Word w;
  while (d > 0) {
    Letter best = 0;
    bool found = false;
    for (int s : cur)
      for (auto [l, t] : adj[s])
        if (l != kEps && dist[t] == d - 1 && (!found || l < best)) {
          best = l;
          found = true;
        }
    StateSet next;
    for (int s : cur)
      for (auto [l, t] : adj[s])
        if (l == best && dist[t] == d - 1) next.push_back(t);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur = eps_closure(adj, next);
    w.push_back(best);
    --d;
  }
  return w;
}

std::set<Word> enumerate_words(const Fsa& a, int max_len) {
  std::set<Word> out;
  if (a.num_states == 0) return out;
  auto adj = a.adjacency();
  std::function<void(Word&, const StateSet&)> go = [&](Word& w, const StateSet& set) {
    for (int s : set) {
      if (a.accepting[s]) {
        out.insert(w);
        break;
      }
    }
    if (static_cast<int>(w.size()) == max_len) return;
    for (Letter l : a.alphabet) {
      StateSet next = step(adj, set, l);
      if (next.empty()) continue;
      w.push_back(l);
      go(w, next);
      w.pop_back();
    }
  };
  Word w;
  go(w, eps_closure(adj, {a.init}));
  return out;
}

Fsa append_star(const Fsa& a, Letter letter) {
  Fsa out = a;
  int tail = out.add_state(true);
  for (int s = 0; s < a.num_states; ++s) {
    if (a.accepting[s]) out.add_edge(s, kEps, tail);
  }
  out.add_edge(tail, letter, tail);
  std::vector<Letter> alpha = out.alphabet;
  alpha.push_back(letter);
  out.set_alphabet(std::move(alpha));
  return out;
}

Fsa word_automaton(const Word& w, std::vector<Letter> alphabet) {
  Fsa out;
  out.set_alphabet(std::move(alphabet));
  for (std::size_t i = 0; i <= w.size(); ++i) out.add_state(i == w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out.add_edge(static_cast<int>(i), w[i], static_cast<int>(i + 1));
  return out;
}

std::pair<std::vector<int>, int> tarjan_scc(const std::vector<std::vector<int>>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on(n, 0);
  int counter = 0, ncomp = 0;
  // Iterative to stay safe on deep graphs.
  std::vector<std::pair<int, std::size_t>> call;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = 1;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < succ[v].size()) {
        int w = succ[v][i++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          call.emplace_back(w, 0);
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        int done = v;
        if (low[done] == index[done]) {
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on[w] = 0;
            comp[w] = ncomp;
          } while (w != done);
          ++ncomp;
        }
        call.pop_back();
        if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      }
    }
  }
  return {comp, ncomp};
}

bool subword_leq(const Word& u, const Word& v) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < v.size() && i < u.size(); ++j)
    if (u[i] == v[j]) ++i;
  return i == u.size();
}

}  // namespace nam
