#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "nam/action.hpp"

namespace nam {

using Word = std::vector<Letter>;

struct Edge {
  int from;
  Letter label;  // kEps for silent moves
  int to;
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// Finite automaton with an explicit, sorted alphabet. An LTS is an Fsa whose
/// states are all accepting.
struct Fsa {
  std::vector<Letter> alphabet;
  int num_states = 0;
  int init = 0;
  std::vector<char> accepting;
  std::vector<Edge> edges;

  int add_state(bool acc = false) {
    accepting.push_back(acc ? 1 : 0);
    return num_states++;
  }
  void add_edge(int from, Letter a, int to) { edges.push_back({from, a, to}); }
  bool in_alphabet(Letter a) const;
  void set_alphabet(std::vector<Letter> letters);  // sorts and dedups
  std::vector<std::vector<std::pair<Letter, int>>> adjacency() const;
};

inline constexpr std::size_t kDefaultStateCap = 2'000'000;

Fsa make_lts(int num_states, int init, std::vector<Edge> edges, std::vector<Letter> alphabet);

/// Asynchronous product (parallel composition): shared letters synchronize,
/// private letters and eps interleave. Only reachable states are built.
Fsa async_product(const Fsa& a, const Fsa& b, std::size_t state_cap = kDefaultStateCap);
/// Shuffle: no synchronization at all, even on shared letters.
Fsa shuffle(const Fsa& a, const Fsa& b, std::size_t state_cap = kDefaultStateCap);

std::vector<char> reachable_states(const Fsa& a);
std::vector<char> coreachable_states(const Fsa& a);
/// Keeps useful states only; an empty language yields a one-state automaton.
Fsa trim(const Fsa& a);
Fsa prefix_closure(const Fsa& a);
bool is_empty(const Fsa& a);
bool accepts(const Fsa& a, const Word& w);
/// Shortest accepted word, ties broken lexicographically.
std::optional<Word> shortest_word(const Fsa& a);
std::set<Word> enumerate_words(const Fsa& a, int max_len);
/// Appends `letter`* : the result accepts L(a) . letter*.
Fsa append_star(const Fsa& a, Letter letter);
/// Line automaton accepting exactly `w` over `alphabet`.
Fsa word_automaton(const Word& w, std::vector<Letter> alphabet);

/// Tarjan SCCs over an adjacency list; returns component id per node
/// (ids in reverse topological order of the condensation) and the count.
std::pair<std::vector<int>, int> tarjan_scc(const std::vector<std::vector<int>>& succ);

bool subword_leq(const Word& u, const Word& v);

}  // namespace nam
