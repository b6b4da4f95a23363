#pragma once

// Test-side oracles and random instance builders. Everything here is written
// independently of the library algorithms it is used to check.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "nam/cfg.hpp"
#include "nam/generators.hpp"
#include "nam/store.hpp"
#include "nam/verifier.hpp"

namespace testkit {

using nam::Cfg;
using nam::Fsa;
using nam::Letter;
using nam::Sym;
using nam::Word;

inline bool brute_force_sat(const nam::CnfFormula& f) {
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << f.num_vars); ++a) {
    bool all = true;
    for (const auto& c : f.clauses) {
      bool some = false;
      for (int l : c) {
        const bool v = (a >> (std::abs(l) - 1)) & 1;
        if ((l > 0) == v) some = true;
      }
      if (!some) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

inline nam::CnfFormula random_cnf(std::mt19937_64& rng, int vars, int clauses) {
  nam::CnfFormula f;
  f.num_vars = vars;
  std::uniform_int_distribution<int> var(1, vars), sign(0, 1);
  for (int j = 0; j < clauses; ++j) {
    std::array<int, 3> c{};
    for (int& l : c) l = var(rng) * (sign(rng) ? 1 : -1);
    f.clauses.push_back(c);
  }
  return f;
}

// Words of length <= max_len derivable with sentential forms holding at most
// k variables (k <= 0: unbounded, forms capped by max_len + 4 variables).
// Productions never delete terminals, so terminals only accumulate.
inline std::set<Word> kindex_words(const Cfg& g, int k, int max_len) {
  std::vector<std::vector<const nam::Production*>> by_lhs(g.num_vars);
  for (const auto& p : g.prods) by_lhs[p.lhs].push_back(&p);
  const int var_cap = k > 0 ? k : max_len + 4;
  std::set<std::vector<Sym>> seen;
  std::set<Word> out;
  std::vector<std::vector<Sym>> stack{{g.axiom}};
  seen.insert(stack.back());
  while (!stack.empty()) {
    auto form = std::move(stack.back());
    stack.pop_back();
    int vars = 0, terms = 0;
    for (Sym s : form) (nam::is_var(s) ? vars : terms) += 1;
    if (vars == 0) {
      Word w;
      for (Sym s : form) w.push_back(nam::sym_letter(s));
      out.insert(w);
      continue;
    }
    for (std::size_t i = 0; i < form.size(); ++i) {
      if (!nam::is_var(form[i])) continue;
      for (const auto* p : by_lhs[form[i]]) {
        int nv = vars - 1, nt = terms;
        for (Sym s : p->rhs) (nam::is_var(s) ? nv : nt) += 1;
        if (nv > var_cap || nt > max_len) continue;
        std::vector<Sym> next(form.begin(), form.begin() + i);
        next.insert(next.end(), p->rhs.begin(), p->rhs.end());
        next.insert(next.end(), form.begin() + i + 1, form.end());
        if (seen.insert(next).second) stack.push_back(std::move(next));
      }
    }
  }
  return out;
}

// Words w of length <= max_len whose projections are u in `lu` over `au` and
// v in `lv` over `av` (letters of both alphabets synchronize).
inline std::set<Word> sync_merge(const std::set<Word>& lu, const std::vector<Letter>& au, const std::set<Word>& lv,
                                 const std::vector<Letter>& av, int max_len) {
  auto in = [](const std::vector<Letter>& a, Letter l) { return std::find(a.begin(), a.end(), l) != a.end(); };
  std::set<Word> out;
  Word cur;
  std::function<void(const Word&, std::size_t, const Word&, std::size_t)> go = [&](const Word& u, std::size_t i,
                                                                                 const Word& v, std::size_t j) {
    if (static_cast<int>(cur.size()) > max_len) return;
    if (i == u.size() && j == v.size()) {
      out.insert(cur);
      return;
    }
    if (i < u.size() && !in(av, u[i])) {
      cur.push_back(u[i]);
      go(u, i + 1, v, j);
      cur.pop_back();
    }
    if (j < v.size() && !in(au, v[j])) {
      cur.push_back(v[j]);
      go(u, i, v, j + 1);
      cur.pop_back();
    }
    if (i < u.size() && j < v.size() && u[i] == v[j]) {
      cur.push_back(u[i]);
      go(u, i + 1, v, j + 1);
      cur.pop_back();
    }
  };
  for (const auto& u : lu)
    for (const auto& v : lv) go(u, 0, v, 0);
  return out;
}

// Random CNF grammar: `vars` variables over terminals 0..terms-1.
inline Cfg random_cnf_grammar(std::mt19937_64& rng, int vars, int terms, int prods) {
  Cfg g;
  for (int i = 0; i < vars; ++i) g.add_var();
  std::vector<Letter> t;
  for (int i = 0; i < terms; ++i) t.push_back(i);
  g.set_terminals(t);
  std::uniform_int_distribution<int> var(0, vars - 1), term(0, terms - 1), coin(0, 2);
  // Axiom never occurs on a right-hand side when it has an eps production.
  const bool eps = coin(rng) == 0;
  for (int i = 0; i < prods; ++i) {
    const int lhs = var(rng);
    if (coin(rng) == 0) {
      g.add(lhs, {nam::tsym(term(rng))});
    } else {
      int b = var(rng), c = var(rng);
      if (eps && vars > 1) {
        while (b == 0) b = var(rng);
        while (c == 0) c = var(rng);
      }
      if (eps && vars == 1) {
        g.add(lhs, {nam::tsym(term(rng))});
        continue;
      }
      g.add(lhs, {b, c});
    }
  }
  if (eps) g.add(0, {});
  g.normalize();
  return g;
}

inline Fsa random_fsa(std::mt19937_64& rng, int states, const std::vector<Letter>& alphabet, int edges) {
  Fsa a;
  for (int i = 0; i < states; ++i) a.add_state(false);
  std::uniform_int_distribution<int> st(0, states - 1), lt(0, static_cast<int>(alphabet.size()));
  for (int i = 0; i < edges; ++i) {
    const int l = lt(rng);
    a.add_edge(st(rng), l == static_cast<int>(alphabet.size()) ? nam::kEps : alphabet[l], st(rng));
  }
  a.accepting[st(rng)] = 1;
  if (std::bernoulli_distribution(0.5)(rng)) a.accepting[st(rng)] = 1;
  a.set_alphabet(alphabet);
  return a;
}

// A compatible (u, M) pair built from a random run of the extended store:
// leader letters go to u, contributor letters are dealt to `k` words.
struct CompatPair {
  Word u;
  std::vector<Word> m;
  int nvalues;
};

inline CompatPair random_compatible(std::mt19937_64& rng, int nvalues, int k, int length) {
  auto es = nam::build_extended_store(nvalues);
  auto adj = es.fsa.adjacency();
  CompatPair out{{}, std::vector<Word>(k), nvalues};
  int s = es.fsa.init;
  std::uniform_int_distribution<int> who(0, k - 1);
  for (int step = 0; step < length; ++step) {
    const auto& moves = adj[s];
    if (moves.empty()) break;
    auto [l, t] = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
    s = t;
    if (nam::decode(l).role == nam::Role::Leader) out.u.push_back(l);
    else out.m[who(rng)].push_back(l);
  }
  return out;
}

inline nam::RandomSizes small_sizes(std::mt19937_64& rng, int max_states = 4, int max_values = 2) {
  nam::RandomSizes s;
  s.states = std::uniform_int_distribution<int>(1, max_states)(rng);
  s.values = std::uniform_int_distribution<int>(1, max_values)(rng);
  s.extra_edges = std::uniform_int_distribution<int>(0, 4)(rng);
  s.symbols = 2;
  s.hash_prob = 0.15;
  return s;
}

}  // namespace testkit
