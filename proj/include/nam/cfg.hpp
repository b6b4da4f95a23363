#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nam/fsa.hpp"
#include "nam/machine.hpp"

namespace nam {

/// Right-hand-side symbol: variables are >= 0, terminal `a` is stored as -1 - a.
using Sym = std::int32_t;
inline bool is_var(Sym s) { return s >= 0; }
inline Sym tsym(Letter a) { return -1 - a; }
inline Letter sym_letter(Sym s) { return -1 - s; }

struct Production {
  int lhs;
  std::vector<Sym> rhs;
  bool operator==(const Production&) const = default;
  auto operator<=>(const Production&) const = default;
};

struct Cfg {
  int num_vars = 0;
  int axiom = 0;
  std::vector<Letter> terminals;  // declared, sorted
  std::vector<Production> prods;
  std::vector<std::string> var_names;

  int add_var(std::string name = {});
  void add(int lhs, std::vector<Sym> rhs) { prods.push_back({lhs, std::move(rhs)}); }
  void set_terminals(std::vector<Letter> t);
  bool in_terminals(Letter a) const;
  /// Sum over productions of |rhs| + 2.
  std::size_t size() const;
  /// Sorts and removes duplicate productions.
  void normalize();
};

/// Productions are X -> a, X -> Y Z, or axiom -> eps with the axiom unused on
/// right-hand sides.
bool is_cnf(const Cfg& g);

/// Grammar for the prefix-closed trace language of `p`. When `accepting` is
/// given, only runs ending in an accepting control state count.
Cfg pdm_to_cfg(const Pdm& p, const std::vector<char>* accepting = nullptr);

/// Removes unproductive and unreachable variables. An empty language yields a
/// grammar with a single variable and no productions.
Cfg trim_cfg(const Cfg& g);
Cfg cfg_to_cnf(const Cfg& g);

bool cfg_is_empty(const Cfg& g);
/// Shortest derivable word; ties broken lexicographically.
std::optional<Word> cfg_extract_word(const Cfg& g, std::size_t max_len = 1'000'000);
std::set<Word> enumerate_words(const Cfg& g, int max_len);

/// Nonemptiness of the k-index language. Every production may hold at most
/// two variables (CNF and the output of `bowtie` qualify).
bool k_index_nonempty(const Cfg& g, int k);

int grammar_scc_count(const Cfg& g);
/// n + 2 * (number of SCCs); L^(cover_index) is a cover of L for CNF input.
int cover_index(const Cfg& g);

inline constexpr std::size_t kDefaultSupportCap = 1'000'000;
/// FSA whose language is a support of L(g) (g in CNF or X -> a? Y1..Ym form).
Fsa support_fsa(const Cfg& g, std::size_t state_cap = kDefaultSupportCap);

/// Adds an eps-reachable fresh accepting sink; it becomes the only accepting state.
Fsa single_accepting(const Fsa& a);

enum class BowtieMode { Full, Trimmed };
/// Grammar-automaton asynchronous product; `g` must be in CNF. Full mode
/// emits every variable of Q x X x Q; trimmed mode keeps the productive,
/// reachable ones (same language and same k-index language).
Cfg bowtie(const Cfg& g, const Fsa& a, BowtieMode mode = BowtieMode::Trimmed);

struct ProductResult {
  bool nonempty = false;
  std::optional<Word> witness;
  std::size_t facts = 0;
  int layers = 0;
};
/// Decides L^(k)(g bowtie a) != empty without materializing the grammar
/// (k == 0 means unbounded index). `g` must be in CNF.
ProductResult product_check(const Cfg& g, const Fsa& a, int k, bool want_witness = false);

}  // namespace nam
