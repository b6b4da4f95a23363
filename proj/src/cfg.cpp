#include "nam/cfg.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace nam {

int Cfg::add_var(std::string name) {
  if (name.empty()) name = "X" + std::to_string(num_vars);
  var_names.push_back(std::move(name));
  return num_vars++;
}

void Cfg::set_terminals(std::vector<Letter> t) {
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  terminals = std::move(t);
}

bool Cfg::in_terminals(Letter a) const { return std::binary_search(terminals.begin(), terminals.end(), a); }

std::size_t Cfg::size() const {
  std::size_t s = 0;
  for (const auto& p : prods) s += p.rhs.size() + 2;
  return s;
}

void Cfg::normalize() {
  std::sort(prods.begin(), prods.end());
  prods.erase(std::unique(prods.begin(), prods.end()), prods.end());
}

bool is_cnf(const Cfg& g) {
  for (const auto& p : g.prods) {
    if (p.rhs.empty()) {
      if (p.lhs != g.axiom) return false;
      continue;
    }
    if (p.rhs.size() == 1) {
      if (is_var(p.rhs[0])) return false;
      continue;
    }
    if (p.rhs.size() != 2 || !is_var(p.rhs[0]) || !is_var(p.rhs[1])) return false;
  }
  bool axiom_eps = std::any_of(g.prods.begin(), g.prods.end(),
                               [&](const Production& p) { return p.lhs == g.axiom && p.rhs.empty(); });
  if (axiom_eps) {
    for (const auto& p : g.prods)
      for (Sym s : p.rhs)
        if (s == g.axiom) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// PDM to grammar

Cfg pdm_to_cfg(const Pdm& p, const std::vector<char>* accepting) {
  const int nq = p.num_states + 1;  // extra halting state
  const int h = p.num_states;
  const int ng = std::max(p.num_symbols, 1);
  auto is_acc = [&](int q) { return accepting == nullptr || (q < p.num_states && (*accepting)[q]); };

  std::vector<std::vector<PdmRule>> by_top(static_cast<std::size_t>(nq) * ng);
  for (const auto& r : p.rules) by_top[static_cast<std::size_t>(r.from) * ng + r.top].push_back(r);
  for (int q = 0; q < nq; ++q) {
    if (q != h && !is_acc(q)) continue;
    for (int a = 0; a < ng; ++a) by_top[static_cast<std::size_t>(q) * ng + a].push_back({q, a, kEps, h, {}});
  }

  Cfg g;
  g.set_terminals(p.alphabet);
  g.axiom = g.add_var("S");
  std::unordered_map<std::uint64_t, int> ids;
  std::deque<std::tuple<int, int, int>> todo;
  auto var = [&](int from, int sym, int to) {
    std::uint64_t key = (static_cast<std::uint64_t>(from) * ng + sym) * nq + to;
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    auto name_of = [&](int q) { return q == h ? std::string("halt") : (q < (int)p.state_names.size() ? p.state_names[q] : std::to_string(q)); };
    std::string sname = sym < (int)p.symbol_names.size() ? p.symbol_names[sym] : std::to_string(sym);
    int id = g.add_var("[" + name_of(from) + "," + sname + "," + name_of(to) + "]");
    ids.emplace(key, id);
    todo.emplace_back(from, sym, to);
    return id;
  };

  g.add(g.axiom, {var(p.init, p.init_symbol, h)});
  for (int q = 0; q < p.num_states; ++q)
    if (is_acc(q)) g.add(g.axiom, {var(p.init, p.init_symbol, q)});

  while (!todo.empty()) {
    auto [from, sym, to] = todo.front();
    todo.pop_front();
    const int lhs = var(from, sym, to);
    for (const auto& r : by_top[static_cast<std::size_t>(from) * ng + sym]) {
      std::vector<Sym> head;
      if (r.label != kEps) head.push_back(tsym(r.label));
      const int m = static_cast<int>(r.push.size());
      if (m == 0) {
        if (r.to == to) g.add(lhs, head);
        continue;
      }
      // Enumerate intermediate states r_1 .. r_{m-1}.
      std::vector<int> mid(m - 1, 0);
      while (true) {
        std::vector<Sym> rhs = head;
        int cur = r.to;
        for (int i = 0; i < m; ++i) {
          int nxt = i + 1 < m ? mid[i] : to;
          rhs.push_back(var(cur, r.push[i], nxt));
          cur = nxt;
        }
        g.add(lhs, std::move(rhs));
        int i = 0;
        while (i < m - 1 && ++mid[i] == nq) mid[i++] = 0;
        if (i == m - 1) break;
      }
    }
  }
  return trim_cfg(g);
}

// ---------------------------------------------------------------------------
// Trimming, emptiness, CNF

namespace {

std::vector<char> productive_vars(const Cfg& g) {
  std::vector<char> prod(g.num_vars, 0);
  std::vector<int> missing(g.prods.size(), 0);
  std::vector<std::vector<int>> occurs(g.num_vars);
  std::deque<int> queue;
  for (std::size_t i = 0; i < g.prods.size(); ++i) {
    for (Sym s : g.prods[i].rhs) {
      if (is_var(s)) {
        ++missing[i];
        occurs[s].push_back(static_cast<int>(i));
      }
    }
    if (missing[i] == 0 && !prod[g.prods[i].lhs]) {
      prod[g.prods[i].lhs] = 1;
      queue.push_back(g.prods[i].lhs);
    }
  }
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int i : occurs[x]) {
      if (--missing[i] == 0 && !prod[g.prods[i].lhs]) {
        prod[g.prods[i].lhs] = 1;
        queue.push_back(g.prods[i].lhs);
      }
    }
  }
  return prod;
}

std::vector<Letter> used_terminals(const Cfg& g) {
  std::vector<Letter> t = g.terminals;
  for (const auto& p : g.prods)
    for (Sym s : p.rhs)
      if (!is_var(s)) t.push_back(sym_letter(s));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace

Cfg trim_cfg(const Cfg& g) {
  auto prod = productive_vars(g);
  Cfg out;
  out.terminals = g.terminals;
  if (g.num_vars == 0 || !prod[g.axiom]) {
    out.axiom = out.add_var(g.var_names.empty() ? "S" : g.var_names[g.axiom]);
    return out;
  }
  std::vector<std::vector<int>> by_lhs(g.num_vars);
  for (std::size_t i = 0; i < g.prods.size(); ++i) by_lhs[g.prods[i].lhs].push_back(static_cast<int>(i));
  auto usable = [&](const Production& p) {
    return std::all_of(p.rhs.begin(), p.rhs.end(), [&](Sym s) { return !is_var(s) || prod[s]; });
  };
  std::vector<int> remap(g.num_vars, -1);
  std::deque<int> queue{g.axiom};
  remap[g.axiom] = out.add_var(g.var_names[g.axiom]);
  out.axiom = remap[g.axiom];
  std::vector<int> order;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    order.push_back(x);
    for (int i : by_lhs[x]) {
      const auto& p = g.prods[i];
      if (!usable(p)) continue;
      for (Sym s : p.rhs) {
        if (is_var(s) && remap[s] < 0) {
          remap[s] = out.add_var(g.var_names[s]);
          queue.push_back(s);
        }
      }
    }
  }
  for (int x : order) {
    for (int i : by_lhs[x]) {
      const auto& p = g.prods[i];
      if (!usable(p)) continue;
      std::vector<Sym> rhs;
      rhs.reserve(p.rhs.size());
      for (Sym s : p.rhs) rhs.push_back(is_var(s) ? remap[s] : s);
      out.add(remap[x], std::move(rhs));
    }
  }
  out.normalize();
  return out;
}

bool cfg_is_empty(const Cfg& g) {
  if (g.num_vars == 0) return true;
  return !productive_vars(g)[g.axiom];
}

Cfg cfg_to_cnf(const Cfg& input) {
  Cfg g = trim_cfg(input);
  g.set_terminals(used_terminals(g));
  // START: fresh axiom.
  const int old_axiom = g.axiom;
  g.axiom = g.add_var("S0");
  g.add(g.axiom, {old_axiom});

  // TERM: terminals inside long right-hand sides get their own variable.
  std::map<Letter, int> term_var;
  {
    std::vector<Production> prods;
    for (auto p : g.prods) {
      if (p.rhs.size() >= 2) {
        for (Sym& s : p.rhs) {
          if (is_var(s)) continue;
          Letter a = sym_letter(s);
          auto it = term_var.find(a);
          if (it == term_var.end()) {
            int t = g.add_var("T" + std::to_string(a));
            it = term_var.emplace(a, t).first;
          }
          s = it->second;
        }
      }
      prods.push_back(std::move(p));
    }
    for (auto [a, t] : term_var) prods.push_back({t, {tsym(a)}});
    g.prods = std::move(prods);
  }

  // BIN: split right-hand sides longer than two.
  {
    std::vector<Production> prods;
    for (auto& p : g.prods) {
      if (p.rhs.size() <= 2) {
        prods.push_back(p);
        continue;
      }
      int lhs = p.lhs;
      for (std::size_t i = 0; i + 2 < p.rhs.size(); ++i) {
        int nxt = g.add_var();
        prods.push_back({lhs, {p.rhs[i], nxt}});
        lhs = nxt;
      }
      prods.push_back({lhs, {p.rhs[p.rhs.size() - 2], p.rhs.back()}});
    }
    g.prods = std::move(prods);
  }

  // DEL: remove eps-productions.
  {
    std::vector<char> nullable(g.num_vars, 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& p : g.prods) {
        if (nullable[p.lhs]) continue;
        if (std::all_of(p.rhs.begin(), p.rhs.end(), [&](Sym s) { return is_var(s) && nullable[s]; })) {
          nullable[p.lhs] = 1;
          changed = true;
        }
      }
    }
    std::vector<Production> prods;
    for (const auto& p : g.prods) {
      const std::size_t n = p.rhs.size();
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<Sym> rhs;
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
          if (mask & (1u << i)) {
            if (!is_var(p.rhs[i]) || !nullable[p.rhs[i]]) ok = false;
          } else {
            rhs.push_back(p.rhs[i]);
          }
        }
        if (ok && !rhs.empty()) prods.push_back({p.lhs, std::move(rhs)});
      }
    }
    if (nullable[g.axiom]) prods.push_back({g.axiom, {}});
    g.prods = std::move(prods);
    g.normalize();
  }

  // UNIT: remove X -> Y.
  {
    std::vector<std::vector<int>> unit(g.num_vars);
    for (const auto& p : g.prods)
      if (p.rhs.size() == 1 && is_var(p.rhs[0])) unit[p.lhs].push_back(p.rhs[0]);
    std::vector<std::vector<int>> by_lhs(g.num_vars);
    for (std::size_t i = 0; i < g.prods.size(); ++i) by_lhs[g.prods[i].lhs].push_back(static_cast<int>(i));
    std::vector<Production> prods;
    for (int x = 0; x < g.num_vars; ++x) {
      std::vector<char> seen(g.num_vars, 0);
      std::vector<int> stack{x};
      seen[x] = 1;
      while (!stack.empty()) {
        int y = stack.back();
        stack.pop_back();
        for (int i : by_lhs[y]) {
          const auto& p = g.prods[i];
          if (p.rhs.size() == 1 && is_var(p.rhs[0])) continue;
          if (p.rhs.empty() && x != g.axiom) continue;
          prods.push_back({x, p.rhs});
        }
        for (int z : unit[y])
          if (!seen[z]) {
            seen[z] = 1;
            stack.push_back(z);
          }
      }
    }
    g.prods = std::move(prods);
    g.normalize();
  }
  g.terminals = input.terminals;
  return trim_cfg(g);
}

// ---------------------------------------------------------------------------
// Word extraction and enumeration

std::optional<Word> cfg_extract_word(const Cfg& g, std::size_t max_len) {
  if (cfg_is_empty(g)) return std::nullopt;
  constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();
  auto sat_add = [](std::uint64_t a, std::uint64_t b) { return a > kInf - b ? kInf : a + b; };
  std::vector<std::uint64_t> len(g.num_vars, kInf);
  auto prod_len = [&](const Production& p) {
    std::uint64_t s = 0;
    for (Sym x : p.rhs) s = sat_add(s, is_var(x) ? len[x] : 1);
    return s;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.prods) {
      auto l = prod_len(p);
      if (l < len[p.lhs]) {
        len[p.lhs] = l;
        changed = true;
      }
    }
  }
  if (len[g.axiom] > max_len) throw ResourceError("shortest word exceeds the length cap");
  std::vector<std::optional<Word>> best(g.num_vars);
  changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.prods) {
      if (len[p.lhs] > max_len || prod_len(p) != len[p.lhs]) continue;
      Word w;
      bool ok = true;
      for (Sym x : p.rhs) {
        if (!is_var(x)) {
          w.push_back(sym_letter(x));
        } else if (best[x]) {
          w.insert(w.end(), best[x]->begin(), best[x]->end());
        } else {
          ok = false;
          break;
        }
      }
      if (ok && (!best[p.lhs] || w < *best[p.lhs])) {
        best[p.lhs] = std::move(w);
        changed = true;
      }
    }
  }
  return best[g.axiom];
}

std::set<Word> enumerate_words(const Cfg& g, int max_len) {
  std::vector<std::set<Word>> sets(g.num_vars);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.prods) {
      std::set<Word> cur{Word{}};
      for (Sym s : p.rhs) {
        std::set<Word> nxt;
        if (!is_var(s)) {
          for (const auto& w : cur) {
            if (static_cast<int>(w.size()) + 1 > max_len) continue;
            Word v = w;
            v.push_back(sym_letter(s));
            nxt.insert(std::move(v));
          }
        } else {
          for (const auto& w : cur)
            for (const auto& u : sets[s]) {
              if (w.size() + u.size() > static_cast<std::size_t>(max_len)) continue;
              Word v = w;
              v.insert(v.end(), u.begin(), u.end());
              nxt.insert(std::move(v));
            }
        }
        cur = std::move(nxt);
        if (cur.empty()) break;
      }
      for (auto& w : cur)
        if (sets[p.lhs].insert(w).second) changed = true;
    }
  }
  return g.num_vars ? sets[g.axiom] : std::set<Word>{};
}

// ---------------------------------------------------------------------------
// Index-bounded languages

bool k_index_nonempty(const Cfg& g, int k) {
  if (k <= 0 || g.num_vars == 0) return false;
  struct Shape {
    int lhs;
    int a = -1, b = -1;
  };
  std::vector<Shape> shapes;
  for (const auto& p : g.prods) {
    Shape s{p.lhs};
    for (Sym x : p.rhs) {
      if (!is_var(x)) continue;
      if (s.a < 0) s.a = x;
      else if (s.b < 0) s.b = x;
      else throw std::invalid_argument("k-index check needs at most two variables per production");
    }
    shapes.push_back(s);
  }
  std::vector<char> prev(g.num_vars, 0);
  for (int layer = 1; layer <= k; ++layer) {
    std::vector<char> cur = prev;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& s : shapes) {
        if (cur[s.lhs]) continue;
        bool ok;
        if (s.a < 0) ok = true;
        else if (s.b < 0) ok = cur[s.a];
        else ok = (prev[s.a] && cur[s.b]) || (cur[s.a] && prev[s.b]);
        if (ok) {
          cur[s.lhs] = 1;
          changed = true;
        }
      }
    }
    if (cur[g.axiom]) return true;
    if (cur == prev) return false;
    prev = std::move(cur);
  }
  return false;
}

int grammar_scc_count(const Cfg& g) {
  std::vector<std::vector<int>> succ(g.num_vars);
  for (const auto& p : g.prods)
    for (Sym s : p.rhs)
      if (is_var(s)) succ[p.lhs].push_back(s);
  return tarjan_scc(succ).second;
}

int cover_index(const Cfg& g) { return g.num_vars + 2 * grammar_scc_count(g); }

Fsa support_fsa(const Cfg& g, std::size_t state_cap) {
  struct Step {
    Letter label;
    std::vector<int> tail;
  };
  std::vector<std::vector<Step>> by_lhs(g.num_vars);
  for (const auto& p : g.prods) {
    Step s{kEps, {}};
    std::size_t i = 0;
    if (!p.rhs.empty() && !is_var(p.rhs[0])) {
      s.label = sym_letter(p.rhs[0]);
      i = 1;
    }
    for (; i < p.rhs.size(); ++i) {
      if (!is_var(p.rhs[i])) throw std::invalid_argument("support automaton needs productions of the form X -> a? Y1..Ym");
      s.tail.push_back(p.rhs[i]);
    }
    by_lhs[p.lhs].push_back(std::move(s));
  }
  Fsa f;
  f.set_alphabet(used_terminals(g));
  const std::size_t bound = static_cast<std::size_t>(std::max(g.num_vars, 1));
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> states;
  auto get = [&](std::vector<int> s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    if (states.size() >= state_cap) throw ResourceError("support automaton exceeds the state cap");
    int id = f.add_state(s.empty());
    ids.emplace(s, id);
    states.push_back(std::move(s));
    return id;
  };
  if (g.num_vars == 0) {
    f.add_state(false);
    return f;
  }
  f.init = get({g.axiom});
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].empty()) continue;
    const int head = states[i].front();
    for (const auto& step : by_lhs[head]) {
      if (step.tail.size() + states[i].size() - 1 > bound) continue;
      std::vector<int> nxt = step.tail;
      nxt.insert(nxt.end(), states[i].begin() + 1, states[i].end());
      int to = get(std::move(nxt));
      f.add_edge(static_cast<int>(i), step.label, to);
    }
  }
  return trim(f);
}

Fsa single_accepting(const Fsa& a) {
  Fsa out = a;
  int sink = out.add_state(false);
  for (int q = 0; q < a.num_states; ++q)
    if (a.accepting[q]) out.add_edge(q, kEps, sink);
  std::fill(out.accepting.begin(), out.accepting.end(), 0);
  out.accepting[sink] = 1;
  return out;
}

// ---------------------------------------------------------------------------
// Grammar x automaton product

namespace {

void require_cnf_shape(const Cfg& g) {
  for (const auto& p : g.prods) {
    bool ok = p.rhs.empty() || (p.rhs.size() == 1 && !is_var(p.rhs[0])) ||
              (p.rhs.size() == 2 && is_var(p.rhs[0]) && is_var(p.rhs[1]));
    if (!ok) throw std::invalid_argument("grammar must be in Chomsky normal form");
  }
}

// Facts <q, X, q'>: the automaton can move from q to q' while X derives a word,
// letters outside the grammar alphabet interleaving freely.
class ProductEngine {
 public:
  ProductEngine(const Cfg& g, const Fsa& a) : g_(g), a_(a), nq_(a.num_states), nx_(g.num_vars) {
    require_cnf_shape(g);
    auto sigma_g = used_terminals(g);
    auto in_g = [&](Letter l) { return l != kEps && std::binary_search(sigma_g.begin(), sigma_g.end(), l); };
    pred_.resize(nq_);
    succ_.resize(nq_);
    for (const auto& e : a.edges) {
      if (in_g(e.label)) {
        sync_[e.label].push_back({e.from, e.to});
      } else {
        pred_[e.to].push_back({e.from, e.label});
        succ_[e.from].push_back({e.label, e.to});
      }
    }
    by_left_.resize(nx_);
    by_right_.resize(nx_);
    for (const auto& p : g.prods) {
      if (p.rhs.size() == 2) {
        by_left_[p.rhs[0]].push_back({p.lhs, p.rhs[1]});
        by_right_[p.rhs[1]].push_back({p.lhs, p.rhs[0]});
      } else {
        Letter l = p.rhs.empty() ? kEps : sym_letter(p.rhs[0]);
        terms_.push_back({p.lhs, l});
      }
    }
    closure_.resize(nq_);
    closure_done_.assign(nq_, 0);
  }

  // k == 0: unbounded index.
  ProductResult run(int k, bool want_witness) {
    want_witness_ = want_witness;
    ProductResult res;
    if (nx_ == 0 || nq_ == 0) return res;
    Layer prev = fresh_layer();
    const int layers = k == 0 ? 1 : k;
    for (int layer = 1; layer <= layers; ++layer) {
      Layer cur = fresh_layer();
      partner_ = k == 0 ? &cur : &prev;
      cur_ = &cur;
      for (auto key : prev.order) {
        auto [q, x, q2] = split(key);
        add(q, x, q2, Reason{});
      }
      seed_terms();
      drain();
      res.layers = layer;
      res.facts = cur.order.size();
      for (int qa = 0; qa < nq_; ++qa) {
        if (!a_.accepting[qa]) continue;
        auto key = join(a_.init, g_.axiom, qa);
        if (cur.contains(key)) {
          res.nonempty = true;
          if (want_witness) res.witness = word_of(key);
          last_ = std::move(cur);
          return res;
        }
      }
      if (k != 0 && cur.order.size() == prev.order.size()) {
        last_ = std::move(cur);
        return res;
      }
      prev = std::move(cur);
    }
    last_ = std::move(prev);
    return res;
  }

  bool fact(int q, int x, int q2) const { return last_.contains(join(q, x, q2)); }
  const std::vector<int>& ends(int q, int x) const {
    static const std::vector<int> kNone;
    const auto* v = last_.fwd(static_cast<std::uint64_t>(q) * nx_ + x);
    return v ? *v : kNone;
  }
  const std::vector<int>& closure(int q) {
    if (!closure_done_[q]) {
      std::vector<char> seen(nq_, 0);
      std::vector<int> stack{q}, out;
      seen[q] = 1;
      while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        out.push_back(s);
        for (auto [l, t] : succ_[s])
          if (!seen[t]) {
            seen[t] = 1;
            stack.push_back(t);
          }
      }
      std::sort(out.begin(), out.end());
      closure_[q] = std::move(out);
      closure_done_[q] = 1;
    }
    return closure_[q];
  }
  bool in_closure(int q, int q2) {
    const auto& c = closure(q);
    return std::binary_search(c.begin(), c.end(), q2);
  }
  const std::vector<std::pair<Letter, int>>& free_succ(int q) const { return succ_[q]; }
  const std::vector<std::pair<int, int>>& sync_edges(Letter l) const {
    static const std::vector<std::pair<int, int>> kNone;
    auto it = sync_.find(l);
    return it == sync_.end() ? kNone : it->second;
  }

 private:
  enum class Why : std::uint8_t { None, Term, Free, Bin };
  struct Reason {
    Why why = Why::None;
    Letter sym = kEps;
    int a = 0, b = 0, c = 0;
  };
  // Fact table; dense arrays when the index space is small enough.
  class Layer {
   public:
    Layer() = default;
    Layer(std::uint64_t keys, std::uint64_t slots) {
      if (keys <= kDenseKeys) bits_.assign((keys + 63) / 64, 0);
      if (slots <= kDenseSlots) {
        fwd_dense_.resize(slots);
        rev_dense_.resize(slots);
      }
    }
    bool insert(std::uint64_t key) {
      if (bits_.empty()) return seen_.insert(key).second;
      auto& word = bits_[key >> 6];
      const std::uint64_t bit = std::uint64_t{1} << (key & 63);
      if (word & bit) return false;
      word |= bit;
      return true;
    }
    bool contains(std::uint64_t key) const {
      if (bits_.empty()) return seen_.count(key) > 0;
      return (bits_[key >> 6] >> (key & 63)) & 1;
    }
    void link(std::uint64_t from, int to, std::uint64_t back, int origin) {
      if (fwd_dense_.empty()) {
        fwd_[from].push_back(to);
        rev_[back].push_back(origin);
      } else {
        fwd_dense_[from].push_back(to);
        rev_dense_[back].push_back(origin);
      }
    }
    const std::vector<int>* fwd(std::uint64_t slot) const { return find(fwd_dense_, fwd_, slot); }
    const std::vector<int>* rev(std::uint64_t slot) const { return find(rev_dense_, rev_, slot); }
    std::vector<std::uint64_t> order;

   private:
    static constexpr std::uint64_t kDenseKeys = std::uint64_t{1} << 30;
    static constexpr std::uint64_t kDenseSlots = std::uint64_t{1} << 20;
    static const std::vector<int>* find(const std::vector<std::vector<int>>& dense,
                                        const std::unordered_map<std::uint64_t, std::vector<int>>& sparse,
                                        std::uint64_t slot) {
      if (!dense.empty()) return dense[slot].empty() ? nullptr : &dense[slot];
      auto it = sparse.find(slot);
      return it == sparse.end() ? nullptr : &it->second;
    }
    std::vector<std::uint64_t> bits_;
    std::unordered_set<std::uint64_t> seen_;
    std::vector<std::vector<int>> fwd_dense_, rev_dense_;
    std::unordered_map<std::uint64_t, std::vector<int>> fwd_, rev_;
  };

  Layer fresh_layer() const {
    const auto slots = static_cast<std::uint64_t>(nq_) * nx_;
    return Layer(slots * nq_, slots);
  }

  std::uint64_t join(int q, int x, int q2) const {
    return (static_cast<std::uint64_t>(q) * nx_ + x) * nq_ + q2;
  }
  std::tuple<int, int, int> split(std::uint64_t key) const {
    int q2 = static_cast<int>(key % nq_);
    key /= nq_;
    return {static_cast<int>(key / nx_), static_cast<int>(key % nx_), q2};
  }

  void add(int q, int x, int q2, const Reason& why) {
    auto key = join(q, x, q2);
    if (!cur_->insert(key)) return;
    cur_->link(static_cast<std::uint64_t>(q) * nx_ + x, q2, static_cast<std::uint64_t>(q2) * nx_ + x, q);
    cur_->order.push_back(key);
    queue_.push_back(key);
    if (want_witness_ && why.why != Why::None) reasons_.try_emplace(key, why);
  }

  void seed_terms() {
    for (auto [x, l] : terms_) {
      if (l == kEps || !a_.in_alphabet(l)) {
        for (int q = 0; q < nq_; ++q)
          for (int q2 : closure(q)) add(q, x, q2, Reason{Why::Term, l, q, q2});
      } else {
        for (auto [q, q1] : sync_edges(l))
          for (int q2 : closure(q1)) add(q, x, q2, Reason{Why::Term, l, q1, q2, q});
      }
    }
  }

  void drain() {
    while (!queue_.empty()) {
      auto key = queue_.front();
      queue_.pop_front();
      auto [q, x, q2] = split(key);
      for (auto [p, l] : pred_[q]) add(p, x, q2, Reason{Why::Free, l, q});
      for (auto [w, c] : by_left_[x]) {
        const auto* ends = partner_->fwd(static_cast<std::uint64_t>(q2) * nx_ + c);
        if (!ends) continue;
        const auto& vec = *ends;
        for (std::size_t i = 0; i < vec.size(); ++i) add(q, w, vec[i], Reason{Why::Bin, kEps, x, q2, c});
      }
      for (auto [w, b] : by_right_[x]) {
        const auto* starts = partner_->rev(static_cast<std::uint64_t>(q) * nx_ + b);
        if (!starts) continue;
        const auto& vec = *starts;
        for (std::size_t i = 0; i < vec.size(); ++i) add(vec[i], w, q2, Reason{Why::Bin, kEps, b, q, x});
      }
    }
  }

  // Letters of some free path from `from` to `to`.
  Word free_path(int from, int to) const {
    if (from == to) return {};
    std::vector<int> parent(nq_, -1);
    std::vector<Letter> via(nq_, kEps);
    std::deque<int> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
      int s = queue.front();
      queue.pop_front();
      if (s == to) break;
      for (auto [l, t] : succ_[s])
        if (parent[t] < 0) {
          parent[t] = s;
          via[t] = l;
          queue.push_back(t);
        }
    }
    Word w;
    for (int s = to; s != from; s = parent[s])
      if (via[s] != kEps) w.push_back(via[s]);
    std::reverse(w.begin(), w.end());
    return w;
  }

  Word word_of(std::uint64_t root) const {
    Word out;
    std::vector<std::uint64_t> stack{root};
    while (!stack.empty()) {
      auto key = stack.back();
      stack.pop_back();
      const Reason& r = reasons_.at(key);
      auto [q, x, q2] = split(key);
      switch (r.why) {
        case Why::Term: {
          if (r.sym != kEps) out.push_back(r.sym);
          auto tail = free_path(r.a, r.b);
          out.insert(out.end(), tail.begin(), tail.end());
          break;
        }
        case Why::Free:
          if (r.sym != kEps) out.push_back(r.sym);
          stack.push_back(join(r.a, x, q2));
          break;
        case Why::Bin:
          stack.push_back(join(r.b, r.c, q2));
          stack.push_back(join(q, r.a, r.b));
          break;
        case Why::None:
          throw std::logic_error("fact without derivation");
      }
      if (out.size() > 10'000'000) throw ResourceError("witness word too long");
    }
    return out;
  }

  const Cfg& g_;
  const Fsa& a_;
  int nq_, nx_;
  std::vector<std::vector<std::pair<int, Letter>>> pred_;
  std::vector<std::vector<std::pair<Letter, int>>> succ_;
  std::unordered_map<Letter, std::vector<std::pair<int, int>>> sync_;
  std::vector<std::vector<std::pair<int, int>>> by_left_, by_right_;
  std::vector<std::pair<int, Letter>> terms_;
  std::vector<std::vector<int>> closure_;
  std::vector<char> closure_done_;
  Layer* cur_ = nullptr;
  Layer* partner_ = nullptr;
  Layer last_;
  std::deque<std::uint64_t> queue_;
  bool want_witness_ = false;
  std::unordered_map<std::uint64_t, Reason> reasons_;
};

}  // namespace

ProductResult product_check(const Cfg& g, const Fsa& a, int k, bool want_witness) {
  if (k < 0) throw std::invalid_argument("index bound must be non-negative");
  ProductEngine engine(g, a);
  return engine.run(k, want_witness);
}

Cfg bowtie(const Cfg& g, const Fsa& input, BowtieMode mode) {
  require_cnf_shape(g);
  Fsa a = single_accepting(input);
  int qf = a.num_states - 1;
  const int nq = a.num_states;
  const int nx = g.num_vars;
  const int bot = nx;
  ProductEngine engine(g, a);
  const bool trimmed = mode == BowtieMode::Trimmed;
  if (trimmed) engine.run(0, false);

  auto sigma_g = used_terminals(g);
  std::vector<Letter> terms = sigma_g;
  terms.insert(terms.end(), a.alphabet.begin(), a.alphabet.end());
  Cfg out;
  out.set_terminals(terms);

  std::vector<std::vector<Letter>> term_prods(nx);
  std::vector<std::vector<std::pair<int, int>>> bin_prods(nx);
  for (const auto& p : g.prods) {
    if (p.rhs.size() == 2) bin_prods[p.lhs].push_back({p.rhs[0], p.rhs[1]});
    else term_prods[p.lhs].push_back(p.rhs.empty() ? kEps : sym_letter(p.rhs[0]));
  }

  auto productive = [&](int q, int x, int q2) {
    if (!trimmed) return true;
    if (x == bot) return engine.in_closure(q, q2);
    return engine.fact(q, x, q2);
  };

  std::unordered_map<std::uint64_t, int> ids;
  std::deque<std::tuple<int, int, int>> todo;
  auto var = [&](int q, int x, int q2) {
    auto key = (static_cast<std::uint64_t>(q) * (nx + 1) + x) * nq + q2;
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    std::string xn = x == bot ? "_" : (x < (int)g.var_names.size() ? g.var_names[x] : std::to_string(x));
    int id = out.add_var("<" + std::to_string(q) + "," + xn + "," + std::to_string(q2) + ">");
    ids.emplace(key, id);
    todo.emplace_back(q, x, q2);
    return id;
  };
  auto with = [](Letter l, std::vector<Sym> tail) {
    if (l != kEps) tail.insert(tail.begin(), tsym(l));
    return tail;
  };

  if (!productive(a.init, g.axiom, qf) || nx == 0) {
    out.axiom = out.add_var("S");
    return out;
  }
  out.axiom = var(a.init, g.axiom, qf);
  if (!trimmed) {
    for (int q = 0; q < nq; ++q)
      for (int x = 0; x <= nx; ++x)
        for (int q2 = 0; q2 < nq; ++q2) var(q, x, q2);
  }
  while (!todo.empty()) {
    auto [q, x, q2] = todo.front();
    todo.pop_front();
    const int lhs = var(q, x, q2);
    for (auto [l, t] : engine.free_succ(q))
      if (productive(t, x, q2)) out.add(lhs, with(l, {var(t, x, q2)}));
    if (x == bot) {
      if (q == q2) out.add(lhs, {});
      continue;
    }
    for (Letter l : term_prods[x]) {
      if (l == kEps || !a.in_alphabet(l)) {
        if (productive(q, bot, q2)) out.add(lhs, with(l, {var(q, bot, q2)}));
      } else {
        for (auto [from, to] : engine.sync_edges(l))
          if (from == q && productive(to, bot, q2)) out.add(lhs, with(l, {var(to, bot, q2)}));
      }
    }
    for (auto [y, z] : bin_prods[x]) {
      if (trimmed) {
        for (int mid : engine.ends(q, y))
          if (productive(mid, z, q2)) out.add(lhs, {var(q, y, mid), var(mid, z, q2)});
      } else {
        for (int mid = 0; mid < nq; ++mid) out.add(lhs, {var(q, y, mid), var(mid, z, q2)});
      }
    }
  }
  out.normalize();
  return out;
}

}  // namespace nam
