#include "nam/generators.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nam {

CnfFormula parse_dimacs(const std::string& text) {
  CnfFormula f;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  int declared_clauses = -1;
  std::vector<int> pending;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c" || tok[0] == 'c' || tok == "%") continue;
    if (tok == "p") {
      std::string fmt;
      if (!(ls >> fmt >> f.num_vars >> declared_clauses) || fmt != "cnf" || f.num_vars < 0 || declared_clauses < 0)
        throw ParseError("malformed problem line", lineno, 1);
      header = true;
      continue;
    }
    if (!header) throw ParseError("clause before the problem line", lineno, 1);
    std::istringstream cs(line);
    long long lit;
    int col = 1;
    while (cs >> lit) {
      if (lit == 0) {
        if (pending.empty()) throw ParseError("empty clause", lineno, col);
        if (pending.size() > 3) throw ParseError("clause with more than three literals", lineno, col);
        while (pending.size() < 3) pending.push_back(pending.back());
        f.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
      } else {
        if (std::llabs(lit) > f.num_vars) throw ParseError("literal out of range", lineno, col);
        pending.push_back(static_cast<int>(lit));
      }
      ++col;
    }
    if (!cs.eof()) throw ParseError("unexpected token", lineno, col);
  }
  if (!header) throw ParseError("missing problem line", lineno, 1);
  if (!pending.empty()) throw ParseError("clause not terminated by 0", lineno, 1);
  if (declared_clauses >= 0 && static_cast<int>(f.clauses.size()) != declared_clauses)
    throw ParseError("clause count differs from the problem line", lineno, 1);
  return f;
}

CnfFormula load_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dimacs(ss.str());
}

std::string print_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) out << c[0] << ' ' << c[1] << ' ' << c[2] << " 0\n";
  return out.str();
}

Network gen_3sat(const CnfFormula& f) {
  for (const auto& c : f.clauses)
    for (int lit : c)
      if (lit == 0 || std::abs(lit) > f.num_vars) throw std::invalid_argument("literal out of range");
  ValueTable values;
  const int n = f.num_vars;
  std::vector<int> bit(n + 1), get(n + 1);
  std::vector<std::array<int, 2>> propose(n + 1), commit(n + 1), is(n + 1);
  for (int i = 1; i <= n; ++i) {
    const std::string s = std::to_string(i);
    bit[i] = values.intern("bit_" + s);
    for (int b = 0; b < 2; ++b) propose[i][b] = values.intern("propose_" + s + "_" + std::to_string(b));
    for (int b = 0; b < 2; ++b) commit[i][b] = values.intern("commit_" + s + "_" + std::to_string(b));
    get[i] = values.intern("get_" + s);
    for (int b = 0; b < 2; ++b) is[i][b] = values.intern("is_" + s + "_" + std::to_string(b));
  }
  const int sat = values.intern("sat");
  const int hash = values.intern(kHash);

  Machine d;
  Fsa& lf = d.fsm;
  lf.init = lf.add_state(true);
  int cur = lf.init;
  for (int i = 1; i <= n; ++i) {
    int m = lf.add_state(true);
    lf.add_edge(cur, wd(bit[i]), m);
    int next = lf.add_state(true);
    for (int b = 0; b < 2; ++b) {
      int chosen = lf.add_state(true);
      lf.add_edge(m, rd(propose[i][b]), chosen);
      lf.add_edge(chosen, wd(commit[i][b]), next);
    }
    cur = next;
  }
  for (const auto& clause : f.clauses) {
    int next = lf.add_state(true);
    for (std::size_t t = 0; t < clause.size(); ++t) {
      const int x = std::abs(clause[t]);
      const int good = clause[t] > 0 ? 1 : 0;
      int asked = lf.add_state(true);
      lf.add_edge(cur, wd(get[x]), asked);
      lf.add_edge(asked, rd(is[x][good]), next);
      if (t + 1 < clause.size()) {
        int more = lf.add_state(true);
        lf.add_edge(asked, rd(is[x][1 - good]), more);
        cur = more;
      }
    }
    cur = next;
  }
  int done = lf.add_state(true);
  lf.add_edge(cur, wd(sat), done);

  Machine c;
  Fsa& cf = c.fsm;
  cf.init = cf.add_state(true);
  for (int i = 1; i <= n; ++i) {
    int a = cf.add_state(true), b = cf.add_state(true), dd = cf.add_state(true);
    cf.add_edge(cf.init, rc(bit[i]), a);
    cf.add_edge(a, wc(propose[i][0]), b);
    cf.add_edge(b, wc(propose[i][1]), dd);
    for (int v = 0; v < 2; ++v) {
      int z = cf.add_state(true), y = cf.add_state(true);
      cf.add_edge(dd, rc(commit[i][v]), z);
      cf.add_edge(z, rc(get[i]), y);
      cf.add_edge(y, wc(is[i][v]), z);
    }
  }
  int s = cf.add_state(true), e = cf.add_state(true);
  cf.add_edge(cf.init, rc(sat), s);
  cf.add_edge(s, wc(hash), e);
  return make_network(d, c, values);
}

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_) < p; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    std::shuffle(v.begin(), v.end(), gen_);
  }

 private:
  std::mt19937_64 gen_;
};

void check_sizes(const RandomSizes& s) {
  if (s.states < 1 || s.values < 1 || s.extra_edges < 0 || s.symbols < 1)
    throw std::invalid_argument("random sizes must be positive");
}

// Labels for `count` transitions using every value at least once.
std::vector<Letter> random_labels(Rng& rng, const RandomSizes& sizes, int count, Role role, const std::vector<int>& vals,
                                  int hash) {
  std::vector<Letter> labels(count);
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  rng.shuffle(order);
  for (int i = 0; i < count; ++i) {
    int value = i < sizes.values ? vals[i] : vals[rng.pick(0, sizes.values - 1)];
    Kind k = rng.coin(sizes.write_prob) ? Kind::Write : Kind::Read;
    labels[order[i]] = act(role, k, value);
  }
  if (role == Role::Contributor) {
    bool has_hash = false;
    for (int i = sizes.values; i < count; ++i) {
      Letter& l = labels[order[i]];
      if (decode(l).kind == Kind::Write && rng.coin(sizes.hash_prob)) {
        l = act(role, Kind::Write, hash);
        has_hash = true;
      }
    }
    if (!has_hash) labels.push_back(act(role, Kind::Write, hash));
  }
  return labels;
}

std::vector<int> declare_values(ValueTable& values, int count) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(values.intern("v" + std::to_string(i)));
  values.intern(kHash);
  return out;
}

// Transition skeleton: a random spanning tree from state 0 plus extra edges.
std::vector<std::pair<int, int>> skeleton(Rng& rng, const RandomSizes& sizes) {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i < sizes.states; ++i) out.push_back({rng.pick(0, i - 1), i});
  for (int i = 0; i < sizes.extra_edges; ++i) out.push_back({rng.pick(0, sizes.states - 1), rng.pick(0, sizes.states - 1)});
  while (static_cast<int>(out.size()) < sizes.values) {
    int s = rng.pick(0, sizes.states - 1);
    out.push_back({s, rng.pick(0, sizes.states - 1)});
  }
  return out;
}

}  // namespace

Machine gen_random_fsm(std::uint64_t seed, const RandomSizes& sizes, Role role, ValueTable& values) {
  check_sizes(sizes);
  Rng rng(seed);
  auto vals = declare_values(values, sizes.values);
  auto edges = skeleton(rng, sizes);
  auto labels = random_labels(rng, sizes, static_cast<int>(edges.size()), role, vals, values.hash());
  while (edges.size() < labels.size()) edges.push_back({rng.pick(0, sizes.states - 1), rng.pick(0, sizes.states - 1)});
  Machine m;
  m.kind = MachineKind::Fsm;
  for (int i = 0; i < sizes.states; ++i) m.fsm.add_state(true);
  m.fsm.init = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) m.fsm.add_edge(edges[i].first, labels[i], edges[i].second);
  return m;
}

Machine gen_random_pdm(std::uint64_t seed, const RandomSizes& sizes, Role role, ValueTable& values) {
  check_sizes(sizes);
  Rng rng(seed);
  auto vals = declare_values(values, sizes.values);
  auto edges = skeleton(rng, sizes);
  auto labels = random_labels(rng, sizes, static_cast<int>(edges.size()), role, vals, values.hash());
  while (edges.size() < labels.size()) edges.push_back({rng.pick(0, sizes.states - 1), rng.pick(0, sizes.states - 1)});
  Machine m;
  m.kind = MachineKind::Pdm;
  Pdm& p = m.pdm;
  p.num_states = sizes.states;
  p.num_symbols = sizes.symbols;
  p.init = 0;
  p.init_symbol = 0;
  for (int i = 0; i < sizes.states; ++i) p.state_names.push_back("q" + std::to_string(i));
  for (int i = 0; i < sizes.symbols; ++i) p.symbol_names.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    PdmRule r;
    r.from = edges[i].first;
    r.to = edges[i].second;
    r.label = labels[i];
    r.top = rng.pick(0, sizes.symbols - 1);
    switch (rng.pick(0, 2)) {
      case 0: break;  // pop
      case 1: r.push = {rng.pick(0, sizes.symbols - 1)}; break;
      default: r.push = {rng.pick(0, sizes.symbols - 1), r.top}; break;
    }
    p.rules.push_back(std::move(r));
  }
  return m;
}

Network gen_random_network(std::uint64_t seed, const RandomSizes& sizes, bool leader_pdm, bool contributor_pdm) {
  ValueTable values;
  const std::uint64_t s1 = seed * 2654435761u + 1, s2 = seed * 40503u + 7;
  Machine d = leader_pdm ? gen_random_pdm(s1, sizes, Role::Leader, values) : gen_random_fsm(s1, sizes, Role::Leader, values);
  Machine c = contributor_pdm ? gen_random_pdm(s2, sizes, Role::Contributor, values)
                              : gen_random_fsm(s2, sizes, Role::Contributor, values);
  return make_network(d, c, values);
}

}  // namespace nam
