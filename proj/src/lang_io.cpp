#include "nam/lang_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace nam {

namespace {

using detail::Token;

void expect_args(const std::vector<Token>& toks, std::size_t n, int line) {
  if (toks.size() < n) throw ParseError("'" + toks[0].text + "' needs more arguments", line, toks[0].col);
}

LangFile parse_grammar(const std::vector<std::pair<std::vector<Token>, int>>& body, ValueTable& symbols) {
  LangFile out;
  out.kind = LangFile::Kind::Grammar;
  Cfg& g = out.cfg;
  std::set<std::string> terminals;
  std::map<std::string, int> vars;
  auto var = [&](const std::string& name) {
    auto [it, fresh] = vars.emplace(name, g.num_vars);
    if (fresh) g.add_var(name);
    return it->second;
  };
  std::vector<Letter> alphabet;
  std::string axiom;
  int axiom_line = 0, axiom_col = 0;
  for (const auto& [toks, ln] : body) {
    const std::string& head = toks[0].text;
    if (head == "terminals") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[i].text == "eps" || toks[i].text == "->") throw ParseError("reserved word as terminal", ln, toks[i].col);
        terminals.insert(toks[i].text);
        alphabet.push_back(symbols.intern(toks[i].text));
      }
    } else if (head == "axiom") {
      if (toks.size() != 2) throw ParseError("axiom line takes one variable", ln, toks[0].col);
      axiom = toks[1].text;
      axiom_line = ln;
      axiom_col = toks[1].col;
    } else if (head != "prod") {
      throw ParseError("unknown grammar line '" + head + "'", ln, toks[0].col);
    }
  }
  if (!axiom.empty()) {
    if (terminals.count(axiom)) throw ParseError("axiom is a terminal", axiom_line, axiom_col);
    var(axiom);
  }
  for (const auto& [toks, ln] : body) {
    if (toks[0].text != "prod") continue;
    expect_args(toks, 3, ln);
    if (toks[2].text != "->") throw ParseError("expected '->'", ln, toks[2].col);
    if (terminals.count(toks[1].text)) throw ParseError("terminal on the left of a production", ln, toks[1].col);
    const int lhs = var(toks[1].text);
    std::vector<Sym> rhs;
    for (std::size_t i = 3; i < toks.size(); ++i) {
      const std::string& t = toks[i].text;
      if (t == "eps") {
        if (toks.size() != 4) throw ParseError("'eps' must stand alone", ln, toks[i].col);
        continue;
      }
      if (t == "->") throw ParseError("unexpected '->'", ln, toks[i].col);
      rhs.push_back(terminals.count(t) ? tsym(symbols.find(t)) : var(t));
    }
    g.add(lhs, std::move(rhs));
  }
  if (g.num_vars == 0) g.add_var("S");
  g.axiom = 0;
  g.set_terminals(alphabet);
  return out;
}

LangFile parse_automaton(const std::vector<std::pair<std::vector<Token>, int>>& body, ValueTable& symbols) {
  LangFile out;
  out.kind = LangFile::Kind::Automaton;
  Fsa& a = out.fsa;
  std::map<std::string, int> states;
  auto state = [&](const std::string& name) {
    auto [it, fresh] = states.emplace(name, a.num_states);
    if (fresh) {
      a.add_state(false);
      out.state_names.push_back(name);
    }
    return it->second;
  };
  std::set<std::string> alphabet_names;
  std::vector<Letter> alphabet;
  bool have_init = false;
  for (const auto& [toks, ln] : body) {
    const std::string& head = toks[0].text;
    if (head == "alphabet") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[i].text == "eps") throw ParseError("'eps' cannot be a letter", ln, toks[i].col);
        alphabet_names.insert(toks[i].text);
        alphabet.push_back(symbols.intern(toks[i].text));
      }
    } else if (head == "states") {
      for (std::size_t i = 1; i < toks.size(); ++i) state(toks[i].text);
    }
  }
  for (const auto& [toks, ln] : body) {
    const std::string& head = toks[0].text;
    if (head == "alphabet" || head == "states") continue;
    if (head == "init") {
      if (toks.size() != 2) throw ParseError("init line takes one state", ln, toks[0].col);
      if (have_init) throw ParseError("duplicate init line", ln, toks[0].col);
      a.init = state(toks[1].text);
      have_init = true;
    } else if (head == "acc") {
      expect_args(toks, 2, ln);
      for (std::size_t i = 1; i < toks.size(); ++i) a.accepting[state(toks[i].text)] = 1;
    } else if (toks.size() == 3) {
      const int from = state(toks[0].text);
      Letter l = kEps;
      if (toks[1].text != "eps") {
        if (!alphabet_names.count(toks[1].text))
          throw ParseError("letter '" + toks[1].text + "' is not in the alphabet", ln, toks[1].col);
        l = symbols.find(toks[1].text);
      }
      a.add_edge(from, l, state(toks[2].text));
    } else {
      throw ParseError("expected 'from letter to'", ln, toks[0].col);
    }
  }
  if (a.num_states == 0) throw ParseError("automaton without states", body.empty() ? 1 : body.back().second, 1);
  if (!have_init) throw ParseError("missing init line", body.empty() ? 1 : body.back().second, 1);
  a.set_alphabet(alphabet);
  return out;
}

// Names that are non-empty, unique and distinct from every terminal.
std::vector<std::string> usable_names(const std::vector<std::string>& given, int count, const std::string& prefix,
                                      const std::set<std::string>& taken) {
  std::vector<std::string> out(count);
  std::set<std::string> used = taken;
  for (int i = 0; i < count; ++i) {
    std::string n = i < static_cast<int>(given.size()) ? given[i] : std::string();
    bool ok = !n.empty() && n != "eps" && n != "->" && !used.count(n);
    for (char c : n) ok = ok && !std::isspace(static_cast<unsigned char>(c));
    if (!ok) {
      n = prefix + std::to_string(i);
      while (used.count(n)) n = "_" + n;
    }
    used.insert(n);
    out[i] = n;
  }
  return out;
}

}  // namespace

LangFile parse_lang(const std::string& text, ValueTable& symbols) {
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  std::string header;
  std::vector<std::pair<std::vector<Token>, int>> body;
  while (std::getline(in, line)) {
    ++ln;
    auto toks = detail::tokenize(line);
    if (detail::is_comment(toks)) continue;
    if (header.empty()) {
      header = toks[0].text;
      if (header != "cfg" && header != "fsa") throw ParseError("expected header cfg|fsa, got '" + header + "'", ln, toks[0].col);
      if (toks.size() != 1) throw ParseError("unexpected token after header", ln, toks[1].col);
      continue;
    }
    body.emplace_back(std::move(toks), ln);
  }
  if (header.empty()) throw ParseError("empty file", ln, 1);
  return header == "cfg" ? parse_grammar(body, symbols) : parse_automaton(body, symbols);
}

LangFile load_lang(const std::string& path, ValueTable& symbols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lang(ss.str(), symbols);
}

std::string print_cfg(const Cfg& g, const ValueTable& symbols) {
  std::set<std::string> terms;
  for (Letter t : g.terminals) terms.insert(symbols.name(t));
  for (const auto& p : g.prods)
    for (Sym s : p.rhs)
      if (!is_var(s)) terms.insert(symbols.name(sym_letter(s)));
  // The axiom is printed first so that it keeps index 0 on re-parsing.
  std::vector<int> order{g.axiom};
  for (int x = 0; x < g.num_vars; ++x)
    if (x != g.axiom) order.push_back(x);
  std::vector<std::string> given(g.num_vars);
  for (int i = 0; i < g.num_vars; ++i)
    given[i] = order[i] < static_cast<int>(g.var_names.size()) ? g.var_names[order[i]] : std::string();
  auto ordered = usable_names(given, g.num_vars, "X", terms);
  std::vector<std::string> names(g.num_vars);
  for (int i = 0; i < g.num_vars; ++i) names[order[i]] = ordered[i];

  std::ostringstream out;
  out << "cfg\n";
  std::vector<Letter> declared = g.terminals;
  for (const auto& p : g.prods)
    for (Sym s : p.rhs)
      if (!is_var(s)) declared.push_back(sym_letter(s));
  std::sort(declared.begin(), declared.end());
  declared.erase(std::unique(declared.begin(), declared.end()), declared.end());
  if (!declared.empty()) {
    out << "terminals";
    for (Letter t : declared) out << ' ' << symbols.name(t);
    out << '\n';
  }
  out << "axiom " << names[g.axiom] << '\n';
  // Productions grouped by left side in axiom-first variable order.
  for (int x : order)
    for (const auto& p : g.prods) {
      if (p.lhs != x) continue;
      out << "prod " << names[p.lhs] << " ->";
      if (p.rhs.empty()) out << " eps";
      for (Sym s : p.rhs) out << ' ' << (is_var(s) ? names[s] : symbols.name(sym_letter(s)));
      out << '\n';
    }
  return out.str();
}

std::string print_fsa(const Fsa& a, const ValueTable& symbols, const std::vector<std::string>& state_names) {
  auto names = usable_names(state_names, a.num_states, "q", {});
  std::ostringstream out;
  out << "fsa\n";
  if (!a.alphabet.empty()) {
    out << "alphabet";
    for (Letter l : a.alphabet) out << ' ' << symbols.name(l);
    out << '\n';
  }
  out << "states";
  for (const auto& n : names) out << ' ' << n;
  out << "\ninit " << names[a.init] << '\n';
  bool any = false;
  for (int q = 0; q < a.num_states; ++q)
    if (a.accepting[q]) {
      out << (any ? " " : "acc ") << names[q];
      any = true;
    }
  if (any) out << '\n';
  for (const auto& e : a.edges)
    out << names[e.from] << ' ' << (e.label == kEps ? std::string("eps") : symbols.name(e.label)) << ' ' << names[e.to] << '\n';
  return out.str();
}

std::string format_symbols(const Word& w, const ValueTable& symbols) {
  if (w.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += symbols.name(w[i]);
  }
  return out;
}

}  // namespace nam
