#include "nam/machine.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "text_util.hpp"

namespace nam {

std::size_t Pdm::size() const {
  std::size_t s = 0;
  for (const auto& r : rules) s += r.push.size() + 5;
  return s;
}

std::string kind_name(MachineKind k) {
  switch (k) {
    case MachineKind::Fsm: return "fsm";
    case MachineKind::Pdm: return "pdm";
    case MachineKind::Tm: return "tm";
  }
  return "?";
}

namespace {

using detail::is_comment;
using detail::Token;
using detail::tokenize;

struct NameIndex {
  std::map<std::string, int> ids;
  std::vector<std::string> names;
  int add(const std::string& n) {
    auto [it, fresh] = ids.emplace(n, static_cast<int>(names.size()));
    if (fresh) names.push_back(n);
    return it->second;
  }
  int get(const Token& t, int line, const char* what) const {
    auto it = ids.find(t.text);
    if (it == ids.end()) throw ParseError(std::string("undeclared ") + what + " '" + t.text + "'", line, t.col);
    return it->second;
  }
};

std::vector<int> parse_gamma(const Token& t, NameIndex& syms, bool declared, int line) {
  std::vector<int> out;
  if (t.text == "-") return out;
  auto lookup = [&](const std::string& s) {
    if (declared) return syms.get(Token{s, t.col}, line, "stack symbol");
    return syms.add(s);
  };
  if (t.text.find(',') != std::string::npos) {
    std::stringstream ss(t.text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) throw ParseError("empty stack symbol in '" + t.text + "'", line, t.col);
      out.push_back(lookup(part));
    }
    return out;
  }
  if (!declared) {
    for (char c : t.text) out.push_back(syms.add(std::string(1, c)));
    return out;
  }
  // Greedy longest match against declared symbols.
  std::size_t i = 0;
  while (i < t.text.size()) {
    std::size_t best = 0;
    int id = -1;
    for (const auto& [name, sid] : syms.ids) {
      if (name.size() > best && t.text.compare(i, name.size(), name) == 0) {
        best = name.size();
        id = sid;
      }
    }
    if (id < 0) throw ParseError("unknown stack symbol in '" + t.text + "'", line, t.col + static_cast<int>(i));
    out.push_back(id);
    i += best;
  }
  return out;
}

}  // namespace

Machine parse_machine(const std::string& text, ValueTable& values, Role role) {
  Machine m;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  bool have_header = false, have_states = false, have_init = false, stack_declared = false;
  NameIndex states, syms, tape;
  tape.add("_");
  std::vector<Token> init_toks;
  int init_line = 0;
  struct Pending {
    std::vector<Token> toks;
    int line;
  };
  std::vector<Pending> body;
  while (std::getline(in, line)) {
    ++ln;
    auto toks = tokenize(line);
    if (is_comment(toks)) continue;
    if (!have_header) {
      const std::string& h = toks[0].text;
      if (h == "fsm") m.kind = MachineKind::Fsm;
      else if (h == "pdm") m.kind = MachineKind::Pdm;
      else if (h == "tm") m.kind = MachineKind::Tm;
      else throw ParseError("expected header fsm|pdm|tm, got '" + h + "'", ln, toks[0].col);
      if (toks.size() != 1) throw ParseError("unexpected token after header", ln, toks[1].col);
      have_header = true;
      continue;
    }
    if (toks[0].text == "states") {
      if (toks.size() < 2) throw ParseError("states line needs at least one state", ln, toks[0].col);
      for (std::size_t i = 1; i < toks.size(); ++i) states.add(toks[i].text);
      have_states = true;
    } else if (toks[0].text == "stack") {
      if (m.kind != MachineKind::Pdm) throw ParseError("stack line only valid for pdm", ln, toks[0].col);
      for (std::size_t i = 1; i < toks.size(); ++i) syms.add(toks[i].text);
      stack_declared = true;
    } else if (toks[0].text == "init") {
      init_toks = toks;
      init_line = ln;
      have_init = true;
    } else {
      body.push_back({toks, ln});
    }
  }
  if (!have_header) throw ParseError("missing header", ln, 1);
  if (!have_states) throw ParseError("missing states line", ln, 1);
  if (!have_init) throw ParseError("missing init line", ln, 1);
  if (init_toks.size() < 2) throw ParseError("init needs a state", init_line, 1);
  int init = states.get(init_toks[1], init_line, "state");

  switch (m.kind) {
    case MachineKind::Fsm: {
      if (init_toks.size() != 2) throw ParseError("fsm init takes one state", init_line, init_toks[0].col);
      std::vector<Edge> edges;
      for (const auto& p : body) {
        if (p.toks.size() != 3) throw ParseError("fsm transition needs 'q action q2'", p.line, p.toks[0].col);
        int f = states.get(p.toks[0], p.line, "state");
        Letter a = parse_letter(p.toks[1].text, values, role, p.line, p.toks[1].col);
        int t = states.get(p.toks[2], p.line, "state");
        edges.push_back({f, a, t});
      }
      std::vector<Letter> alpha;
      for (const auto& e : edges)
        if (e.label != kEps) alpha.push_back(e.label);
      m.fsm = make_lts(static_cast<int>(states.names.size()), init, std::move(edges), std::move(alpha));
      m.fsm_state_names = states.names;
      break;
    }
    case MachineKind::Pdm: {
      if (init_toks.size() != 3) throw ParseError("pdm init takes 'init q Z'", init_line, init_toks[0].col);
      Pdm& p = m.pdm;
      p.init = init;
      p.init_symbol = stack_declared ? syms.get(init_toks[2], init_line, "stack symbol") : syms.add(init_toks[2].text);
      std::vector<Letter> alpha;
      for (const auto& b : body) {
        if (b.toks.size() != 5) throw ParseError("pdm rule needs 'q A action q2 gamma'", b.line, b.toks[0].col);
        PdmRule r;
        r.from = states.get(b.toks[0], b.line, "state");
        r.top = stack_declared ? syms.get(b.toks[1], b.line, "stack symbol") : syms.add(b.toks[1].text);
        r.label = parse_letter(b.toks[2].text, values, role, b.line, b.toks[2].col);
        r.to = states.get(b.toks[3], b.line, "state");
        r.push = parse_gamma(b.toks[4], syms, stack_declared, b.line);
        if (r.label != kEps) alpha.push_back(r.label);
        p.rules.push_back(std::move(r));
      }
      p.num_states = static_cast<int>(states.names.size());
      p.num_symbols = static_cast<int>(syms.names.size());
      p.state_names = states.names;
      p.symbol_names = syms.names;
      std::sort(alpha.begin(), alpha.end());
      alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
      p.alphabet = alpha;
      break;
    }
    case MachineKind::Tm: {
      if (init_toks.size() != 2) throw ParseError("tm init takes one state", init_line, init_toks[0].col);
      Tm& t = m.tm;
      t.init = init;
      std::vector<Letter> alpha;
      for (const auto& b : body) {
        if (b.toks.size() == 6 && b.toks[1].text == "tape") {
          TmMove mv;
          mv.from = states.get(b.toks[0], b.line, "state");
          mv.read = tape.add(b.toks[2].text);
          mv.write = tape.add(b.toks[3].text);
          if (b.toks[4].text == "L") mv.dir = -1;
          else if (b.toks[4].text == "R") mv.dir = 1;
          else throw ParseError("tape move must be L or R", b.line, b.toks[4].col);
          mv.to = states.get(b.toks[5], b.line, "state");
          t.moves.push_back(mv);
        } else if (b.toks.size() == 3) {
          int f = states.get(b.toks[0], b.line, "state");
          Letter a = parse_letter(b.toks[1].text, values, role, b.line, b.toks[1].col);
          int to = states.get(b.toks[2], b.line, "state");
          t.actions.push_back({f, a, to});
          if (a != kEps) alpha.push_back(a);
        } else {
          throw ParseError("tm line needs 'q tape c c2 L|R q2' or 'q action q2'", b.line, b.toks[0].col);
        }
      }
      t.num_states = static_cast<int>(states.names.size());
      t.state_names = states.names;
      t.symbol_names = tape.names;
      std::sort(alpha.begin(), alpha.end());
      alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
      t.alphabet = alpha;
      break;
    }
  }
  return m;
}

Machine load_machine(const std::string& path, ValueTable& values, Role role) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open machine file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_machine(ss.str(), values, role);
}

namespace {

std::vector<std::string> default_names(int n, const std::vector<std::string>& given, const char* prefix) {
  if (static_cast<int>(given.size()) == n) return given;
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

std::string print_machine(const Machine& m, const ValueTable& values) {
  std::ostringstream out;
  out << kind_name(m.kind) << '\n';
  auto states_line = [&](const std::vector<std::string>& names) {
    out << "states";
    for (const auto& n : names) out << ' ' << n;
    out << '\n';
  };
  switch (m.kind) {
    case MachineKind::Fsm: {
      auto names = default_names(m.fsm.num_states, m.fsm_state_names, "q");
      states_line(names);
      out << "init " << names[m.fsm.init] << '\n';
      for (const auto& e : m.fsm.edges)
        out << names[e.from] << ' ' << format_plain(e.label, values) << ' ' << names[e.to] << '\n';
      break;
    }
    case MachineKind::Pdm: {
      const Pdm& p = m.pdm;
      auto names = default_names(p.num_states, p.state_names, "q");
      auto syms = default_names(p.num_symbols, p.symbol_names, "S");
      states_line(names);
      out << "stack";
      for (const auto& s : syms) out << ' ' << s;
      out << '\n';
      out << "init " << names[p.init] << ' ' << syms[p.init_symbol] << '\n';
      for (const auto& r : p.rules) {
        out << names[r.from] << ' ' << syms[r.top] << ' ' << format_plain(r.label, values) << ' ' << names[r.to] << ' ';
        if (r.push.empty()) {
          out << '-';
        } else {
          for (std::size_t i = 0; i < r.push.size(); ++i) out << (i ? "," : "") << syms[r.push[i]];
        }
        out << '\n';
      }
      break;
    }
    case MachineKind::Tm: {
      const Tm& t = m.tm;
      auto names = default_names(t.num_states, t.state_names, "q");
      states_line(names);
      out << "init " << names[t.init] << '\n';
      for (const auto& mv : t.moves)
        out << names[mv.from] << " tape " << t.symbol_names[mv.read] << ' ' << t.symbol_names[mv.write] << ' '
            << (mv.dir < 0 ? 'L' : 'R') << ' ' << names[mv.to] << '\n';
      for (const auto& e : t.actions)
        out << names[e.from] << ' ' << format_plain(e.label, values) << ' ' << names[e.to] << '\n';
      break;
    }
  }
  return out.str();
}

Machine assign_role(const Machine& src, Role role, int nvalues) {
  Machine m = src;
  std::vector<Letter> alpha = role == Role::Leader ? leader_alphabet(nvalues) : contributor_alphabet(nvalues);
  auto fix = [&](Letter& l) {
    l = with_role(l, role);
    if (l != kEps) alpha.push_back(l);
  };
  switch (m.kind) {
    case MachineKind::Fsm:
      for (auto& e : m.fsm.edges) fix(e.label);
      m.fsm.set_alphabet(alpha);
      break;
    case MachineKind::Pdm: {
      for (auto& r : m.pdm.rules) fix(r.label);
      std::sort(alpha.begin(), alpha.end());
      alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
      m.pdm.alphabet = alpha;
      break;
    }
    case MachineKind::Tm: {
      for (auto& e : m.tm.actions) fix(e.label);
      std::sort(alpha.begin(), alpha.end());
      alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
      m.tm.alphabet = alpha;
      break;
    }
  }
  return m;
}

Pdm wrap_fsm(const Fsa& f) {
  Pdm p;
  p.num_states = f.num_states;
  p.num_symbols = 1;
  p.init = f.init;
  p.init_symbol = 0;
  p.alphabet = f.alphabet;
  p.symbol_names = {"Z"};
  for (const auto& e : f.edges) p.rules.push_back({e.from, 0, e.label, e.to, {0}});
  return p;
}

std::vector<Letter> used_labels(const Machine& m) {
  std::vector<Letter> out;
  switch (m.kind) {
    case MachineKind::Fsm:
      for (const auto& e : m.fsm.edges) out.push_back(e.label);
      break;
    case MachineKind::Pdm:
      for (const auto& r : m.pdm.rules) out.push_back(r.label);
      break;
    case MachineKind::Tm:
      for (const auto& e : m.tm.actions) out.push_back(e.label);
      break;
  }
  out.erase(std::remove(out.begin(), out.end(), kEps), out.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace nam
