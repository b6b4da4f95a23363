#pragma once

#include <string>
#include <vector>

#include "nam/cfg.hpp"
#include "nam/fsa.hpp"

namespace nam {

/// Text format for grammars and automata. Terminal letters are indices into
/// a ValueTable used as a plain symbol table.
///
///   cfg                      fsa
///   terminals a b            alphabet a b
///   axiom S                  states q0 q1
///   prod S -> a S b          init q0
///   prod S -> eps            acc q1
///                            q0 a q1
///                            q1 eps q0
///
/// In a grammar every right-hand-side token that is not a declared terminal
/// is a variable; `axiom` defaults to the left side of the first production.
/// In an automaton, states may also be introduced by transition lines and
/// every letter must be declared in `alphabet`.
struct LangFile {
  enum class Kind { Grammar, Automaton };
  Kind kind = Kind::Grammar;
  Cfg cfg;
  Fsa fsa;
  std::vector<std::string> state_names;
};

LangFile parse_lang(const std::string& text, ValueTable& symbols);
LangFile load_lang(const std::string& path, ValueTable& symbols);

/// Variables and states without a usable name are printed as X<i> / q<i>.
std::string print_cfg(const Cfg& g, const ValueTable& symbols);
std::string print_fsa(const Fsa& a, const ValueTable& symbols, const std::vector<std::string>& state_names = {});
/// Space-separated letter names; "eps" for the empty word.
std::string format_symbols(const Word& w, const ValueTable& symbols);

}  // namespace nam
