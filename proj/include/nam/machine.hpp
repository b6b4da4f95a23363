#pragma once

#include <string>
#include <vector>

#include "nam/fsa.hpp"

namespace nam {

struct PdmRule {
  int from;
  int top;
  Letter label;
  int to;
  std::vector<int> push;  // push[0] becomes the new top; empty pops
  bool operator==(const PdmRule&) const = default;
};

struct Pdm {
  int num_states = 0;
  int num_symbols = 0;
  int init = 0;
  int init_symbol = 0;
  std::vector<PdmRule> rules;
  std::vector<Letter> alphabet;
  std::vector<std::string> state_names;
  std::vector<std::string> symbol_names;

  /// |push| + 5 per rule, summed.
  std::size_t size() const;
};

struct TmMove {
  int from;
  int read;
  int write;
  int dir;  // -1 left, +1 right
  int to;
  bool operator==(const TmMove&) const = default;
};

/// Input-free tape machine; symbol 0 is the blank.
struct Tm {
  int num_states = 0;
  int init = 0;
  std::vector<std::string> state_names;
  std::vector<std::string> symbol_names{"_"};
  std::vector<TmMove> moves;
  std::vector<Edge> actions;  // register-labelled transitions
  std::vector<Letter> alphabet;
};

enum class MachineKind { Fsm, Pdm, Tm };

struct Machine {
  MachineKind kind = MachineKind::Fsm;
  Fsa fsm;
  std::vector<std::string> fsm_state_names;
  Pdm pdm;
  Tm tm;
};

Machine parse_machine(const std::string& text, ValueTable& values, Role role);
Machine load_machine(const std::string& path, ValueTable& values, Role role);
std::string print_machine(const Machine& m, const ValueTable& values);

/// Rewrites every register label to `role` and resets the declared alphabet
/// to the full read/write alphabet of that role over `nvalues` values.
Machine assign_role(const Machine& m, Role role, int nvalues);

/// An FSM as a PDM with a single stack symbol that is never changed.
Pdm wrap_fsm(const Fsa& f);

std::vector<Letter> used_labels(const Machine& m);
std::string kind_name(MachineKind k);

}  // namespace nam
