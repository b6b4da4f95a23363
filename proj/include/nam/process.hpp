#pragma once

#include <cstddef>
#include <vector>

#include "nam/machine.hpp"

namespace nam {

/// Configuration of a single process. FSM: {state}. PDM: {state, stack
/// bottom .. top}. TM: {state, head, tape cells...}.
using Config = std::vector<int>;

struct Move {
  Letter label;  // kEps for silent moves (including TM tape steps)
  Config next;
};

struct ProcessLimits {
  int stack_cap = 64;        // PDM stack height
  int tape_cap = 4096;       // TM tape cells
  int silent_budget = 10'000;  // silent configurations explored per register step
};

/// Operational semantics of one machine. Moves that would exceed a cap are
/// dropped and reported through the `capped` flag.
class Process {
 public:
  Process(const Machine& m, ProcessLimits limits = {});

  Config initial() const;
  void successors(const Config& c, std::vector<Move>& out, bool* capped) const;
  /// Register moves available after any number of silent moves from `c`;
  /// each entry is (label, configuration right after the register move).
  std::vector<Move> register_moves(const Config& c, bool* capped) const;
  /// Whether `w` (register labels only) is a trace of the machine.
  bool accepts(const Word& w, bool* capped) const;
  /// All traces with at most `max_ops` register operations.
  std::vector<Word> traces(int max_ops, bool* capped) const;

  MachineKind kind() const { return m_.kind; }
  const Machine& machine() const { return m_; }

 private:
  const Machine& m_;
  ProcessLimits lim_;
  std::vector<std::vector<std::pair<Letter, int>>> fsm_adj_;
  std::vector<std::vector<const PdmRule*>> pdm_rules_;  // by (state, top)
  std::vector<std::vector<const TmMove*>> tm_moves_;    // by (state, read)
  std::vector<std::vector<std::pair<Letter, int>>> tm_actions_;
};

}  // namespace nam
