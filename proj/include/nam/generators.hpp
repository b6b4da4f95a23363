#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nam/network.hpp"

namespace nam {

/// 3-CNF formula; literal +i / -i refers to variable i in 1..num_vars.
struct CnfFormula {
  int num_vars = 0;
  std::vector<std::array<int, 3>> clauses;
};

/// DIMACS CNF. Clauses with one or two literals are padded by repeating their
/// last literal; longer clauses are rejected.
CnfFormula parse_dimacs(const std::string& text);
CnfFormula load_dimacs(const std::string& path);
std::string print_dimacs(const CnfFormula& f);

/// Finite deterministic network that is unsafe iff `f` is satisfiable. The
/// leader fixes each variable through a propose/commit exchange with the
/// contributors, then queries committed values clause by clause and finally
/// writes "sat"; a contributor that reads "sat" writes #.
Network gen_3sat(const CnfFormula& f);

struct RandomSizes {
  int states = 4;        // exact
  int values = 2;        // ordinary values v0.., each used at least once; # comes on top
  int extra_edges = 4;   // edges beyond a spanning tree from the initial state
  int symbols = 2;       // stack symbols (PDM only)
  double write_prob = 0.5;
  double hash_prob = 0.1;  // chance that a contributor write is turned into w(#)
};

/// Seed-reproducible random machines over values named v0, v1, ... and #.
/// Contributor machines contain at least one w(#) transition; leader
/// machines never mention #.
Machine gen_random_fsm(std::uint64_t seed, const RandomSizes& sizes, Role role, ValueTable& values);
Machine gen_random_pdm(std::uint64_t seed, const RandomSizes& sizes, Role role, ValueTable& values);

/// Random network; each side is a PDM when the corresponding flag is set.
Network gen_random_network(std::uint64_t seed, const RandomSizes& sizes, bool leader_pdm, bool contributor_pdm);

}  // namespace nam
