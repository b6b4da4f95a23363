#pragma once

#include <cstddef>
#include <vector>

#include "nam/machine.hpp"

namespace nam::detail {

struct SimSearchResult {
  bool unsafe = false;
  std::vector<int> tau;
  Word simulation;  // extended word ending with f_c(#), when requested
  std::vector<int> owner;  // per letter of `simulation`: simulated value, -1 for the leader
  std::size_t sim_states = 0;
  std::size_t nodes = 0;
  std::size_t entries = 0;
};

/// Explores the simulation network (leader, extended store, one simulator per
/// value plus copycat writes) on the fly, with the first-write sequence
/// discovered along the way. The leader is a PDM handled with procedure
/// summaries; the contributor is finite and uses plain labels.
SimSearchResult simulation_search(const Pdm& leader, const Fsa& contributor, int nvalues, int hash,
                                  std::size_t state_cap, bool want_witness);

}  // namespace nam::detail
