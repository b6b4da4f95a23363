#pragma once

#include <vector>

#include "nam/fsa.hpp"
#include "nam/machine.hpp"

namespace nam {

/// Plain store over values 0..n-1. State 0 is g0, state v+1 holds value v.
Fsa build_store(int nvalues);

/// Copies every contributor write w_c(g) as f_c(g) and u_c(g).
Fsa extend_lts(const Fsa& m);
Pdm extend_lts(const Pdm& p);

/// Extended store state (g, W, b): g == -1 stands for g0, W is a bitmask.
struct ExtState {
  int value;
  unsigned record;
  bool useless;
  auto operator<=>(const ExtState&) const = default;
};

/// Reachable part of S^E. `states` maps automaton states back to triples.
struct ExtendedStore {
  Fsa fsa;
  std::vector<ExtState> states;
};
ExtendedStore build_extended_store(int nvalues);

/// Reachable part of the leader store S^E_D; `states` has useless == false.
ExtendedStore build_leader_store(int nvalues);

/// S^E restricted to P_tau: write record is the progress along tau.
Fsa extended_store_tau(int nvalues, const std::vector<int>& tau);
/// S^E_D restricted to P_tau.
Fsa leader_store_tau(int nvalues, const std::vector<int>& tau);

/// Tags every contributor write as first, useless or plain write.
Word classify_trace(const Word& t);
/// Replaces f_c/u_c by w_c.
Word erase_extension(const Word& t);

/// All repetition-free sequences over 0..n-1 (optionally ending in `hash`),
/// shortest first, then lexicographic.
std::vector<std::vector<int>> enumerate_tau(int nvalues, bool require_hash, int hash);

/// (Sigma_E minus first writes)* shuffled with tau, over `alphabet`.
Fsa p_tau_automaton(const std::vector<int>& tau, const std::vector<Letter>& alphabet);

}  // namespace nam
