#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nam/network.hpp"
#include "nam/process.hpp"

namespace nam {

/// A plain network trace with the acting process of every letter
/// (-1 is the leader, i >= 0 the i-th contributor).
struct ConcreteTrace {
  Word letters;
  std::vector<int> owner;
  bool empty() const { return letters.empty(); }
};

enum class BoundedStatus { Unsafe, SafeAtBound, BoundHit };
std::string bounded_status_name(BoundedStatus s);

struct ExploreOptions {
  ProcessLimits limits;
  std::size_t state_cap = 2'000'000;
};

struct ExploreResult {
  BoundedStatus status = BoundedStatus::SafeAtBound;
  ConcreteTrace witness;
  std::size_t states = 0;
};

/// Breadth-first search of the network with exactly `k` contributors, up to
/// `depth` transitions (silent ones included).
ExploreResult explore_bounded(const Network& net, int k, int depth, const ExploreOptions& opt = {});

struct SaturationResult {
  bool unsafe = false;
  std::size_t states = 0;
  Word abstract_path;  // labels along the abstract run, ending with w_c(#)
};

/// Exact decision for FSM leader and FSM contributor: explores
/// (leader state, register value, set of occupied contributor states).
SaturationResult saturate_fsm(const Network& net);

struct CompatResult {
  bool compatible = false;
  Word interleaving;
  std::vector<int> owner;  // -1 for letters of u, i for letters of M[i]
};

/// Can `u` and every word of `m` be interleaved (each consumed completely)
/// into a trace of the extended store? With `tau`, the first writes of the
/// interleaving must be exactly `tau`.
CompatResult check_compatibility(const Word& u, const std::vector<Word>& m, int nvalues,
                                 const std::vector<int>* tau = nullptr);

struct BoundedOracleOptions {
  ProcessLimits limits;
  int population_cap = 8;
  std::size_t state_cap = 4'000'000;
};

struct BoundedOracleResult {
  bool unsafe = false;
  bool incomplete = false;  // some cap pruned the search
  ConcreteTrace witness;
  std::size_t states = 0;
  int max_population = 0;
};

/// Explicit search over runs in which the leader and every contributor
/// perform at most `k` register operations each. Contributors are spawned
/// on demand.
BoundedOracleResult bounded_safety_oracle(const Network& net, int k, const BoundedOracleOptions& opt = {});

}  // namespace nam
