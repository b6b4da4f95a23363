#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nam/cfg.hpp"
#include "nam/network.hpp"
#include "nam/oracle.hpp"
#include "nam/process.hpp"

namespace nam {

enum class Status { Safe, Unsafe, Unknown };
std::string status_name(Status s);

struct Witness {
  std::vector<int> tau;  // first-write sequence, ends with #
  Word simulation;       // extended trace ending with f_c(#); empty when not extracted
  std::vector<int> owner;  // per simulation letter: simulated value, -1 for the leader; optional
  ConcreteTrace trace;   // plain network trace ending with w_c(#); empty when not extracted
  std::string note;
};

struct Verdict {
  Status status = Status::Safe;
  std::string procedure;
  std::optional<Witness> witness;
  std::map<std::string, long long> stats;
  std::vector<std::string> notes;
};

/// How verify_pdm_fsm covers the first-write sequences: `Search` explores the
/// simulation on the fly and discovers them lazily; `Enumerate` lists every
/// sequence and checks a product grammar for each.
enum class Strategy { Search, Enumerate };

struct VerifyOptions {
  Strategy strategy = Strategy::Search;
  std::size_t state_cap = kDefaultStateCap;
  std::size_t guess_cap = 1'000'000;
  std::size_t support_cap = kDefaultSupportCap;
  int jobs = 1;
  bool witness = true;
  ProcessLimits limits;
  // Bounded exploration used to recover a concrete trace when the decision
  // procedure itself does not produce one.
  int witness_population = 4;
  int witness_depth = 24;
};

/// Pushdown (or wrapped finite) leader, finite contributor.
Verdict verify_pdm_fsm(const Network& net, const VerifyOptions& opt = {});
/// Finite leader and contributor; same procedure as verify_pdm_fsm.
Verdict verify_fsm_fsm(const Network& net, const VerifyOptions& opt = {});
/// Finite leader, pushdown (or wrapped finite) contributor.
Verdict verify_fsm_pdm(const Network& net, const VerifyOptions& opt = {});
/// Pushdown (or wrapped finite) leader and contributor.
Verdict verify_pdm_pdm(const Network& net, const VerifyOptions& opt = {});
/// Safety when every process performs at most `k` register operations.
Verdict verify_bounded(const Network& net, int k, const VerifyOptions& opt = {});
/// Dispatches on the machine kinds.
Verdict verify_auto(const Network& net, const VerifyOptions& opt = {});

/// JSON record: status, procedure, tau, witness traces, statistics.
std::string verdict_report(const Verdict& v, const ValueTable& values);
std::string format_word(const Word& w, const ValueTable& values);

struct ReplayResult {
  bool ok = false;
  std::string error;
};

/// Checks a plain trace against the network semantics: register discipline,
/// every process projection is a trace of its machine, last letter w_c(#).
ReplayResult replay_concrete(const Network& net, const ConcreteTrace& t, const ProcessLimits& lim = {});

/// Checks an extended simulation word: ends with f_c(#), is a trace of the
/// extended store whose first writes are exactly `tau`, the leader projection
/// is a leader trace, and the contributor letters split into one contributor
/// run per first-written value followed by copies of its final write. On
/// success `concrete` receives the corresponding plain network trace, built
/// with copycat contributors. A non-empty `owner` fixes which run takes each
/// contributor letter; otherwise the split is searched for.
ReplayResult replay_simulation(const Network& net, const std::vector<int>& tau, const Word& sim,
                               ConcreteTrace* concrete = nullptr, const ProcessLimits& lim = {},
                               const std::vector<int>& owner = {});

/// Validates whichever witness parts are present.
ReplayResult check_witness(const Network& net, const Witness& w, const ProcessLimits& lim = {});

/// Support words of a finite extended contributor: labels of simple paths over
/// reads, useless writes and silent moves ending with f_c(g), reduced to the
/// subword-minimal ones. Indexed by value.
std::vector<std::vector<Word>> contributor_support_words(const Fsa& extended, int nvalues, std::size_t cap);

/// Determinism in the sense used for the hardness results: two distinct
/// transitions leaving the same state lead to the same state or are reads of
/// different values.
bool is_deterministic(const Fsa& m);

struct DeterminizeResult {
  Network net;
  int leader_states_added = 0;
  int contributor_states_added = 0;
};
/// Safety-preserving transformation of a finite network into one whose
/// leader and contributor are deterministic.
DeterminizeResult determinize(const Network& net);

}  // namespace nam
