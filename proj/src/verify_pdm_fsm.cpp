#include <map>
#include <stdexcept>

#include "guess.hpp"
#include "sim_search.hpp"
#include "verify_util.hpp"

namespace nam {

namespace {

// Accepts z . w_c(g)* for the support words z of g (all ending with f_c(g)).
Fsa simulator_lines(const std::vector<Word>& words, int g, int nvalues) {
  Fsa f;
  f.set_alphabet(extended_contributor_alphabet(nvalues));
  f.init = f.add_state(false);
  const int tail = f.add_state(true);
  f.add_edge(tail, wc(g), tail);
  std::map<std::pair<int, Letter>, int> trie;
  for (const auto& w : words) {
    int s = f.init;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      auto [it, fresh] = trie.emplace(std::make_pair(s, w[i]), 0);
      if (fresh) {
        it->second = f.add_state(false);
        f.add_edge(s, w[i], it->second);
      }
      s = it->second;
    }
    f.add_edge(s, w.back(), tail);
  }
  return f;
}

}  // namespace

Verdict verify_pdm_fsm(const Network& net, const VerifyOptions& opt) {
  if (net.contributor.kind != MachineKind::Fsm) throw std::invalid_argument("this procedure needs a finite contributor");
  detail::Stopwatch clock;
  Verdict v;
  v.procedure = "pdm-fsm";
  const int n = net.nvalues();
  const int hash = net.hash();
  if (opt.strategy == Strategy::Search) {
    auto r = detail::simulation_search(leader_pdm(net), net.contributor.fsm, n, hash, opt.state_cap, opt.witness);
    v.stats["sim_states"] = static_cast<long long>(r.sim_states);
    v.stats["nodes"] = static_cast<long long>(r.nodes);
    v.stats["entries"] = static_cast<long long>(r.entries);
    if (r.unsafe) {
      v.status = Status::Unsafe;
      v.witness.emplace();
      v.witness->tau = r.tau;
      v.witness->simulation = r.simulation;
      v.witness->owner = r.owner;
      if (opt.witness) detail::attach_trace(net, *v.witness, opt);
    }
    v.stats["time_ms"] = clock.ms();
    return v;
  }
  Cfg leader = cfg_to_cnf(pdm_to_cfg(leader_pdm(net)));
  Fsa ce = extend_lts(net.contributor.fsm);
  auto support = contributor_support_words(ce, n, opt.guess_cap);
  std::vector<char> writable(n, 0);
  std::vector<Fsa> lines(n);
  long long support_words = 0;
  for (int g = 0; g < n; ++g) {
    if (support[g].empty()) continue;
    writable[g] = 1;
    support_words += static_cast<long long>(support[g].size());
    lines[g] = simulator_lines(support[g], g, n);
  }
  auto taus = detail::candidate_taus(net, writable, opt.guess_cap);
  v.stats["leader_grammar_vars"] = leader.num_vars;
  v.stats["support_words"] = support_words;
  v.stats["tau_guesses"] = static_cast<long long>(taus.size());

  auto hit = detail::first_hit<Witness>(taus.size(), opt.jobs, [&](std::size_t i) -> std::optional<Witness> {
    const auto& tau = taus[i];
    Fsa a2 = lines[tau[0]];
    for (std::size_t j = 1; j < tau.size(); ++j) a2 = shuffle(a2, lines[tau[j]], opt.state_cap);
    Fsa a = trim(async_product(extended_store_tau(n, tau), a2, opt.state_cap));
    if (is_empty(a)) return std::nullopt;
    auto r = product_check(leader, a, 0, opt.witness);
    if (!r.nonempty) return std::nullopt;
    Witness w;
    w.tau = tau;
    if (r.witness) w.simulation = detail::truncate_at_hash(*r.witness, hash);
    return w;
  });
  if (hit) {
    v.status = Status::Unsafe;
    v.witness = std::move(hit->second);
    if (opt.witness) detail::attach_trace(net, *v.witness, opt);
  }
  v.stats["time_ms"] = clock.ms();
  return v;
}

Verdict verify_fsm_fsm(const Network& net, const VerifyOptions& opt) {
  if (net.leader.kind != MachineKind::Fsm || net.contributor.kind != MachineKind::Fsm)
    throw std::invalid_argument("this procedure needs finite leader and contributor");
  Verdict v = verify_pdm_fsm(net, opt);
  v.procedure = "fsm-fsm";
  return v;
}

Verdict verify_auto(const Network& net, const VerifyOptions& opt) {
  if (net.leader.kind == MachineKind::Tm || net.contributor.kind == MachineKind::Tm)
    throw std::invalid_argument("tape machines are only supported by the bounded verifier");
  const bool dp = net.leader.kind == MachineKind::Pdm;
  const bool cp = net.contributor.kind == MachineKind::Pdm;
  if (!dp && !cp) return verify_fsm_fsm(net, opt);
  if (dp && !cp) return verify_pdm_fsm(net, opt);
  if (!dp && cp) return verify_fsm_pdm(net, opt);
  return verify_pdm_pdm(net, opt);
}

}  // namespace nam
