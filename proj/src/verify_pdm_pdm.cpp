#include <stdexcept>

#include "guess.hpp"
#include "verify_util.hpp"

namespace nam {

Verdict verify_pdm_pdm(const Network& net, const VerifyOptions& opt) {
  detail::Stopwatch clock;
  Verdict v;
  v.procedure = "pdm-pdm";
  const int n = net.nvalues();
  const int hash = net.hash();
  Pdm ce = extend_lts(contributor_pdm(net));

  // Per value: a finite support of the runs that first-write it, extended by
  // copycat writes and closed under prefixes.
  std::vector<Fsa> sim(n);
  std::vector<char> writable(n, 0);
  long long support_states = 0;
  for (int g = 0; g < n; ++g) {
    auto fw = detail::first_write_pdm(ce, g, n, false);
    Cfg lg = cfg_to_cnf(pdm_to_cfg(fw.pdm, &fw.accepting));
    if (cfg_is_empty(lg)) continue;
    writable[g] = 1;
    Fsa ag = support_fsa(lg, opt.support_cap);
    support_states += ag.num_states;
    Fsa s = prefix_closure(append_star(ag, wc(g)));
    s.set_alphabet(extended_contributor_alphabet(n));
    sim[g] = std::move(s);
  }
  Cfg leader = cfg_to_cnf(pdm_to_cfg(leader_pdm(net)));
  auto taus = detail::candidate_taus(net, writable, opt.guess_cap);
  v.stats["support_states"] = support_states;
  v.stats["leader_grammar_vars"] = leader.num_vars;
  v.stats["tau_guesses"] = static_cast<long long>(taus.size());

  auto hit = detail::first_hit<Witness>(taus.size(), opt.jobs, [&](std::size_t i) -> std::optional<Witness> {
    const auto& tau = taus[i];
    Cfg gd = cfg_to_cnf(bowtie(leader, leader_store_tau(n, tau), BowtieMode::Trimmed));
    if (cfg_is_empty(gd)) return std::nullopt;
    Fsa shuffled = sim[tau[0]];
    for (std::size_t j = 1; j < tau.size(); ++j) shuffled = shuffle(shuffled, sim[tau[j]], opt.state_cap);
    Fsa ac = trim(async_product(extended_store_tau(n, tau), shuffled, opt.state_cap));
    if (is_empty(ac)) return std::nullopt;
    const int k = cover_index(gd);
    auto r = product_check(gd, ac, k, opt.witness);
    if (!r.nonempty) return std::nullopt;
    Witness w;
    w.tau = tau;
    if (r.witness) w.simulation = detail::truncate_at_hash(*r.witness, hash);
    w.note = "index bound " + std::to_string(k) + ", " + std::to_string(r.layers) + " layers";
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

}  // namespace nam
