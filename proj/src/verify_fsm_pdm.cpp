#include <atomic>
#include <functional>
#include <stdexcept>

#include "guess.hpp"
#include "verify_util.hpp"

namespace nam {

namespace {

// Sub-automata of `q` made of the strongly connected components visited by
// one accepting simple path plus the edges that link them.
void for_each_scc_path(const Fsa& q, std::size_t cap, std::atomic<std::size_t>& counter,
                       const std::function<bool(const Fsa&)>& visit) {
  std::vector<std::vector<int>> succ(q.num_states);
  for (const auto& e : q.edges) succ[e.from].push_back(e.to);
  auto [comp, ncomp] = tarjan_scc(succ);
  std::vector<std::vector<int>> members(ncomp);
  for (int s = 0; s < q.num_states; ++s) members[comp[s]].push_back(s);
  std::vector<std::vector<Edge>> internal(ncomp), leaving(ncomp);
  std::vector<char> has_acc(ncomp, 0);
  for (int s = 0; s < q.num_states; ++s)
    if (q.accepting[s]) has_acc[comp[s]] = 1;
  for (const auto& e : q.edges) {
    if (comp[e.from] == comp[e.to]) internal[comp[e.from]].push_back(e);
    else leaving[comp[e.from]].push_back(e);
  }
  std::vector<int> chain{comp[q.init]};
  std::vector<Edge> links;
  bool stop = false;
  std::function<void()> go = [&] {
    const int c = chain.back();
    if (has_acc[c]) {
      if (counter.fetch_add(1) >= cap) throw ResourceError("path guesses exceed the guess cap");
      Fsa sub;
      sub.alphabet = q.alphabet;
      sub.num_states = q.num_states;
      sub.init = q.init;
      sub.accepting.assign(q.num_states, 0);
      for (int s : members[c]) sub.accepting[s] = q.accepting[s];
      for (int x : chain) sub.edges.insert(sub.edges.end(), internal[x].begin(), internal[x].end());
      sub.edges.insert(sub.edges.end(), links.begin(), links.end());
      if (visit(trim(sub))) {
        stop = true;
        return;
      }
    }
    for (const auto& e : leaving[c]) {
      chain.push_back(comp[e.to]);
      links.push_back(e);
      go();
      links.pop_back();
      chain.pop_back();
      if (stop) return;
    }
  };
  go();
}

}  // namespace

Verdict verify_fsm_pdm(const Network& net, const VerifyOptions& opt) {
  if (net.leader.kind != MachineKind::Fsm) throw std::invalid_argument("this procedure needs a finite leader");
  detail::Stopwatch clock;
  Verdict v;
  v.procedure = "fsm-pdm";
  const int n = net.nvalues();
  Pdm ce = extend_lts(contributor_pdm(net));
  std::vector<Cfg> ll(n);
  std::vector<char> writable(n, 0);
  long long grammar_vars = 0;
  for (int g = 0; g < n; ++g) {
    auto fw = detail::first_write_pdm(ce, g, n, true);
    ll[g] = cfg_to_cnf(pdm_to_cfg(fw.pdm, &fw.accepting));
    writable[g] = !cfg_is_empty(ll[g]);
    grammar_vars += ll[g].num_vars;
  }
  auto taus = detail::candidate_taus(net, writable, opt.guess_cap);
  v.stats["contributor_grammar_vars"] = grammar_vars;
  v.stats["tau_guesses"] = static_cast<long long>(taus.size());
  std::atomic<std::size_t> paths{0};

  auto hit = detail::first_hit<Witness>(taus.size(), opt.jobs, [&](std::size_t i) -> std::optional<Witness> {
    const auto& tau = taus[i];
    Fsa q = trim(async_product(net.leader.fsm, leader_store_tau(n, tau), opt.state_cap));
    if (is_empty(q)) return std::nullopt;
    Fsa ext = extended_store_tau(n, tau);
    std::optional<Witness> found;
    for_each_scc_path(q, opt.guess_cap, paths, [&](const Fsa& qt) {
      Fsa prod = trim(async_product(qt, ext, opt.state_cap));
      if (is_empty(prod)) return false;
      for (int g : tau)
        if (!product_check(ll[g], prod, 0, false).nonempty) return false;
      found.emplace();
      found->tau = tau;
      return true;
    });
    return found;
  });
  v.stats["path_guesses"] = static_cast<long long>(paths.load());
  if (hit) {
    v.status = Status::Unsafe;
    v.witness = std::move(hit->second);
    if (opt.witness && !detail::search_trace(net, *v.witness, opt))
      v.witness->note = "no concrete trace within the witness search bounds";
  }
  v.stats["time_ms"] = clock.ms();
  return v;
}

}  // namespace nam
