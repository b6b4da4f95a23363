#include <set>
#include <stdexcept>

#include "guess.hpp"
#include "verify_util.hpp"

namespace nam {

namespace {

// Contributor runs of at most k operations whose last operation writes g and
// whose earlier operations are reads or (useless) writes, in extended form,
// reduced to the subword-minimal ones.
std::vector<std::vector<Word>> first_write_runs(const std::vector<Word>& traces, int nvalues) {
  std::vector<std::set<Word>> runs(nvalues);
  for (const auto& t : traces) {
    if (t.empty()) continue;
    Action last = decode(t.back());
    if (last.kind != Kind::Write) continue;
    Word w;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      Action a = decode(t[i]);
      if (a.kind == Kind::Read) {
        w.push_back(rc(a.value));
      } else {
        if (a.value == last.value) ok = false;  // g is not yet recorded before its first write
        w.push_back(uc(a.value));
      }
    }
    if (!ok) continue;
    w.push_back(fc(last.value));
    runs[last.value].insert(std::move(w));
  }
  std::vector<std::vector<Word>> out(nvalues);
  for (int g = 0; g < nvalues; ++g)
    for (const auto& w : runs[g]) {
      bool dominated = std::any_of(runs[g].begin(), runs[g].end(),
                                   [&](const Word& v) { return v.size() < w.size() && subword_leq(v, w); });
      if (!dominated) out[g].push_back(w);
    }
  return out;
}

}  // namespace

Verdict verify_bounded(const Network& net, int k, const VerifyOptions& opt) {
  detail::Stopwatch clock;
  Verdict v;
  v.procedure = "bounded";
  v.stats["k"] = k;
  if (k <= 0) return v;
  const int n = net.nvalues();
  const int hash = net.hash();
  bool capped = false;
  Process lp(net.leader, opt.limits), cp(net.contributor, opt.limits);
  auto leader_traces = lp.traces(k, &capped);
  auto runs = first_write_runs(cp.traces(k, &capped), n);
  std::vector<char> writable(n, 0);
  for (int g = 0; g < n; ++g) writable[g] = !runs[g].empty();
  auto taus = detail::candidate_taus(net, writable, opt.guess_cap);
  // Copycat writes per value; compatibility only gets easier with more of them.
  const int copies = (n + 1) * k;
  v.stats["leader_traces"] = static_cast<long long>(leader_traces.size());
  v.stats["tau_guesses"] = static_cast<long long>(taus.size());
  v.stats["copycat_writes"] = copies;

  std::size_t total = 0;
  for (const auto& tau : taus) {
    std::size_t c = leader_traces.size();
    for (int g : tau) c *= runs[g].size();
    total += c;
    if (total > opt.guess_cap) throw ResourceError("bounded guesses exceed the guess cap");
  }
  v.stats["guesses"] = static_cast<long long>(total);

  auto hit = detail::first_hit<Witness>(taus.size(), opt.jobs, [&](std::size_t i) -> std::optional<Witness> {
    const auto& tau = taus[i];
    const std::size_t d = tau.size();
    std::vector<std::size_t> pick(d, 0);
    while (true) {
      std::vector<Word> m;
      for (std::size_t j = 0; j < d; ++j) {
        Word w = runs[tau[j]][pick[j]];
        w.insert(w.end(), copies, wc(tau[j]));
        m.push_back(std::move(w));
      }
      for (const auto& u : leader_traces) {
        auto r = check_compatibility(u, m, n, &tau);
        if (r.compatible) {
          Witness w;
          w.tau = tau;
          w.simulation = detail::truncate_at_hash(r.interleaving, hash);
          return w;
        }
      }
      std::size_t j = 0;
      while (j < d && ++pick[j] == runs[tau[j]].size()) pick[j++] = 0;
      if (j == d) break;
    }
    return std::nullopt;
  });
  if (hit) {
    v.status = Status::Unsafe;
    v.witness = std::move(hit->second);
    if (opt.witness) detail::attach_trace(net, *v.witness, opt);
  } else if (capped) {
    v.status = Status::Unknown;
    v.notes.push_back("a stack, tape or silent-step cap pruned the search");
  }
  v.stats["time_ms"] = clock.ms();
  return v;
}

}  // namespace nam
