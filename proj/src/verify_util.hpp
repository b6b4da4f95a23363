#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "nam/store.hpp"
#include "nam/verifier.hpp"

namespace nam::detail {

inline Word truncate_at_hash(const Word& w, int hash) {
  auto it = std::find(w.begin(), w.end(), fc(hash));
  if (it == w.end()) return w;
  return Word(w.begin(), it + 1);
}

/// First-write sequences ending in # whose values can all be first-written.
inline std::vector<std::vector<int>> candidate_taus(const Network& net, const std::vector<char>& writable,
                                                    std::size_t cap) {
  std::vector<std::vector<int>> out;
  const int n = net.nvalues();
  const int hash = net.hash();
  if (!writable[hash]) return out;
  std::vector<int> cur;
  std::vector<char> used(n, 0);
  std::function<void()> go = [&] {
    cur.push_back(hash);
    if (out.size() >= cap) throw ResourceError("first-write guesses exceed the guess cap");
    out.push_back(cur);
    cur.pop_back();
    for (int v = 0; v < n; ++v) {
      if (used[v] || !writable[v] || v == hash) continue;
      used[v] = 1;
      cur.push_back(v);
      go();
      cur.pop_back();
      used[v] = 0;
    }
  };
  go();
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

/// Extended contributor restricted to runs in (r_c, u_c, eps)* f_c(g); with
/// `tail`, followed by w_c(g)*. Accepting: the state after f_c(g).
struct FirstWritePdm {
  Pdm pdm;
  std::vector<char> accepting;
};

inline FirstWritePdm first_write_pdm(const Pdm& ce, int g, int nvalues, bool tail) {
  FirstWritePdm out;
  Pdm& p = out.pdm;
  p.num_states = ce.num_states + 1;
  p.num_symbols = ce.num_symbols;
  p.init = ce.init;
  p.init_symbol = ce.init_symbol;
  p.state_names = ce.state_names;
  p.state_names.resize(ce.num_states);
  p.state_names.push_back("after");
  p.symbol_names = ce.symbol_names;
  const int fin = ce.num_states;
  for (const auto& r : ce.rules) {
    if (r.label == kEps) {
      p.rules.push_back(r);
      continue;
    }
    Action a = decode(r.label);
    if (a.kind == Kind::Read || a.kind == Kind::UselessWrite) {
      p.rules.push_back(r);
    } else if (a.kind == Kind::FirstWrite && a.value == g) {
      PdmRule f = r;
      f.to = fin;
      p.rules.push_back(f);
    }
  }
  std::vector<Letter> alpha;
  for (int v = 0; v < nvalues; ++v) {
    alpha.push_back(rc(v));
    alpha.push_back(uc(v));
  }
  alpha.push_back(fc(g));
  if (tail) {
    alpha.push_back(wc(g));
    for (int s = 0; s < std::max(ce.num_symbols, 1); ++s) p.rules.push_back({fin, s, wc(g), fin, {s}});
  }
  std::sort(alpha.begin(), alpha.end());
  p.alphabet = alpha;
  out.accepting.assign(p.num_states, 0);
  out.accepting[fin] = 1;
  return out;
}

/// Fills the concrete trace of a witness from its simulation word.
inline void attach_trace(const Network& net, Witness& w, const VerifyOptions& opt) {
  if (w.simulation.empty()) return;
  ConcreteTrace t;
  auto r = replay_simulation(net, w.tau, w.simulation, &t, opt.limits, w.owner);
  if (r.ok) w.trace = std::move(t);
  else w.note = "replay failed: " + r.error;
}

/// Searches small populations for a concrete violation.
inline bool search_trace(const Network& net, Witness& w, const VerifyOptions& opt) {
  ExploreOptions eo;
  eo.limits = opt.limits;
  eo.state_cap = 200'000;
  for (int k = 1; k <= opt.witness_population; ++k) {
    try {
      auto r = explore_bounded(net, k, opt.witness_depth, eo);
      if (r.status == BoundedStatus::Unsafe) {
        w.trace = std::move(r.witness);
        return true;
      }
    } catch (const ResourceError&) {
      break;
    }
  }
  return false;
}

class Stopwatch {
 public:
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace nam::detail
