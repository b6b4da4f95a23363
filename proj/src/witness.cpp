#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "nam/store.hpp"
#include "nam/verifier.hpp"

namespace nam {

std::string status_name(Status s) {
  switch (s) {
    case Status::Safe: return "safe";
    case Status::Unsafe: return "unsafe";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

std::string format_word(const Word& w, const ValueTable& values) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += format_letter(w[i], values);
  }
  return out;
}

std::string verdict_report(const Verdict& v, const ValueTable& values) {
  nlohmann::json j;
  j["status"] = status_name(v.status);
  j["procedure"] = v.procedure;
  j["stats"] = v.stats;
  j["notes"] = v.notes;
  if (v.witness) {
    const auto& w = *v.witness;
    nlohmann::json wj;
    std::vector<std::string> tau;
    for (int g : w.tau) tau.push_back(values.name(g));
    wj["tau"] = tau;
    std::vector<std::string> sim;
    for (Letter l : w.simulation) sim.push_back(format_letter(l, values));
    wj["simulation"] = sim;
    nlohmann::json trace = nlohmann::json::array();
    for (std::size_t i = 0; i < w.trace.letters.size(); ++i)
      trace.push_back({{"action", format_letter(w.trace.letters[i], values)},
                       {"process", w.trace.owner[i] < 0 ? std::string("leader") : "c" + std::to_string(w.trace.owner[i])}});
    wj["trace"] = trace;
    if (!w.note.empty()) wj["note"] = w.note;
    j["witness"] = wj;
  }
  return j.dump(2);
}

namespace {

Letter plain(Letter l) {
  Action a = decode(l);
  if (a.kind == Kind::FirstWrite || a.kind == Kind::UselessWrite) a.kind = Kind::Write;
  return encode(a);
}

ReplayResult fail(std::string msg) { return {false, std::move(msg)}; }

}  // namespace

ReplayResult replay_concrete(const Network& net, const ConcreteTrace& t, const ProcessLimits& lim) {
  if (t.letters.empty()) return fail("empty trace");
  if (t.letters.size() != t.owner.size()) return fail("owner list length mismatch");
  Letter last = t.letters.back();
  if (last != wc(net.hash()) || t.owner.back() < 0) return fail("trace does not end with a contributor write of #");
  int store = -1;
  Word leader;
  std::map<int, Word> contribs;
  for (std::size_t i = 0; i < t.letters.size(); ++i) {
    Letter l = t.letters[i];
    Action a = decode(l);
    if (a.kind == Kind::FirstWrite || a.kind == Kind::UselessWrite) return fail("extended letter in a plain trace");
    if ((t.owner[i] < 0) != (a.role == Role::Leader)) return fail("letter role does not match its process");
    if (a.kind == Kind::Read) {
      if (store != a.value) return fail("read of a value not in the register at position " + std::to_string(i));
    } else {
      store = a.value;
    }
    if (t.owner[i] < 0) leader.push_back(l);
    else contribs[t.owner[i]].push_back(l);
  }
  bool capped = false;
  Process lp(net.leader, lim), cp(net.contributor, lim);
  if (!lp.accepts(leader, &capped)) return fail(capped ? "leader replay hit a cap" : "leader projection is not a leader trace");
  for (const auto& [id, w] : contribs)
    if (!cp.accepts(w, &capped))
      return fail(capped ? "contributor replay hit a cap" : "projection of contributor " + std::to_string(id) + " is not a contributor trace");
  return {true, {}};
}

ReplayResult replay_simulation(const Network& net, const std::vector<int>& tau, const Word& sim, ConcreteTrace* concrete,
                               const ProcessLimits& lim, const std::vector<int>& given) {
  const int n = net.nvalues();
  const int hash = net.hash();
  if (sim.empty() || sim.back() != fc(hash)) return fail("simulation word does not end with f_c(#)");
  if (tau.empty() || tau.back() != hash) return fail("first-write sequence does not end with #");
  if (!given.empty() && given.size() != sim.size()) return fail("owner list length mismatch");
  if (!accepts(extended_store_tau(n, tau), sim)) return fail("not a trace of the extended store following the first-write sequence");

  Word leader;
  for (Letter l : sim)
    if (decode(l).role == Role::Leader) leader.push_back(l);
  bool capped = false;
  Process lp(net.leader, lim), cp(net.contributor, lim);
  if (!lp.accepts(leader, &capped)) return fail(capped ? "leader replay hit a cap" : "leader projection is not a leader trace");

  // Split the contributor letters into one run per first-written value.
  const int d = static_cast<int>(tau.size());
  std::vector<int> slot(n, -1);
  for (int i = 0; i < d; ++i) slot[tau[i]] = i;
  struct Run {
    bool done = false;
    std::set<Config> configs;
    int id = 0;  // interned (done, configs)
  };
  std::map<std::pair<bool, std::set<Config>>, int> run_ids;
  auto intern_run = [&](Run& r) {
    r.id = run_ids.emplace(std::make_pair(r.done, r.configs), static_cast<int>(run_ids.size())).first->second;
  };
  std::vector<Run> runs(d);
  for (auto& r : runs) {
    r.configs = {cp.initial()};
    intern_run(r);
  }
  std::vector<int> owner(sim.size(), -1);
  std::unordered_set<std::string> dead;
  auto key_of = [&](std::size_t pos) {
    std::string k(reinterpret_cast<const char*>(&pos), sizeof pos);
    for (const auto& r : runs) k.append(reinterpret_cast<const char*>(&r.id), sizeof r.id);
    return k;
  };
  auto advance = [&](const std::set<Config>& from, Letter l) {
    std::set<Config> out;
    for (const auto& c : from)
      for (auto& mv : cp.register_moves(c, &capped))
        if (mv.label == l) out.insert(std::move(mv.next));
    return out;
  };
  std::function<bool(std::size_t)> dfs = [&](std::size_t pos) -> bool {
    while (pos < sim.size() && decode(sim[pos]).role == Role::Leader) ++pos;
    if (pos == sim.size()) return std::all_of(runs.begin(), runs.end(), [](const Run& r) { return r.done; });
    auto key = key_of(pos);
    if (dead.count(key)) return false;
    Action a = decode(sim[pos]);
    auto attempt = [&](int i, bool finish) {
      Run saved = runs[i];
      auto next = advance(runs[i].configs, plain(sim[pos]));
      if (next.empty()) return false;
      runs[i].configs = std::move(next);
      runs[i].done = finish;
      intern_run(runs[i]);
      owner[pos] = i;
      if (dfs(pos + 1)) return true;
      runs[i] = std::move(saved);
      return false;
    };
    bool ok = false;
    if (a.kind == Kind::FirstWrite) {
      int i = slot[a.value];
      ok = i >= 0 && !runs[i].done && attempt(i, true);
    } else if (a.kind == Kind::Write) {
      int i = slot[a.value];
      if (i >= 0 && runs[i].done) {
        owner[pos] = i;
        ok = dfs(pos + 1);
      }
    } else if (!given.empty()) {
      int g = given[pos];
      int i = g >= 0 && g < n ? slot[g] : -1;
      ok = i >= 0 && !runs[i].done && attempt(i, false);
    } else {
      for (int i = 0; i < d && !ok; ++i)
        if (!runs[i].done) ok = attempt(i, false);
    }
    if (!ok) dead.insert(std::move(key));
    return ok;
  };
  if (!dfs(0)) return fail(capped ? "contributor split hit a cap" : "contributor letters do not split into simulator runs");

  // Concretize: the first writer of each value is a real contributor, every
  // later write of that value is issued by a copycat that shadows it.
  std::vector<int> copies(d, 0);
  for (std::size_t i = 0; i < sim.size(); ++i)
    if (owner[i] >= 0 && decode(sim[i]).kind == Kind::Write) ++copies[owner[i]];
  std::vector<int> first_id(d);
  int next_id = 0;
  for (int i = 0; i < d; ++i) {
    first_id[i] = next_id;
    next_id += 1 + copies[i];
  }
  ConcreteTrace out;
  std::vector<int> used(d, 0);
  for (std::size_t i = 0; i < sim.size(); ++i) {
    Letter l = sim[i];
    Action a = decode(l);
    if (a.role == Role::Leader) {
      out.letters.push_back(l);
      out.owner.push_back(-1);
      continue;
    }
    const int g = owner[i];
    if (a.kind == Kind::FirstWrite) {
      out.letters.push_back(plain(l));
      out.owner.push_back(first_id[g]);
    } else if (a.kind == Kind::Write) {
      out.letters.push_back(l);
      out.owner.push_back(first_id[g] + 1 + used[g]++);
    } else {
      for (int c = 0; c <= copies[g]; ++c) {
        out.letters.push_back(plain(l));
        out.owner.push_back(first_id[g] + c);
      }
    }
  }
  auto r = replay_concrete(net, out, lim);
  if (!r.ok) return fail("concretized trace rejected: " + r.error);
  if (concrete) *concrete = std::move(out);
  return {true, {}};
}

ReplayResult check_witness(const Network& net, const Witness& w, const ProcessLimits& lim) {
  if (w.simulation.empty() && w.trace.empty()) return fail("witness carries no trace");
  if (!w.simulation.empty()) {
    auto r = replay_simulation(net, w.tau, w.simulation, nullptr, lim, w.owner);
    if (!r.ok) return r;
  }
  if (!w.trace.empty()) return replay_concrete(net, w.trace, lim);
  return {true, {}};
}

std::vector<std::vector<Word>> contributor_support_words(const Fsa& ce, int nvalues, std::size_t cap) {
  std::vector<std::set<Word>> found(nvalues);
  auto adj = ce.adjacency();
  std::vector<char> on_path(ce.num_states, 0);
  Word cur;
  std::size_t paths = 0;
  std::function<void(int)> go = [&](int s) {
    on_path[s] = 1;
    for (auto [l, t] : adj[s]) {
      if (l == kEps) {
        if (!on_path[t]) go(t);
        continue;
      }
      Action a = decode(l);
      if (a.kind == Kind::FirstWrite) {
        Word w = cur;
        w.push_back(l);
        found[a.value].insert(std::move(w));
        if (++paths > cap) throw ResourceError("support path enumeration exceeded the guess cap");
      } else if ((a.kind == Kind::Read || a.kind == Kind::UselessWrite) && !on_path[t]) {
        cur.push_back(l);
        go(t);
        cur.pop_back();
      }
    }
    on_path[s] = 0;
  };
  go(ce.init);
  std::vector<std::vector<Word>> out(nvalues);
  for (int g = 0; g < nvalues; ++g) {
    for (const auto& w : found[g]) {
      bool dominated = std::any_of(found[g].begin(), found[g].end(),
                                   [&](const Word& v) { return v != w && v.size() < w.size() && subword_leq(v, w); });
      if (!dominated) out[g].push_back(w);
    }
  }
  return out;
}

}  // namespace nam
