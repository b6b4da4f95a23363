#include "nam/process.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <unordered_set>

namespace nam {

namespace {

struct ConfigHash {
  std::size_t operator()(const Config& c) const {
    std::size_t h = c.size();
    for (int x : c) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace

Process::Process(const Machine& m, ProcessLimits limits) : m_(m), lim_(limits) {
  switch (m.kind) {
    case MachineKind::Fsm:
      fsm_adj_.resize(m.fsm.num_states);
      for (const auto& e : m.fsm.edges) fsm_adj_[e.from].push_back({e.label, e.to});
      break;
    case MachineKind::Pdm: {
      const int ng = std::max(m.pdm.num_symbols, 1);
      pdm_rules_.resize(static_cast<std::size_t>(m.pdm.num_states) * ng);
      for (const auto& r : m.pdm.rules) pdm_rules_[static_cast<std::size_t>(r.from) * ng + r.top].push_back(&r);
      break;
    }
    case MachineKind::Tm: {
      const int ns = static_cast<int>(m.tm.symbol_names.size());
      tm_moves_.resize(static_cast<std::size_t>(m.tm.num_states) * ns);
      for (const auto& mv : m.tm.moves) tm_moves_[static_cast<std::size_t>(mv.from) * ns + mv.read].push_back(&mv);
      tm_actions_.resize(m.tm.num_states);
      for (const auto& e : m.tm.actions) tm_actions_[e.from].push_back({e.label, e.to});
      break;
    }
  }
}

Config Process::initial() const {
  switch (m_.kind) {
    case MachineKind::Fsm: return {m_.fsm.init};
    case MachineKind::Pdm: return {m_.pdm.init, m_.pdm.init_symbol};
    case MachineKind::Tm: return {m_.tm.init, 0, 0};
  }
  return {};
}

void Process::successors(const Config& c, std::vector<Move>& out, bool* capped) const {
  switch (m_.kind) {
    case MachineKind::Fsm:
      for (auto [l, t] : fsm_adj_[c[0]]) out.push_back({l, {t}});
      return;
    case MachineKind::Pdm: {
      if (c.size() < 2) return;  // empty stack blocks
      const int ng = std::max(m_.pdm.num_symbols, 1);
      for (const PdmRule* r : pdm_rules_[static_cast<std::size_t>(c[0]) * ng + c.back()]) {
        Config n(c.begin(), c.end() - 1);
        n[0] = r->to;
        for (auto it = r->push.rbegin(); it != r->push.rend(); ++it) n.push_back(*it);
        if (static_cast<int>(n.size()) - 1 > lim_.stack_cap) {
          if (capped) *capped = true;
          continue;
        }
        out.push_back({r->label, std::move(n)});
      }
      return;
    }
    case MachineKind::Tm: {
      const int ns = static_cast<int>(m_.tm.symbol_names.size());
      const int state = c[0], head = c[1];
      const int cell = c[2 + head];
      for (const TmMove* mv : tm_moves_[static_cast<std::size_t>(state) * ns + cell]) {
        Config n = c;
        n[0] = mv->to;
        n[2 + head] = mv->write;
        int h = head + mv->dir;
        if (h < 0) {
          n.insert(n.begin() + 2, 0);
          h = 0;
        } else if (2 + h >= static_cast<int>(n.size())) {
          n.push_back(0);
        }
        n[1] = h;
        // Trim blank cells away from the head so equal tapes compare equal.
        while (n.size() > 3 && n.back() == 0 && static_cast<int>(n.size()) - 3 > n[1]) n.pop_back();
        while (n.size() > 3 && n[2] == 0 && n[1] > 0) {
          n.erase(n.begin() + 2);
          --n[1];
        }
        if (static_cast<int>(n.size()) - 2 > lim_.tape_cap) {
          if (capped) *capped = true;
          continue;
        }
        out.push_back({kEps, std::move(n)});
      }
      for (auto [l, t] : tm_actions_[state]) {
        Config n = c;
        n[0] = t;
        out.push_back({l, std::move(n)});
      }
      return;
    }
  }
}

std::vector<Move> Process::register_moves(const Config& c, bool* capped) const {
  std::vector<Move> out;
  std::set<std::pair<Letter, Config>> seen_moves;
  std::unordered_set<Config, ConfigHash> seen{c};
  std::deque<Config> queue{c};
  std::vector<Move> buf;
  int explored = 0;
  while (!queue.empty()) {
    Config cur = std::move(queue.front());
    queue.pop_front();
    if (++explored > lim_.silent_budget) {
      if (capped) *capped = true;
      break;
    }
    buf.clear();
    successors(cur, buf, capped);
    for (auto& mv : buf) {
      if (mv.label == kEps) {
        if (seen.insert(mv.next).second) queue.push_back(std::move(mv.next));
      } else if (seen_moves.emplace(mv.label, mv.next).second) {
        out.push_back(std::move(mv));
      }
    }
  }
  return out;
}

bool Process::accepts(const Word& w, bool* capped) const {
  std::set<Config> cur{initial()};
  for (Letter l : w) {
    std::set<Config> nxt;
    for (const auto& c : cur)
      for (auto& mv : register_moves(c, capped))
        if (mv.label == l) nxt.insert(std::move(mv.next));
    if (nxt.empty()) return false;
    cur = std::move(nxt);
  }
  return true;
}

std::vector<Word> Process::traces(int max_ops, bool* capped) const {
  std::set<Word> out;
  Word cur;
  std::function<void(const Config&)> go = [&](const Config& c) {
    out.insert(cur);
    if (static_cast<int>(cur.size()) >= max_ops) return;
    for (const auto& mv : register_moves(c, capped)) {
      cur.push_back(mv.label);
      go(mv.next);
      cur.pop_back();
    }
  };
  go(initial());
  return {out.begin(), out.end()};
}

}  // namespace nam
