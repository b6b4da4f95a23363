#include "nam/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace nam {

namespace {

// Applies `remap` to every label; labels mapped to -2 drop their transition.
Machine relabel(const Machine& m, const std::vector<int>& remap) {
  Machine out = m;
  auto conv = [&](Letter l) -> Letter {
    if (l == kEps) return l;
    Action a = decode(l);
    int v = remap[a.value];
    if (v < 0) return -2;
    a.value = v;
    return encode(a);
  };
  switch (m.kind) {
    case MachineKind::Fsm: {
      out.fsm.edges.clear();
      for (auto e : m.fsm.edges) {
        e.label = conv(e.label);
        if (e.label != -2) out.fsm.edges.push_back(e);
      }
      break;
    }
    case MachineKind::Pdm: {
      out.pdm.rules.clear();
      for (auto r : m.pdm.rules) {
        r.label = conv(r.label);
        if (r.label != -2) out.pdm.rules.push_back(r);
      }
      break;
    }
    case MachineKind::Tm: {
      out.tm.actions.clear();
      for (auto e : m.tm.actions) {
        e.label = conv(e.label);
        if (e.label != -2) out.tm.actions.push_back(e);
      }
      break;
    }
  }
  return out;
}

}  // namespace

Network make_network(const Machine& leader, const Machine& contributor, const ValueTable& values,
                     std::vector<std::string>* warnings) {
  ValueTable all = values;
  int hash = all.intern(kHash);
  std::vector<char> written(all.size(), 0);
  written[hash] = 1;
  for (const Machine* m : {&leader, &contributor})
    for (Letter l : used_labels(*m))
      if (decode(l).kind != Kind::Read) written[decode(l).value] = 1;
  Network net;
  std::vector<int> remap(all.size(), -1);
  for (int v = 0; v < all.size(); ++v) {
    if (written[v]) {
      remap[v] = net.values.intern(all.name(v));
    } else if (warnings) {
      warnings->push_back("value '" + all.name(v) + "' is never written; dropping it and its reads");
    }
  }
  const int n = net.values.size();
  net.leader = assign_role(relabel(leader, remap), Role::Leader, n);
  net.contributor = assign_role(relabel(contributor, remap), Role::Contributor, n);
  return net;
}

Network load_network(const std::string& leader_path, const std::string& contributor_path,
                     std::vector<std::string>* warnings) {
  ValueTable values;
  Machine d = load_machine(leader_path, values, Role::Leader);
  Machine c = load_machine(contributor_path, values, Role::Contributor);
  return make_network(d, c, values, warnings);
}

namespace {
Pdm as_pdm(const Machine& m) {
  switch (m.kind) {
    case MachineKind::Fsm: return wrap_fsm(m.fsm);
    case MachineKind::Pdm: return m.pdm;
    case MachineKind::Tm: break;
  }
  throw std::invalid_argument("tape machines are only supported by the bounded verifier");
}
}  // namespace

Pdm leader_pdm(const Network& net) { return as_pdm(net.leader); }
Pdm contributor_pdm(const Network& net) { return as_pdm(net.contributor); }

}  // namespace nam
