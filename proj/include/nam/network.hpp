#pragma once

#include <string>
#include <vector>

#include "nam/machine.hpp"

namespace nam {

/// A (leader, contributor) pair over a shared value table. `values` always
/// contains the error value "#".
struct Network {
  ValueTable values;
  Machine leader;
  Machine contributor;

  int nvalues() const { return values.size(); }
  int hash() const { return values.hash(); }
  std::string kind_pair() const { return kind_name(leader.kind) + "-" + kind_name(contributor.kind); }
};

/// Assigns roles, adds "#", and drops values that no machine ever writes
/// (together with the reads of them, which can never fire). One warning per
/// dropped value is appended to `warnings` when given.
Network make_network(const Machine& leader, const Machine& contributor, const ValueTable& values,
                     std::vector<std::string>* warnings = nullptr);

Network load_network(const std::string& leader_path, const std::string& contributor_path,
                     std::vector<std::string>* warnings = nullptr);

/// The leader as a PDM (FSMs are wrapped). Throws for TMs.
Pdm leader_pdm(const Network& net);
Pdm contributor_pdm(const Network& net);

}  // namespace nam
