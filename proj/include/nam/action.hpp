#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nam {

enum class Role : std::uint8_t { Leader = 0, Contributor = 1 };
enum class Kind : std::uint8_t { Read = 0, Write = 1, FirstWrite = 2, UselessWrite = 3 };

// Letters are plain ints. Register actions pack (value, role, kind) into one;
// other alphabets (grammar files, tests) use small ints directly.
using Letter = std::int32_t;
inline constexpr Letter kEps = -1;

struct Action {
  Role role = Role::Leader;
  Kind kind = Kind::Read;
  int value = 0;
  bool operator==(const Action&) const = default;
};

inline Letter encode(Action a) {
  return (a.value << 3) | (static_cast<int>(a.role) << 2) | static_cast<int>(a.kind);
}
inline Action decode(Letter l) {
  return Action{static_cast<Role>((l >> 2) & 1), static_cast<Kind>(l & 3), l >> 3};
}
inline Letter act(Role r, Kind k, int v) { return encode(Action{r, k, v}); }

inline Letter rd(int v) { return act(Role::Leader, Kind::Read, v); }
inline Letter wd(int v) { return act(Role::Leader, Kind::Write, v); }
inline Letter rc(int v) { return act(Role::Contributor, Kind::Read, v); }
inline Letter wc(int v) { return act(Role::Contributor, Kind::Write, v); }
inline Letter fc(int v) { return act(Role::Contributor, Kind::FirstWrite, v); }
inline Letter uc(int v) { return act(Role::Contributor, Kind::UselessWrite, v); }

inline bool is_read(Letter l) { return l != kEps && decode(l).kind == Kind::Read; }
inline bool is_write_like(Letter l) { return l != kEps && decode(l).kind != Kind::Read; }
inline Letter with_role(Letter l, Role r) {
  if (l == kEps) return l;
  Action a = decode(l);
  a.role = r;
  return encode(a);
}

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int ln, int col)
      : std::runtime_error(msg + " (line " + std::to_string(ln) + ", column " + std::to_string(col) + ")"),
        line(ln),
        column(col) {}
};

inline const std::string kHash = "#";

/// Interned register values. Index order is insertion order; g0 is not a value.
class ValueTable {
 public:
  int intern(const std::string& name);
  int find(const std::string& name) const;  // -1 if absent
  const std::string& name(int v) const { return names_.at(v); }
  int size() const { return static_cast<int>(names_.size()); }
  int hash() const { return find(kHash); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
};

/// r_d(v), w_c(v), f_c(v), ... ; "eps" for kEps.
std::string format_letter(Letter l, const ValueTable& values);
/// Plain machine-file syntax r(v) / w(v), dropping the role.
std::string format_plain(Letter l, const ValueTable& values);
/// Inverse of both formats. Role defaults to `role` when untagged.
Letter parse_letter(const std::string& text, ValueTable& values, Role role, int line = 0, int col = 0);

std::vector<Letter> leader_alphabet(int nvalues);
std::vector<Letter> contributor_alphabet(int nvalues);           // r_c, w_c
std::vector<Letter> extended_contributor_alphabet(int nvalues);  // r_c, w_c, f_c, u_c
std::vector<Letter> extended_alphabet(int nvalues);              // Sigma_E
std::vector<Letter> leader_store_alphabet(int nvalues);          // r_d, w_d, f_c, w_c

}  // namespace nam
