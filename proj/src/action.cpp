#include "nam/action.hpp"

#include <algorithm>
#include <cctype>

namespace nam {

int ValueTable::intern(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

int ValueTable::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

namespace {

const char* kind_tag(Kind k) {
  switch (k) {
    case Kind::Read: return "r";
    case Kind::Write: return "w";
    case Kind::FirstWrite: return "f";
    case Kind::UselessWrite: return "u";
  }
  return "?";
}

bool valid_value_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') return false;
  }
  return true;
}

}  // namespace

std::string format_letter(Letter l, const ValueTable& values) {
  if (l == kEps) return "eps";
  Action a = decode(l);
  std::string out = kind_tag(a.kind);
  out += a.role == Role::Leader ? "_d(" : "_c(";
  out += values.name(a.value);
  out += ')';
  return out;
}

std::string format_plain(Letter l, const ValueTable& values) {
  if (l == kEps) return "eps";
  Action a = decode(l);
  return std::string(kind_tag(a.kind)) + "(" + values.name(a.value) + ")";
}

Letter parse_letter(const std::string& text, ValueTable& values, Role role, int line, int col) {
  if (text == "eps") return kEps;
  auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')' || open == 0) {
    throw ParseError("malformed action '" + text + "'", line, col);
  }
  std::string head = text.substr(0, open);
  std::string val = text.substr(open + 1, text.size() - open - 2);
  if (!valid_value_name(val)) throw ParseError("malformed value in '" + text + "'", line, col);
  Kind kind;
  switch (head[0]) {
    case 'r': kind = Kind::Read; break;
    case 'w': kind = Kind::Write; break;
    case 'f': kind = Kind::FirstWrite; break;
    case 'u': kind = Kind::UselessWrite; break;
    default: throw ParseError("unknown action kind in '" + text + "'", line, col);
  }
  if (head.size() == 3 && head[1] == '_') {
    if (head[2] == 'd') role = Role::Leader;
    else if (head[2] == 'c') role = Role::Contributor;
    else throw ParseError("unknown role tag in '" + text + "'", line, col);
  } else if (head.size() != 1) {
    throw ParseError("unknown action '" + text + "'", line, col);
  }
  if (role == Role::Leader && (kind == Kind::FirstWrite || kind == Kind::UselessWrite)) {
    throw ParseError("first/useless writes are contributor actions: '" + text + "'", line, col);
  }
  return act(role, kind, values.intern(val));
}

namespace {
std::vector<Letter> collect(int n, std::initializer_list<std::pair<Role, Kind>> kinds) {
  std::vector<Letter> out;
  for (int v = 0; v < n; ++v)
    for (auto [r, k] : kinds) out.push_back(act(r, k, v));
  std::sort(out.begin(), out.end());
  return out;
}
}  // namespace

std::vector<Letter> leader_alphabet(int n) {
  return collect(n, {{Role::Leader, Kind::Read}, {Role::Leader, Kind::Write}});
}
std::vector<Letter> contributor_alphabet(int n) {
  return collect(n, {{Role::Contributor, Kind::Read}, {Role::Contributor, Kind::Write}});
}
std::vector<Letter> extended_contributor_alphabet(int n) {
  return collect(n, {{Role::Contributor, Kind::Read},
                     {Role::Contributor, Kind::Write},
                     {Role::Contributor, Kind::FirstWrite},
                     {Role::Contributor, Kind::UselessWrite}});
}
std::vector<Letter> extended_alphabet(int n) {
  return collect(n, {{Role::Leader, Kind::Read},
                     {Role::Leader, Kind::Write},
                     {Role::Contributor, Kind::Read},
                     {Role::Contributor, Kind::Write},
                     {Role::Contributor, Kind::FirstWrite},
                     {Role::Contributor, Kind::UselessWrite}});
}
std::vector<Letter> leader_store_alphabet(int n) {
  return collect(n, {{Role::Leader, Kind::Read},
                     {Role::Leader, Kind::Write},
                     {Role::Contributor, Kind::Write},
                     {Role::Contributor, Kind::FirstWrite}});
}

}  // namespace nam
