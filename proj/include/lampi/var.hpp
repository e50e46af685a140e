#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace lampi {

// A variable (or channel name). Plain names have index -1 and print as the
// base; generated names carry a counter and print as base!k.
struct Var {
  std::string base;
  int index = -1;

  bool operator==(const Var&) const = default;
  auto operator<=>(const Var&) const = default;
};

inline std::string to_string(const Var& v) {
  if (v.index < 0) return v.base;
  return v.base + "!" + std::to_string(v.index);
}

using VarSet = std::set<Var>;

// Monotone per-run fresh name source.
struct NameGen {
  int counter = 0;
  Var fresh(std::string base) { return Var{std::move(base), counter++}; }
};

inline bool contains(const VarSet& s, const Var& v) { return s.count(v) > 0; }

inline VarSet set_union(VarSet a, const VarSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

// Multiset of variables kept as a sorted vector.
struct VarMultiset {
  std::vector<Var> items;  // always sorted

  void add(const Var& v) {
    auto it = std::lower_bound(items.begin(), items.end(), v);
    items.insert(it, v);
  }
  void add_all(const VarMultiset& o) {
    for (auto& v : o.items) add(v);
  }
  // Removes every occurrence of v.
  void remove_all(const Var& v) {
    auto [lo, hi] = std::equal_range(items.begin(), items.end(), v);
    items.erase(lo, hi);
  }
  // Removes one occurrence of v if present.
  bool remove_one(const Var& v) {
    auto it = std::lower_bound(items.begin(), items.end(), v);
    if (it != items.end() && *it == v) {
      items.erase(it);
      return true;
    }
    return false;
  }
  int count(const Var& v) const {
    auto [lo, hi] = std::equal_range(items.begin(), items.end(), v);
    return int(hi - lo);
  }
  VarSet support() const { return VarSet(items.begin(), items.end()); }
  bool operator==(const VarMultiset&) const = default;
};

}  // namespace lampi
