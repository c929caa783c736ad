// Immutable binary relations over source locations and the relational
// calculus used throughout the model: union, composition, transitive
// closure, image, inverse, domain/range restriction and difference.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "m3/loc.hpp"

namespace m3 {

using LocPair = std::pair<SourceLocation, SourceLocation>;
using LocSet = std::set<SourceLocation>;

class Relation {
 public:
  using const_iterator = std::set<LocPair>::const_iterator;

  Relation() = default;
  explicit Relation(std::set<LocPair> pairs) : pairs_(std::move(pairs)) {}
  Relation(std::initializer_list<LocPair> pairs) : pairs_(pairs) {}

  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }
  bool contains(const LocPair& pair) const { return pairs_.count(pair) > 0; }
  bool contains(const SourceLocation& from, const SourceLocation& to) const {
    return contains({from, to});
  }

  const_iterator begin() const { return pairs_.begin(); }
  const_iterator end() const { return pairs_.end(); }
  const std::set<LocPair>& pairs() const { return pairs_; }

  // Returns a copy with the pair added; the receiver is unchanged.
  Relation with(const SourceLocation& from, const SourceLocation& to) const {
    std::set<LocPair> out = pairs_;
    out.insert({from, to});
    return Relation(std::move(out));
  }

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::set<LocPair> pairs_;
};

inline Relation union_of(const Relation& r, const Relation& s) {
  std::set<LocPair> out = r.pairs();
  out.insert(s.begin(), s.end());
  return Relation(std::move(out));
}

inline Relation difference(const Relation& r, const Relation& s) {
  std::set<LocPair> out;
  for (const auto& pair : r) {
    if (!s.contains(pair)) out.insert(pair);
  }
  return Relation(std::move(out));
}

// {<a,c> | <a,b> in r, <b,c> in s}
inline Relation compose(const Relation& r, const Relation& s) {
  std::map<SourceLocation, std::vector<SourceLocation>> successors;
  for (const auto& [b, c] : s) successors[b].push_back(c);
  std::set<LocPair> out;
  for (const auto& [a, b] : r) {
    auto it = successors.find(b);
    if (it == successors.end()) continue;
    for (const auto& c : it->second) out.insert({a, c});
  }
  return Relation(std::move(out));
}

inline LocSet domain(const Relation& r) {
  LocSet out;
  for (const auto& [a, b] : r) out.insert(a);
  return out;
}

inline LocSet range(const Relation& r) {
  LocSet out;
  for (const auto& [a, b] : r) out.insert(b);
  return out;
}

inline LocSet carrier(const Relation& r) {
  LocSet out;
  for (const auto& [a, b] : r) {
    out.insert(a);
    out.insert(b);
  }
  return out;
}

inline LocSet image(const Relation& r, const SourceLocation& x) {
  LocSet out;
  for (const auto& [a, b] : r) {
    if (a == x) out.insert(b);
  }
  return out;
}

inline Relation inverse(const Relation& r) {
  std::set<LocPair> out;
  for (const auto& [a, b] : r) out.insert({b, a});
  return Relation(std::move(out));
}

inline Relation restrict_domain(const Relation& r, const LocSet& s) {
  std::set<LocPair> out;
  for (const auto& pair : r) {
    if (s.count(pair.first)) out.insert(pair);
  }
  return Relation(std::move(out));
}

inline Relation restrict_range(const Relation& r, const LocSet& s) {
  std::set<LocPair> out;
  for (const auto& pair : r) {
    if (s.count(pair.second)) out.insert(pair);
  }
  return Relation(std::move(out));
}

// Smallest transitive relation containing r. Warshall over the carrier;
// exact and at worst cubic in the carrier size.
inline Relation transitive_closure(const Relation& r) {
  const LocSet all = carrier(r);
  std::vector<SourceLocation> nodes(all.begin(), all.end());
  const std::size_t n = nodes.size();
  auto index_of = [&](const SourceLocation& l) {
    return static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), l) - nodes.begin());
  };

  std::vector<bool> reach(n * n, false);
  for (const auto& [a, b] : r) {
    reach[index_of(a) * n + index_of(b)] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k * n + j]) reach[i * n + j] = true;
      }
    }
  }

  std::set<LocPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i * n + j]) out.insert({nodes[i], nodes[j]});
    }
  }
  return Relation(std::move(out));
}

}  // namespace m3
