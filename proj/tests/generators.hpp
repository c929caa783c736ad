// Seeded random generators shared by property tests. Every test fixes
// its own seed so failures reproduce exactly.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "m3/m3.hpp"

namespace testgen {

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, int percent) {
  return pick(rng, 1, 100) <= percent;
}

inline std::string identifier(Rng& rng) {
  static const std::string head = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  static const std::string tail = head + "0123456789_";
  std::string out;
  out += head[pick(rng, 0, static_cast<int>(head.size()) - 1)];
  int extra = pick(rng, 0, 6);
  for (int i = 0; i < extra; ++i) {
    out += tail[pick(rng, 0, static_cast<int>(tail.size()) - 1)];
  }
  return out;
}

// Path segments and query parts may contain anything; the literal
// escaping must carry it.
inline std::string rough_text(Rng& rng) {
  static const std::string alphabet =
      "abcXYZ089._~()- %/|?&=<>,:\"'\\\t";
  int len = pick(rng, 1, 8);
  std::string out;
  for (int i = 0; i < len; ++i) {
    out += alphabet[pick(rng, 0, static_cast<int>(alphabet.size()) - 1)];
  }
  return out;
}

inline m3::SourceLocation location(Rng& rng) {
  static const std::vector<std::string> schemes = {
      "file",        "project",       "cwd",           "unknown",
      "java+class",  "java+interface", "java+method",  "java+constructor",
      "java+field",  "java+parameter", "java+variable", "java+package",
      "class",       "method"};
  std::string scheme = schemes[pick(rng, 0, static_cast<int>(schemes.size()) - 1)];
  std::string authority = chance(rng, 60) ? identifier(rng) : "";
  std::vector<std::string> path;
  int segments = pick(rng, 0, 4);
  for (int i = 0; i < segments; ++i) {
    path.push_back(chance(rng, 70) ? identifier(rng) : rough_text(rng));
  }
  std::map<std::string, std::string> query;
  int keys = chance(rng, 25) ? pick(rng, 1, 2) : 0;
  for (int i = 0; i < keys; ++i) {
    query[identifier(rng)] = chance(rng, 70) ? identifier(rng)
                                             : rough_text(rng);
  }
  std::optional<m3::Region> region;
  if (chance(rng, 50)) {
    region = m3::Region{static_cast<std::uint32_t>(pick(rng, 0, 5000)),
                        static_cast<std::uint32_t>(pick(rng, 0, 2000))};
  }
  return m3::SourceLocation(std::move(scheme), std::move(authority),
                            std::move(path), std::move(query), region);
}

inline m3::SourceLocation logical_location(Rng& rng) {
  static const std::vector<std::string> kinds = {
      "class", "interface", "method", "constructor", "field", "package"};
  std::vector<std::string> path;
  int segments = pick(rng, 1, 3);
  for (int i = 0; i < segments; ++i) path.push_back(identifier(rng));
  return m3::SourceLocation("java+" + kinds[pick(rng, 0, 5)],
                            identifier(rng), std::move(path));
}

inline m3::SourceLocation physical_location(Rng& rng, bool with_region) {
  std::vector<std::string> path;
  int segments = pick(rng, 1, 3);
  for (int i = 0; i < segments; ++i) path.push_back(identifier(rng));
  std::optional<m3::Region> region;
  if (with_region) {
    region = m3::Region{static_cast<std::uint32_t>(pick(rng, 0, 5000)),
                        static_cast<std::uint32_t>(pick(rng, 0, 2000))};
  }
  return m3::SourceLocation("file", "", std::move(path), {}, region);
}

inline std::vector<m3::SourceLocation> pool(Rng& rng, int size) {
  std::set<m3::SourceLocation> out;
  while (static_cast<int>(out.size()) < size) out.insert(location(rng));
  return {out.begin(), out.end()};
}

inline m3::Relation relation(Rng& rng,
                             const std::vector<m3::SourceLocation>& pool,
                             int max_pairs) {
  std::set<m3::LocPair> pairs;
  int n = pick(rng, 0, max_pairs);
  int limit = static_cast<int>(pool.size()) - 1;
  for (int i = 0; i < n; ++i) {
    pairs.emplace(pool[pick(rng, 0, limit)], pool[pick(rng, 0, limit)]);
  }
  return m3::Relation(std::move(pairs));
}

inline m3::TypeSymbol type_symbol(Rng& rng, int depth) {
  int leaf_case = pick(rng, 0, 3);
  if (depth <= 0 || chance(rng, 30)) {
    switch (leaf_case) {
      case 0:
        return m3::TypeSymbol::primitive(static_cast<m3::TypeSymbol::Primitive>(
            pick(rng, 0, 3)));
      case 1:
        return m3::TypeSymbol::unresolved(chance(rng, 60) ? identifier(rng)
                                                          : rough_text(rng));
      case 2:
        return m3::TypeSymbol::type_parameter(logical_location(rng));
      default:
        return m3::TypeSymbol::class_type(logical_location(rng));
    }
  }
  switch (pick(rng, 0, 3)) {
    case 0: {
      std::vector<m3::TypeSymbol> args;
      int n = pick(rng, 0, 2);
      for (int i = 0; i < n; ++i) args.push_back(type_symbol(rng, depth - 1));
      return m3::TypeSymbol::class_type(logical_location(rng),
                                        std::move(args));
    }
    case 1: {
      std::vector<m3::TypeSymbol> args;
      int n = pick(rng, 0, 2);
      for (int i = 0; i < n; ++i) args.push_back(type_symbol(rng, depth - 1));
      return m3::TypeSymbol::interface_type(logical_location(rng),
                                            std::move(args));
    }
    case 2: {
      std::vector<m3::TypeSymbol> params;
      int n = pick(rng, 0, 2);
      for (int i = 0; i < n; ++i) {
        params.push_back(type_symbol(rng, depth - 1));
      }
      return m3::TypeSymbol::method_type(logical_location(rng),
                                         type_symbol(rng, depth - 1),
                                         std::move(params));
    }
    default:
      return m3::TypeSymbol::array(type_symbol(rng, depth - 1));
  }
}

inline m3::Model model(Rng& rng) {
  m3::Model out = m3::empty_model(physical_location(rng, false));
  std::vector<m3::SourceLocation> logicals;
  int n = pick(rng, 2, 8);
  for (int i = 0; i < n; ++i) logicals.push_back(logical_location(rng));

  auto logical_pair_set = [&](int max_pairs) {
    std::set<m3::LocPair> pairs;
    int count = pick(rng, 0, max_pairs);
    for (int i = 0; i < count; ++i) {
      pairs.emplace(logicals[pick(rng, 0, n - 1)],
                    logicals[pick(rng, 0, n - 1)]);
    }
    return pairs;
  };

  out.containment = m3::Relation(logical_pair_set(6));
  out.uses = m3::Relation(logical_pair_set(6));
  out.inheritance = m3::Relation(logical_pair_set(4));
  out.overrides = m3::Relation(logical_pair_set(4));
  out.invocations = m3::Relation(logical_pair_set(6));

  std::set<m3::LocPair> decls;
  for (const auto& logical : logicals) {
    if (chance(rng, 70)) {
      decls.emplace(logical, physical_location(rng, true));
    }
  }
  out.declarations = m3::Relation(std::move(decls));

  for (const auto& logical : logicals) {
    if (chance(rng, 40)) {
      out.declared_types.emplace(logical, type_symbol(rng, 2));
    }
  }
  return out;
}

}  // namespace testgen
