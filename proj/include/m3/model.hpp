// The M3 model value: the language-independent core relations
// (containment, declarations, uses), the Java-layer relations
// (inheritance, overrides, invocations), a declared-types table and a
// model identity. Models compose by set union and link by rewriting the
// authorities of logical locations so that uses bind to declarations
// across projects.
#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "m3/diagnostic.hpp"
#include "m3/rel.hpp"
#include "m3/typesym.hpp"

namespace m3 {

struct Model {
  SourceLocation id;
  Relation containment;    // <contained, container>
  Relation declarations;   // <logical, physical-with-region>
  Relation uses;           // <using logical, used logical>
  Relation inheritance;    // <subtype, supertype>
  Relation overrides;      // <overridden, overriding>
  Relation invocations;    // <caller, statically resolved callee>
  std::map<SourceLocation, TypeSymbol> declared_types;
};

inline constexpr std::array<std::string_view, 6> kRelationNames = {
    "containment", "declarations", "uses",
    "inheritance", "overrides",    "invocations"};

inline Model empty_model(SourceLocation id) {
  Model m;
  m.id = std::move(id);
  return m;
}

inline const Relation& relation_by_name(const Model& m,
                                        std::string_view name) {
  if (name == "containment") return m.containment;
  if (name == "declarations") return m.declarations;
  if (name == "uses") return m.uses;
  if (name == "inheritance") return m.inheritance;
  if (name == "overrides") return m.overrides;
  if (name == "invocations") return m.invocations;
  throw UnknownRelation("unknown relation '" + std::string(name) + "'");
}

inline Relation& relation_by_name(Model& m, std::string_view name) {
  return const_cast<Relation&>(
      relation_by_name(static_cast<const Model&>(m), name));
}

// Equality over the six relations and the declared-types table; the model
// id is deliberately excluded.
inline bool relation_equal(const Model& a, const Model& b) {
  for (auto name : kRelationNames) {
    if (!(relation_by_name(a, name) == relation_by_name(b, name))) {
      return false;
    }
  }
  return a.declared_types == b.declared_types;
}

namespace detail {

inline std::map<SourceLocation, TypeSymbol> merge_declared_types(
    const std::map<SourceLocation, TypeSymbol>& a,
    const std::map<SourceLocation, TypeSymbol>& b) {
  std::map<SourceLocation, TypeSymbol> out = a;
  for (const auto& [key, symbol] : b) {
    auto [it, inserted] = out.emplace(key, symbol);
    if (!inserted && !(it->second == symbol)) {
      throw DeclaredTypeConflict("conflicting declared types for " +
                                 key.to_string() + ": " +
                                 print_type_symbol(it->second) + " vs " +
                                 print_type_symbol(symbol));
    }
  }
  return out;
}

}  // namespace detail

// Fusion: pointwise set union of all relations and the declared-types
// tables. Conflicting declared types for the same location are an error.
inline Model compose_models(const Model& a, const Model& b,
                            SourceLocation id) {
  Model out;
  out.id = std::move(id);
  out.containment = union_of(a.containment, b.containment);
  out.declarations = union_of(a.declarations, b.declarations);
  out.uses = union_of(a.uses, b.uses);
  out.inheritance = union_of(a.inheritance, b.inheritance);
  out.overrides = union_of(a.overrides, b.overrides);
  out.invocations = union_of(a.invocations, b.invocations);
  out.declared_types =
      detail::merge_declared_types(a.declared_types, b.declared_types);
  return out;
}

// Applies fn to every location in the model: both sides of every relation,
// declared-types keys, and the locations embedded in declared-type values.
// The model id is left alone.
inline Model map_locations(
    const Model& m,
    const std::function<SourceLocation(const SourceLocation&)>& fn) {
  Model out;
  out.id = m.id;
  for (auto name : kRelationNames) {
    std::set<LocPair> pairs;
    for (const auto& [from, to] : relation_by_name(m, name)) {
      pairs.insert({fn(from), fn(to)});
    }
    relation_by_name(out, name) = Relation(std::move(pairs));
  }
  for (const auto& [key, symbol] : m.declared_types) {
    out.declared_types.emplace(fn(key), symbol.map_locations(fn));
  }
  return out;
}

// Linking: for every logical location declared by either operand, record
// the declaring side's authority under the location's (scheme, path);
// rewrite every logical location in both models whose (scheme, path) is in
// that index to carry the declaring authority; finally fuse by union.
// Only authority fields ever change.
inline Model link_models(const Model& a, const Model& b, SourceLocation id,
                         const SchemeRegistry& reg =
                             SchemeRegistry::defaults()) {
  using Key = std::pair<std::string, std::vector<std::string>>;
  std::map<Key, std::string> authority_index;
  for (const Model* m : {&a, &b}) {
    for (const auto& d : domain(m->declarations)) {
      Key key{d.scheme(), d.path()};
      auto [it, inserted] = authority_index.emplace(key, d.authority());
      if (!inserted && it->second != d.authority()) {
        throw AmbiguousDeclaration(
            "both operands declare " + d.scheme() + " '" + d.to_string() +
            "' under different authorities ('" + it->second + "' vs '" +
            d.authority() + "')");
      }
    }
  }

  auto rewrite = [&](const SourceLocation& l) -> SourceLocation {
    if (reg.classify(l) != SchemeRegistry::Classification::Logical) {
      return l;
    }
    auto it = authority_index.find({l.scheme(), l.path()});
    return it == authority_index.end() ? l : l.with_authority(it->second);
  };

  return compose_models(map_locations(a, rewrite), map_locations(b, rewrite),
                        std::move(id));
}

// Whole-model validity check: logical-only relation sides, physical
// declaration targets, functional declarations within a model, and
// declared-type symbols whose type-argument count matches the declaring
// entity's parameter count (raw use, the empty list, is always allowed).
inline Diagnostics validate_model(const Model& m,
                                  const SchemeRegistry& reg =
                                      SchemeRegistry::defaults()) {
  Diagnostics out;
  auto complain = [&](const SourceLocation& at, const std::string& message) {
    out.push_back(Diagnostic{Diagnostic::Severity::Error, at.to_string(), 0,
                             0, message});
  };
  auto check_logical = [&](const SourceLocation& l, std::string_view where) {
    if (reg.classify(l) != SchemeRegistry::Classification::Logical) {
      complain(l,
               "expected a logical location in " + std::string(where));
    }
  };

  for (std::string_view name : {"containment", "uses", "inheritance",
                                "overrides", "invocations"}) {
    for (const auto& [from, to] : relation_by_name(m, name)) {
      check_logical(from, name);
      check_logical(to, name);
    }
  }
  for (const auto& [logical, physical] : m.declarations) {
    check_logical(logical, "domain(declarations)");
    if (reg.classify(physical) !=
        SchemeRegistry::Classification::Physical) {
      complain(physical, "expected a physical location in "
                         "range(declarations)");
    }
  }

  for (const auto& [key, symbol] : m.declared_types) {
    std::function<void(const TypeSymbol&)> walk = [&](const TypeSymbol& t) {
      if ((t.kind() == TypeSymbol::Kind::Class ||
           t.kind() == TypeSymbol::Kind::Interface) &&
          !t.type_args().empty()) {
        auto declared = m.declared_types.find(t.decl());
        if (declared != m.declared_types.end() &&
            declared->second.type_args().size() != t.type_args().size()) {
          complain(t.decl(),
                   "type instantiated with " +
                       std::to_string(t.type_args().size()) +
                       " arguments but declares " +
                       std::to_string(declared->second.type_args().size()) +
                       " parameters");
        }
      }
      for (const auto& child : t.children()) walk(child);
    };
    (void)key;
    walk(symbol);
  }
  return out;
}

}  // namespace m3
