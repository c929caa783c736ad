// Fact extraction. Pass one indexes every type declaration across the
// input files; pass two resolves each file against that table and emits
// one model per file. A project model is the pointwise union of the
// per-file models, so fusion order cannot matter.
//
// get_ast re-parses a declared region on demand and re-annotates it
// using only the model, which keeps trees out of the stored facts.
#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "m3/model.hpp"
#include "m3/parser.hpp"
#include "m3/resolve.hpp"
#include "m3/source.hpp"

namespace m3 {

struct SourceFile {
  SourceLocation loc;  // physical, no region
  std::string text;
};

struct ExtractResult {
  Model model;
  Diagnostics diagnostics;
  AstPtr unit;  // annotated tree; null for directory results or parse failures
};

namespace detail {

inline std::vector<std::string> split_dotted(const std::string& name) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : name) {
    if (c == '.') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

inline std::string join_dotted(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& part : parts) {
    if (!out.empty()) out += '.';
    out += part;
  }
  return out;
}

inline std::string fq_key(const std::vector<std::string>& pkg,
                          const std::string& simple) {
  std::string key;
  for (const auto& segment : pkg) {
    key += segment;
    key += '.';
  }
  key += simple;
  return key;
}

}  // namespace detail

// Everything pass two needs to know about one declared type.
struct TypeEntry {
  std::string key;  // qualified dotted name
  std::string simple;
  std::vector<std::string> pkg;
  bool is_interface = false;
  SourceLocation loc;   // logical
  SourceLocation file;  // physical, no region
  AstPtr node;
  std::vector<std::pair<std::string, SourceLocation>> type_params;
  std::map<std::string, std::string> imports;  // simple name -> dotted path
  std::set<std::string> siblings;  // simple names declared in the same file
};

struct UnitScope {
  std::vector<std::string> pkg;
  std::map<std::string, std::string> imports;
  std::set<std::string> siblings;
};

inline std::string declared_simple_name(const AstPtr& node) {
  for (const AstChild& child : node->children()) {
    if (std::holds_alternative<std::string>(child)) {
      return std::get<std::string>(child);
    }
  }
  return "?";
}

inline UnitScope unit_scope(const AstPtr& unit) {
  UnitScope scope;
  for (const AstChild& child : unit->children()) {
    const AstPtr& node = std::get<AstPtr>(child);
    if (node->constructor() == "packageDecl") {
      scope.pkg = detail::split_dotted(node->text_child(0));
    } else if (node->constructor() == "importDecl") {
      std::vector<std::string> parts =
          detail::split_dotted(node->text_child(0));
      scope.imports[parts.back()] = node->text_child(0);
    } else {
      scope.siblings.insert(declared_simple_name(node));
    }
  }
  return scope;
}

inline TypeEntry make_type_entry(const UnitScope& scope, const AstPtr& node,
                                 const std::string& authority,
                                 const SourceLocation& file) {
  TypeEntry entry;
  entry.simple = declared_simple_name(node);
  entry.pkg = scope.pkg;
  entry.is_interface = node->constructor() == "interfaceDecl";
  std::vector<std::string> path = scope.pkg;
  path.push_back(entry.simple);
  entry.loc = logical_loc(entry.is_interface ? "interface" : "class",
                          authority, std::move(path));
  entry.file = file;
  entry.node = node;
  entry.key = detail::fq_key(scope.pkg, entry.simple);
  entry.imports = scope.imports;
  entry.siblings = scope.siblings;
  for (const AstChild& child : node->children()) {
    if (!std::holds_alternative<AstPtr>(child)) continue;
    const AstPtr& sub = std::get<AstPtr>(child);
    if (sub->constructor() == "paramDecl" && sub->children().size() == 1) {
      const std::string& name = sub->text_child(0);
      entry.type_params.emplace_back(name,
                                     child_loc("parameter", entry.loc, name));
    }
  }
  return entry;
}

class DeclTable {
 public:
  bool add(TypeEntry entry) {
    std::string key = entry.key;
    auto [it, inserted] = by_key_.emplace(std::move(key), std::move(entry));
    if (inserted) by_loc_[it->second.loc.to_string()] = &it->second;
    return inserted;
  }

  const TypeEntry* find(const std::string& key) const {
    auto it = by_key_.find(key);
    return it == by_key_.end() ? nullptr : &it->second;
  }

  const TypeEntry* by_loc(const SourceLocation& loc) const {
    auto it = by_loc_.find(loc.without_region().to_string());
    return it == by_loc_.end() ? nullptr : it->second;
  }

 private:
  std::map<std::string, TypeEntry> by_key_;
  std::map<std::string, const TypeEntry*> by_loc_;
};

struct MethodDesc {
  std::string name;
  SourceLocation loc;
  TypeSymbol ret = TypeSymbol::unresolved("?");
  std::vector<TypeSymbol> params;
  std::vector<std::string> erased;
};

// Resolver over the declaration table, in the context of one type
// (its file's imports and package, its own type parameters).
class TableResolver : public Resolver {
 public:
  using DiagFn = std::function<void(
      Diagnostic::Severity, const std::optional<SourceLocation>&,
      const std::string&)>;

  TableResolver(const DeclTable& table, std::string authority,
                const TypeEntry* ctx, DiagFn diag = {})
      : table_(table),
        authority_(std::move(authority)),
        ctx_(ctx),
        diag_(std::move(diag)) {}

  TypeSymbol type_ref(const std::string& written,
                      std::vector<TypeSymbol> args, TypeSite site,
                      const std::optional<SourceLocation>& at) override {
    return type_ref_in(ctx_, written, std::move(args), site, at, false);
  }

  std::optional<Member> field(const TypeSymbol& receiver,
                              const std::string& name) override {
    return search(receiver, [&](const TypeEntry& e, const Binding& binding)
                                -> std::optional<Member> {
      for (const AstChild& child : e.node->children()) {
        if (!std::holds_alternative<AstPtr>(child)) continue;
        const AstPtr& sub = std::get<AstPtr>(child);
        if (sub->constructor() != "fieldDecl") continue;
        if (field_name_of(sub) != name) continue;
        TypeSymbol sym = resolve_node_in(&e, field_type_of(sub));
        return Member{child_loc("field", e.loc, name),
                      instantiate(sym, binding)};
      }
      return std::nullopt;
    });
  }

  std::optional<Member> method(const TypeSymbol& receiver,
                               const std::string& name,
                               const std::vector<TypeSymbol>& args) override {
    if (auto exact = find_method(receiver, name, args, true)) return exact;
    return find_method(receiver, name, args, false);
  }

  std::optional<Member> constructor(
      const TypeSymbol& type, const std::vector<TypeSymbol>& args) override {
    if (!located_type(type) ||
        type.kind() == TypeSymbol::Kind::TypeParameter) {
      return std::nullopt;
    }
    const TypeEntry* e = table_.by_loc(type.decl());
    if (!e) return std::nullopt;
    Binding binding = binding_of(*e, type);
    for (bool exact : {true, false}) {
      for (const MethodDesc& desc : ctors_of(*e)) {
        if (desc.params.size() != args.size()) continue;
        if (exact && !params_match(desc.params, args, binding)) continue;
        return Member{desc.loc, instantiate(desc.ret, binding)};
      }
    }
    return std::nullopt;
  }

  // Direct supertypes as written, resolved in the entry's own context.
  std::vector<TypeSymbol> supers_of(const TypeEntry& e) const {
    std::vector<TypeSymbol> out;
    bool in_extends = false;
    for (const AstChild& child : e.node->children()) {
      if (std::holds_alternative<std::string>(child)) {
        in_extends = std::get<std::string>(child) == "extends";
        continue;
      }
      if (!std::holds_alternative<AstPtr>(child)) continue;
      const AstPtr& sub = std::get<AstPtr>(child);
      if (sub->sort() != Sort::Type) continue;
      TypeSite site = (!e.is_interface && in_extends)
                          ? TypeSite::ClassExtends
                          : TypeSite::Interface;
      TypeSymbol sym = resolve_node_in(&e, sub, site);
      if (located_type(sym) &&
          sym.kind() != TypeSymbol::Kind::TypeParameter) {
        out.push_back(std::move(sym));
      }
    }
    return out;
  }

  std::vector<MethodDesc> methods_of(const TypeEntry& e) const {
    return member_descs(e, "methodDecl");
  }

  std::vector<MethodDesc> ctors_of(const TypeEntry& e) const {
    return member_descs(e, "constructorDecl");
  }

 private:
  using Binding = std::map<SourceLocation, TypeSymbol>;

  std::vector<MethodDesc> member_descs(const TypeEntry& e,
                                       std::string_view ctor) const {
    std::vector<MethodDesc> out;
    for (const AstChild& child : e.node->children()) {
      if (!std::holds_alternative<AstPtr>(child)) continue;
      const AstPtr& sub = std::get<AstPtr>(child);
      if (sub->constructor() != ctor) continue;
      MethodDesc desc;
      desc.name = field_name_of(sub);
      std::string kind = ctor == "methodDecl" ? "method" : "constructor";
      desc.loc = child_loc(kind, e.loc, signature_text(desc.name, sub));
      if (ctor == "methodDecl") {
        desc.ret = resolve_node_in(&e, field_type_of(sub));
      } else {
        std::vector<TypeSymbol> tps;
        for (const auto& [tpn, tploc] : e.type_params) {
          tps.push_back(TypeSymbol::type_parameter(tploc));
        }
        desc.ret = e.is_interface ? TypeSymbol::interface_type(e.loc, tps)
                                  : TypeSymbol::class_type(e.loc, tps);
      }
      for (const AstChild& pc : sub->children()) {
        if (!std::holds_alternative<AstPtr>(pc)) continue;
        const AstPtr& p = std::get<AstPtr>(pc);
        if (p->constructor() != "paramDecl" || p->children().size() < 2) {
          continue;
        }
        TypeSymbol psym = resolve_node_in(&e, p->node_child(0));
        desc.erased.push_back(type_name_of(psym));
        desc.params.push_back(std::move(psym));
      }
      out.push_back(std::move(desc));
    }
    return out;
  }

  std::optional<Member> find_method(const TypeSymbol& receiver,
                                    const std::string& name,
                                    const std::vector<TypeSymbol>& args,
                                    bool exact) {
    return search(receiver, [&](const TypeEntry& e, const Binding& binding)
                                -> std::optional<Member> {
      for (const MethodDesc& desc : methods_of(e)) {
        if (desc.name != name || desc.params.size() != args.size()) continue;
        if (exact && !params_match(desc.params, args, binding)) continue;
        return Member{desc.loc, instantiate(desc.ret, binding)};
      }
      return std::nullopt;
    });
  }

  static bool params_match(const std::vector<TypeSymbol>& params,
                           const std::vector<TypeSymbol>& args,
                           const Binding& binding) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      TypeSymbol p = instantiate(params[i], binding);
      if (p.kind() == TypeSymbol::Kind::TypeParameter) continue;
      if (args[i].kind() == TypeSymbol::Kind::Unresolved) continue;
      if (type_name_of(p) != type_name_of(args[i])) return false;
    }
    return true;
  }

  Binding binding_of(const TypeEntry& e, const TypeSymbol& t) const {
    Binding binding;
    if (e.type_params.size() == t.type_args().size()) {
      for (std::size_t i = 0; i < e.type_params.size(); ++i) {
        binding.emplace(e.type_params[i].second, t.type_args()[i]);
      }
    }
    return binding;
  }

  template <typename Fn>
  std::optional<Member> search(const TypeSymbol& start, const Fn& fn) {
    std::set<std::string> visited;
    return search_rec(start, fn, visited);
  }

  template <typename Fn>
  std::optional<Member> search_rec(const TypeSymbol& t, const Fn& fn,
                                   std::set<std::string>& visited) {
    if (!located_type(t) || t.kind() == TypeSymbol::Kind::TypeParameter) {
      return std::nullopt;
    }
    const TypeEntry* e = table_.by_loc(t.decl());
    if (!e || !visited.insert(e->loc.to_string()).second) return std::nullopt;
    Binding binding = binding_of(*e, t);
    if (auto found = fn(*e, binding)) return found;
    for (const TypeSymbol& super : supers_of(*e)) {
      if (auto found = search_rec(instantiate(super, binding), fn, visited)) {
        return found;
      }
    }
    return std::nullopt;
  }

  // Quiet structural resolution of a written type in an entry's context.
  TypeSymbol resolve_node_in(const TypeEntry* ctx, const AstPtr& node,
                             TypeSite site = TypeSite::General) const {
    const std::string& ctor = node->constructor();
    if (ctor == "primitiveType") {
      const std::string& word = node->text_child(0);
      TypeSymbol::Primitive p =
          word == "int"       ? TypeSymbol::Primitive::Int
          : word == "boolean" ? TypeSymbol::Primitive::Boolean
          : word == "str"     ? TypeSymbol::Primitive::Str
                              : TypeSymbol::Primitive::Void;
      return TypeSymbol::primitive(p);
    }
    if (ctor == "arrayType") {
      return TypeSymbol::array(resolve_node_in(ctx, node->node_child(0)));
    }
    std::vector<TypeSymbol> args;
    for (std::size_t i = 1; i < node->children().size(); ++i) {
      args.push_back(resolve_node_in(ctx, node->node_child(i)));
    }
    return type_ref_in(ctx, node->text_child(0), std::move(args), site,
                       std::nullopt, true);
  }

  TypeSymbol type_ref_in(const TypeEntry* ctx, const std::string& written,
                         std::vector<TypeSymbol> args, TypeSite site,
                         const std::optional<SourceLocation>& at,
                         bool quiet) const {
    std::vector<std::string> parts = detail::split_dotted(written);
    if (parts.size() == 1 && ctx) {
      const std::string& n = parts[0];
      for (const auto& [tpn, tploc] : ctx->type_params) {
        if (tpn == n) return TypeSymbol::type_parameter(tploc);
      }
      if (ctx->siblings.count(n)) {
        if (const TypeEntry* e = table_.find(detail::fq_key(ctx->pkg, n))) {
          return entry_sym(*e, std::move(args));
        }
      }
      auto imported = ctx->imports.find(n);
      if (imported != ctx->imports.end()) {
        if (const TypeEntry* e = table_.find(imported->second)) {
          return entry_sym(*e, std::move(args));
        }
        return synthesize(detail::split_dotted(imported->second), site,
                          std::move(args), at, quiet);
      }
      if (const TypeEntry* e = table_.find(detail::fq_key(ctx->pkg, n))) {
        return entry_sym(*e, std::move(args));
      }
      if (site != TypeSite::General) {
        std::vector<std::string> path = ctx->pkg;
        path.push_back(n);
        return synthesize(std::move(path), site, std::move(args), at, quiet);
      }
      return TypeSymbol::unresolved(written);
    }
    if (const TypeEntry* e = table_.find(written)) {
      return entry_sym(*e, std::move(args));
    }
    if (parts.size() > 1) {
      return synthesize(std::move(parts), site, std::move(args), at, quiet);
    }
    return TypeSymbol::unresolved(written);
  }

  static TypeSymbol entry_sym(const TypeEntry& e,
                              std::vector<TypeSymbol> args) {
    return e.is_interface ? TypeSymbol::interface_type(e.loc, std::move(args))
                          : TypeSymbol::class_type(e.loc, std::move(args));
  }

  // A reference that leaves the analyzed code gets a location under the
  // current authority; linking can rebind it to a declaring project.
  TypeSymbol synthesize(std::vector<std::string> path, TypeSite site,
                        std::vector<TypeSymbol> args,
                        const std::optional<SourceLocation>& at,
                        bool quiet) const {
    bool iface = site == TypeSite::Interface;
    SourceLocation loc =
        logical_loc(iface ? "interface" : "class", authority_, path);
    if (!quiet && diag_) {
      diag_(Diagnostic::Severity::Info, at,
            "external type " + detail::join_dotted(path));
    }
    return iface ? TypeSymbol::interface_type(loc, std::move(args))
                 : TypeSymbol::class_type(loc, std::move(args));
  }

  static std::string field_name_of(const AstPtr& node) {
    for (const AstChild& child : node->children()) {
      if (std::holds_alternative<std::string>(child)) {
        return std::get<std::string>(child);
      }
    }
    return "?";
  }

  static AstPtr field_type_of(const AstPtr& node) {
    for (const AstChild& child : node->children()) {
      if (std::holds_alternative<AstPtr>(child) &&
          std::get<AstPtr>(child)->sort() == Sort::Type) {
        return std::get<AstPtr>(child);
      }
    }
    return nullptr;
  }

  const DeclTable& table_;
  std::string authority_;
  const TypeEntry* ctx_;
  DiagFn diag_;
};

namespace detail {

// 1-based (line, column) of each codepoint, plus the end position.
inline std::vector<std::pair<std::size_t, std::size_t>> cp_positions(
    const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t line = 1, column = 1;
  for (char c : text) {
    bool lead = (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    if (lead) out.emplace_back(line, column);
    if (c == '\n') {
      ++line;
      column = 1;
    } else if (lead) {
      ++column;
    }
  }
  out.emplace_back(line, column);
  return out;
}

class FileExtractor {
 public:
  FileExtractor(const DeclTable& table, std::string authority, AstPtr unit,
                std::string text, const std::set<const AstNode*>* suppressed)
      : table_(table),
        authority_(std::move(authority)),
        unit_(std::move(unit)),
        text_(std::move(text)),
        suppressed_(suppressed) {}

  ExtractResult run() {
    SourceLocation file = unit_->src()->without_region();
    positions_ = cp_positions(text_);
    file_name_ = file.to_string();

    std::set<LocPair> contains, decls, uses, inherits, overrides, invokes;
    std::map<SourceLocation, TypeSymbol> declared;

    Sinks sinks;
    sinks.declare = [&](const SourceLocation& l, const SourceLocation& p) {
      decls.emplace(l, p);
    };
    sinks.contain = [&](const SourceLocation& c, const SourceLocation& p) {
      contains.emplace(c, p);
    };
    sinks.use = [&](const SourceLocation& s, const SourceLocation& t) {
      uses.emplace(s, t);
    };
    sinks.invoke = [&](const SourceLocation& c, const SourceLocation& t) {
      invokes.emplace(c, t);
    };
    sinks.inherit = [&](const SourceLocation& s, const SourceLocation& t) {
      inherits.emplace(s, t);
    };
    sinks.declare_type = [&](const SourceLocation& l, const TypeSymbol& t) {
      auto [it, inserted] = declared.emplace(l, t);
      if (!inserted && !(it->second == t)) {
        report(Diagnostic::Severity::Error, std::nullopt,
               "conflicting declared type for " + l.to_string());
      }
    };
    sinks.diag = [&](Diagnostic::Severity sev,
                     const std::optional<SourceLocation>& at,
                     const std::string& msg) { report(sev, at, msg); };

    UnitScope scope = unit_scope(unit_);
    SourceLocation pkg_loc = logical_loc("package", authority_, scope.pkg);

    std::vector<AstChild> unit_children;
    unit_children.reserve(unit_->children().size());
    for (const AstChild& child : unit_->children()) {
      const AstPtr& node = std::get<AstPtr>(child);
      if (node->constructor() == "packageDecl") {
        TableResolver resolver(table_, authority_, nullptr, sinks.diag);
        Annotator annotator(resolver, sinks);
        unit_children.push_back(annotator.package_decl(node, pkg_loc));
      } else if (node->constructor() == "importDecl") {
        unit_children.push_back(child);
      } else {
        TypeEntry entry =
            make_type_entry(scope, node, authority_, file);
        TableResolver resolver(table_, authority_, &entry, sinks.diag);
        if (suppressed_ && suppressed_->count(node.get()) > 0) {
          // A duplicate that lost to another file: keep the tree but emit
          // no facts for it.
          Annotator annotator(resolver, Sinks{});
          unit_children.push_back(annotator.type_decl(node, entry.loc));
          continue;
        }
        Annotator annotator(resolver, sinks);
        unit_children.push_back(annotator.type_decl(node, entry.loc));
        contains.emplace(entry.loc, pkg_loc);
        collect_overrides(resolver, entry, overrides);
      }
    }

    ExtractResult result;
    result.model.id = file;
    result.model.containment = Relation(std::move(contains));
    result.model.declarations = Relation(std::move(decls));
    result.model.uses = Relation(std::move(uses));
    result.model.inheritance = Relation(std::move(inherits));
    result.model.overrides = Relation(std::move(overrides));
    result.model.invocations = Relation(std::move(invokes));
    result.model.declared_types = std::move(declared);
    std::sort(diags_.begin(), diags_.end());
    diags_.erase(std::unique(diags_.begin(), diags_.end()), diags_.end());
    result.diagnostics = std::move(diags_);
    result.unit = std::make_shared<const AstNode>(
        unit_->with_children(std::move(unit_children)));
    return result;
  }

 private:
  void collect_overrides(TableResolver& resolver, const TypeEntry& entry,
                         std::set<LocPair>& overrides) {
    std::vector<MethodDesc> own = resolver.methods_of(entry);
    if (own.empty()) return;
    std::set<std::string> visited{entry.loc.to_string()};
    std::vector<TypeSymbol> work = resolver.supers_of(entry);
    while (!work.empty()) {
      TypeSymbol super = std::move(work.back());
      work.pop_back();
      const TypeEntry* e = table_.by_loc(super.decl());
      if (!e || !visited.insert(e->loc.to_string()).second) continue;
      for (const MethodDesc& sm : resolver.methods_of(*e)) {
        for (const MethodDesc& m : own) {
          if (m.name == sm.name && m.erased == sm.erased) {
            overrides.emplace(sm.loc, m.loc);
          }
        }
      }
      for (TypeSymbol& s : resolver.supers_of(*e)) {
        work.push_back(std::move(s));
      }
    }
  }

  void report(Diagnostic::Severity sev,
              const std::optional<SourceLocation>& at,
              const std::string& msg) {
    Diagnostic d;
    d.severity = sev;
    d.file = file_name_;
    if (at && at->region() && at->region()->offset < positions_.size()) {
      const auto& [line, column] = positions_[at->region()->offset];
      d.line = line;
      d.column = column;
    }
    d.message = msg;
    diags_.push_back(std::move(d));
  }

  const DeclTable& table_;
  std::string authority_;
  AstPtr unit_;
  std::string text_;
  const std::set<const AstNode*>* suppressed_;
  std::vector<std::pair<std::size_t, std::size_t>> positions_;
  std::string file_name_;
  Diagnostics diags_;
};

}  // namespace detail

// Single-file extraction against a table of just that file.
inline ExtractResult extract_file(const AstPtr& unit,
                                  const std::string& authority,
                                  const std::string& text = "") {
  DeclTable table;
  UnitScope scope = unit_scope(unit);
  SourceLocation file = unit->src()->without_region();
  for (const AstChild& child : unit->children()) {
    const AstPtr& node = std::get<AstPtr>(child);
    if (node->constructor() == "classDecl" ||
        node->constructor() == "interfaceDecl") {
      table.add(make_type_entry(scope, node, authority, file));
    }
  }
  return detail::FileExtractor(table, authority, unit, text, nullptr).run();
}

inline ExtractResult extract_file(const SourceFile& file,
                                  const std::string& authority) {
  try {
    AstPtr unit = parse_file(file.text, file.loc);
    return extract_file(unit, authority, file.text);
  } catch (const ParseError& e) {
    ExtractResult result;
    result.model = empty_model(file.loc);
    result.diagnostics.push_back(Diagnostic{Diagnostic::Severity::Error,
                                            file.loc.to_string(), e.line(),
                                            e.column(),
                                            "expected " + e.expected()});
    return result;
  }
}

// Per-file models resolved against the whole input set, sorted by file
// location. Their pointwise union in any order is the project model.
inline std::vector<ExtractResult> extract_directory_models(
    std::vector<SourceFile> files, const std::string& authority) {
  std::sort(files.begin(), files.end(),
            [](const SourceFile& a, const SourceFile& b) {
              return a.loc.to_string() < b.loc.to_string();
            });

  struct Parsed {
    const SourceFile* file;
    AstPtr unit;  // null on parse failure
    Diagnostics diags;
  };
  std::vector<Parsed> parsed;
  parsed.reserve(files.size());
  for (const SourceFile& file : files) {
    Parsed p{&file, nullptr, {}};
    try {
      p.unit = parse_file(file.text, file.loc);
    } catch (const ParseError& e) {
      p.diags.push_back(Diagnostic{Diagnostic::Severity::Error,
                                   file.loc.to_string(), e.line(), e.column(),
                                   "expected " + e.expected()});
    }
    parsed.push_back(std::move(p));
  }

  DeclTable table;
  std::set<const AstNode*> suppressed;
  for (Parsed& p : parsed) {
    if (!p.unit) continue;
    UnitScope scope = unit_scope(p.unit);
    auto positions = detail::cp_positions(p.file->text);
    for (const AstChild& child : p.unit->children()) {
      const AstPtr& node = std::get<AstPtr>(child);
      if (node->constructor() != "classDecl" &&
          node->constructor() != "interfaceDecl") {
        continue;
      }
      TypeEntry entry = make_type_entry(scope, node, authority, p.file->loc);
      std::string key = entry.key;
      if (!table.add(std::move(entry))) {
        suppressed.insert(node.get());
        std::size_t offset = node->src()->region()->offset;
        auto [line, column] = offset < positions.size()
                                  ? positions[offset]
                                  : std::pair<std::size_t, std::size_t>{0, 0};
        p.diags.push_back(Diagnostic{Diagnostic::Severity::Error,
                                     p.file->loc.to_string(), line, column,
                                     "duplicate type '" + key + "'"});
      }
    }
  }

  std::vector<ExtractResult> results;
  results.reserve(parsed.size());
  for (Parsed& p : parsed) {
    if (!p.unit) {
      ExtractResult result;
      result.model = empty_model(p.file->loc);
      result.diagnostics = std::move(p.diags);
      results.push_back(std::move(result));
      continue;
    }
    ExtractResult result = detail::FileExtractor(table, authority, p.unit,
                                                 p.file->text, &suppressed)
                               .run();
    result.diagnostics.insert(result.diagnostics.end(), p.diags.begin(),
                              p.diags.end());
    std::sort(result.diagnostics.begin(), result.diagnostics.end());
    results.push_back(std::move(result));
  }
  return results;
}

inline ExtractResult extract_directory(std::vector<SourceFile> files,
                                       const SourceLocation& root,
                                       const std::string& authority) {
  std::vector<ExtractResult> per_file =
      extract_directory_models(std::move(files), authority);
  ExtractResult out;
  out.model = empty_model(root);
  for (ExtractResult& r : per_file) {
    out.model = compose_models(out.model, r.model, root);
    out.diagnostics.insert(out.diagnostics.end(), r.diagnostics.begin(),
                           r.diagnostics.end());
  }
  std::sort(out.diagnostics.begin(), out.diagnostics.end());
  out.diagnostics.erase(
      std::unique(out.diagnostics.begin(), out.diagnostics.end()),
      out.diagnostics.end());
  return out;
}

// Reads *.java under dir; locations are rooted at `root` using
// path-sorted relative segments.
inline std::vector<SourceFile> load_source_dir(
    const std::filesystem::path& dir, const SourceLocation& root) {
  std::vector<SourceFile> files;
  for (const auto& item :
       std::filesystem::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file() || item.path().extension() != ".java") {
      continue;
    }
    std::vector<std::string> path = root.path();
    for (const auto& part : std::filesystem::relative(item.path(), dir)) {
      path.push_back(part.string());
    }
    SourceLocation loc(root.scheme(), root.authority(), std::move(path));
    std::ifstream in(item.path(), std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    files.push_back(SourceFile{std::move(loc), buffer.str()});
  }
  std::sort(files.begin(), files.end(),
            [](const SourceFile& a, const SourceFile& b) {
              return a.loc.to_string() < b.loc.to_string();
            });
  return files;
}

// --- on-demand trees ---

namespace detail {

inline std::size_t signature_arity(const std::string& segment) {
  std::size_t open = segment.find('(');
  if (open == std::string::npos) return 0;
  std::size_t close = segment.rfind(')');
  if (close == std::string::npos || close <= open + 1) return 0;
  std::size_t count = 1;
  int depth = 0;
  for (std::size_t i = open + 1; i < close; ++i) {
    char c = segment[i];
    if (c == '<' || c == '(' || c == '[') ++depth;
    if (c == '>' || c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) ++count;
  }
  return count;
}

inline std::string signature_name(const std::string& segment) {
  return segment.substr(0, segment.find('('));
}

}  // namespace detail

// Resolver backed by a model's declarations and declared types; used
// when re-annotating a re-parsed fragment.
class ModelResolver : public Resolver {
 public:
  ModelResolver(const Model& model, std::vector<std::string> pkg,
                std::map<std::string, SourceLocation> type_params)
      : model_(model), pkg_(std::move(pkg)),
        type_params_(std::move(type_params)) {
    auto note = [&](const SourceLocation& loc) {
      if (loc.scheme() != "java+class" && loc.scheme() != "java+interface") {
        return;
      }
      SourceLocation bare = loc.without_region();
      types_[type_key(bare.scheme(), bare.path())].insert(bare);
      if (!bare.path().empty()) {
        by_simple_[bare.path().back()].insert(bare);
      }
    };
    for (const auto& pair : model.declarations) note(pair.first);
    for (const auto& [loc, sym] : model.declared_types) {
      note(loc);
      if (loc.scheme() == "java+method" ||
          loc.scheme() == "java+constructor") {
        if (!loc.path().empty()) {
          std::vector<std::string> parent(loc.path().begin(),
                                          loc.path().end() - 1);
          members_[member_key(loc.authority(), parent)].push_back(loc);
        }
      }
    }
    for (auto& [key, locs] : members_) std::sort(locs.begin(), locs.end());
  }

  TypeSymbol type_ref(const std::string& written,
                      std::vector<TypeSymbol> args, TypeSite site,
                      const std::optional<SourceLocation>& at) override {
    (void)site;
    (void)at;
    std::vector<std::string> parts = detail::split_dotted(written);
    if (parts.size() == 1) {
      auto tp = type_params_.find(written);
      if (tp != type_params_.end()) {
        return TypeSymbol::type_parameter(tp->second);
      }
      std::vector<std::string> same_pkg = pkg_;
      same_pkg.push_back(written);
      if (auto loc = find_type(same_pkg)) {
        return loc_sym(*loc, std::move(args));
      }
      auto simple = by_simple_.find(written);
      if (simple != by_simple_.end()) {
        // Unique up to authority: all candidates must share scheme+path.
        const SourceLocation& first = *simple->second.begin();
        bool unique = true;
        for (const SourceLocation& loc : simple->second) {
          if (loc.scheme() != first.scheme() || loc.path() != first.path()) {
            unique = false;
            break;
          }
        }
        if (unique) return loc_sym(first, std::move(args));
      }
      return TypeSymbol::unresolved(written);
    }
    if (auto loc = find_type(parts)) return loc_sym(*loc, std::move(args));
    return TypeSymbol::unresolved(written);
  }

  std::optional<Member> field(const TypeSymbol& receiver,
                              const std::string& name) override {
    std::set<std::string> visited;
    return field_rec(receiver, name, visited);
  }

  std::optional<Member> method(const TypeSymbol& receiver,
                               const std::string& name,
                               const std::vector<TypeSymbol>& args) override {
    for (bool exact : {true, false}) {
      std::set<std::string> visited;
      if (auto found =
              member_rec(receiver, "java+method", name, args, exact, visited))
        return found;
    }
    return std::nullopt;
  }

  std::optional<Member> constructor(
      const TypeSymbol& type, const std::vector<TypeSymbol>& args) override {
    if (!located_type(type)) return std::nullopt;
    for (bool exact : {true, false}) {
      if (auto found = member_in(type, "java+constructor",
                                 type.decl().path().back(), args, exact)) {
        return found;
      }
    }
    return std::nullopt;
  }

 private:
  using Binding = std::map<SourceLocation, TypeSymbol>;

  static std::string type_key(const std::string& scheme,
                              const std::vector<std::string>& path) {
    std::string key = scheme + ":";
    for (const auto& segment : path) key += "/" + segment;
    return key;
  }

  static std::string member_key(const std::string& authority,
                                const std::vector<std::string>& path) {
    std::string key = authority + ":";
    for (const auto& segment : path) key += "/" + segment;
    return key;
  }

  std::optional<SourceLocation> find_type(
      const std::vector<std::string>& path) const {
    for (const char* scheme : {"java+class", "java+interface"}) {
      auto it = types_.find(type_key(scheme, path));
      if (it != types_.end() && !it->second.empty()) {
        return *it->second.begin();
      }
    }
    return std::nullopt;
  }

  static TypeSymbol loc_sym(const SourceLocation& loc,
                            std::vector<TypeSymbol> args) {
    return loc.scheme() == "java+interface"
               ? TypeSymbol::interface_type(loc, std::move(args))
               : TypeSymbol::class_type(loc, std::move(args));
  }

  Binding binding_of(const SourceLocation& class_loc,
                     const TypeSymbol& t) const {
    Binding binding;
    auto declared = model_.declared_types.find(class_loc);
    if (declared == model_.declared_types.end()) return binding;
    const auto& params = declared->second.type_args();
    if (params.size() != t.type_args().size()) return binding;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].kind() == TypeSymbol::Kind::TypeParameter) {
        binding.emplace(params[i].decl(), t.type_args()[i]);
      }
    }
    return binding;
  }

  std::optional<Member> field_rec(const TypeSymbol& receiver,
                                  const std::string& name,
                                  std::set<std::string>& visited) {
    if (!located_type(receiver) ||
        receiver.kind() == TypeSymbol::Kind::TypeParameter) {
      return std::nullopt;
    }
    SourceLocation class_loc = receiver.decl().without_region();
    if (!visited.insert(class_loc.to_string()).second) return std::nullopt;
    SourceLocation floc = child_loc("field", class_loc, name);
    auto it = model_.declared_types.find(floc);
    if (it != model_.declared_types.end()) {
      return Member{floc,
                    instantiate(it->second, binding_of(class_loc, receiver))};
    }
    for (const SourceLocation& super : image(model_.inheritance, class_loc)) {
      if (auto found = field_rec(loc_sym(super, {}), name, visited)) {
        return found;
      }
    }
    return std::nullopt;
  }

  std::optional<Member> member_rec(const TypeSymbol& receiver,
                                   const std::string& scheme,
                                   const std::string& name,
                                   const std::vector<TypeSymbol>& args,
                                   bool exact,
                                   std::set<std::string>& visited) {
    if (!located_type(receiver) ||
        receiver.kind() == TypeSymbol::Kind::TypeParameter) {
      return std::nullopt;
    }
    SourceLocation class_loc = receiver.decl().without_region();
    if (!visited.insert(class_loc.to_string()).second) return std::nullopt;
    if (auto found = member_in(receiver, scheme, name, args, exact)) {
      return found;
    }
    for (const SourceLocation& super : image(model_.inheritance, class_loc)) {
      if (auto found =
              member_rec(loc_sym(super, {}), scheme, name, args, exact,
                         visited)) {
        return found;
      }
    }
    return std::nullopt;
  }

  std::optional<Member> member_in(const TypeSymbol& receiver,
                                  const std::string& scheme,
                                  const std::string& name,
                                  const std::vector<TypeSymbol>& args,
                                  bool exact) {
    SourceLocation class_loc = receiver.decl().without_region();
    auto it = members_.find(member_key(class_loc.authority(),
                                       class_loc.path()));
    if (it == members_.end()) return std::nullopt;
    Binding binding = binding_of(class_loc, receiver);
    for (const SourceLocation& mloc : it->second) {
      if (mloc.scheme() != scheme) continue;
      const std::string& segment = mloc.path().back();
      if (detail::signature_name(segment) != name) continue;
      if (detail::signature_arity(segment) != args.size()) continue;
      auto declared = model_.declared_types.find(mloc);
      if (declared == model_.declared_types.end() ||
          declared->second.kind() != TypeSymbol::Kind::Method) {
        if (exact) continue;
        return Member{mloc, TypeSymbol::unresolved(name)};
      }
      std::vector<TypeSymbol> params = declared->second.param_types();
      if (exact) {
        bool ok = params.size() == args.size();
        for (std::size_t i = 0; ok && i < params.size(); ++i) {
          TypeSymbol p = instantiate(params[i], binding);
          if (p.kind() == TypeSymbol::Kind::TypeParameter) continue;
          if (args[i].kind() == TypeSymbol::Kind::Unresolved) continue;
          ok = type_name_of(p) == type_name_of(args[i]);
        }
        if (!ok) continue;
      }
      return Member{mloc,
                    instantiate(declared->second.return_type(), binding)};
    }
    return std::nullopt;
  }

  const Model& model_;
  std::vector<std::string> pkg_;
  std::map<std::string, SourceLocation> type_params_;
  std::map<std::string, std::set<SourceLocation>> types_;
  std::map<std::string, std::set<SourceLocation>> by_simple_;
  std::map<std::string, std::vector<SourceLocation>> members_;
};

namespace detail {

inline std::optional<std::pair<SourceLocation, TypeSymbol>> enclosing_type(
    const Model& m, const SourceLocation& target) {
  const auto& path = target.path();
  for (std::size_t len = path.size(); len-- > 1;) {
    std::vector<std::string> prefix(path.begin(), path.begin() + len);
    for (const char* scheme : {"java+class", "java+interface"}) {
      SourceLocation loc(scheme, target.authority(), prefix);
      auto declared = m.declared_types.find(loc);
      if (declared != m.declared_types.end()) {
        return std::make_pair(loc, declared->second);
      }
      if (!image(m.declarations, loc).empty()) {
        return std::make_pair(loc, TypeSymbol::class_type(loc));
      }
    }
  }
  return std::nullopt;
}

inline std::map<std::string, SourceLocation> type_params_of(
    const TypeSymbol& sym) {
  std::map<std::string, SourceLocation> out;
  if (sym.kind() != TypeSymbol::Kind::Class &&
      sym.kind() != TypeSymbol::Kind::Interface) {
    return out;
  }
  for (const TypeSymbol& arg : sym.type_args()) {
    if (arg.kind() == TypeSymbol::Kind::TypeParameter &&
        !arg.decl().path().empty()) {
      out.emplace(arg.decl().path().back(), arg.decl());
    }
  }
  return out;
}

}  // namespace detail

// Re-parses the declared region of `target` and returns its tree,
// re-annotated from the model. Trees are never stored in models.
inline AstPtr get_ast(const Model& m, const SourceLocation& target,
                      const SourceResolver& source) {
  LocSet physicals = image(m.declarations, target.without_region());
  if (physicals.empty()) {
    throw NotDeclared("not declared in model: " + target.to_string());
  }
  std::optional<SourceLocation> physical;
  for (const SourceLocation& p : physicals) {
    if (p.region()) {
      physical = p;
      break;
    }
  }
  if (!physical) {
    throw RegionMismatch("no declared region for " + target.to_string());
  }
  std::optional<std::string> text = source.read(physical->without_region());
  if (!text) {
    throw SourceUnavailable("cannot read " +
                            physical->without_region().to_string());
  }
  Region region = *physical->region();
  if (static_cast<std::size_t>(region.offset) + region.length >
      codepoint_length(*text)) {
    throw RegionMismatch("declared region exceeds source of " +
                         physical->without_region().to_string());
  }
  std::string slice = slice_region(*text, region);

  std::string kind = target.scheme_kind();
  AstPtr root;
  try {
    Parser parser(tokenize(slice), physical->without_region(), region.offset);
    std::string expect;
    if (kind == "class") {
      root = parser.class_entry();
      expect = "classDecl";
    } else if (kind == "interface") {
      root = parser.interface_entry();
      expect = "interfaceDecl";
    } else if (kind == "method") {
      root = parser.method_entry();
      expect = "methodDecl";
    } else if (kind == "constructor") {
      root = parser.constructor_entry();
      expect = "constructorDecl";
    } else if (kind == "field") {
      root = parser.field_entry();
      expect = "fieldDecl";
    } else if (kind == "parameter") {
      root = parser.param_entry();
      expect = "paramDecl";
    } else if (kind == "variable") {
      root = parser.local_var_entry();
      expect = "localVarDecl";
    } else if (kind == "package") {
      root = parser.package_entry();
      expect = "packageDecl";
    } else {
      throw UnknownScheme("no declaration parser for scheme '" +
                          target.scheme() + "'");
    }
    if (!parser.at_end()) {
      throw RegionMismatch("trailing input in declared region of " +
                           target.to_string());
    }
    if (root->constructor() != expect) {
      throw RegionMismatch("declared region of " + target.to_string() +
                           " parses as " + root->constructor());
    }
  } catch (const ParseError& e) {
    throw RegionMismatch("declared region of " + target.to_string() +
                         " does not parse: " + e.what());
  }

  auto enclosing = detail::enclosing_type(m, target);
  std::vector<std::string> pkg;
  std::map<std::string, SourceLocation> tps;
  SourceLocation class_loc = target;
  TypeSymbol class_sym = TypeSymbol::unresolved("?");
  if (kind == "class" || kind == "interface") {
    pkg = target.path();
    if (!pkg.empty()) pkg.pop_back();
    for (const AstChild& child : root->children()) {
      if (!std::holds_alternative<AstPtr>(child)) continue;
      const AstPtr& sub = std::get<AstPtr>(child);
      if (sub->constructor() == "paramDecl" && sub->children().size() == 1) {
        const std::string& name = sub->text_child(0);
        tps.emplace(name, child_loc("parameter", target, name));
      }
    }
  } else if (enclosing) {
    class_loc = enclosing->first;
    class_sym = enclosing->second;
    pkg = class_loc.path();
    if (!pkg.empty()) pkg.pop_back();
    tps = detail::type_params_of(class_sym);
  }

  ModelResolver resolver(m, pkg, tps);
  Annotator annotator(resolver, Sinks{});
  if (kind == "class" || kind == "interface") {
    return annotator.type_decl(root, target);
  }
  if (kind == "method" || kind == "constructor") {
    return annotator.method_decl(root, target, class_sym,
                                 enclosing ? std::optional<SourceLocation>(
                                                 class_loc)
                                           : std::nullopt);
  }
  if (kind == "field") {
    return annotator.field_decl(root, target, class_sym,
                                enclosing ? std::optional<SourceLocation>(
                                                class_loc)
                                          : std::nullopt);
  }
  if (kind == "parameter") {
    return annotator.param_decl(root, target);
  }
  if (kind == "variable") {
    std::vector<std::string> member_path = target.path();
    member_path.pop_back();
    SourceLocation member("java+method", target.authority(),
                          std::move(member_path));
    return annotator.local_decl(root, target, class_sym,
                                enclosing ? std::optional<SourceLocation>(
                                                class_loc)
                                          : std::nullopt,
                                member);
  }
  return annotator.package_decl(root, target);
}

}  // namespace m3
