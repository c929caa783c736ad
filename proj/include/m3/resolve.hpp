// Name binding and tree annotation shared by whole-project extraction
// and on-demand re-parsing of declared fragments. A Resolver answers
// context questions (what does this written type mean, which member
// does this call hit); the Annotator walks syntax, rebuilds it with
// decl/type annotations, and reports facts through Sinks.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "m3/ast.hpp"
#include "m3/diagnostic.hpp"
#include "m3/typesym.hpp"

namespace m3 {

// Logical location naming. A declaration's location is its container's
// location plus one path segment, under the kind-specific scheme.
inline SourceLocation logical_loc(const std::string& kind,
                                  const std::string& authority,
                                  std::vector<std::string> path) {
  return SourceLocation("java+" + kind, authority, std::move(path));
}

inline SourceLocation child_loc(const std::string& kind,
                                const SourceLocation& base,
                                const std::string& segment) {
  std::vector<std::string> path = base.path();
  path.push_back(segment);
  return SourceLocation("java+" + kind, base.authority(), std::move(path));
}

// Written type text as it appears in signatures: dotted name, explicit
// type arguments, [] suffixes, no spaces.
inline std::string written_type_text(const AstPtr& type_node) {
  const std::string& ctor = type_node->constructor();
  if (ctor == "primitiveType") return type_node->text_child(0);
  if (ctor == "arrayType") {
    return written_type_text(type_node->node_child(0)) + "[]";
  }
  std::string out = type_node->text_child(0);
  if (type_node->children().size() > 1) {
    out += '<';
    for (std::size_t i = 1; i < type_node->children().size(); ++i) {
      if (i > 1) out += ',';
      out += written_type_text(type_node->node_child(i));
    }
    out += '>';
  }
  return out;
}

// Method and constructor path segments carry the written parameter
// types so overloads stay distinct.
inline std::string signature_text(const std::string& name,
                                  const AstPtr& decl_node) {
  std::string out = name + "(";
  bool first = true;
  for (const AstChild& child : decl_node->children()) {
    if (!std::holds_alternative<AstPtr>(child)) continue;
    const AstPtr& node = std::get<AstPtr>(child);
    if (node->constructor() != "paramDecl" || node->children().size() < 2) {
      continue;
    }
    if (!first) out += ',';
    first = false;
    out += written_type_text(node->node_child(0));
  }
  out += ')';
  return out;
}

// Erased spelling used when matching call arguments against parameter
// lists and overriding methods against overridden ones.
inline std::string type_name_of(const TypeSymbol& symbol) {
  switch (symbol.kind()) {
    case TypeSymbol::Kind::Primitive:
      return symbol.name();
    case TypeSymbol::Kind::Array:
      return type_name_of(symbol.element()) + "[]";
    case TypeSymbol::Kind::Unresolved:
      return symbol.name();
    case TypeSymbol::Kind::Method:
      return "method";
    case TypeSymbol::Kind::Class:
    case TypeSymbol::Kind::Interface:
    case TypeSymbol::Kind::TypeParameter: {
      const auto& path = symbol.decl().path();
      return path.empty() ? symbol.decl().authority() : path.back();
    }
  }
  return "?";
}

inline bool located_type(const TypeSymbol& symbol) {
  return symbol.kind() == TypeSymbol::Kind::Class ||
         symbol.kind() == TypeSymbol::Kind::Interface ||
         symbol.kind() == TypeSymbol::Kind::TypeParameter;
}

enum class TypeSite {
  General,
  ClassExtends,  // unresolved names become same-package classes
  Interface,     // unresolved names become interfaces
};

struct Member {
  SourceLocation loc;
  TypeSymbol type;  // field type or method return type, substituted
};

class Resolver {
 public:
  virtual ~Resolver() = default;
  virtual TypeSymbol type_ref(const std::string& written,
                              std::vector<TypeSymbol> args, TypeSite site,
                              const std::optional<SourceLocation>& at) = 0;
  virtual std::optional<Member> field(const TypeSymbol& receiver,
                                      const std::string& name) = 0;
  virtual std::optional<Member> method(const TypeSymbol& receiver,
                                       const std::string& name,
                                       const std::vector<TypeSymbol>& args) = 0;
  virtual std::optional<Member> constructor(
      const TypeSymbol& type, const std::vector<TypeSymbol>& args) = 0;
};

// Fact outlets; any may be left empty.
struct Sinks {
  std::function<void(const SourceLocation&, const SourceLocation&)>
      declare;  // logical, physical with region
  std::function<void(const SourceLocation&, const SourceLocation&)>
      contain;  // contained, container
  std::function<void(const SourceLocation&, const SourceLocation&)>
      use;  // user, used
  std::function<void(const SourceLocation&, const SourceLocation&)>
      invoke;  // caller, callee
  std::function<void(const SourceLocation&, const TypeSymbol&)> declare_type;
  std::function<void(const SourceLocation&, const SourceLocation&)>
      inherit;  // subtype, supertype
  std::function<void(Diagnostic::Severity, const std::optional<SourceLocation>&,
                     const std::string&)>
      diag;
};

class Annotator {
 public:
  Annotator(Resolver& resolver, Sinks sinks)
      : resolver_(resolver), sinks_(std::move(sinks)) {}

  // classDecl / interfaceDecl under its assigned logical location.
  AstPtr type_decl(const AstPtr& node, const SourceLocation& type_loc) {
    bool is_interface = node->constructor() == "interfaceDecl";
    declare(type_loc, node);

    // Type parameters are declarations contained in the type.
    std::vector<TypeSymbol> param_syms;
    for (const AstChild& child : node->children()) {
      if (const AstPtr* p = type_param_of(child)) {
        SourceLocation tp = child_loc("parameter", type_loc,
                                      (*p)->text_child(0));
        param_syms.push_back(TypeSymbol::type_parameter(tp));
      }
    }
    TypeSymbol self = is_interface
                          ? TypeSymbol::interface_type(type_loc, param_syms)
                          : TypeSymbol::class_type(type_loc, param_syms);
    if (sinks_.declare_type) sinks_.declare_type(type_loc, self);

    std::vector<AstChild> children;
    children.reserve(node->children().size());
    bool in_extends = false;
    bool in_implements = false;
    for (const AstChild& child : node->children()) {
      if (std::holds_alternative<std::string>(child)) {
        const std::string& marker = std::get<std::string>(child);
        in_extends = marker == "extends";
        in_implements = marker == "implements";
        children.push_back(child);
        continue;
      }
      const AstPtr& sub = std::get<AstPtr>(child);
      if (sub->sort() == Sort::Modifier) {
        children.push_back(child);
      } else if (sub->sort() == Sort::Type) {
        TypeSite site = (!is_interface && in_extends) ? TypeSite::ClassExtends
                                                      : TypeSite::Interface;
        auto [typed, sym] = type_node(sub, type_loc, site);
        if (located_type(sym) && sinks_.inherit) {
          sinks_.inherit(type_loc, sym.decl());
        }
        children.push_back(std::move(typed));
      } else if (sub->constructor() == "paramDecl") {
        SourceLocation tp =
            child_loc("parameter", type_loc, sub->text_child(0));
        declare(tp, sub);
        contain(tp, type_loc);
        children.push_back(annotated(sub, sub->children(), tp, std::nullopt));
      } else if (sub->constructor() == "fieldDecl") {
        in_extends = in_implements = false;
        SourceLocation floc =
            child_loc("field", type_loc, field_name(sub));
        contain(floc, type_loc);
        children.push_back(field_decl_at(sub, floc, self, type_loc));
      } else if (sub->constructor() == "methodDecl") {
        in_extends = in_implements = false;
        SourceLocation mloc = child_loc(
            "method", type_loc, signature_text(member_name(sub), sub));
        contain(mloc, type_loc);
        children.push_back(method_decl_at(sub, mloc, self, type_loc, false));
      } else if (sub->constructor() == "constructorDecl") {
        in_extends = in_implements = false;
        SourceLocation cloc = child_loc(
            "constructor", type_loc, signature_text(ctor_name(sub), sub));
        contain(cloc, type_loc);
        children.push_back(method_decl_at(sub, cloc, self, type_loc, true));
      } else {
        children.push_back(child);
      }
    }
    std::vector<AstChild> contained_children = std::move(children);
    AstNode out = node->with_children(std::move(contained_children))
                      .with_decl(type_loc)
                      .with_type(self);
    return std::make_shared<const AstNode>(std::move(out));
  }

  AstPtr method_decl(const AstPtr& node, const SourceLocation& loc,
                     const TypeSymbol& self,
                     const std::optional<SourceLocation>& self_loc) {
    return method_decl_at(node, loc, self, self_loc,
                          node->constructor() == "constructorDecl");
  }

  AstPtr field_decl(const AstPtr& node, const SourceLocation& loc,
                    const TypeSymbol& self,
                    const std::optional<SourceLocation>& self_loc) {
    return field_decl_at(node, loc, self, self_loc);
  }

  AstPtr param_decl(const AstPtr& node, const SourceLocation& loc) {
    declare(loc, node);
    if (node->children().size() < 2) {
      return annotated(node, node->children(), loc, std::nullopt);
    }
    auto [typed, sym] = type_node(node->node_child(0), loc,
                                  TypeSite::General);
    std::vector<AstChild> children = node->children();
    children[0] = std::move(typed);
    return annotated(node, std::move(children), loc, sym);
  }

  AstPtr package_decl(const AstPtr& node, const SourceLocation& loc) {
    declare(loc, node);
    return annotated(node, node->children(), loc, std::nullopt);
  }

  // Entry for a lone local variable fragment.
  AstPtr local_decl(const AstPtr& node, const SourceLocation& loc,
                    const TypeSymbol& self,
                    const std::optional<SourceLocation>& self_loc,
                    const SourceLocation& member) {
    Body body{member, member, loc, self, self_loc, {}, {}};
    body.scopes.emplace_back();
    auto [typed, sym] = type_node(node->node_child(0), loc,
                                  TypeSite::General);
    std::vector<AstChild> children = node->children();
    children[0] = std::move(typed);
    if (children.size() > 2) {
      auto [init, ignored] = expr(node->node_child(2), body);
      children[2] = std::move(init);
    }
    return annotated(node, std::move(children), loc, sym);
  }

  // Resolves a written type, rebuilds the node with annotations, and
  // reports a use for every located reference including arguments.
  std::pair<AstPtr, TypeSymbol> type_node(const AstPtr& node,
                                          const SourceLocation& source,
                                          TypeSite site) {
    const std::string& ctor = node->constructor();
    if (ctor == "primitiveType") {
      const std::string& word = node->text_child(0);
      TypeSymbol sym = word == "int"       ? TypeSymbol::primitive(
                                                 TypeSymbol::Primitive::Int)
                       : word == "boolean" ? TypeSymbol::primitive(
                                                 TypeSymbol::Primitive::Boolean)
                       : word == "str"
                           ? TypeSymbol::primitive(TypeSymbol::Primitive::Str)
                           : TypeSymbol::primitive(
                                 TypeSymbol::Primitive::Void);
      return {annotated(node, node->children(), std::nullopt, sym), sym};
    }
    if (ctor == "arrayType") {
      auto [elem, elem_sym] = type_node(node->node_child(0), source,
                                        TypeSite::General);
      TypeSymbol sym = TypeSymbol::array(elem_sym);
      return {annotated(node, {AstChild(std::move(elem))}, std::nullopt, sym),
              sym};
    }
    std::vector<AstChild> children;
    children.emplace_back(node->text_child(0));
    std::vector<TypeSymbol> args;
    for (std::size_t i = 1; i < node->children().size(); ++i) {
      auto [arg, arg_sym] = type_node(node->node_child(i), source,
                                      TypeSite::General);
      args.push_back(std::move(arg_sym));
      children.push_back(std::move(arg));
    }
    TypeSymbol sym =
        resolver_.type_ref(node->text_child(0), args, site, node->src());
    std::optional<SourceLocation> decl;
    if (located_type(sym)) {
      decl = sym.decl();
      use(source, sym.decl());
    } else {
      report(Diagnostic::Severity::Warning, node->src(),
             "unresolved type '" + node->text_child(0) + "'");
    }
    return {annotated(node, std::move(children), decl, sym), sym};
  }

 private:
  struct Body {
    SourceLocation member;  // containment parent and naming base
    SourceLocation caller;
    SourceLocation source;  // current uses attribution
    TypeSymbol self;
    std::optional<SourceLocation> self_loc;
    std::vector<std::map<std::string, Member>> scopes;
    std::map<std::string, int> local_counts;

    std::optional<Member> lookup(const std::string& name) const {
      for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        auto found = it->find(name);
        if (found != it->end()) return found->second;
      }
      return std::nullopt;
    }
  };

  AstPtr method_decl_at(const AstPtr& node, const SourceLocation& loc,
                        const TypeSymbol& self,
                        const std::optional<SourceLocation>& self_loc,
                        bool is_ctor) {
    declare(loc, node);
    Body body{loc, loc, loc, self, self_loc, {}, {}};
    body.scopes.emplace_back();

    std::vector<AstChild> children;
    children.reserve(node->children().size());
    std::vector<TypeSymbol> param_syms;
    TypeSymbol return_sym = is_ctor
                                ? self
                                : TypeSymbol::primitive(
                                      TypeSymbol::Primitive::Void);
    for (const AstChild& child : node->children()) {
      if (!std::holds_alternative<AstPtr>(child)) {
        children.push_back(child);
        continue;
      }
      const AstPtr& sub = std::get<AstPtr>(child);
      if (sub->sort() == Sort::Type) {
        auto [typed, sym] = type_node(sub, loc, TypeSite::General);
        return_sym = sym;
        children.push_back(std::move(typed));
      } else if (sub->constructor() == "paramDecl") {
        const std::string& pname = sub->text_child(1);
        SourceLocation ploc = child_loc("parameter", loc, pname);
        declare(ploc, sub);
        contain(ploc, loc);
        auto [typed, sym] = type_node(sub->node_child(0), ploc,
                                      TypeSite::General);
        param_syms.push_back(sym);
        body.scopes.back().insert_or_assign(pname, Member{ploc, sym});
        std::vector<AstChild> pkids = sub->children();
        pkids[0] = std::move(typed);
        children.push_back(annotated(sub, std::move(pkids), ploc, sym));
      } else if (sub->constructor() == "block") {
        if (sinks_.declare_type) {
          sinks_.declare_type(
              loc, TypeSymbol::method_type(loc, return_sym, param_syms));
        }
        children.push_back(stmt(sub, body));
        TypeSymbol mt = TypeSymbol::method_type(loc, return_sym, param_syms);
        return annotated(node, std::move(children), loc, mt);
      } else {
        children.push_back(child);
      }
    }
    TypeSymbol mt = TypeSymbol::method_type(loc, return_sym, param_syms);
    if (sinks_.declare_type) sinks_.declare_type(loc, mt);
    return annotated(node, std::move(children), loc, mt);
  }

  AstPtr field_decl_at(const AstPtr& node, const SourceLocation& loc,
                       const TypeSymbol& self,
                       const std::optional<SourceLocation>& self_loc) {
    declare(loc, node);
    std::vector<AstChild> children = node->children();
    TypeSymbol field_sym = TypeSymbol::unresolved(field_name(node));
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (!std::holds_alternative<AstPtr>(children[i])) continue;
      const AstPtr& sub = std::get<AstPtr>(children[i]);
      if (sub->sort() == Sort::Type) {
        auto [typed, sym] = type_node(sub, loc, TypeSite::General);
        field_sym = sym;
        children[i] = std::move(typed);
      } else if (sub->sort() == Sort::Expression) {
        Body body{loc, loc, loc, self, self_loc, {}, {}};
        body.scopes.emplace_back();
        auto [init, ignored] = expr(sub, body);
        children[i] = std::move(init);
      }
    }
    if (sinks_.declare_type) sinks_.declare_type(loc, field_sym);
    return annotated(node, std::move(children), loc, field_sym);
  }

  // --- statements ---

  AstPtr stmt(const AstPtr& node, Body& body) {
    const std::string& ctor = node->constructor();
    if (ctor == "block") {
      body.scopes.emplace_back();
      std::vector<AstChild> children;
      children.reserve(node->children().size());
      for (const AstChild& child : node->children()) {
        children.push_back(block_item(std::get<AstPtr>(child), body));
      }
      body.scopes.pop_back();
      return annotated(node, std::move(children), std::nullopt, std::nullopt);
    }
    if (ctor == "forStmt") {
      body.scopes.emplace_back();
      std::vector<AstChild> children;
      children.push_back(block_item(node->node_child(0), body));
      children.push_back(expr(node->node_child(1), body).first);
      children.push_back(expr(node->node_child(2), body).first);
      children.push_back(stmt(node->node_child(3), body));
      body.scopes.pop_back();
      return annotated(node, std::move(children), std::nullopt, std::nullopt);
    }
    if (ctor == "foreachStmt") {
      body.scopes.emplace_back();
      std::vector<AstChild> children;
      children.push_back(local_var(node->node_child(0), body));
      children.push_back(expr(node->node_child(1), body).first);
      children.push_back(stmt(node->node_child(2), body));
      body.scopes.pop_back();
      return annotated(node, std::move(children), std::nullopt, std::nullopt);
    }
    if (ctor == "ifStmt" || ctor == "whileStmt" || ctor == "returnStmt" ||
        ctor == "exprStmt") {
      std::vector<AstChild> children;
      children.reserve(node->children().size());
      for (const AstChild& child : node->children()) {
        const AstPtr& sub = std::get<AstPtr>(child);
        if (sub->sort() == Sort::Expression) {
          children.push_back(expr(sub, body).first);
        } else {
          children.push_back(stmt(sub, body));
        }
      }
      return annotated(node, std::move(children), std::nullopt, std::nullopt);
    }
    return node;  // break, continue, empty
  }

  AstPtr block_item(const AstPtr& node, Body& body) {
    if (node->constructor() == "localVarDecl") return local_var(node, body);
    return stmt(node, body);
  }

  AstPtr local_var(const AstPtr& node, Body& body) {
    const std::string& name = node->text_child(1);
    int ordinal = ++body.local_counts[name];
    std::string segment =
        ordinal == 1 ? name : name + "#" + std::to_string(ordinal);
    SourceLocation loc = child_loc("variable", body.member, segment);
    declare(loc, node);
    contain(loc, body.member);
    SourceLocation saved = body.source;
    body.source = loc;
    auto [typed, sym] = type_node(node->node_child(0), loc,
                                  TypeSite::General);
    std::vector<AstChild> children = node->children();
    children[0] = std::move(typed);
    if (children.size() > 2) {
      children[2] = expr(node->node_child(2), body).first;
    }
    body.source = saved;
    body.scopes.back().insert_or_assign(name, Member{loc, sym});
    return annotated(node, std::move(children), loc, sym);
  }

  // --- expressions ---

  std::pair<AstPtr, TypeSymbol> expr(const AstPtr& node, Body& body) {
    const std::string& ctor = node->constructor();
    if (ctor == "intLit") {
      return typed_leaf(node, TypeSymbol::primitive(TypeSymbol::Primitive::Int));
    }
    if (ctor == "boolLit") {
      return typed_leaf(node,
                        TypeSymbol::primitive(TypeSymbol::Primitive::Boolean));
    }
    if (ctor == "stringLit") {
      return typed_leaf(node, TypeSymbol::primitive(TypeSymbol::Primitive::Str));
    }
    if (ctor == "nullLit") {
      return typed_leaf(node, TypeSymbol::unresolved("null"));
    }
    if (ctor == "thisRef") {
      AstNode out = node->with_type(body.self);
      if (body.self_loc) out = out.with_decl(*body.self_loc);
      TypeSymbol sym = body.self;
      return {std::make_shared<const AstNode>(std::move(out)), sym};
    }
    if (ctor == "name") return name_expr(node, body);
    if (ctor == "fieldAccess") return field_access(node, body);
    if (ctor == "invoke") return invoke_expr(node, body);
    if (ctor == "newObject") return new_object(node, body);
    if (ctor == "assign") {
      auto [lhs, lhs_sym] = expr(node->node_child(0), body);
      auto [rhs, rhs_sym] = expr(node->node_child(1), body);
      return {annotated(node, {AstChild(std::move(lhs)), AstChild(std::move(rhs))},
                        std::nullopt, lhs_sym),
              lhs_sym};
    }
    if (ctor == "binary") {
      const std::string& op = node->text_child(0);
      auto [lhs, lhs_sym] = expr(node->node_child(1), body);
      auto [rhs, rhs_sym] = expr(node->node_child(2), body);
      TypeSymbol sym = binary_type(op, lhs_sym, rhs_sym);
      return {annotated(node,
                        {AstChild(op), AstChild(std::move(lhs)),
                         AstChild(std::move(rhs))},
                        std::nullopt, sym),
              sym};
    }
    if (ctor == "unary") {
      const std::string& op = node->text_child(0);
      auto [operand, ignored] = expr(node->node_child(1), body);
      TypeSymbol sym =
          op == "!" ? TypeSymbol::primitive(TypeSymbol::Primitive::Boolean)
                    : TypeSymbol::primitive(TypeSymbol::Primitive::Int);
      return {annotated(node, {AstChild(op), AstChild(std::move(operand))},
                        std::nullopt, sym),
              sym};
    }
    if (ctor == "cast") {
      auto [target, sym] = type_node(node->node_child(0), body.source,
                                     TypeSite::General);
      auto [operand, ignored] = expr(node->node_child(1), body);
      return {annotated(node,
                        {AstChild(std::move(target)), AstChild(std::move(operand))},
                        std::nullopt, sym),
              sym};
    }
    return {node, TypeSymbol::unresolved(ctor)};
  }

  std::pair<AstPtr, TypeSymbol> name_expr(const AstPtr& node, Body& body) {
    const std::string& name = node->text_child(0);
    std::optional<Member> binding = body.lookup(name);
    if (!binding) binding = resolver_.field(body.self, name);
    if (!binding) {
      report(Diagnostic::Severity::Warning, node->src(),
             "unresolved name '" + name + "'");
      TypeSymbol sym = TypeSymbol::unresolved(name);
      return {annotated(node, node->children(), std::nullopt, sym), sym};
    }
    use(body.source, binding->loc);
    return {annotated(node, node->children(), binding->loc, binding->type),
            binding->type};
  }

  std::pair<AstPtr, TypeSymbol> field_access(const AstPtr& node, Body& body) {
    auto [receiver, receiver_sym] = expr(node->node_child(0), body);
    const std::string& name = node->text_child(1);
    std::optional<Member> found = resolver_.field(receiver_sym, name);
    std::vector<AstChild> children = {AstChild(std::move(receiver)),
                                      AstChild(name)};
    if (!found) {
      report(Diagnostic::Severity::Warning, node->src(),
             "unresolved field '" + name + "'");
      TypeSymbol sym = TypeSymbol::unresolved(name);
      return {annotated(node, std::move(children), std::nullopt, sym), sym};
    }
    use(body.source, found->loc);
    return {annotated(node, std::move(children), found->loc, found->type),
            found->type};
  }

  std::pair<AstPtr, TypeSymbol> invoke_expr(const AstPtr& node, Body& body) {
    std::vector<AstChild> children;
    bool receiverless = std::holds_alternative<std::string>(node->child(0));
    TypeSymbol receiver_sym = body.self;
    std::size_t name_index = 0;
    if (!receiverless) {
      auto [receiver, sym] = expr(node->node_child(0), body);
      receiver_sym = sym;
      children.emplace_back(std::move(receiver));
      name_index = 1;
    }
    const std::string& name = node->text_child(name_index);
    children.emplace_back(name);
    std::vector<TypeSymbol> arg_syms;
    for (std::size_t i = name_index + 1; i < node->children().size(); ++i) {
      auto [arg, sym] = expr(node->node_child(i), body);
      arg_syms.push_back(std::move(sym));
      children.emplace_back(std::move(arg));
    }
    std::optional<Member> found =
        resolver_.method(receiver_sym, name, arg_syms);
    if (!found) {
      report(Diagnostic::Severity::Warning, node->src(),
             "unresolved method '" + name + "'");
      TypeSymbol sym = TypeSymbol::unresolved(name);
      return {annotated(node, std::move(children), std::nullopt, sym), sym};
    }
    if (sinks_.invoke) sinks_.invoke(body.caller, found->loc);
    return {annotated(node, std::move(children), found->loc, found->type),
            found->type};
  }

  std::pair<AstPtr, TypeSymbol> new_object(const AstPtr& node, Body& body) {
    auto [target, target_sym] = type_node(node->node_child(0), body.source,
                                          TypeSite::General);
    std::vector<AstChild> children;
    children.emplace_back(std::move(target));
    std::vector<TypeSymbol> arg_syms;
    for (std::size_t i = 1; i < node->children().size(); ++i) {
      auto [arg, sym] = expr(node->node_child(i), body);
      arg_syms.push_back(std::move(sym));
      children.emplace_back(std::move(arg));
    }
    std::optional<SourceLocation> ctor_loc;
    if (target_sym.kind() == TypeSymbol::Kind::Class) {
      std::optional<Member> found =
          resolver_.constructor(target_sym, arg_syms);
      if (found) {
        ctor_loc = found->loc;
        if (sinks_.invoke) sinks_.invoke(body.caller, found->loc);
      } else {
        report(Diagnostic::Severity::Warning, node->src(),
               "no declared constructor matches");
      }
    }
    return {annotated(node, std::move(children), ctor_loc, target_sym),
            target_sym};
  }

  static TypeSymbol binary_type(const std::string& op, const TypeSymbol& lhs,
                                const TypeSymbol& rhs) {
    if (op == "==" || op == "!=" || op == "&&" || op == "||" || op == "<" ||
        op == ">" || op == "<=" || op == ">=") {
      return TypeSymbol::primitive(TypeSymbol::Primitive::Boolean);
    }
    bool str_concat = op == "+" &&
                      lhs.is_primitive(TypeSymbol::Primitive::Str) &&
                      rhs.is_primitive(TypeSymbol::Primitive::Str);
    return str_concat ? TypeSymbol::primitive(TypeSymbol::Primitive::Str)
                      : TypeSymbol::primitive(TypeSymbol::Primitive::Int);
  }

  // --- plumbing ---

  std::pair<AstPtr, TypeSymbol> typed_leaf(const AstPtr& node,
                                           TypeSymbol sym) {
    return {annotated(node, node->children(), std::nullopt, sym), sym};
  }

  AstPtr annotated(const AstPtr& node, std::vector<AstChild> children,
                   const std::optional<SourceLocation>& decl,
                   const std::optional<TypeSymbol>& type) {
    AstNode out = node->with_children(std::move(children));
    if (decl) out = out.with_decl(*decl);
    if (type) out = out.with_type(*type);
    return std::make_shared<const AstNode>(std::move(out));
  }

  static const AstPtr* type_param_of(const AstChild& child) {
    if (!std::holds_alternative<AstPtr>(child)) return nullptr;
    const AstPtr& node = std::get<AstPtr>(child);
    if (node->constructor() == "paramDecl" && node->children().size() == 1) {
      return &std::get<AstPtr>(child);
    }
    return nullptr;
  }

  static std::string field_name(const AstPtr& node) {
    for (const AstChild& child : node->children()) {
      if (std::holds_alternative<std::string>(child)) {
        return std::get<std::string>(child);
      }
    }
    return "?";
  }

  static std::string member_name(const AstPtr& node) {
    // methodDecl: the string leaf after the return type
    return field_name(node);
  }

  static std::string ctor_name(const AstPtr& node) { return field_name(node); }

  void declare(const SourceLocation& loc, const AstPtr& node) {
    if (sinks_.declare && node->src()) sinks_.declare(loc, *node->src());
  }
  void contain(const SourceLocation& child, const SourceLocation& parent) {
    if (sinks_.contain) sinks_.contain(child, parent);
  }
  void use(const SourceLocation& source, const SourceLocation& target) {
    if (sinks_.use) sinks_.use(source, target);
  }
  void report(Diagnostic::Severity severity,
              const std::optional<SourceLocation>& at,
              const std::string& message) {
    if (sinks_.diag) sinks_.diag(severity, at, message);
  }

  Resolver& resolver_;
  Sinks sinks_;
};

}  // namespace m3
