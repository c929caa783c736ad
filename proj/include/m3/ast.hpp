// Typed syntax trees. Nodes are immutable and shared; children are
// either nodes or lexical leaves (text, integer, boolean). Each node
// carries the physical region it was parsed from, and declaration and
// type annotations where extraction computed them.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "m3/error.hpp"
#include "m3/loc.hpp"
#include "m3/typesym.hpp"

namespace m3 {

enum class Sort { Expression, Declaration, Statement, Type, Modifier };

inline std::string_view sort_name(Sort s) {
  switch (s) {
    case Sort::Expression: return "Expression";
    case Sort::Declaration: return "Declaration";
    case Sort::Statement: return "Statement";
    case Sort::Type: return "Type";
    case Sort::Modifier: return "Modifier";
  }
  return "?";
}

class AstNode;
using AstPtr = std::shared_ptr<const AstNode>;
using AstChild = std::variant<AstPtr, std::string, std::int64_t, bool>;

class AstNode {
 public:
  AstNode(Sort sort, std::string constructor, std::vector<AstChild> children)
      : sort_(sort),
        constructor_(std::move(constructor)),
        children_(std::move(children)) {}

  Sort sort() const { return sort_; }
  const std::string& constructor() const { return constructor_; }
  const std::vector<AstChild>& children() const { return children_; }

  const std::optional<SourceLocation>& src() const { return src_; }
  const std::optional<SourceLocation>& decl() const { return decl_; }
  const std::optional<TypeSymbol>& type() const { return type_; }

  AstNode with_src(SourceLocation loc) const {
    AstNode copy = *this;
    copy.src_ = std::move(loc);
    return copy;
  }
  AstNode with_decl(SourceLocation loc) const {
    AstNode copy = *this;
    copy.decl_ = std::move(loc);
    return copy;
  }
  AstNode with_type(TypeSymbol symbol) const {
    AstNode copy = *this;
    copy.type_ = std::move(symbol);
    return copy;
  }
  AstNode with_children(std::vector<AstChild> children) const {
    AstNode copy = *this;
    copy.children_ = std::move(children);
    return copy;
  }

  // Convenience accessors for positional children.
  const AstChild& child(std::size_t i) const { return children_.at(i); }
  AstPtr node_child(std::size_t i) const {
    return std::get<AstPtr>(children_.at(i));
  }
  const std::string& text_child(std::size_t i) const {
    return std::get<std::string>(children_.at(i));
  }

 private:
  Sort sort_;
  std::string constructor_;
  std::vector<AstChild> children_;
  std::optional<SourceLocation> src_;
  std::optional<SourceLocation> decl_;
  std::optional<TypeSymbol> type_;
};

inline AstPtr make_node(Sort sort, std::string constructor,
                        std::vector<AstChild> children = {}) {
  return std::make_shared<AstNode>(sort, std::move(constructor),
                                   std::move(children));
}

// Structural equality including annotations.
inline bool ast_equal(const AstPtr& a, const AstPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->sort() != b->sort() || a->constructor() != b->constructor() ||
      a->src() != b->src() || a->decl() != b->decl() ||
      a->type() != b->type() ||
      a->children().size() != b->children().size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->children().size(); ++i) {
    const AstChild& ca = a->children()[i];
    const AstChild& cb = b->children()[i];
    if (ca.index() != cb.index()) return false;
    if (std::holds_alternative<AstPtr>(ca)) {
      if (!ast_equal(std::get<AstPtr>(ca), std::get<AstPtr>(cb))) return false;
    } else if (!(ca == cb)) {
      return false;
    }
  }
  return true;
}

// Pre-order count of nodes matching the predicate; lexical leaves are
// not visited.
inline std::size_t visit_count(
    const AstPtr& root,
    const std::function<bool(Sort, const std::string&)>& pred) {
  if (!root) return 0;
  std::size_t count = pred(root->sort(), root->constructor()) ? 1 : 0;
  for (const AstChild& child : root->children()) {
    if (std::holds_alternative<AstPtr>(child)) {
      count += visit_count(std::get<AstPtr>(child), pred);
    }
  }
  return count;
}

namespace detail {

inline void escape_into(std::string& out, std::string_view text) {
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
}

inline void dump_node(const AstPtr& node, std::size_t depth,
                      std::string& out) {
  std::string indent(depth * 2, ' ');
  out += indent;
  out += sort_name(node->sort());
  out += ':';
  out += node->constructor();
  if (node->src()) {
    out += " @ ";
    out += node->src()->to_string();
  }
  if (node->decl()) {
    out += " [decl=";
    out += node->decl()->to_string();
    out += ']';
  }
  if (node->type()) {
    out += " [type=";
    out += print_type_symbol(*node->type());
    out += ']';
  }
  out += '\n';
  std::string leaf_indent((depth + 1) * 2, ' ');
  for (const AstChild& child : node->children()) {
    if (std::holds_alternative<AstPtr>(child)) {
      dump_node(std::get<AstPtr>(child), depth + 1, out);
    } else if (std::holds_alternative<std::string>(child)) {
      out += leaf_indent;
      out += "lex:\"";
      escape_into(out, std::get<std::string>(child));
      out += "\"\n";
    } else if (std::holds_alternative<std::int64_t>(child)) {
      out += leaf_indent;
      out += "lex:";
      out += std::to_string(std::get<std::int64_t>(child));
      out += '\n';
    } else {
      out += leaf_indent;
      out += std::get<bool>(child) ? "lex:true" : "lex:false";
      out += '\n';
    }
  }
}

}  // namespace detail

inline std::string dump_tree(const AstPtr& root) {
  std::string out;
  if (root) detail::dump_node(root, 0, out);
  return out;
}

// Constructor catalogue per sort. validate_tree rejects anything else.
inline const std::vector<std::string_view>& constructors_of(Sort s) {
  static const std::vector<std::string_view> declarations = {
      "compilationUnit", "packageDecl", "importDecl",  "classDecl",
      "interfaceDecl",   "fieldDecl",   "methodDecl",  "constructorDecl",
      "paramDecl",       "localVarDecl"};
  static const std::vector<std::string_view> statements = {
      "block",      "ifStmt",   "whileStmt", "forStmt",  "foreachStmt",
      "returnStmt", "exprStmt", "breakStmt", "continueStmt", "emptyStmt"};
  static const std::vector<std::string_view> expressions = {
      "intLit", "boolLit",     "stringLit", "nullLit", "name",
      "fieldAccess", "invoke", "newObject", "assign",  "binary",
      "unary",  "cast",        "thisRef"};
  static const std::vector<std::string_view> types = {
      "namedType", "primitiveType", "arrayType"};
  static const std::vector<std::string_view> modifiers = {
      "public", "private", "protected", "static", "abstract", "final"};
  switch (s) {
    case Sort::Declaration: return declarations;
    case Sort::Statement: return statements;
    case Sort::Expression: return expressions;
    case Sort::Type: return types;
    case Sort::Modifier: return modifiers;
  }
  return declarations;
}

inline bool known_constructor(Sort s, std::string_view constructor) {
  const auto& all = constructors_of(s);
  return std::find(all.begin(), all.end(), constructor) != all.end();
}

namespace detail {

inline void validate_node(const AstPtr& node,
                          const std::optional<Region>& parent_region,
                          std::vector<std::string>& problems) {
  if (!known_constructor(node->sort(), node->constructor())) {
    problems.push_back("unknown constructor " +
                       std::string(sort_name(node->sort())) + ":" +
                       node->constructor());
  }
  std::optional<Region> region;
  if (node->src() && node->src()->region()) {
    region = node->src()->region();
    if (parent_region) {
      bool inside =
          region->offset >= parent_region->offset &&
          region->offset + region->length <=
              parent_region->offset + parent_region->length;
      if (!inside) {
        problems.push_back("child region escapes parent at " +
                           node->src()->to_string());
      }
    }
  }
  for (const AstChild& child : node->children()) {
    if (std::holds_alternative<AstPtr>(child)) {
      validate_node(std::get<AstPtr>(child), region ? region : parent_region,
                    problems);
    }
  }
}

}  // namespace detail

inline std::vector<std::string> validate_tree(const AstPtr& root) {
  std::vector<std::string> problems;
  if (root) detail::validate_node(root, std::nullopt, problems);
  return problems;
}

}  // namespace m3
