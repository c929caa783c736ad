// Recursive-descent parser producing m3::AstNode trees. Every node is
// annotated with the physical region it spans, measured in codepoints
// from the start of the parsed text plus the configured base offset.
//
// Entry points exist per declaration kind so a declared fragment can be
// re-parsed from its region alone.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "m3/ast.hpp"
#include "m3/lexer.hpp"

namespace m3 {

class Parser {
 public:
  Parser(std::vector<Token> tokens, SourceLocation file,
         std::uint32_t base_offset = 0)
      : tokens_(std::move(tokens)),
        file_(std::move(file)),
        base_(base_offset) {}

  bool at_end() const { return cur().kind == TokenKind::End; }

  // compilationUnit := packageDecl? importDecl* typeDecl+
  AstPtr compilation_unit() {
    std::uint32_t start = cur().cp_start;
    std::vector<AstChild> children;
    if (cur().is_keyword("package")) children.push_back(package_decl());
    while (cur().is_keyword("import")) children.push_back(import_decl());
    children.push_back(type_decl());
    while (!at_end()) children.push_back(type_decl());
    return finish(Sort::Declaration, "compilationUnit", std::move(children),
                  start);
  }

  AstPtr package_decl() {
    std::uint32_t start = cur().cp_start;
    expect_keyword("package");
    std::string name = qualified_name();
    expect_punct(";");
    return finish(Sort::Declaration, "packageDecl", {name}, start);
  }

  AstPtr import_decl() {
    std::uint32_t start = cur().cp_start;
    expect_keyword("import");
    std::string name = qualified_name();
    expect_punct(";");
    return finish(Sort::Declaration, "importDecl", {name}, start);
  }

  // typeDecl := modifiers ('class' … | 'interface' …)
  AstPtr type_decl() {
    std::uint32_t start = cur().cp_start;
    std::vector<AstChild> mods = modifiers();
    if (cur().is_keyword("class")) return class_decl(std::move(mods), start);
    if (cur().is_keyword("interface")) {
      return interface_decl(std::move(mods), start);
    }
    fail("'class' or 'interface'");
  }

  // Standalone entries for re-parsing declared fragments.
  AstPtr class_entry() { return type_decl(); }
  AstPtr interface_entry() { return type_decl(); }

  AstPtr method_entry() {
    std::uint32_t start = cur().cp_start;
    std::vector<AstChild> mods = modifiers();
    AstPtr return_type = type();
    Token name = expect_identifier("method name");
    return method_rest(std::move(mods), std::move(return_type), name, start);
  }

  AstPtr constructor_entry() {
    std::uint32_t start = cur().cp_start;
    std::vector<AstChild> mods = modifiers();
    Token name = expect_identifier("constructor name");
    return constructor_rest(std::move(mods), name, start);
  }

  AstPtr field_entry() {
    std::uint32_t start = cur().cp_start;
    std::vector<AstChild> mods = modifiers();
    AstPtr field_type = type();
    Token name = expect_identifier("field name");
    return field_rest(std::move(mods), std::move(field_type), name, start);
  }

  AstPtr param_entry() {
    if (cur().kind == TokenKind::Identifier &&
        peek(1).kind == TokenKind::End) {
      // A lone identifier is a type parameter.
      std::uint32_t start = cur().cp_start;
      Token name = take();
      return finish(Sort::Declaration, "paramDecl", {name.text}, start);
    }
    return value_param();
  }

  // Accepts the bare `Type name` form that a foreach header declares.
  AstPtr local_var_entry() {
    std::uint32_t start = cur().cp_start;
    std::vector<AstChild> children;
    children.push_back(type());
    children.emplace_back(expect_identifier("variable name").text);
    if (cur().is_punct("=")) {
      take();
      children.push_back(expression());
    }
    if (cur().is_punct(";")) take();
    return finish(Sort::Declaration, "localVarDecl", std::move(children),
                  start);
  }

  AstPtr package_entry() { return package_decl(); }

 private:
  // --- declarations ---

  AstPtr class_decl(std::vector<AstChild> mods, std::uint32_t start) {
    expect_keyword("class");
    Token name = expect_identifier("class name");
    std::vector<AstChild> children = std::move(mods);
    children.emplace_back(name.text);
    type_params_into(children);
    if (cur().is_keyword("extends")) {
      take();
      children.emplace_back(std::string("extends"));
      children.push_back(type());
    }
    if (cur().is_keyword("implements")) {
      take();
      children.emplace_back(std::string("implements"));
      children.push_back(type());
      while (cur().is_punct(",")) {
        take();
        children.push_back(type());
      }
    }
    expect_punct("{");
    while (!cur().is_punct("}")) {
      if (at_end()) fail("'}'");
      children.push_back(member(name.text));
    }
    take();
    return finish(Sort::Declaration, "classDecl", std::move(children), start);
  }

  AstPtr interface_decl(std::vector<AstChild> mods, std::uint32_t start) {
    expect_keyword("interface");
    Token name = expect_identifier("interface name");
    std::vector<AstChild> children = std::move(mods);
    children.emplace_back(name.text);
    type_params_into(children);
    if (cur().is_keyword("extends")) {
      take();
      children.emplace_back(std::string("extends"));
      children.push_back(type());
      while (cur().is_punct(",")) {
        take();
        children.push_back(type());
      }
    }
    expect_punct("{");
    while (!cur().is_punct("}")) {
      if (at_end()) fail("'}'");
      std::uint32_t member_start = cur().cp_start;
      std::vector<AstChild> member_mods = modifiers();
      AstPtr return_type = type();
      Token member_name = expect_identifier("method name");
      children.push_back(method_rest(std::move(member_mods),
                                     std::move(return_type), member_name,
                                     member_start));
    }
    take();
    return finish(Sort::Declaration, "interfaceDecl", std::move(children),
                  start);
  }

  // member := modifiers (constructorDecl | methodDecl | fieldDecl)
  AstPtr member(const std::string& class_name) {
    std::uint32_t start = cur().cp_start;
    std::vector<AstChild> mods = modifiers();
    if (cur().kind == TokenKind::Identifier && cur().text == class_name &&
        peek(1).is_punct("(")) {
      Token name = take();
      return constructor_rest(std::move(mods), name, start);
    }
    AstPtr member_type = type();
    Token name = expect_identifier("member name");
    if (cur().is_punct("(")) {
      return method_rest(std::move(mods), std::move(member_type), name, start);
    }
    return field_rest(std::move(mods), std::move(member_type), name, start);
  }

  AstPtr method_rest(std::vector<AstChild> mods, AstPtr return_type,
                     const Token& name, std::uint32_t start) {
    std::vector<AstChild> children = std::move(mods);
    children.push_back(std::move(return_type));
    children.emplace_back(name.text);
    params_into(children);
    if (cur().is_punct(";")) {
      take();
    } else {
      children.push_back(block());
    }
    return finish(Sort::Declaration, "methodDecl", std::move(children), start);
  }

  AstPtr constructor_rest(std::vector<AstChild> mods, const Token& name,
                          std::uint32_t start) {
    std::vector<AstChild> children = std::move(mods);
    children.emplace_back(name.text);
    params_into(children);
    children.push_back(block());
    return finish(Sort::Declaration, "constructorDecl", std::move(children),
                  start);
  }

  AstPtr field_rest(std::vector<AstChild> mods, AstPtr field_type,
                    const Token& name, std::uint32_t start) {
    std::vector<AstChild> children = std::move(mods);
    children.push_back(std::move(field_type));
    children.emplace_back(name.text);
    if (cur().is_punct("=")) {
      take();
      children.push_back(expression());
    }
    expect_punct(";");
    return finish(Sort::Declaration, "fieldDecl", std::move(children), start);
  }

  AstPtr local_var_rest(AstPtr var_type, const Token& name,
                        std::uint32_t start) {
    std::vector<AstChild> children;
    children.push_back(std::move(var_type));
    children.emplace_back(name.text);
    if (cur().is_punct("=")) {
      take();
      children.push_back(expression());
    }
    expect_punct(";");
    return finish(Sort::Declaration, "localVarDecl", std::move(children),
                  start);
  }

  // typeParams := '<' Ident (',' Ident)* '>'
  void type_params_into(std::vector<AstChild>& children) {
    if (!cur().is_punct("<")) return;
    take();
    while (true) {
      std::uint32_t start = cur().cp_start;
      Token name = expect_identifier("type parameter");
      children.push_back(
          finish(Sort::Declaration, "paramDecl", {name.text}, start));
      if (cur().is_punct(",")) {
        take();
        continue;
      }
      expect_punct(">");
      break;
    }
  }

  void params_into(std::vector<AstChild>& children) {
    expect_punct("(");
    if (cur().is_punct(")")) {
      take();
      return;
    }
    while (true) {
      children.push_back(value_param());
      if (cur().is_punct(",")) {
        take();
        continue;
      }
      expect_punct(")");
      break;
    }
  }

  AstPtr value_param() {
    std::uint32_t start = cur().cp_start;
    AstPtr param_type = type();
    Token name = expect_identifier("parameter name");
    return finish(Sort::Declaration, "paramDecl",
                  {std::move(param_type), name.text}, start);
  }

  // --- types ---

  AstPtr type() {
    std::uint32_t start = cur().cp_start;
    AstPtr base;
    if (cur().is_keyword("int") || cur().is_keyword("boolean") ||
        cur().is_keyword("str") || cur().is_keyword("void")) {
      Token keyword = take();
      base = finish(Sort::Type, "primitiveType", {keyword.text}, start);
    } else {
      std::string name = qualified_name();
      std::vector<AstChild> children;
      children.emplace_back(std::move(name));
      if (cur().is_punct("<")) {
        take();
        children.push_back(type());
        while (cur().is_punct(",")) {
          take();
          children.push_back(type());
        }
        expect_punct(">");
      }
      base = finish(Sort::Type, "namedType", std::move(children), start);
    }
    while (cur().is_punct("[") && peek(1).is_punct("]")) {
      take();
      take();
      base = finish(Sort::Type, "arrayType", {std::move(base)}, start);
    }
    return base;
  }

  // --- statements ---

  AstPtr block() {
    std::uint32_t start = cur().cp_start;
    expect_punct("{");
    std::vector<AstChild> children;
    while (!cur().is_punct("}")) {
      if (at_end()) fail("'}'");
      children.push_back(block_item());
    }
    take();
    return finish(Sort::Statement, "block", std::move(children), start);
  }

  AstPtr block_item() {
    if (auto local = try_local_var()) return *local;
    return statement();
  }

  // Speculative: type Ident ('='|';') commits to a declaration.
  std::optional<AstPtr> try_local_var() {
    std::size_t mark = index_;
    try {
      std::uint32_t start = cur().cp_start;
      AstPtr var_type = type();
      if (cur().kind == TokenKind::Identifier &&
          (peek(1).is_punct("=") || peek(1).is_punct(";"))) {
        Token name = take();
        return local_var_rest(std::move(var_type), name, start);
      }
    } catch (const ParseError&) {
    }
    index_ = mark;
    return std::nullopt;
  }

  AstPtr statement() {
    std::uint32_t start = cur().cp_start;
    if (cur().is_punct("{")) return block();
    if (cur().is_keyword("if")) {
      take();
      expect_punct("(");
      AstPtr cond = expression();
      expect_punct(")");
      AstPtr then_branch = statement();
      std::vector<AstChild> children = {std::move(cond),
                                        std::move(then_branch)};
      if (cur().is_keyword("else")) {
        take();
        children.push_back(statement());
      }
      return finish(Sort::Statement, "ifStmt", std::move(children), start);
    }
    if (cur().is_keyword("while")) {
      take();
      expect_punct("(");
      AstPtr cond = expression();
      expect_punct(")");
      AstPtr body = statement();
      return finish(Sort::Statement, "whileStmt",
                    {std::move(cond), std::move(body)}, start);
    }
    if (cur().is_keyword("for")) return for_statement(start);
    if (cur().is_keyword("return")) {
      take();
      std::vector<AstChild> children;
      if (!cur().is_punct(";")) children.push_back(expression());
      expect_punct(";");
      return finish(Sort::Statement, "returnStmt", std::move(children), start);
    }
    if (cur().is_keyword("break")) {
      take();
      expect_punct(";");
      return finish(Sort::Statement, "breakStmt", {}, start);
    }
    if (cur().is_keyword("continue")) {
      take();
      expect_punct(";");
      return finish(Sort::Statement, "continueStmt", {}, start);
    }
    if (cur().is_punct(";")) {
      take();
      return finish(Sort::Statement, "emptyStmt", {}, start);
    }
    AstPtr expr = expression();
    expect_punct(";");
    return finish(Sort::Statement, "exprStmt", {std::move(expr)}, start);
  }

  AstPtr for_statement(std::uint32_t start) {
    expect_keyword("for");
    expect_punct("(");
    // foreach := for '(' type Ident ':' expr ')' statement
    {
      std::size_t mark = index_;
      try {
        std::uint32_t var_start = cur().cp_start;
        AstPtr var_type = type();
        if (cur().kind == TokenKind::Identifier && peek(1).is_punct(":")) {
          Token name = take();
          AstPtr var = finish(Sort::Declaration, "localVarDecl",
                              {std::move(var_type), name.text}, var_start);
          take();  // ':'
          AstPtr source = expression();
          expect_punct(")");
          AstPtr body = statement();
          return finish(
              Sort::Statement, "foreachStmt",
              {std::move(var), std::move(source), std::move(body)}, start);
        }
      } catch (const ParseError&) {
      }
      index_ = mark;
    }
    AstChild init = [&]() -> AstChild {
      if (cur().is_punct(";")) {
        std::uint32_t init_start = cur().cp_start;
        take();
        return finish(Sort::Statement, "emptyStmt", {}, init_start);
      }
      if (auto local = try_local_var()) return *local;
      std::uint32_t init_start = cur().cp_start;
      AstPtr expr = expression();
      expect_punct(";");
      return finish(Sort::Statement, "exprStmt", {std::move(expr)},
                    init_start);
    }();
    AstPtr cond = expression();
    expect_punct(";");
    AstPtr update = expression();
    expect_punct(")");
    AstPtr body = statement();
    return finish(Sort::Statement, "forStmt",
                  {std::move(init), std::move(cond), std::move(update),
                   std::move(body)},
                  start);
  }

  // --- expressions ---

  AstPtr expression() { return assignment(); }

  AstPtr assignment() {
    std::uint32_t start = cur().cp_start;
    AstPtr lhs = logical_or();
    if (!cur().is_punct("=")) return lhs;
    if (lhs->constructor() != "name" && lhs->constructor() != "fieldAccess") {
      fail("assignable target");
    }
    take();
    AstPtr rhs = assignment();
    return finish(Sort::Expression, "assign", {std::move(lhs), std::move(rhs)},
                  start);
  }

  AstPtr logical_or() {
    return binary_chain({"||"}, [this] { return logical_and(); });
  }
  AstPtr logical_and() {
    return binary_chain({"&&"}, [this] { return equality(); });
  }
  AstPtr equality() {
    return binary_chain({"==", "!="}, [this] { return relational(); });
  }
  AstPtr relational() {
    return binary_chain({"<", ">", "<=", ">="}, [this] { return additive(); });
  }
  AstPtr additive() {
    return binary_chain({"+", "-"}, [this] { return multiplicative(); });
  }
  AstPtr multiplicative() {
    return binary_chain({"*", "/", "%"}, [this] { return unary(); });
  }

  template <typename Next>
  AstPtr binary_chain(std::initializer_list<std::string_view> ops,
                      Next next) {
    std::uint32_t start = cur().cp_start;
    AstPtr lhs = next();
    while (true) {
      bool matched = false;
      for (std::string_view op : ops) {
        if (cur().is_punct(op)) {
          Token op_token = take();
          AstPtr rhs = next();
          lhs = finish(Sort::Expression, "binary",
                       {op_token.text, std::move(lhs), std::move(rhs)}, start);
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  AstPtr unary() {
    std::uint32_t start = cur().cp_start;
    if (cur().is_punct("!") || cur().is_punct("-")) {
      Token op = take();
      AstPtr operand = unary();
      return finish(Sort::Expression, "unary", {op.text, std::move(operand)},
                    start);
    }
    if (cur().is_punct("(")) {
      if (auto cast_expr = try_cast(start)) return *cast_expr;
      take();
      AstPtr inner = expression();
      expect_punct(")");
      return postfix(std::move(inner));
    }
    return postfix(primary());
  }

  // '(' type ')' is a cast only when followed by something that can
  // start an operand; '-' is excluded to keep '(x) - y' a subtraction.
  std::optional<AstPtr> try_cast(std::uint32_t start) {
    std::size_t mark = index_;
    try {
      take();  // '('
      AstPtr target = type();
      if (cur().is_punct(")")) {
        const Token& next = peek(1);
        bool operand_follows =
            next.kind == TokenKind::Identifier ||
            next.kind == TokenKind::IntLiteral ||
            next.kind == TokenKind::StringLiteral ||
            next.is_keyword("true") || next.is_keyword("false") ||
            next.is_keyword("null") || next.is_keyword("this") ||
            next.is_keyword("new") || next.is_punct("(") ||
            next.is_punct("!");
        if (operand_follows) {
          take();  // ')'
          AstPtr operand = unary();
          return finish(Sort::Expression, "cast",
                        {std::move(target), std::move(operand)}, start);
        }
      }
    } catch (const ParseError&) {
    }
    index_ = mark;
    return std::nullopt;
  }

  AstPtr primary() {
    std::uint32_t start = cur().cp_start;
    if (cur().kind == TokenKind::IntLiteral) {
      Token token = take();
      std::int64_t value = 0;
      for (char c : token.text) value = value * 10 + (c - '0');
      return finish(Sort::Expression, "intLit", {value}, start);
    }
    if (cur().kind == TokenKind::StringLiteral) {
      Token token = take();
      return finish(Sort::Expression, "stringLit", {token.text}, start);
    }
    if (cur().is_keyword("true") || cur().is_keyword("false")) {
      Token token = take();
      return finish(Sort::Expression, "boolLit", {token.text == "true"},
                    start);
    }
    if (cur().is_keyword("null")) {
      take();
      return finish(Sort::Expression, "nullLit", {}, start);
    }
    if (cur().is_keyword("this")) {
      take();
      return finish(Sort::Expression, "thisRef", {}, start);
    }
    if (cur().is_keyword("new")) {
      take();
      AstPtr target = type();
      if (target->constructor() != "namedType") fail("class type after 'new'");
      std::vector<AstChild> children;
      children.push_back(std::move(target));
      args_into(children);
      return finish(Sort::Expression, "newObject", std::move(children), start);
    }
    if (cur().kind == TokenKind::Identifier) {
      Token name = take();
      if (cur().is_punct("(")) {
        std::vector<AstChild> children;
        children.emplace_back(name.text);
        args_into(children);
        return finish(Sort::Expression, "invoke", std::move(children), start);
      }
      return finish(Sort::Expression, "name", {name.text}, start);
    }
    fail("an expression");
  }

  AstPtr postfix(AstPtr expr) {
    while (cur().is_punct(".")) {
      std::uint32_t start = expr->src() && expr->src()->region()
                                ? expr->src()->region()->offset - base_
                                : cur().cp_start;
      take();
      Token name = expect_identifier("member name");
      if (cur().is_punct("(")) {
        std::vector<AstChild> children;
        children.push_back(std::move(expr));
        children.emplace_back(name.text);
        args_into(children);
        expr = finish(Sort::Expression, "invoke", std::move(children), start);
      } else {
        expr = finish(Sort::Expression, "fieldAccess",
                      {std::move(expr), name.text}, start);
      }
    }
    return expr;
  }

  void args_into(std::vector<AstChild>& children) {
    expect_punct("(");
    if (cur().is_punct(")")) {
      take();
      return;
    }
    while (true) {
      children.push_back(expression());
      if (cur().is_punct(",")) {
        take();
        continue;
      }
      expect_punct(")");
      break;
    }
  }

  // --- helpers ---

  std::vector<AstChild> modifiers() {
    std::vector<AstChild> mods;
    while (cur().kind == TokenKind::Keyword && is_modifier(cur().text)) {
      std::uint32_t start = cur().cp_start;
      Token token = take();
      mods.push_back(finish(Sort::Modifier, token.text, {}, start));
    }
    return mods;
  }

  static bool is_modifier(std::string_view word) {
    return word == "public" || word == "private" || word == "protected" ||
           word == "static" || word == "abstract" || word == "final";
  }

  std::string qualified_name() {
    Token first = expect_identifier("a name");
    std::string name = first.text;
    while (cur().is_punct(".") && peek(1).kind == TokenKind::Identifier) {
      take();
      name += '.';
      name += take().text;
    }
    return name;
  }

  const Token& cur() const { return tokens_[index_]; }
  const Token& peek(std::size_t ahead) const {
    std::size_t i = index_ + ahead;
    return tokens_[i < tokens_.size() ? i : tokens_.size() - 1];
  }

  Token take() {
    const Token& token = tokens_[index_];
    if (token.kind != TokenKind::End) ++index_;
    return token;
  }

  Token expect_identifier(std::string_view what) {
    if (cur().kind != TokenKind::Identifier) fail(std::string(what));
    return take();
  }

  void expect_keyword(std::string_view word) {
    if (!cur().is_keyword(word)) fail("'" + std::string(word) + "'");
    take();
  }

  void expect_punct(std::string_view p) {
    if (!cur().is_punct(p)) fail("'" + std::string(p) + "'");
    take();
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(cur().line, cur().column, expected);
  }

  AstPtr finish(Sort sort, std::string constructor,
                std::vector<AstChild> children, std::uint32_t start) {
    std::uint32_t end = index_ > 0 ? tokens_[index_ - 1].cp_end : start;
    AstNode node(sort, std::move(constructor), std::move(children));
    return std::make_shared<const AstNode>(node.with_src(
        file_.with_region(Region{base_ + start, end - start})));
  }

  std::vector<Token> tokens_;
  SourceLocation file_;
  std::uint32_t base_;
  std::size_t index_ = 0;
};

// Parses a whole source file; the location should be the file's
// physical location without a region.
inline AstPtr parse_file(std::string_view text, const SourceLocation& file) {
  Parser parser(tokenize(text), file.without_region());
  AstPtr unit = parser.compilation_unit();
  return unit;
}

}  // namespace m3
