// Symbolic type values embedding logical locations. A single variant sort
// covers class/interface types (raw or instantiated), method signatures,
// primitives, arrays, type parameters and not-yet-resolved names, printed
// in constructor notation such as
//   class(|java+class://p/java/util/List|,[class(|java+class://p/java/lang/String|,[])])
#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "m3/loc.hpp"

namespace m3 {

class TypeSymbol {
 public:
  enum class Kind {
    Class,
    Interface,
    Method,
    Primitive,
    Array,
    TypeParameter,
    Unresolved,
  };

  // Primitive set of the subset language.
  enum class Primitive { Int, Boolean, Str, Void };

  static TypeSymbol class_type(SourceLocation decl,
                               std::vector<TypeSymbol> type_args = {}) {
    TypeSymbol t(Kind::Class);
    t.decl_ = std::move(decl);
    t.children_ = std::move(type_args);
    return t;
  }

  static TypeSymbol interface_type(SourceLocation decl,
                                   std::vector<TypeSymbol> type_args = {}) {
    TypeSymbol t(Kind::Interface);
    t.decl_ = std::move(decl);
    t.children_ = std::move(type_args);
    return t;
  }

  // children_[0] is the return type, the rest are parameter types.
  static TypeSymbol method_type(SourceLocation decl, TypeSymbol return_type,
                                std::vector<TypeSymbol> param_types) {
    TypeSymbol t(Kind::Method);
    t.decl_ = std::move(decl);
    t.children_.reserve(param_types.size() + 1);
    t.children_.push_back(std::move(return_type));
    for (auto& p : param_types) t.children_.push_back(std::move(p));
    return t;
  }

  static TypeSymbol primitive(Primitive p) {
    TypeSymbol t(Kind::Primitive);
    t.name_ = primitive_name(p);
    return t;
  }

  static TypeSymbol array(TypeSymbol element) {
    TypeSymbol t(Kind::Array);
    t.children_.push_back(std::move(element));
    return t;
  }

  static TypeSymbol type_parameter(SourceLocation decl) {
    TypeSymbol t(Kind::TypeParameter);
    t.decl_ = std::move(decl);
    return t;
  }

  static TypeSymbol unresolved(std::string name) {
    TypeSymbol t(Kind::Unresolved);
    t.name_ = std::move(name);
    return t;
  }

  Kind kind() const { return kind_; }
  bool has_decl() const { return decl_.has_value(); }
  const SourceLocation& decl() const { return *decl_; }
  const std::string& name() const { return name_; }

  const std::vector<TypeSymbol>& type_args() const { return children_; }
  const TypeSymbol& return_type() const { return children_.front(); }
  std::vector<TypeSymbol> param_types() const {
    return {children_.begin() + 1, children_.end()};
  }
  const TypeSymbol& element() const { return children_.front(); }
  const std::vector<TypeSymbol>& children() const { return children_; }

  bool is_primitive(Primitive p) const {
    return kind_ == Kind::Primitive && name_ == primitive_name(p);
  }

  // Applies fn to every location embedded in the symbol, rebuilding the
  // value. Used by model linking to rewrite authorities inside types.
  template <typename Fn>
  TypeSymbol map_locations(Fn&& fn) const {
    TypeSymbol out = *this;
    if (out.decl_) out.decl_ = fn(*out.decl_);
    for (auto& child : out.children_) {
      child = child.map_locations(fn);
    }
    return out;
  }

  // Structural substitution of typeParameter leaves; unbound parameters
  // pass through unchanged.
  TypeSymbol substitute(
      const std::map<SourceLocation, TypeSymbol>& binding) const {
    if (kind_ == Kind::TypeParameter) {
      auto it = binding.find(*decl_);
      return it == binding.end() ? *this : it->second;
    }
    TypeSymbol out = *this;
    for (auto& child : out.children_) {
      child = child.substitute(binding);
    }
    return out;
  }

  friend bool operator==(const TypeSymbol&, const TypeSymbol&) = default;
  friend bool operator<(const TypeSymbol& a, const TypeSymbol& b) {
    return std::tie(a.kind_, a.decl_, a.name_, a.children_) <
           std::tie(b.kind_, b.decl_, b.name_, b.children_);
  }

  static const char* primitive_name(Primitive p) {
    switch (p) {
      case Primitive::Int:
        return "int";
      case Primitive::Boolean:
        return "boolean";
      case Primitive::Str:
        return "str";
      default:
        return "void";
    }
  }

 private:
  explicit TypeSymbol(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::optional<SourceLocation> decl_;
  std::string name_;
  std::vector<TypeSymbol> children_;
};

namespace detail {

inline void escape_into(std::string& out, const std::string& text) {
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
}

}  // namespace detail

inline std::string print_type_symbol(const TypeSymbol& t) {
  std::string out;
  switch (t.kind()) {
    case TypeSymbol::Kind::Class:
    case TypeSymbol::Kind::Interface: {
      out += t.kind() == TypeSymbol::Kind::Class ? "class(" : "interface(";
      out += t.decl().to_string();
      out += ",[";
      bool first = true;
      for (const auto& arg : t.type_args()) {
        if (!first) out += ',';
        first = false;
        out += print_type_symbol(arg);
      }
      out += "])";
      break;
    }
    case TypeSymbol::Kind::Method: {
      out += "method(";
      out += t.decl().to_string();
      out += ',';
      out += print_type_symbol(t.return_type());
      out += ",[";
      bool first = true;
      for (std::size_t i = 1; i < t.children().size(); ++i) {
        if (!first) out += ',';
        first = false;
        out += print_type_symbol(t.children()[i]);
      }
      out += "])";
      break;
    }
    case TypeSymbol::Kind::Primitive:
      out += t.name();
      out += "()";
      break;
    case TypeSymbol::Kind::Array:
      out += "array(";
      out += print_type_symbol(t.element());
      out += ')';
      break;
    case TypeSymbol::Kind::TypeParameter:
      out += "typeParameter(";
      out += t.decl().to_string();
      out += ')';
      break;
    case TypeSymbol::Kind::Unresolved:
      out += "unresolved(\"";
      detail::escape_into(out, t.name());
      out += "\")";
      break;
  }
  return out;
}

namespace detail {

class TypeSymbolParser {
 public:
  explicit TypeSymbolParser(std::string_view text) : text_(text) {}

  TypeSymbol parse_all() {
    TypeSymbol result = parse();
    if (pos_ != text_.size()) {
      fail("end of input");
    }
    return result;
  }

  TypeSymbol parse() {
    std::string ctor = identifier();
    if (ctor == "class" || ctor == "interface") {
      expect('(');
      SourceLocation decl = location();
      expect(',');
      expect('[');
      std::vector<TypeSymbol> args = symbol_list(']');
      expect(')');
      return ctor == "class"
                 ? TypeSymbol::class_type(std::move(decl), std::move(args))
                 : TypeSymbol::interface_type(std::move(decl),
                                              std::move(args));
    }
    if (ctor == "method") {
      expect('(');
      SourceLocation decl = location();
      expect(',');
      TypeSymbol ret = parse();
      expect(',');
      expect('[');
      std::vector<TypeSymbol> params = symbol_list(']');
      expect(')');
      return TypeSymbol::method_type(std::move(decl), std::move(ret),
                                     std::move(params));
    }
    if (ctor == "array") {
      expect('(');
      TypeSymbol elem = parse();
      expect(')');
      return TypeSymbol::array(std::move(elem));
    }
    if (ctor == "typeParameter") {
      expect('(');
      SourceLocation decl = location();
      expect(')');
      return TypeSymbol::type_parameter(std::move(decl));
    }
    if (ctor == "unresolved") {
      expect('(');
      std::string name = quoted_string();
      expect(')');
      return TypeSymbol::unresolved(std::move(name));
    }
    for (auto p : {TypeSymbol::Primitive::Int, TypeSymbol::Primitive::Boolean,
                   TypeSymbol::Primitive::Str, TypeSymbol::Primitive::Void}) {
      if (ctor == TypeSymbol::primitive_name(p)) {
        expect('(');
        expect(')');
        return TypeSymbol::primitive(p);
      }
    }
    fail("type symbol constructor");
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    throw MalformedTypeSymbol("expected " + expected + " at offset " +
                              std::to_string(pos_) + " in '" +
                              std::string(text_) + "'");
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(std::string("'") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  SourceLocation location() {
    try {
      return parse_location_at(text_, pos_);
    } catch (const MalformedLocation& e) {
      throw MalformedTypeSymbol(std::string("bad location literal: ") +
                                e.what());
    }
  }

  std::string quoted_string() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("closing '\"'");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("escaped character");
        out.push_back(text_[pos_++]);
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  std::vector<TypeSymbol> symbol_list(char terminator) {
    std::vector<TypeSymbol> out;
    if (peek() == terminator) {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(parse());
      if (peek() == terminator) {
        ++pos_;
        return out;
      }
      expect(',');
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline TypeSymbol parse_type_symbol(std::string_view text) {
  return detail::TypeSymbolParser(text).parse_all();
}

// Structural substitution of typeParameter leaves by their bound symbols,
// keyed by the parameter's declaration location.
inline TypeSymbol instantiate(
    const TypeSymbol& generic,
    const std::map<SourceLocation, TypeSymbol>& binding) {
  return generic.substitute(binding);
}

}  // namespace m3
