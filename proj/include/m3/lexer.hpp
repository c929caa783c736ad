// Hand-written lexer for the analyzed language subset. Tokens carry
// codepoint offsets (for regions) alongside line and column (for
// diagnostics). Comments and whitespace are skipped.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "m3/error.hpp"

namespace m3 {

enum class TokenKind {
  Identifier,
  Keyword,
  IntLiteral,
  StringLiteral,
  Punct,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;       // raw spelling; decoded value for string literals
  std::uint32_t cp_start = 0;
  std::uint32_t cp_end = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is(TokenKind k) const { return kind == k; }
  bool is(TokenKind k, std::string_view t) const {
    return kind == k && text == t;
  }
  bool is_keyword(std::string_view t) const {
    return is(TokenKind::Keyword, t);
  }
  bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
};

inline const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> set = {
      "package", "import",  "class",    "interface", "extends",
      "implements", "public", "private", "protected", "static",
      "abstract", "final",   "int",      "boolean",   "str",
      "void",     "if",      "else",     "while",     "for",
      "return",   "break",   "continue", "new",       "this",
      "null",     "true",    "false"};
  return set;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> tokenize() {
    std::vector<Token> tokens;
    while (true) {
      skip_trivia();
      Token token = next_token();
      bool end = token.kind == TokenKind::End;
      tokens.push_back(std::move(token));
      if (end) break;
    }
    return tokens;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  // Advances one byte, maintaining the codepoint counter and line/column.
  void advance() {
    char c = text_[pos_];
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++cp_;
      ++column_;
    }
    if (c == '\n') {
      ++line_;
      column_ = 1;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        std::size_t open_line = line_, open_col = column_;
        advance();
        advance();
        while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/')) {
          advance();
        }
        if (pos_ >= text_.size()) {
          throw ParseError(open_line, open_col, "closing */");
        }
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token next_token() {
    Token token;
    token.cp_start = static_cast<std::uint32_t>(cp_);
    token.line = line_;
    token.column = column_;
    if (pos_ >= text_.size()) {
      token.kind = TokenKind::End;
      token.cp_end = token.cp_start;
      return token;
    }
    char c = peek();
    if (is_ident_start(c)) {
      std::string word;
      while (pos_ < text_.size() && is_ident_part(peek())) {
        word += peek();
        advance();
      }
      token.kind = keywords().count(word) ? TokenKind::Keyword
                                          : TokenKind::Identifier;
      token.text = std::move(word);
    } else if (c >= '0' && c <= '9') {
      std::string digits;
      while (pos_ < text_.size() && peek() >= '0' && peek() <= '9') {
        digits += peek();
        advance();
      }
      token.kind = TokenKind::IntLiteral;
      token.text = std::move(digits);
    } else if (c == '"') {
      token.kind = TokenKind::StringLiteral;
      token.text = lex_string();
    } else {
      token.kind = TokenKind::Punct;
      token.text = lex_punct();
    }
    token.cp_end = static_cast<std::uint32_t>(cp_);
    return token;
  }

  std::string lex_string() {
    std::size_t open_line = line_, open_col = column_;
    advance();  // opening quote
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || peek() == '\n') {
        throw ParseError(open_line, open_col, "closing '\"'");
      }
      char c = peek();
      if (c == '"') {
        advance();
        return value;
      }
      if (c == '\\') {
        advance();
        char esc = peek();
        switch (esc) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '\\': value += '\\'; break;
          case '"': value += '"'; break;
          default:
            throw ParseError(line_, column_, "escape n, t, \\\\ or \\\"");
        }
        advance();
      } else {
        value += c;
        advance();
      }
    }
  }

  std::string lex_punct() {
    static const std::string_view two_char[] = {"&&", "||", "==", "!=",
                                                "<=", ">="};
    for (std::string_view op : two_char) {
      if (peek() == op[0] && peek(1) == op[1]) {
        advance();
        advance();
        return std::string(op);
      }
    }
    char c = peek();
    static const std::string_view singles = "+-*/%!=<>.,;(){}[]:";
    if (singles.find(c) == std::string_view::npos) {
      throw ParseError(line_, column_, "a token");
    }
    advance();
    return std::string(1, c);
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_part(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
  }

  std::string_view text_;
  std::size_t pos_ = 0;   // byte offset
  std::size_t cp_ = 0;    // codepoint offset
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

inline std::vector<Token> tokenize(std::string_view text) {
  return Lexer(text).tokenize();
}

}  // namespace m3
