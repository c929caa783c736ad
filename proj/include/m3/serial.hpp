// Canonical text serialization for relations and whole models.
//
// Model file grammar (extension .m3, UTF-8, '\n' line endings on write):
//
//   model    = header section*
//   header   = "m3 " locLiteral
//   section  = "relation " name relationText
//            | "types" typeLine*
//   typeLine = locLiteral " -> " typeSymbolText
//
// Each of the six relation sections and the types section appears exactly
// once; readers accept them in any order and reject unknown sections.
// Relation text is `{}` or `{` tuple ("," tuple)* `}` over tuples
// `<locLiteral,locLiteral>`; the writer emits one tuple per line, sorted
// by printed tuple text, and sorts type lines by printed key.
#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "m3/model.hpp"

namespace m3 {

inline std::string print_pair(const LocPair& pair) {
  return "<" + pair.first.to_string() + "," + pair.second.to_string() + ">";
}

inline std::vector<std::string> sorted_pair_texts(const Relation& r) {
  std::vector<std::string> texts;
  texts.reserve(r.size());
  for (const auto& pair : r) texts.push_back(print_pair(pair));
  std::sort(texts.begin(), texts.end());
  return texts;
}

inline std::string relation_to_text(const Relation& r) {
  if (r.empty()) return "{}";
  std::string out = "{\n";
  auto texts = sorted_pair_texts(r);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out += "  ";
    out += texts[i];
    if (i + 1 < texts.size()) out += ',';
    out += '\n';
  }
  out += '}';
  return out;
}

namespace detail {

// Cursor over relation text; newlines and blanks between tokens are
// insignificant on read.
class RelationTextParser {
 public:
  RelationTextParser(std::string_view text, std::size_t base_line)
      : text_(text), base_line_(base_line) {}

  Relation parse() {
    skip_space();
    expect('{');
    std::set<LocPair> pairs;
    skip_space();
    if (peek() == '}') {
      ++pos_;
    } else {
      while (true) {
        pairs.insert(parse_pair());
        skip_space();
        if (peek() == ',') {
          ++pos_;
          skip_space();
          continue;
        }
        expect('}');
        break;
      }
    }
    skip_space();
    if (pos_ != text_.size()) {
      fail("junk after closing '}'");
    }
    return Relation(std::move(pairs));
  }

 private:
  LocPair parse_pair() {
    expect('<');
    SourceLocation from = parse_loc();
    expect(',');
    SourceLocation to = parse_loc();
    expect('>');
    return {std::move(from), std::move(to)};
  }

  SourceLocation parse_loc() {
    try {
      return parse_location_at(text_, pos_);
    } catch (const MalformedLocation& e) {
      fail(e.what());
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' ||
            text_[pos_] == '\n')) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& message) {
    std::size_t line = base_line_;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') ++line;
    }
    throw MalformedModel(line, message);
  }

  std::string_view text_;
  std::size_t base_line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Relation relation_from_text(std::string_view text,
                                   std::size_t base_line = 1) {
  return detail::RelationTextParser(text, base_line).parse();
}

inline std::string write_model(const Model& m) {
  std::string out = "m3 " + m.id.to_string() + "\n";
  for (auto name : kRelationNames) {
    out += "relation ";
    out += name;
    out += '\n';
    out += relation_to_text(relation_by_name(m, name));
    out += '\n';
  }
  out += "types\n";
  std::vector<std::pair<std::string, std::string>> lines;
  lines.reserve(m.declared_types.size());
  for (const auto& [key, symbol] : m.declared_types) {
    lines.emplace_back(key.to_string(), print_type_symbol(symbol));
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [key, symbol] : lines) {
    out += key;
    out += " -> ";
    out += symbol;
    out += '\n';
  }
  return out;
}

inline Model read_model(std::string_view text) {
  // Normalize line endings and strip trailing blanks per line.
  std::vector<std::string> lines;
  {
    std::string current;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(current);
        current.clear();
      } else if (c != '\r') {
        current.push_back(c);
      }
    }
    if (!current.empty()) lines.push_back(current);
    for (auto& line : lines) {
      while (!line.empty() &&
             (line.back() == ' ' || line.back() == '\t')) {
        line.pop_back();
      }
    }
  }

  std::size_t n = 0;
  auto at_end = [&] { return n >= lines.size(); };
  if (at_end() || lines[0].rfind("m3 ", 0) != 0) {
    throw MalformedModel(1, "expected header 'm3 <location>'");
  }

  Model m;
  try {
    m.id = parse_location(std::string_view(lines[0]).substr(3));
  } catch (const MalformedLocation& e) {
    throw MalformedModel(1, std::string("bad model id: ") + e.what());
  }
  ++n;

  std::map<std::string, bool> seen;
  for (auto name : kRelationNames) seen[std::string(name)] = false;
  bool seen_types = false;

  while (!at_end()) {
    if (lines[n].empty()) {
      ++n;
      continue;
    }
    std::size_t header_line = n + 1;
    if (lines[n].rfind("relation ", 0) == 0) {
      std::string name = lines[n].substr(9);
      auto it = seen.find(name);
      if (it == seen.end()) {
        throw UnknownSection("line " + std::to_string(header_line) +
                             ": unknown relation section '" + name + "'");
      }
      if (it->second) {
        throw MalformedModel(header_line,
                             "duplicate relation section '" + name + "'");
      }
      it->second = true;
      ++n;
      // Gather the relation body: from the opening '{' through the line
      // containing the matching '}'.
      std::string body;
      std::size_t body_line = n + 1;
      bool closed = false;
      while (!at_end()) {
        body += lines[n];
        body += '\n';
        if (lines[n].find('}') != std::string::npos) {
          closed = true;
          ++n;
          break;
        }
        ++n;
      }
      if (!closed) {
        throw MalformedModel(body_line, "unterminated relation body");
      }
      relation_by_name(m, name) = relation_from_text(body, body_line);
    } else if (lines[n] == "types") {
      if (seen_types) {
        throw MalformedModel(header_line, "duplicate types section");
      }
      seen_types = true;
      ++n;
      while (!at_end() && !lines[n].empty() &&
             lines[n].rfind("relation ", 0) != 0 && lines[n] != "types") {
        const std::string& line = lines[n];
        std::size_t pos = 0;
        SourceLocation key = [&] {
          try {
            return detail::parse_location_at(line, pos);
          } catch (const MalformedLocation& e) {
            throw MalformedModel(n + 1, std::string("bad type line key: ") +
                                            e.what());
          }
        }();
        if (line.compare(pos, 4, " -> ") != 0) {
          throw MalformedModel(n + 1, "expected ' -> ' in type line");
        }
        TypeSymbol symbol = [&] {
          try {
            return parse_type_symbol(std::string_view(line).substr(pos + 4));
          } catch (const MalformedTypeSymbol& e) {
            throw MalformedModel(n + 1,
                                 std::string("bad type symbol: ") + e.what());
          }
        }();
        auto [it, inserted] = m.declared_types.emplace(key, symbol);
        if (!inserted && !(it->second == symbol)) {
          throw MalformedModel(n + 1, "conflicting type lines for " +
                                          key.to_string());
        }
        ++n;
      }
    } else {
      throw UnknownSection("line " + std::to_string(header_line) +
                           ": unknown section '" + lines[n] + "'");
    }
  }

  for (const auto& [name, present] : seen) {
    if (!present) {
      throw MalformedModel(lines.size(),
                           "missing relation section '" + name + "'");
    }
  }
  if (!seen_types) {
    throw MalformedModel(lines.size(), "missing types section");
  }
  return m;
}

}  // namespace m3
