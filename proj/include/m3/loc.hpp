// Source locations: URI-shaped identities for physical storage regions and
// logically declared entities, with the canonical literal syntax
//   |scheme://authority/seg0/seg1?k0=v0&k1=v1|(offset,length)
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "m3/error.hpp"

namespace m3 {

struct Region {
  std::uint32_t offset = 0;
  std::uint32_t length = 0;

  friend bool operator==(const Region&, const Region&) = default;
  friend bool operator<(const Region& a, const Region& b) {
    return std::tie(a.offset, a.length) < std::tie(b.offset, b.length);
  }
};

namespace detail {

// Characters that survive percent-encoding unescaped. Everything else is
// written as %XX so that printed literals round-trip byte-exactly.
inline bool is_unreserved(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '~' ||
         c == '(' || c == ')' || c == '-';
}

inline std::string percent_encode(std::string_view text) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (is_unreserved(c)) {
      out.push_back(c);
    } else {
      auto byte = static_cast<unsigned char>(c);
      out.push_back('%');
      out.push_back(hex[byte >> 4]);
      out.push_back(hex[byte & 0xF]);
    }
  }
  return out;
}

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

inline std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%') {
      if (i + 2 >= text.size()) {
        throw MalformedLocation("truncated percent escape in '" +
                                std::string(text) + "'");
      }
      int hi = hex_value(text[i + 1]);
      int lo = hex_value(text[i + 2]);
      if (hi < 0 || lo < 0) {
        throw MalformedLocation("invalid percent escape in '" +
                                std::string(text) + "'");
      }
      out.push_back(static_cast<char>(hi * 16 + lo));
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

inline bool valid_scheme_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' ||
         c == '.' || c == '-';
}

}  // namespace detail

// An immutable URI-shaped value identifying either a physical storage region
// or a logically declared entity. Equality is structural over all five
// fields; values are usable as set elements and map keys.
class SourceLocation {
 public:
  SourceLocation() : scheme_("unknown") {}

  SourceLocation(std::string scheme, std::string authority,
                 std::vector<std::string> path,
                 std::map<std::string, std::string> query = {},
                 std::optional<Region> region = std::nullopt)
      : scheme_(normalize_scheme(scheme)),
        authority_(std::move(authority)),
        path_(std::move(path)),
        query_(std::move(query)),
        region_(region) {}

  const std::string& scheme() const { return scheme_; }
  const std::string& authority() const { return authority_; }
  const std::vector<std::string>& path() const { return path_; }
  const std::map<std::string, std::string>& query() const { return query_; }
  const std::optional<Region>& region() const { return region_; }

  // The kind part of the scheme: text after the last '+', or the whole
  // scheme when no '+' is present (e.g. "java+class" -> "class").
  std::string scheme_kind() const {
    auto pos = scheme_.rfind('+');
    return pos == std::string::npos ? scheme_ : scheme_.substr(pos + 1);
  }

  SourceLocation with_authority(std::string authority) const {
    SourceLocation out = *this;
    out.authority_ = std::move(authority);
    return out;
  }

  SourceLocation with_region(Region region) const {
    SourceLocation out = *this;
    out.region_ = region;
    return out;
  }

  SourceLocation without_region() const {
    SourceLocation out = *this;
    out.region_.reset();
    return out;
  }

  SourceLocation with_path(std::vector<std::string> path) const {
    SourceLocation out = *this;
    out.path_ = std::move(path);
    return out;
  }

  std::string to_string() const {
    std::string out = "|";
    out += scheme_;
    out += "://";
    out += detail::percent_encode(authority_);
    for (const auto& segment : path_) {
      out += '/';
      out += detail::percent_encode(segment);
    }
    bool first = true;
    for (const auto& [key, value] : query_) {
      out += first ? '?' : '&';
      first = false;
      out += detail::percent_encode(key);
      out += '=';
      out += detail::percent_encode(value);
    }
    out += '|';
    if (region_) {
      out += '(';
      out += std::to_string(region_->offset);
      out += ',';
      out += std::to_string(region_->length);
      out += ')';
    }
    return out;
  }

  friend bool operator==(const SourceLocation&, const SourceLocation&) =
      default;

  friend bool operator<(const SourceLocation& a, const SourceLocation& b) {
    return std::tie(a.scheme_, a.authority_, a.path_, a.query_, a.region_) <
           std::tie(b.scheme_, b.authority_, b.path_, b.query_, b.region_);
  }

 private:
  static std::string normalize_scheme(std::string scheme) {
    if (scheme.empty()) {
      throw MalformedLocation("empty scheme");
    }
    for (char& c : scheme) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (!detail::valid_scheme_char(c)) {
        throw MalformedLocation("invalid character in scheme '" + scheme +
                                "'");
      }
    }
    return scheme;
  }

  std::string scheme_;
  std::string authority_;
  std::vector<std::string> path_;
  std::map<std::string, std::string> query_;
  std::optional<Region> region_;
};

inline std::string print_location(const SourceLocation& l) {
  return l.to_string();
}

namespace detail {

// Parses a location literal starting at text[pos]. Advances pos past the
// literal. Used both for standalone parsing and for scanning literals
// embedded in larger forms (relation text, type symbols, model files).
inline SourceLocation parse_location_at(std::string_view text,
                                        std::size_t& pos) {
  if (pos >= text.size() || text[pos] != '|') {
    throw MalformedLocation("expected '|' at start of location literal");
  }
  std::size_t close = text.find('|', pos + 1);
  if (close == std::string_view::npos) {
    throw MalformedLocation("missing closing '|' in location literal");
  }
  std::string_view inner = text.substr(pos + 1, close - pos - 1);

  std::size_t sep = inner.find("://");
  if (sep == std::string_view::npos) {
    throw MalformedLocation("missing '://' in '" + std::string(inner) + "'");
  }
  std::string scheme(inner.substr(0, sep));
  if (scheme.empty()) {
    throw MalformedLocation("empty scheme in location literal");
  }
  std::string_view rest = inner.substr(sep + 3);

  std::string_view path_part = rest;
  std::string_view query_part;
  if (std::size_t q = rest.find('?'); q != std::string_view::npos) {
    path_part = rest.substr(0, q);
    query_part = rest.substr(q + 1);
    if (query_part.empty()) {
      throw MalformedLocation("empty query after '?'");
    }
  }

  std::string authority;
  std::vector<std::string> path;
  if (!path_part.empty()) {
    std::size_t slash = path_part.find('/');
    authority = percent_decode(path_part.substr(0, slash));
    if (slash != std::string_view::npos) {
      std::string_view segments = path_part.substr(slash + 1);
      while (true) {
        std::size_t next = segments.find('/');
        path.push_back(percent_decode(segments.substr(0, next)));
        if (next == std::string_view::npos) break;
        segments = segments.substr(next + 1);
      }
    }
  }

  std::map<std::string, std::string> query;
  if (!query_part.empty()) {
    std::string_view pairs = query_part;
    while (true) {
      std::size_t amp = pairs.find('&');
      std::string_view item = pairs.substr(0, amp);
      std::size_t eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw MalformedLocation("query item without '=' in '" +
                                std::string(item) + "'");
      }
      query.insert_or_assign(percent_decode(item.substr(0, eq)),
                             percent_decode(item.substr(eq + 1)));
      if (amp == std::string_view::npos) break;
      pairs = pairs.substr(amp + 1);
    }
  }

  pos = close + 1;
  std::optional<Region> region;
  if (pos < text.size() && text[pos] == '(') {
    std::size_t end = text.find(')', pos);
    if (end == std::string_view::npos) {
      throw MalformedLocation("unterminated region suffix");
    }
    std::string_view body = text.substr(pos + 1, end - pos - 1);
    std::size_t comma = body.find(',');
    if (comma == std::string_view::npos) {
      throw MalformedLocation("region suffix needs '(offset,length)'");
    }
    auto parse_number = [&](std::string_view digits) -> std::uint32_t {
      if (digits.empty()) {
        throw MalformedLocation("empty number in region suffix");
      }
      std::uint64_t value = 0;
      for (char c : digits) {
        if (c < '0' || c > '9') {
          throw MalformedLocation("non-numeric region in '(" +
                                  std::string(body) + ")'");
        }
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
        if (value > 0xFFFFFFFFull) {
          throw MalformedLocation("region value out of range");
        }
      }
      return static_cast<std::uint32_t>(value);
    };
    region = Region{parse_number(body.substr(0, comma)),
                    parse_number(body.substr(comma + 1))};
    pos = end + 1;
  }

  return SourceLocation(std::move(scheme), std::move(authority),
                        std::move(path), std::move(query), region);
}

}  // namespace detail

inline SourceLocation parse_location(std::string_view literal) {
  std::size_t pos = 0;
  SourceLocation loc = detail::parse_location_at(literal, pos);
  if (pos != literal.size()) {
    throw MalformedLocation("trailing characters after location literal in '" +
                            std::string(literal) + "'");
  }
  return loc;
}

// Registry separating physical storage schemes from the kind part of
// logical schemes. The two sets stay disjoint; the set of schemes is
// extensible via the register_* calls.
class SchemeRegistry {
 public:
  enum class Classification { Physical, Logical, Unknown };

  static SchemeRegistry with_defaults() {
    SchemeRegistry reg;
    for (const char* s : {"file", "project", "cwd", "unknown"}) {
      reg.physical_.insert(s);
    }
    for (const char* s : {"class", "interface", "method", "constructor",
                          "field", "parameter", "variable", "package"}) {
      reg.logical_kinds_.insert(s);
    }
    return reg;
  }

  static const SchemeRegistry& defaults() {
    static const SchemeRegistry reg = with_defaults();
    return reg;
  }

  void register_physical(const std::string& scheme) {
    if (logical_kinds_.count(scheme)) {
      throw UnknownScheme("scheme '" + scheme +
                          "' already registered as logical kind");
    }
    physical_.insert(scheme);
  }

  void register_logical_kind(const std::string& kind) {
    if (physical_.count(kind)) {
      throw UnknownScheme("kind '" + kind +
                          "' already registered as physical scheme");
    }
    logical_kinds_.insert(kind);
  }

  const std::set<std::string>& physical_schemes() const { return physical_; }
  const std::set<std::string>& logical_kinds() const {
    return logical_kinds_;
  }

  Classification classify(const SourceLocation& l) const {
    if (logical_kinds_.count(l.scheme_kind())) {
      return Classification::Logical;
    }
    if (physical_.count(l.scheme())) {
      return Classification::Physical;
    }
    return Classification::Unknown;
  }

  bool is_logical(const SourceLocation& l) const {
    switch (classify(l)) {
      case Classification::Logical:
        return true;
      case Classification::Physical:
        return false;
      default:
        throw UnknownScheme("scheme '" + l.scheme() +
                            "' is registered neither as physical nor as a "
                            "logical kind");
    }
  }

 private:
  std::set<std::string> physical_;
  std::set<std::string> logical_kinds_;
};

inline bool is_logical(const SourceLocation& l,
                       const SchemeRegistry& reg = SchemeRegistry::defaults()) {
  return reg.is_logical(l);
}

inline SourceLocation with_authority(const SourceLocation& l,
                                     std::string authority) {
  return l.with_authority(std::move(authority));
}

}  // namespace m3

template <>
struct std::hash<m3::SourceLocation> {
  std::size_t operator()(const m3::SourceLocation& l) const {
    return std::hash<std::string>()(l.to_string());
  }
};
