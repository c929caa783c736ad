// Source text access. Regions on locations count Unicode scalar values,
// not bytes, so slicing goes through the codepoint helpers here.
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "m3/loc.hpp"

namespace m3 {

// Number of Unicode scalar values in valid UTF-8 text. Continuation
// bytes (0b10xxxxxx) do not start a codepoint.
inline std::size_t codepoint_length(std::string_view text) {
  std::size_t count = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++count;
  }
  return count;
}

// Byte offset of the given codepoint index (text.size() when past the end).
inline std::size_t byte_offset_of_codepoint(std::string_view text,
                                            std::size_t cp_index) {
  std::size_t cp = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      if (cp == cp_index) return i;
      ++cp;
    }
  }
  return text.size();
}

inline std::string slice_codepoints(std::string_view text, std::size_t offset,
                                    std::size_t length) {
  std::size_t begin = byte_offset_of_codepoint(text, offset);
  std::size_t end = byte_offset_of_codepoint(text, offset + length);
  return std::string(text.substr(begin, end - begin));
}

inline std::string slice_region(std::string_view text, const Region& region) {
  return slice_codepoints(text, region.offset, region.length);
}

// Maps physical locations to source text. Implementations return
// std::nullopt when they cannot serve the location; callers decide
// whether that is an error.
class SourceResolver {
 public:
  virtual ~SourceResolver() = default;
  virtual std::optional<std::string> read(const SourceLocation& loc) const = 0;
};

// Resolves file:// directly against the filesystem and project://name
// against registered project roots.
class FsResolver : public SourceResolver {
 public:
  FsResolver() = default;

  void add_project_root(const std::string& name,
                        std::filesystem::path root) {
    roots_[name] = std::move(root);
  }

  // Root used for any project authority without its own registration.
  void set_default_root(std::filesystem::path root) {
    default_root_ = std::move(root);
  }

  std::optional<std::string> read(const SourceLocation& loc) const override {
    std::filesystem::path path;
    if (loc.scheme() == "file") {
      path = "/";
      for (const auto& segment : loc.path()) path /= segment;
    } else if (loc.scheme() == "project") {
      auto it = roots_.find(loc.authority());
      if (it == roots_.end() && !default_root_) return std::nullopt;
      path = it != roots_.end() ? it->second : *default_root_;
      for (const auto& segment : loc.path()) path /= segment;
    } else {
      return std::nullopt;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }

 private:
  std::map<std::string, std::filesystem::path> roots_;
  std::optional<std::filesystem::path> default_root_;
};

// In-memory resolver; lookup ignores regions and queries so a file's
// text is found from any location within it.
class MemResolver : public SourceResolver {
 public:
  void add(const SourceLocation& loc, std::string text) {
    files_[key_of(loc)] = std::move(text);
  }

  std::optional<std::string> read(const SourceLocation& loc) const override {
    auto it = files_.find(key_of(loc));
    if (it == files_.end()) return std::nullopt;
    return it->second;
  }

 private:
  static std::string key_of(const SourceLocation& loc) {
    SourceLocation bare(loc.scheme(), loc.authority(), loc.path());
    return bare.to_string();
  }

  std::map<std::string, std::string> files_;
};

}  // namespace m3
