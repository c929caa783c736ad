// Metric suite over models. Volume and cyclomatic complexity read source
// through a resolver (complexity walks the on-demand tree); inheritance
// depth, fan-out and concrete callees are pure relational queries.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "m3/extract.hpp"
#include "m3/model.hpp"
#include "m3/source.hpp"

namespace m3 {

struct MetricRow {
  SourceLocation subject;
  std::int64_t value = 0;
};

struct MetricReport {
  std::string metric;
  SourceLocation model_id;
  std::vector<MetricRow> rows;
};

namespace detail {

inline void sort_rows(std::vector<MetricRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const MetricRow& a, const MetricRow& b) {
              return a.subject.to_string() < b.subject.to_string();
            });
}

inline void cc_walk(const AstPtr& node, std::int64_t& count) {
  const std::string& ctor = node->constructor();
  if (node->sort() == Sort::Statement &&
      (ctor == "ifStmt" || ctor == "whileStmt" || ctor == "forStmt" ||
       ctor == "foreachStmt")) {
    ++count;
  } else if (ctor == "binary") {
    const std::string& op = node->text_child(0);
    if (op == "&&" || op == "||") ++count;
  }
  for (const AstChild& child : node->children()) {
    if (std::holds_alternative<AstPtr>(child)) {
      cc_walk(std::get<AstPtr>(child), count);
    }
  }
}

inline bool is_member_scheme(const std::string& scheme) {
  return scheme == "java+method" || scheme == "java+constructor";
}

}  // namespace detail

inline std::int64_t non_blank_lines(const std::string& text) {
  std::int64_t count = 0;
  bool blank = true, any = false;
  for (char c : text) {
    any = true;
    if (c == '\n') {
      if (!blank) ++count;
      blank = true;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      blank = false;
    }
  }
  if (any && !blank) ++count;
  return count;
}

// Non-blank line count per physical file in the model, plus a total
// row keyed by the model id (always last).
inline MetricReport volume(const Model& m, const SourceResolver& source) {
  std::set<SourceLocation> files;
  for (const auto& [logical, physical] : m.declarations) {
    files.insert(physical.without_region());
  }
  MetricReport report{"volume", m.id, {}};
  std::int64_t total = 0;
  for (const SourceLocation& file : files) {
    std::optional<std::string> text = source.read(file);
    if (!text) throw SourceUnavailable("cannot read " + file.to_string());
    std::int64_t lines = non_blank_lines(*text);
    total += lines;
    report.rows.push_back(MetricRow{file, lines});
  }
  detail::sort_rows(report.rows);
  report.rows.push_back(MetricRow{m.id, total});
  return report;
}

// 1 + branching statements + short-circuit operators, over the
// on-demand tree of the method.
inline std::int64_t cyclomatic_complexity(const Model& m,
                                          const SourceLocation& method,
                                          const SourceResolver& source) {
  std::int64_t count = 1;
  detail::cc_walk(get_ast(m, method, source), count);
  return count;
}

inline MetricReport cyclomatic_report(const Model& m,
                                      const SourceResolver& source) {
  MetricReport report{"cc", m.id, {}};
  for (const SourceLocation& subject : domain(m.declarations)) {
    if (!detail::is_member_scheme(subject.scheme())) continue;
    report.rows.push_back(
        MetricRow{subject, cyclomatic_complexity(m, subject, source)});
  }
  detail::sort_rows(report.rows);
  return report;
}

// Longest supertype path. A supertype edge always counts; an edge into
// a type the model does not declare is reported as a warning since the
// hierarchy above it may be missing.
inline std::int64_t depth_of_inheritance(const Model& m,
                                         const SourceLocation& type,
                                         Diagnostics* diags = nullptr) {
  LocSet declared = domain(m.declarations);
  std::map<SourceLocation, std::int64_t> memo;
  std::set<SourceLocation> on_path;
  std::set<SourceLocation> warned;

  auto depth = [&](auto&& self, const SourceLocation& t) -> std::int64_t {
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    if (!on_path.insert(t).second) {
      throw InheritanceCycle("inheritance cycle at " + t.to_string());
    }
    std::int64_t best = 0;
    for (const SourceLocation& super : image(m.inheritance, t)) {
      if (diags && !declared.count(super) && warned.insert(super).second) {
        diags->push_back(Diagnostic{
            Diagnostic::Severity::Warning, type.to_string(), 0, 0,
            "incomplete hierarchy: undeclared supertype " +
                super.to_string()});
      }
      best = std::max(best, 1 + self(self, super));
    }
    on_path.erase(t);
    memo.emplace(t, best);
    return best;
  };
  return depth(depth, type.without_region());
}

inline MetricReport inheritance_report(const Model& m,
                                       Diagnostics* diags = nullptr) {
  MetricReport report{"dit", m.id, {}};
  for (const SourceLocation& subject : domain(m.declarations)) {
    if (subject.scheme() != "java+class" &&
        subject.scheme() != "java+interface") {
      continue;
    }
    report.rows.push_back(
        MetricRow{subject, depth_of_inheritance(m, subject, diags)});
  }
  detail::sort_rows(report.rows);
  return report;
}

inline std::int64_t fan_out(const Model& m, const SourceLocation& method) {
  return static_cast<std::int64_t>(
      image(m.invocations, method.without_region()).size());
}

inline MetricReport fan_out_report(const Model& m) {
  MetricReport report{"fanout", m.id, {}};
  for (const SourceLocation& subject : domain(m.declarations)) {
    if (!detail::is_member_scheme(subject.scheme())) continue;
    report.rows.push_back(MetricRow{subject, fan_out(m, subject)});
  }
  detail::sort_rows(report.rows);
  return report;
}

// Calls to overridden methods redirected to their overriders.
inline Relation concrete_callees(const Model& m) {
  return compose(m.invocations, m.overrides);
}

namespace detail {

inline std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string report_csv(const MetricReport& report) {
  std::string out = "subject,value\n";
  for (const MetricRow& row : report.rows) {
    out += detail::csv_cell(row.subject.to_string());
    out += ',';
    out += std::to_string(row.value);
    out += '\n';
  }
  return out;
}

inline std::string report_table(const MetricReport& report) {
  std::size_t width = std::string("subject").size();
  for (const MetricRow& row : report.rows) {
    width = std::max(width, row.subject.to_string().size());
  }
  std::string out = "subject";
  out.append(width - 7, ' ');
  out += "  value\n";
  for (const MetricRow& row : report.rows) {
    std::string subject = row.subject.to_string();
    out += subject;
    out.append(width - subject.size(), ' ');
    out += "  ";
    out += std::to_string(row.value);
    out += '\n';
  }
  return out;
}

}  // namespace m3
