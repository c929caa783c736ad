// Command-line front end: extract, compose, link, query, metric, ast.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "m3/m3.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kIoError = 2;
constexpr int kUsageError = 64;

std::vector<std::string> path_segments(const std::string& path) {
  std::vector<std::string> segments;
  std::string current;
  for (char c : path) {
    if (c == '/') {
      if (!current.empty()) segments.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) segments.push_back(current);
  return segments;
}

m3::SourceLocation file_loc(const std::string& path) {
  return m3::SourceLocation("file", "", path_segments(path));
}

std::optional<std::string> read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return bool(out);
}

int load_model(const std::string& path, m3::Model& out) {
  std::optional<std::string> text = read_text(path);
  if (!text) {
    std::cerr << "cannot read " << path << "\n";
    return kIoError;
  }
  try {
    out = m3::read_model(*text);
  } catch (const m3::Error& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}

void print_diagnostics(const m3::Diagnostics& diagnostics) {
  for (const m3::Diagnostic& d : diagnostics) {
    std::cerr << d.to_string() << "\n";
  }
}

int cmd_extract(const std::string& src_root, const std::string& authority,
                const std::string& out_path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(src_root)) {
    std::cerr << "not a directory: " << src_root << "\n";
    return kIoError;
  }
  m3::SourceLocation root("project", authority, {});
  std::vector<m3::SourceFile> files;
  try {
    files = m3::load_source_dir(src_root, root);
  } catch (const fs::filesystem_error& e) {
    std::cerr << e.what() << "\n";
    return kIoError;
  }
  m3::ExtractResult result =
      m3::extract_directory(std::move(files), root, authority);
  print_diagnostics(result.diagnostics);
  if (!write_text(out_path, m3::write_model(result.model))) {
    std::cerr << "cannot write " << out_path << "\n";
    return kIoError;
  }
  for (const m3::Diagnostic& d : result.diagnostics) {
    if (d.severity == m3::Diagnostic::Severity::Error) return kDomainError;
  }
  return kOk;
}

int cmd_fold(const std::vector<std::string>& inputs,
             const std::string& out_path, bool link) {
  m3::SourceLocation id = file_loc(out_path);
  m3::Model result;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    m3::Model next;
    if (int status = load_model(inputs[i], next); status != kOk) {
      return status;
    }
    if (i == 0) {
      result = std::move(next);
      continue;
    }
    try {
      result = link ? m3::link_models(result, next, id)
                    : m3::compose_models(result, next, id);
    } catch (const m3::Error& e) {
      std::cerr << e.what() << "\n";
      return kDomainError;
    }
  }
  result.id = id;
  if (!write_text(out_path, m3::write_model(result))) {
    std::cerr << "cannot write " << out_path << "\n";
    return kIoError;
  }
  return kOk;
}

int cmd_query(const std::string& model_path, const std::string& relation,
              const std::string& subject, bool use_inverse,
              bool use_closure) {
  m3::Model model;
  if (int status = load_model(model_path, model); status != kOk) {
    return status;
  }
  m3::SourceLocation loc("unknown", "", {});
  try {
    loc = m3::parse_location(subject);
  } catch (const m3::MalformedLocation& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }
  try {
    m3::Relation rel = m3::relation_by_name(model, relation);
    if (use_inverse) rel = m3::inverse(rel);
    if (use_closure) rel = m3::transitive_closure(rel);
    std::vector<std::string> lines;
    for (const m3::SourceLocation& target : m3::image(rel, loc)) {
      lines.push_back(target.to_string());
    }
    std::sort(lines.begin(), lines.end());
    for (const std::string& line : lines) std::cout << line << "\n";
  } catch (const m3::UnknownRelation& e) {
    std::cerr << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}

int cmd_metric(const std::string& model_path, const std::string& metric,
               const std::string& src_root, const std::string& format) {
  m3::Model model;
  if (int status = load_model(model_path, model); status != kOk) {
    return status;
  }
  bool needs_source = metric == "volume" || metric == "cc";
  if (needs_source && src_root.empty()) {
    std::cerr << "metric '" << metric << "' requires --src\n";
    return kUsageError;
  }
  m3::FsResolver source;
  if (!src_root.empty()) source.set_default_root(src_root);

  try {
    m3::MetricReport report;
    m3::Diagnostics diagnostics;
    if (metric == "volume") {
      report = m3::volume(model, source);
    } else if (metric == "cc") {
      report = m3::cyclomatic_report(model, source);
    } else if (metric == "dit") {
      report = m3::inheritance_report(model, &diagnostics);
    } else if (metric == "fanout") {
      report = m3::fan_out_report(model);
    } else {
      std::cerr << "unknown metric '" << metric << "'\n";
      return kUsageError;
    }
    print_diagnostics(diagnostics);
    std::cout << (format == "table" ? m3::report_table(report)
                                    : m3::report_csv(report));
  } catch (const m3::SourceUnavailable& e) {
    std::cerr << e.what() << "\n";
    return kIoError;
  } catch (const m3::Error& e) {
    std::cerr << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}

int cmd_ast(const std::string& model_path, const std::string& subject,
            const std::string& src_root) {
  m3::Model model;
  if (int status = load_model(model_path, model); status != kOk) {
    return status;
  }
  m3::SourceLocation loc("unknown", "", {});
  try {
    loc = m3::parse_location(subject);
  } catch (const m3::MalformedLocation& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }
  m3::FsResolver source;
  source.set_default_root(src_root);
  try {
    std::cout << m3::dump_tree(m3::get_ast(model, loc, source));
  } catch (const m3::SourceUnavailable& e) {
    std::cerr << e.what() << "\n";
    return kIoError;
  } catch (const m3::Error& e) {
    std::cerr << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"M3 source-code fact models"};
  app.require_subcommand(1);

  std::string src_root, authority, out_path, model_path, relation, subject;
  std::string metric, format = "csv";
  std::vector<std::string> inputs;
  bool use_inverse = false, use_closure = false;

  CLI::App* extract =
      app.add_subcommand("extract", "Extract a model from a source tree");
  extract->add_option("src", src_root, "source root directory")->required();
  extract->add_option("authority", authority, "model authority")->required();
  extract->add_option("-o,--out", out_path, "output .m3 path")->required();

  CLI::App* compose =
      app.add_subcommand("compose", "Union two or more models");
  compose->add_option("models", inputs, "input .m3 paths")
      ->expected(2, -1)
      ->required();
  compose->add_option("-o,--out", out_path, "output .m3 path")->required();

  CLI::App* link = app.add_subcommand(
      "link", "Union models, rebinding authorities to declarations");
  link->add_option("models", inputs, "input .m3 paths")
      ->expected(2, -1)
      ->required();
  link->add_option("-o,--out", out_path, "output .m3 path")->required();

  CLI::App* query =
      app.add_subcommand("query", "Image of a location under a relation");
  query->add_option("model", model_path, "input .m3 path")->required();
  query->add_option("relation", relation, "relation name")->required();
  query->add_option("subject", subject, "location literal")->required();
  query->add_flag("--inverse", use_inverse, "query the inverse relation");
  query->add_flag("--closure", use_closure, "query the transitive closure");

  CLI::App* metric_cmd = app.add_subcommand("metric", "Print a metric report");
  metric_cmd->add_option("model", model_path, "input .m3 path")->required();
  metric_cmd->add_option("name", metric, "volume | cc | dit | fanout")
      ->required();
  metric_cmd->add_option("--src", src_root, "source root for project://");
  metric_cmd->add_option("--format", format, "csv | table")
      ->check(CLI::IsMember({"csv", "table"}));

  CLI::App* ast = app.add_subcommand("ast", "Dump the tree of a declaration");
  ast->add_option("model", model_path, "input .m3 path")->required();
  ast->add_option("subject", subject, "location literal")->required();
  ast->add_option("--src", src_root, "source root for project://")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }

  if (extract->parsed()) return cmd_extract(src_root, authority, out_path);
  if (compose->parsed()) return cmd_fold(inputs, out_path, false);
  if (link->parsed()) return cmd_fold(inputs, out_path, true);
  if (query->parsed()) {
    return cmd_query(model_path, relation, subject, use_inverse, use_closure);
  }
  if (metric_cmd->parsed()) {
    return cmd_metric(model_path, metric, src_root, format);
  }
  if (ast->parsed()) return cmd_ast(model_path, subject, src_root);
  return kUsageError;
}
