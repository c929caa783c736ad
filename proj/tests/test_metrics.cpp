#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <m3/m3.hpp>

namespace {

m3::SourceLocation L(const std::string& literal) {
  return m3::parse_location(literal);
}

struct Corpus {
  m3::Model model;
  m3::MemResolver mem;
};

const Corpus& corpus() {
  static Corpus c = [] {
    Corpus out;
    m3::SourceLocation root = L("|project://demo|");
    auto files = m3::load_source_dir(TESTS_DATA_DIR "/corpus", root);
    out.model = m3::extract_directory(files, root, "demo").model;
    for (const auto& f : files) out.mem.add(f.loc, f.text);
    return out;
  }();
  return c;
}

// Chain roots at Top: Mid extends Top, Low extends Mid. Ext is referenced
// but never declared.
m3::Model hierarchy(bool with_external) {
  m3::Model m = m3::empty_model(L("|project://h|"));
  m3::SourceLocation file = L("|project://h/H.java|");
  std::set<m3::LocPair> decls = {
      {L("|java+class://h/Top|"), file.with_region({0, 1})},
      {L("|java+class://h/Mid|"), file.with_region({1, 1})},
      {L("|java+class://h/Low|"), file.with_region({2, 1})},
  };
  std::set<m3::LocPair> edges = {
      {L("|java+class://h/Mid|"), L("|java+class://h/Top|")},
      {L("|java+class://h/Low|"), L("|java+class://h/Mid|")},
  };
  if (with_external) {
    edges.insert({L("|java+class://h/Top|"), L("|java+class://h/Ext|")});
  }
  m.declarations = m3::Relation(std::move(decls));
  m.inheritance = m3::Relation(std::move(edges));
  return m;
}

}  // namespace

TEST_CASE("non-blank line counting") {
  CHECK(m3::non_blank_lines("") == 0);
  CHECK(m3::non_blank_lines("a") == 1);
  CHECK(m3::non_blank_lines("a\n") == 1);
  CHECK(m3::non_blank_lines("a\n\nb\n") == 2);
  CHECK(m3::non_blank_lines("  \n\t\n") == 0);
  CHECK(m3::non_blank_lines("x\n  y") == 2);
  CHECK(m3::non_blank_lines("\n\n\n") == 0);
}

TEST_CASE("volume reports per-file counts and a final total row") {
  const Corpus& c = corpus();
  m3::MetricReport report = m3::volume(c.model, c.mem);

  REQUIRE(report.rows.size() == 6);
  CHECK(report.rows[0].subject == L("|project://demo/app/Main.java|"));
  CHECK(report.rows[0].value == 30);
  CHECK(report.rows[1].subject == L("|project://demo/shapes/Rect.java|"));
  CHECK(report.rows[1].value == 37);
  CHECK(report.rows[2].subject == L("|project://demo/shapes/Shape.java|"));
  CHECK(report.rows[2].value == 11);
  CHECK(report.rows[3].subject == L("|project://demo/shapes/Square.java|"));
  CHECK(report.rows[3].value == 13);
  CHECK(report.rows[4].subject == L("|project://demo/util/Box.java|"));
  CHECK(report.rows[4].value == 13);
  CHECK(report.rows[5].subject == L("|project://demo|"));
  CHECK(report.rows[5].value == 104);
}

TEST_CASE("volume of an empty model is a lone zero total") {
  m3::Model m = m3::empty_model(L("|project://none|"));
  m3::MemResolver mem;
  m3::MetricReport report = m3::volume(m, mem);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].subject == L("|project://none|"));
  CHECK(report.rows[0].value == 0);
}

TEST_CASE("volume is additive over disjoint models") {
  m3::SourceLocation root = L("|project://demo|");
  auto files = m3::load_source_dir(TESTS_DATA_DIR "/corpus", root);
  std::vector<m3::SourceFile> shapes, rest;
  for (const auto& f : files) {
    (f.loc.path()[0] == "shapes" ? shapes : rest).push_back(f);
  }
  m3::Model m1 = m3::extract_directory(shapes, root, "demo").model;
  m3::Model m2 = m3::extract_directory(rest, root, "demo").model;

  const Corpus& c = corpus();
  std::int64_t whole = m3::volume(c.model, c.mem).rows.back().value;
  std::int64_t left = m3::volume(m1, c.mem).rows.back().value;
  std::int64_t right = m3::volume(m2, c.mem).rows.back().value;
  CHECK(left + right == whole);
}

TEST_CASE("volume fails loudly when a source file is missing") {
  const Corpus& c = corpus();
  m3::MemResolver empty;
  CHECK_THROWS_AS(m3::volume(c.model, empty), m3::SourceUnavailable);
}

TEST_CASE("cyclomatic complexity counts branches and short circuits") {
  const Corpus& c = corpus();
  auto cc = [&](const std::string& lit) {
    return m3::cyclomatic_complexity(c.model, L(lit), c.mem);
  };

  CHECK(cc("|java+method://demo/app/Main/boxed()|") == 1);
  CHECK(cc("|java+method://demo/app/Main/build()|") == 1);
  CHECK(cc("|java+method://demo/app/Main/totalArea(Shape[],int)|") == 3);
  CHECK(cc("|java+method://demo/shapes/Rect/clampedArea(int,int)|") == 4);
  CHECK(cc("|java+constructor://demo/shapes/Rect/Rect(int,int)|") == 1);
}

TEST_CASE("the complexity report covers every method and constructor") {
  const Corpus& c = corpus();
  m3::MetricReport report = m3::cyclomatic_report(c.model, c.mem);
  CHECK(report.rows.size() == 20);
  for (const m3::MetricRow& row : report.rows) {
    CHECK(row.value >= 1);
  }
}

TEST_CASE("inheritance depth is the longest supertype path") {
  const Corpus& c = corpus();
  auto dit = [&](const std::string& lit) {
    return m3::depth_of_inheritance(c.model, L(lit));
  };

  CHECK(dit("|java+interface://demo/shapes/Shape|") == 0);
  CHECK(dit("|java+interface://demo/shapes/Movable|") == 1);
  CHECK(dit("|java+interface://demo/shapes/Scalable|") == 1);
  CHECK(dit("|java+class://demo/shapes/Rect|") == 2);
  CHECK(dit("|java+class://demo/shapes/Square|") == 3);
  CHECK(dit("|java+class://demo/util/Box|") == 0);

  m3::Diagnostics diags;
  m3::MetricReport report = m3::inheritance_report(c.model, &diags);
  CHECK(report.rows.size() == 7);
  CHECK(diags.empty());
}

TEST_CASE("depths on a declared chain") {
  m3::Model m = hierarchy(false);
  CHECK(m3::depth_of_inheritance(m, L("|java+class://h/Top|")) == 0);
  CHECK(m3::depth_of_inheritance(m, L("|java+class://h/Mid|")) == 1);
  CHECK(m3::depth_of_inheritance(m, L("|java+class://h/Low|")) == 2);
}

TEST_CASE("edges into undeclared supertypes count but warn") {
  m3::Model m = hierarchy(true);
  m3::Diagnostics diags;
  CHECK(m3::depth_of_inheritance(m, L("|java+class://h/Low|"), &diags) == 3);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].severity == m3::Diagnostic::Severity::Warning);
  CHECK(diags[0].message ==
        "incomplete hierarchy: undeclared supertype |java+class://h/Ext|");
}

TEST_CASE("inheritance cycles are an error") {
  m3::Model m = m3::empty_model(L("|project://c|"));
  m3::SourceLocation a = L("|java+class://c/A|");
  m3::SourceLocation b = L("|java+class://c/B|");
  m.inheritance = m3::Relation({{a, b}, {b, a}});
  CHECK_THROWS_AS(m3::depth_of_inheritance(m, a), m3::InheritanceCycle);

  m3::Model self = m3::empty_model(L("|project://c|"));
  self.inheritance = m3::Relation({{a, a}});
  CHECK_THROWS_AS(m3::depth_of_inheritance(self, a), m3::InheritanceCycle);
}

TEST_CASE("per-file depth underestimates the fused hierarchy") {
  m3::SourceLocation root = L("|project://demo|");
  auto files = m3::load_source_dir(TESTS_DATA_DIR "/corpus", root);
  std::vector<m3::SourceFile> square;
  for (const auto& f : files) {
    if (f.loc.path().back() == "Square.java") square.push_back(f);
  }
  m3::Model partial = m3::extract_directory(square, root, "demo").model;

  m3::Diagnostics diags;
  std::int64_t shallow = m3::depth_of_inheritance(
      partial, L("|java+class://demo/shapes/Square|"), &diags);
  CHECK(shallow == 1);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags[0].message ==
        "incomplete hierarchy: undeclared supertype "
        "|java+class://demo/shapes/Rect|");

  const Corpus& c = corpus();
  std::int64_t fused =
      m3::depth_of_inheritance(c.model, L("|java+class://demo/shapes/Square|"));
  CHECK(shallow <= fused);
  CHECK(fused == 3);
}

TEST_CASE("fan-out counts distinct callees") {
  const Corpus& c = corpus();
  auto fo = [&](const std::string& lit) {
    return m3::fan_out(c.model, L(lit));
  };

  CHECK(fo("|java+method://demo/app/Main/build()|") == 4);
  CHECK(fo("|java+method://demo/app/Main/totalArea(Shape[],int)|") == 1);
  CHECK(fo("|java+method://demo/shapes/Rect/clampedArea(int,int)|") == 1);
  CHECK(fo("|java+method://demo/app/Main/boxed()|") == 2);
  CHECK(fo("|java+method://demo/shapes/Rect/area()|") == 0);

  m3::MetricReport report = m3::fan_out_report(c.model);
  CHECK(report.rows.size() == 20);
}

TEST_CASE("concrete callees redirect calls to overriders") {
  const Corpus& c = corpus();
  CHECK(m3::concrete_callees(c.model) ==
        m3::Relation({
            {L("|java+method://demo/shapes/Rect/clampedArea(int,int)|"),
             L("|java+method://demo/shapes/Square/area()|")},
            {L("|java+method://demo/app/Main/totalArea(Shape[],int)|"),
             L("|java+method://demo/shapes/Rect/area()|")},
            {L("|java+method://demo/app/Main/totalArea(Shape[],int)|"),
             L("|java+method://demo/shapes/Square/area()|")},
            {L("|java+method://demo/app/Main/describe(Shape)|"),
             L("|java+method://demo/shapes/Rect/label()|")},
            {L("|java+method://demo/app/Main/describe(Shape)|"),
             L("|java+method://demo/shapes/Square/label()|")},
        }));
}

TEST_CASE("reports render as csv") {
  m3::MetricReport report{"dit", L("|project://x|"), {}};
  report.rows.push_back({L("|java+class://x/A|"), 2});
  report.rows.push_back({L("|java+class://x/B|"), 0});
  CHECK(m3::report_csv(report) ==
        "subject,value\n"
        "|java+class://x/A|,2\n"
        "|java+class://x/B|,0\n");
}

TEST_CASE("csv cells quote separators and quotes") {
  CHECK(m3::detail::csv_cell("plain") == "plain");
  CHECK(m3::detail::csv_cell("a,b") == "\"a,b\"");
  CHECK(m3::detail::csv_cell("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(m3::detail::csv_cell("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("reports render as an aligned table") {
  m3::MetricReport report{"fanout", L("|project://x|"), {}};
  report.rows.push_back({L("|java+class://x/A|"), 12});
  CHECK(m3::report_table(report) ==
        "subject             value\n"
        "|java+class://x/A|  12\n");
}
