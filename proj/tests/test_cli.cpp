#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <m3/m3.hpp>

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string shell_quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run m3_run(const std::vector<std::string>& args) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() / "m3cli" / "io";
  fs::create_directories(dir);
  fs::path out_file = dir / ("out" + std::to_string(++counter));
  fs::path err_file = dir / ("err" + std::to_string(counter));

  std::string cmd = shell_quote(M3_BIN_PATH);
  for (const std::string& arg : args) cmd += " " + shell_quote(arg);
  cmd += " > " + shell_quote(out_file.string());
  cmd += " 2> " + shell_quote(err_file.string());

  int rc = std::system(cmd.c_str());
  Run run;
  run.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  run.out = slurp(out_file);
  run.err = slurp(err_file);
  return run;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "m3cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string expected(const std::string& name) {
  return slurp(fs::path(TESTS_DATA_DIR) / "expected" / name);
}

// Extracted corpus model, produced once per test binary run.
const fs::path& corpus_model() {
  static fs::path path = [] {
    fs::path out = scratch("corpus") / "corpus.m3";
    Run run = m3_run({"extract", TESTS_DATA_DIR "/corpus", "demo", "-o",
                      out.string()});
    REQUIRE(run.code == 0);
    REQUIRE(run.err.empty());
    return out;
  }();
  return path;
}

}  // namespace

TEST_CASE("extract reproduces the golden model byte for byte") {
  CHECK(slurp(corpus_model()) == expected("corpus.m3"));
}

TEST_CASE("extracted models survive a read-write cycle unchanged") {
  std::string bytes = slurp(corpus_model());
  CHECK(m3::write_model(m3::read_model(bytes)) == bytes);
}

TEST_CASE("extract rejects a missing source directory") {
  Run run = m3_run({"extract", "/no/such/dir", "demo", "-o", "/tmp/x.m3"});
  CHECK(run.code == 2);
  CHECK_FALSE(run.err.empty());
}

TEST_CASE("extract reports parse failures and keeps healthy files") {
  fs::path src = scratch("broken_src");
  spit(src / "bad" / "Broken.java", "package bad;\nclass X {\n");
  spit(src / "ok" / "Good.java", "package ok;\nclass Good {\n}\n");
  fs::path out = scratch("broken_out") / "broken.m3";

  Run run = m3_run({"extract", src.string(), "P", "-o", out.string()});
  CHECK(run.code == 1);
  CHECK(run.err.find("expected ") != std::string::npos);

  m3::Model m = m3::read_model(slurp(out));
  CHECK(m3::domain(m.declarations)
            .count(m3::parse_location("|java+class://P/ok/Good|")) == 1);
}

TEST_CASE("compose unions two extracted models") {
  fs::path dir = scratch("compose");
  spit(dir / "one" / "A.java", "package a;\nclass A {\n}\n");
  spit(dir / "two" / "B.java", "package b;\nclass B {\n}\n");
  fs::path a = dir / "a.m3";
  fs::path b = dir / "b.m3";
  fs::path fused = dir / "fused.m3";

  REQUIRE(m3_run({"extract", (dir / "one").string(), "P", "-o", a.string()})
              .code == 0);
  REQUIRE(m3_run({"extract", (dir / "two").string(), "P", "-o", b.string()})
              .code == 0);
  Run run = m3_run({"compose", a.string(), b.string(), "-o", fused.string()});
  CHECK(run.code == 0);

  m3::Model m = m3::read_model(slurp(fused));
  CHECK(m.id.scheme() == "file");
  CHECK(m.id.path().back() == "fused.m3");
  CHECK(m.containment.contains(m3::parse_location("|java+class://P/a/A|"),
                               m3::parse_location("|java+package://P/a|")));
  CHECK(m.containment.contains(m3::parse_location("|java+class://P/b/B|"),
                               m3::parse_location("|java+package://P/b|")));
}

TEST_CASE("link rebinds external references to their declaring model") {
  fs::path dir = scratch("link");
  fs::path a = dir / "a.m3";
  fs::path b = dir / "b.m3";
  fs::path linked = dir / "linked.m3";

  REQUIRE(m3_run({"extract", TESTS_DATA_DIR "/linkfix/projA", "projA", "-o",
                  a.string()})
              .code == 0);
  REQUIRE(m3_run({"extract", TESTS_DATA_DIR "/linkfix/projB", "projB", "-o",
                  b.string()})
              .code == 0);
  Run run = m3_run({"link", a.string(), b.string(), "-o", linked.string()});
  CHECK(run.code == 0);

  std::string bytes = slurp(linked);
  m3::Model m = m3::read_model(bytes);
  m3::SourceLocation bound =
      m3::parse_location("|java+class://projB/java/util/List|");
  CHECK(m3::range(m.uses).count(bound) == 1);
  CHECK(m.declared_types.at(m3::parse_location(
            "|java+field://projA/app/Registry/items|")) ==
        m3::TypeSymbol::class_type(bound, {}));
  CHECK(bytes.find("java+class://projA/java/util/List") == std::string::npos);
}

TEST_CASE("query prints sorted image lines") {
  Run run = m3_run({"query", corpus_model().string(), "containment",
                    "--inverse", "|java+package://demo/shapes|"});
  CHECK(run.code == 0);
  CHECK(run.out ==
        "|java+class://demo/shapes/Rect|\n"
        "|java+class://demo/shapes/Square|\n"
        "|java+interface://demo/shapes/Movable|\n"
        "|java+interface://demo/shapes/Scalable|\n"
        "|java+interface://demo/shapes/Shape|\n");
}

TEST_CASE("query closure walks the whole hierarchy") {
  Run run = m3_run({"query", corpus_model().string(), "inheritance",
                    "--closure", "|java+class://demo/shapes/Square|"});
  CHECK(run.code == 0);
  CHECK(run.out ==
        "|java+class://demo/shapes/Rect|\n"
        "|java+interface://demo/shapes/Movable|\n"
        "|java+interface://demo/shapes/Scalable|\n"
        "|java+interface://demo/shapes/Shape|\n");
}

TEST_CASE("query failure modes map to exit codes") {
  CHECK(m3_run({"query", corpus_model().string(), "flow",
                "|java+package://demo/shapes|"})
            .code == 1);
  CHECK(m3_run({"query", corpus_model().string(), "containment", "nonsense"})
            .code == 64);
  CHECK(m3_run({"query", "/no/such/model.m3", "containment",
                "|java+package://demo/shapes|"})
            .code == 2);
}

TEST_CASE("metric reports match the golden outputs") {
  std::string model = corpus_model().string();

  Run cc = m3_run({"metric", model, "cc", "--src", TESTS_DATA_DIR "/corpus"});
  CHECK(cc.code == 0);
  CHECK(cc.out == expected("corpus_cc.csv"));

  Run dit = m3_run({"metric", model, "dit"});
  CHECK(dit.code == 0);
  CHECK(dit.err.empty());
  CHECK(dit.out == expected("corpus_dit.csv"));

  Run vol = m3_run({"metric", model, "volume", "--src",
                    TESTS_DATA_DIR "/corpus"});
  CHECK(vol.code == 0);
  CHECK(vol.out == expected("corpus_volume.csv"));

  Run fan = m3_run({"metric", model, "fanout", "--format", "table"});
  CHECK(fan.code == 0);
  CHECK(fan.out == expected("corpus_fanout.txt"));
}

TEST_CASE("metric failure modes map to exit codes") {
  std::string model = corpus_model().string();
  CHECK(m3_run({"metric", model, "cc"}).code == 64);
  CHECK(m3_run({"metric", model, "halstead"}).code == 64);
  CHECK(m3_run({"metric", model, "dit", "--format", "xml"}).code == 64);
  CHECK(m3_run({"metric", model, "volume", "--src", "/no/such/src"}).code ==
        2);
}

TEST_CASE("ast dumps the parsed declaration") {
  Run run = m3_run({"ast", corpus_model().string(),
                    "|java+method://demo/app/Main/describe(Shape)|", "--src",
                    TESTS_DATA_DIR "/corpus"});
  CHECK(run.code == 0);
  CHECK(run.out == expected("describe_ast.txt"));
}

TEST_CASE("ast failure modes map to exit codes") {
  std::string model = corpus_model().string();
  CHECK(m3_run({"ast", model, "not-a-literal", "--src", "/tmp"}).code == 64);
  CHECK(m3_run({"ast", model, "|java+class://demo/shapes/Rect|", "--src",
                scratch("empty_src").string()})
            .code == 2);
  CHECK(m3_run({"ast", model, "|java+class://demo/shapes/Circle|", "--src",
                TESTS_DATA_DIR "/corpus"})
            .code == 1);
}

TEST_CASE("usage errors exit with 64") {
  CHECK(m3_run({}).code == 64);
  CHECK(m3_run({"transmogrify"}).code == 64);
  CHECK(m3_run({"extract", "/tmp"}).code == 64);
  CHECK(m3_run({"--help"}).code == 0);
}
