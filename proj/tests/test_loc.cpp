#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "m3/loc.hpp"

using m3::Region;
using m3::SchemeRegistry;
using m3::SourceLocation;

TEST_CASE("documented literals parse to their field values") {
  SourceLocation hello = m3::parse_location("|file:///tmp/Hello.java|");
  CHECK(hello.scheme() == "file");
  CHECK(hello.authority().empty());
  CHECK(hello.path() == std::vector<std::string>{"tmp", "Hello.java"});
  CHECK(hello.query().empty());
  CHECK_FALSE(hello.region().has_value());

  SourceLocation list =
      m3::parse_location("|java+class://myProject/java/util/List|");
  CHECK(list.scheme() == "java+class");
  CHECK(list.authority() == "myProject");
  CHECK(list.path() == std::vector<std::string>{"java", "util", "List"});

  SourceLocation pinned =
      m3::parse_location("|class://myPrj/java/util/List?svn=4242|");
  CHECK(pinned.scheme() == "class");
  CHECK(pinned.query() ==
        std::map<std::string, std::string>{{"svn", "4242"}});
}

TEST_CASE("canonical printing") {
  SourceLocation hello("file", "", {"tmp", "Hello.java"});
  CHECK(hello.to_string() == "|file:///tmp/Hello.java|");

  SourceLocation sliced("file", "", {"x"}, {}, Region{0, 0});
  CHECK(sliced.to_string() == "|file:///x|(0,0)");

  SourceLocation spaced("file", "", {"a b"});
  CHECK(spaced.to_string() == "|file:///a%20b|");
  CHECK(m3::parse_location(spaced.to_string()) == spaced);

  SourceLocation queried("class", "p", {"A"},
                         {{"b", "2"}, {"a", "1"}}, std::nullopt);
  CHECK(queried.to_string() == "|class://p/A?a=1&b=2|");
}

TEST_CASE("malformed literals are rejected") {
  for (const char* bad :
       {"||", "|x|", "file:///x", "|file:///x", "|file:///x|(1)",
        "|file:///x|(a,b)", "|://a/b|", "|file:///x|(1,2", ""}) {
    CHECK_THROWS_AS(m3::parse_location(bad), m3::MalformedLocation);
  }
}

TEST_CASE("parse of printed form is the identity on generated locations") {
  testgen::Rng rng(7001);
  for (int i = 0; i < 2000; ++i) {
    SourceLocation loc = testgen::location(rng);
    SourceLocation back = m3::parse_location(loc.to_string());
    REQUIRE(back == loc);
    REQUIRE(back.to_string() == loc.to_string());
  }
}

TEST_CASE("printed form of any parseable literal is a print fixpoint") {
  for (const char* text :
       {"|file:///tmp/Hello.java|", "|class://myPrj/a?x=1|(3,4)",
        "|java+method://p/foo/Bar/run()|"}) {
    std::string once = m3::parse_location(text).to_string();
    CHECK(m3::parse_location(once).to_string() == once);
  }
}

TEST_CASE("scheme classification") {
  SchemeRegistry reg = SchemeRegistry::defaults();
  CHECK(reg.is_logical(m3::parse_location("|java+class://p/a/B|")));
  CHECK_FALSE(reg.is_logical(m3::parse_location("|file:///x|")));
  CHECK(reg.is_logical(m3::parse_location("|class:///foo/Bar|")));
  CHECK_THROWS_AS(reg.is_logical(m3::parse_location("|gopher://x|")),
                  m3::UnknownScheme);
}

TEST_CASE("with_authority replaces only the authority") {
  SourceLocation loc = m3::parse_location("|java+class://projA/foo/Bar|");
  SourceLocation moved = loc.with_authority("projB");
  CHECK(moved.to_string() == "|java+class://projB/foo/Bar|");
  CHECK(loc.to_string() == "|java+class://projA/foo/Bar|");
  CHECK(loc.with_authority(loc.authority()) == loc);
  CHECK(loc.with_authority("a").with_authority("b") ==
        loc.with_authority("b"));

  SourceLocation file = m3::parse_location("|file:///x|");
  CHECK(file.with_authority("host").to_string() == "|file://host/x|");
}

TEST_CASE("ordering and hashing are usable for sets") {
  testgen::Rng rng(7002);
  std::set<SourceLocation> locations;
  std::unordered_set<SourceLocation> hashed;
  for (int i = 0; i < 200; ++i) {
    SourceLocation loc = testgen::location(rng);
    locations.insert(loc);
    hashed.insert(loc);
  }
  CHECK(locations.size() == hashed.size());
}

TEST_CASE("region accessors") {
  SourceLocation loc("file", "", {"x"}, {}, Region{10, 5});
  CHECK(loc.region()->offset == 10);
  CHECK(loc.region()->length == 5);
  CHECK_FALSE(loc.without_region().region().has_value());
  CHECK(loc.with_region(Region{1, 2}).region()->offset == 1);
  CHECK(loc.without_region().with_region(Region{10, 5}) == loc);
}
