#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "m3/rel.hpp"

using m3::LocPair;
using m3::LocSet;
using m3::Relation;
using m3::SourceLocation;

namespace {

SourceLocation L(const std::string& name) {
  return SourceLocation("java+class", "t", {name});
}

Relation rel(std::initializer_list<std::pair<std::string, std::string>> ps) {
  std::set<LocPair> pairs;
  for (const auto& [a, b] : ps) pairs.emplace(L(a), L(b));
  return Relation(std::move(pairs));
}

// Iterated-compose fixpoint, the oracle for transitive_closure.
Relation closure_oracle(const Relation& r) {
  Relation acc = r;
  while (true) {
    Relation next = m3::union_of(acc, m3::compose(acc, r));
    if (next == acc) return acc;
    acc = std::move(next);
  }
}

}  // namespace

TEST_CASE("union basics") {
  CHECK(m3::union_of(rel({{"a", "b"}}), rel({{"b", "c"}})) ==
        rel({{"a", "b"}, {"b", "c"}}));
  Relation r = rel({{"a", "b"}, {"c", "d"}});
  CHECK(m3::union_of(r, r) == r);
  CHECK(m3::union_of(r, Relation()) == r);
}

TEST_CASE("compose basics") {
  CHECK(m3::compose(rel({{"a", "b"}}), rel({{"b", "c"}})) ==
        rel({{"a", "c"}}));
  CHECK(m3::compose(rel({{"a", "b"}}), rel({{"x", "c"}})) == Relation());
  CHECK(m3::compose(Relation(), rel({{"a", "b"}})) == Relation());
}

TEST_CASE("transitive closure basics") {
  CHECK(m3::transitive_closure(Relation()) == Relation());
  CHECK(m3::transitive_closure(rel({{"a", "b"}, {"b", "c"}})) ==
        rel({{"a", "b"}, {"b", "c"}, {"a", "c"}}));
  Relation cyclic = rel({{"a", "b"}, {"b", "a"}});
  CHECK(m3::transitive_closure(cyclic) ==
        rel({{"a", "b"}, {"b", "a"}, {"a", "a"}, {"b", "b"}}));
}

TEST_CASE("image and inverse") {
  Relation r = rel({{"a", "b"}, {"a", "c"}, {"d", "e"}});
  CHECK(m3::image(r, L("a")) == LocSet{L("b"), L("c")});
  CHECK(m3::image(r, L("z")).empty());
  CHECK(m3::inverse(rel({{"a", "b"}})) == rel({{"b", "a"}}));
  CHECK(m3::inverse(m3::inverse(r)) == r);
}

TEST_CASE("domain, range, restriction, difference") {
  Relation r = rel({{"a", "b"}, {"c", "d"}});
  CHECK(m3::domain(r) == LocSet{L("a"), L("c")});
  CHECK(m3::range(r) == LocSet{L("b"), L("d")});
  CHECK(m3::carrier(r) == LocSet{L("a"), L("b"), L("c"), L("d")});
  CHECK(m3::restrict_domain(r, {L("a")}) == rel({{"a", "b"}}));
  CHECK(m3::restrict_range(r, {L("d")}) == rel({{"c", "d"}}));
  CHECK(m3::difference(r, r) == Relation());
  CHECK(m3::difference(r, rel({{"a", "b"}})) == rel({{"c", "d"}}));
}

TEST_CASE("operations leave inputs unchanged") {
  Relation r = rel({{"a", "b"}});
  Relation s = rel({{"b", "c"}});
  m3::union_of(r, s);
  m3::compose(r, s);
  m3::transitive_closure(r);
  m3::inverse(r);
  CHECK(r == rel({{"a", "b"}}));
  CHECK(s == rel({{"b", "c"}}));
}

TEST_CASE("closure equals iterated-compose fixpoint on random relations") {
  testgen::Rng rng(7101);
  auto pool = testgen::pool(rng, 12);
  for (int i = 0; i < 300; ++i) {
    Relation r = testgen::relation(rng, pool, 20);
    REQUIRE(m3::transitive_closure(r) == closure_oracle(r));
  }
}

TEST_CASE("algebraic laws on random relations") {
  testgen::Rng rng(7102);
  auto pool = testgen::pool(rng, 10);
  for (int i = 0; i < 150; ++i) {
    Relation r = testgen::relation(rng, pool, 20);
    Relation s = testgen::relation(rng, pool, 20);
    Relation t = testgen::relation(rng, pool, 20);

    CHECK(m3::compose(m3::compose(r, s), t) ==
          m3::compose(r, m3::compose(s, t)));
    CHECK(m3::union_of(r, s) == m3::union_of(s, r));
    CHECK(m3::union_of(m3::union_of(r, s), t) ==
          m3::union_of(r, m3::union_of(s, t)));
    CHECK(m3::union_of(r, r) == r);

    Relation tc = m3::transitive_closure(r);
    CHECK(m3::transitive_closure(tc) == tc);
    CHECK(m3::union_of(tc, r) == tc);

    for (const auto& [from, to] : r) {
      CHECK(m3::image(r, from) ==
            m3::range(m3::restrict_domain(r, {from})));
    }
  }
}
