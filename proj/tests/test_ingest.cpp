#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "gsim/error.hpp"
#include "gsim/ingest.hpp"
#include "gsim/synthetic.hpp"

using namespace gsim;

namespace {

BipartitePairs parse(const std::string& s, DelimiterConfig fmt = {}) {
  std::istringstream in(s);
  return parse_pairs(in, fmt, "test");
}

std::vector<std::string> attributes_of(const BipartitePairs& p) {
  std::vector<std::string> out;
  for (const auto& r : p.records())
    if (std::find(out.begin(), out.end(), r.attribute) == out.end()) out.push_back(r.attribute);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("parse_pairs collapses duplicate declarations") {
  auto p = parse("u1,self-injury\nu1,self-injury\nu2,poetry\n");
  CHECK(p.actor_count() == 2);
  CHECK(p.attribute_count() == 2);
  CHECK(p.records().size() == 2);
}

TEST_CASE("parse_pairs case-folds labels") {
  auto p = parse("u1,Self-Injury\nu2,self-injury\n");
  CHECK(p.attribute_count() == 1);
  CHECK(p.records()[0].attribute == "self-injury");
}

TEST_CASE("spelling variants stay distinct") {
  auto p = parse("u1,self-injury\nu1,self injury\n");
  CHECK(p.attribute_count() == 2);
}

TEST_CASE("parse_pairs errors") {
  SUBCASE("wrong field count names the line") {
    try {
      parse("u1,a\nu2,b\nu3,c,d\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(parse(""), ParseError); }
  SUBCASE("blank lines only") { CHECK_THROWS_AS(parse("\n  \n"), ParseError); }
  SUBCASE("empty label") { CHECK_THROWS_AS(parse("u1, \n"), ParseError); }
}

TEST_CASE("parse_pairs honours delimiter and header options") {
  auto p = parse("actor\tinterest\nu1\tgoth, industrial\r\nu2\tpoetry\n", {'\t', true});
  CHECK(p.records().size() == 2);
  CHECK(p.records()[0].attribute == "goth, industrial");
}

TEST_CASE("top_k_attributes") {
  // a:3, b:2, c:2 distinct actors
  auto p = parse("u1,a\nu2,a\nu3,a\nu1,b\nu2,b\nu1,c\nu3,c\nu3,c\n");
  SUBCASE("lexicographic tie-break") {
    CHECK(attributes_of(top_k_attributes(p, 2)) == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("k beyond vocabulary keeps everything") {
    CHECK(top_k_attributes(p, 50).records().size() == p.records().size());
  }
  SUBCASE("k = 0 is rejected") { CHECK_THROWS_AS(top_k_attributes(p, 0), std::invalid_argument); }
  SUBCASE("retains exactly min(k, vocabulary)") {
    for (std::size_t k = 1; k <= 4; ++k)
      CHECK(top_k_attributes(p, k).attribute_count() == std::min<std::size_t>(k, 3));
  }
}

TEST_CASE("top_k_attributes at vocabulary scale") {
  // 150,000 attribute labels; frequencies descend with the index.
  std::vector<Declaration> raw;
  for (std::size_t j = 0; j < 150000; ++j) {
    const std::size_t actors = j < 1000 ? 3 : 1;
    for (std::size_t a = 0; a < actors; ++a)
      raw.push_back({"u" + std::to_string((j + a) % 5000), "i" + std::to_string(j)});
  }
  BipartitePairs p(raw, "big");
  CHECK(p.attribute_count() == 150000);
  CHECK(top_k_attributes(p, 600).attribute_count() == 600);
}

TEST_CASE("build_incidence orders rows and columns") {
  auto b = build_incidence(parse("u1,b\nu2,a\nu3,a\n"));
  CHECK(b.dropped.empty());
  CHECK(b.matrix.actor_labels() == std::vector<std::string>{"u1", "u2", "u3"});
  CHECK(b.matrix.attribute_labels() == std::vector<std::string>{"a", "b"});
  CHECK(std::vector<std::uint8_t>(b.matrix.entries().begin(), b.matrix.entries().end()) ==
        std::vector<std::uint8_t>{0, 1, 1, 0, 1, 0});
}

TEST_CASE("build_incidence sorts columns by frequency") {
  auto b = build_incidence(parse("u1,z\nu2,z\nu3,z\nu1,y\nu2,y\nu4,x\nu3,x\n"));
  CHECK(b.matrix.attribute_labels() == std::vector<std::string>{"z", "x", "y"});
}

TEST_CASE("build_incidence drops an all-ones actor") {
  auto b = build_incidence(parse("u1,a\nu2,b\nu3,c\nu3,a\nu4,a\nu4,b\nu4,c\n"));
  CHECK(b.matrix.actors() == 3);
  REQUIRE(b.dropped.size() == 1);
  CHECK(b.dropped[0].label == "u4");
  CHECK(b.dropped[0].all_ones);
  CHECK(format_drop_report(b.dropped) == "actor u4: all-ones (round 1)\n");
}

TEST_CASE("constant removal cascades") {
  // c is declared by everyone -> dropped; u3 then only has c left -> all-zeros.
  auto b = build_incidence(parse("u1,a\nu1,c\nu2,b\nu2,c\nu3,c\nu4,a\nu4,b\nu4,c\nu5,a\nu5,c\n"));
  bool u3_dropped = false;
  for (const auto& d : b.dropped)
    if (d.label == "u3") {
      u3_dropped = true;
      CHECK(d.round == 2);
      CHECK_FALSE(d.all_ones);
    }
  CHECK(u3_dropped);
  for (std::size_t i = 0; i < b.matrix.actors(); ++i) {
    auto r = b.matrix.row(i);
    const auto ones = std::count(r.begin(), r.end(), 1);
    CHECK(ones > 0);
    CHECK(static_cast<std::size_t>(ones) < b.matrix.attributes());
  }
}

TEST_CASE("degenerate dataset") {
  CHECK_THROWS_WITH_AS(build_incidence(parse("u1,a\nu2,a\n")), "degenerate dataset", ValidationError);
  CHECK_THROWS_AS(build_incidence(BipartitePairs{}), std::invalid_argument);
}

TEST_CASE("IncidenceMatrix rejects invariant violations") {
  CHECK_THROWS_AS(IncidenceMatrix({1, 0, 1, 0}, {"u1", "u2"}, {"a", "b"}), ValidationError);
  CHECK_THROWS_AS(IncidenceMatrix({1, 0, 0, 1}, {"u1", "u1"}, {"a", "b"}), ValidationError);
  CHECK_THROWS_AS(IncidenceMatrix({2, 0, 0, 1}, {"u1", "u2"}, {"a", "b"}), ValidationError);
  CHECK_NOTHROW(IncidenceMatrix({1, 0, 0, 1}, {"u1", "u2"}, {"a", "b"}));
}

TEST_CASE("build_incidence is idempotent under re-serialization") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PlantedBlocks spec{60, 30, 3, 0.4, 0.1, seed};
    auto first = build_incidence(generate_planted(spec).pairs);
    auto second = build_incidence(first.matrix.to_pairs());
    CHECK(second.dropped.empty());
    CHECK(second.matrix == first.matrix);
    std::ostringstream text;
    write_pairs(text, first.matrix.to_pairs());
    std::istringstream back(text.str());
    CHECK(build_incidence(parse_pairs(back)).matrix == first.matrix);
  }
}

TEST_CASE("paper-scale incidence builds") {
  PlantedBlocks spec{14000, 600, 4, 0.2, 0.05, 3};
  auto b = build_incidence(generate_planted(spec).pairs);
  CHECK(b.matrix.actors() == 14000);
  CHECK(b.matrix.attributes() == 600);
}
