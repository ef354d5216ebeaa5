#include <sstream>

#include "doctest.h"
#include "gsim/error.hpp"
#include "gsim/semnet.hpp"

using namespace gsim;

namespace {

SimilarityMatrix matrix_with(std::size_t n, double fill,
                             std::initializer_list<std::tuple<std::size_t, std::size_t, double>> set) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("t" + std::to_string(100 + i));
  std::vector<double> up(packed_size(n), fill);
  for (std::size_t i = 0; i < n; ++i) up[packed_index(n, i, i)] = 1.0;
  for (auto [i, j, v] : set) up[packed_index(n, i, j)] = v;
  return SimilarityMatrix::from_packed(labels, Mode::attribute, up);
}

}  // namespace

TEST_CASE("threshold_network") {
  SUBCASE("nothing passes") {
    auto net = threshold_network(matrix_with(5, 0.5, {}), 0.8);
    CHECK(net.edge_count() == 0);
    CHECK(net.node_count() == 5);
  }
  SUBCASE("threshold is inclusive, diagonal excluded") {
    auto net = threshold_network(matrix_with(3, 0.1, {{0, 1, 0.8}, {1, 2, 0.79999}}), 0.8);
    CHECK(net.edge_count() == 1);
    CHECK(net.weight("t100", "t101") == 0.8);
    CHECK(net.provenance().find("0.8") != std::string::npos);
  }
  SUBCASE("tau outside (0,1)") {
    auto m = matrix_with(3, 0.1, {});
    CHECK_THROWS_AS(threshold_network(m, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold_network(m, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold_network(m, -0.2), std::invalid_argument);
  }
  SUBCASE("actor-mode matrices are rejected") {
    auto m = SimilarityMatrix::identity({"a", "b"}, Mode::actor);
    CHECK_THROWS_AS(threshold_network(m, 0.5), std::invalid_argument);
  }
  SUBCASE("monotone in tau, weights within [tau, 1]") {
    auto m = matrix_with(6, 0.0, {{0, 1, 0.55}, {0, 2, 0.65}, {1, 3, 0.75}, {2, 4, 0.85},
                                  {3, 5, 0.95}, {4, 5, 1.0}});
    std::size_t prev = 100;
    for (double tau : {0.5, 0.6, 0.7, 0.8, 0.9}) {
      auto net = threshold_network(m, tau);
      CHECK(net.edge_count() <= prev);
      prev = net.edge_count();
      for (const auto& [k, w] : net.edges()) {
        CHECK(w >= tau);
        CHECK(w <= 1.0);
      }
    }
  }
}

TEST_CASE("density") {
  std::vector<Edge> k4;
  const std::vector<std::string> n{"a", "b", "c", "d"};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) k4.push_back({n[i], n[j], 0.9});
  CHECK(density(SemanticNetwork(n, k4)) == 1.0);
  CHECK(density(SemanticNetwork(n, {})) == 0.0);
  CHECK_THROWS_AS(density(SemanticNetwork({"a"}, {})), std::invalid_argument);

  // 600 nodes and 21,000 edges round to the reported 12%.
  std::vector<std::string> big;
  for (int i = 0; i < 600; ++i) big.push_back("n" + std::to_string(1000 + i));
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < 600 && edges.size() < 21000; ++i)
    for (std::size_t j = i + 1; j < 600 && edges.size() < 21000; ++j) edges.push_back({big[i], big[j], 0.9});
  const double d = density(SemanticNetwork(big, edges));
  CHECK(d == doctest::Approx(21000.0 / 179700.0));
  CHECK(d == doctest::Approx(0.1168).epsilon(1e-3));
}

TEST_CASE("SemanticNetwork invariants") {
  CHECK_THROWS_AS(SemanticNetwork({"a", "b"}, {{"a", "a", 0.9}}), ValidationError);
  CHECK_THROWS_AS(SemanticNetwork({"a", "b"}, {{"a", "b", 0.9}, {"b", "a", 0.8}}), ValidationError);
  CHECK_THROWS_AS(SemanticNetwork({"a", "b"}, {{"a", "b", 0.0}}), ValidationError);
  CHECK_THROWS_AS(SemanticNetwork({"a", "b"}, {{"a", "b", 1.5}}), ValidationError);
  CHECK_THROWS_AS(SemanticNetwork({"a", "b"}, {{"a", "c", 0.5}}), ValidationError);
  CHECK_THROWS_AS(SemanticNetwork({"a", "a"}, {}), ValidationError);
  SemanticNetwork net({"b", "a"}, {{"b", "a", 0.5}});
  CHECK(net.nodes() == std::vector<std::string>{"a", "b"});
  CHECK(net.edge_list()[0] == Edge{"a", "b", 0.5});
}

TEST_CASE("degree_report") {
  SUBCASE("single edge") {
    auto d = degree_report(SemanticNetwork({"a", "b", "z"}, {{"a", "b", 0.9}}));
    REQUIRE(d.size() == 3);
    CHECK(d[0].label == "a");
    CHECK(d[0].degree == 1);
    CHECK(d[0].strength == 0.9);
    CHECK(d[1].label == "b");
    CHECK(d[1].strength == 0.9);
    CHECK(d[2].label == "z");
    CHECK(d[2].degree == 0);
    CHECK(d[2].strength == 0.0);
  }
  SUBCASE("triangle") {
    auto d = degree_report(
        SemanticNetwork({"x", "y", "z"}, {{"x", "y", 0.8}, {"y", "z", 0.9}, {"x", "z", 1.0}}));
    for (const auto& n : d) CHECK(n.degree == 2);
    CHECK(d[0].strength == doctest::Approx(1.8));
    CHECK(d[1].strength == doctest::Approx(1.7));
    CHECK(d[2].strength == doctest::Approx(1.9));
  }
}

namespace {

// x in PAT touches PAT and DLE; hub touches all four clusters; m1/m2 are MUS only.
SemanticNetwork bridge_fixture() {
  return SemanticNetwork(
      {"x", "p1", "d1", "hub", "m1", "m2", "c1"},
      {{"x", "p1", 0.9}, {"x", "d1", 0.85}, {"hub", "m1", 0.8}, {"hub", "p1", 0.8},
       {"hub", "d1", 0.8}, {"hub", "c1", 0.8}, {"m1", "m2", 0.95}});
}

PartitionMap fixture_partition(std::string mus = "MUS", std::string pat = "PAT",
                               std::string dle = "DLE", std::string cre = "CRE") {
  return PartitionMap({{"x", pat}, {"p1", pat}, {"d1", dle}, {"hub", mus}, {"m1", mus},
                       {"m2", mus}, {"c1", cre}});
}

}  // namespace

TEST_CASE("bridge_report") {
  auto b = bridge_report(bridge_fixture(), fixture_partition());
  REQUIRE(b.size() >= 2);
  CHECK(b[0].label == "hub");
  CHECK(b[0].adjacent_clusters == std::set<std::string>{"MUS", "PAT", "DLE", "CRE"});
  bool saw_x = false;
  for (const auto& r : b) {
    if (r.label == "x") {
      saw_x = true;
      CHECK(r.adjacent_clusters == std::set<std::string>{"PAT", "DLE"});
    }
    CHECK(r.label != "m2");  // all neighbours in its own cluster
  }
  CHECK(saw_x);
}

TEST_CASE("bridge_report is invariant under cluster renaming") {
  auto a = bridge_report(bridge_fixture(), fixture_partition());
  auto b = bridge_report(bridge_fixture(), fixture_partition("k1", "k2", "k3", "k4"));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK(a[i].adjacent_clusters.size() == b[i].adjacent_clusters.size());
  }
}

TEST_CASE("bridge_report requires a complete partition") {
  try {
    bridge_report(bridge_fixture(), PartitionMap(std::map<std::string, std::string>{{"x", "PAT"}}));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("hub") != std::string::npos);
  }
}

TEST_CASE("read_partition") {
  std::istringstream in("label,cluster\nSelf-Injury,PAT\n\"goth, industrial\",MUS\n");
  auto p = read_partition(in);
  REQUIRE(p.cluster_of("self-injury"));
  CHECK(*p.cluster_of("self-injury") == "PAT");
  CHECK(*p.cluster_of("goth, industrial") == "MUS");
  std::istringstream bad("a,PAT\na,MUS\n");
  CHECK_THROWS_AS(read_partition(bad), ParseError);
  std::istringstream short_line("a\n");
  CHECK_THROWS_AS(read_partition(short_line), ParseError);
}
