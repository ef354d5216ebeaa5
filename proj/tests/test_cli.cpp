#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "gsim/graphio.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using gsim::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("gsim_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Small pipeline on planted data; returns the produced network path.
std::string pipeline(const TempDir& d, const std::string& tag, std::vector<std::string> sim_extra = {}) {
  const auto pairs = d / (tag + "pairs.csv"), inc = d / (tag + "inc.csv"),
             theta = d / (tag + "theta.gsim"), net = d / (tag + "net.csv");
  REQUIRE(invoke({"generate", "-o", pairs, "--actors", "120", "--attributes", "24", "--blocks",
                  "3", "--p-in", "0.5", "--p-out", "0.05", "--seed", "3"})
              .code == 0);
  REQUIRE(invoke({"ingest", pairs, "-o", inc}).code == 0);
  std::vector<std::string> sim{"similarity", inc, "-o", theta, "--phi", d / (tag + "phi.gsim")};
  sim.insert(sim.end(), sim_extra.begin(), sim_extra.end());
  auto r = invoke(sim);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  REQUIRE(invoke({"threshold", theta, "-o", net}).code == 0);
  return net;
}

}  // namespace

TEST_CASE("end-to-end pipeline") {
  TempDir d;
  const auto net = pipeline(d, "");
  auto manifest = nlohmann::json::parse(slurp(d / "inc.csv.manifest.json"));
  CHECK(manifest["command"] == "ingest");
  CHECK(manifest["config"]["top_k"] == 600);
  CHECK(manifest["inputs"][0]["sha256"] == gsim::cli::file_sha256(d / "pairs.csv"));
  CHECK(manifest["outputs"][0]["sha256"] == gsim::cli::file_sha256(d / "inc.csv"));

  auto tm = nlohmann::json::parse(slurp(net + ".manifest.json"));
  CHECK(tm["config"]["tau"] == 0.8);

  auto report = nlohmann::json::parse(slurp(d / "theta.gsim.convergence.json"));
  CHECK(report["terminated_by"] == "tolerance");

  auto s = invoke({"stats", net});
  REQUIRE(s.code == 0);
  auto js = nlohmann::json::parse(s.out);
  CHECK(js["node_count"] == 24);
  CHECK(js["edge_count"].get<int>() > 0);

  CHECK(invoke({"export", d / "theta.gsim", "-o", d / "theta.csv"}).code == 0);
  CHECK(invoke({"export", net, "-o", d / "net.gexf"}).code == 0);
  std::ifstream g(d / "net.gexf");
  auto from_gexf = gsim::read_network(g, gsim::NetworkFormat::gexf);
  std::ifstream e(net);
  CHECK(from_gexf == gsim::read_network(e, gsim::NetworkFormat::edgelist));

  CHECK(invoke({"degrees", net, "-o", d / "deg.csv"}).code == 0);
  CHECK(invoke({"intersect", net, d / "net.gexf", "-o", d / "i.csv"}).code == 0);
  CHECK(slurp(d / "i.csv") == slurp(net));
  CHECK(invoke({"subtract", net, net, "-o", d / "s.csv"}).code == 0);
}

TEST_CASE("reruns are byte-identical") {
  TempDir d;
  const auto a = pipeline(d, "a_"), b = pipeline(d, "b_", {"--workers", "3"});
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(d / "a_theta.gsim") == slurp(d / "b_theta.gsim"));
  CHECK(slurp(d / "a_phi.gsim") == slurp(d / "b_phi.gsim"));
}

TEST_CASE("iteration cap is reported") {
  TempDir d;
  pipeline(d, "", {"--max-iterations", "1"});
  auto report = nlohmann::json::parse(slurp(d / "theta.gsim.convergence.json"));
  CHECK(report["iterations"] == 1);
  CHECK(report["terminated_by"] == "max_iterations");
}

TEST_CASE("malformed input names the line") {
  TempDir d;
  std::string text;
  for (int i = 1; i <= 16; ++i) text += "u" + std::to_string(i) + ",t" + std::to_string(i % 3) + "\n";
  text += "u17 has no comma\n";
  spit(d / "bad.csv", text);
  auto r = invoke({"ingest", d / "bad.csv", "-o", d / "inc.csv"});
  CHECK(r.code != 0);
  CHECK(r.err.find("line 17") != std::string::npos);
  CHECK_FALSE(fs::exists(d / "inc.csv"));
}

TEST_CASE("bridges and truth partition") {
  TempDir d;
  REQUIRE(invoke({"generate", "-o", d / "p.csv", "--actors", "60", "--attributes", "12", "--blocks",
                  "2", "--truth", d / "truth.csv"})
              .code == 0);
  spit(d / "net.csv", "a00,a06,0.9\na00,a01,0.85\n");
  auto r = invoke({"bridges", d / "net.csv", "--partition", d / "truth.csv"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("a00") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == gsim::cli::kUsage);
  CHECK(invoke({"frobnicate"}).code == gsim::cli::kUsage);
  TempDir d;
  spit(d / "x.csv", "a,b,0.5\n");
  CHECK(invoke({"threshold", d / "missing.gsim", "-o", d / "n.csv"}).code == gsim::cli::kData);
  CHECK(invoke({"stats", d / "x.csv", "--format", "graphml"}).code != 0);
  CHECK(invoke({"--version"}).out.find(gsim::cli::kToolVersion) != std::string::npos);
}
