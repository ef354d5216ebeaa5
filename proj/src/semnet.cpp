#include "gsim/semnet.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "gsim/error.hpp"
#include "gsim/text.hpp"

namespace gsim {

SemanticNetwork::SemanticNetwork(std::vector<std::string> nodes, const std::vector<Edge>& edges,
                                 std::string provenance)
    : nodes_(std::move(nodes)), provenance_(std::move(provenance)) {
  std::sort(nodes_.begin(), nodes_.end());
  if (auto dup = std::adjacent_find(nodes_.begin(), nodes_.end()); dup != nodes_.end())
    throw ValidationError("duplicate node '" + *dup + "'");
  for (const auto& n : nodes_)
    if (n.empty()) throw ValidationError("empty node label");
  for (const auto& e : edges) {
    const std::string where = "edge (" + e.a + ", " + e.b + ")";
    if (e.a == e.b) throw ValidationError(where + ": self-loop");
    if (!(e.weight > 0.0 && e.weight <= 1.0))
      throw ValidationError(where + ": weight " + text::format_double(e.weight) +
                            " outside (0, 1]");
    if (!has_node(e.a) || !has_node(e.b)) throw ValidationError(where + ": unknown endpoint");
    if (!edges_.emplace(key(e.a, e.b), e.weight).second)
      throw ValidationError(where + ": duplicate edge");
  }
}

bool SemanticNetwork::has_node(const std::string& label) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), label);
}

std::optional<double> SemanticNetwork::weight(const std::string& u, const std::string& v) const {
  auto it = edges_.find(key(u, v));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> SemanticNetwork::edge_list() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& [k, w] : edges_) out.push_back({k.first, k.second, w});
  return out;
}

SemanticNetwork threshold_network(const SimilarityMatrix& theta, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  if (theta.mode() != Mode::attribute)
    throw std::invalid_argument("threshold_network needs an attribute-mode matrix");
  const auto& labels = theta.labels();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (std::size_t j = i + 1; j < theta.size(); ++j)
      if (const double v = theta.at(i, j); v >= tau)
        edges.push_back({labels[i], labels[j], std::min(v, 1.0)});
  return SemanticNetwork(labels, edges, "threshold tau=" + text::format_double(tau));
}

double density(const SemanticNetwork& network) {
  const auto n = static_cast<double>(network.node_count());
  if (network.node_count() < 2) throw std::invalid_argument("density needs at least 2 nodes");
  return static_cast<double>(network.edge_count()) / (n * (n - 1) / 2);
}

std::vector<NodeDegree> degree_report(const SemanticNetwork& network) {
  std::unordered_map<std::string, NodeDegree> acc;
  for (const auto& n : network.nodes()) acc.emplace(n, NodeDegree{n, 0, 0.0});
  for (const auto& [k, w] : network.edges()) {
    for (const auto* end : {&k.first, &k.second}) {
      auto& d = acc.at(*end);
      ++d.degree;
      d.strength += w;
    }
  }
  std::vector<NodeDegree> out;
  out.reserve(acc.size());
  for (const auto& n : network.nodes()) out.push_back(acc.at(n));
  std::stable_sort(out.begin(), out.end(), [](const NodeDegree& a, const NodeDegree& b) {
    return a.degree != b.degree ? a.degree > b.degree : a.label < b.label;
  });
  return out;
}

PartitionMap::PartitionMap(std::map<std::string, std::string> assignments)
    : assignments_(std::move(assignments)) {
  for (const auto& [label, cluster] : assignments_) {
    if (label.empty()) throw ValidationError("partition: empty label");
    if (cluster.empty()) throw ValidationError("partition: empty cluster for '" + label + "'");
  }
}

const std::string* PartitionMap::cluster_of(const std::string& label) const {
  auto it = assignments_.find(label);
  return it == assignments_.end() ? nullptr : &it->second;
}

PartitionMap read_partition(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    std::vector<std::string> f;
    try {
      f = text::split_record(line, ',');
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    if (f.size() != 2) throw ParseError("expected label,cluster", lineno);
    if (lineno == 1 && text::casefold(text::trim(f[0])) == "label" &&
        text::casefold(text::trim(f[1])) == "cluster")
      continue;
    std::string label = text::normalize_label(f[0]);
    std::string cluster(text::trim(f[1]));
    if (label.empty() || cluster.empty()) throw ParseError("empty label or cluster", lineno);
    auto [it, fresh] = out.emplace(label, cluster);
    if (!fresh && it->second != cluster)
      throw ParseError("label '" + label + "' assigned to two clusters", lineno);
  }
  return PartitionMap(std::move(out));
}

std::vector<Bridge> bridge_report(const SemanticNetwork& network, const PartitionMap& partition) {
  std::vector<std::string> missing;
  for (const auto& n : network.nodes())
    if (!partition.cluster_of(n)) missing.push_back(n);
  if (!missing.empty()) {
    std::string msg = "nodes without a cluster assignment:";
    for (const auto& m : missing) msg += " " + m;
    throw ValidationError(msg);
  }
  std::unordered_map<std::string, std::set<std::string>> adjacent;
  for (const auto& [k, w] : network.edges()) {
    adjacent[k.first].insert(*partition.cluster_of(k.second));
    adjacent[k.second].insert(*partition.cluster_of(k.first));
  }
  std::vector<Bridge> out;
  for (const auto& n : network.nodes()) {
    auto it = adjacent.find(n);
    if (it == adjacent.end() || it->second.size() < 2) continue;
    out.push_back({n, *partition.cluster_of(n), it->second});
  }
  std::stable_sort(out.begin(), out.end(), [](const Bridge& a, const Bridge& b) {
    return a.adjacent_clusters.size() != b.adjacent_clusters.size()
               ? a.adjacent_clusters.size() > b.adjacent_clusters.size()
               : a.label < b.label;
  });
  return out;
}

void write_degree_csv(std::ostream& out, const std::vector<NodeDegree>& degrees) {
  out << "label,degree,strength\n";
  for (const auto& d : degrees)
    out << text::quote_field(d.label) << ',' << d.degree << ',' << text::format_double(d.strength)
        << '\n';
}

void write_bridge_csv(std::ostream& out, const std::vector<Bridge>& bridges) {
  out << "label,cluster,cluster_count,adjacent_clusters\n";
  for (const auto& b : bridges) {
    std::string joined;
    for (const auto& c : b.adjacent_clusters) joined += (joined.empty() ? "" : ";") + c;
    out << text::quote_field(b.label) << ',' << text::quote_field(b.cluster) << ','
        << b.adjacent_clusters.size() << ',' << text::quote_field(joined) << '\n';
  }
}

}  // namespace gsim
