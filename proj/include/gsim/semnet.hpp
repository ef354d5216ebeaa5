#pragma once

// Thresholded semantic networks and the statistics reported on them.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gsim/simcore.hpp"

namespace gsim {

struct Edge {
  std::string a;  // a < b
  std::string b;
  double weight;
  bool operator==(const Edge&) const = default;
};

// Undirected weighted graph on string labels. Nodes are kept in
// lexicographic order, edges keyed by their ordered endpoint pair; weights lie
// in (0, 1]. Isolated nodes are kept.
class SemanticNetwork {
 public:
  using EdgeKey = std::pair<std::string, std::string>;

  SemanticNetwork() = default;
  // Validates: no self-loops, no duplicate unordered pairs, weights in (0,1],
  // endpoints among `nodes`. Endpoints may be given in either order.
  SemanticNetwork(std::vector<std::string> nodes, const std::vector<Edge>& edges,
                  std::string provenance = {});

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::map<EdgeKey, double>& edges() const noexcept { return edges_; }
  const std::string& provenance() const noexcept { return provenance_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_node(const std::string& label) const;
  std::optional<double> weight(const std::string& u, const std::string& v) const;
  std::vector<Edge> edge_list() const;

  // Same nodes and edges with bitwise equal weights; provenance ignored.
  bool operator==(const SemanticNetwork& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

  static EdgeKey key(const std::string& u, const std::string& v) {
    return u < v ? EdgeKey{u, v} : EdgeKey{v, u};
  }

 private:
  std::vector<std::string> nodes_;
  std::map<EdgeKey, double> edges_;
  std::string provenance_;
};

// Edge (i, j) with weight theta_ij for every pair i < j with theta_ij >= tau.
// Throws std::invalid_argument unless 0 < tau < 1 and theta is attribute-mode.
SemanticNetwork threshold_network(const SimilarityMatrix& theta, double tau);

// |E| / (n (n - 1) / 2); throws std::invalid_argument below 2 nodes.
double density(const SemanticNetwork& network);

struct NodeDegree {
  std::string label;
  std::size_t degree;
  double strength;
};

// Sorted by degree descending, then label.
std::vector<NodeDegree> degree_report(const SemanticNetwork& network);

// Externally supplied cluster assignment.
class PartitionMap {
 public:
  PartitionMap() = default;
  explicit PartitionMap(std::map<std::string, std::string> assignments);
  const std::map<std::string, std::string>& assignments() const noexcept { return assignments_; }
  const std::string* cluster_of(const std::string& label) const;

 private:
  std::map<std::string, std::string> assignments_;
};

// CSV `label,cluster`, optional `label,cluster` header. Labels are normalized
// like ingest labels; cluster names are trimmed.
PartitionMap read_partition(std::istream& in);

struct Bridge {
  std::string label;
  std::string cluster;                    // the node's own cluster
  std::set<std::string> adjacent_clusters;  // clusters of its neighbors
};

// Nodes whose neighbors fall in at least two distinct clusters, ordered by
// the number of such clusters (descending) then label. Throws ValidationError
// listing nodes missing from the partition.
std::vector<Bridge> bridge_report(const SemanticNetwork& network, const PartitionMap& partition);

void write_degree_csv(std::ostream& out, const std::vector<NodeDegree>& degrees);
void write_bridge_csv(std::ostream& out, const std::vector<Bridge>& bridges);

}  // namespace gsim
