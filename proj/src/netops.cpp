#include "gsim/netops.hpp"

#include <algorithm>
#include <vector>

namespace gsim {
namespace {

std::string describe(const SemanticNetwork& n) {
  return n.provenance().empty() ? "<unnamed>" : n.provenance();
}

}  // namespace

NetworkAlignment align(const SemanticNetwork& a, const SemanticNetwork& b) {
  NetworkAlignment out;
  const auto& na = a.nodes();
  const auto& nb = b.nodes();  // both sorted
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                        std::inserter(out.shared_nodes, out.shared_nodes.end()));
  std::set_difference(na.begin(), na.end(), nb.begin(), nb.end(),
                      std::inserter(out.only_a, out.only_a.end()));
  std::set_difference(nb.begin(), nb.end(), na.begin(), na.end(),
                      std::inserter(out.only_b, out.only_b.end()));
  return out;
}

SemanticNetwork intersect(const SemanticNetwork& a, const SemanticNetwork& b) {
  const auto alignment = align(a, b);
  std::vector<Edge> edges;
  for (const auto& [k, alpha] : a.edges()) {
    auto beta = b.weight(k.first, k.second);
    if (!beta) continue;
    edges.push_back({k.first, k.second, std::min(alpha, *beta)});
  }
  return SemanticNetwork({alignment.shared_nodes.begin(), alignment.shared_nodes.end()}, edges,
                         "intersect(" + describe(a) + "; " + describe(b) + ")");
}

SemanticNetwork subtract(const SemanticNetwork& a, const SemanticNetwork& b) {
  std::vector<Edge> edges;
  for (const auto& [k, alpha] : a.edges()) {
    double w = alpha;
    if (auto beta = b.weight(k.first, k.second)) w = std::min(alpha, 1.0 - *beta);
    if (w > 0.0) edges.push_back({k.first, k.second, w});
  }
  return SemanticNetwork(a.nodes(), edges,
                         "subtract(" + describe(a) + "; " + describe(b) + ")");
}

}  // namespace gsim
