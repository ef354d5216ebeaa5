#pragma once

// Fuzzy-set combination of semantic networks from two populations. An edge
// absent from a network has weight 0; zero-weight results are not stored.

#include <set>
#include <string>

#include "gsim/semnet.hpp"

namespace gsim {

struct NetworkAlignment {
  std::set<std::string> shared_nodes;
  std::set<std::string> only_a;
  std::set<std::string> only_b;
};

// Exact label matching.
NetworkAlignment align(const SemanticNetwork& a, const SemanticNetwork& b);

// Shared nodes; edges present in both with weight min(alpha, beta).
SemanticNetwork intersect(const SemanticNetwork& a, const SemanticNetwork& b);

// Nodes of a; each edge of a keeps weight alpha when absent from b and gets
// min(alpha, 1 - beta) otherwise. Edges only in b never appear.
SemanticNetwork subtract(const SemanticNetwork& a, const SemanticNetwork& b);

}  // namespace gsim
