#pragma once

// File formats: GEXF 1.2 and CSV edge lists for networks, JSON network
// statistics, and the GSIM binary format for similarity matrices.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "gsim/semnet.hpp"
#include "gsim/simcore.hpp"

namespace gsim {

enum class NetworkFormat { gexf, edgelist };

NetworkFormat parse_network_format(std::string_view name);
// "gexf" for *.gexf, edgelist otherwise.
NetworkFormat network_format_for_path(std::string_view path);

// Undirected GEXF 1.2 with node ids equal to labels; nodes in lexicographic
// order, edges by endpoint pair, provenance in <meta><description>.
void write_gexf(std::ostream& out, const SemanticNetwork& network);

// `source,target,weight` per edge in endpoint order, then one `label,,` line
// per isolated node. Weights use the shortest decimal that round-trips.
void write_edgelist(std::ostream& out, const SemanticNetwork& network);

// Throws ParseError on malformed content and ValidationError on self-loops,
// duplicate pairs or weights outside (0, 1].
SemanticNetwork read_network(std::istream& in, NetworkFormat format);

void write_network(std::ostream& out, const SemanticNetwork& network, NetworkFormat format);

struct NetworkStats {
  std::size_t node_count = 0;
  std::size_t non_isolated_node_count = 0;
  std::size_t edge_count = 0;
  std::optional<double> density;  // empty below 2 nodes
  std::optional<double> weight_min;  // empty without edges
  std::optional<double> weight_max;
  std::optional<double> weight_mean;
};

NetworkStats stats(const SemanticNetwork& network);
// Flat JSON object, keys in declaration order, null for empty fields.
std::string stats_json(const NetworkStats& s);

// GSIM layout, all integers little-endian:
//   "GSIM" | u32 version (1) | u8 mode (0 attribute, 1 actor) | u64 n |
//   n x (u32 byte length, UTF-8 label) | n(n+1)/2 x f64 packed upper triangle
inline constexpr std::uint32_t kGsimVersion = 1;
void write_gsim(std::ostream& out, const SimilarityMatrix& matrix);
SimilarityMatrix read_gsim(std::istream& in);

// `label_a,label_b,score` for every pair i <= j.
void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix);

}  // namespace gsim
