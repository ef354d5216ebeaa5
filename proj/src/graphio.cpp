#include "gsim/graphio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cstring>
#include <istream>
#include <limits>
#include "json.hpp"
#include <ostream>
#include <set>

#include "gsim/error.hpp"
#include "gsim/text.hpp"

namespace gsim {
namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void check_stream(std::ostream& out, const char* what) {
  if (!out) throw IoError(std::string("write failed: ") + what);
}

SemanticNetwork read_edgelist(std::istream& in) {
  std::vector<std::string> nodes;
  std::set<std::string> seen;
  std::vector<Edge> edges;
  std::set<SemanticNetwork::EdgeKey> pairs;
  auto add_node = [&](const std::string& n) {
    if (seen.insert(n).second) nodes.push_back(n);
  };
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
    if (f.size() != 3) throw ParseError("expected source,target,weight", lineno);
    if (lineno == 1 && f[0] == "source" && f[1] == "target" && f[2] == "weight") continue;
    std::string src(text::trim(f[0])), dst(text::trim(f[1]));
    if (src.empty()) throw ParseError("empty source label", lineno);
    if (dst.empty()) {
      if (!text::trim(f[2]).empty()) throw ParseError("weight without target", lineno);
      add_node(src);
      continue;
    }
    double w;
    try {
      w = text::parse_double(f[2]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    if (src == dst) throw ValidationError("line " + std::to_string(lineno) + ": edge (" + src + ", " + dst + "): self-loop");
    if (!pairs.insert(SemanticNetwork::key(src, dst)).second)
      throw ValidationError("line " + std::to_string(lineno) + ": edge (" + src + ", " + dst +
                            "): duplicate edge");
    add_node(src);
    add_node(dst);
    edges.push_back({src, dst, w});
  }
  return SemanticNetwork(std::move(nodes), edges);
}

SemanticNetwork read_gexf(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("GEXF: " + e.message(), e.line());
  }
  const auto* root = tree.get_child_optional("gexf").get_ptr();
  if (!root) throw ParseError("GEXF: missing <gexf> root");
  const auto graph = root->get_child_optional("graph");
  if (!graph) throw ParseError("GEXF: missing <graph>");
  if (graph->get<std::string>("<xmlattr>.defaultedgetype", "undirected") != "undirected")
    throw ValidationError("GEXF: only undirected graphs are supported");
  std::string provenance = root->get<std::string>("meta.description", "");

  std::vector<std::string> nodes;
  if (auto ns = graph->get_child_optional("nodes")) {
    for (const auto& [tag, node] : *ns) {
      if (tag != "node") continue;
      auto id = node.get_optional<std::string>("<xmlattr>.id");
      if (!id || id->empty()) throw ParseError("GEXF: node without id");
      nodes.push_back(*id);
    }
  }
  std::vector<Edge> edges;
  std::set<SemanticNetwork::EdgeKey> pairs;
  if (auto es = graph->get_child_optional("edges")) {
    for (const auto& [tag, edge] : *es) {
      if (tag != "edge") continue;
      auto src = edge.get_optional<std::string>("<xmlattr>.source");
      auto dst = edge.get_optional<std::string>("<xmlattr>.target");
      if (!src || !dst) throw ParseError("GEXF: edge without source/target");
      if (edge.get<std::string>("<xmlattr>.type", "undirected") != "undirected")
        throw ValidationError("GEXF: directed edge (" + *src + ", " + *dst + ")");
      const double w = text::parse_double(edge.get<std::string>("<xmlattr>.weight", "1"));
      if (*src != *dst && !pairs.insert(SemanticNetwork::key(*src, *dst)).second)
        throw ValidationError("edge (" + *src + ", " + *dst + "): duplicate edge");
      edges.push_back({*src, *dst, w});
    }
  }
  return SemanticNetwork(std::move(nodes), edges, std::move(provenance));
}

template <class T>
void put_le(std::string& buf, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  U u;
  std::memcpy(&u, &v, sizeof u);
  for (std::size_t i = 0; i < sizeof u; ++i) buf.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
}

template <class T>
T get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size()))
    throw ParseError(std::string("GSIM: truncated ") + what);
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < b.size(); ++i) u |= std::uint64_t{b[i]} << (8 * i);
  T v;
  if constexpr (sizeof(T) == 8) {
    std::memcpy(&v, &u, 8);
  } else {
    v = static_cast<T>(u);
  }
  return v;
}

}  // namespace

NetworkFormat parse_network_format(std::string_view name) {
  if (name == "gexf") return NetworkFormat::gexf;
  if (name == "edgelist" || name == "csv") return NetworkFormat::edgelist;
  throw std::invalid_argument("unknown network format '" + std::string(name) + "'");
}

NetworkFormat network_format_for_path(std::string_view path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".gexf" ? NetworkFormat::gexf
                                                                       : NetworkFormat::edgelist;
}

void write_gexf(std::ostream& out, const SemanticNetwork& network) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n";
  out << "  <meta>\n    <description>" << xml_escape(network.provenance())
      << "</description>\n  </meta>\n";
  out << "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n";
  out << "    <nodes>\n";
  for (const auto& n : network.nodes()) {
    const auto id = xml_escape(n);
    out << "      <node id=\"" << id << "\" label=\"" << id << "\"/>\n";
  }
  out << "    </nodes>\n    <edges>\n";
  std::size_t id = 0;
  for (const auto& [k, w] : network.edges()) {
    out << "      <edge id=\"" << id++ << "\" source=\"" << xml_escape(k.first) << "\" target=\""
        << xml_escape(k.second) << "\" weight=\"" << text::format_double(w) << "\"/>\n";
  }
  out << "    </edges>\n  </graph>\n</gexf>\n";
  check_stream(out, "GEXF");
}

void write_edgelist(std::ostream& out, const SemanticNetwork& network) {
  std::set<std::string> touched;
  for (const auto& [k, w] : network.edges()) {
    out << text::quote_field(k.first) << ',' << text::quote_field(k.second) << ','
        << text::format_double(w) << '\n';
    touched.insert(k.first);
    touched.insert(k.second);
  }
  for (const auto& n : network.nodes())
    if (!touched.contains(n)) out << text::quote_field(n) << ",,\n";
  check_stream(out, "edge list");
}

SemanticNetwork read_network(std::istream& in, NetworkFormat format) {
  return format == NetworkFormat::gexf ? read_gexf(in) : read_edgelist(in);
}

void write_network(std::ostream& out, const SemanticNetwork& network, NetworkFormat format) {
  if (format == NetworkFormat::gexf)
    write_gexf(out, network);
  else
    write_edgelist(out, network);
}

NetworkStats stats(const SemanticNetwork& network) {
  NetworkStats s;
  s.node_count = network.node_count();
  s.edge_count = network.edge_count();
  std::set<std::string_view> touched;
  double sum = 0;
  for (const auto& [k, w] : network.edges()) {
    touched.insert(k.first);
    touched.insert(k.second);
    s.weight_min = std::min(s.weight_min.value_or(w), w);
    s.weight_max = std::max(s.weight_max.value_or(w), w);
    sum += w;
  }
  s.non_isolated_node_count = touched.size();
  if (s.node_count >= 2) s.density = density(network);
  if (s.edge_count) {
    // Keep the mean inside [min, max] despite rounding in the sum.
    s.weight_mean = std::clamp(sum / static_cast<double>(s.edge_count), *s.weight_min, *s.weight_max);
  }
  return s;
}

std::string stats_json(const NetworkStats& s) {
  nlohmann::ordered_json j;
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["node_count"] = s.node_count;
  j["non_isolated_node_count"] = s.non_isolated_node_count;
  j["edge_count"] = s.edge_count;
  j["density"] = opt(s.density);
  j["weight_min"] = opt(s.weight_min);
  j["weight_max"] = opt(s.weight_max);
  j["weight_mean"] = opt(s.weight_mean);
  return j.dump(2) + "\n";
}

void write_gsim(std::ostream& out, const SimilarityMatrix& matrix) {
  std::string buf = "GSIM";
  put_le<std::uint32_t>(buf, kGsimVersion);
  put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(matrix.mode()));
  put_le<std::uint64_t>(buf, matrix.size());
  for (const auto& l : matrix.labels()) {
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(l.size()));
    buf += l;
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  const std::size_t n = matrix.size();
  constexpr std::size_t kChunk = 1 << 16;
  buf.clear();
  buf.reserve(kChunk * 8);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      put_le<double>(buf, matrix.at(i, j));
      if (buf.size() >= kChunk * 8) {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  check_stream(out, "GSIM");
}

SimilarityMatrix read_gsim(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GSIM", 4) != 0)
    throw ParseError("GSIM: bad magic bytes");
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kGsimVersion)
    throw ParseError("GSIM: unsupported version " + std::to_string(version));
  const auto mode = get_le<std::uint8_t>(in, "mode");
  if (mode > 1) throw ParseError("GSIM: bad mode tag " + std::to_string(mode));
  const auto n = get_le<std::uint64_t>(in, "size");
  if (n > (std::uint64_t{1} << 32)) throw ParseError("GSIM: implausible size");
  std::vector<std::string> labels(n);
  for (auto& l : labels) {
    const auto len = get_le<std::uint32_t>(in, "label length");
    l.resize(len);
    if (!in.read(l.data(), len)) throw ParseError("GSIM: truncated label");
  }
  std::vector<double> upper(packed_size(n));
  std::vector<unsigned char> raw(upper.size() * 8);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw ParseError("GSIM: truncated values");
  for (std::size_t k = 0; k < upper.size(); ++k) {
    std::uint64_t u = 0;
    for (std::size_t b = 0; b < 8; ++b) u |= std::uint64_t{raw[k * 8 + b]} << (8 * b);
    std::memcpy(&upper[k], &u, 8);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("GSIM: trailing bytes");
  return SimilarityMatrix::from_packed(std::move(labels), static_cast<Mode>(mode), std::move(upper));
}

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix) {
  const auto& l = matrix.labels();
  for (std::size_t i = 0; i < matrix.size(); ++i)
    for (std::size_t j = i; j < matrix.size(); ++j)
      out << text::quote_field(l[i]) << ',' << text::quote_field(l[j]) << ','
          << text::format_double(matrix.at(i, j)) << '\n';
  check_stream(out, "matrix CSV");
}

}  // namespace gsim
