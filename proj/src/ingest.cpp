#include "gsim/ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "gsim/error.hpp"
#include "gsim/text.hpp"

namespace gsim {
namespace {

struct DeclHash {
  std::size_t operator()(const Declaration& d) const noexcept {
    const auto h1 = std::hash<std::string>{}(d.actor);
    const auto h2 = std::hash<std::string>{}(d.attribute);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

}  // namespace

BipartitePairs::BipartitePairs(const std::vector<Declaration>& raw, std::string source_name)
    : source_name_(std::move(source_name)) {
  std::unordered_set<Declaration, DeclHash> seen;
  seen.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Declaration d{text::normalize_label(raw[i].actor), text::normalize_label(raw[i].attribute)};
    if (d.actor.empty() || d.attribute.empty())
      throw ValidationError("declaration " + std::to_string(i + 1) + " has an empty label");
    if (seen.insert(d).second) records_.push_back(std::move(d));
  }
}

std::size_t BipartitePairs::actor_count() const {
  std::unordered_set<std::string_view> s;
  for (const auto& r : records_) s.insert(r.actor);
  return s.size();
}

std::size_t BipartitePairs::attribute_count() const { return attribute_frequencies().size(); }

std::unordered_map<std::string, std::size_t> BipartitePairs::attribute_frequencies() const {
  // Records are unique, so counting records counts distinct actors.
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& r : records_) ++freq[r.attribute];
  return freq;
}

BipartitePairs parse_pairs(std::istream& in, const DelimiterConfig& format,
                           std::string source_name) {
  std::vector<Declaration> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && format.skip_header) continue;
    if (text::trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = text::split_record(line, format.delimiter);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    if (fields.size() != 2)
      throw ParseError("expected 2 fields, found " + std::to_string(fields.size()), lineno);
    try {
      Declaration d{text::normalize_label(fields[0]), text::normalize_label(fields[1])};
      if (d.actor.empty() || d.attribute.empty()) throw ParseError("empty label", lineno);
      raw.push_back(std::move(d));
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(e.what(), lineno);
    }
  }
  if (raw.empty()) throw ParseError("empty input: no declarations in " + source_name);
  return BipartitePairs(raw, std::move(source_name));
}

BipartitePairs top_k_attributes(const BipartitePairs& pairs, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_k_attributes: k must be at least 1");
  const auto freq = pairs.attribute_frequencies();
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  std::unordered_set<std::string> keep;
  for (auto& [label, n] : ranked) keep.insert(label);

  BipartitePairs out;
  out.source_name_ = pairs.source_name();
  for (const auto& r : pairs.records())
    if (keep.contains(r.attribute)) out.records_.push_back(r);
  return out;
}

IncidenceMatrix::IncidenceMatrix(std::vector<std::uint8_t> entries,
                                 std::vector<std::string> actor_labels,
                                 std::vector<std::string> attribute_labels)
    : entries_(std::move(entries)),
      actor_labels_(std::move(actor_labels)),
      attribute_labels_(std::move(attribute_labels)) {
  const std::size_t n = actors(), m = attributes();
  if (entries_.size() != n * m) throw ValidationError("incidence: entry count does not match labels");
  auto check_unique = [](const std::vector<std::string>& v, const char* what) {
    std::unordered_set<std::string_view> s;
    for (const auto& l : v) {
      if (l.empty()) throw ValidationError(std::string("incidence: empty ") + what + " label");
      if (!s.insert(l).second)
        throw ValidationError(std::string("incidence: duplicate ") + what + " label '" + l + "'");
    }
  };
  check_unique(actor_labels_, "actor");
  check_unique(attribute_labels_, "attribute");
  std::vector<std::size_t> col(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto v = entries_[i * m + j];
      if (v > 1) throw ValidationError("incidence: entries must be 0 or 1");
      r += v;
      col[j] += v;
    }
    if (r == 0 || r == m)
      throw ValidationError("incidence: constant row for actor '" + actor_labels_[i] + "'");
  }
  for (std::size_t j = 0; j < m; ++j)
    if (col[j] == 0 || col[j] == n)
      throw ValidationError("incidence: constant column for attribute '" + attribute_labels_[j] + "'");
}

BipartitePairs IncidenceMatrix::to_pairs(std::string source_name) const {
  std::vector<Declaration> raw;
  for (std::size_t i = 0; i < actors(); ++i)
    for (std::size_t j = 0; j < attributes(); ++j)
      if (at(i, j)) raw.push_back({actor_labels_[i], attribute_labels_[j]});
  return BipartitePairs(raw, std::move(source_name));
}

IncidenceBuild build_incidence(const BipartitePairs& pairs) {
  if (pairs.empty()) throw std::invalid_argument("build_incidence: no declarations");

  std::unordered_map<std::string, std::size_t> actor_index, attr_index;
  std::vector<std::string> actors, attrs;
  for (const auto& r : pairs.records()) {
    if (actor_index.emplace(r.actor, actors.size()).second) actors.push_back(r.actor);
    if (attr_index.emplace(r.attribute, attrs.size()).second) attrs.push_back(r.attribute);
  }
  const std::size_t n = actors.size(), m = attrs.size();
  std::vector<std::uint8_t> dense(n * m, 0);
  for (const auto& r : pairs.records()) dense[actor_index[r.actor] * m + attr_index[r.attribute]] = 1;

  std::vector<std::size_t> row_sum(n, 0), col_sum(m, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (dense[i * m + j]) ++row_sum[i], ++col_sum[j];

  std::vector<bool> row_alive(n, true), col_alive(m, true);
  std::size_t rows_left = n, cols_left = m;
  std::vector<DroppedVector> dropped;
  for (std::size_t round = 1;; ++round) {
    std::vector<std::size_t> drop_rows, drop_cols;
    for (std::size_t i = 0; i < n; ++i)
      if (row_alive[i] && (row_sum[i] == 0 || row_sum[i] == cols_left)) drop_rows.push_back(i);
    for (std::size_t j = 0; j < m; ++j)
      if (col_alive[j] && (col_sum[j] == 0 || col_sum[j] == rows_left)) drop_cols.push_back(j);
    if (drop_rows.empty() && drop_cols.empty()) break;
    // A constant vector stays constant when vectors of the other mode are
    // removed, so dropping everything found in this round at once is exact.
    for (auto i : drop_rows)
      dropped.push_back({DroppedVector::Kind::actor, actors[i], row_sum[i] != 0, round});
    for (auto j : drop_cols)
      dropped.push_back({DroppedVector::Kind::attribute, attrs[j], col_sum[j] != 0, round});
    for (auto i : drop_rows) {
      row_alive[i] = false;
      --rows_left;
      for (std::size_t j = 0; j < m; ++j)
        if (dense[i * m + j]) --col_sum[j];
    }
    for (auto j : drop_cols) {
      col_alive[j] = false;
      --cols_left;
      for (std::size_t i = 0; i < n; ++i)
        if (dense[i * m + j]) --row_sum[i];
    }
    if (rows_left == 0 || cols_left == 0) throw ValidationError("degenerate dataset");
  }

  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < m; ++j)
    if (col_alive[j]) cols.push_back(j);
  std::sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
    return col_sum[a] != col_sum[b] ? col_sum[a] > col_sum[b] : attrs[a] < attrs[b];
  });

  std::vector<std::uint8_t> entries;
  entries.reserve(rows_left * cols.size());
  std::vector<std::string> row_labels, col_labels;
  for (std::size_t i = 0; i < n; ++i) {
    if (!row_alive[i]) continue;
    row_labels.push_back(actors[i]);
    for (auto j : cols) entries.push_back(dense[i * m + j]);
  }
  for (auto j : cols) col_labels.push_back(attrs[j]);
  return {IncidenceMatrix(std::move(entries), std::move(row_labels), std::move(col_labels)),
          std::move(dropped)};
}

std::string format_drop_report(const std::vector<DroppedVector>& dropped) {
  std::ostringstream out;
  for (const auto& d : dropped) {
    out << (d.kind == DroppedVector::Kind::actor ? "actor " : "attribute ") << d.label << ": "
        << (d.all_ones ? "all-ones" : "all-zeros") << " (round " << d.round << ")\n";
  }
  return out.str();
}

void write_pairs(std::ostream& out, const BipartitePairs& pairs) {
  for (const auto& r : pairs.records())
    out << text::quote_field(r.actor) << ',' << text::quote_field(r.attribute) << '\n';
  if (!out) throw IoError("failed writing pair list");
}

}  // namespace gsim
