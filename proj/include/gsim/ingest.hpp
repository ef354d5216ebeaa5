#pragma once

// Two-mode input: actor/attribute declarations and the binary incidence
// matrix built from them.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gsim {

struct DelimiterConfig {
  char delimiter = ',';
  bool skip_header = false;
};

struct Declaration {
  std::string actor;
  std::string attribute;
  bool operator==(const Declaration&) const = default;
};

// Normalized, deduplicated declarations in first-occurrence order.
class BipartitePairs {
 public:
  BipartitePairs() = default;
  // Normalizes and deduplicates `raw`; throws ValidationError on a label that
  // is empty after normalization.
  BipartitePairs(const std::vector<Declaration>& raw, std::string source_name);

  const std::vector<Declaration>& records() const noexcept { return records_; }
  const std::string& source_name() const noexcept { return source_name_; }
  std::size_t actor_count() const;
  std::size_t attribute_count() const;
  bool empty() const noexcept { return records_.empty(); }

  // Number of distinct actors declaring each attribute.
  std::unordered_map<std::string, std::size_t> attribute_frequencies() const;

 private:
  friend BipartitePairs top_k_attributes(const BipartitePairs&, std::size_t);
  std::vector<Declaration> records_;
  std::string source_name_;
};

BipartitePairs parse_pairs(std::istream& in, const DelimiterConfig& format = {},
                           std::string source_name = "<stream>");

// Keeps declarations of the k most frequent attributes; ties at the cutoff go
// to the lexicographically smaller label. Throws std::invalid_argument on k == 0.
BipartitePairs top_k_attributes(const BipartitePairs& pairs, std::size_t k);

class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  // entries is row-major actors x attributes, values 0/1. Validates every
  // invariant, including the no-constant-row/column rule.
  IncidenceMatrix(std::vector<std::uint8_t> entries, std::vector<std::string> actor_labels,
                  std::vector<std::string> attribute_labels);

  std::size_t actors() const noexcept { return actor_labels_.size(); }
  std::size_t attributes() const noexcept { return attribute_labels_.size(); }
  std::uint8_t at(std::size_t actor, std::size_t attribute) const {
    return entries_[actor * attributes() + attribute];
  }
  std::span<const std::uint8_t> row(std::size_t actor) const {
    return {entries_.data() + actor * attributes(), attributes()};
  }
  std::span<const std::uint8_t> entries() const noexcept { return entries_; }
  const std::vector<std::string>& actor_labels() const noexcept { return actor_labels_; }
  const std::vector<std::string>& attribute_labels() const noexcept { return attribute_labels_; }

  // One declaration per 1-entry, row by row. Rebuilding from this list
  // reproduces the matrix and both label orders.
  BipartitePairs to_pairs(std::string source_name = "incidence") const;

  bool operator==(const IncidenceMatrix&) const = default;

 private:
  std::vector<std::uint8_t> entries_;
  std::vector<std::string> actor_labels_;
  std::vector<std::string> attribute_labels_;
};

struct DroppedVector {
  enum class Kind { actor, attribute };
  Kind kind;
  std::string label;
  bool all_ones;  // false: all zeros
  std::size_t round;  // cascade round, 1-based
};

struct IncidenceBuild {
  IncidenceMatrix matrix;
  std::vector<DroppedVector> dropped;
};

// Rows follow first appearance of the actor; columns are sorted by descending
// frequency in the final matrix, then by label. Constant rows and columns are
// removed until none remain. Throws ValidationError("degenerate dataset") when
// the cascade empties the matrix, std::invalid_argument on empty input.
IncidenceBuild build_incidence(const BipartitePairs& pairs);

// One line per removed row/column, e.g. "actor u4: all-ones (round 1)".
std::string format_drop_report(const std::vector<DroppedVector>& dropped);

// Writes the pair list as CSV (actor,attribute), quoting as needed.
void write_pairs(std::ostream& out, const BipartitePairs& pairs);

}  // namespace gsim
