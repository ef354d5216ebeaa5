#pragma once

// Generalized similarity of a two-mode network.
//
// Attribute similarity Theta and actor similarity Phi are defined mutually:
// two attributes are similar when they are declared by similar actors, and
// two actors are similar when they declare similar attributes. With c_a the
// centered column a of the incidence matrix and r_u the centered row u,
//
//   Theta'_ab = c_a' Phi c_b / sqrt((c_a' Phi c_a)(c_b' Phi c_b))
//   Phi'_uv   = r_u Theta r_v' / sqrt((r_u Theta r_u')(r_v Theta r_v'))
//
// iterated from Theta = I, Phi = I with both updates taken from the previous
// pair (Jacobi schedule). One step from the identities gives plain Pearson
// correlation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gsim/ingest.hpp"

namespace gsim {

enum class Mode : std::uint8_t { attribute = 0, actor = 1 };
enum class Precision : std::uint8_t { f64, f32 };

std::string_view to_string(Mode m);

// Number of stored entries for an n x n symmetric matrix kept as its packed
// upper triangle (diagonal included, row-major).
constexpr std::size_t packed_size(std::size_t n) { return n * (n + 1) / 2; }
constexpr std::size_t packed_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

namespace detail {
struct MatrixAccess;
}

// Dense symmetric unit-diagonal matrix with entries in [-1, 1]. Symmetry holds
// by construction since only the upper triangle is stored.
class SimilarityMatrix {
 public:
  static constexpr double kRangeSlack = 1e-9;

  SimilarityMatrix() = default;

  static SimilarityMatrix identity(std::vector<std::string> labels, Mode mode,
                                   Precision precision = Precision::f64);
  // Validates unit diagonal, range and finiteness.
  static SimilarityMatrix from_packed(std::vector<std::string> labels, Mode mode,
                                      std::vector<double> upper);

  std::size_t size() const noexcept { return labels_.size(); }
  Mode mode() const noexcept { return mode_; }
  Precision precision() const noexcept { return precision_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  double at(std::size_t i, std::size_t j) const {
    const auto k = packed_index(size(), i, j);
    return precision_ == Precision::f64 ? f64_[k] : static_cast<double>(f32_[k]);
  }
  // Packed upper triangle, widened to double.
  std::vector<double> upper() const;
  // Row-major n x n copy.
  std::vector<double> dense() const;

  // Throws std::out_of_range naming the label.
  std::size_t index_of(std::string_view label) const;

  // Bitwise equality of labels, mode and stored values.
  bool operator==(const SimilarityMatrix& other) const;

 private:
  friend struct detail::MatrixAccess;
  SimilarityMatrix(std::vector<std::string> labels, Mode mode, Precision precision);
  void build_index();

  std::vector<std::string> labels_;
  Mode mode_ = Mode::attribute;
  Precision precision_ = Precision::f64;
  std::vector<double> f64_;
  std::vector<float> f32_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Stored entry for two labels; throws std::out_of_range on an unknown label.
double similarity_between(const SimilarityMatrix& matrix, std::string_view label_a,
                          std::string_view label_b);

// Dense row-major matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  DenseMatrix transposed() const;
};

// Incidence matrix centered by row means and by column means. Computed once
// and never re-centered during iteration.
struct CenteredViews {
  DenseMatrix centered_rows;     // actors x attributes, each row sums to 0
  DenseMatrix centered_columns;  // actors x attributes, each column sums to 0
  std::vector<std::string> actor_labels;
  std::vector<std::string> attribute_labels;

  std::size_t actors() const noexcept { return centered_rows.rows; }
  std::size_t attributes() const noexcept { return centered_rows.cols; }
};

CenteredViews center(const IncidenceMatrix& matrix);

// Pearson correlation of the raw columns (attribute mode) and rows (actor mode).
SimilarityMatrix pearson_attributes(const CenteredViews& views, unsigned workers = 0);
SimilarityMatrix pearson_actors(const CenteredViews& views, unsigned workers = 0);

struct StepResult {
  SimilarityMatrix theta;
  SimilarityMatrix phi;
};

// One Jacobi step of the recursion. Throws NumericError naming the index of a
// non-positive quadratic form, std::invalid_argument on mismatched inputs.
StepResult similarity_step(const CenteredViews& views, const SimilarityMatrix& theta,
                           const SimilarityMatrix& phi, unsigned workers = 0);

enum class Termination { tolerance, max_iterations };
std::string_view to_string(Termination t);

struct ConvergenceReport {
  std::size_t iterations = 0;
  std::vector<double> theta_deltas;  // max |Theta_{k+1} - Theta_k| per iteration
  std::vector<double> phi_deltas;
  Termination terminated_by = Termination::max_iterations;
  double tolerance = 0;
};

struct FixedPointOptions {
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
  unsigned workers = 0;  // 0: hardware concurrency
  Precision phi_precision = Precision::f64;
  // Called after every iteration with the 1-based iteration count.
  std::function<void(std::size_t, const SimilarityMatrix&, const SimilarityMatrix&)> on_iterate;
};

struct FixedPointResult {
  SimilarityMatrix theta;
  SimilarityMatrix phi;
  ConvergenceReport report;
};

// Iterates from the identities until both max-abs deltas fall below the
// tolerance or max_iterations steps were taken. Results do not depend on the
// worker count.
FixedPointResult run_fixed_point(const CenteredViews& views, const FixedPointOptions& options = {});

}  // namespace gsim
