#include "gsim/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "gsim/error.hpp"
#include "kernel.hpp"

namespace gsim {

namespace detail {

struct MatrixAccess {
  static SimilarityMatrix make(std::vector<std::string> labels, Mode mode, Precision p) {
    return SimilarityMatrix(std::move(labels), mode, p);
  }
  static std::vector<double>& f64(SimilarityMatrix& m) { return m.f64_; }
  static std::vector<float>& f32(SimilarityMatrix& m) { return m.f32_; }
};

}  // namespace detail

using detail::MatrixAccess;
using detail::multiply_abt;
using detail::Panels;
using detail::Shape;
using detail::TileGrid;

std::string_view to_string(Mode m) { return m == Mode::attribute ? "attribute" : "actor"; }

std::string_view to_string(Termination t) {
  return t == Termination::tolerance ? "tolerance" : "max_iterations";
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> labels, Mode mode, Precision precision)
    : labels_(std::move(labels)), mode_(mode), precision_(precision) {
  build_index();
  const auto n = packed_size(labels_.size());
  if (precision_ == Precision::f64)
    f64_.assign(n, 0.0);
  else
    f32_.assign(n, 0.0f);
}

void SimilarityMatrix::build_index() {
  index_.clear();
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (!index_.emplace(labels_[i], i).second)
      throw ValidationError("similarity matrix: duplicate label '" + labels_[i] + "'");
}

SimilarityMatrix SimilarityMatrix::identity(std::vector<std::string> labels, Mode mode,
                                            Precision precision) {
  SimilarityMatrix m(std::move(labels), mode, precision);
  const auto n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = packed_index(n, i, i);
    if (precision == Precision::f64)
      m.f64_[k] = 1.0;
    else
      m.f32_[k] = 1.0f;
  }
  return m;
}

SimilarityMatrix SimilarityMatrix::from_packed(std::vector<std::string> labels, Mode mode,
                                               std::vector<double> upper) {
  SimilarityMatrix m(std::move(labels), mode, Precision::f64);
  const auto n = m.size();
  if (upper.size() != packed_size(n))
    throw ValidationError("similarity matrix: expected " + std::to_string(packed_size(n)) +
                          " packed entries, got " + std::to_string(upper.size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = upper[packed_index(n, i, j)];
      if (i == j && v != 1.0)
        throw ValidationError("similarity matrix: diagonal entry " + std::to_string(i) + " is not 1");
      if (!std::isfinite(v) || std::abs(v) > 1.0 + kRangeSlack)
        throw ValidationError("similarity matrix: entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside [-1,1]");
    }
  }
  m.f64_ = std::move(upper);
  return m;
}

std::vector<double> SimilarityMatrix::upper() const {
  if (precision_ == Precision::f64) return f64_;
  return {f32_.begin(), f32_.end()};
}

std::vector<double> SimilarityMatrix::dense() const {
  const auto n = size();
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out[i * n + j] = out[j * n + i] = at(i, j);
  return out;
}

std::size_t SimilarityMatrix::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) throw std::out_of_range("unknown label '" + std::string(label) + "'");
  return it->second;
}

bool SimilarityMatrix::operator==(const SimilarityMatrix& other) const {
  if (labels_ != other.labels_ || mode_ != other.mode_ || precision_ != other.precision_)
    return false;
  auto bits_equal = [](const auto& a, const auto& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(a[0])) == 0);
  };
  return bits_equal(f64_, other.f64_) && bits_equal(f32_, other.f32_);
}

double similarity_between(const SimilarityMatrix& matrix, std::string_view label_a,
                          std::string_view label_b) {
  return matrix.at(matrix.index_of(label_a), matrix.index_of(label_b));
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

CenteredViews center(const IncidenceMatrix& matrix) {
  const std::size_t n = matrix.actors(), m = matrix.attributes();
  CenteredViews v;
  v.centered_rows = DenseMatrix(n, m);
  v.centered_columns = DenseMatrix(n, m);
  v.actor_labels = matrix.actor_labels();
  v.attribute_labels = matrix.attribute_labels();
  std::vector<double> col_mean(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) col_mean[j] += matrix.at(i, j);
  for (auto& c : col_mean) c /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double row_mean = 0;
    for (std::size_t j = 0; j < m; ++j) row_mean += matrix.at(i, j);
    row_mean /= static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double x = matrix.at(i, j);
      v.centered_rows(i, j) = x - row_mean;
      v.centered_columns(i, j) = x - col_mean[j];
    }
  }
  return v;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Quadratic forms q_i = a_i . b_i, checked strictly positive.
std::vector<double> quadratic_forms(const DenseMatrix& a, const DenseMatrix& b,
                                    const std::vector<std::string>& labels, Mode mode) {
  std::vector<double> q(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    q[i] = dot(a.row(i), b.row(i));
    if (!(q[i] > 0) || !std::isfinite(q[i]))
      throw NumericError("non-positive quadratic form for " + std::string(to_string(mode)) +
                         " index " + std::to_string(i) + " ('" + labels[i] + "')");
  }
  return q;
}

// Writes upper(A B^T) / sqrt(q_i q_j) into packed storage, unit diagonal,
// clamped to [-1, 1]. Returns the max absolute change against the previous
// contents when `delta` is set.
template <class T>
double write_packed(const Panels& pa, const Panels& pb, const std::vector<double>& q,
                    std::vector<T>& out, bool delta, unsigned workers) {
  const std::size_t n = q.size();
  std::vector<double> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = 1.0 / std::sqrt(q[i]);
  TileGrid grid(n, n, Shape::upper);
  std::vector<double> tile_delta(grid.size(), 0.0);
  multiply_abt(pa, pb, Shape::upper, grid, workers,
               [&](std::size_t t, std::size_t i, std::size_t j, double raw) {
                 double v = 1.0;
                 if (i != j) v = std::clamp(raw * inv[i] * inv[j], -1.0, 1.0);
                 T& slot = out[packed_index(n, i, j)];
                 const T nv = static_cast<T>(v);
                 if (delta) {
                   const double d = std::abs(static_cast<double>(nv) - static_cast<double>(slot));
                   if (d > tile_delta[t]) tile_delta[t] = d;
                 }
                 slot = nv;
               });
  return delta ? *std::max_element(tile_delta.begin(), tile_delta.end()) : 0.0;
}

double write_normalized(SimilarityMatrix& target, const Panels& pa, const Panels& pb,
                        const std::vector<double>& q, bool delta, unsigned workers) {
  if (target.precision() == Precision::f64)
    return write_packed(pa, pb, q, MatrixAccess::f64(target), delta, workers);
  return write_packed(pa, pb, q, MatrixAccess::f32(target), delta, workers);
}

double normalize_into(SimilarityMatrix& target, const DenseMatrix& a, const DenseMatrix& b,
                      const Panels& pa, const Panels& pb, bool delta, unsigned workers,
                      std::vector<double>* q_out = nullptr) {
  auto q = quadratic_forms(a, b, target.labels(), target.mode());
  const double d = write_normalized(target, pa, pb, q, delta, workers);
  if (q_out) *q_out = std::move(q);
  return d;
}

// Full product A B^T into a dense matrix.
DenseMatrix multiply_full(const Panels& a, const Panels& b, unsigned workers) {
  DenseMatrix out(a.rows(), b.rows());
  TileGrid grid(a.rows(), b.rows(), Shape::full);
  multiply_abt(a, b, Shape::full, grid, workers,
               [&](std::size_t, std::size_t i, std::size_t j, double v) { out(i, j) = v; });
  return out;
}

DenseMatrix dense_of(const SimilarityMatrix& m) {
  DenseMatrix d(m.size(), m.size());
  d.values = m.dense();
  return d;
}

bool is_identity(const SimilarityMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (m.at(i, j) != 0.0) return false;
  return true;
}

SimilarityMatrix gram_similarity(const DenseMatrix& vectors, std::vector<std::string> labels,
                                 Mode mode, unsigned workers) {
  Panels pa(vectors.values.data(), vectors.rows, vectors.cols, detail::kMr);
  Panels pb(vectors.values.data(), vectors.rows, vectors.cols, detail::kNr);
  auto m = MatrixAccess::make(std::move(labels), mode, Precision::f64);
  normalize_into(m, vectors, vectors, pa, pb, false, workers);
  return m;
}

// Centered rows and columns in the layouts the products consume. Built once per run.
struct Operands {
  const CenteredViews& views;
  DenseMatrix columns_t;  // attributes x actors
  DenseMatrix rows_t;     // attributes x actors
  Panels rows_a, rows_b;  // centered rows as left / right operand

  Operands(const CenteredViews& v, bool need_rows_t)
      : views(v),
        columns_t(v.centered_columns.transposed()),
        rows_a(v.centered_rows.values.data(), v.actors(), v.attributes(), detail::kMr),
        rows_b(v.centered_rows.values.data(), v.actors(), v.attributes(), detail::kNr) {
    if (need_rows_t) rows_t = v.centered_rows.transposed();
  }
};

void check_views(const CenteredViews& v) {
  if (v.actors() < 2 || v.attributes() < 2)
    throw std::invalid_argument("similarity: need at least 2 actors and 2 attributes");
  if (v.centered_columns.rows != v.actors() || v.centered_columns.cols != v.attributes() ||
      v.actor_labels.size() != v.actors() || v.attribute_labels.size() != v.attributes())
    throw std::invalid_argument("similarity: inconsistent centered views");
}

// Theta_1 = Pearson of columns (the Phi_0 = I case).
double theta_from_identity(const Operands& ops, SimilarityMatrix& theta, bool delta,
                           unsigned workers) {
  const auto& ct = ops.columns_t;
  Panels pa(ct.values.data(), ct.rows, ct.cols, detail::kMr);
  Panels pb(ct.values.data(), ct.rows, ct.cols, detail::kNr);
  return normalize_into(theta, ct, ct, pa, pb, delta, workers);
}

// Phi_{k+1} from Theta_k: P = R Theta, then upper(P R^T). Returns the delta
// against the previous contents of `phi`; q receives the quadratic forms.
double phi_from_theta(const Operands& ops, const DenseMatrix& theta_dense, SimilarityMatrix& phi,
                      bool delta, unsigned workers, std::vector<double>* q) {
  const auto& r = ops.views.centered_rows;
  Panels theta_b(theta_dense.values.data(), theta_dense.rows, theta_dense.cols, detail::kNr);
  DenseMatrix p = multiply_full(ops.rows_a, theta_b, workers);
  Panels p_a(p.values.data(), p.rows, p.cols, detail::kMr);
  return normalize_into(phi, p, r, p_a, ops.rows_b, delta, workers, q);
}

}  // namespace

SimilarityMatrix pearson_attributes(const CenteredViews& views, unsigned workers) {
  check_views(views);
  return gram_similarity(views.centered_columns.transposed(), views.attribute_labels,
                         Mode::attribute, workers);
}

SimilarityMatrix pearson_actors(const CenteredViews& views, unsigned workers) {
  check_views(views);
  return gram_similarity(views.centered_rows, views.actor_labels, Mode::actor, workers);
}

StepResult similarity_step(const CenteredViews& views, const SimilarityMatrix& theta,
                           const SimilarityMatrix& phi, unsigned workers) {
  check_views(views);
  if (theta.mode() != Mode::attribute || theta.size() != views.attributes())
    throw std::invalid_argument("similarity_step: theta must be attribute-mode of matching size");
  if (phi.mode() != Mode::actor || phi.size() != views.actors())
    throw std::invalid_argument("similarity_step: phi must be actor-mode of matching size");

  Operands ops(views, false);
  const std::size_t n_actors = views.actors(), n_attrs = views.attributes();

  auto theta_next = MatrixAccess::make(views.attribute_labels, Mode::attribute, Precision::f64);
  if (is_identity(phi)) {
    theta_from_identity(ops, theta_next, false, workers);
  } else {
    // Y = Phi C, each row reduced over actors in index order.
    const auto& c = views.centered_columns;
    DenseMatrix yt(n_attrs, n_actors);
    detail::parallel_for(n_actors, workers, [&](std::size_t u) {
      std::vector<double> acc(n_attrs, 0.0);
      for (std::size_t w = 0; w < n_actors; ++w) {
        const double f = phi.at(u, w);
        if (f == 0.0) continue;
        const double* cw = c.values.data() + w * n_attrs;
        for (std::size_t a = 0; a < n_attrs; ++a) acc[a] += f * cw[a];
      }
      for (std::size_t a = 0; a < n_attrs; ++a) yt(a, u) = acc[a];
    });
    const auto& ct = ops.columns_t;
    Panels pa(ct.values.data(), ct.rows, ct.cols, detail::kMr);
    Panels pb(yt.values.data(), yt.rows, yt.cols, detail::kNr);
    normalize_into(theta_next, ct, yt, pa, pb, false, workers);
  }

  auto phi_next = MatrixAccess::make(views.actor_labels, Mode::actor, phi.precision());
  phi_from_theta(ops, dense_of(theta), phi_next, false, workers, nullptr);
  return {std::move(theta_next), std::move(phi_next)};
}

FixedPointResult run_fixed_point(const CenteredViews& views, const FixedPointOptions& options) {
  check_views(views);
  if (!(options.tolerance > 0)) throw std::invalid_argument("run_fixed_point: tolerance must be > 0");
  if (options.max_iterations < 1)
    throw std::invalid_argument("run_fixed_point: max_iterations must be >= 1");

  const unsigned workers = options.workers;
  const std::size_t n_actors = views.actors();
  Operands ops(views, true);
  Panels rows_t_a(ops.rows_t.values.data(), ops.rows_t.rows, ops.rows_t.cols, detail::kMr);

  FixedPointResult res;
  res.report.tolerance = options.tolerance;
  auto theta = SimilarityMatrix::identity(views.attribute_labels, Mode::attribute);
  auto phi = SimilarityMatrix::identity(views.actor_labels, Mode::actor, options.phi_precision);
  DenseMatrix theta_dense = dense_of(theta);
  DenseMatrix theta_prev_dense;
  std::vector<double> phi_q;  // quadratic forms that normalized the current phi

  for (std::size_t k = 0; k < options.max_iterations; ++k) {
    // Theta_{k+1} from Phi_k. For k >= 1, Phi_k = S R Theta_{k-1} R^T S with
    // S = diag(phi_q)^{-1/2}, so C^T Phi_k C = G^T Theta_{k-1} G where
    // G = R^T S C is attributes x attributes; Phi_k itself is never multiplied.
    auto theta_next = MatrixAccess::make(views.attribute_labels, Mode::attribute, Precision::f64);
    MatrixAccess::f64(theta_next) = MatrixAccess::f64(theta);
    double theta_delta;
    if (k == 0) {
      theta_delta = theta_from_identity(ops, theta_next, true, workers);
    } else {
      std::vector<double> scale(n_actors);
      for (std::size_t u = 0; u < n_actors; ++u) scale[u] = 1.0 / std::sqrt(phi_q[u]);
      DenseMatrix sct = ops.columns_t;
      for (std::size_t a = 0; a < sct.rows; ++a)
        for (std::size_t u = 0; u < n_actors; ++u) sct(a, u) *= scale[u];
      Panels sct_b(sct.values.data(), sct.rows, sct.cols, detail::kNr);
      DenseMatrix g = multiply_full(rows_t_a, sct_b, workers);  // G(a,b)
      DenseMatrix gt = g.transposed();
      Panels gt_a(gt.values.data(), gt.rows, gt.cols, detail::kMr);
      Panels prev_b(theta_prev_dense.values.data(), theta_prev_dense.rows, theta_prev_dense.cols,
                    detail::kNr);
      DenseMatrix w = multiply_full(gt_a, prev_b, workers);  // W = G^T Theta_{k-1}
      Panels w_a(w.values.data(), w.rows, w.cols, detail::kMr);
      Panels gt_b(gt.values.data(), gt.rows, gt.cols, detail::kNr);
      theta_delta = normalize_into(theta_next, w, gt, w_a, gt_b, true, workers);
    }

    // Phi_{k+1} from Theta_k, overwriting Phi_k in place.
    std::vector<double> q_next;
    const double phi_delta = phi_from_theta(ops, theta_dense, phi, true, workers, &q_next);

    theta_prev_dense = std::move(theta_dense);
    theta = std::move(theta_next);
    theta_dense = dense_of(theta);
    phi_q = std::move(q_next);

    res.report.iterations = k + 1;
    res.report.theta_deltas.push_back(theta_delta);
    res.report.phi_deltas.push_back(phi_delta);
    if (options.on_iterate) options.on_iterate(k + 1, theta, phi);
    if (theta_delta < options.tolerance && phi_delta < options.tolerance) {
      res.report.terminated_by = Termination::tolerance;
      break;
    }
  }
  if (res.report.terminated_by != Termination::tolerance)
    res.report.terminated_by = Termination::max_iterations;
  res.theta = std::move(theta);
  res.phi = std::move(phi);
  return res;
}

}  // namespace gsim
