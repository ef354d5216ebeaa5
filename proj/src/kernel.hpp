#pragma once

// Blocked products of the form A * B^T where both operands are row-major with
// a shared depth. Each output entry is reduced over the full depth in index
// order by exactly one micro-kernel call, so results are bitwise independent
// of tiling across threads and of the worker count.

#include <algorithm>
#include <cstddef>
#include <cstring>
#include <vector>

#include "parallel.hpp"

namespace gsim::detail {

inline constexpr std::size_t kMr = 6;  // rows of A per micro-tile
inline constexpr std::size_t kNr = 8;  // rows of B per micro-tile
inline constexpr std::size_t kMacroRows = 16 * kMr;
inline constexpr std::size_t kMacroCols = 16 * kNr;

// Operand repacked as consecutive panels of `width` rows, each stored depth-major
// and zero padded past the last row.
class Panels {
 public:
  Panels() = default;
  Panels(const double* data, std::size_t rows, std::size_t depth, std::size_t width)
      : rows_(rows), depth_(depth), width_(width), count_((rows + width - 1) / width),
        buf_(count_ * depth * width, 0.0) {
    for (std::size_t p = 0; p < count_; ++p) {
      double* dst = buf_.data() + p * depth * width;
      const std::size_t r0 = p * width;
      const std::size_t nr = std::min(width, rows - r0);
      for (std::size_t r = 0; r < nr; ++r) {
        const double* src = data + (r0 + r) * depth;
        for (std::size_t k = 0; k < depth; ++k) dst[k * width + r] = src[k];
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t count() const noexcept { return count_; }
  const double* panel(std::size_t p) const noexcept { return buf_.data() + p * depth_ * width_; }

 private:
  std::size_t rows_ = 0, depth_ = 0, width_ = 0, count_ = 0;
  std::vector<double> buf_;
};

using v4d = double __attribute__((vector_size(32)));

// c[r][0..8) = sum_k a[k][r] * b[k][0..8), k ascending.
inline void micro_kernel(const double* a, const double* b, std::size_t depth,
                         double (&c)[kMr][kNr]) {
  v4d acc[kMr][2] = {};
  for (std::size_t k = 0; k < depth; ++k) {
    v4d b0, b1;
    std::memcpy(&b0, b + k * kNr, sizeof b0);
    std::memcpy(&b1, b + k * kNr + 4, sizeof b1);
    const double* ak = a + k * kMr;
    for (std::size_t r = 0; r < kMr; ++r) {
      acc[r][0] += ak[r] * b0;
      acc[r][1] += ak[r] * b1;
    }
  }
  for (std::size_t r = 0; r < kMr; ++r) {
    std::memcpy(&c[r][0], &acc[r][0], sizeof(v4d));
    std::memcpy(&c[r][4], &acc[r][1], sizeof(v4d));
  }
}

enum class Shape { full, upper };

struct TileGrid {
  std::size_t row_blocks = 0, col_blocks = 0;
  std::vector<std::pair<std::size_t, std::size_t>> tiles;

  TileGrid(std::size_t rows, std::size_t cols, Shape shape) {
    row_blocks = (rows + kMacroRows - 1) / kMacroRows;
    col_blocks = (cols + kMacroCols - 1) / kMacroCols;
    for (std::size_t bi = 0; bi < row_blocks; ++bi)
      for (std::size_t bj = 0; bj < col_blocks; ++bj) {
        const std::size_t col_end = std::min(cols, (bj + 1) * kMacroCols);
        if (shape == Shape::upper && col_end <= bi * kMacroRows) continue;
        tiles.emplace_back(bi, bj);
      }
  }
  std::size_t size() const noexcept { return tiles.size(); }
};

// Calls sink(tile, i, j, dot(A_i, B_j)) for every i < a.rows(), j < b.rows()
// (only j >= i for Shape::upper). `tile` indexes grid.tiles and identifies the
// caller-visible unit of work; all entries of a tile are visited by one thread.
template <class Sink>
void multiply_abt(const Panels& a, const Panels& b, Shape shape, const TileGrid& grid,
                  unsigned workers, Sink&& sink) {
  parallel_for(grid.size(), workers, [&](std::size_t t) {
    const auto [bi, bj] = grid.tiles[t];
    const std::size_t i0 = bi * kMacroRows, i1 = std::min(a.rows(), i0 + kMacroRows);
    const std::size_t j0 = bj * kMacroCols, j1 = std::min(b.rows(), j0 + kMacroCols);
    double c[kMr][kNr];
    for (std::size_t jp = j0 / kNr; jp * kNr < j1; ++jp) {
      const std::size_t jlo = jp * kNr, jhi = std::min(j1, jlo + kNr);
      for (std::size_t ip = i0 / kMr; ip * kMr < i1; ++ip) {
        const std::size_t ilo = ip * kMr, ihi = std::min(i1, ilo + kMr);
        if (shape == Shape::upper && jhi <= ilo) continue;
        micro_kernel(a.panel(ip), b.panel(jp), a.depth(), c);
        for (std::size_t i = ilo; i < ihi; ++i)
          for (std::size_t j = (shape == Shape::upper ? std::max(jlo, i) : jlo); j < jhi; ++j)
            sink(t, i, j, c[i - ilo][j - jlo]);
      }
    }
  });
}

}  // namespace gsim::detail
