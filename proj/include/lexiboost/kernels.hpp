#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial twin with the
// same per-element arithmetic, so both produce bit-identical results; tests
// compare them and the benchmark target times them against each other.

#include <cstddef>
#include <span>
#include <vector>

namespace lexiboost::kernels {

/// Row-major matrix view used by the kernels.
struct MatrixView {
  double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double* row(std::size_t r) const { return data + r * cols; }
};

/// Gauss-Jordan step on a simplex tableau: scales pivot_row so that the
/// pivot entry becomes 1, then removes column `col` from every other row.
void pivot(MatrixView tableau, std::size_t pivot_row, std::size_t col);
void pivot_serial(MatrixView tableau, std::size_t pivot_row, std::size_t col);

/// Squared Euclidean distances from each query row to each reference row.
/// out has queries.rows x refs.rows entries.
void squared_distances(std::span<const double> queries, std::size_t query_count,
                       std::span<const double> refs, std::size_t ref_count,
                       std::size_t dimension, std::span<double> out);
void squared_distances_serial(std::span<const double> queries, std::size_t query_count,
                              std::span<const double> refs, std::size_t ref_count,
                              std::size_t dimension, std::span<double> out);

/// Dot product of every row of `matrix` (rows x cols) with `weights`.
void row_dots(std::span<const double> matrix, std::size_t rows, std::size_t cols,
              std::span<const double> weights, std::span<double> out);
void row_dots_serial(std::span<const double> matrix, std::size_t rows, std::size_t cols,
                     std::span<const double> weights, std::span<double> out);

/// Problems smaller than this many scalar updates stay on one thread.
inline constexpr std::size_t kParallelThreshold = 1u << 15;

} // namespace lexiboost::kernels
