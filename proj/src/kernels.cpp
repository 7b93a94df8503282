#include "lexiboost/kernels.hpp"

#include <cstdint>

namespace lexiboost::kernels {

namespace {

inline void scale_pivot_row(MatrixView t, std::size_t pivot_row, std::size_t col) {
  double* prow = t.row(pivot_row);
  const double inv = 1.0 / prow[col];
  for (std::size_t j = 0; j < t.cols; ++j) prow[j] *= inv;
  prow[col] = 1.0;
}

inline void eliminate_row(MatrixView t, const double* prow, std::size_t r, std::size_t col) {
  double* row = t.row(r);
  const double factor = row[col];
  if (factor == 0.0) return;
  for (std::size_t j = 0; j < t.cols; ++j) row[j] -= factor * prow[j];
  row[col] = 0.0;
}

inline double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double diff = a[c] - b[c];
    s += diff * diff;
  }
  return s;
}

} // namespace

void pivot(MatrixView t, std::size_t pivot_row, std::size_t col) {
  scale_pivot_row(t, pivot_row, col);
  const double* prow = t.row(pivot_row);
  const auto rows = static_cast<std::int64_t>(t.rows);
  const bool big = t.rows * t.cols >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t r = 0; r < rows; ++r) {
    if (static_cast<std::size_t>(r) != pivot_row)
      eliminate_row(t, prow, static_cast<std::size_t>(r), col);
  }
}

void pivot_serial(MatrixView t, std::size_t pivot_row, std::size_t col) {
  scale_pivot_row(t, pivot_row, col);
  const double* prow = t.row(pivot_row);
  for (std::size_t r = 0; r < t.rows; ++r)
    if (r != pivot_row) eliminate_row(t, prow, r, col);
}

void squared_distances(std::span<const double> queries, std::size_t query_count,
                       std::span<const double> refs, std::size_t ref_count,
                       std::size_t dimension, std::span<double> out) {
  const auto q_count = static_cast<std::int64_t>(query_count);
  const bool big = query_count * ref_count * dimension >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t q = 0; q < q_count; ++q) {
    const double* qrow = queries.data() + static_cast<std::size_t>(q) * dimension;
    double* orow = out.data() + static_cast<std::size_t>(q) * ref_count;
    for (std::size_t r = 0; r < ref_count; ++r)
      orow[r] = squared_distance(qrow, refs.data() + r * dimension, dimension);
  }
}

void squared_distances_serial(std::span<const double> queries, std::size_t query_count,
                              std::span<const double> refs, std::size_t ref_count,
                              std::size_t dimension, std::span<double> out) {
  for (std::size_t q = 0; q < query_count; ++q) {
    const double* qrow = queries.data() + q * dimension;
    for (std::size_t r = 0; r < ref_count; ++r)
      out[q * ref_count + r] = squared_distance(qrow, refs.data() + r * dimension, dimension);
  }
}

void row_dots(std::span<const double> matrix, std::size_t rows, std::size_t cols,
              std::span<const double> weights, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(rows);
  const bool big = rows * cols >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t i = 0; i < n; ++i) {
    const double* row = matrix.data() + static_cast<std::size_t>(i) * cols;
    double s = 0.0;
    for (std::size_t t = 0; t < cols; ++t) s += row[t] * weights[t];
    out[static_cast<std::size_t>(i)] = s;
  }
}

void row_dots_serial(std::span<const double> matrix, std::size_t rows, std::size_t cols,
                     std::span<const double> weights, std::span<double> out) {
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t t = 0; t < cols; ++t) s += matrix[i * cols + t] * weights[t];
    out[i] = s;
  }
}

} // namespace lexiboost::kernels
