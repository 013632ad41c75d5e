#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace iit {

struct SparseEntry {
  std::uint32_t col = 0;
  double value = 0.0;
};

// Compressed sparse rows, entries column-sorted within each row.
// Rows are appended once, in order; the matrix is immutable afterwards.
class SparseRowMatrix {
 public:
  SparseRowMatrix() = default;
  SparseRowMatrix(std::size_t rows, std::size_t cols);

  static SparseRowMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return entries_.size(); }

  void reserve(std::size_t nnz_hint) { entries_.reserve(nnz_hint); }
  void append_row(std::span<const SparseEntry> entries);
  std::span<const SparseEntry> row(std::size_t r) const noexcept;

  double row_sum(std::size_t r) const noexcept;
  std::vector<double> diagonal() const;

  void apply(std::span<const double> x, std::span<double> y) const;  // y = A x
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> x) const;  // y = A' x

  SparseRowMatrix transposed() const;
  SparseRowMatrix symmetrized() const;  // (A + A') / 2
  void scale_values(double s);

  static SparseRowMatrix multiply(const SparseRowMatrix& a, const SparseRowMatrix& b);
  // ca * a + cb * b, dimensions must match.
  static SparseRowMatrix add(double ca, const SparseRowMatrix& a, double cb,
                             const SparseRowMatrix& b);

  double max_abs_asymmetry() const;  // max |A_ij - A_ji|

  // Coordinate text dump, one "row col value" triple per line.
  void write_coordinate(std::ostream& os) const;
  void write_row(std::ostream& os, std::size_t r) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t appended_ = 0;
  std::vector<std::size_t> row_start_;  // rows_ + 1 once fully built
  std::vector<SparseEntry> entries_;
};

}  // namespace iit
