#include "iit/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

#include "iit/errors.hpp"

namespace iit {

SparseRowMatrix::SparseRowMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  row_start_.reserve(rows + 1);
  row_start_.push_back(0);
}

SparseRowMatrix SparseRowMatrix::identity(std::size_t n) {
  SparseRowMatrix m(n, n);
  m.entries_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SparseEntry e{static_cast<std::uint32_t>(i), 1.0};
    m.append_row({&e, 1});
  }
  return m;
}

void SparseRowMatrix::append_row(std::span<const SparseEntry> entries) {
  assert(appended_ < rows_);
  entries_.insert(entries_.end(), entries.begin(), entries.end());
  row_start_.push_back(entries_.size());
  ++appended_;
}

std::span<const SparseEntry> SparseRowMatrix::row(std::size_t r) const noexcept {
  return {entries_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
}

double SparseRowMatrix::row_sum(std::size_t r) const noexcept {
  double s = 0.0;
  for (const auto& e : row(r)) s += e.value;
  return s;
}

std::vector<double> SparseRowMatrix::diagonal() const {
  std::vector<double> d(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (const auto& e : row(r))
      if (e.col == r) d[r] = e.value;
  return d;
}

void SparseRowMatrix::apply(std::span<const double> x, std::span<double> y) const {
  assert(x.size() == cols_ && y.size() == rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (const auto& e : row(r)) acc += e.value * x[e.col];
    y[r] = acc;
  }
}

std::vector<double> SparseRowMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  apply(x, y);
  return y;
}

std::vector<double> SparseRowMatrix::apply_transpose(std::span<const double> x) const {
  assert(x.size() == rows_);
  std::vector<double> y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (const auto& e : row(r)) y[e.col] += e.value * x[r];
  return y;
}

SparseRowMatrix SparseRowMatrix::transposed() const {
  SparseRowMatrix t(cols_, rows_);
  std::vector<std::size_t> counts(cols_, 0);
  for (const auto& e : entries_) ++counts[e.col];

  std::vector<std::size_t> offset(cols_ + 1, 0);
  for (std::size_t c = 0; c < cols_; ++c) offset[c + 1] = offset[c] + counts[c];

  t.entries_.resize(entries_.size());
  std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r)
    for (const auto& e : row(r))
      t.entries_[cursor[e.col]++] = {static_cast<std::uint32_t>(r), e.value};

  t.row_start_ = std::move(offset);
  t.appended_ = cols_;
  return t;
}

SparseRowMatrix SparseRowMatrix::symmetrized() const {
  if (rows_ != cols_) throw ShapeError("symmetrized: matrix must be square");
  return add(0.5, *this, 0.5, transposed());
}

void SparseRowMatrix::scale_values(double s) {
  for (auto& e : entries_) e.value *= s;
}

SparseRowMatrix SparseRowMatrix::multiply(const SparseRowMatrix& a,
                                          const SparseRowMatrix& b) {
  if (a.cols_ != b.rows_) throw ShapeError("multiply: inner dimensions differ");
  SparseRowMatrix c(a.rows_, b.cols_);

  // Gustavson: accumulate each output row in a dense scatter workspace.
  std::vector<double> work(b.cols_, 0.0);
  std::vector<std::int64_t> mark(b.cols_, -1);
  std::vector<std::uint32_t> touched;
  std::vector<SparseEntry> rowbuf;
  for (std::size_t r = 0; r < a.rows_; ++r) {
    touched.clear();
    for (const auto& ea : a.row(r)) {
      for (const auto& eb : b.row(ea.col)) {
        if (mark[eb.col] != static_cast<std::int64_t>(r)) {
          mark[eb.col] = static_cast<std::int64_t>(r);
          work[eb.col] = 0.0;
          touched.push_back(eb.col);
        }
        work[eb.col] += ea.value * eb.value;
      }
    }
    std::sort(touched.begin(), touched.end());
    rowbuf.clear();
    for (auto col : touched) rowbuf.push_back({col, work[col]});
    c.append_row(rowbuf);
  }
  return c;
}

SparseRowMatrix SparseRowMatrix::add(double ca, const SparseRowMatrix& a, double cb,
                                     const SparseRowMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw ShapeError("add: matrix dimensions differ");
  SparseRowMatrix c(a.rows_, a.cols_);
  c.entries_.reserve(std::max(a.nnz(), b.nnz()));
  std::vector<SparseEntry> rowbuf;
  for (std::size_t r = 0; r < a.rows_; ++r) {
    rowbuf.clear();
    auto ra = a.row(r);
    auto rb = b.row(r);
    std::size_t i = 0, j = 0;
    while (i < ra.size() || j < rb.size()) {
      if (j == rb.size() || (i < ra.size() && ra[i].col < rb[j].col)) {
        rowbuf.push_back({ra[i].col, ca * ra[i].value});
        ++i;
      } else if (i == ra.size() || rb[j].col < ra[i].col) {
        rowbuf.push_back({rb[j].col, cb * rb[j].value});
        ++j;
      } else {
        rowbuf.push_back({ra[i].col, ca * ra[i].value + cb * rb[j].value});
        ++i;
        ++j;
      }
    }
    c.append_row(rowbuf);
  }
  return c;
}

double SparseRowMatrix::max_abs_asymmetry() const {
  if (rows_ != cols_) throw ShapeError("max_abs_asymmetry: matrix must be square");
  const SparseRowMatrix diff = add(1.0, *this, -1.0, transposed());
  double m = 0.0;
  for (const auto& e : diff.entries_) m = std::max(m, std::abs(e.value));
  return m;
}

void SparseRowMatrix::write_coordinate(std::ostream& os) const {
  for (std::size_t r = 0; r < rows_; ++r) write_row(os, r);
}

void SparseRowMatrix::write_row(std::ostream& os, std::size_t r) const {
  for (const auto& e : row(r)) os << r << ' ' << e.col << ' ' << e.value << '\n';
}

}  // namespace iit
