#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fluxlat {

/// Real symmetric sparse matrix in compressed-row form. Assembly goes
/// through SparseBuilder, which merges coordinate entries with a stable
/// (row, col) sort so identical inputs give bit-identical operators.
class SparseOperator {
 public:
  SparseOperator() = default;

  std::int64_t dim() const { return dim_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(val_.size()); }

  /// y = H x with a fixed per-row accumulation order.
  void matvec(std::span<const double> x, std::span<double> y) const;
  std::vector<double> matvec(std::span<const double> x) const;

  /// Stored value at (row, col); 0 when absent.
  double coeff(std::int64_t row, std::int64_t col) const;

  /// Exact check that the stored entries equal their transpose.
  bool is_symmetric() const;

  /// max_row sum_col |H(row, col)|
  double inf_norm() const;

  template <class F>
  void for_each_entry(F&& f) const {
    for (std::int64_t r = 0; r < dim_; ++r)
      for (std::int64_t i = row_ptr_[static_cast<std::size_t>(r)];
           i < row_ptr_[static_cast<std::size_t>(r) + 1]; ++i)
        f(r, static_cast<std::int64_t>(col_[static_cast<std::size_t>(i)]),
          val_[static_cast<std::size_t>(i)]);
  }

 private:
  friend class SparseBuilder;

  std::int64_t dim_ = 0;
  std::vector<std::int64_t> row_ptr_;  // dim + 1
  std::vector<std::int32_t> col_;
  std::vector<double> val_;
};

/// Coordinate-entry accumulator. Duplicate coordinates are summed in
/// emission order; entries that sum to exactly zero are dropped.
class SparseBuilder {
 public:
  explicit SparseBuilder(std::int64_t dim);

  void add(std::int64_t row, std::int64_t col, double value);

  SparseOperator build();

 private:
  struct Entry {
    std::int64_t row;
    std::int64_t col;
    double value;
  };
  std::int64_t dim_;
  std::vector<Entry> entries_;
};

}  // namespace fluxlat
