#include "fluxlat/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fluxlat {

void SparseOperator::matvec(std::span<const double> x, std::span<double> y) const {
  if (static_cast<std::int64_t>(x.size()) != dim_ || static_cast<std::int64_t>(y.size()) != dim_)
    throw std::invalid_argument("matvec: vector length does not match operator dimension");
  for (std::int64_t r = 0; r < dim_; ++r) {
    double s = 0.0;
    for (std::int64_t i = row_ptr_[static_cast<std::size_t>(r)];
         i < row_ptr_[static_cast<std::size_t>(r) + 1]; ++i)
      s += val_[static_cast<std::size_t>(i)] *
           x[static_cast<std::size_t>(col_[static_cast<std::size_t>(i)])];
    y[static_cast<std::size_t>(r)] = s;
  }
}

std::vector<double> SparseOperator::matvec(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(dim_));
  matvec(x, y);
  return y;
}

double SparseOperator::coeff(std::int64_t row, std::int64_t col) const {
  if (row < 0 || row >= dim_ || col < 0 || col >= dim_)
    throw std::out_of_range("coeff: index outside operator");
  const auto* begin = col_.data() + row_ptr_[static_cast<std::size_t>(row)];
  const auto* end = col_.data() + row_ptr_[static_cast<std::size_t>(row) + 1];
  const auto* it = std::lower_bound(begin, end, static_cast<std::int32_t>(col));
  if (it != end && *it == col) return val_[static_cast<std::size_t>(it - col_.data())];
  return 0.0;
}

bool SparseOperator::is_symmetric() const {
  bool ok = true;
  for_each_entry([&](std::int64_t r, std::int64_t c, double v) {
    if (coeff(c, r) != v) ok = false;
  });
  return ok;
}

double SparseOperator::inf_norm() const {
  double best = 0.0;
  for (std::int64_t r = 0; r < dim_; ++r) {
    double s = 0.0;
    for (std::int64_t i = row_ptr_[static_cast<std::size_t>(r)];
         i < row_ptr_[static_cast<std::size_t>(r) + 1]; ++i)
      s += std::abs(val_[static_cast<std::size_t>(i)]);
    best = std::max(best, s);
  }
  return best;
}

SparseBuilder::SparseBuilder(std::int64_t dim) : dim_(dim) {
  if (dim < 0) throw std::invalid_argument("SparseBuilder: negative dimension");
  if (dim > std::numeric_limits<std::int32_t>::max())
    throw std::invalid_argument("SparseBuilder: dimension exceeds 32-bit column index range");
}

void SparseBuilder::add(std::int64_t row, std::int64_t col, double value) {
  if (row < 0 || row >= dim_ || col < 0 || col >= dim_)
    throw std::out_of_range("SparseBuilder::add: index outside matrix");
  if (value == 0.0) return;
  entries_.push_back({row, col, value});
}

SparseOperator SparseBuilder::build() {
  std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseOperator op;
  op.dim_ = dim_;
  op.row_ptr_.assign(static_cast<std::size_t>(dim_) + 1, 0);
  op.col_.reserve(entries_.size());
  op.val_.reserve(entries_.size());

  std::size_t i = 0;
  while (i < entries_.size()) {
    const std::int64_t r = entries_[i].row;
    const std::int64_t c = entries_[i].col;
    double v = 0.0;
    while (i < entries_.size() && entries_[i].row == r && entries_[i].col == c) {
      v += entries_[i].value;
      ++i;
    }
    if (v != 0.0) {
      op.col_.push_back(static_cast<std::int32_t>(c));
      op.val_.push_back(v);
      ++op.row_ptr_[static_cast<std::size_t>(r) + 1];
    }
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(dim_); ++r)
    op.row_ptr_[r + 1] += op.row_ptr_[r];

  entries_.clear();
  entries_.shrink_to_fit();
  return op;
}

}  // namespace fluxlat
