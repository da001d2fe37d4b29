#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace txmotif {

/// Boolean-semiring sparse matrix in compressed-row form. Each row holds a
/// sorted, duplicate-free list of the columns that are true.
class SparseBoolMatrix {
 public:
  using Index = std::uint32_t;

  SparseBoolMatrix() = default;
  SparseBoolMatrix(std::size_t rows, std::size_t cols);
  /// Throws std::out_of_range on an out-of-bounds entry; duplicates collapse.
  SparseBoolMatrix(std::size_t rows, std::size_t cols, std::span<const std::pair<Index, Index>> entries);

  static SparseBoolMatrix identity(std::size_t n);
  /// Rows given as column lists; each list is sorted and deduplicated here.
  static SparseBoolMatrix from_rows(std::size_t cols, std::vector<std::vector<Index>> rows);

  std::size_t rows() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return col_idx_.size(); }

  std::span<const Index> row(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], col_idx_.data() + row_ptr_[r + 1]};
  }
  bool contains(std::size_t r, std::size_t c) const;

  SparseBoolMatrix transpose() const;

  friend bool operator==(const SparseBoolMatrix&, const SparseBoolMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> col_idx_;
};

/// Boolean product (OR of ANDs). Rows are computed independently over up to
/// `threads` workers (0 = machine parallelism); the result is identical for
/// any thread count. Throws std::invalid_argument on a dimension mismatch.
SparseBoolMatrix multiply(const SparseBoolMatrix& lhs, const SparseBoolMatrix& rhs, unsigned threads = 1);

/// Dense non-negative integer matrix counting paths, for small graphs only.
class CountMatrix {
 public:
  static constexpr std::size_t kMaxCells = std::size_t{1} << 22;

  CountMatrix(std::size_t rows, std::size_t cols);
  static CountMatrix from_bool(const SparseBoolMatrix& m);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint64_t at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
  std::uint64_t& at(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }

  /// Entries > 0 become true.
  SparseBoolMatrix threshold() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint64_t> cells_;
};

/// Integer product; throws std::overflow_error if any path count overflows.
CountMatrix multiply(const CountMatrix& lhs, const CountMatrix& rhs);

}  // namespace txmotif
