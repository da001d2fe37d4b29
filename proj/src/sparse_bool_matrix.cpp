#include "txmotif/sparse_bool_matrix.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "txmotif/parallel.hpp"

namespace txmotif {

SparseBoolMatrix::SparseBoolMatrix(std::size_t rows, std::size_t cols) : cols_(cols), row_ptr_(rows + 1, 0) {}

SparseBoolMatrix::SparseBoolMatrix(std::size_t rows, std::size_t cols,
                                   std::span<const std::pair<Index, Index>> entries) {
  std::vector<std::vector<Index>> lists(rows);
  for (auto [r, c] : entries) {
    if (r >= rows || c >= cols)
      throw std::out_of_range("entry (" + std::to_string(r) + "," + std::to_string(c) + ") outside " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    lists[r].push_back(c);
  }
  *this = from_rows(cols, std::move(lists));
}

SparseBoolMatrix SparseBoolMatrix::identity(std::size_t n) {
  std::vector<std::vector<Index>> lists(n);
  for (std::size_t i = 0; i < n; ++i) lists[i].push_back(static_cast<Index>(i));
  return from_rows(n, std::move(lists));
}

SparseBoolMatrix SparseBoolMatrix::from_rows(std::size_t cols, std::vector<std::vector<Index>> rows) {
  SparseBoolMatrix m(rows.size(), cols);
  std::size_t total = 0;
  for (auto& list : rows) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (!list.empty() && list.back() >= cols) throw std::out_of_range("column index outside matrix");
    total += list.size();
  }
  m.col_idx_.reserve(total);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    m.col_idx_.insert(m.col_idx_.end(), rows[r].begin(), rows[r].end());
    m.row_ptr_[r + 1] = m.col_idx_.size();
  }
  return m;
}

bool SparseBoolMatrix::contains(std::size_t r, std::size_t c) const {
  if (r >= rows()) return false;
  const auto list = row(r);
  return std::binary_search(list.begin(), list.end(), static_cast<Index>(c));
}

SparseBoolMatrix SparseBoolMatrix::transpose() const {
  std::vector<std::vector<Index>> lists(cols_);
  for (std::size_t r = 0; r < rows(); ++r)
    for (Index c : row(r)) lists[c].push_back(static_cast<Index>(r));
  return from_rows(rows(), std::move(lists));
}

SparseBoolMatrix multiply(const SparseBoolMatrix& lhs, const SparseBoolMatrix& rhs, unsigned threads) {
  if (lhs.cols() != rhs.rows())
    throw std::invalid_argument("boolean product of " + std::to_string(lhs.rows()) + "x" +
                                std::to_string(lhs.cols()) + " and " + std::to_string(rhs.rows()) + "x" +
                                std::to_string(rhs.cols()));
  const std::size_t n = lhs.rows();
  std::vector<std::vector<SparseBoolMatrix::Index>> out(n);

  // One marker array per worker chunk; rows are independent.
  const std::size_t workers = std::clamp<std::size_t>(resolve_threads(threads), 1, std::max<std::size_t>(n, 1));
  const std::size_t chunk = (n + workers - 1) / workers;
  parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t w) {
    std::vector<bool> mark(rhs.cols(), false);
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    for (std::size_t r = begin; r < end; ++r) {
      auto& dst = out[r];
      for (auto mid : lhs.row(r))
        for (auto c : rhs.row(mid))
          if (!mark[c]) {
            mark[c] = true;
            dst.push_back(c);
          }
      for (auto c : dst) mark[c] = false;
    }
  });
  return SparseBoolMatrix::from_rows(rhs.cols(), std::move(out));
}

CountMatrix::CountMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows != 0 && cols > kMaxCells / rows) throw std::length_error("count matrix too large for dense mode");
  cells_.assign(rows * cols, 0);
}

CountMatrix CountMatrix::from_bool(const SparseBoolMatrix& m) {
  CountMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto c : m.row(r)) out.at(r, c) = 1;
  return out;
}

SparseBoolMatrix CountMatrix::threshold() const {
  std::vector<std::vector<SparseBoolMatrix::Index>> lists(rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (at(r, c) > 0) lists[r].push_back(static_cast<SparseBoolMatrix::Index>(c));
  return SparseBoolMatrix::from_rows(cols_, std::move(lists));
}

CountMatrix multiply(const CountMatrix& lhs, const CountMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) throw std::invalid_argument("count matrix dimension mismatch");
  CountMatrix out(lhs.rows(), rhs.cols());
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const std::uint64_t a = lhs.at(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) {
        const std::uint64_t b = rhs.at(k, j);
        if (b == 0) continue;
        if (b > kMax / a || out.at(i, j) > kMax - a * b) throw std::overflow_error("path count overflow");
        out.at(i, j) += a * b;
      }
    }
  return out;
}

}  // namespace txmotif
