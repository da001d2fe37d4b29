#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "txmotif/sparse_bool_matrix.hpp"
#include "txmotif/txgraph.hpp"

#ifndef TXMOTIF_PATTERN_CLAMP
#define TXMOTIF_PATTERN_CLAMP 20
#endif

namespace txmotif {

/// Input and output counts above this collapse into the last row / column.
inline constexpr std::size_t kPatternClamp = TXMOTIF_PATTERN_CLAMP;
inline constexpr std::size_t kFeaturesPerOrder = kPatternClamp * kPatternClamp;

/// Pattern class of a k-order subgraph: m input addresses, n frontier addresses.
struct SubgraphShape {
  std::size_t m = 1;
  std::size_t n = 0;
};

/// Counts of k-order subgraph patterns in one window, cells (m, n) 1-based.
class OccurrenceMatrix {
 public:
  explicit OccurrenceMatrix(int order = 1) : order_(order) {}

  int order() const noexcept { return order_; }
  std::int64_t at(std::size_t m, std::size_t n) const { return counts_.at(index(m, n)); }
  /// Tallies one subgraph after clamping; shapes with n == 0 are ignored.
  void add(SubgraphShape shape);
  std::int64_t total() const noexcept;
  /// Row-major: (m=1, n=1..C), (m=2, n=1..C), ...
  void append_flat(std::vector<double>& out) const;

  static std::size_t index(std::size_t m, std::size_t n);

  friend bool operator==(const OccurrenceMatrix&, const OccurrenceMatrix&) = default;

 private:
  int order_;
  std::array<std::int64_t, kFeaturesPerOrder> counts_{};
};

/// P: |A| x |T|, entry (a, t) when address a is an input of transaction t.
SparseBoolMatrix input_incidence(const TransactionGraph& graph);
/// Q: |T| x |A|, entry (t, a) when address a is an output of transaction t.
SparseBoolMatrix output_incidence(const TransactionGraph& graph);

/// M^k = H (QP)^(k-1) Q under the boolean semiring. H selects each
/// transaction's own row, so row t of the result is the set of addresses
/// reached from t in exactly k transaction hops. Throws OrderOutOfRange for k < 1.
SparseBoolMatrix transition_matrix(const SparseBoolMatrix& P, const SparseBoolMatrix& Q, int k,
                                   unsigned threads = 1);
/// Same product over integer path counts. Dense; small graphs only.
CountMatrix transition_matrix_counts(const SparseBoolMatrix& P, const SparseBoolMatrix& Q, int k);

/// Tallies (|A_i|, |row i of M^k|) over all transactions.
OccurrenceMatrix tally_occurrences(const TransactionGraph& graph, const SparseBoolMatrix& transition, int k);

OccurrenceMatrix occurrence_matrix(const TransactionGraph& graph, int k, unsigned threads = 1);
/// OC^1 .. OC^s, reusing each transition matrix for the next order.
std::vector<OccurrenceMatrix> occurrence_matrices(const TransactionGraph& graph, int max_order,
                                                  unsigned threads = 1);

/// Reference implementation: walks output -> spending-transaction edges
/// level by level for each root transaction, without any matrix algebra.
OccurrenceMatrix occurrence_matrix_oracle(const TransactionGraph& graph, int k);

/// Concatenated OC^1..OC^s, length kFeaturesPerOrder * s.
std::vector<double> feature_vector(const TransactionGraph& graph, int max_order, unsigned threads = 1);

}  // namespace txmotif
