#include "txmotif/korder.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "txmotif/error.hpp"

namespace txmotif {
namespace {

void check_order(int k) {
  if (k < 1) throw Error(ErrorCode::OrderOutOfRange, "order must be >= 1, got " + std::to_string(k));
}

std::size_t clamp_size(std::size_t v) { return std::min(v, kPatternClamp); }

}  // namespace

std::size_t OccurrenceMatrix::index(std::size_t m, std::size_t n) {
  if (m < 1 || m > kPatternClamp || n < 1 || n > kPatternClamp)
    throw std::out_of_range("occurrence cell (" + std::to_string(m) + "," + std::to_string(n) + ")");
  return (m - 1) * kPatternClamp + (n - 1);
}

void OccurrenceMatrix::add(SubgraphShape shape) {
  if (shape.n == 0 || shape.m == 0) return;
  ++counts_[index(clamp_size(shape.m), clamp_size(shape.n))];
}

std::int64_t OccurrenceMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

void OccurrenceMatrix::append_flat(std::vector<double>& out) const {
  for (auto c : counts_) out.push_back(static_cast<double>(c));
}

SparseBoolMatrix input_incidence(const TransactionGraph& graph) {
  std::vector<std::vector<SparseBoolMatrix::Index>> rows(graph.address_count());
  for (TxIndex t = 0; t < graph.transaction_count(); ++t)
    for (AddressId a : graph.inputs(t)) rows[a].push_back(t);
  return SparseBoolMatrix::from_rows(graph.transaction_count(), std::move(rows));
}

SparseBoolMatrix output_incidence(const TransactionGraph& graph) {
  std::vector<std::vector<SparseBoolMatrix::Index>> rows(graph.transaction_count());
  for (TxIndex t = 0; t < graph.transaction_count(); ++t) {
    const auto out = graph.outputs(t);
    rows[t].assign(out.begin(), out.end());
  }
  return SparseBoolMatrix::from_rows(graph.address_count(), std::move(rows));
}

SparseBoolMatrix transition_matrix(const SparseBoolMatrix& P, const SparseBoolMatrix& Q, int k, unsigned threads) {
  check_order(k);
  if (P.rows() != Q.cols() || P.cols() != Q.rows())
    throw Error(ErrorCode::DimensionMismatch, "P and Q are not transposed shapes");
  SparseBoolMatrix m = Q;
  if (k == 1) return m;
  const SparseBoolMatrix qp = multiply(Q, P, threads);
  for (int step = 1; step < k; ++step) m = multiply(qp, m, threads);
  return m;
}

CountMatrix transition_matrix_counts(const SparseBoolMatrix& P, const SparseBoolMatrix& Q, int k) {
  check_order(k);
  if (P.rows() != Q.cols() || P.cols() != Q.rows())
    throw Error(ErrorCode::DimensionMismatch, "P and Q are not transposed shapes");
  const CountMatrix q = CountMatrix::from_bool(Q);
  const CountMatrix qp = multiply(q, CountMatrix::from_bool(P));
  CountMatrix m = q;
  for (int step = 1; step < k; ++step) m = multiply(qp, m);
  return m;
}

OccurrenceMatrix tally_occurrences(const TransactionGraph& graph, const SparseBoolMatrix& transition, int k) {
  if (transition.rows() != graph.transaction_count())
    throw Error(ErrorCode::DimensionMismatch, "transition rows do not match transaction count");
  OccurrenceMatrix oc(k);
  for (const auto& set : input_sets(graph)) oc.add({set.members.size(), transition.row(set.tx).size()});
  return oc;
}

OccurrenceMatrix occurrence_matrix(const TransactionGraph& graph, int k, unsigned threads) {
  check_order(k);
  return occurrence_matrices(graph, k, threads).back();
}

std::vector<OccurrenceMatrix> occurrence_matrices(const TransactionGraph& graph, int max_order, unsigned threads) {
  check_order(max_order);
  const SparseBoolMatrix P = input_incidence(graph);
  const SparseBoolMatrix Q = output_incidence(graph);
  std::vector<OccurrenceMatrix> out;
  out.reserve(static_cast<std::size_t>(max_order));
  SparseBoolMatrix m = Q;
  out.push_back(tally_occurrences(graph, m, 1));
  if (max_order == 1) return out;
  const SparseBoolMatrix qp = multiply(Q, P, threads);
  for (int k = 2; k <= max_order; ++k) {
    m = multiply(qp, m, threads);
    out.push_back(tally_occurrences(graph, m, k));
  }
  return out;
}

OccurrenceMatrix occurrence_matrix_oracle(const TransactionGraph& graph, int k) {
  check_order(k);
  const std::size_t tx_count = graph.transaction_count();
  std::vector<std::vector<TxIndex>> spenders(graph.address_count());
  for (TxIndex t = 0; t < tx_count; ++t)
    for (AddressId a : graph.inputs(t)) spenders[a].push_back(t);

  OccurrenceMatrix oc(k);
  for (TxIndex root = 0; root < tx_count; ++root) {
    std::set<TxIndex> level{root};
    for (int depth = 1; depth < k && !level.empty(); ++depth) {
      std::set<TxIndex> next;
      for (TxIndex t : level)
        for (AddressId a : graph.outputs(t))
          for (TxIndex s : spenders[a]) next.insert(s);
      level = std::move(next);
    }
    std::set<AddressId> frontier;
    for (TxIndex t : level)
      for (AddressId a : graph.outputs(t)) frontier.insert(a);
    oc.add({graph.inputs(root).size(), frontier.size()});
  }
  return oc;
}

std::vector<double> feature_vector(const TransactionGraph& graph, int max_order, unsigned threads) {
  std::vector<double> out;
  out.reserve(kFeaturesPerOrder * static_cast<std::size_t>(std::max(max_order, 0)));
  for (const auto& oc : occurrence_matrices(graph, max_order, threads)) oc.append_flat(out);
  return out;
}

}  // namespace txmotif
