#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "txmotif/ingest.hpp"

namespace txmotif {

using AddressId = std::uint32_t;
using TxIndex = std::uint32_t;

/// Dense string <-> id table; ids follow first-appearance order.
class InternTable {
 public:
  std::uint32_t intern(std::string_view key);
  /// Returns the id, or size() when the key is unknown.
  std::uint32_t find(std::string_view key) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Bipartite address/transaction graph of one day window. Edges run
/// address -> transaction (inputs) and transaction -> address (outputs).
/// Coinbase records are not admitted.
class TransactionGraph {
 public:
  const InternTable& addresses() const noexcept { return addresses_; }
  const InternTable& transactions() const noexcept { return transactions_; }

  std::size_t address_count() const noexcept { return addresses_.size(); }
  std::size_t transaction_count() const noexcept { return transactions_.size(); }
  std::size_t skipped_coinbase() const noexcept { return skipped_coinbase_; }

  /// Sorted, deduplicated input / output address ids of transaction `tx`.
  std::span<const AddressId> inputs(TxIndex tx) const { return in_edges_.at(tx); }
  std::span<const AddressId> outputs(TxIndex tx) const { return out_edges_.at(tx); }

  /// Writes one line per transaction: `txid | in: a,b | out: c,d`.
  void dump(std::ostream& out) const;

  friend TransactionGraph build_graph(std::span<const TransactionRecord> records);

 private:
  InternTable addresses_;
  InternTable transactions_;
  std::vector<std::vector<AddressId>> in_edges_;
  std::vector<std::vector<AddressId>> out_edges_;
  std::size_t skipped_coinbase_ = 0;
};

TransactionGraph build_graph(std::span<const TransactionRecord> records);
inline TransactionGraph build_graph(const DayWindow& window) { return build_graph(window.transactions); }

/// Input address set A_i of one transaction.
struct InputSet {
  TxIndex tx = 0;
  std::vector<AddressId> members;  // sorted ascending, non-empty
};

std::vector<InputSet> input_sets(const TransactionGraph& graph);

}  // namespace txmotif
