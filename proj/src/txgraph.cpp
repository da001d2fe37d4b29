#include "txmotif/txgraph.hpp"

#include <algorithm>
#include <ostream>

namespace txmotif {
namespace {

std::vector<AddressId> intern_set(InternTable& table, const std::vector<std::string>& names) {
  std::vector<AddressId> ids;
  ids.reserve(names.size());
  for (const auto& name : names) ids.push_back(table.intern(name));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace

std::uint32_t InternTable::intern(std::string_view key) {
  auto [it, inserted] = ids_.try_emplace(std::string(key), static_cast<std::uint32_t>(names_.size()));
  if (inserted) names_.push_back(it->first);
  return it->second;
}

std::uint32_t InternTable::find(std::string_view key) const {
  auto it = ids_.find(std::string(key));
  return it == ids_.end() ? static_cast<std::uint32_t>(names_.size()) : it->second;
}

TransactionGraph build_graph(std::span<const TransactionRecord> records) {
  TransactionGraph graph;
  graph.in_edges_.reserve(records.size());
  graph.out_edges_.reserve(records.size());
  for (const auto& record : records) {
    if (record.is_coinbase()) {
      ++graph.skipped_coinbase_;
      continue;
    }
    graph.transactions_.intern(record.tx_id);
    graph.in_edges_.push_back(intern_set(graph.addresses_, record.inputs));
    graph.out_edges_.push_back(intern_set(graph.addresses_, record.outputs));
  }
  return graph;
}

void TransactionGraph::dump(std::ostream& out) const {
  auto list = [&](std::span<const AddressId> ids) {
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << addresses_.name(ids[i]);
  };
  for (TxIndex t = 0; t < transaction_count(); ++t) {
    out << transactions_.name(t) << " | in: ";
    list(inputs(t));
    out << " | out: ";
    list(outputs(t));
    out << '\n';
  }
}

std::vector<InputSet> input_sets(const TransactionGraph& graph) {
  std::vector<InputSet> sets;
  sets.reserve(graph.transaction_count());
  for (TxIndex t = 0; t < graph.transaction_count(); ++t) {
    const auto in = graph.inputs(t);
    sets.push_back({t, {in.begin(), in.end()}});
  }
  return sets;
}

}  // namespace txmotif
