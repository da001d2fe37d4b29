#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string_view>
#include <vector>

#include "txmotif/ingest.hpp"

namespace txmotif {

enum class PriceModel { RandomWalk, PlantedLinear };

std::string_view to_string(PriceModel model);
/// "random_walk" or "planted_linear"; throws BadSpec otherwise.
PriceModel parse_price_model(std::string_view text);

/// Size histograms: element i is the probability of size i + 1.
std::vector<double> default_input_sizes();
std::vector<double> default_output_sizes();

struct SynthSpec {
  int days = 400;
  double tx_per_day = 200.0;  // Poisson mean
  std::vector<double> input_sizes = default_input_sizes();
  std::vector<double> output_sizes = default_output_sizes();
  double spend_probability = 0.3;  // chance an output is spent later the same day
  int coinbase_per_day = 1;
  std::uint64_t seed = 42;
  Day start_date = Day{std::chrono::year{2020} / 1 / 1};

  PriceModel price_model = PriceModel::RandomWalk;
  double start_price = 10000.0;
  double walk_volatility = 0.03;  // daily log-return standard deviation

  /// planted_linear: P_{t+1} - P_t = w' feature(day t) + bias + noise.
  int planted_order = 2;
  std::map<std::size_t, double> planted_weights;  // feature index -> weight; empty picks a default set
  double noise_fraction = 0.0;                    // noise sd as a fraction of P_t

  /// Throws BadSpec.
  void validate() const;
};

struct SynthOutput {
  std::vector<TransactionRecord> transactions;
  PriceSeries prices;
  std::map<std::size_t, double> planted_weights;
  double planted_bias = 0.0;
};

/// Deterministic for a fixed spec (including seed). Each day's graph is
/// generated independently: spends only reference outputs created earlier
/// the same day.
SynthOutput generate(const SynthSpec& spec);

void write_synth(const SynthOutput& out, const std::filesystem::path& tx_path, const std::filesystem::path& price_path);

}  // namespace txmotif
