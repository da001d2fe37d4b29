#include "txmotif/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "txmotif/error.hpp"
#include "txmotif/korder.hpp"
#include "txmotif/txgraph.hpp"

namespace txmotif {
namespace {

// Samplers written out so the stream is identical across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) return static_cast<std::size_t>(std::max(0.0, std::round(mean + std::sqrt(mean) * normal())));
    const double limit = std::exp(-mean);
    std::size_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  /// Returns a size in 1..weights.size().
  std::size_t categorical(const std::vector<double>& weights) {
    double u = uniform();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (u < weights[i]) return i + 1;
      u -= weights[i];
    }
    return weights.size();
  }

 private:
  std::mt19937_64 rng_;
};

// splitmix64 finalizer; a bijection, so distinct counters give distinct ids.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string make_id(char prefix, std::uint64_t counter, std::uint64_t seed) {
  std::array<char, 24> buf{};
  std::snprintf(buf.data(), buf.size(), "%c%016llx", prefix,
                static_cast<unsigned long long>(mix(counter + seed * 0x2545F4914F6CDD1DULL + static_cast<std::uint64_t>(prefix) * 0x9E3779B97F4A7C15ULL)));
  return buf.data();
}

void check_histogram(const std::vector<double>& h, const char* name) {
  if (h.empty()) throw Error(ErrorCode::BadSpec, std::string(name) + " histogram is empty");
  double total = 0.0;
  for (double p : h) {
    if (!(p >= 0.0)) throw Error(ErrorCode::BadSpec, std::string(name) + " histogram has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::BadSpec, std::string(name) + " histogram must sum to 1");
}

std::map<std::size_t, double> default_planted_weights(int order, Sampler& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> cells{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}};
  std::map<std::size_t, double> w;
  for (auto [m, n] : cells) w[OccurrenceMatrix::index(m, n)] = rng.normal();
  if (order >= 2)
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 1}, {1, 2}})
      w[kFeaturesPerOrder + OccurrenceMatrix::index(m, n)] = rng.normal();
  return w;
}

}  // namespace

std::string_view to_string(PriceModel model) {
  return model == PriceModel::RandomWalk ? "random_walk" : "planted_linear";
}

PriceModel parse_price_model(std::string_view text) {
  if (text == "random_walk") return PriceModel::RandomWalk;
  if (text == "planted_linear" || text == "planted") return PriceModel::PlantedLinear;
  throw Error(ErrorCode::BadSpec, "unknown price model '" + std::string(text) + "'");
}

std::vector<double> default_input_sizes() {
  // Mass concentrated on small sizes with a thin tail past the clamp.
  std::vector<double> h{0.55, 0.20, 0.10, 0.05, 0.03, 0.02, 0.015, 0.01};
  const double tail = 1.0 - std::accumulate(h.begin(), h.end(), 0.0);
  h.resize(25, 0.0);
  h[11] = tail * 0.6;
  h[24] = tail * 0.4;
  return h;
}

std::vector<double> default_output_sizes() {
  std::vector<double> h{0.25, 0.55, 0.08, 0.04, 0.03, 0.02, 0.015, 0.005};
  const double tail = 1.0 - std::accumulate(h.begin(), h.end(), 0.0);
  h.resize(30, 0.0);
  h[14] = tail * 0.5;
  h[29] = tail * 0.5;
  return h;
}

void SynthSpec::validate() const {
  if (days < 1) throw Error(ErrorCode::BadSpec, "days must be >= 1");
  if (!(tx_per_day >= 0.0)) throw Error(ErrorCode::BadSpec, "tx_per_day must be >= 0");
  if (!(spend_probability >= 0.0 && spend_probability <= 1.0))
    throw Error(ErrorCode::BadSpec, "spend_probability must lie in [0, 1]");
  if (coinbase_per_day < 0) throw Error(ErrorCode::BadSpec, "coinbase_per_day must be >= 0");
  check_histogram(input_sizes, "input size");
  check_histogram(output_sizes, "output size");
  if (!(start_price > 0.0)) throw Error(ErrorCode::BadSpec, "start_price must be > 0");
  if (!(walk_volatility >= 0.0)) throw Error(ErrorCode::BadSpec, "walk_volatility must be >= 0");
  if (planted_order < 1) throw Error(ErrorCode::BadSpec, "planted_order must be >= 1");
  if (!(noise_fraction >= 0.0)) throw Error(ErrorCode::BadSpec, "noise_fraction must be >= 0");
  for (const auto& [index, weight] : planted_weights)
    if (index >= kFeaturesPerOrder * static_cast<std::size_t>(planted_order))
      throw Error(ErrorCode::BadSpec, "planted weight index " + std::to_string(index) + " outside feature vector");
}

SynthOutput generate(const SynthSpec& spec) {
  spec.validate();
  Sampler rng(spec.seed);
  SynthOutput out;
  std::uint64_t tx_counter = 0;
  std::uint64_t addr_counter = 0;
  std::vector<std::pair<std::size_t, std::size_t>> day_spans;  // [begin, end) into transactions

  for (int d = 0; d < spec.days; ++d) {
    const auto day_start =
        std::chrono::duration_cast<std::chrono::seconds>((spec.start_date + std::chrono::days(d)).time_since_epoch())
            .count();
    const std::size_t regular = rng.poisson(spec.tx_per_day);
    const std::size_t total = regular + static_cast<std::size_t>(spec.coinbase_per_day);
    const std::size_t begin = out.transactions.size();
    std::vector<std::string> pending;  // outputs that will be spent later today

    for (std::size_t i = 0; i < total; ++i) {
      TransactionRecord tx;
      tx.tx_id = make_id('t', tx_counter++, spec.seed);
      tx.timestamp = day_start + static_cast<std::int64_t>((86400 * (i + 1)) / (total + 1));
      const bool coinbase = i < static_cast<std::size_t>(spec.coinbase_per_day);
      if (!coinbase) {
        const std::size_t m = rng.categorical(spec.input_sizes);
        for (std::size_t s = 0; s < m; ++s) {
          if (!pending.empty()) {
            const std::size_t pick = rng.below(pending.size());
            tx.inputs.push_back(std::move(pending[pick]));
            pending[pick] = std::move(pending.back());
            pending.pop_back();
          } else {
            tx.inputs.push_back(make_id('a', addr_counter++, spec.seed));
          }
        }
      }
      const std::size_t n = coinbase ? 1 : rng.categorical(spec.output_sizes);
      for (std::size_t s = 0; s < n; ++s) {
        tx.outputs.push_back(make_id('a', addr_counter++, spec.seed));
        if (rng.bernoulli(spec.spend_probability)) pending.push_back(tx.outputs.back());
      }
      out.transactions.push_back(std::move(tx));
    }
    day_spans.emplace_back(begin, out.transactions.size());
  }

  std::vector<PricePoint> prices;
  prices.reserve(static_cast<std::size_t>(spec.days));
  double price = spec.start_price;
  if (spec.price_model == PriceModel::RandomWalk) {
    for (int d = 0; d < spec.days; ++d) {
      prices.push_back({spec.start_date + std::chrono::days(d), price});
      price *= std::exp(spec.walk_volatility * rng.normal());
    }
  } else {
    out.planted_weights =
        spec.planted_weights.empty() ? default_planted_weights(spec.planted_order, rng) : spec.planted_weights;
    std::vector<double> signal(day_spans.size(), 0.0);
    for (std::size_t d = 0; d < day_spans.size(); ++d) {
      const auto [begin, end] = day_spans[d];
      const auto graph = build_graph(std::span(out.transactions).subspan(begin, end - begin));
      const auto f = feature_vector(graph, spec.planted_order, 1);
      for (const auto& [index, weight] : out.planted_weights) signal[d] += weight * f[index];
    }
    // Centre the planted drift so the series hovers around start_price.
    out.planted_bias = -std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(signal.size());
    for (int d = 0; d < spec.days; ++d) {
      prices.push_back({spec.start_date + std::chrono::days(d), price});
      const auto i = static_cast<std::size_t>(d);
      price += signal[i] + out.planted_bias + spec.noise_fraction * price * rng.normal();
      if (!(price > 0.0) && d + 1 < spec.days)
        throw Error(ErrorCode::BadSpec, "planted relation drives the price non-positive; raise start_price");
    }
  }
  out.prices = PriceSeries(std::move(prices));
  return out;
}

void write_synth(const SynthOutput& out, const std::filesystem::path& tx_path, const std::filesystem::path& price_path) {
  std::ofstream tx(tx_path);
  if (!tx) throw Error(ErrorCode::MissingFile, "cannot write " + tx_path.string());
  write_transactions(tx, out.transactions);
  std::ofstream px(price_path);
  if (!px) throw Error(ErrorCode::MissingFile, "cannot write " + price_path.string());
  write_prices(px, out.prices);
}

}  // namespace txmotif
