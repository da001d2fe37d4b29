#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "test_support.hpp"
#include "txmotif/error.hpp"
#include "txmotif/korder.hpp"
#include "txmotif/synth.hpp"
#include "txmotif/txgraph.hpp"

namespace txmotif {
namespace {

SynthSpec tiny() {
  SynthSpec s;
  s.days = 15;
  s.tx_per_day = 80;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Synth, SameSeedSameBytes) {
  testing::TempDir dir;
  for (const auto model : {PriceModel::RandomWalk, PriceModel::PlantedLinear}) {
    auto s = tiny();
    s.price_model = model;
    write_synth(generate(s), dir / "a_tx.csv", dir / "a_px.csv");
    write_synth(generate(s), dir / "b_tx.csv", dir / "b_px.csv");
    EXPECT_EQ(slurp(dir / "a_tx.csv"), slurp(dir / "b_tx.csv"));
    EXPECT_EQ(slurp(dir / "a_px.csv"), slurp(dir / "b_px.csv"));
    s.seed = 43;
    write_synth(generate(s), dir / "c_tx.csv", dir / "c_px.csv");
    EXPECT_NE(slurp(dir / "a_tx.csv"), slurp(dir / "c_tx.csv"));
  }
}

TEST(Synth, OutputIngestsCleanly) {
  testing::TempDir dir;
  const auto out = generate(tiny());
  write_synth(out, dir / "tx.csv", dir / "px.csv");
  const auto records = parse_transactions(dir / "tx.csv");
  EXPECT_EQ(records, out.transactions);
  const auto prices = parse_prices(dir / "px.csv");
  EXPECT_EQ(prices.size(), 15u);
  const auto windows = partition_daily(records);
  EXPECT_EQ(windows.size(), 15u);
  for (const auto& w : windows) EXPECT_EQ(w.transactions.front().inputs.size(), 0u);  // coinbase first
}

TEST(Synth, NoSpendingMeansNoSecondOrderMotifs) {
  auto s = tiny();
  s.spend_probability = 0.0;
  const auto out = generate(s);
  for (const auto& w : partition_daily(out.transactions)) {
    const auto oc = occurrence_matrix(build_graph(w), 2, 1);
    EXPECT_EQ(oc.total(), 0u);
  }
}

TEST(Synth, SpendingCreatesSecondOrderMotifs) {
  const auto out = generate(tiny());
  std::size_t total = 0;
  for (const auto& w : partition_daily(out.transactions)) total += occurrence_matrix(build_graph(w), 2, 1).total();
  EXPECT_GT(total, 0u);
}

// Goodness of fit of drawn input counts against the configured histogram.
TEST(Synth, InputSizesFollowHistogram) {
  SynthSpec s;
  s.days = 50;
  s.tx_per_day = 200;
  s.seed = 7;
  const auto out = generate(s);
  const auto probs = s.input_sizes;
  std::vector<double> observed(probs.size(), 0.0);
  double n = 0;
  for (const auto& t : out.transactions) {
    if (t.is_coinbase()) continue;
    ASSERT_LE(t.inputs.size(), probs.size());
    observed[t.inputs.size() - 1] += 1;
    n += 1;
  }
  ASSERT_GT(n, 9000);
  // Merge sparse tail bins so every expected count is at least 5.
  double chi2 = 0, obs_acc = 0, exp_acc = 0;
  int bins = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    obs_acc += observed[i];
    exp_acc += probs[i] * n;
    if (exp_acc >= 5.0 || i + 1 == probs.size()) {
      if (exp_acc > 0) {
        chi2 += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
        ++bins;
      }
      obs_acc = exp_acc = 0;
    }
  }
  const double df = bins - 1;
  // Wilson-Hilferty approximation of the 0.999 quantile.
  const double z = 3.09;
  const double critical = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
  EXPECT_LT(chi2, critical) << "df " << df;
}

TEST(Synth, PlantedPricesFollowRelation) {
  auto s = tiny();
  s.price_model = PriceModel::PlantedLinear;
  const auto out = generate(s);
  ASSERT_FALSE(out.planted_weights.empty());
  const auto windows = partition_daily(out.transactions);
  const auto& px = out.prices.entries();
  for (std::size_t d = 0; d + 1 < px.size(); ++d) {
    const auto f = feature_vector(build_graph(windows[d]), s.planted_order, 1);
    double drift = out.planted_bias;
    for (const auto& [i, w] : out.planted_weights) drift += w * f[i];
    EXPECT_NEAR(px[d + 1].close - px[d].close, drift, 1e-6 * px[d].close);
  }
}

TEST(Synth, RejectsBadSpecs) {
  auto expect_bad = [](auto mutate) {
    auto s = tiny();
    mutate(s);
    try {
      s.validate();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadSpec);
    }
  };
  expect_bad([](SynthSpec& s) { s.days = 0; });
  expect_bad([](SynthSpec& s) { s.spend_probability = 1.5; });
  expect_bad([](SynthSpec& s) { s.input_sizes = {0.5, 0.2}; });
  expect_bad([](SynthSpec& s) { s.input_sizes.clear(); });
  expect_bad([](SynthSpec& s) { s.start_price = 0; });
  expect_bad([](SynthSpec& s) { s.planted_weights = {{999999, 1.0}}; });
  EXPECT_THROW(parse_price_model("garch"), Error);
}

TEST(Synth, DefaultHistogramsAreDistributions) {
  for (const auto& h : {default_input_sizes(), default_output_sizes()}) {
    EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), 1.0, 1e-9);
    EXPECT_GT(h.size(), static_cast<std::size_t>(kPatternClamp));  // exercises the clamp
  }
}

}  // namespace
}  // namespace txmotif
