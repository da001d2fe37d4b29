#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "txmotif/features.hpp"
#include "txmotif/regress.hpp"

namespace txmotif {

/// Integration weights alpha_1..alpha_window; alpha_1 belongs to the
/// nearest history offset.
struct EnsembleWeights {
  double r = 0.8;
  int window = 1;
  std::vector<double> alphas;
};

/// Starts from [1.0]; each growth step keeps the prefix, scales the last
/// weight by r and appends the remainder (1 - r) of it.
/// Throws BadDecay unless 0 < r < 1, BadWindow unless window >= 1.
EnsembleWeights decay_weights(double r, int window);

/// sum_j alpha_j * estimates[j]. Throws LengthMismatch.
double integrate(std::span<const double> estimates, const EnsembleWeights& weights);

struct OffsetModel {
  int offset = 1;  // days between the feature day and the predicted day
  FittedModel model;
  Scaler scaler;
};

/// One model per offset first_offset .. first_offset + window - 1.
struct HorizonEnsemble {
  int max_order = 1;
  std::vector<OffsetModel> models;
  EnsembleWeights weights;

  int first_offset() const { return models.empty() ? 1 : models.front().offset; }
  /// Throws BadWindow if offsets are not consecutive or the count is off.
  void validate() const;
};

struct PricePrediction {
  double price = 0.0;
  std::vector<double> estimates;  // per offset, P_{t'-j} + predicted diff
};

/// Estimates the price of day t' from features of days t'-j and prices P_{t'-j}
/// keyed by offset j. Throws MissingOffset.
PricePrediction predict_price(const HorizonEnsemble& ensemble, const std::map<int, std::vector<double>>& day_features,
                              const std::map<int, double>& base_prices);

nlohmann::json ensemble_to_json(const HorizonEnsemble& ensemble);
HorizonEnsemble ensemble_from_json(const nlohmann::json& j);
void save_ensemble(const std::filesystem::path& path, const HorizonEnsemble& ensemble);
HorizonEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace txmotif
