#include "txmotif/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "txmotif/error.hpp"
#include "txmotif/korder.hpp"

namespace txmotif {

EnsembleWeights decay_weights(double r, int window) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::BadDecay, "r must lie in (0, 1), got " + std::to_string(r));
  if (window < 1) throw Error(ErrorCode::BadWindow, "window must be >= 1, got " + std::to_string(window));
  EnsembleWeights w{r, window, {1.0}};
  w.alphas.reserve(static_cast<std::size_t>(window));
  for (int i = 1; i < window; ++i) {
    const double last = w.alphas.back();
    w.alphas.back() = last * r;
    w.alphas.push_back(last * (1.0 - r));
  }
  return w;
}

double integrate(std::span<const double> estimates, const EnsembleWeights& weights) {
  if (estimates.size() != weights.alphas.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(estimates.size()) + " estimates for " +
                                               std::to_string(weights.alphas.size()) + " weights");
  double total = 0.0;
  for (std::size_t j = 0; j < estimates.size(); ++j) total += weights.alphas[j] * estimates[j];
  return total;
}

void HorizonEnsemble::validate() const {
  if (models.size() != static_cast<std::size_t>(weights.window) || weights.alphas.size() != models.size())
    throw Error(ErrorCode::BadWindow, "ensemble has " + std::to_string(models.size()) + " models for window " +
                                          std::to_string(weights.window));
  for (std::size_t j = 0; j < models.size(); ++j)
    if (models[j].offset != models.front().offset + static_cast<int>(j) || models[j].offset < 1)
      throw Error(ErrorCode::BadWindow, "model offsets must be consecutive and >= 1");
}

PricePrediction predict_price(const HorizonEnsemble& ensemble, const std::map<int, std::vector<double>>& day_features,
                              const std::map<int, double>& base_prices) {
  ensemble.validate();
  PricePrediction out;
  out.estimates.reserve(ensemble.models.size());
  for (const auto& m : ensemble.models) {
    auto f = day_features.find(m.offset);
    auto b = base_prices.find(m.offset);
    if (f == day_features.end() || b == base_prices.end())
      throw Error(ErrorCode::MissingOffset, "offset " + std::to_string(m.offset));
    out.estimates.push_back(b->second + predict(m.model, m.scaler.apply(f->second)));
  }
  out.price = integrate(out.estimates, ensemble.weights);
  return out;
}

nlohmann::json ensemble_to_json(const HorizonEnsemble& ensemble) {
  nlohmann::json j;
  j["schema_version"] = kModelSchemaVersion;
  j["max_order"] = ensemble.max_order;
  j["r"] = ensemble.weights.r;
  j["window"] = ensemble.weights.window;
  j["alphas"] = ensemble.weights.alphas;
  j["models"] = nlohmann::json::array();
  for (const auto& m : ensemble.models) {
    auto entry = model_to_json(m.model, m.scaler);
    entry["offset"] = m.offset;
    j["models"].push_back(std::move(entry));
  }
  return j;
}

HorizonEnsemble ensemble_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw Error(ErrorCode::BadModelFile, "unsupported schema_version");
    HorizonEnsemble e;
    e.max_order = j.at("max_order").get<int>();
    e.weights = decay_weights(j.at("r").get<double>(), j.at("window").get<int>());
    for (const auto& entry : j.at("models")) {
      auto [model, scaler] = model_from_json(entry);
      if (model.dimension() != kFeaturesPerOrder * static_cast<std::size_t>(e.max_order))
        throw Error(ErrorCode::BadModelFile, "model dimension does not match max_order");
      e.models.push_back({entry.at("offset").get<int>(), std::move(model), std::move(scaler)});
    }
    e.validate();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::BadModelFile, ex.what());
  }
}

void save_ensemble(const std::filesystem::path& path, const HorizonEnsemble& ensemble) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << ensemble_to_json(ensemble).dump(2) << '\n';
}

HorizonEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  try {
    return ensemble_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModelFile, e.what());
  }
}

}  // namespace txmotif
