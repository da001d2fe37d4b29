#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "txmotif/features.hpp"
#include "txmotif/ingest.hpp"

namespace txmotif {

enum class RegressorKind { Ridge, LinearSvr };

std::string_view to_string(RegressorKind kind);
/// Accepts "ridge", "svr" and "linear_svr". Throws BadSpec otherwise.
RegressorKind parse_regressor_kind(std::string_view text);

struct RegressorSpec {
  RegressorKind kind = RegressorKind::Ridge;
  double ridge_lambda = 1.0;
  double svr_c = 1.0;
  double svr_epsilon = 0.1;
  int svr_epochs = 200;
  double svr_learning_rate = 1e-3;
  std::uint64_t seed = 42;

  /// Throws BadSpec when a parameter is outside its range.
  void validate() const;
};

struct DateRange {
  Day first;
  Day last;
};

struct FittedModel {
  std::vector<double> weights;
  double bias = 0.0;
  RegressorSpec spec;
  std::optional<DateRange> train_range;

  std::size_t dimension() const noexcept { return weights.size(); }
};

/// Accepted-epoch objective values of a linear SVR fit.
struct SvrTrace {
  std::vector<double> objective;
  int epochs_run = 0;
  int rejected_epochs = 0;
};

/// Ridge: exact solution of (Xc'Xc + lambda I) w = Xc'yc on centered data,
/// so the intercept is never penalized. Linear SVR: epsilon-insensitive loss
/// plus 0.5|w|^2, minimized by seeded epoch-shuffled subgradient steps with
/// 1/t step decay; an epoch that raises the objective is rolled back and the
/// step halved. Throws TooFewRows, DimensionMismatch, SingularSystem.
FittedModel fit(const RegressorSpec& spec, std::span<const std::vector<double>> x, std::span<const double> y,
                SvrTrace* trace = nullptr);
/// Rows must all carry targets; their dates fill train_range.
FittedModel fit(const RegressorSpec& spec, std::span<const FeatureRow> rows, SvrTrace* trace = nullptr);

/// w'x + b. Throws DimensionMismatch.
double predict(const FittedModel& model, std::span<const double> x);

/// 0.5|w|^2 + C * sum max(0, |y - w'x - b| - eps)
double svr_objective(const FittedModel& model, std::span<const std::vector<double>> x, std::span<const double> y);

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json to_json(const RegressorSpec& spec);
RegressorSpec regressor_spec_from_json(const nlohmann::json& j);
/// Model plus the scaler its inputs were standardized with.
nlohmann::json model_to_json(const FittedModel& model, const Scaler& scaler);
/// Validates that weight and scaler dimensions agree. Throws BadModelFile.
std::pair<FittedModel, Scaler> model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const FittedModel& model, const Scaler& scaler);
std::pair<FittedModel, Scaler> load_model(const std::filesystem::path& path);

}  // namespace txmotif
