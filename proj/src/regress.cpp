#include "txmotif/regress.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "txmotif/error.hpp"

namespace txmotif {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_matrix(std::span<const std::vector<double>> x) {
  const std::size_t dim = x.front().size();
  MatrixXd m(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != dim) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
  }
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

FittedModel fit_ridge(const RegressorSpec& spec, std::span<const std::vector<double>> x, std::span<const double> y) {
  const MatrixXd X = to_matrix(x);
  const VectorXd Y = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  const VectorXd x_mean = X.colwise().mean();
  const double y_mean = Y.mean();
  const MatrixXd Xc = X.rowwise() - x_mean.transpose();
  const VectorXd Yc = Y.array() - y_mean;
  const auto n = Xc.rows();
  const auto p = Xc.cols();

  VectorXd w;
  if (spec.ridge_lambda == 0.0) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Xc);
    if (qr.rank() < p)
      throw Error(ErrorCode::SingularSystem, "rank " + std::to_string(qr.rank()) + " < " + std::to_string(p) +
                                                 " with lambda = 0");
    w = qr.solve(Yc);
  } else if (p <= n) {
    MatrixXd gram = Xc.transpose() * Xc;
    gram.diagonal().array() += spec.ridge_lambda;
    Eigen::LLT<MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "ridge normal equations");
    w = llt.solve(Xc.transpose() * Yc);
  } else {
    // Wide data: w = Xc' (Xc Xc' + lambda I)^-1 yc solves the same system.
    MatrixXd kernel = Xc * Xc.transpose();
    kernel.diagonal().array() += spec.ridge_lambda;
    Eigen::LLT<MatrixXd> llt(kernel);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "ridge dual system");
    w = Xc.transpose() * llt.solve(Yc);
  }

  FittedModel model;
  model.spec = spec;
  model.weights.assign(w.data(), w.data() + w.size());
  model.bias = y_mean - x_mean.dot(w);
  return model;
}

FittedModel fit_svr(const RegressorSpec& spec, std::span<const std::vector<double>> x, std::span<const double> y,
                    SvrTrace* trace) {
  const std::size_t n = x.size();
  const std::size_t dim = x.front().size();
  for (const auto& row : x)
    if (row.size() != dim) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");

  FittedModel model;
  model.spec = spec;
  model.weights.assign(dim, 0.0);
  std::vector<double> sorted(y.begin(), y.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  model.bias = sorted[n / 2];  // minimizes the unregularized absolute loss at w = 0

  SvrTrace local;
  SvrTrace& tr = trace ? *trace : local;
  tr = {};
  double current = svr_objective(model, x, y);
  tr.objective.push_back(current);

  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  double base_rate = spec.svr_learning_rate;
  const double shrink = 1.0 / static_cast<double>(n);
  constexpr double kTolerance = 1e-12;

  for (int epoch = 0; epoch < spec.svr_epochs; ++epoch) {
    ++tr.epochs_run;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    const double rate = base_rate / (1.0 + epoch);
    FittedModel candidate = model;
    for (std::size_t idx : order) {
      const double residual = y[idx] - (dot(candidate.weights, x[idx]) + candidate.bias);
      double g = 0.0;  // subgradient of the loss term w.r.t. the prediction
      if (residual > spec.svr_epsilon)
        g = -spec.svr_c;
      else if (residual < -spec.svr_epsilon)
        g = spec.svr_c;
      for (std::size_t j = 0; j < dim; ++j)
        candidate.weights[j] -= rate * (shrink * candidate.weights[j] + g * x[idx][j]);
      candidate.bias -= rate * g;
    }
    const double next = svr_objective(candidate, x, y);
    if (!(next <= current)) {
      ++tr.rejected_epochs;
      base_rate *= 0.5;
      continue;
    }
    const double gain = current - next;
    model = std::move(candidate);
    current = next;
    tr.objective.push_back(current);
    if (gain <= kTolerance * std::max(1.0, current)) break;
  }
  return model;
}

void check_training_set(std::span<const std::vector<double>> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(x.size()) + " feature rows vs " + std::to_string(y.size()) + " targets");
  if (x.size() < 2) throw Error(ErrorCode::TooFewRows, "need at least 2 training rows, got " + std::to_string(x.size()));
  if (x.front().empty()) throw Error(ErrorCode::DimensionMismatch, "zero-length feature vectors");
}

}  // namespace

std::string_view to_string(RegressorKind kind) {
  return kind == RegressorKind::Ridge ? "ridge" : "linear_svr";
}

RegressorKind parse_regressor_kind(std::string_view text) {
  if (text == "ridge") return RegressorKind::Ridge;
  if (text == "svr" || text == "linear_svr") return RegressorKind::LinearSvr;
  throw Error(ErrorCode::BadSpec, "unknown model kind '" + std::string(text) + "'");
}

void RegressorSpec::validate() const {
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) throw Error(ErrorCode::BadSpec, "ridge_lambda must be >= 0");
  if (!(svr_c > 0.0)) throw Error(ErrorCode::BadSpec, "svr_C must be > 0");
  if (!(svr_epsilon >= 0.0)) throw Error(ErrorCode::BadSpec, "svr_epsilon must be >= 0");
  if (svr_epochs < 1) throw Error(ErrorCode::BadSpec, "svr_epochs must be >= 1");
  if (!(svr_learning_rate > 0.0)) throw Error(ErrorCode::BadSpec, "svr_learning_rate must be > 0");
}

FittedModel fit(const RegressorSpec& spec, std::span<const std::vector<double>> x, std::span<const double> y,
                SvrTrace* trace) {
  spec.validate();
  check_training_set(x, y);
  return spec.kind == RegressorKind::Ridge ? fit_ridge(spec, x, y) : fit_svr(spec, x, y, trace);
}

FittedModel fit(const RegressorSpec& spec, std::span<const FeatureRow> rows, SvrTrace* trace) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(rows.size());
  y.reserve(rows.size());
  for (const auto& r : rows) {
    if (!r.target_diff) throw Error(ErrorCode::TooFewRows, "training row " + format_date(r.date) + " has no target");
    x.push_back(r.x);
    y.push_back(*r.target_diff);
  }
  FittedModel model = fit(spec, x, y, trace);
  auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.date < b.date; });
  model.train_range = DateRange{lo->date, hi->date};
  return model;
}

double predict(const FittedModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size())
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.weights.size()) +
                                                  " features, got " + std::to_string(x.size()));
  return dot(model.weights, x) + model.bias;
}

double svr_objective(const FittedModel& model, std::span<const std::vector<double>> x, std::span<const double> y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    loss += std::max(0.0, std::abs(y[i] - predict(model, x[i])) - model.spec.svr_epsilon);
  return 0.5 * dot(model.weights, model.weights) + model.spec.svr_c * loss;
}

nlohmann::json to_json(const RegressorSpec& spec) {
  return {{"kind", to_string(spec.kind)},       {"ridge_lambda", spec.ridge_lambda},
          {"svr_C", spec.svr_c},                {"svr_epsilon", spec.svr_epsilon},
          {"svr_epochs", spec.svr_epochs},      {"svr_learning_rate", spec.svr_learning_rate},
          {"seed", spec.seed}};
}

RegressorSpec regressor_spec_from_json(const nlohmann::json& j) {
  RegressorSpec spec;
  spec.kind = parse_regressor_kind(j.at("kind").get<std::string>());
  spec.ridge_lambda = j.at("ridge_lambda").get<double>();
  spec.svr_c = j.at("svr_C").get<double>();
  spec.svr_epsilon = j.at("svr_epsilon").get<double>();
  spec.svr_epochs = j.at("svr_epochs").get<int>();
  spec.svr_learning_rate = j.at("svr_learning_rate").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

nlohmann::json model_to_json(const FittedModel& model, const Scaler& scaler) {
  nlohmann::json j;
  j["schema_version"] = kModelSchemaVersion;
  j["spec"] = to_json(model.spec);
  j["dimension"] = model.dimension();
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["scaler"] = {{"mean", scaler.mean}, {"stddev", scaler.stddev}};
  if (model.train_range)
    j["train_range"] = {format_date(model.train_range->first), format_date(model.train_range->last)};
  else
    j["train_range"] = nullptr;
  return j;
}

std::pair<FittedModel, Scaler> model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw Error(ErrorCode::BadModelFile, "unsupported schema_version");
    FittedModel model;
    model.spec = regressor_spec_from_json(j.at("spec"));
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    Scaler scaler;
    scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    scaler.stddev = j.at("scaler").at("stddev").get<std::vector<double>>();
    const auto dim = j.at("dimension").get<std::size_t>();
    if (model.weights.size() != dim || scaler.mean.size() != dim || scaler.stddev.size() != dim)
      throw Error(ErrorCode::BadModelFile, "weights/scaler length disagree with dimension " + std::to_string(dim));
    if (const auto& range = j.at("train_range"); !range.is_null()) {
      const auto first = parse_date(range.at(0).get<std::string>());
      const auto last = parse_date(range.at(1).get<std::string>());
      if (!first || !last) throw Error(ErrorCode::BadModelFile, "bad train_range");
      model.train_range = DateRange{*first, *last};
    }
    return {std::move(model), std::move(scaler)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModelFile, e.what());
  }
}

void save_model(const std::filesystem::path& path, const FittedModel& model, const Scaler& scaler) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << model_to_json(model, scaler).dump(2) << '\n';
}

std::pair<FittedModel, Scaler> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadModelFile, e.what());
  }
}

}  // namespace txmotif
