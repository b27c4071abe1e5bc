#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "edumine/dataset.hpp"
#include "edumine/linear.hpp"
#include "edumine/neural.hpp"
#include "edumine/tree.hpp"

namespace edumine {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Candidate model families, in champion tie-break order.
enum class ModelKind { tree, regression, neural };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// A trained predictor plus the metadata needed to audit and replay it.
struct ModelArtifact {
  ModelKind kind = ModelKind::tree;
  std::string target;
  std::variant<models::TreeModel, models::LinearModel, models::NeuralModel> model;
  nlohmann::json training_params = nlohmann::json::object();
  std::uint64_t seed = 0;
  double train_ase = 0.0;
  double validation_ase = 0.0;  // NaN when no validation rows were available

  /// Source variables the model reads.
  std::vector<std::string> inputs() const;
  std::string schema_fingerprint() const;
};

nlohmann::json to_json(const models::TreeParams& params);
nlohmann::json to_json(const models::NeuralParams& params);

nlohmann::json to_json(const ModelArtifact& artifact);
ModelArtifact artifact_from_json(const nlohmann::json& doc);

void save_artifact(const std::filesystem::path& path, const ModelArtifact& artifact);
ModelArtifact load_artifact(const std::filesystem::path& path);

/// Predictions for every row of `data`. Throws SchemaError naming the input
/// variables `data` lacks.
std::vector<double> predict(const ModelArtifact& artifact, const Dataset& data);

}  // namespace edumine
