#include "edumine/pipeline.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "edumine/prepare.hpp"

namespace edumine {

namespace {

// ASE of `artifact` over the rows of `data` whose target is present; NaN
// when there are none.
double target_ase(const ModelArtifact& artifact, const Dataset& data, std::string_view target) {
  const auto rows = models::target_rows(data, target);
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  const Dataset sub = data.take_rows(rows);
  const auto pred = predict(artifact, sub);
  const auto actual = models::target_values(data, target, rows);
  return evaluation::ase(pred, std::span<const double>(actual.data(), static_cast<std::size_t>(actual.size())));
}

ModelArtifact finish(ModelArtifact a, const dataio::Partition& part) {
  a.train_ase = target_ase(a, part.train, a.target);
  a.validation_ase = target_ase(a, part.validation, a.target);
  return a;
}

}  // namespace

TrainedCandidates train_candidates(const Dataset& train_source, std::string_view target,
                                   const PipelineConfig& config) {
  // Validate the target up front so every learner fails the same way.
  if (models::target_rows(train_source, target).empty())
    throw DataError("target '" + std::string(target) + "' is missing on every training row");

  TrainedCandidates out{dataio::partition(train_source, config.train_fraction, config.seed), {}, {}};
  const auto& part = out.partition;
  const std::string tgt(target);
  models::NeuralParams nn = config.neural;
  nn.seed = config.seed;

  auto make_tree = [&] {
    ModelArtifact a;
    a.kind = ModelKind::tree;
    a.target = tgt;
    a.seed = config.seed;
    a.training_params = to_json(config.tree);
    a.model = models::train_tree(part.train, part.validation, tgt, config.tree);
    return finish(std::move(a), part);
  };
  auto make_ols = [&] {
    ModelArtifact a;
    a.kind = ModelKind::regression;
    a.target = tgt;
    a.seed = config.seed;
    a.training_params = nlohmann::json::object({{"solver", "column-pivoted householder qr"}, {"pivot_tolerance", 1e-10}});
    a.model = models::train_ols(part.train, tgt);
    return finish(std::move(a), part);
  };
  auto make_nn = [&] {
    ModelArtifact a;
    a.kind = ModelKind::neural;
    a.target = tgt;
    a.seed = config.seed;
    a.training_params = to_json(nn);
    a.model = models::train_nn(part.train, part.validation, tgt, nn);
    return finish(std::move(a), part);
  };

  if (config.parallel) {
    auto tree = std::async(std::launch::async, make_tree);
    auto ols = std::async(std::launch::async, make_ols);
    auto net = std::async(std::launch::async, make_nn);
    out.artifacts = {tree.get(), ols.get(), net.get()};
  } else {
    out.artifacts = {make_tree(), make_ols(), make_nn()};
  }

  std::vector<evaluation::Candidate> candidates;
  for (const auto& a : out.artifacts) {
    if (std::isnan(a.validation_ase))
      throw DataError("validation partition has no row with target '" + tgt + "'");
    candidates.push_back({a.kind, a.validation_ase});
  }
  out.champion = evaluation::select_champion(candidates, tgt);
  return out;
}

PipelineResult run_pipeline(const Dataset& train_source, const Dataset& score_source,
                            std::string_view target, const PipelineConfig& config) {
  PipelineResult result{train_candidates(train_source, target, config), {}, {}};
  result.predictions = predict(result.artifact(), score_source);
  const auto& tree = std::get<models::TreeModel>(result.trained.artifacts[0].model);
  result.evaluation = evaluation::evaluate(result.predictions, score_source, target, config.denominator, &tree);
  return result;
}

}  // namespace edumine
