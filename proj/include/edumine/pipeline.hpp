#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "edumine/artifact.hpp"
#include "edumine/dataio.hpp"
#include "edumine/select_eval.hpp"

namespace edumine {

struct PipelineConfig {
  std::uint64_t seed = 12345;
  double train_fraction = 0.8;
  models::TreeParams tree;
  models::NeuralParams neural;  // neural.seed is overwritten by `seed`
  evaluation::MapeDenominator denominator = evaluation::MapeDenominator::prediction;
  bool parallel = true;  // train the three candidates concurrently
};

struct TrainedCandidates {
  dataio::Partition partition;
  std::array<ModelArtifact, 3> artifacts;  // indexed by ModelKind
  evaluation::ChampionReport champion;

  const ModelArtifact& champion_artifact() const {
    return artifacts[static_cast<std::size_t>(champion.champion)];
  }
};

/// Partitions `train_source`, fits the tree, regression and neural network
/// and picks the champion by validation ASE.
TrainedCandidates train_candidates(const Dataset& train_source, std::string_view target,
                                   const PipelineConfig& config);

struct PipelineResult {
  TrainedCandidates trained;
  std::vector<double> predictions;  // champion on score_source
  evaluation::EvaluationReport evaluation;

  const evaluation::ChampionReport& champion() const { return trained.champion; }
  const ModelArtifact& artifact() const { return trained.champion_artifact(); }
};

/// Train, select, then score `score_source` with the champion and evaluate
/// it against the actual targets there. Variable worth comes from the tree.
PipelineResult run_pipeline(const Dataset& train_source, const Dataset& score_source,
                            std::string_view target, const PipelineConfig& config);

}  // namespace edumine
