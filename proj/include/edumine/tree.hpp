#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edumine/dataset.hpp"

namespace edumine::models {

struct TreeParams {
  int max_depth = 6;
  std::size_t min_leaf = 5;
  /// Minimum drop in per-row variance (parent SSE minus child SSE, divided
  /// by the node size) for a split to be kept.
  double min_split_improvement = 1e-7;
  /// Prune to the cost-complexity subtree with the lowest validation ASE.
  bool prune = true;
};

struct TreeVariable {
  std::string name;
  Level level = Level::interval;

  bool categorical() const { return level != Level::interval; }
};

/// Interval rule: value <= threshold goes left. Categorical rule: a label in
/// left_levels goes left, in right_levels goes right. Missing values, and
/// labels the node never saw in training, follow missing_left.
struct SplitRule {
  std::size_t variable = 0;
  double threshold = 0.0;
  std::vector<std::string> left_levels;   // sorted
  std::vector<std::string> right_levels;  // sorted
  bool missing_left = false;

  bool operator==(const SplitRule&) const = default;
};

struct TreeNode {
  std::optional<SplitRule> split;  // empty for leaves
  int left = -1;
  int right = -1;
  double prediction = 0.0;  // mean training target in the node
  std::size_t size = 0;     // training rows reaching the node
  double sse = 0.0;         // training sum of squared deviations
  double variance_reduction = 0.0;  // (sse - child sse) / size, splits only

  bool leaf() const { return !split.has_value(); }
};

struct TreeModel {
  std::string target;
  std::vector<TreeVariable> variables;  // every candidate input
  std::vector<TreeNode> nodes;          // nodes[0] is the root

  std::size_t leaves() const;
  std::size_t depth() const;
  std::vector<std::string> split_variables() const;
};

/// Unpruned greedy induction on the rows of `train` whose target is present.
TreeModel grow_tree(const Dataset& train, std::string_view target, const TreeParams& params);

/// Nested subtrees from weakest-link (cost-complexity) pruning, starting with
/// `tree` itself and ending with the root-only tree.
std::vector<TreeModel> pruning_sequence(const TreeModel& tree);

/// Member of the pruning sequence with the lowest ASE on `valid`; ties go to
/// the smaller tree. Returns `tree` unchanged when `valid` has no target values.
TreeModel prune_by_validation(const TreeModel& tree, const Dataset& valid);

TreeModel train_tree(const Dataset& train, const Dataset& valid, std::string_view target,
                     const TreeParams& params);

std::vector<double> predict_tree(const TreeModel& model, const Dataset& data);

}  // namespace edumine::models
