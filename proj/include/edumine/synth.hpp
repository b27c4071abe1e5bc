#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "edumine/dataset.hpp"
#include "edumine/scoring.hpp"

namespace edumine::synth {

enum class EffectShape { step, linear };

/// A generated survey variable and how strongly it moves latent ability.
///
/// Interval values are round(50 + 15 z) for standard normal z; a step effect
/// contributes +1 above 50 and -1 otherwise, a linear one (value - 50) / 15.
/// Binary, nominal and ordinal values are drawn uniformly from `labels`; the
/// effect of label k is its rank scaled to zero mean and unit variance (the
/// two binary labels contribute -1 and +1).
struct BlueprintVariable {
  std::string name;
  Level level = Level::interval;
  double weight = 0.0;
  EffectShape shape = EffectShape::step;
  std::vector<std::string> labels;  // categorical levels, in effect order
};

struct SubjectTarget {
  double mean = 50.0;  // percent
  double sd = 20.0;
};

struct SynthSpec {
  std::size_t n_students = 1000;
  std::size_t n_schools = 50;
  std::uint64_t seed = 2012;
  /// reading, maths, science, problem_solving
  std::array<SubjectTarget, 4> subjects{};
  /// Target Pearson correlations between subject percents.
  Eigen::Matrix4d correlation = Eigen::Matrix4d::Identity();
  /// Probability that an input cell is blank, and that a student skipped a
  /// whole subject (at least one subject is always kept).
  double missing_rate = 0.0;
  std::size_t items_per_subject = 20;
  double school_weight = 0.5;
  std::vector<BlueprintVariable> student_variables;
  std::vector<BlueprintVariable> school_variables;

  /// Subject moments of a 2012 cohort, pairwise correlations spread over
  /// the very high, high and moderate bands, and the default blueprints.
  static SynthSpec defaults();
};

struct SynthOutput {
  Dataset students;  // student_id, school_id, survey inputs
  Dataset schools;   // school_id, school inputs, mean subject/aggregate percents
  std::vector<scoring::CreditRecord> credits;
};

/// Deterministic for a given spec. Throws DataError for an invalid spec or
/// a correlation matrix that cannot be repaired to positive definite.
SynthOutput generate(const SynthSpec& spec);

/// Students merged with their credit-derived score table.
Dataset student_analysis_table(const SynthOutput& out);

/// Symmetric, unit-diagonal, eigenvalues clipped at `floor` then rescaled
/// back to unit diagonal.
Eigen::Matrix4d nearest_correlation(const Eigen::Matrix4d& target, double floor = 1e-10);

std::vector<VariableSpec> student_schema(const SynthSpec& spec);
std::vector<VariableSpec> school_schema(const SynthSpec& spec);

/// `key = value` lines; see README for the keys. Unset keys keep defaults.
SynthSpec parse_spec(std::string_view text);
SynthSpec load_spec(const std::filesystem::path& path);

}  // namespace edumine::synth
