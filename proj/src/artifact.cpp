#include "edumine/artifact.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include "edumine/csv.hpp"

namespace edumine {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 3> kKindNames = {"tree", "regression", "neural"};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json transformer_json(const models::Transformer& t) {
  json features = json::array();
  for (const auto& e : t.encodings) {
    json f;
    f["variable"] = e.variable;
    f["level"] = std::string(to_string(e.level));
    if (e.categorical()) {
      f["levels"] = e.levels;
      f["missing_indicator"] = e.missing_indicator;
    } else {
      f["mean"] = e.fill;
      f["scale"] = e.scale;
    }
    features.push_back(std::move(f));
  }
  return {{"target", t.target}, {"features", std::move(features)}, {"dropped", t.dropped}};
}

models::Transformer transformer_from_json(const json& j) {
  models::Transformer t;
  t.target = j.at("target").get<std::string>();
  t.dropped = j.at("dropped").get<std::vector<std::string>>();
  for (const auto& f : j.at("features")) {
    models::FeatureEncoding e;
    e.variable = f.at("variable").get<std::string>();
    e.level = parse_level(f.at("level").get<std::string>());
    if (e.categorical()) {
      e.levels = f.at("levels").get<std::vector<std::string>>();
      e.missing_indicator = f.at("missing_indicator").get<bool>();
    } else {
      e.fill = f.at("mean").get<double>();
      e.scale = f.at("scale").get<double>();
    }
    t.encodings.push_back(std::move(e));
  }
  return t;
}

json tree_json(const models::TreeModel& m) {
  json vars = json::array();
  for (const auto& v : m.variables) vars.push_back({{"name", v.name}, {"level", std::string(to_string(v.level))}});
  json nodes = json::array();
  for (const auto& n : m.nodes) {
    json node = {{"prediction", n.prediction},
                 {"size", n.size},
                 {"sse", n.sse},
                 {"variance_reduction", n.variance_reduction},
                 {"left", n.left},
                 {"right", n.right}};
    if (n.split) {
      const auto& s = *n.split;
      json split = {{"variable", s.variable}, {"missing_left", s.missing_left}};
      if (m.variables.at(s.variable).categorical()) {
        split["left_levels"] = s.left_levels;
        split["right_levels"] = s.right_levels;
      } else {
        split["threshold"] = s.threshold;
      }
      node["split"] = std::move(split);
    } else {
      node["split"] = nullptr;
    }
    nodes.push_back(std::move(node));
  }
  return {{"variables", std::move(vars)}, {"nodes", std::move(nodes)}};
}

models::TreeModel tree_from_json(const json& j, const std::string& target) {
  models::TreeModel m;
  m.target = target;
  for (const auto& v : j.at("variables"))
    m.variables.push_back({v.at("name").get<std::string>(), parse_level(v.at("level").get<std::string>())});
  for (const auto& n : j.at("nodes")) {
    models::TreeNode node;
    node.prediction = n.at("prediction").get<double>();
    node.size = n.at("size").get<std::size_t>();
    node.sse = n.at("sse").get<double>();
    node.variance_reduction = n.at("variance_reduction").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    const auto& s = n.at("split");
    if (!s.is_null()) {
      models::SplitRule rule;
      rule.variable = s.at("variable").get<std::size_t>();
      rule.missing_left = s.at("missing_left").get<bool>();
      if (rule.variable >= m.variables.size()) throw DataError("tree split refers to unknown variable");
      if (m.variables[rule.variable].categorical()) {
        rule.left_levels = s.at("left_levels").get<std::vector<std::string>>();
        rule.right_levels = s.at("right_levels").get<std::vector<std::string>>();
      } else {
        rule.threshold = s.at("threshold").get<double>();
      }
      node.split = std::move(rule);
    }
    m.nodes.push_back(std::move(node));
  }
  const int count = static_cast<int>(m.nodes.size());
  if (count == 0) throw DataError("tree artifact has no nodes");
  for (const auto& n : m.nodes) {
    if (n.leaf()) continue;
    if (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count)
      throw DataError("tree artifact has a dangling child index");
  }
  return m;
}

json linear_json(const models::LinearModel& m) {
  return {{"intercept", m.intercept},
          {"coefficients", m.coefficients},
          {"aliased", std::vector<bool>(m.aliased.begin(), m.aliased.end())},
          {"feature_names", m.transformer.feature_names()},
          {"r_squared", m.r_squared}};
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json neural_json(const models::NeuralModel& m) {
  const auto& net = m.network;
  json log = json::array();
  for (const auto& e : m.log) log.push_back({e.epoch, e.train_ase, e.validation_ase});
  return {{"hidden_weights", matrix_json(net.hidden_weights)},
          {"hidden_bias", std::vector<double>(net.hidden_bias.data(), net.hidden_bias.data() + net.hidden_bias.size())},
          {"output_weights",
           std::vector<double>(net.output_weights.data(), net.output_weights.data() + net.output_weights.size())},
          {"output_bias", net.output_bias},
          {"activation", "tanh"},
          {"target_mean", m.target_mean},
          {"target_scale", m.target_scale},
          {"best_epoch", m.best_epoch},
          {"log", std::move(log)}};
}

models::NeuralModel neural_from_json(const json& j, models::Transformer t) {
  models::NeuralModel m;
  m.transformer = std::move(t);
  const auto& hw = j.at("hidden_weights");
  const auto hidden = static_cast<Eigen::Index>(hw.size());
  const auto inputs = static_cast<Eigen::Index>(m.transformer.width());
  m.network.hidden_weights.resize(hidden, inputs);
  for (Eigen::Index i = 0; i < hidden; ++i) {
    const auto row = hw.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != inputs)
      throw DataError("neural artifact weight row does not match transformer width");
    for (Eigen::Index k = 0; k < inputs; ++k) m.network.hidden_weights(i, k) = row[static_cast<std::size_t>(k)];
  }
  m.network.hidden_bias = vector_from_json(j.at("hidden_bias"));
  m.network.output_weights = vector_from_json(j.at("output_weights"));
  if (m.network.hidden_bias.size() != hidden || m.network.output_weights.size() != hidden)
    throw DataError("neural artifact layer sizes disagree");
  m.network.output_bias = j.at("output_bias").get<double>();
  m.target_mean = j.at("target_mean").get<double>();
  m.target_scale = j.at("target_scale").get<double>();
  m.best_epoch = j.at("best_epoch").get<std::size_t>();
  for (const auto& e : j.at("log"))
    m.log.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>(), e.at(2).get<double>()});
  return m;
}

}  // namespace

std::string_view to_string(ModelKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

ModelKind parse_model_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == text) return static_cast<ModelKind>(i);
  throw DataError("unknown model kind '" + std::string(text) + "'");
}

std::vector<std::string> ModelArtifact::inputs() const {
  if (const auto* t = std::get_if<models::TreeModel>(&model)) {
    std::vector<std::string> names;
    for (const auto& v : t->variables) names.push_back(v.name);
    return names;
  }
  if (const auto* l = std::get_if<models::LinearModel>(&model)) return l->transformer.inputs();
  return std::get<models::NeuralModel>(model).transformer.inputs();
}

std::string ModelArtifact::schema_fingerprint() const {
  if (const auto* t = std::get_if<models::TreeModel>(&model)) {
    std::string text;
    for (const auto& v : t->variables) text += v.name + ":" + std::string(to_string(v.level)) + ";";
    return fingerprint(text);
  }
  if (const auto* l = std::get_if<models::LinearModel>(&model)) return l->transformer.schema_fingerprint();
  return std::get<models::NeuralModel>(model).transformer.schema_fingerprint();
}

json to_json(const models::TreeParams& p) {
  return {{"max_depth", p.max_depth},
          {"min_leaf", p.min_leaf},
          {"min_split_improvement", p.min_split_improvement},
          {"prune", p.prune}};
}

json to_json(const models::NeuralParams& p) {
  return {{"hidden_units", p.hidden_units}, {"learning_rate", p.learning_rate},
          {"max_epochs", p.max_epochs},     {"batch_size", p.batch_size},
          {"seed", p.seed},                 {"patience", p.patience},
          {"zero_output_init", p.zero_output_init}};
}

json to_json(const ModelArtifact& a) {
  json doc;
  doc["tool_version"] = std::string(kToolVersion);
  doc["model_kind"] = std::string(to_string(a.kind));
  doc["target"] = a.target;
  doc["schema_fingerprint"] = a.schema_fingerprint();
  doc["training_params"] = a.training_params;
  doc["seed"] = a.seed;
  doc["train_ase"] = number_or_null(a.train_ase);
  doc["validation_ase"] = number_or_null(a.validation_ase);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, models::TreeModel>) {
          doc["transformer"] = nullptr;
          doc["model"] = tree_json(m);
        } else if constexpr (std::is_same_v<M, models::LinearModel>) {
          doc["transformer"] = transformer_json(m.transformer);
          doc["model"] = linear_json(m);
        } else {
          doc["transformer"] = transformer_json(m.transformer);
          doc["model"] = neural_json(m);
        }
      },
      a.model);
  return doc;
}

ModelArtifact artifact_from_json(const json& doc) {
  try {
    ModelArtifact a;
    a.kind = parse_model_kind(doc.at("model_kind").get<std::string>());
    a.target = doc.at("target").get<std::string>();
    a.training_params = doc.at("training_params");
    a.seed = doc.at("seed").get<std::uint64_t>();
    a.train_ase = number_or_nan(doc.at("train_ase"));
    a.validation_ase = number_or_nan(doc.at("validation_ase"));
    const auto& m = doc.at("model");
    switch (a.kind) {
      case ModelKind::tree:
        a.model = tree_from_json(m, a.target);
        break;
      case ModelKind::regression: {
        models::LinearModel lm;
        lm.transformer = transformer_from_json(doc.at("transformer"));
        lm.intercept = m.at("intercept").get<double>();
        lm.coefficients = m.at("coefficients").get<std::vector<double>>();
        const auto aliased = m.at("aliased").get<std::vector<bool>>();
        lm.aliased.assign(aliased.begin(), aliased.end());
        lm.r_squared = m.at("r_squared").get<double>();
        if (lm.coefficients.size() != lm.transformer.width())
          throw DataError("regression artifact coefficient count does not match transformer width");
        a.model = std::move(lm);
        break;
      }
      case ModelKind::neural:
        a.model = neural_from_json(m, transformer_from_json(doc.at("transformer")));
        break;
    }
    if (doc.at("schema_fingerprint").get<std::string>() != a.schema_fingerprint())
      throw DataError("artifact schema fingerprint does not match its contents");
    return a;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model artifact: ") + e.what());
  }
}

void save_artifact(const std::filesystem::path& path, const ModelArtifact& artifact) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << to_json(artifact).dump(2) << '\n';
}

ModelArtifact load_artifact(const std::filesystem::path& path) {
  const std::string text = csv::read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": not a JSON document (" + e.what() + ")");
  }
  return artifact_from_json(doc);
}

std::vector<double> predict(const ModelArtifact& artifact, const Dataset& data) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, models::TreeModel>)
          return models::predict_tree(m, data);
        else
          return models::predict(m, data);
      },
      artifact.model);
}

}  // namespace edumine
