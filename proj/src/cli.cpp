#include "edumine/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "edumine/artifact.hpp"
#include "edumine/csv.hpp"
#include "edumine/dataio.hpp"
#include "edumine/pipeline.hpp"
#include "edumine/report.hpp"
#include "edumine/scoring.hpp"
#include "edumine/synth.hpp"

namespace edumine::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Format { text, json, both };

struct Common {
  std::string format = "text";
  std::string config;  // consumed by expand_config before parsing
  std::string out;

  Format fmt() const {
    if (format == "json") return Format::json;
    if (format == "both") return Format::both;
    return Format::text;
  }
};

struct Inputs {
  std::string data;
  std::string schema;
};

struct ModelFlags {
  std::string target = std::string(scoring::kAggregate);
  std::uint64_t seed = 12345;
  double train_fraction = 0.8;
  int tree_max_depth = 6;
  std::size_t tree_min_leaf = 5;
  bool no_prune = false;
  std::size_t nn_hidden = 3;
  double nn_lr = 0.01;
  std::size_t nn_epochs = 2000;
  std::size_t nn_batch = 32;
  std::size_t nn_patience = 50;
  bool sequential = false;

  PipelineConfig config() const {
    PipelineConfig c;
    c.seed = seed;
    c.train_fraction = train_fraction;
    c.tree.max_depth = tree_max_depth;
    c.tree.min_leaf = tree_min_leaf;
    c.tree.prune = !no_prune;
    c.neural.hidden_units = nn_hidden;
    c.neural.learning_rate = nn_lr;
    c.neural.max_epochs = nn_epochs;
    c.neural.batch_size = nn_batch;
    c.neural.patience = nn_patience;
    c.parallel = !sequential;
    return c;
  }
};

// CLI11 reads config files for the top-level app only, so a subcommand's
// --config file is turned into ordinary options here. Options given on the
// command line take precedence over the file.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
  if (args.empty()) return args;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands([](CLI::App*) { return true; }))
    if (s->get_name() == args[0]) sub = s;
  if (!sub) return args;

  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;

  std::vector<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.push_back(a.substr(0, a.find('=')));

  std::vector<std::string> extra;
  for (const auto& item : CLI::ConfigTOML().from_file(*path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && item.parents != std::vector<std::string>{sub->get_name()}) continue;
    std::string name = "--" + item.name;
    std::replace(name.begin() + 2, name.end(), '_', '-');
    const CLI::Option* opt = sub->get_option_no_throw(name);
    if (!opt) throw CLI::ConfigError("unknown key '" + item.name + "' in " + *path);
    bool explicit_flag = false;
    for (const auto& g : given) explicit_flag = explicit_flag || opt->check_name(g);
    if (explicit_flag) continue;
    if (opt->get_expected_min() == 0) {
      std::string v = item.inputs.empty() ? "true" : item.inputs.front();
      std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      if (v == "true" || v == "1" || v == "yes" || v == "on") extra.push_back(opt->get_name());
      continue;
    }
    extra.push_back(opt->get_name());
    extra.insert(extra.end(), item.inputs.begin(), item.inputs.end());
  }
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

void add_common(CLI::App* cmd, Common& c, bool out_required) {
  cmd->add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"text", "json", "both"}))
      ->capture_default_str();
  auto* out = cmd->add_option("--out", c.out, "Output directory");
  if (out_required) out->required();
  cmd->add_option("--config", c.config, "Read option defaults from a TOML/INI file");
}

void add_inputs(CLI::App* cmd, Inputs& in, std::string_view what) {
  cmd->add_option("--data", in.data, std::string(what))->required();
  cmd->add_option("--schema", in.schema, "Schema file (name,role,level per line)")->required();
}

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--target", m.target, "Target variable")->capture_default_str();
  cmd->add_option("--seed", m.seed, "Seed for partitioning and network initialization")->capture_default_str();
  cmd->add_option("--train-fraction", m.train_fraction, "Share of rows used for training")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--tree-max-depth", m.tree_max_depth)->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--tree-min-leaf", m.tree_min_leaf)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--tree-no-prune", m.no_prune, "Keep the fully grown tree");
  cmd->add_option("--nn-hidden", m.nn_hidden)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--nn-lr", m.nn_lr)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--nn-epochs,--max-epochs", m.nn_epochs)->capture_default_str();
  cmd->add_option("--nn-batch", m.nn_batch)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--nn-patience", m.nn_patience)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--sequential", m.sequential, "Train the three models one after another");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw IoError("cannot write '" + path.string() + "'");
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::string json_text(const json& doc) { return doc.dump(2) + "\n"; }

// Prints a report to stdout and, with --out, writes <stem>.txt / <stem>.json.
void emit(const Common& c, std::ostream& out, std::string_view stem, const std::string& text, const json& doc) {
  const Format f = c.fmt();
  if (f == Format::json)
    out << json_text(doc);
  else
    out << text;
  if (c.out.empty()) return;
  const fs::path dir = out_dir(c);
  if (f != Format::json) write_file(dir / (std::string(stem) + ".txt"), text);
  if (f != Format::text) write_file(dir / (std::string(stem) + ".json"), json_text(doc));
}

Dataset load(const Inputs& in) { return dataio::load_table(in.data, dataio::load_schema(in.schema)); }

std::string table_text(const Dataset& data) {
  std::ostringstream s;
  dataio::write_table(s, data);
  return s.str();
}

std::string schema_text(const std::vector<VariableSpec>& schema) {
  std::ostringstream s;
  dataio::write_schema(s, schema);
  return s.str();
}

std::string predictions_text(const Dataset& data, std::string_view target, std::span<const double> pred) {
  std::ostringstream s;
  const auto& id = data.schema()[data.id_index()].name;
  csv::write_row(s, {id, "P_" + std::string(target)});
  for (std::size_t i = 0; i < data.rows(); ++i) csv::write_row(s, {data.id(i), format_number(pred[i])});
  return s.str();
}

std::string summary_text(const Dataset& data) {
  report::TextTable t({"Variable", "Role", "Level", "Missing"});
  for (const auto& spec : data.schema())
    t.add({spec.name, std::string(to_string(spec.role)), std::string(to_string(spec.level)),
           std::to_string(data.column(spec.name).missing_count())});
  return "Rows: " + std::to_string(data.rows()) + "\n\n" + t.render();
}

void save_models(const fs::path& dir, const TrainedCandidates& trained) {
  for (const auto& a : trained.artifacts)
    save_artifact(dir / ("model_" + std::string(to_string(a.kind)) + ".json"), a);
  save_artifact(dir / "model.json", trained.champion_artifact());
}

// --- subcommands ---------------------------------------------------------

struct PrepareArgs {
  Common common;
  Inputs roster;
  std::string credits;
  std::vector<std::string> require;
};

void cmd_prepare(const PrepareArgs& a, std::ostream& out) {
  Dataset data = load(a.roster);
  const auto credits = scoring::load_credits(a.credits);
  const auto& id = data.schema()[data.id_index()].name;
  data = dataio::merge_by_id(data, scoring::score_table(credits, id));
  if (!a.require.empty()) data = dataio::complete_cases(data, a.require);
  const fs::path dir = out_dir(a.common);
  write_file(dir / "prepared.csv", table_text(data));
  write_file(dir / "prepared_schema.csv", schema_text(data.schema()));
  out << summary_text(data);
}

struct EdaArgs {
  Common common;
  Inputs in;
  std::string group_by;
  double alpha = 0.05;
};

void cmd_eda(const EdaArgs& a, std::ostream& out) {
  const Dataset data = load(a.in);
  std::optional<std::string_view> group;
  if (!a.group_by.empty()) group = a.group_by;
  const auto rep = report::build_eda(data, group, a.alpha);
  emit(a.common, out, "eda", report::eda_text(rep), report::eda_json(rep));
}

struct SynthArgs {
  Common common;
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_students;
  std::optional<std::size_t> n_schools;
  std::optional<double> missing_rate;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  synth::SynthSpec spec = a.spec.empty() ? synth::SynthSpec::defaults() : synth::load_spec(a.spec);
  if (a.seed) spec.seed = *a.seed;
  if (a.n_students) spec.n_students = *a.n_students;
  if (a.n_schools) spec.n_schools = *a.n_schools;
  if (a.missing_rate) spec.missing_rate = *a.missing_rate;
  const auto gen = synth::generate(spec);
  const auto analysis = synth::student_analysis_table(gen);
  const fs::path dir = out_dir(a.common);
  write_file(dir / "students.csv", table_text(gen.students));
  write_file(dir / "students_schema.csv", schema_text(gen.students.schema()));
  write_file(dir / "schools.csv", table_text(gen.schools));
  write_file(dir / "schools_schema.csv", schema_text(gen.schools.schema()));
  std::ostringstream credits;
  scoring::write_credits(credits, gen.credits);
  write_file(dir / "credits.csv", credits.str());
  write_file(dir / "analysis.csv", table_text(analysis));
  write_file(dir / "analysis_schema.csv", schema_text(analysis.schema()));
  out << "students " << gen.students.rows() << ", schools " << gen.schools.rows() << ", credit records "
      << gen.credits.size() << ", analysis rows " << analysis.rows() << '\n';
}

struct TrainArgs {
  Common common;
  Inputs in;
  ModelFlags model;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
  const Dataset data = load(a.in);
  const auto trained = train_candidates(data, a.model.target, a.model.config());
  const fs::path dir = out_dir(a.common);
  save_models(dir, trained);
  emit(a.common, out, "champion", report::champion_text(trained.champion), report::champion_json(trained.champion));
}

struct ScoreArgs {
  Common common;
  Inputs in;
  std::string model;
};

void cmd_score(const ScoreArgs& a, std::ostream& out) {
  const auto artifact = load_artifact(a.model);
  const Dataset data = load(a.in);
  const auto pred = predict(artifact, data);
  const std::string text = predictions_text(data, artifact.target, pred);
  if (a.common.out.empty()) {
    out << text;
    return;
  }
  write_file(out_dir(a.common) / "predictions.csv", text);
  out << "scored " << data.rows() << " rows with the " << report::display_name(artifact.kind) << " model\n";
}

struct EvaluateArgs {
  Common common;
  Inputs in;
  std::string model;
  std::string tree_model;
  std::string denominator = "prediction";
  std::size_t top = 30;
};

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto artifact = load_artifact(a.model);
  const Dataset data = load(a.in);
  const auto pred = predict(artifact, data);

  std::optional<ModelArtifact> worth_source;
  if (artifact.kind == ModelKind::tree) {
    worth_source = artifact;
  } else {
    fs::path tree_path = a.tree_model;
    if (tree_path.empty()) {
      const fs::path sibling = fs::path(a.model).parent_path() / "model_tree.json";
      if (fs::exists(sibling)) tree_path = sibling;
    }
    if (!tree_path.empty()) worth_source = load_artifact(tree_path);
  }
  const models::TreeModel* tree = nullptr;
  if (worth_source) {
    if (worth_source->kind != ModelKind::tree) throw DataError("--tree-model does not hold a decision tree");
    tree = &std::get<models::TreeModel>(worth_source->model);
  }
  const auto rep = evaluation::evaluate(pred, data, artifact.target,
                                        evaluation::parse_mape_denominator(a.denominator), tree);
  emit(a.common, out, "evaluation", report::evaluation_text(rep, a.top), report::evaluation_json(rep));
}

struct PipelineArgs {
  Common common;
  Inputs in;
  std::string score_data;
  std::string score_schema;
  ModelFlags model;
  std::string denominator = "prediction";
  std::size_t top = 30;
};

void cmd_pipeline(const PipelineArgs& a, std::ostream& out) {
  const Dataset train = load(a.in);
  const Dataset score = load({a.score_data.empty() ? a.in.data : a.score_data,
                              a.score_schema.empty() ? a.in.schema : a.score_schema});
  PipelineConfig config = a.model.config();
  config.denominator = evaluation::parse_mape_denominator(a.denominator);
  const auto result = run_pipeline(train, score, a.model.target, config);

  const fs::path dir = out_dir(a.common);
  save_models(dir, result.trained);
  write_file(dir / "predictions.csv", predictions_text(score, a.model.target, result.predictions));
  emit(a.common, out, "champion", report::champion_text(result.champion()), report::champion_json(result.champion()));
  out << '\n';
  emit(a.common, out, "evaluation", report::evaluation_text(result.evaluation, a.top),
       report::evaluation_json(result.evaluation));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predictive modelling of student assessment scores"};
  app.name("edumine");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  PrepareArgs prep;
  auto* c_prep = app.add_subcommand("prepare", "Score credits, merge with a roster and write the analysis table");
  add_common(c_prep, prep.common, true);
  add_inputs(c_prep, prep.roster, "Student roster / survey table");
  c_prep->add_option("--credits", prep.credits, "Credit records (student_id,subject,item_id,credit)")->required();
  c_prep->add_option("--require", prep.require, "Drop rows missing any of these columns");

  EdaArgs eda;
  auto* c_eda = app.add_subcommand("eda", "Descriptive statistics, ANOVA and correlations");
  add_common(c_eda, eda.common, false);
  add_inputs(c_eda, eda.in, "Analysis table");
  c_eda->add_option("--group-by", eda.group_by, "Categorical variable for group statistics and ANOVA");
  c_eda->add_option("--alpha", eda.alpha, "p-value display threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate a synthetic cohort");
  add_common(c_syn, syn.common, true);
  c_syn->add_option("--spec", syn.spec, "Generator settings (key = value lines)");
  c_syn->add_option("--seed", syn.seed);
  c_syn->add_option("--n-students", syn.n_students);
  c_syn->add_option("--n-schools", syn.n_schools);
  c_syn->add_option("--missing-rate", syn.missing_rate)->check(CLI::Range(0.0, 1.0));

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train tree, regression and neural network and pick a champion");
  add_common(c_tr, tr.common, true);
  add_inputs(c_tr, tr.in, "Training table");
  add_model_flags(c_tr, tr.model);

  ScoreArgs sc;
  auto* c_sc = app.add_subcommand("score", "Predict with a saved model");
  add_common(c_sc, sc.common, false);
  add_inputs(c_sc, sc.in, "Table to score");
  c_sc->add_option("--model", sc.model, "Model file")->required();

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "MAPE, ASE and variable worth against actual targets");
  add_common(c_ev, ev.common, false);
  add_inputs(c_ev, ev.in, "Table with actual targets");
  c_ev->add_option("--model", ev.model, "Model file")->required();
  c_ev->add_option("--tree-model", ev.tree_model, "Tree used for variable worth (default: model_tree.json beside --model)");
  c_ev->add_option("--mape-denominator", ev.denominator)
      ->check(CLI::IsMember({"prediction", "actual"}))
      ->capture_default_str();
  c_ev->add_option("--top", ev.top, "Variables listed in the worth table")->capture_default_str();

  PipelineArgs pl;
  auto* c_pl = app.add_subcommand("pipeline", "Partition, train, select, score and evaluate in one run");
  add_common(c_pl, pl.common, true);
  add_inputs(c_pl, pl.in, "Training table");
  c_pl->add_option("--score-data", pl.score_data, "Table to score (default: --data)");
  c_pl->add_option("--score-schema", pl.score_schema, "Schema of --score-data (default: --schema)");
  add_model_flags(c_pl, pl.model);
  c_pl->add_option("--mape-denominator", pl.denominator)
      ->check(CLI::IsMember({"prediction", "actual"}))
      ->capture_default_str();
  c_pl->add_option("--top", pl.top, "Variables listed in the worth table")->capture_default_str();

  try {
    const auto expanded = expand_config(app, args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_prep->parsed()) cmd_prepare(prep, out);
    else if (c_eda->parsed()) cmd_eda(eda, out);
    else if (c_syn->parsed()) cmd_synth(syn, out);
    else if (c_tr->parsed()) cmd_train(tr, out);
    else if (c_sc->parsed()) cmd_score(sc, out);
    else if (c_ev->parsed()) cmd_evaluate(ev, out);
    else if (c_pl->parsed()) cmd_pipeline(pl, out);
  } catch (const IoError& e) {
    err << "edumine: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "edumine: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace edumine::cli
