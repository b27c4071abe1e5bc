#include "edumine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "edumine/csv.hpp"
#include "edumine/dataio.hpp"
#include "edumine/random.hpp"

namespace edumine::synth {

namespace {

constexpr std::uint64_t kMissingStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kCreditStream = 0xc2b2ae3d27d4eb4fULL;

std::string padded(std::string_view prefix, std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, value);
  return std::string(prefix) + buf;
}

int digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return std::max(d, 4);
}

const std::vector<std::string>& labels_of(const BlueprintVariable& v) {
  static const std::vector<std::string> binary = {"no", "yes"};
  static const std::vector<std::string> nominal = {"A", "B", "C", "D"};
  if (!v.labels.empty()) return v.labels;
  return v.level == Level::binary ? binary : nominal;
}

// One generated cell: either a number or a label, plus its effect.
struct Draw {
  double number = 0.0;
  std::size_t label = 0;
  double effect = 0.0;
};

Draw draw(const BlueprintVariable& v, Rng& rng) {
  Draw d;
  if (v.level == Level::interval) {
    d.number = std::round(50.0 + 15.0 * rng.normal());
    d.effect = v.shape == EffectShape::step ? (d.number > 50.0 ? 1.0 : -1.0) : (d.number - 50.0) / 15.0;
    return d;
  }
  const auto& labels = labels_of(v);
  const std::size_t L = labels.size();
  d.label = static_cast<std::size_t>(rng.below(L));
  const double centre = (static_cast<double>(L) - 1.0) / 2.0;
  double var = 0.0;
  for (std::size_t k = 0; k < L; ++k) var += (static_cast<double>(k) - centre) * (static_cast<double>(k) - centre);
  var /= static_cast<double>(L);
  d.effect = (static_cast<double>(d.label) - centre) / std::sqrt(var);
  return d;
}

struct Table {
  std::vector<std::vector<Draw>> cells;  // per variable, per row
};

Column make_column(const BlueprintVariable& v, const std::vector<Draw>& cells,
                   const std::vector<std::uint8_t>& missing) {
  if (v.level == Level::interval) {
    std::vector<double> vals;
    for (const auto& c : cells) vals.push_back(c.number);
    return Column::numeric(std::move(vals), missing);
  }
  const auto& labels = labels_of(v);
  std::vector<std::string> vals;
  for (const auto& c : cells) vals.push_back(labels[c.label]);
  return Column::text(std::move(vals), missing);
}

struct BetaShape {
  double a = 1.0, b = 1.0;
};

// Beta(a, b) on [0, 1] with the subject's mean and sd (in percent / 100).
BetaShape beta_shape(const SubjectTarget& t) {
  const double m = t.mean / 100.0, sd = t.sd / 100.0;
  const double c = m * (1.0 - m) / (sd * sd) - 1.0;
  return {m * c, (1.0 - m) * c};
}

double percent_of(double z, const BetaShape& shape) {
  static const boost::math::normal_distribution<double> gauss;
  const double u = std::clamp(boost::math::cdf(gauss, z), 1e-15, 1.0 - 1e-15);
  return 100.0 * boost::math::ibeta_inv(shape.a, shape.b, u);
}

// Gauss-Hermite rule for E[f(Z)], Z standard normal (Golub-Welsch).
struct Quadrature {
  std::vector<double> nodes, weights;
};

Quadrature hermite_rule(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Quadrature q;
  for (int i = 0; i < n; ++i) {
    q.nodes.push_back(eig.eigenvalues()(i));
    q.weights.push_back(eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i));
  }
  return q;
}

// Marginal transform tabulated on a fine grid; linear in between.
class Marginal {
 public:
  explicit Marginal(const BetaShape& shape) {
    for (int i = 0; i < kPoints; ++i) values_[static_cast<std::size_t>(i)] = percent_of(kLo + i * kStep, shape);
  }
  double operator()(double z) const {
    const double t = std::clamp((z - kLo) / kStep, 0.0, kPoints - 1.000001);
    const auto i = static_cast<std::size_t>(t);
    const double f = t - static_cast<double>(i);
    return values_[i] * (1.0 - f) + values_[i + 1] * f;
  }

 private:
  static constexpr int kPoints = 4001;
  static constexpr double kLo = -12.0, kStep = 24.0 / (kPoints - 1);
  std::array<double, kPoints> values_{};
};

// Pearson correlation of (f(Z1), g(Z2)) when corr(Z1, Z2) = rho.
double transformed_r(const Marginal& f, const Marginal& g, double rho, const Quadrature& q) {
  const double s = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  double ef = 0, eg = 0, eff = 0, egg = 0, efg = 0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double fi = f(q.nodes[i]);
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
      const double w = q.weights[i] * q.weights[j];
      const double gj = g(rho * q.nodes[i] + s * q.nodes[j]);
      ef += w * fi;
      eg += w * gj;
      eff += w * fi * fi;
      egg += w * gj * gj;
      efg += w * fi * gj;
    }
  }
  return (efg - ef * eg) / std::sqrt((eff - ef * ef) * (egg - eg * eg));
}

// Latent Gaussian correlations whose transformed percents hit `target`.
// The map rho -> r is increasing, so bisection suffices; unreachable
// targets saturate at +-1 and are left to the positive definite repair.
Eigen::Matrix4d latent_correlation(const Eigen::Matrix4d& target, const std::array<SubjectTarget, 4>& subjects) {
  const Quadrature q = hermite_rule(48);
  std::vector<Marginal> marginals;
  for (const auto& t : subjects) marginals.emplace_back(beta_shape(t));
  Eigen::Matrix4d latent = Eigen::Matrix4d::Identity();
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      const double want = target(a, b);
      double lo = -1.0, hi = 1.0;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (transformed_r(marginals[static_cast<std::size_t>(a)], marginals[static_cast<std::size_t>(b)], mid, q) < want
             ? lo
             : hi) = mid;
      }
      latent(a, b) = latent(b, a) = 0.5 * (lo + hi);
    }
  return latent;
}

void validate(const SynthSpec& spec) {
  if (!(spec.missing_rate >= 0.0 && spec.missing_rate < 1.0))
    throw DataError("missing rate must lie in [0, 1)");
  if (spec.items_per_subject < 1) throw DataError("items per subject must be at least 1");
  for (const auto& s : spec.subjects) {
    const double m = s.mean / 100.0, sd = s.sd / 100.0;
    if (!(m > 0.0 && m < 1.0) || !(sd > 0.0) || !(sd * sd < m * (1.0 - m)))
      throw DataError("subject mean/sd cannot be realized by a distribution on [0, 100]");
  }
  auto check_vars = [](const std::vector<BlueprintVariable>& vars) {
    for (const auto& v : vars) {
      if (v.name.empty()) throw DataError("blueprint variable with empty name");
      if (!std::isfinite(v.weight)) throw DataError("blueprint weight for '" + v.name + "' is not finite");
      if (v.level != Level::interval && labels_of(v).size() < 2)
        throw DataError("categorical blueprint variable '" + v.name + "' needs at least 2 labels");
      if (v.level == Level::binary && labels_of(v).size() != 2)
        throw DataError("binary blueprint variable '" + v.name + "' needs exactly 2 labels");
    }
  };
  check_vars(spec.student_variables);
  check_vars(spec.school_variables);
}

double weight_norm(const std::vector<BlueprintVariable>& vars) {
  double s = 0.0;
  for (const auto& v : vars) s += v.weight * v.weight;
  return std::sqrt(s);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = text.find(',', start);
    std::string_view part = text.substr(start, comma - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    out.emplace_back(part);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw DataError("synth spec: '" + key + "' expects a number, got '" + value + "'");
  }
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const auto n = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    return n;
  } catch (const std::exception&) {
    throw DataError("synth spec: '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
}

// name,level,weight[,shape][,label|label|...]
BlueprintVariable parse_variable(const std::string& key, const std::string& value) {
  auto parts = split_list(value);
  if (parts.size() < 3 || parts.size() > 5)
    throw DataError("synth spec: '" + key + "' expects name,level,weight[,shape][,labels]");
  BlueprintVariable v;
  v.name = parts[0];
  v.level = parse_level(parts[1]);
  v.weight = parse_double(key, parts[2]);
  std::size_t next = 3;
  if (parts.size() > next && (parts[next] == "step" || parts[next] == "linear")) {
    v.shape = parts[next] == "step" ? EffectShape::step : EffectShape::linear;
    ++next;
  }
  if (parts.size() > next) {
    std::string_view rest = parts[next];
    std::size_t start = 0;
    for (;;) {
      auto bar = rest.find('|', start);
      v.labels.emplace_back(rest.substr(start, bar - start));
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
    ++next;
  }
  if (next != parts.size()) throw DataError("synth spec: cannot parse '" + value + "'");
  return v;
}

}  // namespace

SynthSpec SynthSpec::defaults() {
  SynthSpec s;
  // reading is digital reading; science was a printed test, the rest
  // computer based
  s.subjects = {{{73.5, 20.9}, {51.7, 23.7}, {62.0, 22.1}, {63.4, 22.0}}};
  // Pairs placed inside the very high / high / moderate bands.
  s.correlation << 1.00, 0.72, 0.75, 0.55,  //
      0.72, 1.00, 0.76, 0.65,               //
      0.75, 0.76, 1.00, 0.58,               //
      0.55, 0.65, 0.58, 1.00;
  s.student_variables = {
      {"science_minutes_per_week", Level::interval, 0.6, EffectShape::step, {}},
      {"escs_index", Level::interval, 0.5, EffectShape::linear, {}},
      {"literature_at_home", Level::binary, 0.5, EffectShape::step, {}},
      {"num_computers", Level::ordinal, 0.5, EffectShape::step, {"0", "1", "2", "3+"}},
      {"use_usb_in_school", Level::binary, -0.5, EffectShape::step, {}},
      {"gender", Level::binary, 0.15, EffectShape::step, {"male", "female"}},
      {"english_minutes_per_week", Level::interval, 0.0, EffectShape::step, {}},
      {"books_at_home", Level::nominal, 0.0, EffectShape::step, {"0-10", "11-25", "26-100", "101-200", "200+"}},
      {"upload_content", Level::ordinal, 0.0, EffectShape::step, {"never", "monthly", "weekly", "daily"}},
  };
  s.school_variables = {
      {"full_time_teachers", Level::interval, 0.6, EffectShape::step, {}},
      {"class_size", Level::interval, -0.3, EffectShape::linear, {}},
      {"offers_chess_club", Level::binary, 0.4, EffectShape::step, {}},
      {"student_teacher_ratio", Level::interval, 0.0, EffectShape::linear, {}},
  };
  return s;
}

Eigen::Matrix4d nearest_correlation(const Eigen::Matrix4d& target, double floor) {
  for (int i = 0; i < 4; ++i) {
    if (std::fabs(target(i, i) - 1.0) > 1e-12) throw DataError("correlation matrix needs a unit diagonal");
    for (int j = 0; j < 4; ++j) {
      if (!std::isfinite(target(i, j)) || std::fabs(target(i, j)) > 1.0)
        throw DataError("correlation entries must lie in [-1, 1]");
      if (std::fabs(target(i, j) - target(j, i)) > 1e-12) throw DataError("correlation matrix must be symmetric");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(target);
  Eigen::Vector4d values = eig.eigenvalues().cwiseMax(floor);
  Eigen::Matrix4d repaired = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::Vector4d inv_sd = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = inv_sd.asDiagonal() * repaired * inv_sd.asDiagonal();
  repaired = (repaired + repaired.transpose()) / 2.0;
  repaired.diagonal().setOnes();
  return repaired;
}

std::vector<VariableSpec> student_schema(const SynthSpec& spec) {
  std::vector<VariableSpec> schema = {{"student_id", Role::id, Level::nominal},
                                      {"school_id", Role::ignored, Level::nominal}};
  for (const auto& v : spec.student_variables) schema.push_back({v.name, Role::input, v.level});
  return schema;
}

std::vector<VariableSpec> school_schema(const SynthSpec& spec) {
  std::vector<VariableSpec> schema = {{"school_id", Role::id, Level::nominal}};
  for (const auto& v : spec.school_variables) schema.push_back({v.name, Role::input, v.level});
  for (auto s : scoring::kSubjects) schema.push_back({std::string(scoring::to_string(s)), Role::target, Level::interval});
  schema.push_back({std::string(scoring::kAggregate), Role::target, Level::interval});
  return schema;
}

SynthOutput generate(const SynthSpec& spec) {
  validate(spec);
  const Eigen::Matrix4d corr =
      nearest_correlation(latent_correlation(nearest_correlation(spec.correlation), spec.subjects));
  Eigen::LLT<Eigen::Matrix4d> llt(corr);
  if (llt.info() != Eigen::Success) throw DataError("correlation targets are infeasible even after repair");
  const Eigen::Matrix4d chol = llt.matrixL();

  Rng rng(spec.seed);
  Rng miss_rng(spec.seed ^ kMissingStream);
  Rng credit_rng(spec.seed ^ kCreditStream);
  const std::size_t n = spec.n_students;
  const std::size_t n_schools = spec.n_schools;

  // Schools and their latent effect.
  Table schools;
  schools.cells.assign(spec.school_variables.size(), std::vector<Draw>(n_schools));
  std::vector<double> school_effect(n_schools, 0.0);
  const double school_norm = weight_norm(spec.school_variables);
  for (std::size_t s = 0; s < n_schools; ++s) {
    double u = 0.0;
    for (std::size_t v = 0; v < spec.school_variables.size(); ++v) {
      schools.cells[v][s] = draw(spec.school_variables[v], rng);
      u += spec.school_variables[v].weight * schools.cells[v][s].effect;
    }
    school_effect[s] = school_norm > 0.0 ? u / school_norm : 0.0;
  }

  // Students: school, survey answers, raw ability.
  Table students;
  students.cells.assign(spec.student_variables.size(), std::vector<Draw>(n));
  std::vector<std::size_t> school_of(n, 0);
  std::vector<double> ability(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (n_schools > 0) school_of[i] = static_cast<std::size_t>(rng.below(n_schools));
    double a = rng.normal();
    for (std::size_t v = 0; v < spec.student_variables.size(); ++v) {
      students.cells[v][i] = draw(spec.student_variables[v], rng);
      a += spec.student_variables[v].weight * students.cells[v][i].effect;
    }
    if (n_schools > 0) a += spec.school_weight * school_effect[school_of[i]];
    ability[i] = a;
  }

  // Normal scores of ability so the copula sees an exactly Gaussian margin.
  const boost::math::normal_distribution<double> gauss;
  std::vector<double> latent(n, 0.0);
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ability[a] < ability[b]; });
    for (std::size_t r = 0; r < n; ++r)
      latent[order[r]] = boost::math::quantile(gauss, (static_cast<double>(r) + 0.5) / static_cast<double>(n));
  }

  std::array<BetaShape, 4> shapes{};
  for (std::size_t k = 0; k < 4; ++k) shapes[k] = beta_shape(spec.subjects[k]);

  // Subject percents, quantized to half-credit granularity.
  const double items = static_cast<double>(spec.items_per_subject);
  std::vector<std::array<double, 4>> percent(n);
  std::vector<std::array<double, 4>> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector4d e(latent[i], rng.normal(), rng.normal(), rng.normal());
    const Eigen::Vector4d z = chol * e;
    for (std::size_t k = 0; k < 4; ++k) {
      const double p = percent_of(z(static_cast<Eigen::Index>(k)), shapes[k]) / 100.0;
      points[i][k] = std::round(p * items * 2.0) / 2.0;
      percent[i][k] = points[i][k] * 100.0 / items;
    }
  }

  // Missingness: blank input cells and skipped subjects.
  std::vector<std::vector<std::uint8_t>> student_missing(spec.student_variables.size(),
                                                         std::vector<std::uint8_t>(n, 0));
  std::vector<std::array<bool, 4>> took(n, {true, true, true, true});
  std::vector<std::vector<std::uint8_t>> school_missing(spec.school_variables.size(),
                                                        std::vector<std::uint8_t>(n_schools, 0));
  if (spec.missing_rate > 0.0) {
    for (auto& col : student_missing)
      for (auto& m : col) m = miss_rng.uniform() < spec.missing_rate;
    for (auto& col : school_missing)
      for (auto& m : col) m = miss_rng.uniform() < spec.missing_rate;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 4; ++k) took[i][k] = !(miss_rng.uniform() < spec.missing_rate);
      if (std::none_of(took[i].begin(), took[i].end(), [](bool b) { return b; })) took[i][0] = true;
    }
  }

  const int sid_width = digits(n);
  const int school_width = digits(n_schools);
  SynthOutput out{Dataset::empty(student_schema(spec)), Dataset::empty(school_schema(spec)), {}};

  // Credit records realizing each kept subject percent.
  static constexpr std::array<char, 4> kPrefix = {'R', 'M', 'S', 'P'};
  std::vector<scoring::Credit> slots;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string sid = padded("S", i + 1, sid_width);
    for (std::size_t k = 0; k < 4; ++k) {
      if (!took[i][k]) continue;
      const auto full = static_cast<std::size_t>(std::floor(points[i][k]));
      const std::size_t partial = points[i][k] > static_cast<double>(full) ? 1 : 0;
      slots.assign(spec.items_per_subject, scoring::Credit::none);
      std::fill_n(slots.begin(), full, scoring::Credit::full);
      if (partial) slots[full] = scoring::Credit::partial;
      credit_rng.shuffle(std::span<scoring::Credit>(slots));
      for (std::size_t item = 0; item < slots.size(); ++item)
        out.credits.push_back({sid, scoring::kSubjects[k], padded(std::string(1, kPrefix[k]), item + 1, 2), slots[item]});
    }
  }

  // Students table.
  {
    std::vector<Column> cols;
    std::vector<std::string> ids, schools_col;
    std::vector<std::uint8_t> school_missing_flag(n, n_schools == 0 ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(padded("S", i + 1, sid_width));
      schools_col.push_back(n_schools > 0 ? padded("SCH", school_of[i] + 1, school_width) : std::string());
    }
    cols.push_back(Column::text(std::move(ids), std::vector<std::uint8_t>(n, 0)));
    cols.push_back(Column::text(std::move(schools_col), std::move(school_missing_flag)));
    for (std::size_t v = 0; v < spec.student_variables.size(); ++v)
      cols.push_back(make_column(spec.student_variables[v], students.cells[v], student_missing[v]));
    out.students = Dataset(student_schema(spec), std::move(cols));
  }

  // Schools table: only schools with at least one student; targets are the
  // mean student percents.
  {
    std::vector<std::array<double, 5>> sums(n_schools, {0, 0, 0, 0, 0});
    std::vector<std::array<std::size_t, 5>> counts(n_schools, {0, 0, 0, 0, 0});
    for (std::size_t i = 0; i < n; ++i) {
      if (n_schools == 0) break;
      const auto s = school_of[i];
      double pts = 0.0;
      std::size_t taken = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        if (!took[i][k]) continue;
        sums[s][k] += percent[i][k];
        ++counts[s][k];
        pts += points[i][k];
        taken += spec.items_per_subject;
      }
      sums[s][4] += pts * 100.0 / static_cast<double>(taken);
      ++counts[s][4];
    }
    std::vector<std::size_t> keep;
    for (std::size_t s = 0; s < n_schools; ++s)
      if (counts[s][4] > 0) keep.push_back(s);

    std::vector<Column> cols;
    std::vector<std::string> ids;
    for (auto s : keep) ids.push_back(padded("SCH", s + 1, school_width));
    cols.push_back(Column::text(std::move(ids), std::vector<std::uint8_t>(keep.size(), 0)));
    for (std::size_t v = 0; v < spec.school_variables.size(); ++v) {
      std::vector<Draw> cells;
      std::vector<std::uint8_t> miss;
      for (auto s : keep) {
        cells.push_back(schools.cells[v][s]);
        miss.push_back(school_missing[v][s]);
      }
      cols.push_back(make_column(spec.school_variables[v], cells, miss));
    }
    for (std::size_t k = 0; k < 5; ++k) {
      std::vector<double> vals;
      std::vector<std::uint8_t> miss;
      for (auto s : keep) {
        vals.push_back(counts[s][k] ? sums[s][k] / static_cast<double>(counts[s][k]) : 0.0);
        miss.push_back(counts[s][k] == 0);
      }
      cols.push_back(Column::numeric(std::move(vals), std::move(miss)));
    }
    out.schools = Dataset(school_schema(spec), std::move(cols));
  }
  return out;
}

Dataset student_analysis_table(const SynthOutput& out) {
  return dataio::merge_by_id(out.students, scoring::score_table(out.credits));
}

SynthSpec parse_spec(std::string_view text) {
  SynthSpec spec = SynthSpec::defaults();
  bool students_replaced = false, schools_replaced = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("synth spec line " + std::to_string(line_no) + ": expected key = value");
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));

    auto subject_index = [&](const std::string& name) {
      return static_cast<int>(scoring::parse_subject(name));
    };
    if (key == "n_students") {
      spec.n_students = parse_count(key, value);
    } else if (key == "n_schools") {
      spec.n_schools = parse_count(key, value);
    } else if (key == "seed") {
      spec.seed = parse_count(key, value);
    } else if (key == "missing_rate") {
      spec.missing_rate = parse_double(key, value);
    } else if (key == "items_per_subject") {
      spec.items_per_subject = parse_count(key, value);
    } else if (key == "school_weight") {
      spec.school_weight = parse_double(key, value);
    } else if (key.starts_with("mean.")) {
      spec.subjects[static_cast<std::size_t>(subject_index(key.substr(5)))].mean = parse_double(key, value);
    } else if (key.starts_with("sd.")) {
      spec.subjects[static_cast<std::size_t>(subject_index(key.substr(3)))].sd = parse_double(key, value);
    } else if (key.starts_with("corr.")) {
      const auto rest = key.substr(5);
      const auto dot = rest.find('.');
      if (dot == std::string::npos) throw DataError("synth spec: expected corr.<subject>.<subject>");
      const int a = subject_index(rest.substr(0, dot)), b = subject_index(rest.substr(dot + 1));
      if (a == b) throw DataError("synth spec: a subject's self-correlation is fixed at 1");
      spec.correlation(a, b) = spec.correlation(b, a) = parse_double(key, value);
    } else if (key == "student_variable") {
      if (!students_replaced) spec.student_variables.clear();
      students_replaced = true;
      spec.student_variables.push_back(parse_variable(key, value));
    } else if (key == "school_variable") {
      if (!schools_replaced) spec.school_variables.clear();
      schools_replaced = true;
      spec.school_variables.push_back(parse_variable(key, value));
    } else {
      throw DataError("synth spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  validate(spec);
  return spec;
}

SynthSpec load_spec(const std::filesystem::path& path) { return parse_spec(csv::read_text(path)); }

}  // namespace edumine::synth
