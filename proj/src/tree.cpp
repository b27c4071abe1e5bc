#include "edumine/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "edumine/prepare.hpp"

namespace edumine::models {

namespace {

bool contains(const std::vector<std::string>& sorted, const std::string& label) {
  return std::binary_search(sorted.begin(), sorted.end(), label);
}

bool goes_left(const SplitRule& rule, const TreeVariable& var, const Column& col, std::size_t row) {
  if (col.missing(row)) return rule.missing_left;
  if (!var.categorical()) return col.number(row) <= rule.threshold;
  const auto& label = col.label(row);
  if (contains(rule.left_levels, label)) return true;
  if (contains(rule.right_levels, label)) return false;
  return rule.missing_left;
}

// Running sums of centered targets; sse() = sum of squared deviations.
struct Moments {
  double sum = 0.0;
  double sq = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    sq += v * v;
    ++n;
  }
  void add(const Moments& o) {
    sum += o.sum;
    sq += o.sq;
    n += o.n;
  }
  double sse() const { return n == 0 ? 0.0 : std::max(0.0, sq - sum * sum / static_cast<double>(n)); }
};

Moments operator+(Moments a, const Moments& b) {
  a.add(b);
  return a;
}

// Categorical variables with at most this many levels (missing counts as
// one) get an exhaustive partition search.
constexpr std::size_t kExhaustiveLevels = 12;

struct Candidate {
  SplitRule rule;
  double improvement = -std::numeric_limits<double>::infinity();
};

class Grower {
 public:
  Grower(std::vector<const Column*> cols, const TreeModel& model, std::vector<double> y,
         const TreeParams& params)
      : cols_(std::move(cols)), model_(model), y_(std::move(y)), params_(params) {}

  std::vector<TreeNode> grow(const std::vector<std::size_t>& rows) {
    nodes_.clear();
    build(rows, 0);
    return std::move(nodes_);
  }

 private:
  int build(const std::vector<std::size_t>& rows, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    double mean = 0.0;
    for (auto r : rows) mean += y_[r];
    mean /= static_cast<double>(rows.size());
    double sse = 0.0;
    for (auto r : rows) sse += (y_[r] - mean) * (y_[r] - mean);
    nodes_[index].prediction = mean;
    nodes_[index].size = rows.size();
    nodes_[index].sse = sse;

    if (depth >= params_.max_depth || rows.size() < 2 * params_.min_leaf || sse <= 0.0) return index;

    Candidate best;
    for (std::size_t v = 0; v < cols_.size(); ++v) {
      if (model_.variables[v].categorical())
        search_categorical(v, rows, mean, best);
      else
        search_interval(v, rows, mean, best);
    }
    if (!(best.improvement > 0.0) ||
        best.improvement / static_cast<double>(rows.size()) < params_.min_split_improvement)
      return index;

    std::vector<std::size_t> left, right;
    const auto& var = model_.variables[best.rule.variable];
    const Column& col = *cols_[best.rule.variable];
    for (auto r : rows) (goes_left(best.rule, var, col, r) ? left : right).push_back(r);
    if (left.empty() || right.empty()) return index;

    nodes_[index].variance_reduction = best.improvement / static_cast<double>(rows.size());
    nodes_[index].split = std::move(best.rule);
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  bool sizes_ok(std::size_t nl, std::size_t nr) const {
    return nl >= params_.min_leaf && nr >= params_.min_leaf && nl > 0 && nr > 0;
  }

  void consider(Candidate& best, const SplitRule& rule, const Moments& left, const Moments& right,
                double parent_sse) const {
    if (!sizes_ok(left.n, right.n)) return;
    const double improvement = parent_sse - (left.sse() + right.sse());
    if (improvement > best.improvement) {
      best.improvement = improvement;
      best.rule = rule;
    }
  }

  void search_interval(std::size_t v, const std::vector<std::size_t>& rows, double mean,
                       Candidate& best) const {
    const Column& col = *cols_[v];
    std::vector<std::pair<double, double>> present;
    Moments missing, total;
    for (auto r : rows) {
      const double yc = y_[r] - mean;
      total.add(yc);
      if (col.missing(r))
        missing.add(yc);
      else
        present.emplace_back(col.number(r), yc);
    }
    if (present.size() < 2) return;
    std::sort(present.begin(), present.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const double parent_sse = total.sse();

    Moments present_total;
    for (const auto& p : present) present_total.add(p.second);

    Moments left;
    SplitRule rule;
    rule.variable = v;
    for (std::size_t i = 0; i + 1 < present.size(); ++i) {
      left.add(present[i].second);
      const double a = present[i].first, b = present[i + 1].first;
      if (a == b) continue;
      double t = a + (b - a) / 2.0;
      if (!(t < b)) t = a;
      rule.threshold = t;
      Moments right = present_total;
      right.sum -= left.sum;
      right.sq -= left.sq;
      right.n -= left.n;
      if (missing.n == 0) {
        rule.missing_left = left.n >= right.n;
        consider(best, rule, left, right, parent_sse);
      } else {
        rule.missing_left = true;
        consider(best, rule, left + missing, right, parent_sse);
        rule.missing_left = false;
        consider(best, rule, left, right + missing, parent_sse);
      }
    }
  }

  void search_categorical(std::size_t v, const std::vector<std::size_t>& rows, double mean,
                          Candidate& best) const {
    const Column& col = *cols_[v];
    std::map<std::string, Moments> by_level;
    Moments missing, total;
    for (auto r : rows) {
      const double yc = y_[r] - mean;
      total.add(yc);
      if (col.missing(r))
        missing.add(yc);
      else
        by_level[col.label(r)].add(yc);
    }
    if (by_level.size() < 2 && !(by_level.size() == 1 && missing.n > 0)) return;
    const double parent_sse = total.sse();

    struct Item {
      const std::string* label;  // nullptr for the missing pseudo-level
      Moments m;
      double mean;
    };
    std::vector<Item> items;
    for (const auto& [label, m] : by_level) items.push_back({&label, m, m.sum / static_cast<double>(m.n)});
    if (missing.n > 0) items.push_back({nullptr, missing, missing.sum / static_cast<double>(missing.n)});

    const std::string& smallest = by_level.begin()->first;
    std::vector<char> is_left(items.size(), 0);
    auto try_partition = [&] {
      Moments left;
      SplitRule rule;
      rule.variable = v;
      bool missing_left = false;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (is_left[i]) left.add(items[i].m);
        if (!items[i].label)
          missing_left = is_left[i];
        else
          (is_left[i] ? rule.left_levels : rule.right_levels).push_back(*items[i].label);
      }
      Moments right = total;
      right.sum -= left.sum;
      right.sq -= left.sq;
      right.n -= left.n;
      std::sort(rule.left_levels.begin(), rule.left_levels.end());
      std::sort(rule.right_levels.begin(), rule.right_levels.end());
      // Canonical orientation: the lexicographically smallest level goes left.
      if (!contains(rule.left_levels, smallest)) {
        std::swap(rule.left_levels, rule.right_levels);
        std::swap(left, right);
        missing_left = !missing_left;
      }
      rule.missing_left = missing.n > 0 ? missing_left : left.n >= right.n;
      consider(best, rule, left, right, parent_sse);
    };

    if (items.size() <= kExhaustiveLevels) {
      // Every bipartition; item 0 stays left so each one is visited once.
      const std::size_t count = std::size_t{1} << (items.size() - 1);
      for (std::size_t mask = 1; mask < count; ++mask) {
        is_left[0] = 1;
        for (std::size_t i = 1; i < items.size(); ++i) is_left[i] = !((mask >> (i - 1)) & 1U);
        try_partition();
      }
      return;
    }
    // Too many levels to enumerate: for squared error the best unconstrained
    // partition is a prefix of the levels sorted by mean target.
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return items[a].mean < items[b].mean; });
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      std::fill(is_left.begin(), is_left.end(), 0);
      for (std::size_t i = 0; i <= k; ++i) is_left[order[i]] = 1;
      try_partition();
    }
  }

  std::vector<const Column*> cols_;
  const TreeModel& model_;
  std::vector<double> y_;
  const TreeParams& params_;
  std::vector<TreeNode> nodes_;
};

void collect_depth(const TreeModel& m, int node, std::size_t d, std::size_t& out) {
  out = std::max(out, d);
  const auto& n = m.nodes[static_cast<std::size_t>(node)];
  if (n.leaf()) return;
  collect_depth(m, n.left, d + 1, out);
  collect_depth(m, n.right, d + 1, out);
}

// Copy of the subtree reachable from the root, with collapsed nodes turned
// into leaves. Preorder layout.
int copy_subtree(const TreeModel& src, int node, const std::vector<char>& collapsed,
                 std::vector<TreeNode>& out) {
  const auto& n = src.nodes[static_cast<std::size_t>(node)];
  const int index = static_cast<int>(out.size());
  out.push_back(n);
  if (n.leaf() || collapsed[static_cast<std::size_t>(node)]) {
    out[index].split.reset();
    out[index].left = out[index].right = -1;
    out[index].variance_reduction = 0.0;
    return index;
  }
  const int l = copy_subtree(src, n.left, collapsed, out);
  const int r = copy_subtree(src, n.right, collapsed, out);
  out[index].left = l;
  out[index].right = r;
  return index;
}

TreeModel compact(const TreeModel& tree, const std::vector<char>& collapsed) {
  TreeModel out;
  out.target = tree.target;
  out.variables = tree.variables;
  copy_subtree(tree, 0, collapsed, out.nodes);
  return out;
}

// Post-order sums over the current (partially collapsed) tree: leaf SSE total
// and leaf count below each node.
void subtree_cost(const TreeModel& tree, int node, const std::vector<char>& collapsed,
                  std::vector<double>& cost, std::vector<std::size_t>& leaves) {
  const auto i = static_cast<std::size_t>(node);
  const auto& n = tree.nodes[i];
  if (n.leaf() || collapsed[i]) {
    cost[i] = n.sse;
    leaves[i] = 1;
    return;
  }
  subtree_cost(tree, n.left, collapsed, cost, leaves);
  subtree_cost(tree, n.right, collapsed, cost, leaves);
  const auto l = static_cast<std::size_t>(n.left), r = static_cast<std::size_t>(n.right);
  cost[i] = cost[l] + cost[r];
  leaves[i] = leaves[l] + leaves[r];
}

void internal_nodes(const TreeModel& tree, int node, const std::vector<char>& collapsed,
                    std::vector<std::size_t>& out) {
  const auto i = static_cast<std::size_t>(node);
  const auto& n = tree.nodes[i];
  if (n.leaf() || collapsed[i]) return;
  out.push_back(i);
  internal_nodes(tree, n.left, collapsed, out);
  internal_nodes(tree, n.right, collapsed, out);
}

struct Router {
  std::vector<const Column*> cols;  // nullptr for variables no split uses

  Router(const TreeModel& model, const Dataset& data) : cols(model.variables.size(), nullptr) {
    std::vector<char> used(model.variables.size(), 0);
    for (const auto& n : model.nodes)
      if (n.split) used[n.split->variable] = 1;
    std::vector<std::string> absent;
    for (std::size_t v = 0; v < model.variables.size(); ++v) {
      if (!used[v]) continue;
      const auto& var = model.variables[v];
      auto j = data.find(var.name);
      if (!j) {
        absent.push_back(var.name);
        continue;
      }
      if (data.schema()[*j].numeric() == var.categorical())
        throw SchemaError("split variable '" + var.name + "' changed measurement level since training");
      cols[v] = &data.column(*j);
    }
    if (!absent.empty()) {
      std::string msg = "data lacks tree split variable(s):";
      for (const auto& a : absent) msg += " " + a;
      throw SchemaError(msg);
    }
  }

  double predict(const TreeModel& model, std::size_t row) const {
    std::size_t node = 0;
    while (!model.nodes[node].leaf()) {
      const auto& n = model.nodes[node];
      const auto& rule = *n.split;
      node = static_cast<std::size_t>(
          goes_left(rule, model.variables[rule.variable], *cols[rule.variable], row) ? n.left : n.right);
    }
    return model.nodes[node].prediction;
  }
};

double validation_ase(const TreeModel& tree, const Dataset& valid, const std::vector<std::size_t>& rows,
                      const Column& target) {
  Router router(tree, valid);
  double s = 0.0;
  for (auto r : rows) {
    const double d = router.predict(tree, r) - target.number(r);
    s += d * d;
  }
  return s / static_cast<double>(rows.size());
}

}  // namespace

std::size_t TreeModel::leaves() const {
  std::size_t n = 0;
  for (const auto& node : nodes) n += node.leaf();
  return n;
}

std::size_t TreeModel::depth() const {
  std::size_t d = 0;
  if (!nodes.empty()) collect_depth(*this, 0, 0, d);
  return d;
}

std::vector<std::string> TreeModel::split_variables() const {
  std::set<std::string> names;
  for (const auto& n : nodes)
    if (n.split) names.insert(variables[n.split->variable].name);
  return {names.begin(), names.end()};
}

TreeModel grow_tree(const Dataset& train, std::string_view target, const TreeParams& params) {
  if (train.rows() == 0) throw DataError("cannot grow a tree on empty training data");
  if (params.min_leaf < 1) throw DataError("tree min_leaf must be at least 1");
  const auto rows = target_rows(train, target);
  if (rows.empty()) throw DataError("target '" + std::string(target) + "' is missing on every training row");

  TreeModel model;
  model.target = std::string(target);
  std::vector<const Column*> cols;
  for (std::size_t j = 0; j < train.cols(); ++j) {
    const auto& spec = train.schema()[j];
    if (spec.role != Role::input || spec.name == target) continue;
    model.variables.push_back({spec.name, spec.level});
    cols.push_back(&train.column(j));
  }

  const Column& tc = train.column(target);
  std::vector<double> y(train.rows(), 0.0);
  for (auto r : rows) y[r] = tc.number(r);

  Grower grower(std::move(cols), model, std::move(y), params);
  model.nodes = grower.grow(rows);
  return model;
}

std::vector<TreeModel> pruning_sequence(const TreeModel& tree) {
  std::vector<TreeModel> seq;
  std::vector<char> collapsed(tree.nodes.size(), 0);
  seq.push_back(compact(tree, collapsed));
  std::vector<double> cost(tree.nodes.size());
  std::vector<std::size_t> leaves(tree.nodes.size());
  for (;;) {
    std::vector<std::size_t> internal;
    internal_nodes(tree, 0, collapsed, internal);
    if (internal.empty()) break;
    subtree_cost(tree, 0, collapsed, cost, leaves);

    std::vector<double> g(internal.size());
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < internal.size(); ++k) {
      const auto i = internal[k];
      g[k] = (tree.nodes[i].sse - cost[i]) / static_cast<double>(leaves[i] - 1);
      alpha = std::min(alpha, g[k]);
    }
    const double tol = 1e-12 * std::max(1.0, std::fabs(alpha));
    for (std::size_t k = 0; k < internal.size(); ++k)
      if (g[k] <= alpha + tol) collapsed[internal[k]] = 1;
    seq.push_back(compact(tree, collapsed));
  }
  return seq;
}

TreeModel prune_by_validation(const TreeModel& tree, const Dataset& valid) {
  const auto rows = target_rows(valid, tree.target);
  if (rows.empty()) return tree;
  const Column& target = valid.column(tree.target);
  auto seq = pruning_sequence(tree);
  std::size_t best = 0;
  double best_ase = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const double a = validation_ase(seq[k], valid, rows, target);
    if (a <= best_ase) {
      best_ase = a;
      best = k;
    }
  }
  return std::move(seq[best]);
}

TreeModel train_tree(const Dataset& train, const Dataset& valid, std::string_view target,
                     const TreeParams& params) {
  TreeModel grown = grow_tree(train, target, params);
  if (!params.prune) return grown;
  return prune_by_validation(grown, valid);
}

std::vector<double> predict_tree(const TreeModel& model, const Dataset& data) {
  if (model.nodes.empty()) throw Error("tree model has no nodes");
  Router router(model, data);
  std::vector<double> out(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = router.predict(model, i);
  return out;
}

}  // namespace edumine::models
