#include "edumine/neural.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace edumine::models {

Eigen::VectorXd Network::forward(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd pre = (X * hidden_weights.transpose()).rowwise() + hidden_bias.transpose();
  const Eigen::MatrixXd act = pre.array().tanh();
  return (act * output_weights).array() + output_bias;
}

std::vector<double> Network::flatten() const {
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(hidden_weights.size() + hidden_bias.size() + output_weights.size() + 1));
  p.insert(p.end(), hidden_weights.data(), hidden_weights.data() + hidden_weights.size());
  p.insert(p.end(), hidden_bias.data(), hidden_bias.data() + hidden_bias.size());
  p.insert(p.end(), output_weights.data(), output_weights.data() + output_weights.size());
  p.push_back(output_bias);
  return p;
}

void Network::assign(const std::vector<double>& p) {
  const auto nw = static_cast<std::size_t>(hidden_weights.size());
  const auto nb = static_cast<std::size_t>(hidden_bias.size());
  const auto no = static_cast<std::size_t>(output_weights.size());
  if (p.size() != nw + nb + no + 1) throw Error("parameter vector does not match network shape");
  std::copy(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(nw), hidden_weights.data());
  std::copy(p.begin() + static_cast<std::ptrdiff_t>(nw), p.begin() + static_cast<std::ptrdiff_t>(nw + nb),
            hidden_bias.data());
  std::copy(p.begin() + static_cast<std::ptrdiff_t>(nw + nb),
            p.begin() + static_cast<std::ptrdiff_t>(nw + nb + no), output_weights.data());
  output_bias = p.back();
}

Network init_network(std::size_t inputs, std::size_t hidden, Rng& rng, bool zero_output) {
  if (hidden < 1) throw TrainingError("neural network needs at least one hidden unit");
  Network net;
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto p = static_cast<Eigen::Index>(inputs);
  net.hidden_weights.resize(h, p);
  net.hidden_bias = Eigen::VectorXd::Zero(h);
  net.output_weights = Eigen::VectorXd::Zero(h);
  const double hidden_limit = inputs > 0 ? 1.0 / std::sqrt(static_cast<double>(inputs)) : 0.0;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < h; ++i) net.hidden_weights(i, j) = rng.uniform(-hidden_limit, hidden_limit);
  if (!zero_output) {
    const double output_limit = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (Eigen::Index i = 0; i < h; ++i) net.output_weights(i) = rng.uniform(-output_limit, output_limit);
  }
  return net;
}

double loss_and_gradient(const Network& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         std::vector<double>* grad) {
  const auto m = static_cast<double>(X.rows());
  const Eigen::MatrixXd pre = (X * net.hidden_weights.transpose()).rowwise() + net.hidden_bias.transpose();
  const Eigen::MatrixXd act = pre.array().tanh();
  const Eigen::VectorXd out = (act * net.output_weights).array() + net.output_bias;
  const Eigen::VectorXd err = out - y;
  const double loss = err.squaredNorm() / m;
  if (!grad) return loss;

  // d loss / d out = 2 (out - y) / m
  const Eigen::VectorXd d_out = err * (2.0 / m);
  const Eigen::VectorXd g_output_weights = act.transpose() * d_out;
  const double g_output_bias = d_out.sum();
  // back through tanh: (1 - a^2)
  const Eigen::MatrixXd d_pre =
      ((d_out * net.output_weights.transpose()).array() * (1.0 - act.array().square())).matrix();
  const Eigen::MatrixXd g_hidden_weights = d_pre.transpose() * X;
  const Eigen::VectorXd g_hidden_bias = d_pre.colwise().sum().transpose();

  grad->clear();
  grad->insert(grad->end(), g_hidden_weights.data(), g_hidden_weights.data() + g_hidden_weights.size());
  grad->insert(grad->end(), g_hidden_bias.data(), g_hidden_bias.data() + g_hidden_bias.size());
  grad->insert(grad->end(), g_output_weights.data(), g_output_weights.data() + g_output_weights.size());
  grad->push_back(g_output_bias);
  return loss;
}

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& y, std::span<const std::size_t> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

NeuralModel train_nn(const Dataset& train, const Dataset& valid, std::string_view target,
                     const NeuralParams& params) {
  if (params.batch_size < 1) throw TrainingError("neural network batch size must be at least 1");
  if (!(params.learning_rate > 0.0)) throw TrainingError("neural network learning rate must be positive");

  PreparedMatrix p = prepare(train, target);
  if (p.X.rows() == 0) throw TrainingError("neural network has no training rows");

  NeuralModel model;
  model.transformer = p.transformer;
  model.target_mean = p.y.mean();
  double ss = 0.0;
  for (Eigen::Index i = 0; i < p.y.size(); ++i) ss += (p.y(i) - model.target_mean) * (p.y(i) - model.target_mean);
  const double sd = p.y.size() > 1 ? std::sqrt(ss / static_cast<double>(p.y.size() - 1)) : 0.0;
  model.target_scale = sd > 0.0 ? sd : 1.0;
  const Eigen::VectorXd t = (p.y.array() - model.target_mean) / model.target_scale;

  const auto valid_rows = target_rows(valid, target);
  const bool has_valid = !valid_rows.empty();
  Eigen::MatrixXd Xv;
  Eigen::VectorXd tv;
  if (has_valid) {
    Xv = model.transformer.transform(valid.take_rows(valid_rows));
    tv = (target_values(valid, target, valid_rows).array() - model.target_mean) / model.target_scale;
  }

  Rng rng(params.seed);
  Network net = init_network(p.X.cols(), params.hidden_units, rng, params.zero_output_init);
  const double unit = model.target_scale * model.target_scale;

  auto record = [&](std::size_t epoch) {
    EpochLog e;
    e.epoch = epoch;
    e.train_ase = loss_and_gradient(net, p.X, t, nullptr) * unit;
    e.validation_ase = has_valid ? loss_and_gradient(net, Xv, tv, nullptr) * unit : e.train_ase;
    if (!std::isfinite(e.train_ase) || !std::isfinite(e.validation_ase))
      throw TrainingError("neural network diverged at epoch " + std::to_string(epoch) +
                          " (non-finite loss); try a smaller learning rate");
    model.log.push_back(e);
    return e.validation_ase;
  };

  double best = record(0);
  model.network = net;
  model.best_epoch = 0;

  const std::size_t n = static_cast<std::size_t>(p.X.rows());
  std::vector<double> grad;
  std::vector<double> weights;
  for (std::size_t epoch = 1; epoch <= params.max_epochs; ++epoch) {
    auto order = rng.permutation(n);
    for (std::size_t start = 0; start < n; start += params.batch_size) {
      const std::size_t stop = std::min(n, start + params.batch_size);
      std::span<const std::size_t> batch(order.data() + start, stop - start);
      loss_and_gradient(net, gather_rows(p.X, batch), gather(t, batch), &grad);
      weights = net.flatten();
      for (std::size_t k = 0; k < weights.size(); ++k) weights[k] -= params.learning_rate * grad[k];
      net.assign(weights);
    }
    const double v = record(epoch);
    if (v < best) {
      best = v;
      model.network = net;
      model.best_epoch = epoch;
    } else if (epoch - model.best_epoch >= params.patience) {
      break;
    }
  }
  return model;
}

std::vector<double> predict(const NeuralModel& model, const Dataset& data) {
  const Eigen::MatrixXd X = model.transformer.transform(data);
  const Eigen::VectorXd out = model.network.forward(X).array() * model.target_scale + model.target_mean;
  return {out.data(), out.data() + out.size()};
}

}  // namespace edumine::models
