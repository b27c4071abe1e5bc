#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "edumine/dataset.hpp"
#include "edumine/prepare.hpp"
#include "edumine/random.hpp"

namespace edumine::models {

struct NeuralParams {
  std::size_t hidden_units = 3;
  double learning_rate = 0.01;
  std::size_t max_epochs = 2000;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  std::size_t patience = 50;
  bool zero_output_init = false;
};

/// One tanh hidden layer and a linear output unit.
struct Network {
  Eigen::MatrixXd hidden_weights;  // hidden x inputs
  Eigen::VectorXd hidden_bias;     // hidden
  Eigen::VectorXd output_weights;  // hidden
  double output_bias = 0.0;

  std::size_t inputs() const { return static_cast<std::size_t>(hidden_weights.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(hidden_weights.rows()); }

  /// Output for every row of X (rows x inputs).
  Eigen::VectorXd forward(const Eigen::MatrixXd& X) const;

  /// All parameters in a fixed order: hidden weights (column major), hidden
  /// bias, output weights, output bias.
  std::vector<double> flatten() const;
  void assign(const std::vector<double>& params);
};

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights; biases zero.
Network init_network(std::size_t inputs, std::size_t hidden, Rng& rng, bool zero_output = false);

/// Mean squared error of net over (X, y); when `grad` is given it receives
/// the exact gradient, laid out like Network::flatten().
double loss_and_gradient(const Network& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         std::vector<double>* grad);

struct EpochLog {
  std::size_t epoch = 0;
  double train_ase = 0.0;
  double validation_ase = 0.0;
};

struct NeuralModel {
  Transformer transformer;
  Network network;
  // The network learns (y - target_mean) / target_scale.
  double target_mean = 0.0;
  double target_scale = 1.0;
  std::size_t best_epoch = 0;
  std::vector<EpochLog> log;  // epoch 0 is the initial weights
};

/// Mini-batch gradient descent; keeps the weights of the epoch with the
/// lowest validation ASE and stops after `patience` epochs without
/// improvement. With an empty validation set the training ASE is used.
NeuralModel train_nn(const Dataset& train, const Dataset& valid, std::string_view target,
                     const NeuralParams& params);

std::vector<double> predict(const NeuralModel& model, const Dataset& data);

}  // namespace edumine::models
