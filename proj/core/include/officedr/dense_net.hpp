#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "officedr/common.hpp"

namespace officedr {

enum class Activation : std::uint8_t { Identity = 0, Tanh = 1, Relu = 2 };

struct DenseLayer {
  Eigen::MatrixXd weight;  // out × in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::Identity;
};

/// Per-parameter gradients with the same layout as DenseNet's layers, plus
/// the gradient with respect to the network input.
struct Gradients {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;
  Eigen::MatrixXd input;

  double max_abs() const;
};

/// Fully connected feed-forward network. Batches are matrices with one
/// sample per column.
class DenseNet {
 public:
  /// Intermediate activations kept for the backward pass. values[0] is the
  /// input, values[l + 1] the post-activation output of layer l.
  struct Trace {
    std::vector<Eigen::MatrixXd> values;
  };

  DenseNet() = default;
  explicit DenseNet(std::vector<DenseLayer> layers);

  /// Weights uniform in ±sqrt(6 / (fan_in + fan_out)), zero biases.
  static DenseNet create(const std::vector<int>& dims, const std::vector<Activation>& activations,
                         std::uint64_t seed);
  /// Tanh hidden layers and an identity output layer.
  static DenseNet mlp(int input, const std::vector<int>& hidden, int output, std::uint64_t seed,
                      Activation hidden_activation = Activation::Tanh);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs, Trace& trace) const;

  /// Reverse-mode pass given dLoss/dOutput for the traced batch.
  Gradients backward(const Trace& trace, const Eigen::MatrixXd& output_grad) const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<int> dims() const;
  int input_dim() const;
  int output_dim() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

  friend bool operator==(const DenseNet& a, const DenseNet& b);

 private:
  std::vector<DenseLayer> layers_;
};

/// Scalar loss of a batch of outputs, averaged over the batch.
class Loss {
 public:
  virtual ~Loss() = default;
  virtual double value(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) const = 0;
  virtual Eigen::MatrixXd gradient(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) const = 0;
};

/// Mean over every batch element and output coordinate of (y - t)².
class MeanSquaredError final : public Loss {
 public:
  double value(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) const override;
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) const override;
};

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};

/// Exact gradients of the mean batch loss. Throws DivergenceError when the
/// loss is not finite.
LossAndGradients net_gradients(const DenseNet& net, const Loss& loss, const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets);

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

struct AdamState {
  AdamConfig config;
  std::vector<Eigen::MatrixXd> m_weight, v_weight;
  std::vector<Eigen::VectorXd> m_bias, v_bias;
  std::int64_t step = 0;

  static AdamState for_net(const DenseNet& net, const AdamConfig& config);
  friend bool operator==(const AdamState& a, const AdamState& b);
};

/// Bias-corrected ADAM. weight_decay·θ is added to the gradient before the
/// moment updates.
void adam_step(DenseNet& net, const Gradients& grads, AdamState& state);

/// θ' ← (1 - τ)·θ' + τ·θ for every parameter.
void polyak_update(DenseNet& target, const DenseNet& online, double tau);

/// Central-difference check of net_gradients over every parameter. Returns
/// the largest |analytic - numeric| / max(|analytic| + |numeric|, 1e-8).
double finite_diff_check(const DenseNet& net, const Loss& loss, const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets, double eps = 1e-5);
double finite_diff_check(const DenseNet& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         double eps = 1e-5);

// Binary layout: "ODNN", u32 version, u32 layer count, u32 dims[L + 1],
// u8 activation[L], then per layer the row-major weights and the bias as
// little-endian f64.
void write_net(std::ostream& out, const DenseNet& net);
DenseNet read_net(std::istream& in);
void save_net(const DenseNet& net, const std::filesystem::path& path);
DenseNet load_net(const std::filesystem::path& path);

void write_adam(std::ostream& out, const AdamState& state);
AdamState read_adam(std::istream& in);

}  // namespace officedr
