#pragma once

// Fully-connected networks with hand-written first- and second-order
// reverse passes, and the Adam optimizer.
//
// Batches are passed as m x d matrices (one sample per row). Internally every
// layer works on feature-major blocks (features x m) so each layer is a
// single matrix product.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "aeot/rng.hpp"

namespace aeot::nn {

using Index = Eigen::Index;

// Floor inside sqrt(|grad|^2 + eps) so the norm is differentiable at 0.
inline constexpr double kNormEps = 1e-12;

enum class ActivationKind { identity, relu, leaky_relu, sigmoid };

struct Activation {
  ActivationKind kind = ActivationKind::identity;
  double slope = 0.0;  // leaky_relu only, in (0, 1)

  static Activation identity() { return {ActivationKind::identity, 0.0}; }
  static Activation relu() { return {ActivationKind::relu, 0.0}; }
  static Activation leaky_relu(double slope);
  static Activation sigmoid() { return {ActivationKind::sigmoid, 0.0}; }

  // Piecewise-linear activations have a vanishing second derivative almost
  // everywhere, which lets the second-order pass skip a term.
  bool piecewise_linear() const { return kind != ActivationKind::sigmoid; }

  friend bool operator==(const Activation&, const Activation&) = default;
};

std::string activation_name(ActivationKind kind);
ActivationKind activation_kind_from_name(const std::string& name);

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation;

  friend bool operator==(const Layer& a, const Layer& b) {
    return a.activation == b.activation && a.weight.rows() == b.weight.rows() &&
           a.weight.cols() == b.weight.cols() && a.weight == b.weight && a.bias == b.bias;
  }
};

class Mlp {
 public:
  Mlp() = default;
  // Throws std::invalid_argument unless consecutive layer shapes chain.
  explicit Mlp(std::vector<Layer> layers);

  // widths = {input, hidden..., output}. Hidden layers use `hidden`, the last
  // layer uses `output`. ReLU-family layers get He-uniform weights with
  // bound sqrt(6 / fan_in); identity/sigmoid layers get Glorot-uniform
  // weights, bound sqrt(6 / (fan_in + fan_out)). Biases start at zero.
  static Mlp initialized(const std::vector<Index>& widths, Activation hidden, Activation output,
                         Rng& rng);

  Index input_dim() const;
  Index output_dim() const;
  std::size_t depth() const { return layers_.size(); }
  Index parameter_count() const;

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<Layer> layers_;
};

// Same shapes as an Mlp's parameters.
struct ParamGrads {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;

  static ParamGrads zeros_like(const Mlp& net);
  bool matches(const Mlp& net) const;
};

// Cached activations of a forward pass, feature-major.
struct Trace {
  std::vector<Eigen::MatrixXd> pre;   // pre[l]: layer l pre-activation
  std::vector<Eigen::MatrixXd> post;  // post[0] is the input, post[l+1] = f(pre[l])
};

Trace forward_trace(const Mlp& net, const Eigen::MatrixXd& batch);

// m x output_dim
Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& batch);

// Scalar network evaluated on a batch: m values.
Eigen::VectorXd evaluate(const Mlp& net, const Eigen::MatrixXd& batch);

struct BackwardResult {
  ParamGrads grads;
  Eigen::MatrixXd input_grad;  // m x input_dim
};

// Vector-Jacobian product: output_grad is dLoss/dOutput (m x output_dim).
BackwardResult backward(const Mlp& net, const Trace& trace, const Eigen::MatrixXd& output_grad);

// grad_z D(z) for a scalar network. At an exact kink the derivative is taken
// as 0 for ReLU and `slope` for LeakyReLU.
Eigen::VectorXd input_gradient(const Mlp& net, const Eigen::VectorXd& z);
Eigen::MatrixXd input_gradients(const Mlp& net, const Eigen::MatrixXd& batch);

struct GradBundle {
  double loss = 0.0;
  double mse_term = 0.0;  // (1/m) sum (D(z_i) - H_i)^2
  double reg_term = 0.0;  // (1/m) sum (|grad D(z_i)| - t_i)^2, before the lambda weight
  ParamGrads grads;
  Eigen::MatrixXd input_grad;  // m x d, filled when lambda > 0
};

// loss = mse_term + lambda * reg_term, with the exact parameter gradient.
// The reg_term gradient runs a reverse pass through the input-gradient
// computation itself (double backprop). Throws std::runtime_error when the
// loss is not finite.
GradBundle loss_and_grads(const Mlp& net, const Eigen::MatrixXd& z, const Eigen::VectorXd& targets,
                          const Eigen::VectorXd& match_dist, double lambda);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

class Adam {
 public:
  Adam() = default;
  Adam(AdamConfig config, const Mlp& net);
  // Restores a saved optimizer; moment shapes must match each other.
  Adam(AdamConfig config, ParamGrads first_moment, ParamGrads second_moment, std::int64_t step);

  // Bias-corrected update of every parameter, t <- t + 1.
  void step(Mlp& net, const ParamGrads& grads);

  const AdamConfig& config() const { return config_; }
  const ParamGrads& first_moment() const { return m_; }
  const ParamGrads& second_moment() const { return v_; }
  std::int64_t steps() const { return t_; }

 private:
  AdamConfig config_;
  ParamGrads m_;
  ParamGrads v_;
  std::int64_t t_ = 0;
};

}  // namespace aeot::nn
