#include "aeot/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aeot::nn {
namespace {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd apply(const Activation& act, const MatrixXd& h) {
  switch (act.kind) {
    case ActivationKind::identity:
      return h;
    case ActivationKind::relu:
      return h.cwiseMax(0.0);
    case ActivationKind::leaky_relu:
      return (h.array() > 0.0).select(h, act.slope * h);
    case ActivationKind::sigmoid:
      return h.unaryExpr([](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      });
  }
  throw std::logic_error("unknown activation");
}

// f'(h), given h and a = f(h)
ArrayXXd derivative(const Activation& act, const MatrixXd& h, const MatrixXd& a) {
  switch (act.kind) {
    case ActivationKind::identity:
      return ArrayXXd::Ones(h.rows(), h.cols());
    case ActivationKind::relu:
      return (h.array() > 0.0).cast<double>();
    case ActivationKind::leaky_relu:
      return (h.array() > 0.0).select(ArrayXXd::Ones(h.rows(), h.cols()), act.slope);
    case ActivationKind::sigmoid:
      return a.array() * (1.0 - a.array());
  }
  throw std::logic_error("unknown activation");
}

// f''(h); only called for non-piecewise-linear activations.
ArrayXXd second_derivative(const Activation& act, const MatrixXd& a) {
  if (act.kind == ActivationKind::sigmoid) {
    const ArrayXXd s = a.array();
    return s * (1.0 - s) * (1.0 - 2.0 * s);
  }
  return ArrayXXd::Zero(a.rows(), a.cols());
}

void check_batch(const Mlp& net, const MatrixXd& batch) {
  if (net.depth() == 0) throw std::invalid_argument("network has no layers");
  if (batch.cols() != net.input_dim()) {
    throw std::invalid_argument("input dimension " + std::to_string(batch.cols()) +
                                " does not match network input " +
                                std::to_string(net.input_dim()));
  }
  if (!batch.allFinite()) throw std::invalid_argument("non-finite network input");
}

}  // namespace

Activation Activation::leaky_relu(double slope) {
  if (!(slope > 0.0 && slope < 1.0)) throw std::invalid_argument("LeakyReLU slope must be in (0,1)");
  return {ActivationKind::leaky_relu, slope};
}

std::string activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::relu: return "relu";
    case ActivationKind::leaky_relu: return "leaky_relu";
    case ActivationKind::sigmoid: return "sigmoid";
  }
  throw std::logic_error("unknown activation");
}

ActivationKind activation_kind_from_name(const std::string& name) {
  if (name == "identity") return ActivationKind::identity;
  if (name == "relu") return ActivationKind::relu;
  if (name == "leaky_relu") return ActivationKind::leaky_relu;
  if (name == "sigmoid") return ActivationKind::sigmoid;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("Mlp: needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.weight.rows() < 1 || layer.weight.cols() < 1)
      throw std::invalid_argument("Mlp: empty layer " + std::to_string(l));
    if (layer.bias.size() != layer.weight.rows())
      throw std::invalid_argument("Mlp: bias size mismatch in layer " + std::to_string(l));
    if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows())
      throw std::invalid_argument("Mlp: layer " + std::to_string(l) + " does not chain");
    if (layer.activation.kind == ActivationKind::leaky_relu &&
        !(layer.activation.slope > 0.0 && layer.activation.slope < 1.0))
      throw std::invalid_argument("Mlp: LeakyReLU slope must be in (0,1)");
  }
}

Mlp Mlp::initialized(const std::vector<Index>& widths, Activation hidden, Activation output,
                     Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("Mlp::initialized: need input and output width");
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Index fan_in = widths[l];
    const Index fan_out = widths[l + 1];
    if (fan_in < 1 || fan_out < 1) throw std::invalid_argument("Mlp::initialized: zero width");
    const Activation act = l + 2 == widths.size() ? output : hidden;
    const bool rectifier =
        act.kind == ActivationKind::relu || act.kind == ActivationKind::leaky_relu;
    const double bound = rectifier ? std::sqrt(6.0 / static_cast<double>(fan_in))
                                   : std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Layer layer{MatrixXd(fan_out, fan_in), VectorXd::Zero(fan_out), act};
    for (Index r = 0; r < fan_out; ++r)
      for (Index c = 0; c < fan_in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

Index Mlp::input_dim() const { return layers_.empty() ? 0 : layers_.front().weight.cols(); }
Index Mlp::output_dim() const { return layers_.empty() ? 0 : layers_.back().weight.rows(); }

Index Mlp::parameter_count() const {
  Index n = 0;
  for (const Layer& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

ParamGrads ParamGrads::zeros_like(const Mlp& net) {
  ParamGrads g;
  for (const Layer& layer : net.layers()) {
    g.weight.push_back(MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    g.bias.push_back(VectorXd::Zero(layer.bias.size()));
  }
  return g;
}

bool ParamGrads::matches(const Mlp& net) const {
  if (weight.size() != net.depth() || bias.size() != net.depth()) return false;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const Layer& layer = net.layers()[l];
    if (weight[l].rows() != layer.weight.rows() || weight[l].cols() != layer.weight.cols() ||
        bias[l].size() != layer.bias.size())
      return false;
  }
  return true;
}

Trace forward_trace(const Mlp& net, const MatrixXd& batch) {
  check_batch(net, batch);
  Trace t;
  t.pre.reserve(net.depth());
  t.post.reserve(net.depth() + 1);
  t.post.push_back(batch.transpose());
  for (const Layer& layer : net.layers()) {
    MatrixXd h(layer.weight.rows(), batch.rows());
    h.noalias() = layer.weight * t.post.back();
    h.colwise() += layer.bias;
    t.post.push_back(apply(layer.activation, h));
    t.pre.push_back(std::move(h));
  }
  return t;
}

MatrixXd forward(const Mlp& net, const MatrixXd& batch) {
  return forward_trace(net, batch).post.back().transpose();
}

VectorXd evaluate(const Mlp& net, const MatrixXd& batch) {
  if (net.output_dim() != 1) throw std::invalid_argument("evaluate: network output is not scalar");
  return forward_trace(net, batch).post.back().row(0).transpose();
}

BackwardResult backward(const Mlp& net, const Trace& trace, const MatrixXd& output_grad) {
  const Index m = trace.post.front().cols();
  if (output_grad.rows() != m || output_grad.cols() != net.output_dim())
    throw std::invalid_argument("backward: output gradient shape mismatch");
  BackwardResult out{ParamGrads::zeros_like(net), {}};
  MatrixXd upstream = output_grad.transpose();  // dLoss/d post[l+1]
  for (std::size_t l = net.depth(); l-- > 0;) {
    const Layer& layer = net.layers()[l];
    const MatrixXd delta =
        (derivative(layer.activation, trace.pre[l], trace.post[l + 1]) * upstream.array()).matrix();
    out.grads.weight[l].noalias() = delta * trace.post[l].transpose();
    out.grads.bias[l] = delta.rowwise().sum();
    upstream.resize(layer.weight.cols(), m);
    upstream.noalias() = layer.weight.transpose() * delta;
  }
  out.input_grad = upstream.transpose();
  return out;
}

MatrixXd input_gradients(const Mlp& net, const MatrixXd& batch) {
  if (net.output_dim() != 1) throw std::invalid_argument("input_gradient: network output is not scalar");
  const Trace trace = forward_trace(net, batch);
  return backward(net, trace, MatrixXd::Ones(batch.rows(), 1)).input_grad;
}

VectorXd input_gradient(const Mlp& net, const VectorXd& z) {
  return input_gradients(net, z.transpose()).row(0).transpose();
}

GradBundle loss_and_grads(const Mlp& net, const MatrixXd& z, const VectorXd& targets,
                          const VectorXd& match_dist, double lambda) {
  if (net.output_dim() != 1) throw std::invalid_argument("loss_and_grads: network output is not scalar");
  const Index m = z.rows();
  if (m < 1) throw std::invalid_argument("loss_and_grads: empty batch");
  if (targets.size() != m || match_dist.size() != m)
    throw std::invalid_argument("loss_and_grads: targets/match distances must have one entry per sample");
  if (!(lambda >= 0.0)) throw std::invalid_argument("loss_and_grads: lambda must be >= 0");

  const Trace trace = forward_trace(net, z);
  const std::size_t depth = net.depth();
  const double inv_m = 1.0 / static_cast<double>(m);

  GradBundle out;
  out.grads = ParamGrads::zeros_like(net);

  // Injected adjoints of each layer's pre-activation from the regularizer.
  std::vector<MatrixXd> pre_bar(depth);

  if (lambda > 0.0) {
    // Input-gradient pass: v[l] = dD/dpost[l+1] ... written bottom-up as
    //   v_top = 1, u_l = f'_l(pre_l) * v_l, v_{l-1} = W_l^T u_l, g = v_{-1}.
    std::vector<ArrayXXd> fprime(depth);
    std::vector<MatrixXd> v(depth);  // v[l]: dD/dpost[l+1]
    std::vector<MatrixXd> u(depth);  // u[l]: dD/dpre[l]
    v[depth - 1] = MatrixXd::Ones(1, m);
    for (std::size_t l = depth; l-- > 0;) {
      const Layer& layer = net.layers()[l];
      fprime[l] = derivative(layer.activation, trace.pre[l], trace.post[l + 1]);
      u[l] = (fprime[l] * v[l].array()).matrix();
      if (l > 0) v[l - 1].noalias() = layer.weight.transpose() * u[l];
    }
    MatrixXd g(net.input_dim(), m);
    g.noalias() = net.layers()[0].weight.transpose() * u[0];
    out.input_grad = g.transpose();

    // Regularizer and its adjoint with respect to g.
    MatrixXd g_bar(g.rows(), m);
    double reg = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double norm = std::sqrt(g.col(i).squaredNorm() + kNormEps);
      const double r = norm - match_dist(i);
      reg += r * r;
      g_bar.col(i) = (lambda * inv_m * 2.0 * r / norm) * g.col(i);
    }
    out.reg_term = reg * inv_m;

    // Reverse through the input-gradient pass.
    MatrixXd v_bar = g_bar;  // adjoint of v[l-1] (of g for l = 0)
    for (std::size_t l = 0; l < depth; ++l) {
      const Layer& layer = net.layers()[l];
      MatrixXd u_bar(layer.weight.rows(), m);
      u_bar.noalias() = layer.weight * v_bar;
      out.grads.weight[l].noalias() += u[l] * v_bar.transpose();
      if (!layer.activation.piecewise_linear()) {
        pre_bar[l] = (second_derivative(layer.activation, trace.post[l + 1]) * v[l].array() *
                      u_bar.array())
                         .matrix();
      }
      if (l + 1 < depth) v_bar = (fprime[l] * u_bar.array()).matrix();
    }
  }

  // Value term.
  const MatrixXd& out_row = trace.post.back();
  MatrixXd top_grad(1, m);
  double mse = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double r = out_row(0, i) - targets(i);
    mse += r * r;
    top_grad(0, i) = 2.0 * inv_m * r;
  }
  out.mse_term = mse * inv_m;
  out.loss = out.mse_term + lambda * out.reg_term;
  if (!std::isfinite(out.loss)) throw std::runtime_error("loss_and_grads: non-finite loss");

  // Ordinary reverse pass with the regularizer's pre-activation adjoints
  // injected at every layer.
  MatrixXd upstream = top_grad;
  for (std::size_t l = depth; l-- > 0;) {
    const Layer& layer = net.layers()[l];
    MatrixXd delta =
        (derivative(layer.activation, trace.pre[l], trace.post[l + 1]) * upstream.array()).matrix();
    if (pre_bar[l].size() != 0) delta += pre_bar[l];
    out.grads.weight[l].noalias() += delta * trace.post[l].transpose();
    out.grads.bias[l] += delta.rowwise().sum();
    if (l > 0) {
      upstream.resize(layer.weight.cols(), m);
      upstream.noalias() = layer.weight.transpose() * delta;
    }
  }
  return out;
}

Adam::Adam(AdamConfig config, const Mlp& net)
    : config_(config), m_(ParamGrads::zeros_like(net)), v_(ParamGrads::zeros_like(net)) {}

Adam::Adam(AdamConfig config, ParamGrads first_moment, ParamGrads second_moment, std::int64_t step)
    : config_(config), m_(std::move(first_moment)), v_(std::move(second_moment)), t_(step) {
  if (t_ < 0) throw std::invalid_argument("Adam: negative step counter");
  if (m_.weight.size() != v_.weight.size() || m_.bias.size() != v_.bias.size())
    throw std::invalid_argument("Adam: moment shapes differ");
}

void Adam::step(Mlp& net, const ParamGrads& grads) {
  if (!grads.matches(net) || !m_.matches(net))
    throw std::invalid_argument("Adam::step: gradient/state shape mismatch");
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = config_.lr;
  const double eps = config_.eps;
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m.array() = b1 * m.array() + (1.0 - b1) * g.array();
    v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < net.depth(); ++l) {
    Layer& layer = net.mutable_layers()[l];
    update(layer.weight, m_.weight[l], v_.weight[l], grads.weight[l]);
    update(layer.bias, m_.bias[l], v_.bias[l], grads.bias[l]);
  }
}

}  // namespace aeot::nn
