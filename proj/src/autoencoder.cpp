#include "aeot/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aeot::ae {

void AeConfig::validate() const {
  if (input_dim < 1 || latent_dim < 1) throw std::invalid_argument("AeConfig: dimensions must be >= 1");
  if (latent_dim > input_dim) throw std::invalid_argument("AeConfig: latent_dim must not exceed input_dim");
  if (epochs < 1) throw std::invalid_argument("AeConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("AeConfig: batch size must be >= 1");
  if (!(adam.lr > 0.0)) throw std::invalid_argument("AeConfig: learning rate must be positive");
  for (Index w : hidden)
    if (w < 1) throw std::invalid_argument("AeConfig: hidden widths must be positive");
}

namespace {

Autoencoder initial_model(const AeConfig& cfg, Rng& rng) {
  std::vector<Index> enc{cfg.input_dim};
  enc.insert(enc.end(), cfg.hidden.begin(), cfg.hidden.end());
  enc.push_back(cfg.latent_dim);
  std::vector<Index> dec(enc.rbegin(), enc.rend());
  Autoencoder model;
  model.encoder = nn::Mlp::initialized(enc, cfg.hidden_activation, cfg.code_activation, rng);
  model.decoder = nn::Mlp::initialized(dec, cfg.hidden_activation, cfg.output_activation, rng);
  return model;
}

}  // namespace

double reconstruction_mse(const Autoencoder& model, const Eigen::MatrixXd& images) {
  const Eigen::MatrixXd recon = decode(model.decoder, encode(model.encoder, images));
  return (recon - images).squaredNorm() / static_cast<double>(images.size());
}

AeTrainer::AeTrainer(const AeConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  model_ = initial_model(cfg_, rng_);
  enc_adam_ = nn::Adam(cfg_.adam, model_.encoder);
  dec_adam_ = nn::Adam(cfg_.adam, model_.decoder);
}

AeTrainer::AeTrainer(const AeConfig& cfg, Autoencoder model, nn::Adam encoder_adam, nn::Adam decoder_adam)
    : cfg_(cfg),
      rng_(cfg.seed),
      model_(std::move(model)),
      enc_adam_(std::move(encoder_adam)),
      dec_adam_(std::move(decoder_adam)) {
  cfg_.validate();
  if (model_.encoder.input_dim() != cfg_.input_dim || model_.decoder.output_dim() != cfg_.input_dim ||
      model_.encoder.output_dim() != model_.decoder.input_dim())
    throw std::invalid_argument("AeTrainer: model shapes do not match config");
}

double AeTrainer::step(const Eigen::MatrixXd& batch) {
  if (batch.rows() < 1 || batch.cols() != cfg_.input_dim)
    throw std::invalid_argument("AeTrainer::step: batch shape mismatch");
  const nn::Trace enc_trace = nn::forward_trace(model_.encoder, batch);
  const Eigen::MatrixXd codes = enc_trace.post.back().transpose();
  const nn::Trace dec_trace = nn::forward_trace(model_.decoder, codes);
  const Eigen::MatrixXd diff = dec_trace.post.back().transpose() - batch;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double loss = diff.squaredNorm() * scale;
  if (!std::isfinite(loss)) throw std::runtime_error("autoencoder loss is not finite");

  const nn::BackwardResult dec = nn::backward(model_.decoder, dec_trace, (2.0 * scale) * diff);
  const nn::BackwardResult enc = nn::backward(model_.encoder, enc_trace, dec.input_grad);
  enc_adam_.step(model_.encoder, enc.grads);
  dec_adam_.step(model_.decoder, dec.grads);
  return loss;
}

AeResult train_ae(const Eigen::MatrixXd& images, const AeConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (images.rows() == 0) throw std::invalid_argument("train_ae: empty dataset");
  if (images.cols() != cfg.input_dim) throw std::invalid_argument("train_ae: image size does not match input_dim");
  if (images.rows() < cfg.batch_size) throw std::invalid_argument("train_ae: fewer images than batch size");

  AeTrainer trainer(cfg);
  AeResult result;
  const Index n = images.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  Eigen::MatrixXd batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Index{0});
    for (Index k = n - 1; k > 0; --k) {
      const auto j = static_cast<Index>(trainer.rng().below(static_cast<std::uint64_t>(k + 1)));
      std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(j)]);
    }
    double sum = 0.0;
    int batches = 0;
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index size = std::min(cfg.batch_size, n - start);
      batch.resize(size, images.cols());
      for (Index r = 0; r < size; ++r) batch.row(r) = images.row(order[static_cast<std::size_t>(start + r)]);
      sum += trainer.step(batch);
      ++batches;
    }
    result.epoch_loss.push_back(sum / batches);
    if (on_epoch) on_epoch(epoch + 1, result.epoch_loss.back());
  }
  result.model = trainer.model();
  result.encoder_adam = trainer.encoder_adam();
  result.decoder_adam = trainer.decoder_adam();
  result.final_mse = reconstruction_mse(result.model, images);
  return result;
}

Eigen::MatrixXd encode(const nn::Mlp& encoder, const Eigen::MatrixXd& images) {
  if (images.cols() != encoder.input_dim())
    throw std::invalid_argument("encode: image size " + std::to_string(images.cols()) +
                                " does not match encoder input " + std::to_string(encoder.input_dim()));
  return nn::forward(encoder, images);
}

Eigen::MatrixXd decode(const nn::Mlp& decoder, const Eigen::MatrixXd& codes) {
  if (codes.cols() != decoder.input_dim())
    throw std::invalid_argument("decode: code size " + std::to_string(codes.cols()) +
                                " does not match decoder input " + std::to_string(decoder.input_dim()));
  return nn::forward(decoder, codes);
}

Eigen::MatrixXd clamp_pixels(const Eigen::MatrixXd& images) {
  return images.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0); });
}

}  // namespace aeot::ae
