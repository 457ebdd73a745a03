#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "aeot/mlp.hpp"
#include "aeot/rng.hpp"

namespace aeot::ae {

using Index = Eigen::Index;

struct AeConfig {
  Index input_dim = 784;
  Index latent_dim = 10;
  std::vector<Index> hidden{512, 256};  // encoder side; the decoder mirrors it
  int epochs = 50;
  Index batch_size = 64;
  nn::AdamConfig adam{1e-3, 0.5, 0.999, 1e-8};
  std::uint64_t seed = 0;
  nn::Activation hidden_activation = nn::Activation::leaky_relu(0.2);
  nn::Activation code_activation = nn::Activation::identity();
  nn::Activation output_activation = nn::Activation::sigmoid();

  // Throws std::invalid_argument.
  void validate() const;
  friend bool operator==(const AeConfig&, const AeConfig&) = default;
};

struct Autoencoder {
  nn::Mlp encoder;
  nn::Mlp decoder;
};

// Reconstruction error: mean over images and pixels of (decode(encode(x)) - x)^2.
double reconstruction_mse(const Autoencoder& model, const Eigen::MatrixXd& images);

// Optimizer state for both halves, stepped together.
class AeTrainer {
 public:
  explicit AeTrainer(const AeConfig& cfg);
  AeTrainer(const AeConfig& cfg, Autoencoder model, nn::Adam encoder_adam, nn::Adam decoder_adam);

  // One Adam step on the batch; returns the batch loss before the step.
  // Throws std::runtime_error on a non-finite loss.
  double step(const Eigen::MatrixXd& batch);

  const Autoencoder& model() const { return model_; }
  const nn::Adam& encoder_adam() const { return enc_adam_; }
  const nn::Adam& decoder_adam() const { return dec_adam_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

 private:
  AeConfig cfg_;
  Rng rng_;
  Autoencoder model_;
  nn::Adam enc_adam_;
  nn::Adam dec_adam_;
};

struct AeResult {
  Autoencoder model;
  nn::Adam encoder_adam;
  nn::Adam decoder_adam;
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  double final_mse = 0.0;          // reconstruction_mse on the full training set
};

using EpochCallback = std::function<void(int epoch, double loss)>;

// Each epoch visits every image once in a freshly shuffled order; the last
// batch may be short.
AeResult train_ae(const Eigen::MatrixXd& images, const AeConfig& cfg, const EpochCallback& on_epoch = {});

// Rows are images / codes.
Eigen::MatrixXd encode(const nn::Mlp& encoder, const Eigen::MatrixXd& images);
// Raw decoder output; see clamp_pixels for emission.
Eigen::MatrixXd decode(const nn::Mlp& decoder, const Eigen::MatrixXd& codes);
Eigen::MatrixXd clamp_pixels(const Eigen::MatrixXd& images);

}  // namespace aeot::ae
