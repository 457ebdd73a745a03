#include <doctest.h>

#include <random>
#include <type_traits>

#include "aeot/autoencoder.hpp"
#include "aeot/eval.hpp"
#include "oracles.hpp"

using namespace aeot;

namespace {

Eigen::MatrixXd random_images(std::uint64_t seed, int n, int dim) {
  std::mt19937_64 gen(seed);
  return oracle::random_points(gen, n, dim, 0.0, 1.0);
}

ae::AeConfig small_config(int dim) {
  ae::AeConfig cfg;
  cfg.input_dim = dim;
  cfg.latent_dim = 4;
  cfg.hidden = {32};
  cfg.batch_size = 8;
  cfg.epochs = 5;
  return cfg;
}

}  // namespace

TEST_CASE("default architecture mirrors 784-512-256-10") {
  ae::AeTrainer t(ae::AeConfig{});
  const auto& enc = t.model().encoder;
  const auto& dec = t.model().decoder;
  REQUIRE(enc.depth() == 3);
  CHECK(enc.layers()[0].weight.cols() == 784);
  CHECK(enc.layers()[0].weight.rows() == 512);
  CHECK(enc.layers()[1].weight.rows() == 256);
  CHECK(enc.output_dim() == 10);
  CHECK(enc.layers()[0].activation == nn::Activation::leaky_relu(0.2));
  CHECK(dec.input_dim() == 10);
  CHECK(dec.layers()[0].weight.rows() == 256);
  CHECK(dec.layers()[1].weight.rows() == 512);
  CHECK(dec.output_dim() == 784);
  CHECK(dec.layers()[2].activation == nn::Activation::sigmoid());
}

TEST_CASE("config and input validation") {
  ae::AeConfig cfg = small_config(16);
  cfg.latent_dim = 17;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config(16);
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config(16);
  CHECK_THROWS_AS(ae::train_ae(Eigen::MatrixXd(0, 16), cfg), std::invalid_argument);
  CHECK_THROWS_AS(ae::train_ae(random_images(1, 4, 16), cfg), std::invalid_argument);
  CHECK_THROWS_AS(ae::train_ae(random_images(1, 20, 15), cfg), std::invalid_argument);
}

TEST_CASE("a single image is memorized") {
  ae::AeConfig cfg = small_config(64);
  cfg.batch_size = 1;
  cfg.epochs = 500;
  const Eigen::MatrixXd img = random_images(2, 1, 64);
  const auto result = ae::train_ae(img, cfg);
  CHECK(result.final_mse < 1e-3);
  CHECK(result.epoch_loss.size() == 500);
}

TEST_CASE("an identity-capable autoencoder reaches near-zero error") {
  ae::AeConfig cfg;
  cfg.input_dim = 4;
  cfg.latent_dim = 4;
  cfg.hidden = {};
  cfg.batch_size = 8;
  cfg.epochs = 3000;
  cfg.adam.lr = 1e-2;
  cfg.code_activation = nn::Activation::identity();
  cfg.output_activation = nn::Activation::identity();
  const auto result = ae::train_ae(random_images(3, 16, 4), cfg);
  CHECK(result.final_mse < 1e-6);
}

TEST_CASE("frozen-batch loss mostly decreases over the first 100 steps") {
  ae::AeConfig cfg = small_config(64);
  cfg.adam.lr = 1e-3;
  const Eigen::MatrixXd batch = random_images(4, 8, 64);
  ae::AeTrainer trainer(cfg);
  std::vector<double> losses;
  for (int k = 0; k < 101; ++k) losses.push_back(trainer.step(batch));
  int non_increasing = 0;
  for (std::size_t k = 1; k < losses.size(); ++k) non_increasing += losses[k] <= losses[k - 1];
  CAPTURE(non_increasing);
  CHECK(non_increasing >= 95);
}

TEST_CASE("encode and decode preserve batch shapes") {
  ae::AeTrainer trainer(small_config(16));
  const auto& model = trainer.model();
  for (int n : {1, 3, 17}) {
    const Eigen::MatrixXd codes = ae::encode(model.encoder, random_images(5, n, 16));
    CHECK(codes.rows() == n);
    CHECK(codes.cols() == 4);
    const Eigen::MatrixXd back = ae::decode(model.decoder, codes);
    CHECK(back.rows() == n);
    CHECK(back.cols() == 16);
  }
  CHECK_THROWS_AS(ae::encode(model.encoder, Eigen::MatrixXd::Zero(2, 15)), std::invalid_argument);
  CHECK_THROWS_AS(ae::decode(model.decoder, Eigen::MatrixXd::Zero(2, 5)), std::invalid_argument);
}

TEST_CASE("zero image through a zero encoder gives a zero code") {
  ae::AeTrainer trainer(small_config(16));
  nn::Mlp enc = trainer.model().encoder;
  for (auto& layer : enc.mutable_layers()) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
  CHECK(ae::encode(enc, Eigen::MatrixXd::Zero(3, 16)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trained reconstructions agree with the reported error") {
  ae::AeConfig cfg = small_config(32);
  cfg.epochs = 40;
  const Eigen::MatrixXd imgs = random_images(6, 32, 32);
  const auto result = ae::train_ae(imgs, cfg);
  const Eigen::MatrixXd recon = ae::decode(result.model.decoder, ae::encode(result.model.encoder, imgs));
  CHECK(eval::mean_squared_error(recon, imgs) == doctest::Approx(result.final_mse).epsilon(1e-12));
  CHECK(result.final_mse < result.epoch_loss.front());
  CHECK(result.encoder_adam.steps() == 40 * 4);
}

TEST_CASE("encode and decode never modify the networks") {
  static_assert(std::is_invocable_v<decltype(&ae::encode), const nn::Mlp&, const Eigen::MatrixXd&>);
  static_assert(std::is_invocable_v<decltype(&ae::decode), const nn::Mlp&, const Eigen::MatrixXd&>);
  ae::AeTrainer trainer(small_config(16));
  const ae::Autoencoder before = trainer.model();
  const Eigen::MatrixXd imgs = random_images(7, 5, 16);
  ae::decode(before.decoder, ae::encode(before.encoder, imgs));
  ae::reconstruction_mse(before, imgs);
  CHECK(before.encoder == trainer.model().encoder);
  CHECK(before.decoder == trainer.model().decoder);
}

TEST_CASE("clamp_pixels bounds emitted images") {
  Eigen::MatrixXd x(1, 4);
  x << -0.5, 0.25, 1.5, std::nan("");
  const Eigen::MatrixXd c = ae::clamp_pixels(x);
  CHECK(c(0, 0) == 0.0);
  CHECK(c(0, 1) == 0.25);
  CHECK(c(0, 2) == 1.0);
  CHECK(c(0, 3) == 0.0);
}

TEST_CASE("training is deterministic per seed") {
  const ae::AeConfig cfg = small_config(16);
  const Eigen::MatrixXd imgs = random_images(8, 24, 16);
  const auto a = ae::train_ae(imgs, cfg);
  const auto b = ae::train_ae(imgs, cfg);
  CHECK(a.model.encoder == b.model.encoder);
  CHECK(a.model.decoder == b.model.decoder);
  CHECK(a.epoch_loss == b.epoch_loss);
}
