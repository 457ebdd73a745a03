#include <doctest.h>

#include "aeot/autoencoder.hpp"
#include "aeot/generator.hpp"

using namespace aeot;

namespace {

nn::Mlp affine_potential(const Eigen::RowVectorXd& w, double b) {
  return nn::Mlp({nn::Layer{w, Eigen::VectorXd::Constant(1, b), nn::Activation::identity()}});
}

nn::Mlp small_decoder(int latent) {
  Rng rng(3);
  return nn::Mlp::initialized({latent, 8, 9}, nn::Activation::leaky_relu(0.2), nn::Activation::sigmoid(), rng);
}

nn::Mlp small_potential(int latent) {
  Rng rng(4);
  return nn::Mlp::initialized({latent, 16, 1}, nn::Activation::relu(), nn::Activation::identity(), rng);
}

}  // namespace

TEST_CASE("zero potential transports nothing") {
  const nn::Mlp zero = affine_potential(Eigen::RowVectorXd::Zero(3), 0.0);
  Rng rng(1);
  const Eigen::MatrixXd z = potential::sample_noise(rng, 10, 3);
  CHECK(gen::transport(zero, z) == z);
}

TEST_CASE("affine potential shifts every point by its slope") {
  Eigen::RowVectorXd w(2);
  w << 1.5, -0.25;
  const nn::Mlp pot = affine_potential(w, 7.0);
  Rng rng(2);
  const Eigen::MatrixXd z = potential::sample_noise(rng, 20, 2);
  const Eigen::MatrixXd t = gen::transport(pot, z);
  for (int i = 0; i < 20; ++i) {
    CHECK(t(i, 0) == z(i, 0) + 1.5);
    CHECK(t(i, 1) == z(i, 1) - 0.25);
  }
  const Eigen::VectorXd one = gen::transport_one(pot, Eigen::VectorXd(z.row(0).transpose()));
  CHECK(one(0) == t(0, 0));
  CHECK_THROWS_AS(gen::transport(pot, Eigen::MatrixXd::Zero(1, 3)), std::invalid_argument);
}

TEST_CASE("generate with a zero potential decodes raw noise") {
  const nn::Mlp dec = small_decoder(3);
  const nn::Mlp zero = affine_potential(Eigen::RowVectorXd::Zero(3), 0.0);
  const gen::Generated g = gen::generate(dec, zero, {5, 11});
  CHECK(g.codes == g.noise);
  CHECK(g.images == ae::clamp_pixels(ae::decode(dec, g.noise)));
  CHECK(g.images.rows() == 5);
  CHECK(g.images.minCoeff() >= 0.0);
  CHECK(g.images.maxCoeff() <= 1.0);
}

TEST_CASE("generate is a pure function of the seed") {
  const nn::Mlp dec = small_decoder(3);
  const nn::Mlp pot = small_potential(3);
  const auto a = gen::generate(dec, pot, {8, 42});
  const auto b = gen::generate(dec, pot, {8, 42});
  CHECK(a.images == b.images);
  CHECK(a.codes == b.codes);
  CHECK_FALSE(gen::generate(dec, pot, {8, 43}).images == a.images);
}

TEST_CASE("generate validates its inputs") {
  const nn::Mlp dec = small_decoder(3);
  CHECK_THROWS_AS(gen::generate(dec, small_potential(2), {4, 0}), std::invalid_argument);
  CHECK_THROWS_AS(gen::generate(dec, small_potential(3), {0, 0}), std::invalid_argument);
}

TEST_CASE("interpolation endpoints and midpoint") {
  const nn::Mlp dec = small_decoder(3);
  const nn::Mlp pot = small_potential(3);
  const auto a = gen::generate(dec, pot, {1, 5});
  const auto b = gen::generate(dec, pot, {1, 9});

  const auto two = gen::interpolate(dec, pot, 5, 9, 2);
  REQUIRE(two.images.rows() == 2);
  CHECK(two.codes.row(0) == a.codes.row(0));
  CHECK(two.codes.row(1) == b.codes.row(0));
  CHECK(two.images.row(0) == a.images.row(0));
  CHECK(two.images.row(1) == b.images.row(0));

  const auto five = gen::interpolate(dec, pot, 5, 9, 5);
  const Eigen::RowVectorXd mid = 0.5 * (a.codes.row(0) + b.codes.row(0));
  CHECK((five.codes.row(2) - mid).cwiseAbs().maxCoeff() <= 1e-12);

  const auto same = gen::interpolate(dec, pot, 7, 7, 4);
  for (int k = 1; k < 4; ++k) CHECK(same.images.row(k) == same.images.row(0));

  CHECK_THROWS_AS(gen::interpolate(dec, pot, 1, 2, 1), std::invalid_argument);
}

TEST_CASE("generation leaves the networks untouched") {
  const nn::Mlp dec = small_decoder(3);
  const nn::Mlp pot = small_potential(3);
  const nn::Mlp dec_copy = dec;
  const nn::Mlp pot_copy = pot;
  gen::generate(dec, pot, {16, 1});
  gen::interpolate(dec, pot, 1, 2, 6);
  CHECK(dec == dec_copy);
  CHECK(pot == pot_copy);
}
