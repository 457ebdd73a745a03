#include "aeot/generator.hpp"

#include <stdexcept>

#include "aeot/autoencoder.hpp"

namespace aeot::gen {

Eigen::MatrixXd transport(const nn::Mlp& potential, const Eigen::MatrixXd& z) {
  if (z.cols() != potential.input_dim()) throw std::invalid_argument("transport: dimension mismatch");
  return z + nn::input_gradients(potential, z);
}

Eigen::VectorXd transport_one(const nn::Mlp& potential, const Eigen::VectorXd& z) {
  return transport(potential, Eigen::MatrixXd(z.transpose())).row(0).transpose();
}

namespace {

void check_pair(const nn::Mlp& decoder, const nn::Mlp& potential) {
  if (potential.input_dim() != decoder.input_dim())
    throw std::invalid_argument("generate: potential input dimension " + std::to_string(potential.input_dim()) +
                                " differs from decoder latent dimension " + std::to_string(decoder.input_dim()));
}

}  // namespace

Generated generate(const nn::Mlp& decoder, const nn::Mlp& potential, const GenRequest& req) {
  if (req.count < 1) throw std::invalid_argument("generate: count must be >= 1");
  check_pair(decoder, potential);
  Rng rng(req.seed);
  Generated out;
  out.noise = potential::sample_noise(rng, req.count, potential.input_dim(), req.noise);
  out.codes = transport(potential, out.noise);
  out.images = ae::clamp_pixels(ae::decode(decoder, out.codes));
  return out;
}

Generated interpolate(const nn::Mlp& decoder, const nn::Mlp& potential, std::uint64_t seed_a,
                      std::uint64_t seed_b, Index steps, potential::NoiseKind noise) {
  if (steps < 2) throw std::invalid_argument("interpolate: steps must be >= 2");
  check_pair(decoder, potential);
  const Index d = potential.input_dim();
  // Endpoints go through exactly the computation generate() performs for a
  // single sample, so they match it bit for bit.
  Rng ra(seed_a);
  Rng rb(seed_b);
  const Eigen::MatrixXd za = potential::sample_noise(ra, 1, d, noise);
  const Eigen::MatrixXd zb = potential::sample_noise(rb, 1, d, noise);
  const Eigen::MatrixXd ta = transport(potential, za);
  const Eigen::MatrixXd tb = transport(potential, zb);

  Generated out;
  out.noise.resize(steps, d);
  out.codes.resize(steps, d);
  out.images.resize(steps, decoder.output_dim());
  for (Index k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(steps - 1);
    out.noise.row(k) = za + t * (zb - za);
    if (k == 0)
      out.codes.row(k) = ta;
    else if (k == steps - 1)
      out.codes.row(k) = tb;
    else
      out.codes.row(k) = ta + t * (tb - ta);
    out.images.row(k) = ae::clamp_pixels(ae::decode(decoder, out.codes.row(k)));
  }
  return out;
}

}  // namespace aeot::gen
