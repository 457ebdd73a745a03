#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "aeot/mlp.hpp"
#include "aeot/potential.hpp"

namespace aeot::gen {

using Index = Eigen::Index;

// z + grad D(z), row-wise.
Eigen::MatrixXd transport(const nn::Mlp& potential, const Eigen::MatrixXd& z);
Eigen::VectorXd transport_one(const nn::Mlp& potential, const Eigen::VectorXd& z);

struct GenRequest {
  Index count = 64;
  std::uint64_t seed = 0;
  potential::NoiseKind noise = potential::NoiseKind::normal;
};

struct Generated {
  Eigen::MatrixXd noise;   // z_x
  Eigen::MatrixXd codes;   // z_y = T(z_x)
  Eigen::MatrixXd images;  // decoded, clamped to [0, 1]
};

// Noise comes from a fresh Rng(req.seed), so the output is a pure function of
// the request and the two networks.
Generated generate(const nn::Mlp& decoder, const nn::Mlp& potential, const GenRequest& req);

// Frames k = 0..steps-1 decode T(z_a) + t (T(z_b) - T(z_a)), t = k / (steps - 1),
// where z_a, z_b are the single-sample noises for the two seeds.
Generated interpolate(const nn::Mlp& decoder, const nn::Mlp& potential, std::uint64_t seed_a,
                      std::uint64_t seed_b, Index steps,
                      potential::NoiseKind noise = potential::NoiseKind::normal);

}  // namespace aeot::gen
