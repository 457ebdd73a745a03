#pragma once

// Training loop for the potential network D: each iteration draws a batch of
// real latent codes and a batch of noise, solves the batch OT dual exactly,
// and takes one Adam step on the regression of D onto the source-side
// potentials (plus the optional gradient-norm regularizer).

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aeot/mlp.hpp"
#include "aeot/ot.hpp"
#include "aeot/rng.hpp"

namespace aeot::potential {

using Index = Eigen::Index;

enum class NoiseKind { normal, uniform };

std::string noise_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

struct TrainConfig {
  std::int64_t iterations = 10000;
  Index batch_size = 64;
  double lambda = 0.0;
  nn::AdamConfig adam{1e-2, 0.5, 0.999, 1e-8};
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 1000;
  Index latent_dim = 2;
  std::vector<Index> hidden{512, 512, 512};
  nn::Activation activation = nn::Activation::relu();
  NoiseKind noise = NoiseKind::normal;

  // Throws std::invalid_argument.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

class LatentBank {
 public:
  explicit LatentBank(Eigen::MatrixXd codes);

  Index size() const { return codes_.rows(); }
  Index dim() const { return codes_.cols(); }
  const Eigen::MatrixXd& codes() const { return codes_; }

 private:
  Eigen::MatrixXd codes_;
};

// m distinct rows of the bank, uniformly at random (partial Fisher-Yates).
Eigen::MatrixXd sample_batch(const LatentBank& bank, Rng& rng, Index m);
std::vector<Index> sample_indices(Index population, Rng& rng, Index m);

// normal: i.i.d. N(0, 1) via Rng::normal (Box-Muller).
// uniform: i.i.d. U[-1, 1).
Eigen::MatrixXd sample_noise(Rng& rng, Index m, Index d, NoiseKind kind = NoiseKind::normal);

struct IterationStats {
  std::int64_t iteration = 0;  // 1-based index of the completed iteration
  double mse_term = 0.0;
  double reg_term = 0.0;
  double total_loss = 0.0;
  double lp_objective = 0.0;
  double wallclock_ms = 0.0;
};

// Everything needed to continue a run bit-identically.
struct TrainerState {
  nn::Mlp net;
  nn::Adam adam;
  Rng rng;
  std::int64_t iteration = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, TrainerState last_good, std::int64_t iteration)
      : std::runtime_error(what), state_(std::move(last_good)), iteration_(iteration) {}
  const TrainerState& state() const { return state_; }
  std::int64_t iteration() const { return iteration_; }

 private:
  TrainerState state_;
  std::int64_t iteration_;
};

// Network widths {d, hidden..., 1} with the configured activation.
nn::Mlp initial_network(const TrainConfig& cfg, Rng& rng);

// Sees each batch LP before the update: (1-based iteration, cost, solution).
using LpObserver = std::function<void(std::int64_t, const ot::CostMatrix&, const ot::OtSolution&)>;

class PotentialTrainer {
 public:
  // Fresh run: the network is initialized from Rng(cfg.seed), and the same
  // stream then drives batch and noise sampling.
  PotentialTrainer(const LatentBank& bank, TrainConfig cfg);
  PotentialTrainer(const LatentBank& bank, TrainConfig cfg, TrainerState resume);

  // One iteration. Throws TrainingDiverged (holding the pre-step state) if
  // the loss is not finite.
  IterationStats step();

  void set_lp_observer(LpObserver observer) { lp_observer_ = std::move(observer); }

  bool done() const { return state_.iteration >= cfg_.iterations; }
  const TrainConfig& config() const { return cfg_; }
  const TrainerState& state() const { return state_; }
  const nn::Mlp& network() const { return state_.net; }
  std::int64_t iteration() const { return state_.iteration; }

 private:
  const LatentBank* bank_;
  TrainConfig cfg_;
  TrainerState state_;
  LpObserver lp_observer_;
};

using IterationCallback = std::function<void(const IterationStats&, const PotentialTrainer&)>;

// Runs until cfg.iterations. iterations == 0 returns the initial network.
nn::Mlp train_potential(const LatentBank& bank, const TrainConfig& cfg,
                        const IterationCallback& on_iteration = {});

}  // namespace aeot::potential
