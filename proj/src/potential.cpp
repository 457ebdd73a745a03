#include "aeot/potential.hpp"

#include <cmath>
#include <numeric>

namespace aeot::potential {

std::string noise_name(NoiseKind kind) {
  return kind == NoiseKind::normal ? "normal" : "uniform";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "normal") return NoiseKind::normal;
  if (name == "uniform") return NoiseKind::uniform;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

void TrainConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("TrainConfig: iterations must be >= 0");
  if (batch_size < 2) throw std::invalid_argument("TrainConfig: batch size must be >= 2");
  if (!(lambda >= 0.0)) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
  if (latent_dim < 1) throw std::invalid_argument("TrainConfig: latent dimension must be >= 1");
  if (!(adam.lr > 0.0)) throw std::invalid_argument("TrainConfig: learning rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw std::invalid_argument("TrainConfig: Adam betas must be in [0,1)");
  if (checkpoint_every < 0) throw std::invalid_argument("TrainConfig: checkpoint_every must be >= 0");
  for (Index w : hidden)
    if (w < 1) throw std::invalid_argument("TrainConfig: hidden widths must be positive");
}

LatentBank::LatentBank(Eigen::MatrixXd codes) : codes_(std::move(codes)) {
  if (codes_.rows() < 1 || codes_.cols() < 1) throw std::invalid_argument("LatentBank: empty");
  if (!codes_.allFinite()) throw std::invalid_argument("LatentBank: non-finite code");
}

std::vector<Index> sample_indices(Index population, Rng& rng, Index m) {
  if (m > population) {
    throw std::invalid_argument("sample_batch: batch size " + std::to_string(m) +
                                " exceeds bank size " + std::to_string(population));
  }
  if (m < 0) throw std::invalid_argument("sample_batch: negative batch size");
  std::vector<Index> idx(static_cast<std::size_t>(population));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index k = 0; k < m; ++k) {
    const auto pick = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(population - k)));
    std::swap(idx[k], idx[pick]);
  }
  idx.resize(static_cast<std::size_t>(m));
  return idx;
}

Eigen::MatrixXd sample_batch(const LatentBank& bank, Rng& rng, Index m) {
  const std::vector<Index> idx = sample_indices(bank.size(), rng, m);
  Eigen::MatrixXd out(m, bank.dim());
  for (Index k = 0; k < m; ++k) out.row(k) = bank.codes().row(idx[k]);
  return out;
}

Eigen::MatrixXd sample_noise(Rng& rng, Index m, Index d, NoiseKind kind) {
  if (m < 1 || d < 1) throw std::invalid_argument("sample_noise: m and d must be >= 1");
  Eigen::MatrixXd out(m, d);
  for (Index i = 0; i < m; ++i) {
    for (Index k = 0; k < d; ++k) {
      out(i, k) = kind == NoiseKind::normal ? rng.normal() : rng.uniform(-1.0, 1.0);
    }
  }
  return out;
}

nn::Mlp initial_network(const TrainConfig& cfg, Rng& rng) {
  std::vector<Index> widths{cfg.latent_dim};
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(1);
  nn::Mlp net = nn::Mlp::initialized(widths, cfg.activation, nn::Activation::identity(), rng);
  // Zero output layer: D == 0, so T starts as the identity map.
  net.mutable_layers().back().weight.setZero();
  return net;
}

PotentialTrainer::PotentialTrainer(const LatentBank& bank, TrainConfig cfg)
    : bank_(&bank), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (bank.dim() != cfg_.latent_dim) throw std::invalid_argument("PotentialTrainer: bank dimension mismatch");
  if (bank.size() < cfg_.batch_size) throw std::invalid_argument("PotentialTrainer: bank smaller than batch");
  state_.rng = Rng(cfg_.seed);
  state_.net = initial_network(cfg_, state_.rng);
  state_.adam = nn::Adam(cfg_.adam, state_.net);
}

PotentialTrainer::PotentialTrainer(const LatentBank& bank, TrainConfig cfg, TrainerState resume)
    : bank_(&bank), cfg_(std::move(cfg)), state_(std::move(resume)) {
  cfg_.validate();
  if (bank.dim() != cfg_.latent_dim || state_.net.input_dim() != cfg_.latent_dim)
    throw std::invalid_argument("PotentialTrainer: resume state dimension mismatch");
  if (bank.size() < cfg_.batch_size) throw std::invalid_argument("PotentialTrainer: bank smaller than batch");
  if (!(state_.adam.config() == cfg_.adam))
    throw std::invalid_argument("PotentialTrainer: resume Adam hyperparameters differ from config");
}

IterationStats PotentialTrainer::step() {
  const auto started = std::chrono::steady_clock::now();
  const Index m = cfg_.batch_size;
  const Rng rng_before = state_.rng;

  const Eigen::MatrixXd real = sample_batch(*bank_, state_.rng, m);
  const Eigen::MatrixXd noise = sample_noise(state_.rng, m, cfg_.latent_dim, cfg_.noise);

  const ot::DiscreteMeasure src(noise);
  const ot::DiscreteMeasure tgt(real);
  const ot::CostMatrix cost = ot::cost_matrix(src, tgt);
  const ot::OtSolution lp = ot::solve(cost);
  if (lp_observer_) lp_observer_(state_.iteration + 1, cost, lp);
  const ot::Matching sigma = ot::ordering(src, tgt, lp.dual);

  Eigen::VectorXd match_dist(m);
  for (Index i = 0; i < m; ++i) match_dist(i) = (real.row(sigma.sigma[i]) - noise.row(i)).norm();

  nn::GradBundle grads;
  try {
    grads = nn::loss_and_grads(state_.net, noise, lp.dual.source, match_dist, cfg_.lambda);
  } catch (const std::runtime_error& e) {
    // Network and optimizer are untouched until adam.step, so only the
    // sampling stream needs rewinding.
    TrainerState before{state_.net, state_.adam, rng_before, state_.iteration};
    throw TrainingDiverged(std::string("potential training diverged at iteration ") +
                               std::to_string(state_.iteration + 1) + ": " + e.what(),
                           std::move(before), state_.iteration + 1);
  }
  state_.adam.step(state_.net, grads.grads);
  ++state_.iteration;

  IterationStats stats;
  stats.iteration = state_.iteration;
  stats.mse_term = grads.mse_term;
  stats.reg_term = grads.reg_term;
  stats.total_loss = grads.loss;
  stats.lp_objective = lp.dual.objective;
  stats.wallclock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return stats;
}

nn::Mlp train_potential(const LatentBank& bank, const TrainConfig& cfg,
                        const IterationCallback& on_iteration) {
  PotentialTrainer trainer(bank, cfg);
  while (!trainer.done()) {
    const IterationStats stats = trainer.step();
    if (on_iteration) on_iteration(stats, trainer);
  }
  return trainer.network();
}

}  // namespace aeot::potential
