// aeot: command-line driver for the AE-OT pipeline.
//
//   aeot toy          eight-Gaussian experiment, no autoencoder
//   aeot train-ae     train the autoencoder on MNIST IDX images
//   aeot train-ot     train the potential on encoded latents
//   aeot generate     sample images through noise -> T -> decoder
//   aeot interpolate  decode a line between two transported latents
//   aeot eval         energy distance / mode coverage between two sets
//
// Settings resolve as flags > --config JSON (section named after the
// subcommand, keys are flag names) > built-in defaults.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aeot/autoencoder.hpp"
#include "aeot/checkpoint.hpp"
#include "aeot/config.hpp"
#include "aeot/datasets.hpp"
#include "aeot/eval.hpp"
#include "aeot/generator.hpp"
#include "aeot/io.hpp"
#include "aeot/potential.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aeot;

namespace {

constexpr int kExitError = 1;
constexpr int kExitDiverged = 3;

// Sub-streams of the user seed.
constexpr std::uint64_t kToyDataStream = 1;
constexpr std::uint64_t kToyEvalStream = 2;
constexpr std::uint64_t kBaselineStream = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_data_dir() {
  if (const char* env = std::getenv("AEOT_DATA_DIR"); env && *env) return env;
  return "data";
}

std::string default_images() { return (default_data_dir() / "mnist-images-idx3-ubyte").string(); }

std::string dump_metrics(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Training log

class TrainingLog {
 public:
  TrainingLog() : text_("iter,mse_term,reg_term,total_loss,lp_objective,wallclock_ms\n") {}
  void add(const potential::IterationStats& s) {
    text_ += std::to_string(s.iteration) + ',' + io::format_double(s.mse_term) + ',' +
             io::format_double(s.reg_term) + ',' + io::format_double(s.total_loss) + ',' +
             io::format_double(s.lp_objective) + ',' + io::format_double(s.wallclock_ms) + '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// ---------------------------------------------------------------------------
// Shared potential-training driver (toy and train-ot).

struct PotentialRun {
  potential::TrainConfig cfg;
  fs::path out;
  std::string resume;
  std::string dump_lp;
  std::int64_t dump_lp_iter = 1;
  bool quiet = false;
};

ckpt::Checkpoint to_checkpoint(const potential::PotentialTrainer& t, json extra_config) {
  json cfg = config::to_json(t.config());
  for (auto& [k, v] : extra_config.items()) cfg[k] = v;
  return {ckpt::Role::potential, t.state().net, t.state().adam, t.state().rng, t.iteration(), cfg, json::object()};
}

void check_resume_config(const json& saved, const json& current) {
  for (auto& [key, value] : current.items()) {
    if (key == "iterations" || key == "checkpoint_every") continue;
    if (!saved.contains(key) || saved.at(key) != value)
      throw UsageError("--resume: checkpoint was trained with " + key + "=" +
                       (saved.contains(key) ? saved.at(key).dump() : std::string("<missing>")) +
                       ", current run has " + value.dump());
  }
}

potential::PotentialTrainer make_trainer(const potential::LatentBank& bank, const PotentialRun& run,
                                         const json& extra_config) {
  if (run.resume.empty()) return potential::PotentialTrainer(bank, run.cfg);
  ckpt::Checkpoint c = ckpt::load(run.resume);
  if (c.role != ckpt::Role::potential) throw UsageError("--resume: not a potential checkpoint");
  if (!c.adam || !c.rng) throw UsageError("--resume: checkpoint carries no optimizer/RNG state");
  json current = config::to_json(run.cfg);
  for (auto& [k, v] : extra_config.items()) current[k] = v;
  check_resume_config(c.config, current);
  if (c.iteration > run.cfg.iterations)
    throw UsageError("--resume: checkpoint is already at iteration " + std::to_string(c.iteration));
  return potential::PotentialTrainer(bank, run.cfg, {std::move(c.net), std::move(*c.adam), *c.rng, c.iteration});
}

// Runs to completion, writing the log and periodic checkpoints. On
// divergence writes diverged.json (the last good state) and rethrows.
potential::PotentialTrainer run_potential(const potential::LatentBank& bank, const PotentialRun& run,
                                          const json& extra_config) {
  potential::PotentialTrainer trainer = make_trainer(bank, run, extra_config);
  if (!run.dump_lp.empty()) {
    trainer.set_lp_observer([&](std::int64_t it, const ot::CostMatrix& cost, const ot::OtSolution& sol) {
      if (it != run.dump_lp_iter) return;
      std::ostringstream csv;
      ot::write_instance_csv(csv, cost, sol.plan);
      io::write_file_atomic(run.dump_lp, csv.str());
    });
  }
  TrainingLog log;
  const fs::path ckpt_path = run.out / "potential.json";
  const std::int64_t every = run.cfg.checkpoint_every;
  while (!trainer.done()) {
    potential::IterationStats stats;
    try {
      stats = trainer.step();
    } catch (const potential::TrainingDiverged& e) {
      io::write_file_atomic(run.out / "training_log.csv", log.text());
      ckpt::Checkpoint dump{ckpt::Role::potential, e.state().net, e.state().adam, e.state().rng,
                            e.state().iteration, config::to_json(run.cfg), json::object()};
      dump.notes = {{"error", e.what()}, {"failed_iteration", e.iteration()}};
      ckpt::save(run.out / "diverged.json", dump);
      throw;
    }
    log.add(stats);
    if (!run.quiet && (stats.iteration % 500 == 0 || trainer.done())) {
      std::cerr << "iter " << stats.iteration << " mse " << stats.mse_term << " reg " << stats.reg_term
                << " lp " << stats.lp_objective << "\n";
    }
    if (every > 0 && stats.iteration % every == 0 && !trainer.done())
      ckpt::save(ckpt_path, to_checkpoint(trainer, extra_config));
  }
  ckpt::save(ckpt_path, to_checkpoint(trainer, extra_config));
  io::write_file_atomic(run.out / "training_log.csv", log.text());
  return trainer;
}

void add_potential_flags(CLI::App* cmd, PotentialRun& run) {
  cmd->add_option("--iters", run.cfg.iterations, "Training iterations K")->capture_default_str();
  cmd->add_option("--seed", run.cfg.seed, "Random seed")->capture_default_str();
  cmd->add_option("--lambda", run.cfg.lambda, "Gradient-norm regularizer weight")->capture_default_str();
  cmd->add_option("--lr", run.cfg.adam.lr, "Adam step size")->capture_default_str();
  cmd->add_option("--beta1", run.cfg.adam.beta1)->capture_default_str();
  cmd->add_option("--beta2", run.cfg.adam.beta2)->capture_default_str();
  cmd->add_option("--batch", run.cfg.batch_size, "Batch size m")->capture_default_str();
  cmd->add_option("--hidden", run.cfg.hidden, "Hidden layer widths")->capture_default_str();
  cmd->add_option("--checkpoint-every", run.cfg.checkpoint_every)->capture_default_str();
  cmd->add_option("--out", run.out, "Output directory")->required();
  cmd->add_option("--resume", run.resume, "Continue from a potential checkpoint");
  cmd->add_option("--dump-lp", run.dump_lp, "Write one batch LP instance as CSV");
  cmd->add_option("--dump-lp-iter", run.dump_lp_iter, "Iteration whose LP --dump-lp writes")->capture_default_str();
  cmd->add_flag("--quiet", run.quiet, "No progress output");
}

// Per-iteration losses are in training_log.csv; metrics keep only what is
// reproducible byte for byte.
json losses_json(const potential::PotentialTrainer& t, const potential::LatentBank& bank) {
  return {{"iterations", t.iteration()}, {"bank_size", bank.size()}, {"latent_dim", bank.dim()}};
}

// ---------------------------------------------------------------------------
// toy

struct ToyArgs {
  PotentialRun run;
  int eval_points = 256;
  int baseline_seeds = 20;
};

void cmd_toy(ToyArgs& a) {
  a.run.cfg.latent_dim = 2;
  a.run.cfg.validate();
  const data::ToySpec spec;
  const Eigen::MatrixXd target = data::sample_toy(spec, derive_seed(a.run.cfg.seed, kToyDataStream)).points();
  const potential::LatentBank bank(target);
  fs::create_directories(a.run.out);

  const potential::PotentialTrainer trainer = run_potential(bank, a.run, json::object());
  const nn::Mlp& net = trainer.network();

  Rng eval_rng(derive_seed(a.run.cfg.seed, kToyEvalStream));
  const Eigen::MatrixXd source = potential::sample_noise(eval_rng, a.eval_points, 2, a.run.cfg.noise);
  const Eigen::MatrixXd transported = gen::transport(net, source);
  const eval::ModeReport cov = eval::mode_coverage(transported, spec);

  double baseline = 0.0;
  for (int k = 0; k < a.baseline_seeds; ++k) {
    const std::uint64_t s = derive_seed(a.run.cfg.seed, kBaselineStream + 2 * static_cast<std::uint64_t>(k));
    baseline += eval::energy_distance(data::sample_toy(spec, s).points(), data::sample_toy(spec, s + 1).points());
  }
  baseline /= std::max(1, a.baseline_seeds);

  eval::emit_toy_figure(a.run.out, source, target, transported, eval::potential_grid(net));

  const json metrics = {
      {"command", "toy"},
      {"seed", a.run.cfg.seed},
      {"training", losses_json(trainer, bank)},
      {"config", config::to_json(a.run.cfg)},
      {"energy_distance",
       {{"transported_vs_target", eval::energy_distance(transported, target)},
        {"transported_vs_source", eval::energy_distance(transported, source)},
        {"source_vs_target", eval::energy_distance(source, target)},
        {"real_vs_real_baseline", baseline},
        {"baseline_seeds", a.baseline_seeds}}},
      {"mode_coverage",
       {{"radius", cov.radius},
        {"counts", cov.counts},
        {"outside", cov.outside},
        {"total", cov.total},
        {"covered_modes", cov.covered_modes()},
        {"min_mode_fraction", cov.min_mode_fraction()}}}};
  io::write_file_atomic(a.run.out / "metrics.json", dump_metrics(metrics));
}

// ---------------------------------------------------------------------------
// train-ae

struct TrainAeArgs {
  ae::AeConfig cfg;
  std::string data = default_images();
  std::size_t limit = 1000;
  fs::path out;
  bool quiet = false;
};

Eigen::MatrixXd load_images(const std::string& path, std::size_t limit) {
  const data::IdxImages idx = data::read_idx_images(path, limit);
  return data::normalize(idx);
}

void cmd_train_ae(TrainAeArgs& a) {
  a.cfg.validate();
  const Eigen::MatrixXd images = load_images(a.data, a.limit);
  if (images.cols() != a.cfg.input_dim)
    throw UsageError("image size " + std::to_string(images.cols()) + " does not match input_dim " +
                     std::to_string(a.cfg.input_dim));
  fs::create_directories(a.out);
  std::string log = "epoch,loss\n";
  const ae::AeResult r = ae::train_ae(images, a.cfg, [&](int epoch, double loss) {
    log += std::to_string(epoch) + ',' + io::format_double(loss) + '\n';
    if (!a.quiet) std::cerr << "epoch " << epoch << " loss " << loss << "\n";
  });

  json echo = config::to_json(a.cfg);
  echo["images"] = images.rows();
  ckpt::save(a.out / "encoder.json",
             {ckpt::Role::encoder, r.model.encoder, r.encoder_adam, std::nullopt, a.cfg.epochs, echo, json::object()});
  ckpt::save(a.out / "decoder.json",
             {ckpt::Role::decoder, r.model.decoder, r.decoder_adam, std::nullopt, a.cfg.epochs, echo, json::object()});
  io::write_file_atomic(a.out / "ae_log.csv", log);

  const Eigen::MatrixXd codes = ae::encode(r.model.encoder, images);
  const Eigen::RowVectorXd mean = codes.colwise().mean();
  const Eigen::RowVectorXd sd = ((codes.rowwise() - mean).array().square().colwise().sum() /
                                 static_cast<double>(std::max<Eigen::Index>(1, codes.rows() - 1)))
                                    .sqrt();
  const json metrics = {{"command", "train-ae"},
                        {"images", images.rows()},
                        {"config", echo},
                        {"final_mse", r.final_mse},
                        {"mean_image_baseline_mse", eval::mean_image_baseline_mse(images)},
                        {"epoch_loss", r.epoch_loss},
                        {"latent_mean", std::vector<double>(mean.data(), mean.data() + mean.size())},
                        {"latent_std", std::vector<double>(sd.data(), sd.data() + sd.size())}};
  io::write_file_atomic(a.out / "metrics.json", dump_metrics(metrics));
}

// ---------------------------------------------------------------------------
// train-ot

struct TrainOtArgs {
  PotentialRun run;
  std::string ae_checkpoint;
  std::string data = default_images();
  std::size_t limit = 1000;
};

void cmd_train_ot(TrainOtArgs& a) {
  const ckpt::Checkpoint enc = ckpt::load(a.ae_checkpoint);
  if (enc.role != ckpt::Role::encoder) throw UsageError("--ae-checkpoint: expected an encoder checkpoint");
  const Eigen::MatrixXd images = load_images(a.data, a.limit);
  const potential::LatentBank bank(ae::encode(enc.net, images));
  a.run.cfg.latent_dim = bank.dim();
  a.run.cfg.validate();
  fs::create_directories(a.run.out);
  const json extra = {{"images", images.rows()}};
  const potential::PotentialTrainer trainer = run_potential(bank, a.run, extra);
  const json metrics = {{"command", "train-ot"},
                        {"seed", a.run.cfg.seed},
                        {"config", config::to_json(a.run.cfg)},
                        {"training", losses_json(trainer, bank)}};
  io::write_file_atomic(a.run.out / "metrics.json", dump_metrics(metrics));
}

// ---------------------------------------------------------------------------
// generate / interpolate

struct Pipeline {
  nn::Mlp decoder;
  nn::Mlp potential;
};

Pipeline load_pipeline(const std::vector<std::string>& paths) {
  std::optional<nn::Mlp> dec;
  std::optional<nn::Mlp> pot;
  for (const auto& p : paths) {
    ckpt::Checkpoint c = ckpt::load(p);
    if (c.role == ckpt::Role::decoder) dec = std::move(c.net);
    else if (c.role == ckpt::Role::potential) pot = std::move(c.net);
  }
  if (!dec || !pot) throw UsageError("--checkpoints needs a decoder and a potential checkpoint");
  return {std::move(*dec), std::move(*pot)};
}

int image_side(const nn::Mlp& decoder) {
  const auto n = decoder.output_dim();
  int side = 1;
  while (static_cast<Eigen::Index>(side + 1) * (side + 1) <= n) ++side;
  if (static_cast<Eigen::Index>(side) * side != n) throw UsageError("decoder output is not a square image");
  return side;
}

std::string frame_name(const char* prefix, Eigen::Index k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03ld.pgm", prefix, static_cast<long>(k));
  return buf;
}

void write_images(const fs::path& dir, const char* prefix, const Eigen::MatrixXd& images, int side,
                  int grid_rows, int grid_cols) {
  for (Eigen::Index k = 0; k < images.rows(); ++k)
    io::write_file_atomic(dir / frame_name(prefix, k), io::encode_pgm(images.row(k).transpose(), side, side));
  io::write_file_atomic(dir / "montage.pgm", io::encode_pgm(io::montage(images, side, side, grid_rows, grid_cols),
                                                            side * grid_rows, side * grid_cols));
}

void write_latents(const fs::path& path, const gen::Generated& g) {
  const Eigen::Index d = g.noise.cols();
  Eigen::MatrixXd both(g.noise.rows(), 2 * d);
  both << g.noise, g.codes;
  std::vector<std::string> header;
  for (Eigen::Index k = 0; k < d; ++k) header.push_back("zx" + std::to_string(k));
  for (Eigen::Index k = 0; k < d; ++k) header.push_back("zy" + std::to_string(k));
  io::write_file_atomic(path, io::matrix_csv(both, header));
}

struct GenerateArgs {
  std::vector<std::string> checkpoints;
  Eigen::Index n = 64;
  std::uint64_t seed = 0;
  fs::path out;
  bool latents = false;
};

void cmd_generate(GenerateArgs& a) {
  const Pipeline p = load_pipeline(a.checkpoints);
  const int side = image_side(p.decoder);
  const gen::Generated g = gen::generate(p.decoder, p.potential, {a.n, a.seed});
  fs::create_directories(a.out);
  const int cols = 8;
  const int rows = static_cast<int>((a.n + cols - 1) / cols);
  write_images(a.out, "img", g.images, side, rows, cols);
  if (a.latents) write_latents(a.out / "latents.csv", g);
  const json metrics = {{"command", "generate"},
                        {"n", a.n},
                        {"seed", a.seed},
                        {"mean_pixel", g.images.mean()},
                        {"nan_pixels", (g.images.array() != g.images.array()).count()},
                        {"mean_transport_norm", (g.codes - g.noise).rowwise().norm().mean()}};
  io::write_file_atomic(a.out / "metrics.json", dump_metrics(metrics));
}

struct InterpolateArgs {
  std::vector<std::string> checkpoints;
  std::vector<std::uint64_t> seeds{0, 1};
  Eigen::Index steps = 8;
  fs::path out;
  bool latents = false;
};

void cmd_interpolate(InterpolateArgs& a) {
  if (a.seeds.size() != 2) throw UsageError("--seeds takes exactly two values");
  const Pipeline p = load_pipeline(a.checkpoints);
  const int side = image_side(p.decoder);
  const gen::Generated g = gen::interpolate(p.decoder, p.potential, a.seeds[0], a.seeds[1], a.steps);
  fs::create_directories(a.out);
  write_images(a.out, "frame", g.images, side, 1, static_cast<int>(a.steps));
  if (a.latents) write_latents(a.out / "latents.csv", g);
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string real;
  std::string generated;
  std::string out;
  double radius = 3.0;
};

// IDX image files by magic number, anything else as CSV with a header row.
Eigen::MatrixXd load_point_set(const std::string& path) {
  const std::vector<std::uint8_t> bytes = data::read_file(path);
  if (bytes.size() >= 4 && bytes[0] == 0 && bytes[1] == 0 && bytes[2] == 0x08 && bytes[3] == 0x03)
    return data::normalize(data::parse_idx_images(bytes));
  Eigen::MatrixXd m = io::parse_matrix_csv(std::string(bytes.begin(), bytes.end()));
  if (m.rows() == 0) throw UsageError(path + ": no rows");
  return m;
}

void cmd_eval(EvalArgs& a) {
  const Eigen::MatrixXd real = load_point_set(a.real);
  const Eigen::MatrixXd gen_pts = load_point_set(a.generated);
  if (real.cols() != gen_pts.cols()) throw UsageError("--real and --generated have different dimensions");
  json metrics = {{"command", "eval"},
                  {"real_points", real.rows()},
                  {"generated_points", gen_pts.rows()},
                  {"dim", real.cols()},
                  {"energy_distance", eval::energy_distance(gen_pts, real)},
                  {"mean_real", real.mean()},
                  {"mean_generated", gen_pts.mean()}};
  if (real.cols() == 2) {
    const auto cov = eval::mode_coverage(gen_pts, data::ToySpec{}, a.radius);
    metrics["mode_coverage"] = {{"radius", cov.radius},       {"counts", cov.counts},
                                {"outside", cov.outside},     {"total", cov.total},
                                {"covered_modes", cov.covered_modes()},
                                {"min_mode_fraction", cov.min_mode_fraction()}};
  }
  if (a.out.empty())
    std::cout << dump_metrics(metrics);
  else
    io::write_file_atomic(a.out, dump_metrics(metrics));
}

// ---------------------------------------------------------------------------
// --config handling: the subcommand's section becomes leading arguments, so
// anything on the real command line (parsed later, last value wins) overrides
// it.

std::vector<std::string> config_tokens(const json& section) {
  std::vector<std::string> out;
  for (const auto& [key, value] : section.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else {
      out.push_back(flag);
      out.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return out;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) config_path = args[k + 1];
    else if (args[k].rfind("--config=", 0) == 0) config_path = args[k].substr(9);
  }
  if (config_path.empty() || args.size() < 2) return args;
  json doc;
  try {
    doc = json::parse(io::read_text(config_path));
  } catch (const std::exception& e) {
    throw UsageError("--config " + config_path + ": " + e.what());
  }
  const std::string& sub = args[1];
  if (!doc.is_object()) throw UsageError("--config: top level must be an object keyed by subcommand");
  if (!doc.contains(sub)) return args;
  std::vector<std::string> out{args[0], sub};
  for (auto& t : config_tokens(doc.at(sub))) out.push_back(std::move(t));
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AE-OT: autoencoder plus optimal-transport generative pipeline"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config_path;
  const auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file with per-subcommand defaults");
  };

  ToyArgs toy;
  toy.run.cfg.adam.lr = 1e-2;
  toy.run.cfg.lambda = 0.0;
  auto* c_toy = app.add_subcommand("toy", "Eight-Gaussian experiment in 2-D (no autoencoder)");
  add_potential_flags(c_toy, toy.run);
  c_toy->add_option("--eval-points", toy.eval_points, "Noise samples transported for evaluation")->capture_default_str();
  c_toy->add_option("--baseline-seeds", toy.baseline_seeds)->capture_default_str();
  add_config(c_toy);

  TrainAeArgs ae_args;
  auto* c_ae = app.add_subcommand("train-ae", "Train the autoencoder on MNIST images");
  c_ae->add_option("--data", ae_args.data, "IDX image file (default $AEOT_DATA_DIR/mnist-images-idx3-ubyte)")
      ->capture_default_str();
  c_ae->add_option("--limit", ae_args.limit, "Use the first N images")->capture_default_str();
  c_ae->add_option("--epochs", ae_args.cfg.epochs)->capture_default_str();
  c_ae->add_option("--latent-dim", ae_args.cfg.latent_dim)->capture_default_str();
  c_ae->add_option("--hidden", ae_args.cfg.hidden, "Encoder hidden widths; the decoder mirrors them")
      ->capture_default_str();
  c_ae->add_option("--lr", ae_args.cfg.adam.lr)->capture_default_str();
  c_ae->add_option("--batch", ae_args.cfg.batch_size)->capture_default_str();
  c_ae->add_option("--seed", ae_args.cfg.seed)->capture_default_str();
  c_ae->add_option("--out", ae_args.out, "Output directory")->required();
  c_ae->add_flag("--quiet", ae_args.quiet);
  add_config(c_ae);

  TrainOtArgs ot_args;
  ot_args.run.cfg.iterations = 20000;
  ot_args.run.cfg.lambda = 0.1;
  ot_args.run.cfg.adam.lr = 1e-4;
  ot_args.run.cfg.hidden = {128, 128, 128, 128, 128};
  ot_args.run.cfg.activation = nn::Activation::leaky_relu(0.2);
  auto* c_ot = app.add_subcommand("train-ot", "Train the OT potential on encoded latents");
  add_potential_flags(c_ot, ot_args.run);
  c_ot->add_option("--ae-checkpoint", ot_args.ae_checkpoint, "Encoder checkpoint from train-ae")->required();
  c_ot->add_option("--data", ot_args.data)->capture_default_str();
  c_ot->add_option("--limit", ot_args.limit)->capture_default_str();
  add_config(c_ot);

  GenerateArgs gen_args;
  auto* c_gen = app.add_subcommand("generate", "Generate images: noise -> transport -> decoder");
  c_gen->add_option("--checkpoints", gen_args.checkpoints, "Decoder and potential checkpoints")
      ->required()
      ->expected(2, 2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  c_gen->add_option("--n", gen_args.n)->capture_default_str();
  c_gen->add_option("--seed", gen_args.seed)->capture_default_str();
  c_gen->add_option("--out", gen_args.out)->required();
  c_gen->add_flag("--latents", gen_args.latents, "Also write latents.csv (noise and transported codes)");
  add_config(c_gen);

  InterpolateArgs int_args;
  auto* c_int = app.add_subcommand("interpolate", "Decode a line between two transported latents");
  c_int->add_option("--checkpoints", int_args.checkpoints)
      ->required()
      ->expected(2, 2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  c_int->add_option("--seeds", int_args.seeds)
      ->expected(2, 2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
      ->capture_default_str();
  c_int->add_option("--steps", int_args.steps)->capture_default_str();
  c_int->add_option("--out", int_args.out)->required();
  c_int->add_flag("--latents", int_args.latents);
  add_config(c_int);

  EvalArgs eval_args;
  auto* c_eval = app.add_subcommand("eval", "Compare a generated set with a real set");
  c_eval->add_option("--real", eval_args.real, "CSV points or IDX images")->required();
  c_eval->add_option("--generated", eval_args.generated, "CSV points or IDX images")->required();
  c_eval->add_option("--out", eval_args.out, "Metrics JSON path (stdout if omitted)");
  c_eval->add_option("--radius", eval_args.radius, "Mode coverage radius for 2-D sets")->capture_default_str();
  add_config(c_eval);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(args);
    std::vector<const char*> cargs;
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "aeot: error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (*c_toy) cmd_toy(toy);
    else if (*c_ae) cmd_train_ae(ae_args);
    else if (*c_ot) cmd_train_ot(ot_args);
    else if (*c_gen) cmd_generate(gen_args);
    else if (*c_int) cmd_interpolate(int_args);
    else if (*c_eval) cmd_eval(eval_args);
  } catch (const potential::TrainingDiverged& e) {
    std::cerr << "aeot: error: " << e.what() << " (last good state written to diverged.json)\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "aeot: error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
