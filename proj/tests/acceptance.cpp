// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
//
//   acceptance <aeot-cli> <work-dir> <mnist-images-idx3>
//
// Criteria 1-3 run in-process; 4-8 drive the command-line tool the way a
// user would and read back its metrics.json / checkpoint files.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aeot/datasets.hpp"
#include "aeot/io.hpp"
#include "aeot/mlp.hpp"
#include "aeot/ot.hpp"
#include "mlp_oracle.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aeot;

namespace {

int failures = 0;
std::map<int, std::string> results;

// Echoed to stderr as it happens, printed in order at the end.
void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::ostringstream line;
  line << (pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << "  " << detail;
  std::cerr << line.str() << std::endl;
  results[id] = line.str();
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

struct Cli {
  std::string exe;
  fs::path work;

  // Runs `aeot <args>`, output to <work>/<log>. Returns the exit status.
  int run(const std::string& args, const std::string& log) const {
    const std::string cmd = "\"" + exe + "\" " + args + " > \"" + (work / log).string() + "\" 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system(cmd.c_str());
    std::cerr << "  [" << fmt(seconds_since(t0)) << " s] aeot " << args << " -> " << rc << "\n";
    return rc;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

// ---------------------------------------------------------------------------

struct OtInstance {
  Eigen::MatrixXd src, tgt;
  oracle::BruteAssignment brute;
};

// 200 instances, m cycling 2..8 and d over {1, 2, 10}, redrawn until the
// optimal assignment beats the runner-up by a clear margin.
std::vector<OtInstance> ot_instances() {
  std::mt19937_64 gen(20190601);
  const int dims[] = {1, 2, 10};
  std::vector<OtInstance> out;
  for (int k = 0; k < 200; ++k) {
    const int m = 2 + k % 7;
    const int d = dims[(k / 7) % 3];
    while (true) {
      OtInstance in{oracle::random_points(gen, m, d), oracle::random_points(gen, m, d), {}};
      in.brute = oracle::brute_force_assignment(oracle::half_sq_dist(in.src, in.tgt));
      if (in.brute.runner_up - in.brute.best > 1e-6) {
        out.push_back(std::move(in));
        break;
      }
    }
  }
  return out;
}

void criteria_1_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<OtInstance> instances = ot_instances();
  double worst_gap = 0.0;
  int order_ok = 0;
  for (const auto& in : instances) {
    const ot::DiscreteMeasure src(in.src), tgt(in.tgt);
    const ot::CostMatrix c = ot::cost_matrix(src, tgt);
    const ot::TransportPlan primal = ot::solve_primal(c);
    const ot::DualPotentials dual = ot::solve_dual(c);
    const double scale = 1.0 + std::abs(in.brute.best);
    worst_gap = std::max({worst_gap, std::abs(primal.cost - in.brute.best) / scale,
                          std::abs(dual.objective - in.brute.best) / scale});
    if (ot::max_dual_violation(dual, c) > 1e-9) worst_gap = std::max(worst_gap, 1.0);

    const ot::Matching sigma = ot::ordering(src, tgt, dual);
    bool same = sigma.size() == static_cast<ot::Index>(in.brute.perm.size());
    for (std::size_t i = 0; same && i < in.brute.perm.size(); ++i) same = sigma.sigma[i] == in.brute.perm[i];
    order_ok += same;
  }
  const double secs = seconds_since(t0);
  report(1, "OT oracle equivalence", worst_gap <= 1e-9 && secs < 10.0,
         "instances=200 worst_rel_gap=" + fmt(worst_gap) + " (tol 1e-9) runtime=" + fmt(secs) + "s (limit 10)");
  report(2, "ordering correctness", order_ok == 200, "exact=" + std::to_string(order_ok) + "/200");
}

// ---------------------------------------------------------------------------

nn::Mlp random_net(std::mt19937_64& gen, const std::vector<nn::Index>& widths, nn::Activation hidden) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<nn::Layer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const double scale = 1.5 / std::sqrt(static_cast<double>(widths[l]));
    nn::Layer layer{Eigen::MatrixXd(widths[l + 1], widths[l]), Eigen::VectorXd(widths[l + 1]),
                    l + 2 == widths.size() ? nn::Activation::identity() : hidden};
    for (nn::Index r = 0; r < layer.weight.rows(); ++r) {
      layer.bias(r) = 0.5 * u(gen);
      for (nn::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = scale * u(gen);
    }
    layers.push_back(std::move(layer));
  }
  return nn::Mlp(std::move(layers));
}

Eigen::MatrixXd normal_matrix(std::mt19937_64& gen, nn::Index rows, nn::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd z(rows, cols);
  for (nn::Index i = 0; i < rows; ++i)
    for (nn::Index k = 0; k < cols; ++k) z(i, k) = n(gen);
  return z;
}

double worst_gradient_error(nn::Mlp net, const Eigen::MatrixXd& z, const Eigen::VectorXd& h,
                            const Eigen::VectorXd& t, double lambda) {
  const nn::GradBundle g = nn::loss_and_grads(net, z, h, t, lambda);
  const double step = 1e-5;
  double worst = 0.0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    nn::Layer& layer = net.mutable_layers()[l];
    for (nn::Index r = 0; r < layer.weight.rows(); ++r) {
      for (nn::Index c = 0; c <= layer.weight.cols(); ++c) {
        double& p = c == layer.weight.cols() ? layer.bias(r) : layer.weight(r, c);
        const double analytic = c == layer.weight.cols() ? g.grads.bias[l](r) : g.grads.weight[l](r, c);
        const double saved = p;
        p = saved + step;
        const double up = oracle::regularized_loss(net, z, h, t, lambda);
        p = saved - step;
        const double down = oracle::regularized_loss(net, z, h, t, lambda);
        p = saved;
        worst = std::max(worst, oracle::relative_error(analytic, (up - down) / (2 * step)));
      }
    }
  }
  return worst;
}

void criterion_3() {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> width(4, 32);
  std::uniform_int_distribution<int> dim(1, 10);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int hidden_layers = 2 + k % 2;
    std::vector<nn::Index> widths{dim(gen)};
    for (int l = 0; l < hidden_layers; ++l) widths.push_back(width(gen));
    widths.push_back(1);
    const nn::Activation act = k % 4 < 2 ? nn::Activation::leaky_relu(0.2) : nn::Activation::relu();
    const nn::Mlp net = random_net(gen, widths, act);
    const nn::Index m = 4;
    Eigen::MatrixXd z;
    do {
      z = normal_matrix(gen, m, net.input_dim());
    } while (oracle::min_abs_preactivation(net, z) <= 1e-3);
    const Eigen::VectorXd h = normal_matrix(gen, m, 1).col(0);
    const Eigen::VectorXd t = normal_matrix(gen, m, 1).col(0).cwiseAbs();
    worst = std::max(worst, worst_gradient_error(net, z, h, t, k % 2 ? 0.1 : 0.0));
  }
  const double secs = seconds_since(t0);
  report(3, "gradient suite", worst <= 1e-4 && secs < 30.0,
         "nets=50 worst_rel_err=" + fmt(worst) + " (tol 1e-4) runtime=" + fmt(secs) + "s (limit 30)");
}

// ---------------------------------------------------------------------------

void toy_criteria(const Cli& cli) {
  const auto out = [&](const char* name) { return " --out \"" + (cli.work / name).string() + "\""; };
  const std::string common = "toy --seed 0 --quiet";
  const int a = cli.run(common + " --iters 10000" + out("toy_a"), "toy_a.log");
  const int b = cli.run(common + " --iters 10000" + out("toy_b"), "toy_b.log");
  const int c1 = cli.run(common + " --iters 5000" + out("toy_c"), "toy_c1.log");
  const std::string resume = " --resume \"" + (cli.work / "toy_c/potential.json").string() + "\"";
  const int c2 = cli.run(common + " --iters 10000" + out("toy_c") + resume, "toy_c2.log");
  const int z = cli.run(common + " --iters 5" + out("toy_5"), "toy_5.log");

  if (a != 0) {
    report(4, "toy experiment", false, "toy run exited with status " + std::to_string(a));
  } else {
    const json m = load_json(cli.work / "toy_a/metrics.json");
    const auto& cov = m.at("mode_coverage");
    const auto& ed = m.at("energy_distance");
    const int covered = cov.at("covered_modes");
    const double min_frac = cov.at("min_mode_fraction");
    const double ed_real = ed.at("transported_vs_target");
    const double baseline = ed.at("real_vs_real_baseline");
    const bool pass = covered == 8 && min_frac >= 0.05 && ed_real <= 3.0 * baseline;
    report(4, "toy experiment", pass,
           "modes=" + std::to_string(covered) + "/8 min_mode_fraction=" + fmt(min_frac) +
               " (need >=0.05) outside_r3=" + std::to_string(cov.at("outside").get<int>()) + "/" +
               std::to_string(cov.at("total").get<int>()) + " ED=" + fmt(ed_real) + " (need <=" + fmt(3 * baseline) +
               " = 3x baseline " + fmt(baseline) + ")");
  }

  if (z != 0) {
    report(5, "zero-iteration control", false, "toy run exited with status " + std::to_string(z));
  } else {
    const json ed = load_json(cli.work / "toy_5/metrics.json").at("energy_distance");
    const double to_src = ed.at("transported_vs_source");
    const double to_real = ed.at("transported_vs_target");
    report(5, "zero-iteration control", to_src < to_real,
           "iters=5 ED(transported,source)=" + fmt(to_src) + " < ED(transported,real)=" + fmt(to_real));
  }

  const bool toy_same = a == 0 && b == 0 &&
                        slurp(cli.work / "toy_a/metrics.json") == slurp(cli.work / "toy_b/metrics.json");
  const bool resume_same = a == 0 && c1 == 0 && c2 == 0 &&
                           slurp(cli.work / "toy_a/potential.json") == slurp(cli.work / "toy_c/potential.json");
  report(8, "checkpoint resume", resume_same,
         std::string("5000+5000 final checkpoint ") + (resume_same ? "byte-identical" : "differs") +
             " to the unbroken 10000-iteration run");

  // Criterion 7 also needs the MNIST half; stash the toy outcome.
  std::ofstream(cli.work / "toy_determinism.txt") << (toy_same ? "same" : "differs");
}

struct MnistRun {
  bool ok = false;
  std::string error;
  json ae, ot, gen;
  std::string ae_text, ot_text, gen_text;
};

MnistRun mnist_pipeline(const Cli& cli, const std::string& tag, const std::string& images) {
  MnistRun r;
  const fs::path dir = cli.work / ("mnist_" + tag);
  const std::string d = "\"" + dir.string() + "\"";
  const std::string data = " --data \"" + images + "\" --limit 1000 --seed 0 --quiet";
  if (cli.run("train-ae" + data + " --latent-dim 10 --out " + d + "/ae", "mnist_" + tag + "_ae.log") != 0) {
    r.error = "train-ae failed";
    return r;
  }
  if (cli.run("train-ot" + data + " --iters 20000 --ae-checkpoint " + d + "/ae/encoder.json --out " + d + "/ot",
              "mnist_" + tag + "_ot.log") != 0) {
    r.error = "train-ot failed";
    return r;
  }
  if (cli.run("generate --n 64 --seed 0 --checkpoints " + d + "/ae/decoder.json " + d +
                  "/ot/potential.json --out " + d + "/gen",
              "mnist_" + tag + "_gen.log") != 0) {
    r.error = "generate failed";
    return r;
  }
  r.ae_text = slurp(dir / "ae/metrics.json");
  r.ot_text = slurp(dir / "ot/metrics.json");
  r.gen_text = slurp(dir / "gen/metrics.json");
  r.ae = json::parse(r.ae_text);
  r.ot = json::parse(r.ot_text);
  r.gen = json::parse(r.gen_text);
  r.ok = true;
  return r;
}

void mnist_criteria(const Cli& cli, const std::string& images) {
  const MnistRun first = mnist_pipeline(cli, "a", images);
  const MnistRun second = mnist_pipeline(cli, "b", images);
  if (!first.ok) {
    report(6, "MNIST desk-scale pipeline", false, first.error);
  } else {
    const Eigen::MatrixXd train = data::normalize(data::read_idx_images(images, 1000));
    const double train_mean = train.mean();
    const double mse = first.ae.at("final_mse");
    const double base = first.ae.at("mean_image_baseline_mse");
    const long nan_px = first.gen.at("nan_pixels");
    const double gen_mean = first.gen.at("mean_pixel");
    const bool pass = mse < base && nan_px == 0 && std::abs(gen_mean - train_mean) <= 0.15;
    report(6, "MNIST desk-scale pipeline", pass,
           "ae_mse=" + fmt(mse) + " < baseline=" + fmt(base) + "; 64 images nan_pixels=" + std::to_string(nan_px) +
               " mean_pixel=" + fmt(gen_mean) + " vs training " + fmt(train_mean) + " (|diff| <= 0.15)");
  }

  const bool toy_same = slurp(cli.work / "toy_determinism.txt") == "same";
  const bool mnist_same = first.ok && second.ok && first.ae_text == second.ae_text &&
                          first.ot_text == second.ot_text && first.gen_text == second.gen_text;
  report(7, "determinism", toy_same && mnist_same,
         std::string("toy metrics ") + (toy_same ? "identical" : "differ") + ", MNIST metrics " +
             (mnist_same ? "identical" : "differ"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: acceptance <aeot-cli> <work-dir> <mnist-images-idx3>\n";
    return 2;
  }
  const Cli cli{argv[1], argv[2]};
  const std::string images = argv[3];
  fs::remove_all(cli.work);
  fs::create_directories(cli.work);

  try {
    criteria_1_2();
    criterion_3();
    toy_criteria(cli);
    mnist_criteria(cli, images);
  } catch (const std::exception& e) {
    std::cout << "FAIL  acceptance run aborted: " << e.what() << std::endl;
    return 1;
  }
  for (const auto& [id, line] : results) std::cout << line << "\n";
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
