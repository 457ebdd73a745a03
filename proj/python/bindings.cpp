#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>

#include "aeot/checkpoint.hpp"
#include "aeot/datasets.hpp"
#include "aeot/eval.hpp"
#include "aeot/generator.hpp"
#include "aeot/ot.hpp"
#include "aeot/potential.hpp"

namespace py = pybind11;
using namespace aeot;

namespace {

// Row-major numpy arrays convert without a copy on the way in; Eigen's
// default column-major matrices are fine on the way out.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The trainer keeps a pointer to its bank, so both live together here.
class PotentialRun {
 public:
  PotentialRun(const Eigen::MatrixXd& bank, potential::TrainConfig cfg)
      : bank_(std::make_unique<potential::LatentBank>(bank)), trainer_(*bank_, std::move(cfg)) {}

  potential::IterationStats step() { return trainer_.step(); }
  std::vector<potential::IterationStats> run(std::int64_t n) {
    std::vector<potential::IterationStats> out;
    for (std::int64_t k = 0; k < n && !trainer_.done(); ++k) out.push_back(trainer_.step());
    return out;
  }
  const potential::PotentialTrainer& trainer() const { return trainer_; }

 private:
  std::unique_ptr<potential::LatentBank> bank_;
  potential::PotentialTrainer trainer_;
};

py::dict mode_report(const eval::ModeReport& r) {
  py::dict d;
  d["radius"] = r.radius;
  d["counts"] = std::vector<int>(r.counts.begin(), r.counts.end());
  d["outside"] = r.outside;
  d["total"] = r.total;
  d["covered_modes"] = r.covered_modes();
  d["min_mode_fraction"] = r.min_mode_fraction();
  return d;
}

}  // namespace

PYBIND11_MODULE(_aeot, m) {
  m.doc() = "AE-OT core: discrete OT, potential training, generation, evaluation";

  // ---- ot
  m.def(
      "solve_ot",
      [](const RowMatrix& src, const RowMatrix& tgt) {
        const ot::CostMatrix c = ot::cost_matrix(ot::DiscreteMeasure(src), ot::DiscreteMeasure(tgt));
        const ot::OtSolution s = ot::solve(c);
        py::dict d;
        d["cost"] = s.plan.cost;
        d["assignment"] = s.plan.assignment;
        d["phi"] = s.dual.source;
        d["psi"] = s.dual.target;
        d["dual_objective"] = s.dual.objective;
        return d;
      },
      py::arg("source"), py::arg("target"),
      "Assignment OT with cost |x-y|^2/2 between equal-size point sets.");

  // ---- data
  m.def(
      "sample_toy", [](std::uint64_t seed, int points_per_mode) {
        data::ToySpec spec;
        spec.points_per_mode = points_per_mode;
        return Eigen::MatrixXd(data::sample_toy(spec, seed).points());
      },
      py::arg("seed") = 0, py::arg("points_per_mode") = 32, "Eight Gaussians at radius 10, unit variance.");
  m.def("toy_centers", [] { return Eigen::MatrixXd(data::ToySpec{}.centers()); });
  m.def(
      "load_idx_images",
      [](const std::filesystem::path& path, std::optional<std::size_t> limit) {
        return data::load_idx_images(path, limit);
      },
      py::arg("path"), py::arg("limit") = py::none(), "Images as rows scaled to [0, 1].");

  // ---- eval
  m.def(
      "energy_distance", [](const RowMatrix& a, const RowMatrix& b) { return eval::energy_distance(a, b); },
      py::arg("a"), py::arg("b"));
  m.def(
      "mode_coverage",
      [](const RowMatrix& pts, double radius) { return mode_report(eval::mode_coverage(pts, {}, radius)); },
      py::arg("points"), py::arg("radius") = 3.0);

  // ---- networks
  py::class_<nn::Mlp>(m, "Mlp")
      .def_property_readonly("input_dim", &nn::Mlp::input_dim)
      .def_property_readonly("output_dim", &nn::Mlp::output_dim)
      .def_property_readonly("depth", &nn::Mlp::depth)
      .def_property_readonly("parameter_count", &nn::Mlp::parameter_count)
      .def("forward", [](const nn::Mlp& net, const RowMatrix& x) { return nn::forward(net, x); })
      .def("input_gradients", [](const nn::Mlp& net, const RowMatrix& x) { return nn::input_gradients(net, x); })
      .def("transport", [](const nn::Mlp& net, const RowMatrix& z) { return gen::transport(net, z); });

  m.def(
      "load_checkpoint",
      [](const std::filesystem::path& path) {
        ckpt::Checkpoint c = ckpt::load(path);
        return py::make_tuple(ckpt::role_name(c.role), std::move(c.net), c.iteration);
      },
      py::arg("path"), "Returns (role, Mlp, iteration).");

  m.def(
      "generate",
      [](const nn::Mlp& decoder, const nn::Mlp& potential, Eigen::Index n, std::uint64_t seed) {
        const gen::Generated g = gen::generate(decoder, potential, {n, seed});
        return py::make_tuple(g.noise, g.codes, g.images);
      },
      py::arg("decoder"), py::arg("potential"), py::arg("n") = 64, py::arg("seed") = 0,
      "Returns (noise, transported codes, images).");

  // ---- potential training
  py::class_<potential::IterationStats>(m, "IterationStats")
      .def_readonly("iteration", &potential::IterationStats::iteration)
      .def_readonly("mse_term", &potential::IterationStats::mse_term)
      .def_readonly("reg_term", &potential::IterationStats::reg_term)
      .def_readonly("total_loss", &potential::IterationStats::total_loss)
      .def_readonly("lp_objective", &potential::IterationStats::lp_objective);

  py::class_<PotentialRun>(m, "PotentialTrainer")
      .def(py::init([](const RowMatrix& bank, std::int64_t iterations, Eigen::Index batch_size, double lambda,
                       double lr, std::uint64_t seed, std::vector<Eigen::Index> hidden) {
             potential::TrainConfig cfg;
             cfg.iterations = iterations;
             cfg.batch_size = batch_size;
             cfg.lambda = lambda;
             cfg.adam.lr = lr;
             cfg.seed = seed;
             cfg.hidden = std::move(hidden);
             cfg.latent_dim = bank.cols();
             cfg.validate();
             return std::make_unique<PotentialRun>(bank, cfg);
           }),
           py::arg("bank"), py::arg("iterations") = 10000, py::arg("batch_size") = 64, py::arg("lam") = 0.0,
           py::arg("lr") = 1e-2, py::arg("seed") = 0, py::arg("hidden") = std::vector<Eigen::Index>{512, 512, 512})
      .def("step", &PotentialRun::step)
      .def("run", &PotentialRun::run, py::arg("n"), "Up to n steps, stopping at the configured iteration count.")
      .def_property_readonly("iteration", [](const PotentialRun& r) { return r.trainer().iteration(); })
      .def_property_readonly("done", [](const PotentialRun& r) { return r.trainer().done(); })
      .def_property_readonly("network", [](const PotentialRun& r) { return r.trainer().network(); });

  py::register_exception<potential::TrainingDiverged>(m, "TrainingDiverged");
  py::register_exception<ckpt::CheckpointError>(m, "CheckpointError");
}
