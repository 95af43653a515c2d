// Python bindings for the core operations and the experiment harness.

#include "srl/co_layers.hpp"
#include "srl/config.hpp"
#include "srl/dap.hpp"
#include "srl/harness.hpp"
#include "srl/perturb.hpp"
#include "srl/smsp.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace srl;

namespace {

GridPathSpace grid(int rows, int cols, std::pair<int, int> source, std::pair<int, int> destination) {
  return {rows, cols, {source.first, source.second}, {destination.first, destination.second}};
}

py::dict report_dict(const RunReport& r) {
  py::list curve, rows;
  for (const auto& p : r.curve) curve.append(py::make_tuple(p.episode, p.split, p.mean_reward, p.best_so_far));
  for (const auto& f : r.final_rows)
    rows.append(py::make_tuple(f.instance_id, f.split, f.algorithm, f.seed, f.reward, f.delta_vs_greedy));
  py::dict d;
  d["environment"] = r.environment;
  d["algorithm"] = r.algorithm;
  d["seed"] = r.seed;
  d["status"] = r.status;
  d["error"] = r.error;
  d["config_hash"] = r.config_hash;
  d["curve"] = curve;
  d["final"] = rows;
  d["best_episode"] = r.best_episode;
  d["train_mean"] = r.train_mean;
  d["test_mean"] = r.test_mean;
  d["test_std"] = r.test_std;
  d["wall_seconds"] = r.wall_seconds;
  d["warnings"] = r.warnings;
  d["curve_csv"] = curve_csv(r.curve);
  d["final_csv"] = final_csv(r.final_rows);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Structured reinforcement learning for combinatorial decision making";

  m.def(
      "gaussian_perturb",
      [](const Vector& theta, double sigma, int count, std::uint64_t seed) {
        Rng rng(seed);
        return gaussian_perturb(theta, {sigma, count}, rng);
      },
      py::arg("theta"), py::arg("sigma"), py::arg("count"), py::arg("seed") = 0);
  m.def(
      "softmax_target",
      [](const std::vector<Vector>& candidates, const std::vector<double>& q, double tau) {
        const auto t = softmax_target(candidates, q, tau);
        return py::make_tuple(t.values, t.weights);
      },
      py::arg("candidates"), py::arg("q"), py::arg("tau"));
  m.def(
      "softmax_target_counted",
      [](const std::vector<Vector>& candidates, const std::vector<int>& counts, const std::vector<double>& q,
         double tau) {
        const auto t = softmax_target_counted(candidates, counts, q, tau);
        return py::make_tuple(t.values, t.weights);
      },
      py::arg("candidates"), py::arg("counts"), py::arg("q"), py::arg("tau"));
  m.def(
      "smoothed_max_estimate",
      [](const Vector& theta, const Maximizer& f, double eps, int samples, std::uint64_t seed) {
        Rng rng(seed);
        return smoothed_max_estimate(theta, f, eps, samples, rng);
      },
      py::arg("theta"), py::arg("maximizer"), py::arg("eps"), py::arg("samples"), py::arg("seed") = 0);
  m.def(
      "fy_loss_and_grad",
      [](const Vector& theta, const Vector& target, const Maximizer& f, double eps, int samples, std::uint64_t seed) {
        Rng rng(seed);
        const auto r = fy_loss_and_grad(theta, target, f, eps, samples, rng);
        return py::make_tuple(r.value, r.gradient);
      },
      py::arg("theta"), py::arg("target"), py::arg("maximizer"), py::arg("eps"), py::arg("samples"),
      py::arg("seed") = 0);

  m.def(
      "topk_argmax", [](const Vector& theta, int k) { return topk_argmax(theta, {static_cast<int>(theta.size()), k}); },
      py::arg("theta"), py::arg("k"));
  m.def(
      "ranking_argmax", [](const Vector& theta) { return ranking_argmax(theta, {static_cast<int>(theta.size())}); },
      py::arg("theta"));
  m.def(
      "grid_path_argmax",
      [](const Vector& theta, int rows, int cols, std::pair<int, int> s, std::pair<int, int> d) {
        return grid_path_argmax(theta, grid(rows, cols, s, d));
      },
      py::arg("theta"), py::arg("rows"), py::arg("cols"), py::arg("source"), py::arg("destination"));
  m.def(
      "grid_path_actions",
      [](int rows, int cols, std::pair<int, int> s, std::pair<int, int> d) {
        return enumerate_actions(grid(rows, cols, s, d));
      },
      py::arg("rows"), py::arg("cols"), py::arg("source"), py::arg("destination"));

  m.def("mnl_probs", [](const std::vector<double>& theta) { return dap::mnl_probs(theta); }, py::arg("theta"));
  m.def(
      "smsp_total_completion",
      [](const std::vector<double>& release, const std::vector<double>& processing, const std::vector<int>& sequence) {
        return smsp::total_completion({release, processing}, sequence);
      },
      py::arg("release"), py::arg("processing"), py::arg("sequence"));
  m.def(
      "smsp_expert",
      [](const std::vector<double>& release, const std::vector<double>& processing) {
        return smsp::expert_exhaustive({release, processing});
      },
      py::arg("release"), py::arg("processing"));

  m.def(
      "parse_config", [](const std::string& text) { return emit_config(parse_config(text)); }, py::arg("text"),
      "Validates a config and returns its effective form with defaults filled in.");
  m.def(
      "run_training",
      [](const std::string& config_text, std::uint64_t seed, const std::string& out_dir) {
        const ExperimentConfig c = parse_config(config_text);
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run_training(c, seed, {out_dir, ""});
        }
        return report_dict(r);
      },
      py::arg("config"), py::arg("seed") = 0, py::arg("out_dir") = "");
  m.def(
      "gen_data", [](const std::string& config_text, const std::string& path) { gen_data(parse_config(config_text), path); },
      py::arg("config"), py::arg("path"));
  m.def("summarize_directory", &summarize_directory, py::arg("directory"));
}
