#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <stdexcept>

#include "jocomco/decoder.hpp"
#include "jocomco/experiment.hpp"
#include "jocomco/netsim.hpp"

namespace py = pybind11;
using namespace jocomco;

namespace {

EntryLaw law_from_name(const std::string& name) {
  if (name == "gaussian") return EntryLaw::kGaussian;
  if (name == "rademacher") return EntryLaw::kRademacher;
  throw std::invalid_argument("unknown entry law: " + name);
}

ExperimentConfig make_config(const std::string& preset, const std::string& out_dir,
                             int trials, std::uint64_t seed,
                             const std::string& overrides_json) {
  ExperimentConfig config = preset_by_name(preset);
  if (!overrides_json.empty()) config = config_from_json(overrides_json, config);
  config.out_dir = out_dir;
  if (trials > 0) config.trials = trials;
  config.seed = seed;
  return config;
}

py::dict outcome_dict(const RunOutcome& out) {
  py::dict d;
  d["csv_path"] = out.csv_path.string();
  d["meta_path"] = out.meta_path.string();
  d["trials_run"] = out.trials_run;
  d["trials_failed"] = out.trials_failed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_jocomco, m) {
  m.doc() = "Joint compression + network-coding simulator core";

  m.def("version", []() { return std::string(version_string()); });

  m.def("rsnr", &rsnr, py::arg("x"), py::arg("x_rec"),
        "Reconstruction SNR in dB, 20*log10(|x| / |x - x_rec|)");

  m.def(
      "realize",
      [](int rows, int cols, const std::string& law, std::uint64_t seed) {
        return realize(MatrixSpec{rows, cols, law_from_name(law), seed});
      },
      py::arg("rows"), py::arg("cols"), py::arg("law"), py::arg("seed"),
      "Seed-regenerable random matrix ('gaussian' or 'rademacher')");

  m.def(
      "omp_solve",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& y, int sparsity) {
        OmpConfig cfg;
        cfg.sparsity = sparsity;
        const OmpResult res = omp_solve(a, y, cfg);
        py::dict d;
        d["solution"] = res.solution;
        d["support"] = res.support;
        d["converged"] = res.converged;
        d["iterations"] = res.iterations;
        return d;
      },
      py::arg("a"), py::arg("y"), py::arg("sparsity") = 0,
      "Orthogonal matching pursuit; sparsity=0 caps at rows/2");

  m.def(
      "solve_mu",
      [](int sensor_count, int packet_target) {
        const MuSolution sol = solve_mu(sensor_count, packet_target);
        py::dict d;
        d["mu"] = sol.mu;
        d["p"] = sol.p;
        d["clamped"] = sol.clamped;
        d["residual"] = sol.residual;
        return d;
      },
      py::arg("sensor_count"), py::arg("packet_target"),
      "Election safety factor: (mu-1)(l-1) = 2*sigma at p = mu(l-1)/(N-1)");

  m.def("election_probability", &election_probability, py::arg("mu"),
        py::arg("packet_target"), py::arg("sensor_count"));
  m.def("temporal_gain", &temporal_gain, py::arg("measurements"), py::arg("block_len"));
  m.def("spatial_only_gain", &spatial_only_gain, py::arg("sensor_count"),
        py::arg("packet_target"));
  m.def("jocomco_gain", &jocomco_gain, py::arg("sensor_count"), py::arg("packet_target"),
        py::arg("measurements"), py::arg("block_len"));
  m.def("jocomco_precode_gain", &jocomco_precode_gain, py::arg("sensor_count"),
        py::arg("packet_target"), py::arg("mu"), py::arg("measurements"),
        py::arg("block_len"));
  m.def("normalized_sparsity", &normalized_sparsity, py::arg("k"),
        py::arg("sensor_count"), py::arg("block_len"));
  m.def("figure3_head_budget", &figure3_head_budget, py::arg("k"),
        py::arg("total_sensors"), py::arg("clusters"));

  m.def(
      "run_trials",
      [](const std::string& preset, const std::string& scheme, int trials,
         std::uint64_t seed, bool decode) {
        const ExperimentConfig config = preset_by_name(preset);
        const auto sch = scheme_from_name(scheme);
        if (!sch) throw std::invalid_argument("unknown scheme: " + scheme);
        const Topology topo =
            four_cluster_topology(config.sensors_per_cluster, config.epsilon);
        SimParams params;
        params.gen.block_len = config.block_len;
        params.gen.measurements = config.measurements;
        params.gen.sparsity = config.sparsity;
        params.gen.patch_size = config.patch_size;
        params.gen.noise = NoiseSpec{config.noise, config.snr_db};
        params.head_budget = config.head_budget;
        params.mu = config.mu;
        params.rho = config.rho;
        params.decode = decode;
        const auto results = run_monte_carlo(topo, *sch, params, trials, seed);

        double gain = 0.0, p20 = 0.0, p100 = 0.0;
        long long delivered = 0;
        int failed = 0;
        for (const auto& r : results) {
          gain += r.empirical_gain;
          p20 += r.fraction_above(20.0);
          p100 += r.fraction_above(100.0);
          delivered += r.delivered_packets;
          if (r.decode_failed) ++failed;
        }
        const double n = static_cast<double>(results.size());
        py::dict d;
        d["trials"] = results.size();
        d["mean_gain"] = gain / n;
        d["p_rsnr_gt_20db"] = p20 / n;
        d["p_rsnr_gt_100db"] = p100 / n;
        d["mean_delivered_packets"] = static_cast<double>(delivered) / n;
        d["decode_failure_rate"] = static_cast<double>(failed) / n;
        return d;
      },
      py::arg("preset"), py::arg("scheme"), py::arg("trials") = 20,
      py::arg("seed") = 1, py::arg("decode") = true,
      "Monte-Carlo aggregate for one scheme on the preset's four-cluster topology");

  const auto bind_runner = [&m](const char* name, RunOutcome (*runner)(
                                                      const ExperimentConfig&, std::ostream*)) {
    m.def(
        name,
        [runner](const std::string& preset, const std::string& out_dir, int trials,
                 std::uint64_t seed, const std::string& overrides_json) {
          const ExperimentConfig config =
              make_config(preset, out_dir, trials, seed, overrides_json);
          return outcome_dict(runner(config, nullptr));
        },
        py::arg("preset"), py::arg("out_dir"), py::arg("trials") = 0,
        py::arg("seed") = 1, py::arg("overrides_json") = std::string());
  };
  bind_runner("run_figure2", &run_figure2);
  bind_runner("run_figure3", &run_figure3);
  bind_runner("run_figure4", &run_figure4);
  bind_runner("run_generic", &run_generic);
}
