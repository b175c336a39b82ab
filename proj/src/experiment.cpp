#include "jocomco/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "jocomco/coding.hpp"
#include "jocomco/rng.hpp"

namespace jocomco {

namespace {

constexpr std::uint64_t kSaltFigure2 = 0xF2u;
constexpr std::uint64_t kSaltFigure3 = 0xF3u;
constexpr std::uint64_t kSaltFigure4 = 0xF4u;
constexpr std::uint64_t kSaltGeneric = 0xF0u;

const Scheme kAllSchemes[] = {Scheme::kOnlyNc, Scheme::kOnlyTemporalCs, Scheme::kSeparateNcCs,
                              Scheme::kJocomcoNoPrecode, Scheme::kJocomcoPrecode};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Basis parse_basis(const std::string& name) {
  if (name == "identity") return Basis::kIdentity;
  if (name == "dct") return Basis::kDct;
  throw std::invalid_argument("unknown basis: " + name);
}

int single_cluster_size(const ExperimentConfig& c) { return c.clusters * c.sensors_per_cluster; }

int total_patch_count(const ExperimentConfig& c) {
  const int per_cluster = (c.sensors_per_cluster + c.patch_size - 1) / c.patch_size;
  return c.clusters * per_cluster;
}

SimParams base_params(const ExperimentConfig& c) {
  SimParams p;
  p.gen.block_len = c.block_len;
  p.gen.measurements = c.measurements;
  p.gen.sparsity = c.sparsity;
  p.gen.patch_size = c.patch_size;
  p.gen.hot_patches = -1;
  p.gen.basis = parse_basis(c.basis);
  p.gen.law = CoefficientLaw::kStandardNormal;
  p.gen.noise.enabled = c.noise;
  p.gen.noise.snr_db = c.snr_db;
  p.head_budget = c.head_budget;
  p.mu = c.mu;
  p.mu_from_solver = c.mu_from_solver;
  p.rho = c.rho;
  p.separate_delivery_target = c.separate_delivery_target;
  p.decode = true;
  return p;
}

std::vector<Scheme> resolve_schemes(const ExperimentConfig& c, std::vector<Scheme> defaults) {
  if (c.schemes.empty()) return defaults;
  std::vector<Scheme> out;
  for (const std::string& name : c.schemes) {
    const auto s = scheme_from_name(name);
    if (!s) throw std::invalid_argument("unknown scheme: " + name);
    out.push_back(*s);
  }
  return out;
}

// Trials with per-trial failure isolation; results stay ordered by index so
// downstream aggregation (and hence the CSV) is independent of scheduling.
struct CheckedRuns {
  std::vector<TrialResult> results;
  std::vector<char> ok;
  long long failed = 0;
};

CheckedRuns run_trials_checked(const Topology& topo, Scheme scheme, const SimParams& params,
                               int trials, std::uint64_t master_seed, int threads) {
  CheckedRuns out;
  out.results.resize(static_cast<size_t>(trials));
  out.ok.assign(static_cast<size_t>(trials), 0);
  if (trials == 0) return out;

  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
  workers = std::min(workers, trials);

  std::atomic<int> next{0};
  std::atomic<long long> failed{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= trials) break;
      const std::uint64_t seed = derive_seed(master_seed, {0x7452u, static_cast<std::uint64_t>(i)});
      try {
        out.results[static_cast<size_t>(i)] = run_trial(topo, scheme, params, seed, nullptr);
        out.ok[static_cast<size_t>(i)] = 1;
      } catch (const std::exception&) {
        failed.fetch_add(1);
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  out.failed = failed.load();
  return out;
}

struct PointStats {
  double mean_gain = 0.0;
  double p20 = 0.0;
  double p100 = 0.0;
  double mean_delivered = 0.0;
  double decode_failure_rate = 0.0;
  long long ok_count = 0;
};

PointStats aggregate(const CheckedRuns& runs) {
  PointStats s;
  for (size_t i = 0; i < runs.results.size(); ++i) {
    if (!runs.ok[i]) continue;
    const TrialResult& r = runs.results[i];
    ++s.ok_count;
    s.mean_gain += r.empirical_gain;
    s.p20 += r.fraction_above(20.0);
    s.p100 += r.fraction_above(100.0);
    s.mean_delivered += r.delivered_packets;
    s.decode_failure_rate += r.decode_failed ? 1.0 : 0.0;
  }
  if (s.ok_count > 0) {
    const double inv = 1.0 / static_cast<double>(s.ok_count);
    s.mean_gain *= inv;
    s.p20 *= inv;
    s.p100 *= inv;
    s.mean_delivered *= inv;
    s.decode_failure_rate *= inv;
  }
  return s;
}

void require_valid(const ExperimentConfig& config) {
  const ValidationReport report = validate_config(config);
  if (!report.ok()) throw std::invalid_argument(report.to_string());
}

RunOutcome write_outputs(const ExperimentConfig& config, const std::string& command,
                         const std::string& csv_name, const std::string& header,
                         const std::vector<std::string>& rows, long long run, long long failed) {
  std::filesystem::create_directories(config.out_dir);
  RunOutcome outcome;
  outcome.csv_path = std::filesystem::path(config.out_dir) / csv_name;
  outcome.meta_path = outcome.csv_path;
  outcome.meta_path += ".meta.json";
  outcome.trials_run = run;
  outcome.trials_failed = failed;

  std::ofstream csv(outcome.csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + outcome.csv_path.string());
  csv << header << "\n";
  for (const std::string& row : rows) csv << row << "\n";
  csv.close();

  nlohmann::json meta;
  meta["command"] = command;
  meta["version"] = version_string();
  meta["seed"] = config.seed;
  meta["trials_run"] = run;
  meta["trials_failed"] = failed;
  meta["config"] = nlohmann::json::parse(config_to_json(config));
  if (command == "figure3") meta["baseline_overhead"] = config.baseline_overhead;
  std::ofstream mf(outcome.meta_path, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write " + outcome.meta_path.string());
  mf << meta.dump(2) << "\n";
  return outcome;
}

Topology generic_topology(const ExperimentConfig& config) {
  if (!config.topology_file.empty()) {
    std::ifstream in(config.topology_file);
    if (!in) throw std::invalid_argument("topology file not found: " + config.topology_file);
    std::stringstream buf;
    buf << in.rdbuf();
    return build_topology(topology_config_from_json(buf.str()));
  }
  if (config.clusters == 1) return single_cluster_topology(config.sensors_per_cluster, config.epsilon);
  if (config.clusters == 4) return four_cluster_topology(config.sensors_per_cluster, config.epsilon);
  TopologyConfig tc;  // fallback: every head one hop from the sink
  tc.cluster_sizes.assign(static_cast<size_t>(config.clusters), config.sensors_per_cluster);
  for (int c = 0; c < config.clusters; ++c) tc.links.push_back({c, kSinkNode, config.epsilon});
  return build_topology(tc);
}

}  // namespace

const char* version_string() {
#ifdef JOCOMCO_VERSION_STRING
  return JOCOMCO_VERSION_STRING;
#else
  return "0.1.0+unknown";
#endif
}

const char* const kFigure2Header = "scheme,gain,p_rsnr_gt_100db";
const char* const kFigure3Header = "scheme,ck,mean_gain";
const char* const kFigure4Header = "rsnr_min_db,rho,p_rsnr_gt_min";
const char* const kGenericHeader =
    "scheme,mean_gain,p_rsnr_gt_20db,p_rsnr_gt_100db,mean_delivered_packets,decode_failure_rate";

ExperimentConfig desk_preset() {
  ExperimentConfig c;
  c.preset = "desk";
  c.clusters = 4;
  c.sensors_per_cluster = 64;
  c.block_len = 256;
  c.measurements = 32;
  c.sparsity = 5;
  c.patch_size = 4;
  c.head_budget = 16;
  c.trials = 200;
  c.figure2_budgets = {16, 24, 32, 48, 64, 80, 102, 128, 160, 192};
  c.figure3_sparsities = {5, 10, 15, 20};
  c.figure4_rhos = {1.17, 1.25, 1.33, 1.428, 1.53, 1.67};
  return c;
}

ExperimentConfig paper_preset() {
  ExperimentConfig c = desk_preset();
  c.preset = "paper";
  c.sensors_per_cluster = 128;
  c.block_len = 512;
  c.measurements = 64;
  c.patch_size = 8;
  c.head_budget = 32;
  c.figure2_budgets = {16, 32, 64, 96, 128, 160, 205, 256, 320, 384};
  c.figure3_sparsities = {5, 10, 15, 20, 25, 30, 35, 40};
  return c;
}

ExperimentConfig preset_by_name(const std::string& name) {
  if (name == "desk") return desk_preset();
  if (name == "paper") return paper_preset();
  throw std::invalid_argument("unknown preset: " + name + " (expected desk or paper)");
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["preset"] = c.preset;
  j["clusters"] = c.clusters;
  j["sensors_per_cluster"] = c.sensors_per_cluster;
  j["topology_file"] = c.topology_file;
  j["block_len"] = c.block_len;
  j["measurements"] = c.measurements;
  j["sparsity"] = c.sparsity;
  j["patch_size"] = c.patch_size;
  j["snr_db"] = c.snr_db;
  j["noise"] = c.noise;
  j["basis"] = c.basis;
  j["head_budget"] = c.head_budget;
  j["mu"] = c.mu;
  j["mu_from_solver"] = c.mu_from_solver;
  j["separate_delivery_target"] = c.separate_delivery_target;
  j["epsilon"] = c.epsilon;
  j["rho"] = c.rho;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["max_failure_fraction"] = c.max_failure_fraction;
  j["schemes"] = c.schemes;
  j["out_dir"] = c.out_dir;
  j["figure2_budgets"] = c.figure2_budgets;
  j["figure2_mu"] = c.figure2_mu;
  j["figure3_sparsities"] = c.figure3_sparsities;
  j["figure3_mu"] = c.figure3_mu;
  j["baseline_overhead"] = c.baseline_overhead;
  j["figure4_rhos"] = c.figure4_rhos;
  j["figure4_min_db"] = c.figure4_min_db;
  j["figure4_epsilon"] = c.figure4_epsilon;
  j["figure4_mu"] = c.figure4_mu;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c = base;
  if (j.contains("preset")) c = preset_by_name(j.at("preset").get<std::string>());
  c.preset = j.value("preset", c.preset);
  c.clusters = j.value("clusters", c.clusters);
  c.sensors_per_cluster = j.value("sensors_per_cluster", c.sensors_per_cluster);
  c.topology_file = j.value("topology_file", c.topology_file);
  c.block_len = j.value("block_len", c.block_len);
  c.measurements = j.value("measurements", c.measurements);
  c.sparsity = j.value("sparsity", c.sparsity);
  c.patch_size = j.value("patch_size", c.patch_size);
  c.snr_db = j.value("snr_db", c.snr_db);
  c.noise = j.value("noise", c.noise);
  c.basis = j.value("basis", c.basis);
  c.head_budget = j.value("head_budget", c.head_budget);
  c.mu = j.value("mu", c.mu);
  c.mu_from_solver = j.value("mu_from_solver", c.mu_from_solver);
  c.separate_delivery_target = j.value("separate_delivery_target", c.separate_delivery_target);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.rho = j.value("rho", c.rho);
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.max_failure_fraction = j.value("max_failure_fraction", c.max_failure_fraction);
  if (j.contains("schemes")) c.schemes = j.at("schemes").get<std::vector<std::string>>();
  c.out_dir = j.value("out_dir", c.out_dir);
  if (j.contains("figure2_budgets")) c.figure2_budgets = j.at("figure2_budgets").get<std::vector<int>>();
  c.figure2_mu = j.value("figure2_mu", c.figure2_mu);
  if (j.contains("figure3_sparsities")) {
    c.figure3_sparsities = j.at("figure3_sparsities").get<std::vector<int>>();
  }
  c.figure3_mu = j.value("figure3_mu", c.figure3_mu);
  c.baseline_overhead = j.value("baseline_overhead", c.baseline_overhead);
  if (j.contains("figure4_rhos")) c.figure4_rhos = j.at("figure4_rhos").get<std::vector<double>>();
  if (j.contains("figure4_min_db")) c.figure4_min_db = j.at("figure4_min_db").get<std::vector<double>>();
  c.figure4_epsilon = j.value("figure4_epsilon", c.figure4_epsilon);
  c.figure4_mu = j.value("figure4_mu", c.figure4_mu);
  return c;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  out << "validation: " << (ok() ? "OK" : "FAILED") << "\n";
  for (const std::string& e : errors) out << "error: " << e << "\n";
  for (const std::string& w : warnings) out << "warning: " << w << "\n";
  out << "estimated trials: " << estimated_trials << "\n";
  return out.str();
}

ValidationReport validate_config(const ExperimentConfig& c) {
  ValidationReport rep;
  auto err = [&rep](const std::string& m) { rep.errors.push_back(m); };
  auto warn = [&rep](const std::string& m) { rep.warnings.push_back(m); };

  if (c.preset != "desk" && c.preset != "paper") err("preset must be desk or paper");
  if (c.trials <= 0) err("trials must be positive");
  if (c.clusters < 1) err("clusters must be >= 1");
  if (c.sensors_per_cluster < 2) err("sensors_per_cluster must be >= 2");
  if (c.block_len < 1) err("block_len must be >= 1");
  if (c.measurements < 1 || c.measurements > c.block_len) {
    err("measurements must lie in [1, block_len]");
  }
  if (c.sparsity < 1 || c.sparsity > c.block_len) err("sparsity must lie in [1, block_len]");
  if (c.patch_size < 1 || c.patch_size > c.sensors_per_cluster) {
    err("patch_size must lie in [1, sensors_per_cluster]");
  } else if (c.sparsity > total_patch_count(c)) {
    err("sparsity exceeds the number of correlation patches");
  }
  if (c.basis != "identity" && c.basis != "dct") err("basis must be identity or dct");
  if (c.head_budget < 1 || c.head_budget > c.sensors_per_cluster) {
    err("head_budget (l) must lie in [1, sensors_per_cluster]");
  }
  if (c.mu < 1.0) err("mu must be >= 1");
  if (c.mu_from_solver && c.head_budget < 2) err("mu_from_solver requires head_budget >= 2");
  if (!(c.separate_delivery_target > 0.0 && c.separate_delivery_target <= 1.0)) {
    err("separate_delivery_target must lie in (0, 1]");
  }
  if (!(c.epsilon >= 0.0 && c.epsilon < 1.0)) err("epsilon must lie in [0, 1)");
  if (c.rho < 1.0) err("rho must be >= 1 (normalized redundancy)");
  if (!(c.max_failure_fraction >= 0.0 && c.max_failure_fraction <= 1.0)) {
    err("max_failure_fraction must lie in [0, 1]");
  }
  for (const std::string& name : c.schemes) {
    if (!scheme_from_name(name)) err("unknown scheme: " + name);
  }

  if (c.figure2_budgets.empty()) err("figure2_budgets must not be empty");
  for (int l : c.figure2_budgets) {
    if (l < 2 || l > single_cluster_size(c)) {
      err("figure2 budget " + std::to_string(l) + " outside [2, N=" +
          std::to_string(single_cluster_size(c)) + "]");
    }
  }
  if (c.figure2_mu < 1.0) err("figure2_mu must be >= 1");

  if (c.figure3_sparsities.empty()) err("figure3_sparsities must not be empty");
  for (int k : c.figure3_sparsities) {
    if (k < 1) err("figure3 sparsity must be >= 1");
    if (c.patch_size >= 1 && k > total_patch_count(c)) {
      err("figure3 sparsity " + std::to_string(k) + " exceeds the patch count");
    }
  }
  if (c.figure3_mu < 1.0) err("figure3_mu must be >= 1");
  if (c.baseline_overhead <= 0.0) err("baseline_overhead must be positive");

  if (c.figure4_rhos.empty()) err("figure4_rhos must not be empty");
  for (double r : c.figure4_rhos) {
    if (r < 1.0) err("figure4 rho " + fmt(r) + " must be >= 1 (normalized redundancy)");
  }
  if (c.figure4_min_db.empty()) err("figure4_min_db must not be empty");
  if (!(c.figure4_epsilon >= 0.0 && c.figure4_epsilon < 1.0)) {
    err("figure4_epsilon must lie in [0, 1)");
  }
  if (c.figure4_mu < 1.0) err("figure4_mu must be >= 1");

  if (!c.topology_file.empty()) {
    std::ifstream in(c.topology_file);
    if (!in) {
      err("topology file not found: " + c.topology_file);
    } else {
      try {
        std::stringstream buf;
        buf << in.rdbuf();
        (void)build_topology(topology_config_from_json(buf.str()));
      } catch (const std::exception& e) {
        err(std::string("topology file invalid: ") + e.what());
      }
    }
  }

  std::error_code ec;
  if (std::filesystem::exists(c.out_dir, ec) && !std::filesystem::is_directory(c.out_dir, ec)) {
    err("out_dir exists and is not a directory: " + c.out_dir);
  }
  if (c.trials < 50) warn("trial count below 50; Monte-Carlo estimates will be noisy");

  const long long scheme_count =
      static_cast<long long>(c.schemes.empty() ? 5 : c.schemes.size());
  const long long fig2_points =
      static_cast<long long>(c.figure2_budgets.size()) * 2 + std::min<long long>(scheme_count, 3);
  const long long fig3_points = static_cast<long long>(c.figure3_sparsities.size()) * 4;
  const long long fig4_points = static_cast<long long>(c.figure4_rhos.size());
  rep.estimated_trials =
      static_cast<long long>(c.trials) * (fig2_points + fig3_points + fig4_points + scheme_count);
  return rep;
}

int figure3_head_budget(int k, int total_sensors, int clusters) {
  const long long by_sampling =
      static_cast<long long>(std::ceil(4.0 * k * std::log(static_cast<double>(total_sensors))));
  const long long cap = (3LL * total_sensors) / 4;
  const long long total = std::min(by_sampling, cap);
  return static_cast<int>((total + clusters - 1) / clusters);
}

RunOutcome run_figure2(const ExperimentConfig& config, std::ostream* log) {
  require_valid(config);
  const int N = single_cluster_size(config);
  const Topology topo = single_cluster_topology(N, config.epsilon);
  const std::vector<Scheme> schemes = resolve_schemes(
      config, {Scheme::kOnlyNc, Scheme::kOnlyTemporalCs, Scheme::kSeparateNcCs,
               Scheme::kJocomcoNoPrecode, Scheme::kJocomcoPrecode});

  std::vector<std::string> rows;
  long long run = 0;
  long long failed = 0;
  for (size_t si = 0; si < schemes.size(); ++si) {
    const Scheme scheme = schemes[si];
    const bool swept =
        scheme == Scheme::kJocomcoNoPrecode || scheme == Scheme::kJocomcoPrecode;
    const std::vector<int> budgets = swept ? config.figure2_budgets : std::vector<int>{N};
    for (size_t bi = 0; bi < budgets.size(); ++bi) {
      SimParams params = base_params(config);
      params.head_budget = budgets[bi];
      params.mu = config.figure2_mu;
      const std::uint64_t seed = derive_seed(
          config.seed, {kSaltFigure2, static_cast<std::uint64_t>(si), static_cast<std::uint64_t>(bi)});
      const CheckedRuns runs =
          run_trials_checked(topo, scheme, params, config.trials, seed, config.threads);
      const PointStats stats = aggregate(runs);
      run += config.trials;
      failed += runs.failed;
      rows.push_back(std::string(scheme_name(scheme)) + "," + fmt(stats.mean_gain) + "," +
                     fmt(stats.p100));
      if (log) {
        *log << "figure2 " << scheme_name(scheme) << " l=" << budgets[bi]
             << " gain=" << stats.mean_gain << " p100=" << stats.p100 << "\n";
      }
    }
  }
  return write_outputs(config, "figure2", "figure2.csv", kFigure2Header, rows, run, failed);
}

RunOutcome run_figure3(const ExperimentConfig& config, std::ostream* log) {
  require_valid(config);
  const Topology topo = four_cluster_topology(config.sensors_per_cluster, config.epsilon);
  const int N = topo.total_sensors;
  const std::vector<Scheme> schemes =
      resolve_schemes(config, {Scheme::kOnlyNc, Scheme::kSeparateNcCs,
                               Scheme::kJocomcoNoPrecode, Scheme::kJocomcoPrecode});

  std::vector<std::string> rows;
  long long run = 0;
  long long failed = 0;
  for (size_t si = 0; si < schemes.size(); ++si) {
    const Scheme scheme = schemes[si];
    for (size_t ki = 0; ki < config.figure3_sparsities.size(); ++ki) {
      const int k = config.figure3_sparsities[ki];
      SimParams params = base_params(config);
      params.gen.sparsity = k;
      params.gen.hot_patches = k;
      params.head_budget = figure3_head_budget(k, N, topo.cluster_count());
      params.mu = config.figure3_mu;
      params.decode = false;  // packet-count study; the CSV schema carries no RSNR
      const std::uint64_t seed = derive_seed(
          config.seed, {kSaltFigure3, static_cast<std::uint64_t>(si), static_cast<std::uint64_t>(ki)});
      const CheckedRuns runs =
          run_trials_checked(topo, scheme, params, config.trials, seed, config.threads);
      const PointStats stats = aggregate(runs);
      run += config.trials;
      failed += runs.failed;
      const double ck = normalized_sparsity(k, N, config.block_len);
      const double gain = stats.mean_gain / config.baseline_overhead;
      rows.push_back(std::string(scheme_name(scheme)) + "," + fmt(ck) + "," + fmt(gain));
      if (log) {
        *log << "figure3 " << scheme_name(scheme) << " k=" << k << " l_i=" << params.head_budget
             << " gain=" << gain << "\n";
      }
    }
  }
  return write_outputs(config, "figure3", "figure3.csv", kFigure3Header, rows, run, failed);
}

RunOutcome run_figure4(const ExperimentConfig& config, std::ostream* log) {
  require_valid(config);
  const Topology topo = four_cluster_topology(config.sensors_per_cluster, config.figure4_epsilon);
  Scheme scheme = Scheme::kJocomcoPrecode;
  if (config.schemes.size() == 1) {
    scheme = *scheme_from_name(config.schemes.front());
  } else if (config.schemes.size() > 1) {
    throw std::invalid_argument("figure4 runs a single scheme; got " +
                                std::to_string(config.schemes.size()));
  }

  // One Monte-Carlo batch per rho; every threshold row reuses the same batch.
  std::vector<std::vector<double>> p_by_threshold(
      config.figure4_min_db.size(), std::vector<double>(config.figure4_rhos.size(), 0.0));
  long long run = 0;
  long long failed = 0;
  for (size_t ri = 0; ri < config.figure4_rhos.size(); ++ri) {
    SimParams params = base_params(config);
    params.mu = config.figure4_mu;
    params.rho = config.figure4_rhos[ri];
    const std::uint64_t seed = derive_seed(config.seed, {kSaltFigure4, static_cast<std::uint64_t>(ri)});
    const CheckedRuns runs =
        run_trials_checked(topo, scheme, params, config.trials, seed, config.threads);
    run += config.trials;
    failed += runs.failed;
    long long ok_count = 0;
    std::vector<double> sums(config.figure4_min_db.size(), 0.0);
    for (size_t i = 0; i < runs.results.size(); ++i) {
      if (!runs.ok[i]) continue;
      ++ok_count;
      for (size_t ti = 0; ti < config.figure4_min_db.size(); ++ti) {
        sums[ti] += runs.results[i].fraction_above(config.figure4_min_db[ti]);
      }
    }
    for (size_t ti = 0; ti < config.figure4_min_db.size(); ++ti) {
      p_by_threshold[ti][ri] = ok_count > 0 ? sums[ti] / static_cast<double>(ok_count) : 0.0;
    }
    if (log) {
      *log << "figure4 " << scheme_name(scheme) << " rho=" << params.rho;
      for (size_t ti = 0; ti < config.figure4_min_db.size(); ++ti) {
        *log << " p" << config.figure4_min_db[ti] << "=" << p_by_threshold[ti][ri];
      }
      *log << "\n";
    }
  }

  std::vector<std::string> rows;
  for (size_t ti = 0; ti < config.figure4_min_db.size(); ++ti) {
    for (size_t ri = 0; ri < config.figure4_rhos.size(); ++ri) {
      rows.push_back(fmt(config.figure4_min_db[ti]) + "," + fmt(config.figure4_rhos[ri]) + "," +
                     fmt(p_by_threshold[ti][ri]));
    }
  }
  return write_outputs(config, "figure4", "figure4.csv", kFigure4Header, rows, run, failed);
}

RunOutcome run_generic(const ExperimentConfig& config, std::ostream* log) {
  require_valid(config);
  const Topology topo = generic_topology(config);
  const std::vector<Scheme> schemes = resolve_schemes(
      config, std::vector<Scheme>(std::begin(kAllSchemes), std::end(kAllSchemes)));

  std::vector<std::string> rows;
  long long run = 0;
  long long failed = 0;
  for (size_t si = 0; si < schemes.size(); ++si) {
    const Scheme scheme = schemes[si];
    SimParams params = base_params(config);
    const std::uint64_t seed = derive_seed(config.seed, {kSaltGeneric, static_cast<std::uint64_t>(si)});
    const CheckedRuns runs =
        run_trials_checked(topo, scheme, params, config.trials, seed, config.threads);
    const PointStats stats = aggregate(runs);
    run += config.trials;
    failed += runs.failed;
    rows.push_back(std::string(scheme_name(scheme)) + "," + fmt(stats.mean_gain) + "," +
                   fmt(stats.p20) + "," + fmt(stats.p100) + "," + fmt(stats.mean_delivered) + "," +
                   fmt(stats.decode_failure_rate));
    if (log) {
      *log << "run " << scheme_name(scheme) << " gain=" << stats.mean_gain << " p20=" << stats.p20
           << " p100=" << stats.p100 << "\n";
    }
  }
  return write_outputs(config, "run", "run.csv", kGenericHeader, rows, run, failed);
}

}  // namespace jocomco
