#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jocomco/coding.hpp"
#include "jocomco/signal.hpp"

namespace jocomco {

// ---------------------------------------------------------------------------
// Topology. Heads form a DAG that drains into the sink; every other sensor is
// one (lossless) hop from its head. The first sensor of each cluster is the
// head. Inter-cluster links may erase packets.

inline constexpr int kSinkNode = -1;

struct LinkSpec {
  int from = 0;           // cluster index of the sending head
  int to = kSinkNode;     // cluster index of the receiving head, or kSinkNode
  double epsilon = 0.0;   // per-transmission erasure probability

  bool operator==(const LinkSpec&) const = default;
};

struct TopologyConfig {
  std::vector<int> cluster_sizes;  // sensors per cluster, head included
  std::vector<LinkSpec> links;

  bool operator==(const TopologyConfig&) const = default;
};

struct Topology {
  TopologyConfig config;
  int total_sensors = 0;
  std::vector<int> first_sensor;    // global index of each cluster's first sensor
  std::vector<std::vector<int>> out_links;  // cluster -> indices into config.links
  std::vector<int> hops_to_sink;    // shortest hop count per cluster head
  std::vector<int> head_order;      // clusters in upstream-to-downstream order
  long long baseline_transmissions = 0;  // uncompressed forwarding, counted per link

  int cluster_count() const { return static_cast<int>(config.cluster_sizes.size()); }
  int cluster_of_sensor(int sensor) const;
};

// Validates reachability, DAG-ness, erasure ranges and sizes; throws
// std::invalid_argument with a descriptive message on bad input.
Topology build_topology(const TopologyConfig& config);

// Convenience builders used by the presets and tests.
Topology single_cluster_topology(int sensor_count, double epsilon = 0.0);
// The default four-cluster shape: two outer heads each feed both mid heads,
// the two mid heads feed the sink (tree of clusters around a diamond core).
Topology four_cluster_topology(int sensors_per_cluster, double epsilon = 0.0);

// JSON round-trip for topology configs (documented schema, see README).
std::string topology_config_to_json(const TopologyConfig& config);
TopologyConfig topology_config_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Signals for one trial ("generation").

struct GenerationSpec {
  int block_len = 512;      // n
  int measurements = 64;    // m
  int sparsity = 5;         // temporal nonzeros AND hot patch count (see below)
  int patch_size = 1;       // sensors per spatial-correlation patch
  int hot_patches = -1;     // -1: use `sparsity`
  Basis basis = Basis::kIdentity;
  CoefficientLaw law = CoefficientLaw::kStandardNormal;
  NoiseSpec noise;
};

struct Generation {
  Eigen::MatrixXd readings;   // N x n, per-sensor noisy blocks
  Eigen::MatrixXd truth;      // N x n, clean blocks
  std::vector<int> patch_of;  // sensor -> patch index
  int patch_count = 0;
  std::vector<int> hot_patches;  // patches carrying signal this generation
};

// Sensors are partitioned into per-cluster patches of `patch_size` adjacent
// sensors. `hot_patches` patches observe latent JSM-2 blocks (one shared
// temporal support, per-patch coefficient values); sensors of a hot patch see
// the same block plus independent measurement noise; all other sensors read
// zero.
Generation generate_generation(const Topology& topo, const GenerationSpec& spec,
                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Schemes and trial parameters.

enum class Scheme {
  kOnlyNc,
  kOnlyTemporalCs,
  kSeparateNcCs,
  kJocomcoNoPrecode,
  kJocomcoPrecode,
};

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

struct SimParams {
  GenerationSpec gen;
  int head_budget = 32;     // l_i: coded packets each head originates
  double mu = 1.2;          // election safety factor (jocomco_precode)
  bool mu_from_solver = false;  // derive mu per cluster via solve_mu
  TrialsConvention mu_trials = TrialsConvention::kN;
  double rho = 1.0;         // per-link redundancy on lossy links, >= 1
  double separate_delivery_target = 0.95;  // election p for separate_nc_cs
  bool decode = true;       // run the sink decoder and fill RSNR fields
};

struct TrialResult {
  long long transmissions_total = 0;
  long long transmissions_baseline = 0;
  int payload_len = 0;
  int block_len = 0;
  double empirical_gain = 0.0;  // (total * payload) / (baseline * block_len)
  int delivered_packets = 0;
  bool shortfall = false;       // a head had fewer arrivals than its budget
  bool decode_attempted = false;
  bool decode_failed = false;   // all-or-nothing schemes: rank short of source count
  int spatial_flagged_columns = 0;
  std::vector<double> per_sensor_rsnr;  // NaN where the metric is undefined

  // Fraction of sensors with defined RSNR above the threshold.
  double fraction_above(double db) const;
};

// One append-only record per link transmission; enough to recount traffic.
struct TransmissionEvent {
  int link = -1;          // index into topology links, -1 for sensor uplinks
  int from_cluster = 0;
  long long send_index = 0;
  bool erased = false;
};

struct EventLog {
  std::vector<TransmissionEvent> events;
  // When capture_packets is set, the trial additionally stores every packet
  // that reached the sink plus the matrix of true per-sensor payloads (row s =
  // what sensor s would transmit), enabling external M*Y = U consistency
  // checks against the assembled effective operator.
  bool capture_packets = false;
  std::vector<Packet> delivered;
  Eigen::MatrixXd payload_truth;
};

TrialResult run_trial(const Topology& topo, Scheme scheme, const SimParams& params,
                      std::uint64_t trial_seed, EventLog* log = nullptr);

// Deterministic per-trial seeds derived from (master_seed, trial index); the
// result order never depends on thread scheduling.
std::vector<TrialResult> run_monte_carlo(const Topology& topo, Scheme scheme,
                                         const SimParams& params, int trials,
                                         std::uint64_t master_seed, int threads = 0);

// c*k with c = sqrt(1/N^2 + 1/n^2): sparsity normalized by both the spatial
// and the temporal dimension.
double normalized_sparsity(int k, int sensor_count, int block_len);

// Packet wire format (JSON), exercised by the decoder-regenerability tests.
std::string packet_to_json(const Packet& packet);
Packet packet_from_json(const std::string& text);

}  // namespace jocomco
