#include "jocomco/netsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "jocomco/decoder.hpp"

namespace jocomco {

namespace {

// Salt tags for seed derivation; arbitrary but fixed.
constexpr std::uint64_t kSaltTrial = 0x7452u;
constexpr std::uint64_t kSaltSupport = 0x5355u;
constexpr std::uint64_t kSaltHotPatch = 0x4850u;
constexpr std::uint64_t kSaltLatent = 0x4C54u;
constexpr std::uint64_t kSaltSensorNoise = 0x4E53u;
constexpr std::uint64_t kSaltPhi = 0x5048u;
constexpr std::uint64_t kSaltElection = 0x454Cu;
constexpr std::uint64_t kSaltIntra = 0x494Eu;
constexpr std::uint64_t kSaltForward = 0x4657u;
constexpr std::uint64_t kSaltLink = 0x4C4Bu;

}  // namespace

int Topology::cluster_of_sensor(int sensor) const {
  for (int c = cluster_count() - 1; c >= 0; --c) {
    if (sensor >= first_sensor[c]) return c;
  }
  throw std::out_of_range("cluster_of_sensor: negative index");
}

Topology build_topology(const TopologyConfig& config) {
  const int C = static_cast<int>(config.cluster_sizes.size());
  if (C == 0) throw std::invalid_argument("topology: no clusters");
  for (int size : config.cluster_sizes) {
    if (size < 1) throw std::invalid_argument("topology: cluster needs at least one sensor");
  }

  Topology topo;
  topo.config = config;
  topo.first_sensor.resize(C);
  for (int c = 0; c < C; ++c) {
    topo.first_sensor[c] = topo.total_sensors;
    topo.total_sensors += config.cluster_sizes[c];
  }

  topo.out_links.assign(C, {});
  std::vector<std::vector<int>> in_from(C);  // reversed head-graph adjacency
  std::vector<int> sink_feeders;
  for (size_t i = 0; i < config.links.size(); ++i) {
    const LinkSpec& link = config.links[i];
    if (link.from < 0 || link.from >= C) throw std::invalid_argument("topology: link.from out of range");
    if (link.to != kSinkNode && (link.to < 0 || link.to >= C)) {
      throw std::invalid_argument("topology: link.to out of range");
    }
    if (link.to == link.from) throw std::invalid_argument("topology: self link");
    if (!(link.epsilon >= 0.0 && link.epsilon < 1.0)) {
      throw std::invalid_argument("topology: epsilon must lie in [0, 1)");
    }
    topo.out_links[link.from].push_back(static_cast<int>(i));
    if (link.to == kSinkNode) {
      sink_feeders.push_back(link.from);
    } else {
      in_from[link.to].push_back(link.from);
    }
  }

  // Shortest hop counts to the sink (BFS over reversed links).
  topo.hops_to_sink.assign(C, -1);
  std::deque<int> queue;
  for (int c : sink_feeders) {
    if (topo.hops_to_sink[c] == -1) {
      topo.hops_to_sink[c] = 1;
      queue.push_back(c);
    }
  }
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (int up : in_from[c]) {
      if (topo.hops_to_sink[up] == -1) {
        topo.hops_to_sink[up] = topo.hops_to_sink[c] + 1;
        queue.push_back(up);
      }
    }
  }
  for (int c = 0; c < C; ++c) {
    if (topo.hops_to_sink[c] == -1) {
      throw std::invalid_argument("topology: cluster " + std::to_string(c) +
                                  " has no route to the sink");
    }
  }

  // Topological order of the head DAG (upstream first); rejects cycles.
  std::vector<int> indeg(C, 0);
  for (const LinkSpec& link : config.links) {
    if (link.to != kSinkNode) ++indeg[link.to];
  }
  std::deque<int> ready;
  for (int c = 0; c < C; ++c) {
    if (indeg[c] == 0) ready.push_back(c);
  }
  while (!ready.empty()) {
    const int c = ready.front();
    ready.pop_front();
    topo.head_order.push_back(c);
    for (int li : topo.out_links[c]) {
      const int to = config.links[li].to;
      if (to != kSinkNode && --indeg[to] == 0) ready.push_back(to);
    }
  }
  if (static_cast<int>(topo.head_order.size()) != C) {
    throw std::invalid_argument("topology: head graph has a cycle");
  }

  for (int c = 0; c < C; ++c) {
    topo.baseline_transmissions += config.cluster_sizes[c] - 1;  // sensor uplinks
    topo.baseline_transmissions +=
        static_cast<long long>(config.cluster_sizes[c]) * topo.hops_to_sink[c];
  }
  return topo;
}

Topology single_cluster_topology(int sensor_count, double epsilon) {
  TopologyConfig config;
  config.cluster_sizes = {sensor_count};
  config.links = {{0, kSinkNode, epsilon}};
  return build_topology(config);
}

Topology four_cluster_topology(int sensors_per_cluster, double epsilon) {
  TopologyConfig config;
  config.cluster_sizes.assign(4, sensors_per_cluster);
  // Clusters 1 and 2 are the mid heads feeding the sink; 0 and 3 are outer
  // heads that split their traffic across both mids.
  config.links = {
      {0, 1, epsilon}, {0, 2, epsilon},
      {3, 1, epsilon}, {3, 2, epsilon},
      {1, kSinkNode, epsilon}, {2, kSinkNode, epsilon},
  };
  return build_topology(config);
}

std::string topology_config_to_json(const TopologyConfig& config) {
  nlohmann::json j;
  j["clusters"] = nlohmann::json::array();
  for (int size : config.cluster_sizes) j["clusters"].push_back({{"sensors", size}});
  j["links"] = nlohmann::json::array();
  for (const LinkSpec& link : config.links) {
    nlohmann::json lj;
    lj["from"] = link.from;
    if (link.to == kSinkNode) {
      lj["to"] = "sink";
    } else {
      lj["to"] = link.to;
    }
    lj["epsilon"] = link.epsilon;
    j["links"].push_back(lj);
  }
  return j.dump(2);
}

TopologyConfig topology_config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TopologyConfig config;
  if (!j.contains("clusters") || !j["clusters"].is_array()) {
    throw std::invalid_argument("topology json: missing clusters array");
  }
  for (const auto& cj : j["clusters"]) {
    config.cluster_sizes.push_back(cj.at("sensors").get<int>());
  }
  for (const auto& lj : j.value("links", nlohmann::json::array())) {
    LinkSpec link;
    link.from = lj.at("from").get<int>();
    const auto& to = lj.at("to");
    link.to = to.is_string() ? kSinkNode : to.get<int>();
    if (to.is_string() && to.get<std::string>() != "sink") {
      throw std::invalid_argument("topology json: link.to must be a cluster index or \"sink\"");
    }
    link.epsilon = lj.value("epsilon", 0.0);
    config.links.push_back(link);
  }
  return config;
}

// ---------------------------------------------------------------------------

Generation generate_generation(const Topology& topo, const GenerationSpec& spec,
                               std::uint64_t seed) {
  const int N = topo.total_sensors;
  if (spec.patch_size < 1) throw std::invalid_argument("generation: patch_size must be >= 1");

  Generation gen;
  gen.patch_of.resize(N);
  for (int c = 0; c < topo.cluster_count(); ++c) {
    const int first = topo.first_sensor[c];
    const int size = topo.config.cluster_sizes[c];
    for (int s = 0; s < size; ++s) {
      // Patches never straddle cluster boundaries.
      gen.patch_of[first + s] = gen.patch_count + s / spec.patch_size;
    }
    gen.patch_count += (size + spec.patch_size - 1) / spec.patch_size;
  }

  const int hot = spec.hot_patches < 0 ? spec.sparsity : spec.hot_patches;
  if (hot < 0 || hot > gen.patch_count) {
    throw std::invalid_argument("generation: hot patch count outside [0, patches]");
  }

  // Draw the hot patches (partial Fisher-Yates).
  std::vector<int> ids(gen.patch_count);
  for (int i = 0; i < gen.patch_count; ++i) ids[i] = i;
  Rng patch_rng(derive_seed(seed, {kSaltHotPatch}));
  for (int i = 0; i < hot; ++i) {
    const int j = i + static_cast<int>(patch_rng.next_below(gen.patch_count - i));
    std::swap(ids[i], ids[j]);
  }
  gen.hot_patches.assign(ids.begin(), ids.begin() + hot);
  std::sort(gen.hot_patches.begin(), gen.hot_patches.end());

  // One latent block per hot patch; all latents share the generation's
  // temporal support (JSM-2 across patches).
  SparsityModel model;
  model.block_len = spec.block_len;
  model.sparsity = spec.sparsity;
  model.basis = spec.basis;
  model.law = spec.law;
  model.support_seed = derive_seed(seed, {kSaltSupport});
  const NoiseSpec no_noise;  // noise is added per sensor below
  const std::vector<SignalBlock> latents =
      generate_cluster_signals(model, no_noise, 0, hot, derive_seed(seed, {kSaltLatent}));

  gen.readings = Eigen::MatrixXd::Zero(N, spec.block_len);
  gen.truth = Eigen::MatrixXd::Zero(N, spec.block_len);
  std::vector<int> latent_of(gen.patch_count, -1);
  for (int i = 0; i < hot; ++i) latent_of[gen.hot_patches[i]] = i;

  Rng noise_rng(derive_seed(seed, {kSaltSensorNoise}));
  for (int s = 0; s < N; ++s) {
    const int li = latent_of[gen.patch_of[s]];
    if (li < 0) continue;
    gen.truth.row(s) = latents[li].clean.transpose();
    if (spec.noise.enabled) {
      gen.readings.row(s) =
          add_noise(latents[li].clean, spec.noise.snr_db, noise_rng).transpose();
    } else {
      gen.readings.row(s) = latents[li].clean.transpose();
    }
  }
  return gen;
}

// ---------------------------------------------------------------------------

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kOnlyNc: return "only_nc";
    case Scheme::kOnlyTemporalCs: return "only_temporal_cs";
    case Scheme::kSeparateNcCs: return "separate_nc_cs";
    case Scheme::kJocomcoNoPrecode: return "jocomco_no_precode";
    case Scheme::kJocomcoPrecode: return "jocomco_precode";
  }
  return "?";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
  for (Scheme s : {Scheme::kOnlyNc, Scheme::kOnlyTemporalCs, Scheme::kSeparateNcCs,
                   Scheme::kJocomcoNoPrecode, Scheme::kJocomcoPrecode}) {
    if (name == scheme_name(s)) return s;
  }
  return std::nullopt;
}

double TrialResult::fraction_above(double db) const {
  long long defined = 0;
  long long above = 0;
  for (double v : per_sensor_rsnr) {
    if (std::isnan(v)) continue;
    ++defined;
    if (v > db) ++above;
  }
  return defined == 0 ? 0.0 : static_cast<double>(above) / static_cast<double>(defined);
}

namespace {

struct LinkState {
  Rng rng;
  long long sends = 0;
};

// Everything a single trial needs, grouped so helper functions stay short.
struct TrialContext {
  const Topology& topo;
  Scheme scheme;
  const SimParams& params;
  std::uint64_t seed;
  EventLog* log;

  bool with_payloads;
  int payload_len;
  long long transmissions = 0;
  std::vector<LinkState> links;
  std::vector<std::vector<Packet>> transit;  // per cluster, arrivals from upstream
  std::vector<Packet> delivered;             // packets that reached the sink
  bool shortfall = false;

  TrialContext(const Topology& t, Scheme s, const SimParams& p, std::uint64_t sd, EventLog* lg)
      : topo(t), scheme(s), params(p), seed(sd), log(lg) {
    with_payloads = params.decode;
    payload_len = scheme == Scheme::kOnlyNc ? params.gen.block_len : params.gen.measurements;
    links.reserve(topo.config.links.size());
    for (size_t i = 0; i < topo.config.links.size(); ++i) {
      links.push_back(LinkState{Rng(derive_seed(sd, {kSaltLink, i})), 0});
    }
    transit.resize(topo.cluster_count());
  }

  void count_uplink(int cluster) {
    ++transmissions;
    if (log) log->events.push_back({-1, cluster, transmissions, false});
  }

  // Send one packet over a head-graph link; returns false when erased.
  bool send(int link_index, Packet&& pkt) {
    const LinkSpec& spec = topo.config.links[link_index];
    LinkState& state = links[link_index];
    const bool erased = state.rng.next_bernoulli(spec.epsilon);
    ++state.sends;
    ++transmissions;  // erased transmissions are still spent energy
    if (log) log->events.push_back({link_index, spec.from, state.sends, erased});
    if (erased) return false;
    if (spec.to == kSinkNode) {
      delivered.push_back(std::move(pkt));
    } else {
      transit[spec.to].push_back(std::move(pkt));
    }
    return true;
  }
};

bool uses_election(Scheme s) {
  return s == Scheme::kSeparateNcCs || s == Scheme::kJocomcoPrecode;
}

// Per-cluster election probability for the given scheme.
double scheme_election_p(const TrialContext& ctx, int cluster) {
  const int size = ctx.topo.config.cluster_sizes[cluster];
  if (ctx.scheme == Scheme::kSeparateNcCs) return ctx.params.separate_delivery_target;
  int budget = std::min(ctx.params.head_budget, size);
  if (ctx.params.mu_from_solver) {
    return solve_mu(size, std::max(2, budget), ctx.params.mu_trials).p;
  }
  return election_probability(ctx.params.mu, budget, size);
}

}  // namespace

TrialResult run_trial(const Topology& topo, Scheme scheme, const SimParams& params,
                      std::uint64_t trial_seed, EventLog* log) {
  if (params.rho < 1.0) throw std::invalid_argument("run_trial: rho must be >= 1");
  const int C = topo.cluster_count();
  const int N = topo.total_sensors;
  const int n = params.gen.block_len;
  const int m = params.gen.measurements;

  TrialContext ctx(topo, scheme, params, trial_seed, log);

  Generation gen;
  Eigen::MatrixXd phi;
  if (ctx.with_payloads) {
    gen = generate_generation(topo, params.gen, derive_seed(trial_seed, {kSaltTrial}));
    if (scheme != Scheme::kOnlyNc) {
      phi = realize(make_temporal_code(m, n, derive_seed(trial_seed, {kSaltPhi})).phi);
    }
  }

  // --- Sensor stage: election and uplink transmissions. --------------------
  std::vector<std::vector<Packet>> head_arrivals(C);
  for (int c = 0; c < C; ++c) {
    const int size = topo.config.cluster_sizes[c];
    std::vector<int> senders;
    if (uses_election(scheme)) {
      Rng rng(derive_seed(trial_seed, {kSaltElection, static_cast<std::uint64_t>(c)}));
      senders = elect_transmitters(size, scheme_election_p(ctx, c), rng);
    } else {
      senders.resize(size);
      for (int s = 0; s < size; ++s) senders[s] = s;
    }
    head_arrivals[c].reserve(senders.size());
    for (int local : senders) {
      const int global = topo.first_sensor[c] + local;
      Packet pkt;
      auto leaf = std::make_shared<Descriptor>();
      leaf->origin_sensor = global;
      pkt.desc = std::move(leaf);
      if (ctx.with_payloads) {
        pkt.payload = scheme == Scheme::kOnlyNc
                          ? Eigen::VectorXd(gen.readings.row(global).transpose())
                          : temporal_compress(phi, gen.readings.row(global).transpose());
      } else {
        pkt.payload = Eigen::VectorXd(0);
      }
      // The head's own reading reaches it without a link transmission.
      if (local != 0) ctx.count_uplink(c);
      head_arrivals[c].push_back(std::move(pkt));
    }
  }

  // --- Head stage: per-cluster coding. --------------------------------------
  std::vector<std::vector<Packet>> own_coded(C);
  for (int c = 0; c < C; ++c) {
    const auto& arrivals = head_arrivals[c];
    const std::uint64_t seed = derive_seed(trial_seed, {kSaltIntra, static_cast<std::uint64_t>(c)});
    switch (scheme) {
      case Scheme::kOnlyTemporalCs:
        own_coded[c] = arrivals;  // store and forward
        break;
      case Scheme::kOnlyNc:
      case Scheme::kSeparateNcCs:
        // Classical rank-preserving network coding over whatever arrived.
        own_coded[c] = intra_cluster_encode(arrivals, static_cast<int>(arrivals.size()), seed);
        break;
      case Scheme::kJocomcoNoPrecode:
      case Scheme::kJocomcoPrecode: {
        const int budget = std::min(params.head_budget, topo.config.cluster_sizes[c]);
        if (static_cast<int>(arrivals.size()) < budget) ctx.shortfall = true;
        const int l_out = std::min<int>(budget, static_cast<int>(arrivals.size()));
        own_coded[c] = intra_cluster_encode(arrivals, l_out, seed);
        break;
      }
    }
  }

  // --- Forwarding plan: per-cluster outgoing packet counts at rho = 1. ------
  std::vector<long long> plan(C, 0);
  std::vector<std::vector<long long>> plan_flow(C);  // aligned with out_links
  for (int c : topo.head_order) {
    plan[c] += static_cast<long long>(own_coded[c].size());
    const auto& outs = topo.out_links[c];
    plan_flow[c].assign(outs.size(), 0);
    if (outs.empty()) continue;  // unreachable by validation
    const long long base = plan[c] / static_cast<long long>(outs.size());
    long long extra = plan[c] % static_cast<long long>(outs.size());
    for (size_t j = 0; j < outs.size(); ++j) {
      plan_flow[c][j] = base + (extra > 0 ? 1 : 0);
      if (extra > 0) --extra;
      const int to = topo.config.links[outs[j]].to;
      if (to != kSinkNode) plan[to] += plan_flow[c][j];
    }
  }

  // --- Forwarding: recombine and transmit in upstream-to-downstream order. --
  for (int c : topo.head_order) {
    const auto& outs = topo.out_links[c];
    std::vector<long long> sends(outs.size());
    long long total_sends = 0;
    for (size_t j = 0; j < outs.size(); ++j) {
      const LinkSpec& link = topo.config.links[outs[j]];
      sends[j] = link.epsilon > 0.0
                     ? static_cast<long long>(std::ceil(static_cast<double>(plan_flow[c][j]) * params.rho))
                     : plan_flow[c][j];
      total_sends += sends[j];
    }

    std::vector<Packet> outgoing;
    if (scheme == Scheme::kOnlyTemporalCs) {
      // Plain store-and-forward: copies, no recombination, no redundancy.
      outgoing = std::move(own_coded[c]);
      for (Packet& pkt : ctx.transit[c]) outgoing.push_back(std::move(pkt));
      long long idx = 0;
      for (Packet& pkt : outgoing) {
        ctx.send(outs[static_cast<size_t>(idx % static_cast<long long>(outs.size()))],
                 std::move(pkt));
        ++idx;
      }
      continue;
    }

    const bool had_transit = !ctx.transit[c].empty();
    std::vector<Packet> inputs = std::move(own_coded[c]);
    for (Packet& pkt : ctx.transit[c]) inputs.push_back(std::move(pkt));
    if (!had_transit && total_sends == static_cast<long long>(inputs.size())) {
      // Nothing to mix in and no extra redundancy needed: ship as coded.
      outgoing = std::move(inputs);
    } else {
      outgoing = inter_cluster_recombine(
          inputs, static_cast<int>(total_sends),
          derive_seed(trial_seed, {kSaltForward, static_cast<std::uint64_t>(c)}));
    }

    size_t next = 0;
    for (size_t j = 0; j < outs.size(); ++j) {
      for (long long t = 0; t < sends[j] && next < outgoing.size(); ++t, ++next) {
        ctx.send(outs[j], std::move(outgoing[next]));
      }
    }
  }

  if (log && log->capture_packets) {
    log->delivered = ctx.delivered;
    log->payload_truth.resize(0, 0);
    if (ctx.with_payloads) {
      log->payload_truth = Eigen::MatrixXd::Zero(N, ctx.payload_len);
      for (int s = 0; s < N; ++s) {
        log->payload_truth.row(s) =
            scheme == Scheme::kOnlyNc
                ? gen.readings.row(s)
                : (phi * gen.readings.row(s).transpose()).transpose().eval();
      }
    }
  }

  // --- Result assembly and sink decode. --------------------------------------
  TrialResult result;
  result.transmissions_total = ctx.transmissions;
  result.transmissions_baseline = topo.baseline_transmissions;
  result.payload_len = ctx.payload_len;
  result.block_len = n;
  result.empirical_gain =
      static_cast<double>(result.transmissions_total * ctx.payload_len) /
      static_cast<double>(result.transmissions_baseline * static_cast<long long>(n));
  result.delivered_packets = static_cast<int>(ctx.delivered.size());
  result.shortfall = ctx.shortfall;
  if (!params.decode) return result;

  result.decode_attempted = true;

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N, n);
  // All-or-nothing short circuit: without N delivered packets classical NC
  // cannot decode anything, so skip the operator assembly outright.
  if (scheme == Scheme::kOnlyNc && result.delivered_packets < N) {
    result.decode_failed = true;
    result.per_sensor_rsnr = evaluate_rsnr(gen.truth, X);
    return result;
  }

  std::vector<DescriptorPtr> descs;
  descs.reserve(ctx.delivered.size());
  Eigen::MatrixXd U(static_cast<Eigen::Index>(ctx.delivered.size()), ctx.payload_len);
  for (size_t i = 0; i < ctx.delivered.size(); ++i) {
    descs.push_back(ctx.delivered[i].desc);
    U.row(static_cast<Eigen::Index>(i)) = ctx.delivered[i].payload.transpose();
  }
  const Eigen::MatrixXd M = assemble_effective_operator(descs, N);

  if (scheme == Scheme::kOnlyNc) {
    SpatialDecodeConfig cfg;
    cfg.mode = SpatialMode::kLeastSquares;
    const SpatialDecodeResult sol = spatial_decode(M, U, cfg);
    if (sol.rank_deficient) {
      result.decode_failed = true;
    } else {
      X = sol.Y;
    }
  } else {
    SpatialDecodeConfig cfg;
    if (scheme == Scheme::kJocomcoNoPrecode || scheme == Scheme::kJocomcoPrecode) {
      cfg.mode = SpatialMode::kPatchOmp;
      cfg.patch_of = gen.patch_of;
      cfg.patch_count = gen.patch_count;
      cfg.k_spatial = static_cast<int>(gen.hot_patches.size());
    } else {
      cfg.mode = SpatialMode::kLeastSquares;
    }
    const SpatialDecodeResult sol = spatial_decode(M, U, cfg);
    result.spatial_flagged_columns = sol.flagged_columns;

    // Temporal stage. Identical rows (patch siblings) are decoded once.
    TemporalDecodeConfig tcfg;
    tcfg.sparsity = params.gen.sparsity;
    tcfg.basis = params.gen.basis;
    std::vector<int> patch_done(gen.patch_count, -1);
    for (int s = 0; s < N; ++s) {
      if (sol.Y.row(s).norm() == 0.0) continue;
      const int p = gen.patch_of[s];
      if (cfg.mode == SpatialMode::kPatchOmp && patch_done[p] >= 0) {
        X.row(s) = X.row(patch_done[p]);
        continue;
      }
      X.row(s) = temporal_decode(phi, sol.Y.row(s).transpose(), tcfg).transpose();
      if (cfg.mode == SpatialMode::kPatchOmp) patch_done[p] = s;
    }
  }

  result.per_sensor_rsnr = evaluate_rsnr(gen.truth, X);
  return result;
}

std::vector<TrialResult> run_monte_carlo(const Topology& topo, Scheme scheme,
                                         const SimParams& params, int trials,
                                         std::uint64_t master_seed, int threads) {
  if (trials < 0) throw std::invalid_argument("run_monte_carlo: negative trial count");
  std::vector<TrialResult> results(static_cast<size_t>(trials));
  if (trials == 0) return results;

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
  workers = std::min(workers, trials);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= trials) break;
      const std::uint64_t seed = derive_seed(master_seed, {kSaltTrial, static_cast<std::uint64_t>(i)});
      results[static_cast<size_t>(i)] = run_trial(topo, scheme, params, seed, nullptr);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

double normalized_sparsity(int k, int sensor_count, int block_len) {
  const double a = 1.0 / static_cast<double>(sensor_count);
  const double b = 1.0 / static_cast<double>(block_len);
  return k * std::sqrt(a * a + b * b);
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json descriptor_to_json(const Descriptor& d) {
  if (d.is_leaf()) return nlohmann::json{{"sensor", d.origin_sensor}};
  nlohmann::json j;
  j["spec"] = {{"rows", d.spec.rows},
               {"cols", d.spec.cols},
               {"law", d.spec.law == EntryLaw::kGaussian ? "gaussian" : "rademacher"},
               {"seed", d.spec.seed}};
  j["row"] = d.row;
  j["children"] = nlohmann::json::array();
  for (const DescriptorPtr& c : d.children) j["children"].push_back(descriptor_to_json(*c));
  return j;
}

DescriptorPtr descriptor_from_json(const nlohmann::json& j) {
  auto d = std::make_shared<Descriptor>();
  if (j.contains("sensor")) {
    d->origin_sensor = j.at("sensor").get<int>();
    return d;
  }
  const auto& sj = j.at("spec");
  d->spec.rows = sj.at("rows").get<int>();
  d->spec.cols = sj.at("cols").get<int>();
  d->spec.law = sj.at("law").get<std::string>() == "gaussian" ? EntryLaw::kGaussian
                                                              : EntryLaw::kRademacher;
  d->spec.seed = sj.at("seed").get<std::uint64_t>();
  d->row = j.at("row").get<int>();
  for (const auto& cj : j.at("children")) d->children.push_back(descriptor_from_json(cj));
  return d;
}

}  // namespace

std::string packet_to_json(const Packet& packet) {
  nlohmann::json j;
  j["payload"] = std::vector<double>(packet.payload.data(),
                                     packet.payload.data() + packet.payload.size());
  if (!packet.desc) throw std::invalid_argument("packet_to_json: packet without descriptor");
  j["desc"] = descriptor_to_json(*packet.desc);
  return j.dump();
}

Packet packet_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Packet pkt;
  const auto values = j.at("payload").get<std::vector<double>>();
  pkt.payload = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                  static_cast<Eigen::Index>(values.size()));
  pkt.desc = descriptor_from_json(j.at("desc"));
  return pkt;
}

}  // namespace jocomco
