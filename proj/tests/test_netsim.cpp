#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "jocomco/netsim.hpp"

using namespace jocomco;

namespace {

SimParams structural_params(int block_len, int measurements, int head_budget) {
  SimParams p;
  p.gen.block_len = block_len;
  p.gen.measurements = measurements;
  p.head_budget = head_budget;
  p.decode = false;
  return p;
}

}  // namespace

TEST_SUITE("netsim") {

TEST_CASE("topology validation rejects malformed configs") {
  TopologyConfig empty;
  CHECK_THROWS_AS(build_topology(empty), std::invalid_argument);

  TopologyConfig zero_cluster{{4, 0}, {{0, kSinkNode, 0.0}, {1, kSinkNode, 0.0}}};
  CHECK_THROWS_AS(build_topology(zero_cluster), std::invalid_argument);

  TopologyConfig bad_from{{4}, {{1, kSinkNode, 0.0}}};
  CHECK_THROWS_AS(build_topology(bad_from), std::invalid_argument);

  TopologyConfig self_link{{4, 4}, {{0, 0, 0.0}, {1, kSinkNode, 0.0}}};
  CHECK_THROWS_AS(build_topology(self_link), std::invalid_argument);

  TopologyConfig bad_eps{{4}, {{0, kSinkNode, 1.0}}};
  CHECK_THROWS_AS(build_topology(bad_eps), std::invalid_argument);

  TopologyConfig unreachable{{4, 4}, {{0, kSinkNode, 0.0}}};  // cluster 1 stranded
  CHECK_THROWS_AS(build_topology(unreachable), std::invalid_argument);

  TopologyConfig cycle{{4, 4}, {{0, 1, 0.0}, {1, 0, 0.0}, {0, kSinkNode, 0.0}, {1, kSinkNode, 0.0}}};
  CHECK_THROWS_AS(build_topology(cycle), std::invalid_argument);
}

TEST_CASE("builders produce the documented shapes and baselines") {
  const Topology single = single_cluster_topology(512);
  CHECK(single.total_sensors == 512);
  CHECK(single.hops_to_sink == std::vector<int>{1});
  CHECK(single.baseline_transmissions == 1023);  // 511 uplinks + 512 forwards

  const Topology four = four_cluster_topology(64);
  CHECK(four.total_sensors == 256);
  CHECK(four.first_sensor == std::vector<int>{0, 64, 128, 192});
  CHECK(four.hops_to_sink == std::vector<int>{2, 1, 1, 2});
  // 4 * 63 uplinks + 64 * (2 + 1 + 1 + 2) multi-hop forwards
  CHECK(four.baseline_transmissions == 636);
  CHECK(four_cluster_topology(128).baseline_transmissions == 1276);

  // Outer clusters (0 and 3) come before the mids (1 and 2) in drain order.
  const auto& order = four.head_order;
  const auto pos = [&](int c) {
    return std::find(order.begin(), order.end(), c) - order.begin();
  };
  CHECK(pos(0) < pos(1));
  CHECK(pos(0) < pos(2));
  CHECK(pos(3) < pos(1));
  CHECK(pos(3) < pos(2));

  CHECK(four.cluster_of_sensor(0) == 0);
  CHECK(four.cluster_of_sensor(63) == 0);
  CHECK(four.cluster_of_sensor(64) == 1);
  CHECK(four.cluster_of_sensor(255) == 3);
}

TEST_CASE("topology config json round trip") {
  const TopologyConfig config = four_cluster_topology(8, 0.25).config;
  const TopologyConfig parsed = topology_config_from_json(topology_config_to_json(config));
  CHECK(parsed == config);
  CHECK_THROWS(topology_config_from_json("not json"));
}

TEST_CASE("generation respects patches, clusters and the noise model") {
  const Topology topo = four_cluster_topology(8);
  GenerationSpec spec;
  spec.block_len = 32;
  spec.measurements = 8;
  spec.sparsity = 2;   // also the hot patch count
  spec.patch_size = 4;
  spec.noise = NoiseSpec{true, 150.0};
  const Generation gen = generate_generation(topo, spec, 77);

  REQUIRE(gen.patch_of.size() == 32);
  CHECK(gen.patch_count == 8);  // two patches per 8-sensor cluster
  for (int s = 0; s < 32; ++s) {
    CHECK(gen.patch_of[s] == s / 4);  // adjacency, never straddling a cluster
  }

  REQUIRE(gen.hot_patches.size() == 2);
  const std::set<int> hot(gen.hot_patches.begin(), gen.hot_patches.end());
  CHECK(hot.size() == 2);

  for (int s = 0; s < 32; ++s) {
    const bool is_hot = hot.count(gen.patch_of[s]) > 0;
    if (is_hot) {
      CHECK(gen.truth.row(s).norm() > 0.0);
      // Every member of a hot patch observes the same latent block...
      const int first = gen.patch_of[s] * 4;
      CHECK(gen.truth.row(s) == gen.truth.row(first));
      // ...plus tiny independent noise at 150 dB.
      const double err = (gen.readings.row(s) - gen.truth.row(s)).norm();
      CHECK(err > 0.0);
      CHECK(err < 1e-5 * gen.truth.row(s).norm());
    } else {
      CHECK(gen.truth.row(s).norm() == 0.0);
      CHECK(gen.readings.row(s).norm() == 0.0);
    }
  }

  // Distinct hot patches carry distinct latent blocks.
  const int pa = gen.hot_patches[0] * 4, pb = gen.hot_patches[1] * 4;
  CHECK(gen.truth.row(pa) != gen.truth.row(pb));

  // Determinism in the trial seed.
  const Generation again = generate_generation(topo, spec, 77);
  CHECK(again.readings == gen.readings);
  const Generation other = generate_generation(topo, spec, 78);
  CHECK(other.readings != gen.readings);
}

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::kOnlyNc, Scheme::kOnlyTemporalCs, Scheme::kSeparateNcCs,
                   Scheme::kJocomcoNoPrecode, Scheme::kJocomcoPrecode}) {
    auto back = scheme_from_name(scheme_name(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
  CHECK_FALSE(scheme_from_name("bogus").has_value());
}

TEST_CASE("lossless single-cluster gains match the closed forms exactly") {
  const Topology topo = single_cluster_topology(512);
  const SimParams params = structural_params(512, 64, 64);

  const TrialResult joint = run_trial(topo, Scheme::kJocomcoNoPrecode, params, 3);
  CHECK(joint.transmissions_total == 575);  // 511 uplinks + 64 coded packets
  CHECK(joint.transmissions_baseline == 1023);
  CHECK(joint.empirical_gain == jocomco_gain(512, 64, 64, 512));

  const TrialResult temporal = run_trial(topo, Scheme::kOnlyTemporalCs, params, 3);
  CHECK(temporal.transmissions_total == 1023);
  CHECK(temporal.empirical_gain == 0.125);

  const TrialResult nconly = run_trial(topo, Scheme::kOnlyNc, params, 3);
  CHECK(nconly.transmissions_total == 1023);
  CHECK(nconly.payload_len == 512);
  CHECK(nconly.empirical_gain == 1.0);

  CHECK_THROWS_AS(run_trial(topo, Scheme::kOnlyNc, [] {
    SimParams p;
    p.rho = 0.5;
    return p;
  }(), 3), std::invalid_argument);
}

TEST_CASE("event log counts every transmission and every delivery") {
  const Topology topo = four_cluster_topology(64, 0.1);
  SimParams params = structural_params(128, 16, 16);
  params.rho = 1.5;

  EventLog log;
  const TrialResult res = run_trial(topo, Scheme::kJocomcoNoPrecode, params, 9, &log);
  CHECK(static_cast<long long>(log.events.size()) == res.transmissions_total);

  // Per-link counts follow the deterministic redundancy plan: each outer head
  // splits 16 coded packets across two links (plan 8, sends ceil(8*1.5) = 12);
  // each mid head carries 16 own + 8 + 8 transit (plan 32, sends 48).
  std::vector<int> per_link(topo.config.links.size(), 0);
  int uplinks = 0, delivered = 0;
  for (const auto& ev : log.events) {
    if (ev.link < 0) {
      ++uplinks;
      CHECK_FALSE(ev.erased);  // intra-cluster hops are lossless
    } else {
      ++per_link[ev.link];
      if (!ev.erased && topo.config.links[ev.link].to == kSinkNode) ++delivered;
    }
  }
  CHECK(uplinks == 4 * 63);
  CHECK(per_link == std::vector<int>{12, 12, 12, 12, 48, 48});
  CHECK(res.transmissions_total == 252 + 4 * 12 + 2 * 48);
  CHECK(delivered == res.delivered_packets);
}

TEST_CASE("erasures occur at the configured rate") {
  const Topology topo = four_cluster_topology(64, 0.2);
  SimParams params = structural_params(128, 16, 64);
  params.rho = 1.5;

  long long sends = 0, erased = 0;
  for (int t = 0; t < 4; ++t) {
    EventLog log;
    run_trial(topo, Scheme::kOnlyNc, params, 100 + t, &log);
    for (const auto& ev : log.events) {
      if (ev.link >= 0) {
        ++sends;
        if (ev.erased) ++erased;
      }
    }
  }
  const double frac = static_cast<double>(erased) / static_cast<double>(sends);
  const double sigma = std::sqrt(0.2 * 0.8 / static_cast<double>(sends));
  CHECK(std::abs(frac - 0.2) < 4.0 * sigma);
}

TEST_CASE("all-or-nothing scheme fails to decode under heavy loss") {
  const Topology topo = four_cluster_topology(8, 0.4);
  SimParams params;
  params.gen.block_len = 32;
  params.gen.measurements = 8;
  params.gen.sparsity = 2;
  params.gen.patch_size = 4;
  params.head_budget = 8;
  params.decode = true;

  const TrialResult res = run_trial(topo, Scheme::kOnlyNc, params, 21);
  CHECK(res.decode_attempted);
  CHECK(res.decode_failed);
  CHECK(res.delivered_packets < topo.total_sensors);
  CHECK(res.fraction_above(20.0) == 0.0);
}

TEST_CASE("precode shortfall is flagged when the election under-delivers") {
  const Topology topo = single_cluster_topology(64);
  SimParams params = structural_params(64, 16, 32);
  params.mu = 0.2;  // deliberately starves the election
  const TrialResult res = run_trial(topo, Scheme::kJocomcoPrecode, params, 5);
  CHECK(res.shortfall);
  CHECK(res.transmissions_total < 63 + 32);

  params.mu = 1.4;
  const TrialResult ok = run_trial(topo, Scheme::kJocomcoPrecode, params, 5);
  CHECK_FALSE(ok.shortfall);
}

TEST_CASE("monte carlo results are independent of the thread count") {
  const Topology topo = four_cluster_topology(16);
  SimParams params;
  params.gen.block_len = 64;
  params.gen.measurements = 16;
  params.gen.sparsity = 2;
  params.gen.patch_size = 4;
  params.gen.noise = NoiseSpec{true, 150.0};
  params.head_budget = 8;
  params.mu = 1.4;
  params.decode = true;

  const auto seq = run_monte_carlo(topo, Scheme::kJocomcoPrecode, params, 8, 5, 1);
  const auto par = run_monte_carlo(topo, Scheme::kJocomcoPrecode, params, 8, 5, 4);
  REQUIRE(seq.size() == par.size());
  for (size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].transmissions_total == par[i].transmissions_total);
    CHECK(seq[i].empirical_gain == par[i].empirical_gain);
    REQUIRE(seq[i].per_sensor_rsnr.size() == par[i].per_sensor_rsnr.size());
    for (size_t s = 0; s < seq[i].per_sensor_rsnr.size(); ++s) {
      const double a = seq[i].per_sensor_rsnr[s], b = par[i].per_sensor_rsnr[s];
      CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }
  }
}

TEST_CASE("mean gain is stable across master seeds") {
  const Topology topo = four_cluster_topology(64);
  SimParams params = structural_params(256, 32, 16);
  params.mu = 1.2;
  const auto mean_gain = [&](std::uint64_t seed) {
    const auto rs = run_monte_carlo(topo, Scheme::kJocomcoPrecode, params, 40, seed, 0);
    double sum = 0.0;
    for (const auto& r : rs) sum += r.empirical_gain;
    return sum / static_cast<double>(rs.size());
  };
  CHECK(std::abs(mean_gain(1) - mean_gain(2)) < 0.02);
}

TEST_CASE("normalized sparsity") {
  CHECK(normalized_sparsity(3, 4, 3) == 1.25);  // 3 * sqrt(1/16 + 1/9) exactly
  CHECK(normalized_sparsity(5, 512, 512) ==
        doctest::Approx(0.0138107).epsilon(1e-4));
}

TEST_CASE("packet wire format round trips") {
  Rng rng(8);
  std::vector<Packet> leaves;
  for (int i = 0; i < 3; ++i) {
    Packet p;
    p.payload = Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) {
      return rng.next_gaussian();
    });
    auto d = std::make_shared<Descriptor>();
    d->origin_sensor = i;
    p.desc = std::move(d);
    leaves.push_back(std::move(p));
  }
  const auto coded = inter_cluster_recombine(intra_cluster_encode(leaves, 2, 3), 2, 4);
  const Packet parsed = packet_from_json(packet_to_json(coded[1]));
  CHECK(parsed.payload == coded[1].payload);
  CHECK(effective_row(*parsed.desc, 3) == effective_row(*coded[1].desc, 3));
  CHECK(parsed.desc->spec == coded[1].desc->spec);
  CHECK(parsed.desc->row == coded[1].desc->row);

  Packet null_desc;
  null_desc.payload = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(packet_to_json(null_desc), std::invalid_argument);
}

}  // TEST_SUITE
