#include "jocomco/coding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace jocomco {

TemporalCode make_temporal_code(int measurements, int block_len, std::uint64_t seed) {
  if (measurements <= 0 || block_len <= 0 || measurements > block_len) {
    throw std::invalid_argument("make_temporal_code: need 0 < m <= n");
  }
  TemporalCode code;
  code.measurements = measurements;
  code.block_len = block_len;
  code.phi = MatrixSpec{measurements, block_len, EntryLaw::kGaussian, seed};
  return code;
}

Eigen::VectorXd temporal_compress(const Eigen::MatrixXd& phi, const Eigen::VectorXd& block) {
  if (phi.cols() != block.size()) throw std::invalid_argument("temporal_compress: dimension mismatch");
  return phi * block;
}

double election_probability(double mu, int packet_target, int sensor_count) {
  if (sensor_count < 2) throw std::invalid_argument("election_probability: need at least 2 sensors");
  const double p = mu * (packet_target - 1) / static_cast<double>(sensor_count - 1);
  return std::clamp(p, 0.0, 1.0);
}

MuSolution solve_mu(int sensor_count, int packet_target, TrialsConvention trials) {
  if (packet_target < 2) throw std::invalid_argument("solve_mu: packet target must be >= 2");
  if (packet_target > sensor_count) {
    throw std::invalid_argument("solve_mu: packet target exceeds cluster size");
  }
  const double T = trials == TrialsConvention::kN ? sensor_count : sensor_count - 1;
  const double lm1 = packet_target - 1;
  const double nm1 = sensor_count - 1;

  MuSolution sol;
  if (packet_target == sensor_count) {
    // Every sensor must transmit; no safety margin is available.
    sol.mu = 1.0;
    sol.p = 1.0;
    sol.clamped = true;
    sol.residual = 0.0;
    return sol;
  }

  const auto g = [&](double mu) {
    const double p = std::clamp(mu * lm1 / nm1, 0.0, 1.0);
    return (mu - 1.0) * lm1 - 2.0 * std::sqrt(T * p * (1.0 - p));
  };

  // g(1) < 0 (positive sigma at p < 1), g(mu_max) > 0 (sigma vanishes at
  // p = 1), so bisection always brackets a root.
  double lo = 1.0;
  double hi = nm1 / lm1;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (std::abs(g(mid)) < 1e-10) break;
  }
  sol.mu = 0.5 * (lo + hi);
  sol.p = std::clamp(sol.mu * lm1 / nm1, 0.0, 1.0);
  sol.clamped = sol.p >= 1.0;
  sol.residual = std::abs(g(sol.mu));
  return sol;
}

std::vector<int> elect_transmitters(int sensor_count, double p, Rng& rng) {
  std::vector<int> elected;
  elected.reserve(static_cast<size_t>(sensor_count * std::min(1.0, p) + 8));
  for (int s = 0; s < sensor_count; ++s) {
    if (rng.next_bernoulli(p)) elected.push_back(s);
  }
  return elected;
}

namespace {

std::vector<Packet> recombine(const std::vector<Packet>& inputs, int l_out, EntryLaw law,
                              std::uint64_t seed) {
  std::vector<Packet> out;
  if (inputs.empty() || l_out <= 0) return out;
  const int cols = static_cast<int>(inputs.size());
  const Eigen::Index payload_len = inputs.front().payload.size();
  for (const Packet& pkt : inputs) {
    if (pkt.payload.size() != payload_len) {
      throw std::invalid_argument("recombine: mixed payload lengths");
    }
    if (!pkt.desc) throw std::invalid_argument("recombine: packet without descriptor");
  }

  const MatrixSpec spec{l_out, cols, law, seed};
  const Eigen::MatrixXd coeff = realize(spec);

  // One shared child list; every output row references the same input trees.
  std::vector<DescriptorPtr> children;
  children.reserve(cols);
  for (const Packet& in : inputs) children.push_back(in.desc);

  out.reserve(l_out);
  for (int r = 0; r < l_out; ++r) {
    Packet pkt;
    pkt.payload = Eigen::VectorXd::Zero(payload_len);
    for (int c = 0; c < cols; ++c) pkt.payload += coeff(r, c) * inputs[c].payload;
    auto desc = std::make_shared<Descriptor>();
    desc->spec = spec;
    desc->row = r;
    desc->children = children;
    pkt.desc = std::move(desc);
    out.push_back(std::move(pkt));
  }
  return out;
}

struct SpecKey {
  MatrixSpec spec;
  bool operator==(const SpecKey&) const = default;
};

struct SpecKeyHash {
  size_t operator()(const SpecKey& k) const {
    std::uint64_t h = k.spec.seed;
    h ^= (static_cast<std::uint64_t>(k.spec.rows) << 40) ^
         (static_cast<std::uint64_t>(k.spec.cols) << 16) ^
         static_cast<std::uint64_t>(k.spec.law);
    h *= 0x9e3779b97f4a7c15ULL;
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

using SpecCache = std::unordered_map<SpecKey, Eigen::MatrixXd, SpecKeyHash>;
// Memo of fully-expanded rows keyed by node identity: shared subtrees (one
// coding stage's common inputs) are expanded exactly once.
using NodeMemo = std::unordered_map<const Descriptor*, Eigen::RowVectorXd>;

const Eigen::RowVectorXd& row_of(const Descriptor& desc, int total_sensors, SpecCache& cache,
                                 NodeMemo& memo) {
  auto hit = memo.find(&desc);
  if (hit != memo.end()) return hit->second;

  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(total_sensors);
  if (desc.is_leaf()) {
    if (desc.origin_sensor < 0 || desc.origin_sensor >= total_sensors) {
      throw std::out_of_range("effective_row: origin sensor outside topology");
    }
    row[desc.origin_sensor] = 1.0;
  } else {
    const SpecKey key{desc.spec};
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, realize(desc.spec)).first;
    const Eigen::MatrixXd& coeff = it->second;
    if (desc.row < 0 || desc.row >= coeff.rows() ||
        static_cast<Eigen::Index>(desc.children.size()) != coeff.cols()) {
      throw std::invalid_argument("effective_row: descriptor inconsistent with its spec");
    }
    for (size_t c = 0; c < desc.children.size(); ++c) {
      if (!desc.children[c]) throw std::invalid_argument("effective_row: null child descriptor");
      row += coeff(desc.row, static_cast<int>(c)) *
             row_of(*desc.children[c], total_sensors, cache, memo);
    }
  }
  return memo.emplace(&desc, std::move(row)).first->second;
}

}  // namespace

std::vector<Packet> intra_cluster_encode(const std::vector<Packet>& inputs, int l_out,
                                         std::uint64_t seed) {
  return recombine(inputs, l_out, EntryLaw::kRademacher, seed);
}

std::vector<Packet> inter_cluster_recombine(const std::vector<Packet>& inputs, int l_out,
                                            std::uint64_t seed) {
  return recombine(inputs, l_out, EntryLaw::kGaussian, seed);
}

Eigen::RowVectorXd effective_row(const Descriptor& desc, int total_sensors) {
  SpecCache cache;
  NodeMemo memo;
  return row_of(desc, total_sensors, cache, memo);
}

Eigen::MatrixXd assemble_effective_operator(const std::vector<DescriptorPtr>& descs,
                                            int total_sensors) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(descs.size()),
                                            total_sensors);
  SpecCache cache;
  NodeMemo memo;
  for (size_t i = 0; i < descs.size(); ++i) {
    if (!descs[i]) throw std::invalid_argument("assemble_effective_operator: null descriptor");
    M.row(static_cast<Eigen::Index>(i)) = row_of(*descs[i], total_sensors, cache, memo);
  }
  return M;
}

double temporal_gain(int measurements, int block_len) {
  return static_cast<double>(measurements) / static_cast<double>(block_len);
}

double spatial_only_gain(int sensor_count, int packet_target) {
  return static_cast<double>(sensor_count - 1 + packet_target) /
         static_cast<double>(2 * sensor_count - 1);
}

double jocomco_gain(int sensor_count, int packet_target, int measurements, int block_len) {
  // Single division keeps this bit-identical to the simulator's
  // transmission-count ratio for the same integers.
  return static_cast<double>(static_cast<long long>(sensor_count - 1 + packet_target) *
                             measurements) /
         static_cast<double>(static_cast<long long>(2 * sensor_count - 1) * block_len);
}

double jocomco_precode_gain(int sensor_count, int packet_target, double mu,
                            int measurements, int block_len) {
  return (mu * packet_target + packet_target) * measurements /
         (static_cast<double>(2 * sensor_count - 1) * block_len);
}

Eigen::VectorXd quantize_payload(const Eigen::VectorXd& payload, int bits) {
  if (bits < 1 || bits > 32) throw std::invalid_argument("quantize_payload: bits outside [1, 32]");
  if (payload.size() == 0) return payload;
  const double peak = payload.cwiseAbs().maxCoeff();
  if (peak == 0.0) return payload;
  const double levels = static_cast<double>((1u << (bits - 1))) - 0.5;
  const double step = peak / levels;
  Eigen::VectorXd q = payload;
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = std::round(q[i] / step) * step;
  return q;
}

}  // namespace jocomco
