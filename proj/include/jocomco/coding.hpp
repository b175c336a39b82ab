#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "jocomco/cs.hpp"
#include "jocomco/rng.hpp"

namespace jocomco {

// ---------------------------------------------------------------------------
// Temporal stage: y = Phi * x with a seed-regenerable Gaussian Phi (m x n).

struct TemporalCode {
  int measurements = 0;  // m
  int block_len = 0;     // n
  MatrixSpec phi;
};

TemporalCode make_temporal_code(int measurements, int block_len, std::uint64_t seed);

Eigen::VectorXd temporal_compress(const Eigen::MatrixXd& phi, const Eigen::VectorXd& block);

// ---------------------------------------------------------------------------
// Pre-coding election.

enum class TrialsConvention { kN, kNMinus1 };

struct MuSolution {
  double mu = 1.0;
  double p = 1.0;        // election probability implied by mu
  bool clamped = false;  // p hit 1 (packet target equals cluster size)
  double residual = 0.0; // |(mu-1)(l-1) - 2*sigma(mu)| at the returned mu
};

// Smallest safety factor mu >= 1 such that the mean election count exceeds the
// packet target by two binomial standard deviations:
//   (mu - 1)(l - 1) = 2 * sqrt(T * p * (1 - p)),  p = mu (l - 1) / (N - 1),
// with T = N (default) or N - 1 binomial trials. Solved by bisection on
// mu in [1, (N-1)/(l-1)]; the residual of the returned root is reported.
MuSolution solve_mu(int sensor_count, int packet_target,
                    TrialsConvention trials = TrialsConvention::kN);

// p = mu (l - 1) / (N - 1), clamped to [0, 1].
double election_probability(double mu, int packet_target, int sensor_count);

// Independent Bernoulli(p) election over local sensor indices 0..count-1.
// The rows of the selection matrix B_i are exactly the returned indices.
std::vector<int> elect_transmitters(int sensor_count, double p, Rng& rng);

// ---------------------------------------------------------------------------
// Packets and coding descriptors.
//
// A packet payload is a real vector; its descriptor records how the payload
// was formed as combinations of origin sensor blocks. Interior nodes carry a
// MatrixSpec + row index instead of coefficients, so a header stays small and
// the sink regenerates every coefficient from seeds.

struct Descriptor;
// Children are shared: every output of one coding stage references the same
// input descriptors, so header trees stay linear in the packets created
// rather than exponential in the coding depth.
using DescriptorPtr = std::shared_ptr<const Descriptor>;

struct Descriptor {
  int origin_sensor = -1;  // valid for leaves (global sensor index)
  MatrixSpec spec;         // valid for interior nodes
  int row = -1;            // row of realize(spec) that formed this packet
  std::vector<DescriptorPtr> children;

  bool is_leaf() const { return children.empty(); }
};

struct Packet {
  Eigen::VectorXd payload;
  DescriptorPtr desc;
};

// l_out random combinations of the input packets. Intra-cluster coding uses
// Rademacher coefficients, inter-cluster recombination uses Gaussian ones;
// both are scaled by 1/sqrt(l_out) through the MatrixSpec convention.
// An empty input yields no output packets.
std::vector<Packet> intra_cluster_encode(const std::vector<Packet>& inputs, int l_out,
                                         std::uint64_t seed);
std::vector<Packet> inter_cluster_recombine(const std::vector<Packet>& inputs, int l_out,
                                            std::uint64_t seed);

// Row of the effective operator for one packet: the coefficients that the
// packet's payload applies to each origin sensor's compressed block.
Eigen::RowVectorXd effective_row(const Descriptor& desc, int total_sensors);

// Stack effective rows for a delivered packet set: U = M * Y with M (l x N).
// Shared subtrees are evaluated once (memoized by node identity).
Eigen::MatrixXd assemble_effective_operator(const std::vector<DescriptorPtr>& descs,
                                            int total_sensors);

// ---------------------------------------------------------------------------
// Closed-form compression gains (single-cluster accounting).

// m/n: temporal compression alone.
double temporal_gain(int measurements, int block_len);
// (N - 1 + l) / (2N - 1): spatial compression alone, raw payloads.
double spatial_only_gain(int sensor_count, int packet_target);
// (N - 1 + l) / (2N - 1) * m/n: joint pipeline without pre-coding.
double jocomco_gain(int sensor_count, int packet_target, int measurements, int block_len);
// (mu*l + l) / (2N - 1) * m/n: joint pipeline with pre-coding election.
double jocomco_precode_gain(int sensor_count, int packet_target, double mu,
                            int measurements, int block_len);

// ---------------------------------------------------------------------------
// Optional uniform quantizer hook for payload sensitivity studies.
Eigen::VectorXd quantize_payload(const Eigen::VectorXd& payload, int bits);

}  // namespace jocomco
