#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "jocomco/rng.hpp"

namespace jocomco {

enum class Basis { kIdentity, kDct };

enum class CoefficientLaw { kStandardNormal, kUniformSym, kOnes };

// Joint sparsity model for one cluster of sensors (JSM-2): every block drawn
// from the same model shares one support of size k; the nonzero values differ
// per block.
struct SparsityModel {
  int block_len = 512;           // samples per block (n)
  int sparsity = 5;              // nonzeros per block (k)
  Basis basis = Basis::kIdentity;
  CoefficientLaw law = CoefficientLaw::kStandardNormal;
  std::uint64_t support_seed = 1;  // fixes the shared support
};

struct NoiseSpec {
  bool enabled = false;
  double snr_db = 150.0;  // per-block SNR of the additive measurement noise
};

struct SignalBlock {
  Eigen::VectorXd coeffs;   // sparse representation theta
  Eigen::VectorXd clean;    // x = Psi * theta
  Eigen::VectorXd noisy;    // x + w  (== clean when noise is disabled)
};

// Orthonormal synthesis matrix for the given basis (identity or DCT); columns
// are the basis vectors, x = Psi * theta.
Eigen::MatrixXd basis_matrix(Basis basis, int block_len);

// The shared support drawn by `model` (sorted ascending). Deterministic in
// model.support_seed, independent of the per-call seed used for values.
std::vector<int> model_support(const SparsityModel& model);

// Generate `sensor_count` blocks for one cluster. All blocks share the model's
// support; values and noise are drawn from `seed` (salted with cluster_index).
std::vector<SignalBlock> generate_cluster_signals(const SparsityModel& model,
                                                  const NoiseSpec& noise,
                                                  int cluster_index,
                                                  int sensor_count,
                                                  std::uint64_t seed);

// Additive white Gaussian noise scaled so the block SNR is snr_db in
// expectation. Zero-power blocks are returned unchanged.
Eigen::VectorXd add_noise(const Eigen::VectorXd& x, double snr_db, Rng& rng);

// Reconstruction SNR in dB: 20*log10(|x| / |x - x_rec|). Returns +infinity on
// exact recovery; throws std::invalid_argument when |x| == 0 (the metric is
// undefined for an all-zero reference).
double rsnr(const Eigen::VectorXd& x, const Eigen::VectorXd& x_rec);

}  // namespace jocomco
