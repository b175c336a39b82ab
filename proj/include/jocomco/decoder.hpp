#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jocomco/cs.hpp"
#include "jocomco/signal.hpp"

namespace jocomco {

// Sink-side two-stage reconstruction. The spatial stage inverts the network's
// mixing (U = M * Y) column by column; the temporal stage then inverts the
// per-sensor compression (y = Phi * x) with OMP.

enum class SpatialMode {
  // Solve each payload column with OMP over the patch-indicator dictionary
  // (columns of M summed per patch), then expand patch values to sensors.
  // This is the joint decoder: it recovers sensors that never transmitted
  // from their correlation-patch siblings.
  kPatchOmp,
  // Minimum-norm least squares on M itself. Exact whenever M has full column
  // rank on the sensors that transmitted; sensors outside the range of M
  // decode to zero. Used by the all-or-nothing and passthrough schemes.
  kLeastSquares,
};

struct SpatialDecodeConfig {
  SpatialMode mode = SpatialMode::kPatchOmp;
  int k_spatial = 0;               // OMP hint: number of active patches
  std::vector<int> patch_of;       // sensor -> patch (kPatchOmp)
  int patch_count = 0;
  double residual_tol = 1e-9;
};

struct SpatialDecodeResult {
  Eigen::MatrixXd Y;        // N x m estimate
  int flagged_columns = 0;  // columns where OMP hit its cap without converging
  bool rank_deficient = false;
};

// U holds one delivered packet payload per row (l x m); M is the effective
// operator (l x N) assembled from packet descriptors.
SpatialDecodeResult spatial_decode(const Eigen::MatrixXd& M, const Eigen::MatrixXd& U,
                                   const SpatialDecodeConfig& config);

struct TemporalDecodeConfig {
  int sparsity = 0;          // known k; 0 lets OMP cap at m/2
  Basis basis = Basis::kIdentity;
  double residual_tol = 1e-9;
};

// Recover one block from its compressed measurements via OMP on Phi * Psi.
Eigen::VectorXd temporal_decode(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                                const TemporalDecodeConfig& config);

// Per-sensor reconstruction quality. Sensors whose reference block is zero
// have no defined RSNR and get NaN.
std::vector<double> evaluate_rsnr(const Eigen::MatrixXd& truth,
                                  const Eigen::MatrixXd& reconstructed);

}  // namespace jocomco
