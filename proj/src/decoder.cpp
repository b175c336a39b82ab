#include "jocomco/decoder.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace jocomco {

SpatialDecodeResult spatial_decode(const Eigen::MatrixXd& M, const Eigen::MatrixXd& U,
                                   const SpatialDecodeConfig& config) {
  if (M.rows() != U.rows()) throw std::invalid_argument("spatial_decode: row mismatch");
  const Eigen::Index sensors = M.cols();
  const Eigen::Index cols = U.cols();

  SpatialDecodeResult res;
  res.Y = Eigen::MatrixXd::Zero(sensors, cols);
  if (M.rows() == 0) return res;  // nothing delivered: zero estimate, caller flags it

  if (config.mode == SpatialMode::kLeastSquares) {
    // One decomposition, reused across payload columns. Minimum-norm solve
    // leaves sensors that never entered any packet at exactly zero.
    auto cod = M.completeOrthogonalDecomposition();
    // Deficient means "not every sensor is determined": rank short of the
    // source count, whether from too few packets or degenerate combinations.
    res.rank_deficient = cod.rank() < M.cols();
    for (Eigen::Index c = 0; c < cols; ++c) res.Y.col(c) = cod.solve(U.col(c));
    return res;
  }

  if (static_cast<Eigen::Index>(config.patch_of.size()) != sensors || config.patch_count <= 0) {
    throw std::invalid_argument("spatial_decode: patch map does not cover the sensors");
  }
  // Dictionary atom per patch: the summed operator columns of its members.
  Eigen::MatrixXd dict = Eigen::MatrixXd::Zero(M.rows(), config.patch_count);
  for (Eigen::Index s = 0; s < sensors; ++s) {
    const int p = config.patch_of[static_cast<size_t>(s)];
    if (p < 0 || p >= config.patch_count) {
      throw std::invalid_argument("spatial_decode: patch index out of range");
    }
    dict.col(p) += M.col(s);
  }

  OmpConfig omp;
  omp.sparsity = config.k_spatial > 0 ? config.k_spatial : config.patch_count;
  omp.residual_tol = config.residual_tol;
  // Never select more atoms than half the delivered packet count.
  omp.sparsity = std::min<int>(omp.sparsity, std::max<int>(1, static_cast<int>(M.rows()) / 2));

  for (Eigen::Index c = 0; c < cols; ++c) {
    const OmpResult sol = omp_solve(dict, U.col(c), omp);
    if (!sol.converged && sol.iterations >= omp.sparsity) ++res.flagged_columns;
    if (sol.rank_deficient) res.rank_deficient = true;
    for (Eigen::Index s = 0; s < sensors; ++s) {
      res.Y(s, c) = sol.solution[config.patch_of[static_cast<size_t>(s)]];
    }
  }
  return res;
}

Eigen::VectorXd temporal_decode(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                                const TemporalDecodeConfig& config) {
  if (phi.rows() != y.size()) throw std::invalid_argument("temporal_decode: dimension mismatch");
  OmpConfig omp;
  omp.sparsity = config.sparsity;
  omp.residual_tol = config.residual_tol;
  if (config.basis == Basis::kIdentity) {
    return omp_solve(phi, y, omp).solution;
  }
  const Eigen::MatrixXd psi = basis_matrix(config.basis, static_cast<int>(phi.cols()));
  const Eigen::MatrixXd dict = phi * psi;
  return psi * omp_solve(dict, y, omp).solution;
}

std::vector<double> evaluate_rsnr(const Eigen::MatrixXd& truth,
                                  const Eigen::MatrixXd& reconstructed) {
  if (truth.rows() != reconstructed.rows() || truth.cols() != reconstructed.cols()) {
    throw std::invalid_argument("evaluate_rsnr: shape mismatch");
  }
  std::vector<double> out(static_cast<size_t>(truth.rows()),
                          std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index s = 0; s < truth.rows(); ++s) {
    if (truth.row(s).norm() == 0.0) continue;  // metric undefined, stays NaN
    out[static_cast<size_t>(s)] = rsnr(truth.row(s).transpose(), reconstructed.row(s).transpose());
  }
  return out;
}

}  // namespace jocomco
