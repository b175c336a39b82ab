#include "jocomco/cs.hpp"

#include <cmath>
#include <stdexcept>

#include "jocomco/rng.hpp"

namespace jocomco {

Eigen::MatrixXd realize(const MatrixSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0) {
    throw std::invalid_argument("realize: matrix dimensions must be positive");
  }
  Rng rng(spec.seed);
  Eigen::MatrixXd A(spec.rows, spec.cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.rows));
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      A(r, c) = spec.law == EntryLaw::kGaussian ? scale * rng.next_gaussian()
                                                : scale * rng.next_rademacher();
    }
  }
  return A;
}

OmpResult omp_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& u,
                    const OmpConfig& config) {
  if (A.rows() != u.size()) throw std::invalid_argument("omp_solve: dimension mismatch");
  const int rows = static_cast<int>(A.rows());
  const int cols = static_cast<int>(A.cols());

  OmpResult res;
  res.solution = Eigen::VectorXd::Zero(cols);
  const double u_norm = u.norm();
  res.residual_norm = u_norm;
  if (u_norm == 0.0) {
    res.converged = true;
    return res;
  }

  int max_iter = config.sparsity > 0 ? config.sparsity : rows / 2;
  max_iter = std::min({max_iter, rows, cols});

  const Eigen::VectorXd col_norms = A.colwise().norm();
  std::vector<char> selected(cols, 0);
  Eigen::VectorXd residual = u;
  Eigen::VectorXd active_sol;

  for (int iter = 0; iter < max_iter; ++iter) {
    // Pick the atom with the largest normalized correlation to the residual.
    Eigen::VectorXd corr = A.transpose() * residual;
    int best = -1;
    double best_score = 0.0;
    for (int c = 0; c < cols; ++c) {
      if (selected[c] || col_norms[c] == 0.0) continue;
      const double score = std::abs(corr[c]) / col_norms[c];
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    if (best < 0 || best_score == 0.0) break;

    selected[best] = 1;
    res.support.push_back(best);

    Eigen::MatrixXd active(rows, res.support.size());
    for (size_t j = 0; j < res.support.size(); ++j) active.col(j) = A.col(res.support[j]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(active);
    if (qr.rank() < static_cast<Eigen::Index>(res.support.size())) {
      res.rank_deficient = true;
      active_sol = active.completeOrthogonalDecomposition().solve(u);
    } else {
      active_sol = qr.solve(u);
    }
    residual = u - active * active_sol;
    res.residual_norm = residual.norm();
    res.iterations = iter + 1;
    if (res.residual_norm <= config.residual_tol * u_norm) {
      res.converged = true;
      break;
    }
  }

  for (size_t j = 0; j < res.support.size(); ++j) res.solution[res.support[j]] = active_sol[j];
  return res;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != b.size()) throw std::invalid_argument("least_squares: dimension mismatch");
  return A.completeOrthogonalDecomposition().solve(b);
}

}  // namespace jocomco
