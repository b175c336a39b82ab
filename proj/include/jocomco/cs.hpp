#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace jocomco {

enum class EntryLaw {
  kGaussian,    // i.i.d. N(0, 1/rows)
  kRademacher,  // i.i.d. +-1/sqrt(rows)
};

// Compact description of a random matrix. Anyone holding this descriptor can
// realize the exact same coefficients, which is how packet headers stay O(1)
// per hop: they carry descriptors, not matrices.
struct MatrixSpec {
  int rows = 0;
  int cols = 0;
  EntryLaw law = EntryLaw::kGaussian;
  std::uint64_t seed = 0;

  bool operator==(const MatrixSpec&) const = default;
};

// Entries are drawn row-major from the pinned generator, so realization is
// bit-exact for a given spec on any build of this library.
Eigen::MatrixXd realize(const MatrixSpec& spec);

struct OmpConfig {
  // Number of atoms to select when the caller knows the sparsity. 0 means
  // unknown: the solver caps iterations at rows/2.
  int sparsity = 0;
  // Relative residual |r|/|u| at which to stop early.
  double residual_tol = 1e-9;
};

struct OmpResult {
  Eigen::VectorXd solution;
  std::vector<int> support;      // atoms in selection order
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;        // residual_tol reached
  bool rank_deficient = false;   // active set went rank deficient at some step
};

// Orthogonal matching pursuit with a full least-squares refit of the active
// set each iteration. Atom selection normalizes by column norm so dictionaries
// with unequal column scales are handled; zero columns are never selected.
OmpResult omp_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& u,
                    const OmpConfig& config);

// Minimum-norm least-squares solution of A x ~= b.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace jocomco
