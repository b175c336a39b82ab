#include "jocomco/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace jocomco {

Eigen::MatrixXd basis_matrix(Basis basis, int block_len) {
  if (block_len <= 0) throw std::invalid_argument("basis_matrix: block_len must be positive");
  if (basis == Basis::kIdentity) {
    return Eigen::MatrixXd::Identity(block_len, block_len);
  }
  // Orthonormal DCT-II synthesis matrix: column j holds the j-th cosine atom.
  Eigen::MatrixXd psi(block_len, block_len);
  const double n = static_cast<double>(block_len);
  for (int j = 0; j < block_len; ++j) {
    const double scale = (j == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < block_len; ++i) {
      psi(i, j) = scale * std::cos(std::numbers::pi * (i + 0.5) * j / n);
    }
  }
  return psi;
}

std::vector<int> model_support(const SparsityModel& model) {
  if (model.sparsity < 0 || model.sparsity > model.block_len) {
    throw std::invalid_argument("model_support: sparsity outside [0, block_len]");
  }
  // Partial Fisher-Yates over the index range, seeded only by support_seed so
  // every cluster sharing the model shares the support.
  std::vector<int> idx(model.block_len);
  for (int i = 0; i < model.block_len; ++i) idx[i] = i;
  Rng rng(derive_seed(model.support_seed, {0x5057u}));
  for (int i = 0; i < model.sparsity; ++i) {
    const int j = i + static_cast<int>(rng.next_below(model.block_len - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> support(idx.begin(), idx.begin() + model.sparsity);
  std::sort(support.begin(), support.end());
  return support;
}

namespace {

double draw_value(CoefficientLaw law, Rng& rng) {
  switch (law) {
    case CoefficientLaw::kStandardNormal:
      return rng.next_gaussian();
    case CoefficientLaw::kUniformSym:
      return 2.0 * rng.next_unit() - 1.0;
    case CoefficientLaw::kOnes:
      return 1.0;
  }
  return 0.0;
}

}  // namespace

std::vector<SignalBlock> generate_cluster_signals(const SparsityModel& model,
                                                  const NoiseSpec& noise,
                                                  int cluster_index,
                                                  int sensor_count,
                                                  std::uint64_t seed) {
  if (sensor_count < 0) throw std::invalid_argument("generate_cluster_signals: negative sensor_count");
  const std::vector<int> support = model_support(model);
  const bool identity = model.basis == Basis::kIdentity;
  Eigen::MatrixXd psi;
  if (!identity) psi = basis_matrix(model.basis, model.block_len);

  std::vector<SignalBlock> blocks;
  blocks.reserve(sensor_count);
  Rng rng(derive_seed(seed, {0x51474eu, static_cast<std::uint64_t>(cluster_index)}));
  for (int s = 0; s < sensor_count; ++s) {
    SignalBlock b;
    b.coeffs = Eigen::VectorXd::Zero(model.block_len);
    for (int t : support) b.coeffs[t] = draw_value(model.law, rng);
    b.clean = identity ? b.coeffs : Eigen::VectorXd(psi * b.coeffs);
    b.noisy = noise.enabled ? add_noise(b.clean, noise.snr_db, rng) : b.clean;
    blocks.push_back(std::move(b));
  }
  return blocks;
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& x, double snr_db, Rng& rng) {
  const double power = x.squaredNorm();
  if (power == 0.0) return x;
  // E|w|^2 = |x|^2 * 10^(-snr/10) with i.i.d. Gaussian components.
  const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0) / x.size());
  Eigen::VectorXd noisy = x;
  for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy[i] += sigma * rng.next_gaussian();
  return noisy;
}

double rsnr(const Eigen::VectorXd& x, const Eigen::VectorXd& x_rec) {
  if (x.size() != x_rec.size()) throw std::invalid_argument("rsnr: size mismatch");
  const double ref = x.norm();
  if (ref == 0.0) throw std::invalid_argument("rsnr: undefined for a zero reference vector");
  const double err = (x - x_rec).norm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(ref / err);
}

}  // namespace jocomco
