#pragma once

// Exact O(N^2) t-SNE to 2D for small vector sets (word-similarity
// neighborhoods). Conditional distributions are calibrated to a target
// perplexity by bisection on the Gaussian bandwidth; the embedding descends
// the KL divergence with momentum and early exaggeration.

#include <cstdint>
#include <string>
#include <vector>

#include "passport/common.hpp"

namespace passport {

struct TsneParams {
  double perplexity = 5.0;
  int iterations = 1000;
  double learning_rate = 100.0;
  double early_exaggeration = 4.0;
  int exaggeration_steps = 100;
  std::uint64_t seed = 42;

  void validate(std::size_t n_points) const {
    if (iterations < 1) throw ValidationError("iterations must be >= 1");
    if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
    if (!(perplexity >= 1.0) ||
        perplexity >= static_cast<double>(n_points))
      throw ValidationError("perplexity must satisfy 1 <= perplexity < N");
  }
};

struct Projection2D {
  Matrix points;  // N x 2
  std::vector<std::string> labels;
};

// KL samples recorded every 50 steps after the exaggeration phase.
struct TsneDiag {
  std::vector<std::pair<int, double>> kl_samples;  // (step, KL)
};

// ---------------------------------------------------------------------------
// Perplexity calibration
// ---------------------------------------------------------------------------

// Binary search on the Gaussian bandwidth so that the conditional
// distribution over the given neighbor distances has perplexity 2^H equal to
// `target` within 1e-5 (at most 100 bisection steps). Returns normalized
// conditional probabilities aligned with the input order.
inline std::vector<double> calibrate_perplexity(
    const std::vector<double>& distances, double target) {
  const std::size_t n = distances.size();
  if (n == 0) throw ValidationError("calibration needs at least one distance");
  if (!(target >= 1.0) || target >= static_cast<double>(n + 1))
    throw ValidationError("perplexity target out of range");
  for (double d : distances)
    if (!std::isfinite(d) || d < 0.0)
      throw ValidationError("distances must be finite and non-negative");

  std::vector<double> d2(n);
  double d2_min = distances[0] * distances[0];
  for (std::size_t j = 0; j < n; ++j) {
    d2[j] = distances[j] * distances[j];
    d2_min = std::min(d2_min, d2[j]);
  }

  std::vector<double> probs(n);
  auto perplexity_at = [&](double beta) {
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      probs[j] = std::exp(-beta * (d2[j] - d2_min));
      z += probs[j];
    }
    double entropy_bits = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      probs[j] /= z;
      if (probs[j] > 0.0) entropy_bits -= probs[j] * std::log2(probs[j]);
    }
    return std::pow(2.0, entropy_bits);
  };

  // Perplexity decreases monotonically in beta; expand bounds, then bisect.
  double beta = 1.0, beta_lo = 0.0, beta_hi = -1.0;
  double perp = perplexity_at(beta);
  for (int iter = 0; iter < 100 && std::abs(perp - target) > 1e-5; ++iter) {
    if (perp > target) {
      beta_lo = beta;
      beta = beta_hi < 0.0 ? beta * 2.0 : (beta + beta_hi) / 2.0;
    } else {
      beta_hi = beta;
      beta = (beta + beta_lo) / 2.0;
    }
    perp = perplexity_at(beta);
  }
  if (std::abs(perp - target) > 1e-5)
    throw ValidationError("perplexity calibration failed to converge");
  return probs;
}

// ---------------------------------------------------------------------------
// KL divergence and its gradient, exposed for verification.
// ---------------------------------------------------------------------------

namespace detail {

// Student-t affinities of the embedding: w_ij = 1/(1+|y_i-y_j|^2), q = w / W.
inline void tsne_q(const Matrix& y, Matrix& w, double& w_sum) {
  const std::size_t n = y.rows;
  w_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j), 2));
      w(i, j) = v;
      w(j, i) = v;
      w_sum += 2.0 * v;
    }
  }
}

}  // namespace detail

inline double tsne_kl(const Matrix& p, const Matrix& y) {
  const std::size_t n = p.rows;
  Matrix w(n, n);
  double w_sum = 0.0;
  detail::tsne_q(y, w, w_sum);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      const double q = std::max(w(i, j) / w_sum, 1e-12);
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  }
  return kl;
}

// dKL/dy_i = 4 sum_j (p_ij - q_ij) * w_ij * (y_i - y_j)
inline Matrix tsne_kl_gradient(const Matrix& p, const Matrix& y) {
  const std::size_t n = p.rows;
  Matrix w(n, n);
  double w_sum = 0.0;
  detail::tsne_q(y, w, w_sum);
  Matrix grad(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = w(i, j) / w_sum;
      const double mult = 4.0 * (p(i, j) - q) * w(i, j);
      grad(i, 0) += mult * (y(i, 0) - y(j, 0));
      grad(i, 1) += mult * (y(i, 1) - y(j, 1));
    }
  }
  return grad;
}

// Symmetrized joint distribution from perplexity-calibrated conditionals.
// Squared distances get a 1e-12 floor so duplicate inputs stay calibratable.
inline Matrix tsne_joint_p(const Matrix& vectors, double perplexity) {
  const std::size_t n = vectors.rows;
  Matrix cond(n, n);
  std::vector<double> row(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = std::max(
          squared_distance(vectors.row(i), vectors.row(j), vectors.cols), 1e-12);
      row[k++] = std::sqrt(d2);
    }
    const auto probs = calibrate_perplexity(row, perplexity);
    k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      cond(i, j) = probs[k++];
    }
  }
  Matrix p(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) p(i, j) = (cond(i, j) + cond(j, i)) * scale;
  return p;
}

// Exact t-SNE. Enforces 3 <= N <= 2000; the intended use is a word plus its
// top-20 neighborhood.
inline Projection2D tsne(const Matrix& vectors, const std::vector<std::string>& labels,
                         const TsneParams& p, TsneDiag* diag = nullptr) {
  const std::size_t n = vectors.rows;
  if (n < 3) throw ValidationError("t-SNE needs at least 3 points");
  if (n > 2000) throw ValidationError("t-SNE input exceeds exact-method limit (2000)");
  if (labels.size() != n) throw ValidationError("label count mismatch");
  if (!vectors.all_finite()) throw ValidationError("non-finite t-SNE input");
  p.validate(n);

  Matrix joint = tsne_joint_p(vectors, p.perplexity);

  Matrix y(n, 2);
  Rng rng(p.seed);
  for (double& v : y.data) v = 1e-4 * rng.gaussian();

  Matrix velocity(n, 2);
  Matrix exaggerated = joint;
  for (double& v : exaggerated.data) v *= p.early_exaggeration;

  for (int step = 1; step <= p.iterations; ++step) {
    const bool lying = step <= p.exaggeration_steps;
    const Matrix& target = lying ? exaggerated : joint;
    const Matrix grad = tsne_kl_gradient(target, y);
    const double momentum = step <= 250 ? 0.5 : 0.8;

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      velocity(i, 0) = momentum * velocity(i, 0) - p.learning_rate * grad(i, 0);
      velocity(i, 1) = momentum * velocity(i, 1) - p.learning_rate * grad(i, 1);
      y(i, 0) += velocity(i, 0);
      y(i, 1) += velocity(i, 1);
      mean_x += y(i, 0);
      mean_y += y(i, 1);
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y(i, 0) -= mean_x;
      y(i, 1) -= mean_y;
    }

    if (diag && !lying && step % 50 == 0)
      diag->kl_samples.emplace_back(step, tsne_kl(joint, y));
  }

  if (!y.all_finite()) throw TrainingError("t-SNE diverged to non-finite values");
  Projection2D projection;
  projection.points = std::move(y);
  projection.labels = labels;
  return projection;
}

}  // namespace passport
