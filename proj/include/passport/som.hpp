#pragma once

// Online self-organizing map on a rectangular grid. Every unit is updated at
// every step with a Gaussian neighborhood over continuous grid Euclidean
// distance; sigma and the learning rate decay exponentially across
// epochs * N steps. The u-matrix uses 4-connected adjacency.

#include <cstdint>
#include <string>
#include <vector>

#include "passport/common.hpp"

namespace passport {

struct SomParams {
  int rows = 10;
  int cols = 10;
  int epochs = 20;
  double sigma0 = 0.0;  // 0 means max(rows, cols) / 2
  double sigma_final = 0.5;
  double lr0 = 0.5;
  double lr_final = 0.01;
  std::uint64_t seed = 42;

  double initial_sigma() const {
    return sigma0 > 0.0 ? sigma0 : std::max(rows, cols) / 2.0;
  }

  void validate() const {
    if (rows < 2 || cols < 2) throw ValidationError("grid must be at least 2x2");
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (!(sigma_final > 0.0) || initial_sigma() < sigma_final)
      throw ValidationError("need sigma0 >= sigma_final > 0");
    if (!(lr_final > 0.0) || lr0 < lr_final)
      throw ValidationError("need lr0 >= lr_final > 0");
  }
};

// Heuristic default grid side: ceil(sqrt(5 * sqrt(N))) for ~5*sqrt(N) units.
inline int default_grid_side(std::size_t n_inputs) {
  const double units = 5.0 * std::sqrt(static_cast<double>(n_inputs));
  return std::max(2, static_cast<int>(std::ceil(std::sqrt(units))));
}

struct SomGrid {
  int rows = 0;
  int cols = 0;
  int dim = 0;
  std::vector<double> weights;  // row-major (r, c, d)
  std::string trained_on;       // "words" or "documents"
  SomParams params;

  double* unit(int r, int c) {
    return weights.data() + (static_cast<std::size_t>(r) * cols + c) * dim;
  }
  const double* unit(int r, int c) const {
    return weights.data() + (static_cast<std::size_t>(r) * cols + c) * dim;
  }
  std::size_t unit_count() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
};

struct UMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major
  bool normalized = false;

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

namespace detail {

inline void validate_inputs(const Matrix& vectors) {
  if (vectors.rows == 0) throw TrainingError("no input vectors");
  if (!vectors.all_finite())
    throw ValidationError("non-finite values in SOM input");
}

}  // namespace detail

// Random initialization: each weight coordinate uniform within the
// per-dimension input min/max.
inline SomGrid initial_grid(const Matrix& vectors, const SomParams& p) {
  p.validate();
  detail::validate_inputs(vectors);

  std::vector<double> lo(vectors.cols), hi(vectors.cols);
  for (std::size_t d = 0; d < vectors.cols; ++d) {
    lo[d] = hi[d] = vectors(0, d);
    for (std::size_t i = 1; i < vectors.rows; ++i) {
      lo[d] = std::min(lo[d], vectors(i, d));
      hi[d] = std::max(hi[d], vectors(i, d));
    }
  }

  SomGrid grid;
  grid.rows = p.rows;
  grid.cols = p.cols;
  grid.dim = static_cast<int>(vectors.cols);
  grid.params = p;
  grid.weights.resize(grid.unit_count() * vectors.cols);
  Rng rng(p.seed);
  std::size_t i = 0;
  for (int r = 0; r < p.rows; ++r)
    for (int c = 0; c < p.cols; ++c)
      for (std::size_t d = 0; d < vectors.cols; ++d)
        grid.weights[i++] = rng.uniform(lo[d], hi[d]);
  return grid;
}

// Nearest unit by Euclidean distance; ties resolve to the smallest row, then
// the smallest column (row-major scan keeps the first minimum).
inline std::pair<int, int> best_matching_unit(const SomGrid& grid,
                                              const double* x, std::size_t dim) {
  if (dim != static_cast<std::size_t>(grid.dim))
    throw ValidationError("BMU query dimension mismatch");
  int best_r = 0, best_c = 0;
  double best = squared_distance(grid.unit(0, 0), x, dim);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const double d2 = squared_distance(grid.unit(r, c), x, dim);
      if (d2 < best) {
        best = d2;
        best_r = r;
        best_c = c;
      }
    }
  }
  return {best_r, best_c};
}

inline std::pair<int, int> best_matching_unit(const SomGrid& grid,
                                              const std::vector<double>& x) {
  return best_matching_unit(grid, x.data(), x.size());
}

// Online training: seeded shuffle per epoch, full-grid Gaussian update per
// step. Deterministic for a fixed seed.
inline SomGrid train_som(const Matrix& vectors, const SomParams& p,
                         const std::string& trained_on = "words") {
  SomGrid grid = initial_grid(vectors, p);
  grid.trained_on = trained_on;
  const std::size_t dim = vectors.cols;

  Rng rng(p.seed + 1);
  std::vector<std::size_t> order(vectors.rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const double total_steps =
      static_cast<double>(p.epochs) * static_cast<double>(vectors.rows);
  const double sigma0 = p.initial_sigma();
  const double sigma_ratio = p.sigma_final / sigma0;
  const double lr_ratio = p.lr_final / p.lr0;

  std::size_t step = 0;
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    rng.shuffle(order);
    for (const auto idx : order) {
      const double progress = static_cast<double>(step) / total_steps;
      const double sigma = sigma0 * std::pow(sigma_ratio, progress);
      const double lr = p.lr0 * std::pow(lr_ratio, progress);
      const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);

      const double* x = vectors.row(idx);
      const auto [br, bc] = best_matching_unit(grid, x, dim);
      for (int r = 0; r < grid.rows; ++r) {
        const double dr = static_cast<double>(r - br);
        for (int c = 0; c < grid.cols; ++c) {
          const double dc = static_cast<double>(c - bc);
          const double h = std::exp(-(dr * dr + dc * dc) * inv_two_sigma2);
          const double scale = lr * h;
          double* w = grid.unit(r, c);
          for (std::size_t d = 0; d < dim; ++d) w[d] += scale * (x[d] - w[d]);
        }
      }
      ++step;
    }
  }
  return grid;
}

// Mean Euclidean distance from each unit to its existing 4-connected
// neighbors; optional min-max normalization onto [0, 1].
inline UMatrix u_matrix(const SomGrid& grid, bool minmax = false) {
  UMatrix um;
  um.rows = grid.rows;
  um.cols = grid.cols;
  um.values.resize(grid.unit_count(), 0.0);

  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      double total = 0.0;
      int neighbors = 0;
      const double* w = grid.unit(r, c);
      const int dr[] = {-1, 1, 0, 0};
      const int dc[] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int nr = r + dr[k];
        const int nc = c + dc[k];
        if (nr < 0 || nr >= grid.rows || nc < 0 || nc >= grid.cols) continue;
        total += euclidean_distance(w, grid.unit(nr, nc), grid.dim);
        ++neighbors;
      }
      um.values[static_cast<std::size_t>(r) * grid.cols + c] =
          neighbors > 0 ? total / neighbors : 0.0;
    }
  }

  if (minmax) {
    um.normalized = true;
    double lo = um.values[0], hi = um.values[0];
    for (double v : um.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = hi - lo;
    for (double& v : um.values) v = span > 0.0 ? (v - lo) / span : 0.0;
  }
  return um;
}

// Mean distance from each input to its BMU.
inline double quantization_error(const SomGrid& grid, const Matrix& vectors) {
  if (vectors.rows == 0) throw ValidationError("quantization error of empty input");
  if (vectors.cols != static_cast<std::size_t>(grid.dim))
    throw ValidationError("quantization error dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < vectors.rows; ++i) {
    const auto [r, c] = best_matching_unit(grid, vectors.row(i), vectors.cols);
    total += euclidean_distance(grid.unit(r, c), vectors.row(i), vectors.cols);
  }
  return total / static_cast<double>(vectors.rows);
}

// Fraction of inputs whose first and second BMUs are not 4-adjacent.
inline double topographic_error(const SomGrid& grid, const Matrix& vectors) {
  if (grid.unit_count() < 2)
    throw ValidationError("topographic error needs at least 2 units");
  if (vectors.rows == 0) throw ValidationError("topographic error of empty input");
  if (vectors.cols != static_cast<std::size_t>(grid.dim))
    throw ValidationError("topographic error dimension mismatch");

  std::size_t violations = 0;
  for (std::size_t i = 0; i < vectors.rows; ++i) {
    const double* x = vectors.row(i);
    int r1 = -1, c1 = -1, r2 = -1, c2 = -1;
    double d1 = 0.0, d2 = 0.0;
    for (int r = 0; r < grid.rows; ++r) {
      for (int c = 0; c < grid.cols; ++c) {
        const double d = squared_distance(grid.unit(r, c), x, vectors.cols);
        if (r1 < 0 || d < d1) {
          r2 = r1; c2 = c1; d2 = d1;
          r1 = r; c1 = c; d1 = d;
        } else if (r2 < 0 || d < d2) {
          r2 = r; c2 = c; d2 = d;
        }
      }
    }
    if (std::abs(r1 - r2) + std::abs(c1 - c2) != 1) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(vectors.rows);
}

}  // namespace passport
