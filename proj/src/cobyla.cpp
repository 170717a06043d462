#include "jsvqa/cobyla.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jsvqa {

namespace {

constexpr double kEdgeBound = 2.1;    // acceptable edge length, in units of rho
constexpr double kFaceBound = 0.25;   // acceptable vertex-to-face distance, in rho
constexpr double kRatioBound = 0.1;   // required actual/predicted reduction

struct Evaluator {
  const std::function<double(std::span<const double>)>& f;
  int budget;
  int used = 0;

  bool exhausted() const { return used >= budget; }

  double operator()(std::span<const double> x) {
    ++used;
    const double value = f(x);
    if (!std::isfinite(value))
      throw std::runtime_error("cobyla: objective returned a non-finite value at evaluation " +
                               std::to_string(used));
    return value;
  }
};

// Gauss-Jordan inverse; returns false when numerically singular.
bool invert(std::vector<double> a, int n, std::vector<double>& inv) {
  inv.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) < 1e-10) return false;
    if (pivot != col)
      for (int k = 0; k < n; ++k) {
        std::swap(a[pivot * n + k], a[col * n + k]);
        std::swap(inv[pivot * n + k], inv[col * n + k]);
      }
    const double diag = a[col * n + col];
    for (int k = 0; k < n; ++k) {
      a[col * n + k] /= diag;
      inv[col * n + k] /= diag;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a[r * n + col];
      if (factor == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        a[r * n + k] -= factor * a[col * n + k];
        inv[r * n + k] -= factor * inv[col * n + k];
      }
    }
  }
  return true;
}

}  // namespace

CobylaResult cobyla_minimize(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> x0, const CobylaOptions& options) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::invalid_argument("cobyla: dimension must be >= 1");
  if (!(options.rho_begin > options.rho_end) || !(options.rho_end > 0.0))
    throw std::invalid_argument("cobyla: need rho_begin > rho_end > 0");
  if (options.max_evaluations < 1)
    throw std::invalid_argument("cobyla: evaluation budget must be >= 1");

  Evaluator eval{objective, options.max_evaluations};
  CobylaResult result;
  auto record = [&](const std::vector<double>& x, double value) {
    if (result.best_point.empty() || value < result.best_value) {
      result.best_point = x;
      result.best_value = value;
    }
  };

  double rho = options.rho_begin;
  std::vector<std::vector<double>> vertex(n + 1, x0);
  std::vector<double> value(n + 1, 0.0);

  value[0] = eval(vertex[0]);
  record(vertex[0], value[0]);
  for (int i = 1; i <= n && !eval.exhausted(); ++i) {
    vertex[i][i - 1] += rho;
    value[i] = eval(vertex[i]);
    record(vertex[i], value[i]);
  }

  // Scaled edge matrix rows (x_i - x_0)/rho, its inverse transpose columns w_i
  // (the dual basis), model gradient, and scratch vectors.
  std::vector<double> edges(n * n), inverse(n * n), deltas(n), gradient(n), trial(n),
      direction(n);
  bool have_gradient = false;

  while (!eval.exhausted()) {
    int best = 0;
    for (int i = 1; i <= n; ++i)
      if (value[i] < value[best]) best = i;
    std::swap(vertex[0], vertex[best]);
    std::swap(value[0], value[best]);

    for (int i = 1; i <= n; ++i) {
      for (int k = 0; k < n; ++k)
        edges[(i - 1) * n + k] = (vertex[i][k] - vertex[0][k]) / rho;
      deltas[i - 1] = value[i] - value[0];
    }

    // Longest-edge check.
    int far_vertex = 1;
    double far_dist = 0.0;
    for (int i = 1; i <= n; ++i) {
      double d2 = 0.0;
      for (int k = 0; k < n; ++k) d2 += edges[(i - 1) * n + k] * edges[(i - 1) * n + k];
      if (d2 > far_dist) { far_dist = d2; far_vertex = i; }
    }
    far_dist = std::sqrt(far_dist);
    if (far_dist > kEdgeBound) {
      // Pull the runaway vertex back to distance rho along its own direction.
      for (int k = 0; k < n; ++k)
        trial[k] = vertex[0][k] + rho * edges[(far_vertex - 1) * n + k] / far_dist;
      const double trial_value = eval(trial);
      record(trial, trial_value);
      vertex[far_vertex] = trial;
      value[far_vertex] = trial_value;
      continue;
    }

    const bool invertible = invert(edges, n, inverse);

    // Face distances: vertex i sits 1/|w_i| (in rho units) from the opposite
    // face, where w_i is column i-1 of the inverse (edges_j . w_i = delta_ij).
    int weak_vertex = 0;
    double weak_sigma = 0.0;
    std::vector<double> weak_normal;
    if (invertible) {
      for (int i = 1; i <= n; ++i) {
        double w2 = 0.0;
        for (int k = 0; k < n; ++k) w2 += inverse[k * n + (i - 1)] * inverse[k * n + (i - 1)];
        const double sigma = 1.0 / std::sqrt(w2);
        if (weak_vertex == 0 || sigma < weak_sigma) {
          weak_vertex = i;
          weak_sigma = sigma;
          weak_normal.assign(n, 0.0);
          for (int k = 0; k < n; ++k)
            weak_normal[k] = inverse[k * n + (i - 1)] / std::sqrt(w2);
        }
      }
    }

    if (!invertible || weak_sigma < kFaceBound) {
      // Poisedness repair: move the weakest vertex to x_0 +- rho u along the
      // face normal (or a span-completing direction when degenerate).
      std::vector<double> u;
      int repair_vertex;
      if (invertible) {
        u = weak_normal;
        repair_vertex = weak_vertex;
      } else {
        // Gram-Schmidt over the edges; the first vertex whose edge collapses
        // is replaced along the best-uncovered coordinate direction.
        std::vector<std::vector<double>> basis;
        repair_vertex = n;
        for (int i = 1; i <= n; ++i) {
          std::vector<double> e(edges.begin() + (i - 1) * n, edges.begin() + i * n);
          for (const auto& q : basis) {
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += e[k] * q[k];
            for (int k = 0; k < n; ++k) e[k] -= dot * q[k];
          }
          double norm = 0.0;
          for (double v : e) norm += v * v;
          norm = std::sqrt(norm);
          if (norm < 1e-8) { repair_vertex = i; break; }
          for (double& v : e) v /= norm;
          basis.push_back(std::move(e));
        }
        double best_residual = -1.0;
        for (int cand = 0; cand < n; ++cand) {
          std::vector<double> r(n, 0.0);
          r[cand] = 1.0;
          for (const auto& q : basis) {
            const double dot = q[cand];
            for (int k = 0; k < n; ++k) r[k] -= dot * q[k];
          }
          double norm = 0.0;
          for (double v : r) norm += v * v;
          norm = std::sqrt(norm);
          if (norm > best_residual) {
            best_residual = norm;
            u = r;
            for (double& v : u) v /= norm;
          }
        }
      }
      double sign = 1.0;
      if (have_gradient) {
        double along = 0.0;
        for (int k = 0; k < n; ++k) along += gradient[k] * u[k];
        if (along > 0.0) sign = -1.0;
      }
      for (int k = 0; k < n; ++k) trial[k] = vertex[0][k] + sign * rho * u[k];
      const double trial_value = eval(trial);
      record(trial, trial_value);
      vertex[repair_vertex] = trial;
      value[repair_vertex] = trial_value;
      continue;
    }

    // Linear model gradient g = E^{-1} delta (in rho units), step to the
    // trust-region boundary.
    double gnorm = 0.0;
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += inverse[k * n + i] * deltas[i];
      gradient[k] = acc;
      gnorm += acc * acc;
    }
    gnorm = std::sqrt(gnorm);
    have_gradient = true;

    if (gnorm < 1e-14) {
      rho *= 0.5;
      if (rho < options.rho_end) { result.reached_rho_end = true; break; }
      continue;
    }

    for (int k = 0; k < n; ++k) {
      direction[k] = -rho * gradient[k] / gnorm;
      trial[k] = vertex[0][k] + direction[k];
    }
    const double trial_value = eval(trial);
    record(trial, trial_value);
    const double predicted = rho * gnorm;
    const double actual = value[0] - trial_value;

    // Replace the vertex that keeps the simplex volume largest: maximize
    // |d . w_i| among vertices the trial improves on.
    int replace = 0;
    double best_volume = 0.0;
    for (int i = 1; i <= n; ++i) {
      if (!(trial_value < value[0]) && !(value[i] > trial_value)) continue;
      double along = 0.0;
      for (int k = 0; k < n; ++k) along += direction[k] * inverse[k * n + (i - 1)] / rho;
      if (std::abs(along) > best_volume) {
        best_volume = std::abs(along);
        replace = i;
      }
    }
    if (replace > 0) {
      vertex[replace] = trial;
      value[replace] = trial_value;
    }

    if (actual < kRatioBound * predicted) {
      rho *= 0.5;
      if (rho < options.rho_end) { result.reached_rho_end = true; break; }
    }
  }

  result.evaluations = eval.used;
  return result;
}

}  // namespace jsvqa
