#include "jsvqa/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace jsvqa {

bool cholesky_solve(std::vector<double> a, int n, const std::vector<double>& b,
                    std::vector<double>& x) {
  if (static_cast<int>(a.size()) != n * n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("cholesky_solve: size mismatch");
  // In-place lower factor.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        a[i * n + j] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= a[i * n + k] * y[k];
    y[i] = s / a[i * n + i];
  }
  x.assign(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= a[k * n + i] * x[k];
    x[i] = s / a[i * n + i];
  }
  return true;
}

void jacobi_eigendecomposition(std::vector<double> a, int n, std::vector<double>& values,
                               std::vector<double>& vecs) {
  if (static_cast<int>(a.size()) != n * n)
    throw std::invalid_argument("jacobi: size mismatch");
  vecs.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) vecs[i * n + i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double diff = a[q * n + q] - a[p * n + p];
        double t;
        if (std::abs(apq) < 1e-300 * std::abs(diff)) {
          t = apq / diff;
        } else {
          const double phi = diff / (2.0 * apq);
          t = 1.0 / (std::abs(phi) + std::sqrt(phi * phi + 1.0));
          if (phi < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = vecs[k * n + p], vkq = vecs[k * n + q];
          vecs[k * n + p] = c * vkp - s * vkq;
          vecs[k * n + q] = s * vkp + c * vkq;
        }
      }
  }
  values.assign(n, 0.0);
  for (int i = 0; i < n; ++i) values[i] = a[i * n + i];
}

std::vector<double> pseudo_inverse_solve(const std::vector<double>& a, int n,
                                         const std::vector<double>& b, double cutoff) {
  std::vector<double> values, vecs;
  jacobi_eigendecomposition(a, n, values, vecs);
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  std::vector<double> x(n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (std::abs(values[k]) <= cutoff * scale) continue;
    double proj = 0.0;
    for (int i = 0; i < n; ++i) proj += vecs[i * n + k] * b[i];
    proj /= values[k];
    for (int i = 0; i < n; ++i) x[i] += proj * vecs[i * n + k];
  }
  return x;
}



}  // namespace jsvqa
