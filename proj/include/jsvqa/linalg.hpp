#pragma once

#include <vector>

namespace jsvqa {

// Small dense helpers for the McLachlan update. Matrices are row-major n x n.

// Solves (A + shift I) x = b for symmetric A through the eigendecomposition;
// works for indefinite matrices. Returns false when some eigenvalue sits
// within tolerance of -shift (the regularized system is singular).
bool symmetric_shift_solve(const std::vector<double>& a, int n, const std::vector<double>& b,
                           double shift, std::vector<double>& x);

// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Eigenvectors are
// returned as columns of `vecs`.
void jacobi_eigendecomposition(std::vector<double> a, int n, std::vector<double>& values,
                               std::vector<double>& vecs);

// Pseudo-inverse solve: discards eigen-directions with |lambda| below
// cutoff * max|lambda|.
std::vector<double> pseudo_inverse_solve(const std::vector<double>& a, int n,
                                         const std::vector<double>& b, double cutoff);

}  // namespace jsvqa
