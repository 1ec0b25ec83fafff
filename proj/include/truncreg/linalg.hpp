#pragma once

#include <span>

#include "truncreg/mat.hpp"

namespace truncreg {

struct OlsEstimate {
  Vec w0;
  double sigma0_sq = 0.0;  // mean squared residual, >= 0
};

// w0 = (X^T X)^{-1} X^T y via Cholesky on the Gram matrix. A failed
// factorization gets one jitter retry (1e-10 * trace/k on the diagonal),
// after which SingularDesign is raised.
Vec ols_fit(const DenseMatrix& X, std::span<const double> y);

// (1/m) sum (y_i - w^T x_i)^2.
double residual_variance(const DenseMatrix& X, std::span<const double> y,
                         std::span<const double> w);

struct EigResult {
  Vec values;           // ascending
  DenseMatrix vectors;  // orthonormal columns, A v_j = d_j v_j
};

// Cyclic Jacobi iteration; fine for the small symmetric matrices used here.
// Off-diagonal tolerance 1e-12 relative to the Frobenius norm.
EigResult sym_eig(const DenseMatrix& A);

// Solves M*Sigma + Sigma*M = G for symmetric positive-definite M in M's
// eigenbasis: Sigma~_ij = G~_ij / (d_i + d_j).
DenseMatrix solve_lyapunov(const DenseMatrix& M, const DenseMatrix& G);

// Quantile of the chi-square distribution with df degrees of freedom, by
// inverting the regularized lower incomplete gamma (Wilson-Hilferty start,
// then bracketed Newton/bisection).
double chi2_quantile(int df, double p);

}  // namespace truncreg
