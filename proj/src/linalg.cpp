#include "truncreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "truncreg/errors.hpp"
#include "truncreg/special.hpp"

namespace truncreg {

namespace {

// In-place lower Cholesky; false when a pivot drops below the floor.
bool cholesky(DenseMatrix& m) {
  const int n = m.rows;
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
  const double floor = 1e-14 * std::max(max_diag, 1e-300);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int t = 0; t < j; ++t) d -= m(j, t) * m(j, t);
    if (!(d > floor)) return false;
    const double l = std::sqrt(d);
    m(j, j) = l;
    for (int i = j + 1; i < n; ++i) {
      double v = m(i, j);
      for (int t = 0; t < j; ++t) v -= m(i, t) * m(j, t);
      m(i, j) = v / l;
    }
  }
  // zero strict upper triangle
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m(i, j) = 0.0;
  return true;
}

Vec cholesky_solve(const DenseMatrix& L, Vec b) {
  const int n = L.rows;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) b[i] -= L(i, j) * b[j];
    b[i] /= L(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[i] -= L(j, i) * b[j];
    b[i] /= L(i, i);
  }
  return b;
}

}  // namespace

Vec ols_fit(const DenseMatrix& X, std::span<const double> y) {
  const int n = X.rows, k = X.cols;
  if (static_cast<int>(y.size()) != n)
    throw std::invalid_argument("ols_fit: label count mismatch");
  if (n < k) throw SingularDesign("ols_fit: fewer rows than columns");

  DenseMatrix gram(k, k);
  Vec xty(k, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto row = X.row(i);
    for (int a = 0; a < k; ++a) {
      xty[a] += row[a] * y[i];
      for (int b = a; b < k; ++b) gram(a, b) += row[a] * row[b];
    }
  }
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < a; ++b) gram(a, b) = gram(b, a);

  DenseMatrix chol = gram;
  if (!cholesky(chol)) {
    double trace = 0.0;
    for (int a = 0; a < k; ++a) trace += gram(a, a);
    const double jitter = 1e-10 * trace / k;
    chol = gram;
    for (int a = 0; a < k; ++a) chol(a, a) += jitter;
    if (!cholesky(chol))
      throw SingularDesign("ols_fit: Gram matrix is rank deficient");
  }
  return cholesky_solve(chol, xty);
}

double residual_variance(const DenseMatrix& X, std::span<const double> y,
                         std::span<const double> w) {
  const int m = X.rows;
  if (m < 1) throw std::invalid_argument("residual_variance: empty data");
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double r = y[i] - dot(X.row(i), w);
    acc += r * r;
  }
  return acc / m;
}

EigResult sym_eig(const DenseMatrix& A) {
  if (A.rows != A.cols || !is_symmetric(A))
    throw NotSymmetric("sym_eig: matrix is not symmetric");
  const int n = A.rows;
  DenseMatrix m = A;
  DenseMatrix v = DenseMatrix::identity(n);

  double fro = 0.0;
  for (double x : m.a) fro += x * x;
  fro = std::sqrt(fro);
  const double tol = 1e-12 * fro;

  for (int sweep = 0; sweep < 100 && fro > 0.0; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * m(p, q) * m(p, q);
    if (std::sqrt(off) <= tol) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) /
            (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        m(p, p) -= t * apq;
        m(q, q) += t * apq;
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const double aip = m(i, p), aiq = m(i, q);
            m(i, p) = c * aip - s * aiq;
            m(p, i) = m(i, p);
            m(i, q) = s * aip + c * aiq;
            m(q, i) = m(i, q);
          }
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return m(a, a) < m(b, b); });
  EigResult r;
  r.values.resize(n);
  r.vectors = DenseMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    r.values[j] = m(order[j], order[j]);
    for (int i = 0; i < n; ++i) r.vectors(i, j) = v(i, order[j]);
  }
  return r;
}

DenseMatrix solve_lyapunov(const DenseMatrix& M, const DenseMatrix& G) {
  if (!is_symmetric(G))
    throw NotSymmetric("solve_lyapunov: right-hand side is not symmetric");
  const EigResult eig = sym_eig(M);
  const int n = M.rows;
  if (!(eig.values.front() > 0.0))
    throw NotPositiveDefinite(
        "solve_lyapunov: M has min eigenvalue " +
        std::to_string(eig.values.front()));

  DenseMatrix gt = matmul(matmul(transpose(eig.vectors), G), eig.vectors);
  symmetrize(gt);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gt(i, j) /= eig.values[i] + eig.values[j];
  DenseMatrix sigma = matmul(matmul(eig.vectors, gt), transpose(eig.vectors));
  symmetrize(sigma);
  return sigma;
}

double chi2_quantile(int df, double p) {
  if (df < 1) throw std::invalid_argument("chi2_quantile: df must be >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("chi2_quantile: p must lie in (0, 1)");
  const double s = 0.5 * df;

  // Wilson-Hilferty starting point.
  const double z = norm_quantile(p);
  const double h = 2.0 / (9.0 * df);
  double x = df * std::pow(1.0 - h + z * std::sqrt(h), 3);
  if (!(x > 0.0)) x = 1e-8;

  double lo = x, hi = x;
  while (gamma_p(s, 0.5 * hi) < p) {
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  while (gamma_p(s, 0.5 * lo) > p) {
    lo *= 0.5;
    if (lo < 1e-300) break;
  }

  x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = gamma_p(s, 0.5 * x) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    // chi-square density at x; Newton step when it stays inside the bracket
    const double logpdf =
        (s - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(s);
    const double pdf = 0.5 * std::exp(logpdf);
    double next = (pdf > 0.0) ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) < 1e-12 * (1.0 + x) && std::fabs(f) < 1e-12) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace truncreg
