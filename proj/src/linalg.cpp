#include "pencurv/linalg.hpp"
#include "pencurv/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

namespace pencurv {

Rational det_bareiss(const MatQ& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  if (n == 0) return Rational(1);
  using boost::multiprecision::denominator;
  using boost::multiprecision::lcm;
  using boost::multiprecision::numerator;

  std::vector<std::vector<Integer>> a(n, std::vector<Integer>(n));
  Rational scale = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    Integer l = 1;
    for (Eigen::Index j = 0; j < n; ++j) l = lcm(l, denominator(m(i, j)));
    for (Eigen::Index j = 0; j < n; ++j) a[i][j] = numerator(m(i, j)) * (l / denominator(m(i, j)));
    scale *= Rational(l);
  }

  int sign = 1;
  Integer prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      Eigen::Index p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return Rational(0);
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  Rational d(a[n - 1][n - 1]);
  if (sign < 0) d = -d;
  return d / scale;
}

double det_float(const MatD& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  return m.rows() == 0 ? 1.0 : m.partialPivLu().determinant();
}

Complex det_float(const MatC& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  return m.rows() == 0 ? Complex(1.0) : m.partialPivLu().determinant();
}

Rref rref(MatQ m) {
  Rref out;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index p = row;
    while (p < m.rows() && m(p, col) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row) m.row(p).swap(m.row(row));
    Rational inv = 1 / m(row, col);
    for (Eigen::Index j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rational f = m(i, col);
      for (Eigen::Index j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    out.pivots.push_back(static_cast<int>(col));
    ++row;
  }
  out.r = std::move(m);
  return out;
}

int rank(const MatQ& m) { return static_cast<int>(rref(m).pivots.size()); }

MatQ kernel(const MatQ& m) {
  Rref e = rref(m);
  const Eigen::Index n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (int p : e.pivots) is_pivot[p] = true;
  MatQ basis = MatQ::Zero(n, n - static_cast<Eigen::Index>(e.pivots.size()));
  Eigen::Index c = 0;
  for (Eigen::Index free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    basis(free, c) = 1;
    for (size_t r = 0; r < e.pivots.size(); ++r) basis(e.pivots[r], c) = -e.r(r, free);
    ++c;
  }
  return basis;
}

MatQ column_basis(const MatQ& m) {
  Rref e = rref(m);
  MatQ out(m.rows(), static_cast<Eigen::Index>(e.pivots.size()));
  for (size_t i = 0; i < e.pivots.size(); ++i) out.col(i) = m.col(e.pivots[i]);
  return out;
}

MatQ inverse(const MatQ& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw DimensionMismatch("inverse of a non-square matrix");
  MatQ aug(n, 2 * n);
  aug << m, MatQ::Identity(n, n);
  Rref e = rref(aug);
  if (static_cast<Eigen::Index>(e.pivots.size()) < n || e.pivots[n - 1] != n - 1)
    throw PreconditionViolation("matrix is singular");
  return e.r.rightCols(n);
}

MatQ hstack(const MatQ& a, const MatQ& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  MatQ out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

MatQ extend_basis(const MatQ& basis, const MatQ& pool) {
  MatQ all = hstack(basis, pool);
  Rref e = rref(all);
  MatQ out(all.rows(), static_cast<Eigen::Index>(e.pivots.size()));
  for (size_t i = 0; i < e.pivots.size(); ++i) out.col(i) = all.col(e.pivots[i]);
  return out;
}

int numeric_rank(const MatD& m, double rtol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatD> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rtol * s(0)) ++r;
  return r;
}

int numeric_rank(const MatC& m, double rtol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rtol * s(0)) ++r;
  return r;
}

MatD numeric_kernel(const MatD& m, double rtol) {
  Eigen::JacobiSVD<MatD> svd(m, Eigen::ComputeFullV);
  int r = numeric_rank(m, rtol);
  return svd.matrixV().rightCols(m.cols() - r);
}

MatD numeric_range(const MatD& m, double rtol) {
  Eigen::JacobiSVD<MatD> svd(m, Eigen::ComputeFullU);
  int r = numeric_rank(m, rtol);
  return svd.matrixU().leftCols(r);
}

double max_abs(const MatD& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double max_abs(const MatQ& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) best = std::max(best, std::abs(to_double(m(i, j))));
  return best;
}

}  // namespace pencurv
