#include "pencurv/pencil.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pencurv {

namespace {

template <class T> std::string entry_text(const T& x) {
  if constexpr (is_exact_v<T>) {
    return to_string(x);
  } else {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }
}

template <class T> void check_symmetric(Mat<T>& m, const char* name) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      bool ok;
      if constexpr (is_exact_v<T>) {
        ok = m(i, j) == m(j, i);
      } else {
        double tol = 1e-12 * std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))});
        ok = std::abs(m(i, j) - m(j, i)) <= tol;
      }
      if (!ok) {
        std::ostringstream os;
        os << name << "[" << i << "][" << j << "] = " << entry_text(m(i, j)) << " differs from "
           << name << "[" << j << "][" << i << "] = " << entry_text(m(j, i));
        throw NotSymmetric(os.str(), static_cast<int>(i), static_cast<int>(j));
      }
    }
  if constexpr (!is_exact_v<T>) m = (0.5 * (m + m.transpose())).eval();
}

// Coefficient vector of a binary form indexed by the power of s.
template <class T> std::vector<T> multiply(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out(a.size() + b.size() - 1, T(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

template <class T> T power(const T& x, int k) {
  T r(1);
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

template <class T> SymmetricPencil<T>::SymmetricPencil(Mat<T> a, Mat<T> b) : A(std::move(a)), B(std::move(b)) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw DimensionMismatch("pencil matrices must be square and of equal size");
  if (A.rows() < kMinDim || A.rows() > kMaxDim)
    throw DimensionMismatch("pencil dimension must lie in [2, 12], got " + std::to_string(A.rows()));
  if constexpr (!is_exact_v<T>) {
    if (!A.allFinite() || !B.allFinite()) throw PreconditionViolation("pencil entries must be finite");
  }
  check_symmetric(A, "A");
  check_symmetric(B, "B");
}

template <class T> std::vector<SamplePoint<T>> default_samples(int d) {
  std::vector<SamplePoint<T>> pts;
  if constexpr (is_exact_v<T>) {
    pts.push_back({T(1), T(0)});
    pts.push_back({T(0), T(1)});
    for (int k = 1; k <= d - 1; ++k) pts.push_back({T(k), T(1)});
  } else {
    for (int k = 0; k <= d; ++k) {
      double th = k * std::numbers::pi / (d + 1);
      pts.push_back({std::cos(th), std::sin(th)});
    }
  }
  return pts;
}

template <class T>
BinaryForm<T> det_pencil(const SymmetricPencil<T>& p, const std::vector<SamplePoint<T>>& samples) {
  const int d = p.dim();
  if (static_cast<int>(samples.size()) != d + 1)
    throw DimensionMismatch("interpolation needs exactly d + 1 sample points");
  Mat<T> v(d + 1, d + 1);
  Vec<T> y(d + 1);
  for (int i = 0; i <= d; ++i) {
    const auto& [s, t] = samples[i];
    for (int k = 0; k <= d; ++k) v(i, k) = power(s, k) * power(t, d - k);
    Mat<T> m = s * p.A + t * p.B;
    y(i) = det(m);
  }
  Vec<T> c;
  if constexpr (is_exact_v<T>) {
    MatQ aug(d + 1, d + 2);
    aug << v, y;
    Rref e = rref(aug);
    if (static_cast<int>(e.pivots.size()) != d + 1 || e.pivots.back() != d)
      throw PreconditionViolation("sample points must be pairwise non-proportional");
    c = e.r.col(d + 1);
  } else {
    Eigen::FullPivLU<MatD> lu(v);
    if (!lu.isInvertible()) throw PreconditionViolation("sample points must be pairwise non-proportional");
    c = lu.solve(y);
  }
  BinaryForm<T> f;
  f.coeffs.assign(c.data(), c.data() + c.size());
  return f;
}

template <class T> BinaryForm<T> det_pencil(const SymmetricPencil<T>& p) {
  return det_pencil(p, default_samples<T>(p.dim()));
}

template <class T> T eval_form(const BinaryForm<T>& f, const T& s, const T& t) {
  const int d = f.degree();
  if constexpr (is_exact_v<T>) {
    T acc(0);
    for (int k = 0; k <= d; ++k) acc += f.coeffs[k] * power(s, k) * power(t, d - k);
    return acc;
  } else {
    if (s == 0.0 && t == 0.0) return 0.0;
    if (std::abs(s) >= std::abs(t)) {
      double u = t / s, acc = f.coeffs[0];
      for (int k = 1; k <= d; ++k) acc = acc * u + f.coeffs[k];
      return acc * std::pow(s, d);
    }
    double u = s / t, acc = f.coeffs[d];
    for (int k = d - 1; k >= 0; --k) acc = acc * u + f.coeffs[k];
    return acc * std::pow(t, d);
  }
}

Complex eval_form(const BinaryForm<double>& f, Complex s, Complex t) {
  const int d = f.degree();
  if (s == 0.0 && t == 0.0) return 0.0;
  if (std::abs(s) >= std::abs(t)) {
    Complex u = t / s, acc = f.coeffs[0];
    for (int k = 1; k <= d; ++k) acc = acc * u + f.coeffs[k];
    return acc * std::pow(s, d);
  }
  Complex u = s / t, acc = f.coeffs[d];
  for (int k = d - 1; k >= 0; --k) acc = acc * u + f.coeffs[k];
  return acc * std::pow(t, d);
}

template <class T>
T shifted_jacobian(const SymmetricPencil<T>& p, const T& s0, const T& t0, const T& s, const T& t) {
  Mat<T> m = (s - s0) * p.A + (t - t0) * p.B;
  T v = det(m);
  return p.dim() % 2 ? T(-v) : v;
}

template <class T> BinaryForm<T> substitute(const BinaryForm<T>& f, const Mat2<T>& n) {
  const int d = f.degree();
  // first argument l s + l' t, second argument m s + m' t
  std::vector<T> first{n(1, 0), n(0, 0)}, second{n(1, 1), n(0, 1)};
  std::vector<std::vector<T>> fp(d + 1), sp(d + 1);
  fp[0] = sp[0] = {T(1)};
  for (int k = 1; k <= d; ++k) {
    fp[k] = multiply(fp[k - 1], first);
    sp[k] = multiply(sp[k - 1], second);
  }
  BinaryForm<T> g;
  g.coeffs.assign(d + 1, T(0));
  for (int k = 0; k <= d; ++k) {
    if (f.coeffs[k] == T(0)) continue;
    std::vector<T> term = multiply(fp[k], sp[d - k]);
    for (int j = 0; j <= d; ++j) g.coeffs[j] += f.coeffs[k] * term[j];
  }
  return g;
}

template <class T> SymmetricPencil<T> act_rho(const Mat<T>& m, const SymmetricPencil<T>& p) {
  if (m.rows() != p.dim() || m.cols() != p.dim()) throw DimensionMismatch("congruence matrix has wrong size");
  Mat<T> a = m * p.A * m.transpose();
  Mat<T> b = m * p.B * m.transpose();
  if constexpr (!is_exact_v<T>) {
    a = (0.5 * (a + a.transpose())).eval();
    b = (0.5 * (b + b.transpose())).eval();
  }
  return SymmetricPencil<T>(std::move(a), std::move(b));
}

template <class T> SymmetricPencil<T> act_sigma(const Mat2<T>& n, const SymmetricPencil<T>& p) {
  Mat<T> a = n(0, 0) * p.A + n(0, 1) * p.B;
  Mat<T> b = n(1, 0) * p.A + n(1, 1) * p.B;
  return SymmetricPencil<T>(std::move(a), std::move(b));
}

PencilD to_double(const PencilQ& p) { return PencilD(to_double(p.A), to_double(p.B)); }
PencilQ to_exact(const PencilD& p) { return PencilQ(to_exact(p.A), to_exact(p.B)); }

BinaryForm<double> to_double(const BinaryForm<Rational>& f) {
  BinaryForm<double> g;
  for (const auto& c : f.coeffs) g.coeffs.push_back(to_double(c));
  return g;
}

#define PENCURV_INSTANTIATE(T)                                                                        \
  template struct SymmetricPencil<T>;                                                                 \
  template std::vector<SamplePoint<T>> default_samples<T>(int);                                       \
  template BinaryForm<T> det_pencil(const SymmetricPencil<T>&);                                       \
  template BinaryForm<T> det_pencil(const SymmetricPencil<T>&, const std::vector<SamplePoint<T>>&);  \
  template T eval_form(const BinaryForm<T>&, const T&, const T&);                                     \
  template T shifted_jacobian(const SymmetricPencil<T>&, const T&, const T&, const T&, const T&);     \
  template BinaryForm<T> substitute(const BinaryForm<T>&, const Mat2<T>&);                            \
  template SymmetricPencil<T> act_rho(const Mat<T>&, const SymmetricPencil<T>&);                      \
  template SymmetricPencil<T> act_sigma(const Mat2<T>&, const SymmetricPencil<T>&);

PENCURV_INSTANTIATE(double)
PENCURV_INSTANTIATE(Rational)

}  // namespace pencurv
