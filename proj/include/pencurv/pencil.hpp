#pragma once

#include "pencurv/errors.hpp"
#include "pencurv/linalg.hpp"
#include "pencurv/rational.hpp"

#include <array>
#include <vector>

namespace pencurv {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 12;

// A pair of real symmetric d x d matrices, 2 <= d <= 12.
// Exact pencils must be symmetric entry for entry; float pencils are
// accepted within 1e-12 relative asymmetry and then symmetrized.
template <class T> struct SymmetricPencil {
  Mat<T> A;
  Mat<T> B;

  SymmetricPencil() = default;
  SymmetricPencil(Mat<T> a, Mat<T> b);

  int dim() const { return static_cast<int>(A.rows()); }
};

using PencilQ = SymmetricPencil<Rational>;
using PencilD = SymmetricPencil<double>;

// coeffs[k] multiplies s^k t^(d-k).
template <class T> struct BinaryForm {
  std::vector<T> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const {
    for (const T& c : coeffs)
      if (c != T(0)) return false;
    return true;
  }
  bool operator==(const BinaryForm&) const = default;
};

template <class T> using SamplePoint = std::array<T, 2>;

// Exact: [1:0], [0:1], (k,1) for k = 1..d-1.
// Float: d+1 equiangular points on the upper half circle starting at [1:0].
template <class T> std::vector<SamplePoint<T>> default_samples(int d);

template <class T> BinaryForm<T> det_pencil(const SymmetricPencil<T>& p);
template <class T>
BinaryForm<T> det_pencil(const SymmetricPencil<T>& p, const std::vector<SamplePoint<T>>& samples);

template <class T> T eval_form(const BinaryForm<T>& f, const T& s, const T& t);
Complex eval_form(const BinaryForm<double>& f, Complex s, Complex t);

// (-1)^d det((s - s0) A + (t - t0) B)
template <class T>
T shifted_jacobian(const SymmetricPencil<T>& p, const T& s0, const T& t0, const T& s, const T& t);

// g(s, t) = f(l s + l' t, m s + m' t) for n = [[l, m], [l', m']].
template <class T> BinaryForm<T> substitute(const BinaryForm<T>& f, const Mat2<T>& n);

// (M A M^T, M B M^T)
template <class T> SymmetricPencil<T> act_rho(const Mat<T>& m, const SymmetricPencil<T>& p);
// (l A + m B, l' A + m' B) for n = [[l, m], [l', m']]
template <class T> SymmetricPencil<T> act_sigma(const Mat2<T>& n, const SymmetricPencil<T>& p);

template <class T> double scale_of(const SymmetricPencil<T>& p) {
  return std::max(max_abs(p.A), max_abs(p.B));
}

PencilD to_double(const PencilQ& p);
// Every double is a dyadic rational, so this conversion is exact.
PencilQ to_exact(const PencilD& p);
inline const PencilQ& to_exact(const PencilQ& p) { return p; }
BinaryForm<double> to_double(const BinaryForm<Rational>& f);

}  // namespace pencurv
