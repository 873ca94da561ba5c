#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>
#include <type_traits>

namespace pencurv {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Complex = std::complex<double>;

template <class T> using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T> using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T> using Mat2 = Eigen::Matrix<T, 2, 2>;

using MatQ = Mat<Rational>;
using VecQ = Vec<Rational>;
using MatD = Mat<double>;
using VecD = Vec<double>;
using MatC = Mat<Complex>;
using VecC = Vec<Complex>;

template <class T> inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

// Accepts integers, "p/q" and plain decimals such as "-1.25" or "3e-2".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline Rational to_exact(double x) { return Rational(x); }
inline const Rational& to_exact(const Rational& q) { return q; }

template <class T> inline T abs_value(const T& x) { return x < T(0) ? T(-x) : x; }

template <class T> Mat<double> to_double(const Mat<T>& m) {
  Mat<double> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

template <class T> Mat<Complex> to_complex(const Mat<T>& m) {
  return to_double(m).template cast<Complex>();
}

inline MatQ to_exact(const MatD& m) {
  MatQ out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

inline const MatQ& to_exact(const MatQ& m) { return m; }

}  // namespace pencurv
