#pragma once

#include "pencurv/pencil.hpp"
#include "pencurv/roots.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace pencurv {

enum class VerdictKind { WellCurved, FlatNonvanishing, DegenerateKernelSplit, DegenerateCommonKernel };

const char* to_string(VerdictKind k);

struct WellCurved {
  int m_star = 0;
  bool critical = false;  // m_star == d / 2
};

template <class T> struct FlatNonvanishing {
  int m_star = 0;
  // Relabelling (s0, t0) and N0 = [[0, -1/s0], [s0, t0]] used when B is
  // singular; identity otherwise. The eigenvalue refers to A' B'^{-1} of
  // the relabelled pair.
  std::array<T, 2> base_point{T(0), T(1)};
  Mat2<T> relabel = Mat2<T>::Identity();
  T lambda_star = T(0);
  int n0 = 0;                     // Jordan blocks of size one at lambda_star
  std::vector<int> block_sizes;   // Jordan blocks of size > 1, descending
  bool blocks_resolved = true;    // false in float mode without unsafe numerics
  ProjectiveRoot root;            // the root of multiplicity m_star
};

template <class T> struct DegenerateKernelSplit {
  Mat<T> V;  // columns span the union of generic kernels
  Mat<T> H;  // columns span (sA + tB) V for generic (s, t)
  int k = 0;
  int l_h = 0;
  Rational epsilon;  // (k - l_h) / (d - l_h)
};

template <class T> struct DegenerateCommonKernel {
  Mat<T> kernel;  // basis of ker A  /\  ker B
  Mat<T> W;       // basis of the span of the images of A and B
};

template <class T>
using Verdict = std::variant<WellCurved, FlatNonvanishing<T>, DegenerateKernelSplit<T>, DegenerateCommonKernel<T>>;

template <class T> VerdictKind kind_of(const Verdict<T>& v) { return static_cast<VerdictKind>(v.index()); }

struct ClassifyOptions {
  RootOptions roots;
  double zero_rtol = 1e-10;  // float: coefficients below this times scale^d are "zero"
  double rank_rtol = 1e-8;   // float: singular values below this times sigma_max are "zero"
  bool unsafe_numerics = false;  // float Jordan structure by numerical ranks
  std::uint64_t seed = 0x5eedULL;
};

inline RootMultiset roots_of(const BinaryForm<double>& f, const ClassifyOptions& o) {
  return roots_with_multiplicities(f, o.roots);
}
inline RootMultiset roots_of(const BinaryForm<Rational>& f, const ClassifyOptions&) {
  return roots_with_multiplicities(f);
}

template <class T> Verdict<T> classify(const SymmetricPencil<T>& p, const ClassifyOptions& opts = {});

template <class T>
FlatNonvanishing<T> flat_eigenstructure(const SymmetricPencil<T>& p, const ClassifyOptions& opts = {});
template <class T>
DegenerateKernelSplit<T> kernel_split(const SymmetricPencil<T>& p, const ClassifyOptions& opts = {});
template <class T>
DegenerateCommonKernel<T> common_kernel(const SymmetricPencil<T>& p, const ClassifyOptions& opts = {});

// For det(sA + tB) not identically zero and U of full column rank: the
// stacked matrix [AU; BU] has rank at least dim U. Also checks that
// (sA + tB) U has full rank at a point where det(sA + tB) != 0.
bool rogers_rank_check(const PencilQ& p, const MatQ& U);

struct PointVerdict {
  VecD point;
  std::optional<Verdict<double>> verdict;
  std::string error;
};

struct SurfaceReport {
  std::vector<PointVerdict> points;
  bool constant = true;  // same kind and m_star at every classified point
};

using HessianPair = std::function<std::pair<MatD, MatD>(const VecD&)>;
SurfaceReport classify_surface_pointwise(const HessianPair& hessians, const std::vector<VecD>& points,
                                         const ClassifyOptions& opts = {});

std::string describe(const Verdict<Rational>& v);
std::string describe(const Verdict<double>& v);

}  // namespace pencurv
