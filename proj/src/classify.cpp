#include "pencurv/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace pencurv {

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::WellCurved: return "WellCurved";
    case VerdictKind::FlatNonvanishing: return "FlatNonvanishing";
    case VerdictKind::DegenerateKernelSplit: return "DegenerateKernelSplit";
    case VerdictKind::DegenerateCommonKernel: return "DegenerateCommonKernel";
  }
  return "?";
}

namespace {

template <class T> bool form_is_zero(const BinaryForm<T>& f, const SymmetricPencil<T>& p, const ClassifyOptions& o) {
  if constexpr (is_exact_v<T>) {
    return f.is_zero();
  } else {
    if (f.is_zero()) return true;
    double bound = o.zero_rtol * std::pow(std::max(scale_of(p), 1e-300), p.dim());
    for (double c : f.coeffs)
      if (std::abs(c) >= bound) return false;
    throw NumericallyAmbiguous("determinant form is numerically zero but not exactly zero; use exact mode");
  }
}

template <class T> bool is_nonzero_det(const Mat<T>& m, double scale, const ClassifyOptions& o) {
  if constexpr (is_exact_v<T>) {
    return det(m) != 0;
  } else {
    return std::abs(det(m)) > o.zero_rtol * std::pow(std::max(scale, 1e-300), m.rows());
  }
}

template <class T> Mat<T> inverse_of(const Mat<T>& m) {
  if constexpr (is_exact_v<T>) return inverse(m);
  else return m.inverse();
}

template <class T> int rank_of(const Mat<T>& m, const ClassifyOptions& o) {
  if constexpr (is_exact_v<T>) return rank(m);
  else return numeric_rank(m, o.rank_rtol);
}

template <class T> Mat<T> kernel_of(const Mat<T>& m, const ClassifyOptions& o) {
  if constexpr (is_exact_v<T>) return kernel(m);
  else return numeric_kernel(m, o.rank_rtol);
}

template <class T> Mat<T> range_of(const Mat<T>& m, const ClassifyOptions& o) {
  if constexpr (is_exact_v<T>) return column_basis(m);
  else return numeric_range(m, o.rank_rtol);
}

template <class T> Mat<T> stack_cols(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  Mat<T> out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

// Picks (s0, t0) with det(s0 A + t0 B) != 0: (0, 1) if possible, then
// (1, t0) for t0 = 0, 1, -1, 2, -2, ...
template <class T> std::array<T, 2> base_point(const SymmetricPencil<T>& p, const ClassifyOptions& o) {
  const double sc = scale_of(p);
  if (is_nonzero_det<T>(p.B, sc, o)) return {T(0), T(1)};
  for (int i = 0; i <= 2 * p.dim() + 2; ++i) {
    int t0 = (i + 1) / 2 * (i % 2 ? 1 : -1);
    Mat<T> m = p.A + T(t0) * p.B;
    if (is_nonzero_det<T>(m, sc, o)) return {T(1), T(t0)};
  }
  throw PreconditionViolation("no nonsingular member found on the sample grid");
}

template <class T> Mat2<T> relabel_matrix(const std::array<T, 2>& bp) {
  Mat2<T> n = Mat2<T>::Identity();
  if (bp[0] != T(0)) {
    n(0, 0) = T(0);
    n(0, 1) = T(-1) / bp[0];
    n(1, 0) = bp[0];
    n(1, 1) = bp[1];
  }
  return n;
}

template <class T> Mat<T> matrix_power(const Mat<T>& m, int k) {
  Mat<T> r = Mat<T>::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) r = (r * m).eval();
  return r;
}

}  // namespace

template <class T> FlatNonvanishing<T> flat_eigenstructure(const SymmetricPencil<T>& p, const ClassifyOptions& opts) {
  const int d = p.dim();
  BinaryForm<T> delta = det_pencil(p);
  if (form_is_zero(delta, p, opts)) throw PreconditionViolation("flat eigenstructure needs det(sA + tB) != 0");
  RootMultiset roots = roots_of(delta, opts);
  const int m_star = roots.max_multiplicity();
  if (2 * m_star <= d) throw PreconditionViolation("pencil is well-curved, not flat");

  FlatNonvanishing<T> out;
  out.m_star = m_star;
  out.root = roots.max_root();
  out.base_point = base_point(p, opts);
  out.relabel = relabel_matrix(out.base_point);
  SymmetricPencil<T> q = act_sigma(out.relabel, p);
  Mat<T> c = q.A * inverse_of(q.B);

  if constexpr (is_exact_v<T>) {
    // roots of det(A' + t B') are t = -lambda_j
    BinaryForm<T> dq = det_pencil(q);
    PolyQ poly(d + 1);
    for (int j = 0; j <= d; ++j) poly[j] = dq.coeffs[d - j];
    auto factors = square_free_decomposition(poly);
    if (static_cast<int>(factors.size()) < m_star || factors[m_star - 1].size() != 2)
      throw PreconditionViolation("internal: dominant eigenvalue factor is not linear");
    const PolyQ& g = factors[m_star - 1];
    out.lambda_star = g[0] / g[1];
  } else {
    Mat2<T> inv_t = out.relabel.transpose().inverse();
    Complex s1 = inv_t(0, 0) * out.root.a + inv_t(0, 1) * out.root.b;
    Complex t1 = inv_t(1, 0) * out.root.a + inv_t(1, 1) * out.root.b;
    out.lambda_star = -(t1 / s1).real();
  }

  if (is_exact_v<T> || opts.unsafe_numerics) {
    Mat<T> nil = c - out.lambda_star * Mat<T>::Identity(d, d);
    std::vector<int> r(m_star + 2);
    Mat<T> power = Mat<T>::Identity(d, d);
    for (int k = 0; k <= m_star + 1; ++k) {
      r[k] = rank_of<T>(power, opts);
      power = (power * nil).eval();
    }
    auto at_least = [&](int k) { return r[k - 1] - r[k]; };
    out.n0 = at_least(1) - at_least(2);
    for (int k = m_star; k >= 2; --k)
      for (int i = 0; i < at_least(k) - at_least(k + 1); ++i) out.block_sizes.push_back(k);
    int total = out.n0;
    for (int b : out.block_sizes) total += b;
    if (total != m_star)
      throw NumericallyAmbiguous("Jordan block sizes do not add up to the root multiplicity");
  } else {
    out.blocks_resolved = false;
  }
  return out;
}

template <class T> DegenerateCommonKernel<T> common_kernel(const SymmetricPencil<T>& p, const ClassifyOptions& opts) {
  const int d = p.dim();
  Mat<T> stacked(2 * d, d);
  stacked << p.A, p.B;
  DegenerateCommonKernel<T> out;
  out.kernel = kernel_of<T>(stacked, opts);
  if (out.kernel.cols() == 0) throw PreconditionViolation("A and B have no common kernel");
  Mat<T> images(d, 2 * d);
  images << p.A, p.B;
  out.W = range_of<T>(images, opts);
  return out;
}

template <class T> DegenerateKernelSplit<T> kernel_split(const SymmetricPencil<T>& p, const ClassifyOptions& opts) {
  const int d = p.dim();
  std::mt19937_64 rng(opts.seed);
  auto member = [&](const T& s, const T& t) { return Mat<T>(s * p.A + t * p.B); };

  int generic_rank = 0;
  std::array<T, 2> best{T(1), T(0)};
  for (int k = 0; k <= d; ++k) {
    int r = rank_of<T>(member(T(1), T(k)), opts);
    if (r > generic_rank) {
      generic_rank = r;
      best = {T(1), T(k)};
    }
  }
  if (generic_rank == d) throw PreconditionViolation("det(sA + tB) is not identically zero");

  // a maximal nonvanishing minor at the best point picks the generic set
  std::vector<int> rows, cols;
  if constexpr (is_exact_v<T>) {
    Mat<T> m = member(best[0], best[1]);
    cols = rref(m).pivots;
    rows = rref(m.transpose()).pivots;
  }
  auto generic = [&](const T& s, const T& t) {
    Mat<T> m = member(s, t);
    if constexpr (is_exact_v<T>) {
      Mat<T> minor(generic_rank, generic_rank);
      for (int i = 0; i < generic_rank; ++i)
        for (int j = 0; j < generic_rank; ++j) minor(i, j) = m(rows[i], cols[j]);
      return det(minor) != 0;
    } else {
      return numeric_rank(m, opts.rank_rtol) == generic_rank;
    }
  };
  auto draw = [&]() -> std::array<T, 2> {
    if constexpr (is_exact_v<T>) {
      std::uniform_int_distribution<int> ds(1, 97), dt(-97, 97);
      return {T(ds(rng)), T(dt(rng))};
    } else {
      std::uniform_real_distribution<double> th(0.0, 3.14159265358979);
      double a = th(rng);
      return {std::cos(a), std::sin(a)};
    }
  };

  std::vector<std::array<T, 2>> samples;
  Mat<T> span(d, 0);
  int stable_since = 0, dim_before = -1;
  for (int attempt = 0; attempt < 64 * d && (samples.size() < static_cast<size_t>(2 * d + 1) || stable_since < d);
       ++attempt) {
    auto st = draw();
    if (!generic(st[0], st[1])) continue;
    samples.push_back(st);
    span = range_of<T>(stack_cols<T>(span, kernel_of<T>(member(st[0], st[1]), opts)), opts);
    int dim = static_cast<int>(span.cols());
    stable_since = dim == dim_before ? stable_since + 1 : 0;
    dim_before = dim;
  }
  if (samples.size() < static_cast<size_t>(2 * d + 1) || stable_since < d)
    throw InconsistentImages("span of generic kernels did not stabilise");

  DegenerateKernelSplit<T> out;
  out.V = span;
  out.H = range_of<T>(Mat<T>(member(samples[0][0], samples[0][1]) * out.V), opts);
  out.k = static_cast<int>(out.V.cols());
  out.l_h = static_cast<int>(out.H.cols());
  for (const auto& st : samples) {
    Mat<T> img = member(st[0], st[1]) * out.V;
    if (rank_of<T>(stack_cols<T>(out.H, img), opts) != out.l_h)
      throw InconsistentImages("images of the kernel span differ between generic parameters");
  }
  Mat<T> cross = out.V.transpose() * out.H;
  bool orthogonal;
  if constexpr (is_exact_v<T>) {
    orthogonal = true;
    for (Eigen::Index i = 0; i < cross.size(); ++i) orthogonal = orthogonal && cross(i) == 0;
  } else {
    orthogonal = cross.size() == 0 || cross.cwiseAbs().maxCoeff() <= 1e-6;
  }
  if (!orthogonal) throw InconsistentImages("kernel span is not orthogonal to its image");
  out.epsilon = Rational(out.k - out.l_h) / Rational(d - out.l_h);
  return out;
}

template <class T> Verdict<T> classify(const SymmetricPencil<T>& p, const ClassifyOptions& opts) {
  const int d = p.dim();
  BinaryForm<T> delta = det_pencil(p);
  if (!form_is_zero(delta, p, opts)) {
    RootMultiset roots = roots_of(delta, opts);
    const int m_star = roots.max_multiplicity();
    if (2 * m_star <= d) return WellCurved{m_star, 2 * m_star == d};
    return flat_eigenstructure(p, opts);
  }
  Mat<T> stacked(2 * d, d);
  stacked << p.A, p.B;
  if (rank_of<T>(stacked, opts) < d) return common_kernel(p, opts);
  return kernel_split(p, opts);
}

bool rogers_rank_check(const PencilQ& p, const MatQ& u) {
  const int d = p.dim();
  if (u.rows() != d) throw DimensionMismatch("subspace basis has the wrong number of rows");
  if (rank(u) != u.cols()) throw PreconditionViolation("subspace basis is not of full column rank");
  if (det_pencil(p).is_zero()) throw PreconditionViolation("det(sA + tB) vanishes identically");
  MatQ stacked(2 * d, u.cols());
  stacked << p.A * u, p.B * u;
  bool stacked_ok = rank(stacked) >= u.cols();
  for (int k = 0;; ++k) {
    MatQ m = p.A + Rational(k) * p.B;
    if (det(m) == 0) continue;
    bool member_ok = rank(MatQ(m * u)) == u.cols();
    if (member_ok != stacked_ok) throw PreconditionViolation("internal: rank checks disagree");
    return stacked_ok;
  }
}

namespace {

template <class T> std::string describe_impl(const Verdict<T>& v) {
  std::ostringstream os;
  auto num = [](const T& x) {
    if constexpr (is_exact_v<T>) return to_string(x);
    else return std::to_string(x);
  };
  std::visit(
      [&](const auto& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, WellCurved>) {
          os << "WellCurved m*=" << x.m_star << (x.critical ? " critical" : " non-critical");
        } else if constexpr (std::is_same_v<X, FlatNonvanishing<T>>) {
          os << "FlatNonvanishing m*=" << x.m_star << " lambda*=" << num(x.lambda_star);
          if (x.blocks_resolved) {
            os << " n0=" << x.n0 << " blocks=[";
            for (size_t i = 0; i < x.block_sizes.size(); ++i) os << (i ? "," : "") << x.block_sizes[i];
            os << "]";
          } else {
            os << " (Jordan blocks unresolved in float mode)";
          }
        } else if constexpr (std::is_same_v<X, DegenerateKernelSplit<T>>) {
          os << "DegenerateKernelSplit k=" << x.k << " l_H=" << x.l_h << " epsilon=" << to_string(x.epsilon);
        } else {
          os << "DegenerateCommonKernel kernel_dim=" << x.kernel.cols() << " image_dim=" << x.W.cols();
        }
      },
      v);
  return os.str();
}

}  // namespace

std::string describe(const Verdict<Rational>& v) { return describe_impl(v); }
std::string describe(const Verdict<double>& v) { return describe_impl(v); }

SurfaceReport classify_surface_pointwise(const HessianPair& hessians, const std::vector<VecD>& points,
                                         const ClassifyOptions& opts) {
  SurfaceReport out;
  std::optional<std::pair<int, int>> signature;
  for (const auto& x : points) {
    PointVerdict pv;
    pv.point = x;
    try {
      auto [h1, h2] = hessians(x);
      pv.verdict = classify(PencilD(h1, h2), opts);
      int m = 0;
      if (auto* w = std::get_if<WellCurved>(&*pv.verdict)) m = w->m_star;
      if (auto* f = std::get_if<FlatNonvanishing<double>>(&*pv.verdict)) m = f->m_star;
      std::pair<int, int> sig{static_cast<int>(pv.verdict->index()), m};
      if (signature && *signature != sig) out.constant = false;
      signature = sig;
    } catch (const Error& e) {
      pv.error = e.what();
      out.constant = false;
    }
    out.points.push_back(std::move(pv));
  }
  return out;
}

template Verdict<double> classify(const PencilD&, const ClassifyOptions&);
template Verdict<Rational> classify(const PencilQ&, const ClassifyOptions&);
template FlatNonvanishing<double> flat_eigenstructure(const PencilD&, const ClassifyOptions&);
template FlatNonvanishing<Rational> flat_eigenstructure(const PencilQ&, const ClassifyOptions&);
template DegenerateKernelSplit<double> kernel_split(const PencilD&, const ClassifyOptions&);
template DegenerateKernelSplit<Rational> kernel_split(const PencilQ&, const ClassifyOptions&);
template DegenerateCommonKernel<double> common_kernel(const PencilD&, const ClassifyOptions&);
template DegenerateCommonKernel<Rational> common_kernel(const PencilQ&, const ClassifyOptions&);

}  // namespace pencurv
