#pragma once

// Builders, hand-rolled generators and the curated pencil suite shared by
// the unit tests and the acceptance binary.

#include "pencurv/classify.hpp"
#include "pencurv/linalg.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace pencurv::testing {

inline MatQ mq(std::initializer_list<std::initializer_list<long>> rows) {
  MatQ m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (long x : row) m(i, j++) = Rational(x);
    ++i;
  }
  return m;
}

inline MatQ diag_q(std::initializer_list<long> entries) {
  MatQ m = MatQ::Zero(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (long x : entries) m(i, i) = Rational(x), ++i;
  return m;
}

inline MatQ zero_q(int d) { return MatQ::Zero(d, d); }

// E_ij + E_ji (0-based)
inline MatQ sym_unit(int d, int i, int j) {
  MatQ m = zero_q(d);
  m(i, j) = 1;
  m(j, i) = 1;
  return m;
}

inline MatQ block_diag(const MatQ& a, const MatQ& b) {
  MatQ m = MatQ::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

inline PencilQ block_diag(const PencilQ& p, const PencilQ& q) {
  return {block_diag(p.A, q.A), block_diag(p.B, q.B)};
}

// Appends blocks (a, b) that may be smaller than a pencil.
inline PencilQ block_diag(const PencilQ& p, const MatQ& a, const MatQ& b) {
  return {block_diag(p.A, a), block_diag(p.B, b)};
}

// Anti-identity and the anti-diagonal Jordan building block with
// J_r(lambda) = Jt_r(lambda) It_r.
inline MatQ anti_identity_q(int r) {
  MatQ m = zero_q(r);
  for (int i = 0; i < r; ++i) m(i, r - 1 - i) = 1;
  return m;
}

inline MatQ jordan_tilde(int r, const Rational& lambda) {
  MatQ j = zero_q(r);
  for (int i = 0; i < r; ++i) j(i, i) = lambda;
  for (int i = 0; i + 1 < r; ++i) j(i, i + 1) = 1;
  return j * anti_identity_q(r);
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  Rational small(int range = 5, int max_den = 3) {
    return Rational(uniform(-range, range)) / Rational(uniform(1, max_den));
  }
  Rational nonzero(int range = 5, int max_den = 3) {
    Rational x;
    do x = small(range, max_den);
    while (x == 0);
    return x;
  }

  MatQ symmetric(int d, int range = 5, int max_den = 3) {
    MatQ m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) m(i, j) = m(j, i) = small(range, max_den);
    return m;
  }

  PencilQ pencil(int d) { return {symmetric(d), symmetric(d)}; }

  // Product of elementary shears and a diagonal rescaling: det = 1 exactly.
  MatQ sl(int d) {
    MatQ m = MatQ::Identity(d, d);
    for (int step = 0; step < 2 * d; ++step) {
      int i = uniform(0, d - 1), j = uniform(0, d - 2);
      if (j >= i) ++j;
      MatQ e = MatQ::Identity(d, d);
      e(i, j) = small(2, 2);
      m = e * m;
    }
    Rational c = Rational(uniform(1, 3)) / Rational(uniform(1, 3));
    int i = uniform(0, d - 1), j = uniform(0, d - 2);
    if (j >= i) ++j;
    MatQ s = MatQ::Identity(d, d);
    s(i, i) = c;
    s(j, j) = 1 / c;
    return s * m;
  }

  Mat2<Rational> sl2() {
    Mat2<Rational> n = Mat2<Rational>::Identity();
    for (int step = 0; step < 3; ++step) {
      Mat2<Rational> e = Mat2<Rational>::Identity();
      if (uniform(0, 1)) e(0, 1) = small(2, 2);
      else e(1, 0) = small(2, 2);
      n = e * n;
    }
    Rational c = Rational(uniform(1, 3)) / Rational(uniform(1, 3));
    Mat2<Rational> s;
    s << c, 0, 0, 1 / c;
    return s * n;
  }

  // Diagonal pencil with det = prod (a_j s + b_j t)^{m_j} for distinct
  // real points [a_j : b_j], then conjugated by a random SL(d).
  PencilQ with_multiplicities(const std::vector<int>& mults) {
    int d = 0;
    for (int m : mults) d += m;
    std::vector<std::pair<Rational, Rational>> pts;
    while (pts.size() < mults.size()) {
      Rational a = small(4, 2), b = small(4, 2);
      if (a == 0 && b == 0) continue;
      bool fresh = true;
      for (const auto& [x, y] : pts)
        if (x * b == y * a) fresh = false;
      if (fresh) pts.emplace_back(a, b);
    }
    MatQ A = zero_q(d), B = zero_q(d);
    int k = 0;
    for (size_t j = 0; j < mults.size(); ++j)
      for (int r = 0; r < mults[j]; ++r, ++k) {
        A(k, k) = pts[j].first;
        B(k, k) = pts[j].second;
      }
    return act_rho(sl(d), PencilQ{A, B});
  }
};

inline PencilD to_float(const PencilQ& p) { return to_double(p); }

// Canonical pencils with their hand-derived verdicts.
struct Canonical {
  std::string name;
  PencilQ pencil;
  VerdictKind kind;
  int m_star = 0;     // WellCurved / FlatNonvanishing
  bool critical = false;
  int n0 = 0;
  std::vector<int> blocks;
  Rational lambda_star;
  int k = 0, l_h = 0;  // kernel split
  Rational epsilon;
  int kernel_dim = 0;  // common kernel
};

inline PencilQ well_curved_d2() { return {diag_q({1, -1}), mq({{0, 1}, {1, 0}})}; }
inline PencilQ identity_d2() { return {diag_q({1, 1}), diag_q({1, 1})}; }
inline PencilQ kernel_split_d3() { return {sym_unit(3, 0, 2), sym_unit(3, 1, 2)}; }
inline PencilQ common_kernel_d2() { return {diag_q({1, 0}), zero_q(2)}; }
inline PencilQ jordan_d4() {
  return {block_diag(jordan_tilde(2, 0), jordan_tilde(2, 0)), block_diag(anti_identity_q(2), anti_identity_q(2))};
}

inline std::vector<Canonical> canonical_suite() {
  std::vector<Canonical> out;
  auto wc = [&](std::string name, PencilQ p, int m, bool crit) {
    Canonical c{std::move(name), std::move(p), VerdictKind::WellCurved};
    c.m_star = m;
    c.critical = crit;
    out.push_back(c);
  };
  auto flat = [&](std::string name, PencilQ p, int m, int n0, std::vector<int> blocks, Rational lambda) {
    Canonical c{std::move(name), std::move(p), VerdictKind::FlatNonvanishing};
    c.m_star = m;
    c.n0 = n0;
    c.blocks = std::move(blocks);
    c.lambda_star = lambda;
    out.push_back(c);
  };
  auto split = [&](std::string name, PencilQ p, int k, int l, Rational eps) {
    Canonical c{std::move(name), std::move(p), VerdictKind::DegenerateKernelSplit};
    c.k = k;
    c.l_h = l;
    c.epsilon = eps;
    out.push_back(c);
  };
  auto common = [&](std::string name, PencilQ p, int dim) {
    Canonical c{std::move(name), std::move(p), VerdictKind::DegenerateCommonKernel};
    c.kernel_dim = dim;
    out.push_back(c);
  };

  wc("diag(1,-1), offdiag", well_curved_d2(), 1, true);
  wc("2I, offdiag", PencilQ{diag_q({2, 2}), mq({{0, 1}, {1, 0}})}, 1, true);
  wc("offdiag, I", PencilQ{mq({{0, 1}, {1, 0}}), diag_q({1, 1})}, 1, true);
  wc("d=4 two rotations", block_diag(well_curved_d2(), PencilQ{diag_q({1, -1}), mq({{0, 2}, {2, 0}})}), 1, false);
  wc("d=4 st squared", PencilQ{diag_q({1, 1, 0, 0}), diag_q({0, 0, 1, 1})}, 2, true);
  flat("A = B = I", identity_d2(), 2, 2, {}, 1);
  flat("diag(1,0), offdiag", PencilQ{diag_q({1, 0}), mq({{0, 1}, {1, 0}})}, 2, 0, {2}, 0);
  flat("d=4 two Jordan blocks", jordan_d4(), 4, 0, {2, 2}, 0);
  flat("d=3 diag(1,1,2), I", PencilQ{diag_q({1, 1, 2}), diag_q({1, 1, 1})}, 2, 2, {}, 1);
  split("d=3 kernel split", kernel_split_d3(), 2, 1, Rational(1, 2));
  split("d=6 doubled kernel split", block_diag(kernel_split_d3(), kernel_split_d3()), 4, 2, Rational(1, 2));
  split("d=4 kernel split plus a line", block_diag(kernel_split_d3(), diag_q({1}), diag_q({0})), 2, 1,
        Rational(1, 3));
  common("diag(1,0), 0", common_kernel_d2(), 1);
  common("d=3 rotation plus kernel", block_diag(well_curved_d2(), diag_q({0}), diag_q({0})), 1);
  return out;
}

struct SuiteEntry {
  std::string name;
  PencilQ pencil;
  const Canonical* canonical = nullptr;  // hand-derived verdict, when known
};

// Canonical pencils, their rho/sigma conjugates, random rational pencils
// for d = 2..6 and random pencils with prescribed root multiplicities.
inline std::vector<SuiteEntry> curated_suite(const std::vector<Canonical>& canon, std::uint64_t seed = 20240611) {
  Gen g(seed);
  std::vector<SuiteEntry> out;
  for (const auto& c : canon) {
    out.push_back({c.name, c.pencil, &c});
    for (int rep = 0; rep < 3; ++rep) {
      PencilQ q = act_sigma(g.sl2(), act_rho(g.sl(c.pencil.dim()), c.pencil));
      out.push_back({c.name + " conjugate " + std::to_string(rep), q, nullptr});
    }
  }
  for (int d = 2; d <= 6; ++d)
    for (int rep = 0; rep < 22; ++rep) out.push_back({"random d=" + std::to_string(d), g.pencil(d), nullptr});
  const std::vector<std::vector<int>> shapes = {{1, 1}, {2}, {2, 1}, {3}, {2, 2}, {3, 1}, {2, 1, 1},
                                                {4, 1}, {3, 2}, {2, 2, 1}, {3, 3}, {4, 2}, {5, 1}, {2, 2, 2}};
  for (const auto& s : shapes)
    for (int rep = 0; rep < 3; ++rep) out.push_back({"multiplicities", g.with_multiplicities(s), nullptr});
  return out;
}

// Verdict data that rho and sigma must preserve (the eigenvalue itself may move).
struct Signature {
  VerdictKind kind;
  int m_star = 0;
  bool critical = false;
  int n0 = 0;
  std::vector<int> blocks;
  int k = 0, l_h = 0;
  Rational epsilon;
  int kernel_dim = 0;
  bool operator==(const Signature&) const = default;
};

template <class T> Signature signature(const Verdict<T>& v) {
  Signature s{kind_of(v)};
  if (const auto* w = std::get_if<WellCurved>(&v)) {
    s.m_star = w->m_star;
    s.critical = w->critical;
  } else if (const auto* f = std::get_if<FlatNonvanishing<T>>(&v)) {
    s.m_star = f->m_star;
    if (f->blocks_resolved) {
      s.n0 = f->n0;
      s.blocks = f->block_sizes;
    }
  } else if (const auto* k = std::get_if<DegenerateKernelSplit<T>>(&v)) {
    s.k = k->k;
    s.l_h = k->l_h;
    s.epsilon = k->epsilon;
  } else {
    s.kernel_dim = static_cast<int>(std::get<DegenerateCommonKernel<T>>(v).kernel.cols());
  }
  return s;
}

inline Signature expected(const Canonical& c) {
  Signature s{c.kind, c.m_star, c.critical, c.n0, c.blocks, c.k, c.l_h, c.epsilon, c.kernel_dim};
  return s;
}

}  // namespace pencurv::testing
