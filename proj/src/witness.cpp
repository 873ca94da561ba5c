#include "pencurv/witness.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace pencurv {

GroupElement identity_element(int d) { return {MatC::Identity(d, d), Mat2<Complex>::Identity()}; }

GroupElement compose(const GroupElement& g, const GroupElement& h) { return {g.M * h.M, g.N * h.N}; }

ComplexPair act(const GroupElement& g, const ComplexPair& p) {
  if (g.M.rows() != p.A.rows()) throw DimensionMismatch("group element and pencil sizes differ");
  MatC a = g.N(0, 0) * p.A + g.N(0, 1) * p.B;
  MatC b = g.N(1, 0) * p.A + g.N(1, 1) * p.B;
  return {g.M * a * g.M.transpose(), g.M * b * g.M.transpose()};
}

double frobenius_norm(const ComplexPair& p) { return std::sqrt(p.A.squaredNorm() + p.B.squaredNorm()); }

bool is_special(const GroupElement& g, double tol) {
  return std::abs(det_float(g.M) - 1.0) <= tol && std::abs(g.N.determinant() - 1.0) <= tol;
}

GroupElement DestabilizingCurve::at(double lambda) const {
  GroupElement g = g0;
  for (Eigen::Index i = 0; i < g.M.rows(); ++i) g.M.row(i) *= std::pow(lambda, m_exponents[i]);
  for (int i = 0; i < 2; ++i) g.N.row(i) *= std::pow(lambda, n_exponents[i]);
  return g;
}

namespace {

MatQ anti_identity(int r) {
  MatQ m = MatQ::Zero(r, r);
  for (int i = 0; i < r; ++i) m(i, r - 1 - i) = 1;
  return m;
}

MatQ power_of(const MatQ& m, int k) {
  MatQ r = MatQ::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) r = (r * m).eval();
  return r;
}

// Scales the first row so that det(m) = 1.
MatQ unimodular(MatQ m) {
  Rational dm = det(m);
  if (dm == 0) throw PreconditionViolation("internal: adapted basis is singular");
  m.row(0) /= dm;
  return m;
}

// Jordan chains of the nilpotent map `nil` restricted to its generalized
// kernel, chain lengths given in `sizes` (descending). Each chain is stored
// as columns nil^(r-1) v, ..., nil v, v.
MatQ jordan_chains(const MatQ& nil, const std::vector<int>& sizes) {
  const int d = static_cast<int>(nil.rows());
  const int top = sizes.empty() ? 0 : sizes.front();
  std::vector<MatQ> ker(top + 1);
  for (int j = 0; j <= top; ++j) ker[j] = kernel(power_of(nil, j));

  std::vector<std::pair<VecQ, int>> tops;
  for (int k = top; k >= 1; --k) {
    int wanted = static_cast<int>(std::count(sizes.begin(), sizes.end(), k));
    if (wanted == 0) continue;
    MatQ current = ker[k - 1];
    for (const auto& [v, len] : tops) current = hstack(current, MatQ(power_of(nil, len - k) * v));
    int r = rank(current);
    for (Eigen::Index c = 0; c < ker[k].cols() && wanted > 0; ++c) {
      MatQ trial = hstack(current, MatQ(ker[k].col(c)));
      if (rank(trial) > r) {
        current = trial;
        ++r;
        tops.push_back({ker[k].col(c), k});
        --wanted;
      }
    }
    if (wanted != 0) throw PreconditionViolation("internal: Jordan chain construction failed");
  }
  MatQ out(d, 0);
  for (const auto& [v, len] : tops)
    for (int i = len - 1; i >= 0; --i) out = hstack(out, MatQ(power_of(nil, i) * v));
  return out;
}

// A square root of n that is a polynomial in n. The matrix is rotated first
// so that no eigenvalue sits near the branch cut.
MatC commuting_sqrt(const MatC& n) {
  Eigen::ComplexEigenSolver<MatC> es(n, false);
  double best_phi = 0, best_gap = -1;
  for (int k = 0; k < 16; ++k) {
    double phi = k * std::numbers::pi / 8;
    double gap = INFINITY;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double arg = std::arg(es.eigenvalues()(i) * std::polar(1.0, -phi));
      gap = std::min(gap, std::numbers::pi - std::abs(arg));
    }
    if (gap > best_gap) {
      best_gap = gap;
      best_phi = phi;
    }
  }
  MatC rotated = n * std::polar(1.0, -best_phi);
  MatC root = rotated.sqrt();
  return root * std::polar(1.0, best_phi / 2);
}

int block_exponent(int r, int i) {  // i = 1..r; fixes the anti-identity, shrinks J~_r(0)
  return r % 2 ? (r + 1) / 2 - i : r + 1 - 2 * i;
}

DestabilizingCurve flat_curve(const PencilQ& p, const FlatNonvanishing<Rational>& fe) {
  const int d = p.dim();
  const int m = fe.m_star;
  FlatFrame fr = flat_frame(p, fe);
  const MatQ& basis = fr.basis;
  const MatQ& b_inv = fr.b_inv;
  const std::vector<int>& sizes = fr.sizes;
  MatQ g = basis.transpose() * b_inv * basis;
  for (int i = 0; i < m; ++i)
    for (int j = m; j < d; ++j)
      if (g(i, j) != 0) throw PreconditionViolation("internal: generalized eigenspaces are not B^{-1}-orthogonal");

  MatQ flip = chain_flip(sizes);
  MatQ n_u = flip * g.topLeftCorner(m, m);
  MatC root = commuting_sqrt(to_complex(n_u));
  MatC left = MatC::Identity(d, d);
  left.topLeftCorner(m, m) = root.inverse() * to_complex(flip);
  MatC M = left * to_complex(MatQ(basis.transpose() * b_inv));
  Complex dm = det_float(M);
  M *= std::pow(dm, -1.0 / d);

  Mat2<Rational> shift = Mat2<Rational>::Identity();
  shift(0, 1) = -fe.lambda_star;
  Mat2<Rational> n0 = shift * fe.relabel;

  DestabilizingCurve out;
  out.kind = VerdictKind::FlatNonvanishing;
  out.g0.M = M;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.g0.N(i, j) = to_double(n0(i, j));
  const int K = 4 * (d - m) + 2;
  for (int r : sizes)
    for (int i = 1; i <= r; ++i) out.m_exponents.push_back(K * block_exponent(r, i) - (d - m));
  for (int i = m; i < d; ++i) out.m_exponents.push_back(m);
  out.n_exponents = {-2 * (d - m) - 1, 2 * (d - m) + 1};
  return out;
}

DestabilizingCurve common_kernel_curve(const PencilQ& p, const DegenerateCommonKernel<Rational>& ck) {
  const int d = p.dim();
  MatQ basis = extend_basis(MatQ(ck.kernel.col(0)), MatQ::Identity(d, d));
  MatQ M = unimodular(basis.transpose());
  DestabilizingCurve out;
  out.kind = VerdictKind::DegenerateCommonKernel;
  out.g0 = {to_complex(M), Mat2<Complex>::Identity()};
  out.m_exponents.assign(d, 1);
  out.m_exponents[0] = -(d - 1);
  return out;
}

DestabilizingCurve kernel_split_curve(const PencilQ& p, const DegenerateKernelSplit<Rational>& ks) {
  const int d = p.dim(), k = ks.k, l = ks.l_h;
  MatQ h_perp = kernel(MatQ(ks.H.transpose()));
  MatQ basis = hstack(extend_basis(ks.V, h_perp), ks.H);
  if (basis.cols() != d) throw PreconditionViolation("internal: adapted basis has the wrong size");
  MatQ M = unimodular(basis.transpose());
  DestabilizingCurve out;
  out.kind = VerdictKind::DegenerateKernelSplit;
  out.g0 = {to_complex(M), Mat2<Complex>::Identity()};
  const int a1 = -((d - 1) * l + d - k), a2 = k, a3 = d * k;
  for (int i = 0; i < d; ++i) out.m_exponents.push_back(i < k ? a1 : i < d - l ? a2 : a3);
  return out;
}

// Positive row scalings with product one commute with the diagonal
// exponents, so they change neither the determinant nor the decay rates;
// equal row norms keep the early ladder points free of transients.
void balance_rows(MatC& m) {
  const Eigen::Index d = m.rows();
  double log_mean = 0;
  for (Eigen::Index i = 0; i < d; ++i) log_mean += std::log(m.row(i).norm()) / static_cast<double>(d);
  for (Eigen::Index i = 0; i < d; ++i) m.row(i) *= std::exp(log_mean) / m.row(i).norm();
}

// Replaces g0 by at(mu) for the largest mu <= 1 at which every group of
// entries with a higher combined exponent is no larger than the leading
// group, so the whole ladder sees the asymptotic rate.
void reparametrize(DestabilizingCurve& c, const ComplexPair& p) {
  ComplexPair y = act(c.g0, p);
  const Eigen::Index d = y.A.rows();
  const double scale = std::max(y.A.cwiseAbs().maxCoeff(), y.B.cwiseAbs().maxCoeff());
  std::map<int, double> groups;
  auto collect = [&](const MatC& m, int b) {
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        const double v = std::abs(m(i, j));
        if (v > 1e-12 * scale) groups[c.m_exponents[i] + c.m_exponents[j] + b] += v * v;
      }
  };
  collect(y.A, c.n_exponents[0]);
  collect(y.B, c.n_exponents[1]);
  if (groups.empty()) return;
  const auto [rate, lead] = *groups.begin();
  double mu = 1;
  for (const auto& [e, size] : groups)
    if (e > rate) mu = std::min(mu, std::pow(std::sqrt(lead / size), 1.0 / (e - rate)));
  if (mu < 1) c.g0 = c.at(mu);
}

}  // namespace

MatQ chain_flip(const std::vector<int>& sizes) {
  int m = 0;
  for (int r : sizes) m += r;
  MatQ flip = MatQ::Zero(m, m);
  int offset = 0;
  for (int r : sizes) {
    flip.block(offset, offset, r, r) = anti_identity(r);
    offset += r;
  }
  return flip;
}

FlatFrame flat_frame(const PencilQ& p, const FlatNonvanishing<Rational>& fe) {
  if (!fe.blocks_resolved) throw PreconditionViolation("flat eigenstructure is unresolved");
  const int d = p.dim();
  FlatFrame fr;
  fr.relabelled = act_sigma(fe.relabel, p);
  fr.b_inv = inverse(fr.relabelled.B);
  fr.c = fr.relabelled.A * fr.b_inv;
  MatQ nil = fr.c - fe.lambda_star * MatQ::Identity(d, d);
  fr.sizes = fe.block_sizes;
  for (int i = 0; i < fe.n0; ++i) fr.sizes.push_back(1);
  fr.m = fe.m_star;
  MatQ chains = jordan_chains(nil, fr.sizes);
  MatQ rest = column_basis(power_of(nil, d));
  fr.basis = hstack(chains, rest);
  if (fr.basis.cols() != d || rank(fr.basis) != d)
    throw PreconditionViolation("internal: eigen-adapted basis is singular");
  return fr;
}

DestabilizingCurve destabilizing_curve(const PencilQ& p, const Verdict<Rational>& v) {
  DestabilizingCurve c = std::visit(
      [&](const auto& x) -> DestabilizingCurve {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, WellCurved>) {
          throw PreconditionViolation("well-curved pencils have no destabilizing curve");
        } else if constexpr (std::is_same_v<X, FlatNonvanishing<Rational>>) {
          return flat_curve(p, x);
        } else if constexpr (std::is_same_v<X, DegenerateKernelSplit<Rational>>) {
          return kernel_split_curve(p, x);
        } else {
          return common_kernel_curve(p, x);
        }
      },
      v);
  balance_rows(c.g0.M);
  reparametrize(c, to_complex(p));
  return c;
}

DestabilizingCurve destabilizing_curve(const PencilD& p, const Verdict<double>& v) {
  if (std::holds_alternative<WellCurved>(v))
    throw PreconditionViolation("well-curved pencils have no destabilizing curve");
  PencilQ exact = to_exact(p);
  Verdict<Rational> ve = classify(exact);
  if (ve.index() != v.index()) throw PreconditionViolation("float verdict disagrees with the exact verdict");
  return destabilizing_curve(exact, ve);
}

ComplexPair curve_pair(const DestabilizingCurve& c, const ComplexPair& p, double lambda, double* structural) {
  ComplexPair y = act(c.g0, p);
  const Eigen::Index d = y.A.rows();
  double scale = std::max(y.A.cwiseAbs().maxCoeff(), y.B.cwiseAbs().maxCoeff());
  double snapped = 0;
  auto apply = [&](MatC& m, int b) {
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        int e = c.m_exponents[i] + c.m_exponents[j] + b;
        if (e <= 0) {
          snapped = std::max(snapped, std::abs(m(i, j)) / scale);
          m(i, j) = 0;
        } else {
          m(i, j) *= std::pow(lambda, e);
        }
      }
  };
  apply(y.A, c.n_exponents[0]);
  apply(y.B, c.n_exponents[1]);
  if (structural) *structural = snapped;
  return y;
}

std::vector<double> default_decay_ladder() {
  std::vector<double> l;
  for (int k = 2; k <= 12; ++k) l.push_back(std::ldexp(1.0, -k));
  return l;
}

DecayReport verify_decay(const DestabilizingCurve& c, const ComplexPair& p, const std::vector<double>& ladder) {
  if (static_cast<Eigen::Index>(c.m_exponents.size()) != p.A.rows())
    throw DimensionMismatch("curve was built for a pencil of another size");
  if (ladder.size() < 2) throw PreconditionViolation("decay ladder needs at least two points");
  DecayReport rep;
  ComplexPair y = act(c.g0, p);
  double scale = std::max(y.A.cwiseAbs().maxCoeff(), y.B.cwiseAbs().maxCoeff());
  rep.predicted_rate = INT32_MAX;
  const Eigen::Index d = y.A.rows();
  for (int which = 0; which < 2; ++which) {
    const MatC& m = which ? y.B : y.A;
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        int e = c.m_exponents[i] + c.m_exponents[j] + c.n_exponents[which];
        if (e > 0 && std::abs(m(i, j)) > 1e-9 * scale) rep.predicted_rate = std::min(rep.predicted_rate, e);
      }
  }
  std::vector<double> xs, ys;
  for (double lambda : ladder) {
    double snapped = 0;
    double n = frobenius_norm(curve_pair(c, p, lambda, &snapped));
    rep.structural_residual = std::max(rep.structural_residual, snapped);
    rep.lambdas.push_back(lambda);
    rep.norms.push_back(n);
    xs.push_back(std::log(lambda));
    ys.push_back(std::log(n));
  }
  if (rep.structural_residual > 1e-8)
    throw NonDecaying("entries that must vanish along the curve are nonzero (relative size " +
                      std::to_string(rep.structural_residual) + ")");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  for (size_t i = 0; i < xs.size(); ++i)
    rep.max_residual = std::max(rep.max_residual, std::abs(ys[i] - rep.intercept - rep.slope * xs[i]));
  if (!(rep.slope >= 0.5)) throw NonDecaying("fitted decay slope " + std::to_string(rep.slope) + " is below 0.5");
  return rep;
}

double sampled_orbit_infimum(const ComplexPair& p, int trials, double radius, std::uint64_t seed,
                             const std::vector<GroupElement>& extra) {
  const Eigen::Index d = p.A.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  auto special = [&](Eigen::Index n) {
    for (;;) {
      MatD m(n, n);
      for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
      double dm = det_float(m);
      if (std::abs(dm) < 1e-12) continue;
      if (dm < 0) m.row(0) *= -1;
      return MatD(m * std::pow(std::abs(dm), -1.0 / static_cast<double>(n)));
    }
  };
  double best = INFINITY;
  for (int t = 0; t < trials; ++t) {
    GroupElement g{special(d).cast<Complex>(), special(2).cast<Complex>()};
    best = std::min(best, frobenius_norm(act(g, p)));
  }
  for (const auto& g : extra) best = std::min(best, frobenius_norm(act(g, p)));
  return best;
}

}  // namespace pencurv
