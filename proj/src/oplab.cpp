#include "pencurv/oplab.hpp"
#include "pencurv/errors.hpp"
#include "pencurv/linalg.hpp"
#include "pencurv/parallel.hpp"
#include "pencurv/witness.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pencurv {

namespace {

constexpr std::int64_t kBatch = 1 << 15;

double inf_norm(const MatD& m) { return m.rows() ? m.cwiseAbs().rowwise().sum().maxCoeff() : 0.0; }

double op_norm(const MatD& m) {
  Eigen::SelfAdjointEigenSolver<MatD> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool in_cube(const VecD& v, double side = 1.0) { return v.size() == 0 || v.cwiseAbs().maxCoeff() <= side; }

Parallelotope block_diag(const Parallelotope& a, const Parallelotope& b) {
  const Eigen::Index n = a.center.size(), m = b.center.size();
  Parallelotope c;
  c.center.resize(n + m);
  c.center << a.center, b.center;
  c.axes = MatD::Zero(n + m, n + m);
  c.axes.topLeftCorner(n, n) = a.axes;
  c.axes.bottomRightCorner(m, m) = b.axes;
  c.half_widths.resize(n + m);
  c.half_widths << a.half_widths, b.half_widths;
  return c;
}

struct Tally {
  std::int64_t hits = 0;
  std::int64_t n = 0;
};

// Runs `trial` budget.samples times over parallel batches and returns the
// hit fraction with its binomial standard error.
template <class Trial> std::pair<double, double> hit_fraction(const McBudget& budget, Trial trial) {
  if (budget.samples < 1) throw PreconditionViolation("Monte Carlo budget must be positive");
  const std::int64_t batches = (budget.samples + kBatch - 1) / kBatch;
  std::vector<Tally> tallies(batches);
  parallel_for(batches, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(budget.seed, b));
    const std::int64_t count = std::min(kBatch, budget.samples - static_cast<std::int64_t>(b) * kBatch);
    Tally t;
    for (std::int64_t i = 0; i < count; ++i)
      if (trial(rng)) ++t.hits;
    t.n = count;
    tallies[b] = t;
  });
  std::int64_t hits = 0, n = 0;
  for (const auto& t : tallies) {
    hits += t.hits;
    n += t.n;
  }
  const double f = static_cast<double>(hits) / static_cast<double>(n);
  return {f, std::sqrt(f * (1 - f) / static_cast<double>(n))};
}

// Sampler for the (s, t) coordinates of a test set.
Parallelotope st_cover(const SetPredicate& e) {
  if (e.factors.size() == 2 && e.factors[1].dim == 2) return e.factors[1].cover;
  VecD lo = e.lower.tail(2).cwiseMax(-1.0), hi = e.upper.tail(2).cwiseMin(1.0);
  return axis_box(lo, hi);
}

// Sampler for the xi coordinates of a dual set.
Parallelotope xi_cover(const SetPredicate& f, int d) {
  if (f.factors.size() == 2 && f.factors[1].dim == d) return f.factors[1].cover;
  VecD lo = f.lower.tail(d).cwiseMax(-1.0), hi = f.upper.tail(d).cwiseMin(1.0);
  return axis_box(lo, hi);
}

void check_shapes(const SetPredicate& e, const SetPredicate& f, const PencilD& p) {
  const int d = p.dim();
  if (e.dim != d + 2) throw DimensionMismatch("test set must live in R^(d+2)");
  if (f.dim != 2 * d) throw DimensionMismatch("dual set must live in R^d x [-1, 1]^d");
}

// Orthonormal basis of R^d whose first columns span the columns of v.
MatD adapted_orthonormal(const MatD& v, int d, int* k_out) {
  const int k = static_cast<int>(v.cols());
  *k_out = k;
  if (k == 0) return MatD::Identity(d, d);
  Eigen::HouseholderQR<MatD> qr(v);
  return qr.householderQ() * MatD::Identity(d, d);
}

// { |x|_inf <= side, dist(x, span of first k columns of q) < radius }
SetPredicate tube(const MatD& q, int k, double radius, double side) {
  const int d = static_cast<int>(q.rows());
  MatD perp = q.rightCols(d - k);
  VecD hw(d);
  for (int i = 0; i < d; ++i) hw(i) = i < k ? side * std::sqrt(static_cast<double>(d)) : radius;
  auto contains = [perp, radius, side](const VecD& x) {
    return in_cube(x, side) && (perp.transpose() * x).norm() < radius;
  };
  SetPredicate s = make_set(d, contains, Parallelotope{VecD::Zero(d), q, hw});
  // clip the bounding box to the cube
  s.lower = s.lower.cwiseMax(-side);
  s.upper = s.upper.cwiseMin(side);
  return s;
}

using Polygon = std::vector<std::array<double, 2>>;

// Keeps the part of `poly` where a . z <= c.
Polygon clip(const Polygon& poly, std::array<double, 2> a, double c) {
  Polygon out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % n];
    double fp = a[0] * p[0] + a[1] * p[1] - c, fq = a[0] * q[0] + a[1] * q[1] - c;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      double u = fp / (fp - fq);
      out.push_back({p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])});
    }
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double a = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p[0] * q[1] - p[1] * q[0];
  }
  return std::abs(a) / 2;
}

// Area of {(s, t) in [-1, 1]^2 : |w . (s, t)| < delta}.
double strip_area(const Eigen::Vector2d& w, double delta) {
  Polygon sq{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  sq = clip(sq, {w(0), w(1)}, delta);
  sq = clip(sq, {-w(0), -w(1)}, delta);
  return polygon_area(sq);
}

}  // namespace

double Parallelotope::volume() const {
  double v = std::abs(axes.determinant());
  for (Eigen::Index i = 0; i < half_widths.size(); ++i) v *= 2 * half_widths(i);
  return v;
}

VecD Parallelotope::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VecD c(half_widths.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = u(rng) * half_widths(i);
  return center + axes * c;
}

Parallelotope axis_box(const VecD& lower, const VecD& upper) {
  const Eigen::Index n = lower.size();
  return {(lower + upper) / 2, MatD::Identity(n, n), ((upper - lower) / 2).cwiseMax(0.0)};
}

SetPredicate make_set(int dim, std::function<bool(const VecD&)> contains, Parallelotope cover,
                      std::optional<double> analytic_measure) {
  if (cover.center.size() != dim || cover.axes.rows() != dim || cover.axes.cols() != dim ||
      cover.half_widths.size() != dim)
    throw DimensionMismatch("cover does not match the set dimension");
  SetPredicate s;
  s.dim = dim;
  s.contains = std::move(contains);
  VecD reach = cover.axes.cwiseAbs() * cover.half_widths;
  s.lower = cover.center - reach;
  s.upper = cover.center + reach;
  s.cover = std::move(cover);
  s.analytic_measure = analytic_measure;
  return s;
}

SetPredicate product(const SetPredicate& a, const SetPredicate& b) {
  const int n = a.dim;
  auto ca = a.contains, cb = b.contains;
  auto contains = [ca, cb, n](const VecD& v) { return ca(v.head(n)) && cb(v.tail(v.size() - n)); };
  std::optional<double> m;
  if (a.analytic_measure && b.analytic_measure) m = *a.analytic_measure * *b.analytic_measure;
  SetPredicate s = make_set(a.dim + b.dim, contains, block_diag(a.cover, b.cover), m);
  s.lower << a.lower, b.lower;
  s.upper << a.upper, b.upper;
  s.factors = {a, b};
  return s;
}

SetPredicate box_set(const VecD& lower, const VecD& upper) {
  auto contains = [lower, upper](const VecD& v) {
    return (v.array() >= lower.array()).all() && (v.array() <= upper.array()).all();
  };
  return make_set(static_cast<int>(lower.size()), contains, axis_box(lower, upper),
                  (upper - lower).cwiseMax(0.0).prod());
}

double ball_volume(int dim, double radius) {
  const double n = dim;
  return std::pow(std::numbers::pi, n / 2) / std::tgamma(n / 2 + 1) * std::pow(radius, n);
}

SetPredicate ball_set(int dim, double radius) {
  auto contains = [radius](const VecD& v) { return v.norm() < radius; };
  return make_set(dim, contains, axis_box(VecD::Constant(dim, -radius), VecD::Constant(dim, radius)),
                  ball_volume(dim, radius));
}

MeasureEstimate estimate_measure(const SetPredicate& s, const McBudget& budget) {
  const double vol = s.cover.volume();
  auto [f, se] = hit_fraction(budget, [&](std::mt19937_64& rng) { return s.contains(s.cover.sample(rng)); });
  return {vol * f, vol * se};
}

MeasureEstimate measure_of(const SetPredicate& s, const McBudget& budget) {
  if (s.analytic_measure) return {*s.analytic_measure, 0.0};
  return estimate_measure(s, budget);
}

double support_bound(const PencilD& p) { return 4 * (1 + op_norm(p.A) + op_norm(p.B)); }

double pencil_bound(const PencilD& p) { return inf_norm(p.A) + inf_norm(p.B); }

double apply_T(const FunctionYST& f, const PencilD& p, const VecD& x, const VecD& xi, int n) {
  if (n < 1) throw PreconditionViolation("quadrature needs at least one node");
  const VecD a = p.A * xi, b = p.B * xi;
  const double h = 2.0 / n;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double s = -1 + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double t = -1 + (j + 0.5) * h;
      sum += f(x - s * a - t * b, s, t);
    }
  }
  return sum * h * h;
}

double apply_T_star(const FunctionXXi& g, const PencilD& p, const VecD& y, double s, double t, int n,
                    std::uint64_t seed) {
  if (n < 1) throw PreconditionViolation("quadrature needs at least one node");
  const int d = p.dim();
  const MatD m = s * p.A + t * p.B;
  if (d <= 3) {
    const double h = 2.0 / n;
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= n;
    double sum = 0;
    VecD xi(d);
    for (std::int64_t idx = 0; idx < total; ++idx) {
      std::int64_t r = idx;
      for (int i = 0; i < d; ++i) {
        xi(i) = -1 + (static_cast<double>(r % n) + 0.5) * h;
        r /= n;
      }
      sum += g(y + m * xi, xi);
    }
    return sum * std::pow(h, d);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::int64_t samples = static_cast<std::int64_t>(n) * n * n;
  double sum = 0;
  VecD xi(d);
  for (std::int64_t k = 0; k < samples; ++k) {
    for (int i = 0; i < d; ++i) xi(i) = u(rng);
    sum += g(y + m * xi, xi);
  }
  return std::ldexp(sum / static_cast<double>(samples), d);
}

FunctionYST indicator_yst(const SetPredicate& e) {
  return [e](const VecD& y, double s, double t) {
    VecD v(y.size() + 2);
    v << y, s, t;
    return e.contains(v) ? 1.0 : 0.0;
  };
}

FunctionXXi indicator_xxi(const SetPredicate& f) {
  return [f](const VecD& x, const VecD& xi) {
    VecD v(x.size() + xi.size());
    v << x, xi;
    return f.contains(v) ? 1.0 : 0.0;
  };
}

double mixed_norm(const MatD& values, double cell_x, double cell_xi, double q, double r) {
  if (!(q >= 1) || !(r >= 1)) throw PreconditionViolation("norm exponents must be at least 1");
  const Eigen::Index rows = values.rows();
  VecD inner(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (std::isinf(r)) {
      inner(i) = values.row(i).cwiseAbs().maxCoeff();
    } else {
      inner(i) = std::pow(values.row(i).cwiseAbs().array().pow(r).sum() * cell_x, 1 / r);
    }
  }
  if (std::isinf(q)) return inner.maxCoeff();
  return std::pow(inner.array().pow(q).sum() * cell_xi, 1 / q);
}

PairingEstimate pairing_forward(const SetPredicate& e, const SetPredicate& f, const PencilD& p,
                                const McBudget& budget) {
  check_shapes(e, f, p);
  const int d = p.dim();
  const Parallelotope st = st_cover(e);
  const double vol = f.cover.volume() * st.volume();
  auto [frac, se] = hit_fraction(budget, [&](std::mt19937_64& rng) {
    VecD xxi = f.cover.sample(rng);
    VecD s_t = st.sample(rng);
    if (!in_cube(s_t) || !in_cube(xxi.tail(d)) || !f.contains(xxi)) return false;
    VecD xi = xxi.tail(d);
    VecD yst(d + 2);
    yst << xxi.head(d) - s_t(0) * (p.A * xi) - s_t(1) * (p.B * xi), s_t;
    return e.contains(yst);
  });
  return {vol * frac, vol * se, budget.samples};
}

PairingEstimate pairing_adjoint(const SetPredicate& e, const SetPredicate& f, const PencilD& p,
                                const McBudget& budget) {
  check_shapes(e, f, p);
  const int d = p.dim();
  const Parallelotope xc = xi_cover(f, d);
  const double vol = e.cover.volume() * xc.volume();
  auto [frac, se] = hit_fraction(budget, [&](std::mt19937_64& rng) {
    VecD yst = e.cover.sample(rng);
    VecD xi = xc.sample(rng);
    if (!in_cube(yst.tail(2)) || !in_cube(xi) || !e.contains(yst)) return false;
    VecD xxi(2 * d);
    xxi << yst.head(d) + yst(d) * (p.A * xi) + yst(d + 1) * (p.B * xi), xi;
    return f.contains(xxi);
  });
  return {vol * frac, vol * se, budget.samples};
}

RwtResult rwt_functional(const SetPredicate& e, const SetPredicate& f, const PencilD& p, double q,
                         const McBudget& budget) {
  RwtResult r;
  r.forward = pairing_forward(e, f, p, {budget.samples, derive_seed(budget.seed, 1)});
  r.adjoint = pairing_adjoint(e, f, p, {budget.samples, derive_seed(budget.seed, 2)});
  if (r.forward.value <= 0 || r.adjoint.value <= 0)
    throw ZeroPairing("pairing estimated as zero; enlarge the budget or the sets");
  r.measure_e = measure_of(e, {budget.samples, derive_seed(budget.seed, 3)});
  r.measure_f = measure_of(f, {budget.samples, derive_seed(budget.seed, 4)});
  if (r.measure_e.value <= 0 || r.measure_f.value <= 0) throw ZeroPairing("set measure estimated as zero");
  r.alpha = r.forward.value / r.measure_f.value;
  r.beta = r.adjoint.value / r.measure_e.value;
  r.lhs = std::pow(r.alpha, q - 1) * r.beta;
  r.rhs = r.measure_e.value;
  r.ratio = r.lhs / r.rhs;
  auto rel = [](double se, double v) { return se / v; };
  const double a = (q - 1) * rel(r.forward.std_error, r.forward.value);
  const double b = rel(r.adjoint.std_error, r.adjoint.value);
  const double c = (q - 1) * rel(r.measure_f.std_error, r.measure_f.value);
  const double e2 = 2 * rel(r.measure_e.std_error, r.measure_e.value);
  r.ratio_rel_error = std::sqrt(a * a + b * b + c * c + e2 * e2);
  return r;
}

Family family_ball(const PencilD& p, double delta, double c) {
  const int d = p.dim();
  Family fam;
  fam.name = "ball";
  fam.pencil = p;
  fam.delta = delta;
  fam.test = ball_set(d + 2, delta);
  fam.dual = product(ball_set(d, c * delta), box_set(VecD::Constant(d, -1), VecD::Constant(d, 1)));
  fam.constants["c"] = c;
  fam.parts = {{"E", fam.test}, {"F", fam.dual}};
  return fam;
}

Family family_intro_slab(const PencilD& p, double delta) {
  const int d = p.dim();
  const double k = op_norm(p.A) + op_norm(p.B);
  Family fam;
  fam.name = "slab";
  fam.pencil = p;
  fam.delta = delta;
  fam.test = product(ball_set(d, (1 + k) * delta), box_set(VecD::Constant(2, -1), VecD::Constant(2, 1)));
  fam.dual = product(ball_set(d, delta), ball_set(d, delta));
  fam.constants["K"] = k;
  fam.parts = {{"test", fam.test}, {"dual", fam.dual}};
  return fam;
}

Family family_flat_boxes(const PencilQ& p, const FlatNonvanishing<Rational>& fe, double delta, double eps_prime) {
  if (!(delta > 0) || delta > 1) throw PreconditionViolation("delta must lie in (0, 1]");
  const int d = p.dim();
  FlatFrame fr = flat_frame(p, fe);
  const int m = fr.m;

  MatQ flip = MatQ::Identity(d, d);
  flip.topLeftCorner(m, m) = chain_flip(fr.sizes);
  const MatQ l_exact = fr.b_inv * fr.basis * flip;
  const MatD q = to_double(fr.basis), q_inv = to_double(inverse(fr.basis));
  const MatD l = to_double(l_exact), l_inv = to_double(inverse(l_exact));
  const MatQ j_full = inverse(fr.basis) * fr.c * fr.basis;
  const double j_w = inf_norm(to_double(MatQ(j_full.bottomRightCorner(d - m, d - m))));

  Eigen::Matrix2d rel;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) rel(i, j) = to_double(fe.relabel(i, j));
  // (s, t) = rel^T (s', t'), and u = t' + lambda s' vanishes along the root
  const Eigen::Matrix2d back = rel.inverse().transpose();
  const double s_max = back.row(0).cwiseAbs().sum(), t_max = back.row(1).cwiseAbs().sum();
  const double lambda = to_double(fe.lambda_star);
  const Eigen::Vector2d w = rel.inverse() * Eigen::Vector2d(lambda, 1.0);

  const double eps = std::min(eps_prime, 1.0 / inf_norm(l));
  const double kappa = std::max({1.0, 1 + s_max, s_max * j_w + t_max});

  VecD hw_e(d), hw_f(d);
  int pos = 0;
  for (int r : fr.sizes) {
    for (int k = 1; k <= r; ++k, ++pos) {
      hw_e(pos) = r == 1 ? eps : eps * std::pow(delta, r - k);
      hw_f(pos) = r == 1 ? kappa * eps * delta : kappa * eps * std::pow(delta, k);
    }
  }
  for (; pos < d; ++pos) {
    hw_e(pos) = eps;
    hw_f(pos) = kappa * eps;
  }

  auto coords_set = [d](const MatD& axes, const MatD& axes_inv, const VecD& hw, bool cube) {
    auto contains = [axes_inv, hw, cube](const VecD& v) {
      if (cube && !in_cube(v)) return false;
      return ((axes_inv * v).cwiseAbs().array() < hw.array()).all();
    };
    Parallelotope cover{VecD::Zero(d), axes, hw};
    const double vol = cover.volume();
    return make_set(d, contains, cover, vol);
  };
  SetPredicate e = coords_set(l, l_inv, hw_e, true);
  SetPredicate f = coords_set(q, q_inv, hw_f, false);
  SetPredicate f2 = coords_set(q, q_inv, VecD(2 * hw_f), false);

  const double wn = w.norm();
  auto strip_contains = [w, delta](const VecD& v) { return in_cube(v) && std::abs(w.dot(v)) < delta; };
  MatD strip_axes(2, 2);
  strip_axes << -w(1) / wn, w(0) / (wn * wn), w(0) / wn, w(1) / (wn * wn);
  SetPredicate s = make_set(2, strip_contains,
                            Parallelotope{VecD::Zero(2), strip_axes, Eigen::Vector2d(std::sqrt(2.0), delta)},
                            strip_area(w, delta));
  s.lower = s.lower.cwiseMax(-1.0);
  s.upper = s.upper.cwiseMin(1.0);

  Family fam;
  fam.name = "flat-boxes";
  fam.pencil = to_double(p);
  fam.delta = delta;
  fam.test = product(f2, s);
  fam.dual = product(f, e);
  fam.constants = {{"eps_prime", eps}, {"kappa", kappa}, {"s_max", s_max}, {"t_max", t_max}, {"lambda_star", lambda}};
  fam.parts = {{"E", e}, {"F", f}, {"S", s}};
  return fam;
}

Family family_degenerate(const PencilQ& p, const DegenerateKernelSplit<Rational>& ks, double delta) {
  const int d = p.dim();
  const PencilD pd = to_double(p);
  const double k = pencil_bound(pd);
  int dim_v = 0, dim_h = 0;
  const MatD qv = adapted_orthonormal(to_double(ks.V), d, &dim_v);
  const MatD qh = adapted_orthonormal(to_double(ks.H), d, &dim_h);
  SetPredicate e = tube(qv, dim_v, delta, 1.0);
  SetPredicate f = tube(qh, dim_h, k * delta, k);
  SetPredicate f2 = tube(qh, dim_h, 2 * k * delta, 2 * k);
  Family fam;
  fam.name = "degenerate";
  fam.pencil = pd;
  fam.delta = delta;
  fam.test = product(f2, box_set(VecD::Constant(2, -1), VecD::Constant(2, 1)));
  fam.dual = product(f, e);
  fam.constants = {{"K", k}, {"dim_V", dim_v}, {"dim_H", dim_h}};
  fam.parts = {{"E", e}, {"F", f}};
  return fam;
}

Family family_common_kernel(const PencilQ& p, const DegenerateCommonKernel<Rational>& ck, double delta) {
  const int d = p.dim();
  const PencilD pd = to_double(p);
  const double k = std::max(pencil_bound(pd), 1.0);
  int dim_w = 0;
  const MatD qw = adapted_orthonormal(to_double(ck.W), d, &dim_w);
  SetPredicate f = tube(qw, dim_w, delta, k);
  SetPredicate f2 = tube(qw, dim_w, 2 * delta, 2 * k);
  Family fam;
  fam.name = "common-kernel";
  fam.pencil = pd;
  fam.delta = delta;
  fam.test = product(f2, box_set(VecD::Constant(2, -1), VecD::Constant(2, 1)));
  fam.dual = product(f, box_set(VecD::Constant(d, -1), VecD::Constant(d, 1)));
  fam.constants = {{"K", k}, {"dim_W", dim_w}};
  fam.parts = {{"F", f}};
  return fam;
}

Family family_for(const PencilQ& p, const Verdict<Rational>& v, double delta) {
  return std::visit(
      [&](const auto& x) -> Family {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, WellCurved>) {
          return family_ball(to_double(p), delta);
        } else if constexpr (std::is_same_v<X, FlatNonvanishing<Rational>>) {
          return family_flat_boxes(p, x, delta);
        } else if constexpr (std::is_same_v<X, DegenerateKernelSplit<Rational>>) {
          return family_degenerate(p, x, delta);
        } else {
          return family_common_kernel(p, x, delta);
        }
      },
      v);
}

std::vector<double> default_scaling_ladder() {
  std::vector<double> l;
  for (int k = 2; k <= 8; ++k) l.push_back(std::ldexp(1.0, -k));
  return l;
}

ScalingResult scaling_experiment(const FamilyBuilder& family, double p_exp, double q_exp,
                                 const std::vector<double>& ladder, const McBudget& budget,
                                 std::optional<double> r_exp) {
  if (ladder.size() < 2) throw DegenerateLadder("scaling ladder needs at least two points");
  ScalingResult base;
  base.budget = budget;
  for (size_t i = 0; i < ladder.size(); ++i) {
    Family fam = family(ladder[i]);
    if (fam.dual.factors.size() != 2) throw FamilyMismatch("dual set must be a product of x and xi parts");
    base.family = fam.name;
    base.constants = fam.constants;
    ScalingPoint pt;
    pt.delta = ladder[i];
    const std::uint64_t seed = derive_seed(budget.seed, i);
    pt.pairing = pairing_forward(fam.test, fam.dual, fam.pencil, {budget.samples, seed});
    if (pt.pairing.value <= 0)
      throw ZeroPairing("pairing estimated as zero at delta = " + std::to_string(ladder[i]));
    pt.test_measure = measure_of(fam.test, {budget.samples, derive_seed(seed, 1)}).value;
    pt.dual_x_measure = measure_of(fam.dual.factors[0], {budget.samples, derive_seed(seed, 2)}).value;
    pt.dual_xi_measure = measure_of(fam.dual.factors[1], {budget.samples, derive_seed(seed, 3)}).value;
    base.points.push_back(pt);
  }
  return rescale(base, p_exp, q_exp, r_exp);
}

ScalingResult rescale(const ScalingResult& base, double p_exp, double q_exp, std::optional<double> r_exp) {
  ScalingResult out = base;
  out.p = p_exp;
  out.q = q_exp;
  out.r = r_exp.value_or(q_exp);
  const double ip = 1 / out.p, iq = 1 / out.q, ir = 1 / out.r;
  std::vector<double> xs, ys;
  for (auto& pt : out.points) {
    const double log_ratio = std::log(pt.pairing.value) - ip * std::log(pt.test_measure) -
                             (1 - ir) * std::log(pt.dual_x_measure) - (1 - iq) * std::log(pt.dual_xi_measure);
    pt.ratio = std::exp(log_ratio);
    xs.push_back(std::log(pt.delta));
    ys.push_back(log_ratio);
  }
  LineFit f = fit_line(xs, ys);
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.residual = f.max_residual;
  return out;
}

double failure_boundary(const ScalingResult& base, double q_exp, std::optional<double> r_exp) {
  const double at0 = rescale(base, std::numeric_limits<double>::infinity(), q_exp, r_exp).slope;
  const double at1 = rescale(base, 1.0, q_exp, r_exp).slope;
  if (at0 == at1) throw DegenerateLadder("slope does not depend on p along this family");
  return at0 / (at0 - at1);
}

bool Slab::contains(const PencilD& p, const VecD& y, double s, double t) const {
  if (std::abs(s) > 1 || std::abs(t) > 1) return false;
  return (y - x + s * (p.A * xi) + t * (p.B * xi)).norm() < delta;
}

double Slab::measure() const { return 4 * ball_volume(static_cast<int>(x.size()), delta); }

Placement random_placement() {
  return [](const VecD& xi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VecD x(xi.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
    return x;
  };
}

std::vector<VecD> direction_lattice(int d, double delta) {
  if (!(delta > 0)) throw PreconditionViolation("delta must be positive");
  const int n = std::max(1, static_cast<int>(std::floor(2 / delta)));
  const double step = 2.0 / n;
  std::vector<VecD> out;
  std::vector<int> idx(d, 0);
  for (;;) {
    VecD v(d);
    for (int i = 0; i < d; ++i) v(i) = -1 + (idx[i] + 0.5) * step;
    out.push_back(v);
    int i = 0;
    while (i < d && ++idx[i] == n) idx[i++] = 0;
    if (i == d) break;
  }
  return out;
}

KakeyaResult kakeya_slab_norm(const PencilD& p, double delta, double r, const Placement& placement,
                              const McBudget& budget) {
  std::mt19937_64 rng(derive_seed(budget.seed, 0xa11ceULL));
  std::vector<Slab> slabs;
  for (const VecD& xi : direction_lattice(p.dim(), delta)) slabs.push_back({placement(xi, rng), xi, delta});
  return kakeya_slab_norm(p, slabs, r, budget);
}

KakeyaResult kakeya_slab_norm(const PencilD& p, const std::vector<Slab>& slabs, double r, const McBudget& budget) {
  if (slabs.empty()) throw PreconditionViolation("no slabs");
  if (!(r >= 1)) throw PreconditionViolation("norm exponent must be at least 1");
  const int d = p.dim();
  const double delta = slabs.front().delta;
  for (const Slab& sl : slabs)
    if (sl.delta != delta || sl.x.size() != d) throw PreconditionViolation("slabs must share dimension and thickness");
  const std::int64_t strata_side = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::sqrt(static_cast<double>(budget.samples) / 1024.0)), 8, 64);
  const std::int64_t outer = strata_side * strata_side;
  const std::int64_t inner = std::max<std::int64_t>(16, budget.samples / outer);
  const std::int64_t n_slabs = static_cast<std::int64_t>(slabs.size());
  std::int64_t neighbours = 1;
  for (int i = 0; i < d && neighbours <= n_slabs; ++i) neighbours *= 3;
  const bool brute = neighbours > n_slabs;

  std::vector<double> est(outer), uni(outer);
  MatD ax(d, n_slabs), bx(d, n_slabs), xs(d, n_slabs);
  for (std::int64_t j = 0; j < n_slabs; ++j) {
    ax.col(j) = p.A * slabs[j].xi;
    bx.col(j) = p.B * slabs[j].xi;
    xs.col(j) = slabs[j].x;
  }

  parallel_for(outer, [&](std::size_t o) {
    std::mt19937_64 rng(derive_seed(budget.seed, o));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double s = -1 + 2 * (static_cast<double>(o % strata_side) + u01(rng)) / strata_side;
    const double t = -1 + 2 * (static_cast<double>(o / strata_side) + u01(rng)) / strata_side;
    const MatD centers = xs - s * ax - t * bx;
    const VecD lo = centers.rowwise().minCoeff().array() - delta;
    const VecD hi = centers.rowwise().maxCoeff().array() + delta;
    const double vol = (hi - lo).prod();

    std::vector<std::int64_t> dims(d);
    bool hashable = !brute;
    std::int64_t total_cells = 1;
    for (int i = 0; i < d; ++i) {
      dims[i] = static_cast<std::int64_t>(std::ceil((hi(i) - lo(i)) / delta)) + 1;
      if (total_cells > (std::int64_t{1} << 60) / dims[i]) hashable = false;
      else total_cells *= dims[i];
    }
    auto cell_of = [&](const VecD& v, std::vector<std::int64_t>& c) {
      for (int i = 0; i < d; ++i)
        c[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((v(i) - lo(i)) / delta)), 0, dims[i] - 1);
    };
    auto key_of = [&](const std::vector<std::int64_t>& c) {
      std::int64_t k = 0;
      for (int i = d - 1; i >= 0; --i) k = k * dims[i] + c[i];
      return k;
    };
    std::vector<std::pair<std::int64_t, std::int64_t>> keyed;
    std::vector<std::int64_t> cell(d), probe(d);
    if (hashable) {
      keyed.reserve(n_slabs);
      for (std::int64_t j = 0; j < n_slabs; ++j) {
        cell_of(centers.col(j), cell);
        keyed.push_back({key_of(cell), j});
      }
      std::sort(keyed.begin(), keyed.end());
    }
    const double d2 = delta * delta;
    double sum = 0, covered = 0;
    VecD y(d);
    for (std::int64_t k = 0; k < inner; ++k) {
      for (int i = 0; i < d; ++i) y(i) = lo(i) + (hi(i) - lo(i)) * u01(rng);
      std::int64_t count = 0;
      if (!hashable) {
        for (std::int64_t j = 0; j < n_slabs; ++j)
          if ((centers.col(j) - y).squaredNorm() < d2) ++count;
      } else {
        cell_of(y, cell);
        std::int64_t combos = 1;
        for (int i = 0; i < d; ++i) combos *= 3;
        for (std::int64_t c = 0; c < combos; ++c) {
          std::int64_t rest = c;
          bool valid = true;
          for (int i = 0; i < d; ++i) {
            probe[i] = cell[i] + rest % 3 - 1;
            rest /= 3;
            if (probe[i] < 0 || probe[i] >= dims[i]) valid = false;
          }
          if (!valid) continue;
          const std::int64_t key = key_of(probe);
          auto it = std::lower_bound(keyed.begin(), keyed.end(), std::make_pair(key, std::int64_t{-1}));
          for (; it != keyed.end() && it->first == key; ++it)
            if ((centers.col(it->second) - y).squaredNorm() < d2) ++count;
        }
      }
      if (count > 0) {
        sum += std::pow(static_cast<double>(count), r);
        covered += 1;
      }
    }
    est[o] = vol * sum / static_cast<double>(inner);
    uni[o] = vol * covered / static_cast<double>(inner);
  });

  auto mean_se = [outer](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(outer);
    double var = 0;
    for (double x : v) var += (x - m) * (x - m);
    var /= static_cast<double>(outer - 1);
    return std::pair<double, double>{4 * m, 4 * std::sqrt(var / static_cast<double>(outer))};
  };
  KakeyaResult res;
  std::tie(res.norm_power, res.norm_power_std_error) = mean_se(est);
  std::tie(res.union_measure, res.union_std_error) = mean_se(uni);
  res.norm = std::pow(res.norm_power, 1 / r);
  res.norm_std_error = res.norm_power > 0 ? res.norm * res.norm_power_std_error / (r * res.norm_power) : 0;
  res.slabs = n_slabs;
  res.samples = outer * inner;
  return res;
}

}  // namespace pencurv
