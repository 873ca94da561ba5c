#include "pencurv/roots.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pencurv {

int RootMultiset::max_multiplicity() const {
  int m = 0;
  for (const auto& r : roots) m = std::max(m, r.multiplicity);
  return m;
}

const ProjectiveRoot& RootMultiset::max_root() const {
  int m = max_multiplicity();
  for (const auto& r : roots)
    if (r.multiplicity == m) return r;
  throw PreconditionViolation("empty root multiset");
}

int RootMultiset::total_multiplicity() const {
  int s = 0;
  for (const auto& r : roots) s += r.multiplicity;
  return s;
}

std::array<Complex, 2> normalize_projective(Complex a, Complex b) {
  if (a == 0.0 && b == 0.0) throw PreconditionViolation("[0:0] is not a projective point");
  Complex pivot = std::abs(a) >= std::abs(b) ? a : b;
  Complex scale = std::abs(pivot) / pivot;
  a *= scale / std::abs(pivot);
  b *= scale / std::abs(pivot);
  Complex first = a != 0.0 ? a : b;
  if (first.real() < 0) {
    a = -a;
    b = -b;
  }
  if (a == 0.0) a = 0.0;
  if (b == 0.0) b = 0.0;
  return {a, b};
}

double chordal_distance(Complex a, Complex b, Complex c, Complex e) {
  double n1 = std::sqrt(std::norm(a) + std::norm(b));
  double n2 = std::sqrt(std::norm(c) + std::norm(e));
  return std::abs(a * e - b * c) / (n1 * n2);
}

double chordal_distance(const ProjectiveRoot& x, const ProjectiveRoot& y) {
  return chordal_distance(x.a, x.b, y.a, y.b);
}

namespace {

ProjectiveRoot make_root(Complex a, Complex b, int mult, bool real) {
  auto n = normalize_projective(a, b);
  if (real) {
    n[0] = n[0].real();
    n[1] = n[1].real();
  }
  return {n[0], n[1], mult, real};
}

void sort_roots(std::vector<ProjectiveRoot>& roots) {
  std::sort(roots.begin(), roots.end(), [](const ProjectiveRoot& x, const ProjectiveRoot& y) {
    auto key = [](const ProjectiveRoot& r) {
      return std::array<double, 4>{r.a.real(), r.a.imag(), r.b.real(), r.b.imag()};
    };
    return key(x) < key(y);
  });
}

std::vector<Complex> monic_roots(const std::vector<double>& ascending) {
  const int n = static_cast<int>(ascending.size()) - 1;
  if (n <= 0) return {};
  if (n == 1) return {Complex(-ascending[0] / ascending[1])};
  Eigen::VectorXd c(n + 1);
  for (int i = 0; i <= n; ++i) c(i) = ascending[i] / ascending[n];
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(c);
  const auto& r = solver.roots();
  return std::vector<Complex>(r.data(), r.data() + r.size());
}

// Chart coordinates: if |a| >= |b| use y = b/a on s = 1, otherwise x = a/b on t = 1.
struct Chart {
  bool s_chart;
  Complex coord(const std::array<Complex, 2>& p) const { return s_chart ? p[1] / p[0] : p[0] / p[1]; }
  std::array<Complex, 2> point(Complex z) const {
    return s_chart ? std::array<Complex, 2>{1.0, z} : std::array<Complex, 2>{z, 1.0};
  }
  std::vector<Complex> poly(const BinaryForm<double>& f) const {
    const int d = f.degree();
    std::vector<Complex> c(d + 1);
    for (int j = 0; j <= d; ++j) c[j] = s_chart ? f.coeffs[d - j] : f.coeffs[j];
    return c;
  }
};

// max_{j<m} |a_j| / max_{j>=m} |a_j| for the Taylor coefficients a_j at z.
double multiple_root_ratio(std::vector<Complex> b, Complex z, int m) {
  const int n = static_cast<int>(b.size()) - 1;
  std::vector<double> taylor(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    const int len = n - j;
    for (int i = len - 1; i >= 0; --i) b[i] += b[i + 1] * z;
    taylor[j] = std::abs(b[0]);
    b.erase(b.begin());
  }
  double low = 0.0, high = 0.0;
  for (int j = 0; j <= n; ++j) (j < m ? low : high) = std::max(j < m ? low : high, taylor[j]);
  if (high == 0.0) return low == 0.0 ? 0.0 : INFINITY;
  return low / high;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int x, int y) { parent[find(x)] = find(y); }
};

}  // namespace

RootMultiset roots_with_multiplicities(const BinaryForm<double>& f, const RootOptions& opts) {
  if (f.is_zero()) throw ZeroForm("binary form is identically zero");
  const int d = f.degree();
  const double tol = opts.cluster_tol;

  // exact zero coefficients give exact roots at [1:0] and [0:1]
  int top = d;
  while (f.coeffs[top] == 0.0) --top;
  int bottom = 0;
  while (f.coeffs[bottom] == 0.0) ++bottom;
  std::vector<std::array<Complex, 2>> pts;
  for (int i = 0; i < d - top; ++i) pts.push_back({1.0, 0.0});
  for (int i = 0; i < bottom; ++i) pts.push_back({0.0, 1.0});
  // The remaining roots come from the core form rotated so that its
  // leading coefficient is largest; a tiny leading coefficient would put a
  // root near infinity and spoil the companion eigenvalues of the others.
  BinaryForm<double> core{std::vector<double>(f.coeffs.begin() + bottom, f.coeffs.begin() + top + 1)};
  const int n_core = core.degree();
  if (n_core > 0) {
    double best_theta = 0, best_value = -1;
    for (int j = 0; j < 4 * n_core + 4; ++j) {
      const double th = std::numbers::pi * j / (4 * n_core + 4);
      const double v = std::abs(eval_form(core, std::cos(th), std::sin(th)));
      if (v > best_value) best_value = v, best_theta = th;
    }
    const double c = std::cos(best_theta), s = std::sin(best_theta);
    Mat2<double> rot;
    rot << c, s, -s, c;
    BinaryForm<double> g = substitute(core, rot);
    for (Complex x : monic_roots(g.coeffs)) {
      // g(x, 1) = core(c x - s, s x + c)
      pts.push_back(normalize_projective(c * x - s, s * x + c));
    }
  }

  const int n = static_cast<int>(pts.size());
  auto dist = [&](int i, int j) { return chordal_distance(pts[i][0], pts[i][1], pts[j][0], pts[j][1]); };

  DisjointSets clusters(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist(i, j) < tol) clusters.unite(i, j);

  auto members_of = [&](DisjointSets& ds) {
    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[ds.find(i)].push_back(i);
    std::erase_if(groups, [](const auto& g) { return g.empty(); });
    return groups;
  };
  auto centroid = [&](const std::vector<int>& g) {
    Chart chart{std::abs(pts[g[0]][0]) >= std::abs(pts[g[0]][1])};
    Complex z = 0.0;
    for (int i : g) z += chart.coord(pts[i]);
    z /= static_cast<double>(g.size());
    return std::pair{chart, z};
  };

  std::vector<std::vector<int>> ambiguous;
  for (double tau = 2 * tol; tau <= 4.0; tau *= 2) {
    DisjointSets linkage(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (dist(i, j) < tau) linkage.unite(i, j);
    for (const auto& group : members_of(linkage)) {
      bool spans_several = false;
      for (int i : group) spans_several |= clusters.find(i) != clusters.find(group[0]);
      if (!spans_several) continue;
      auto [chart, z] = centroid(group);
      // a group that does not fit in one chart is no multiple root
      bool fits = true;
      for (int i : group) fits &= std::abs(chart.coord(pts[i])) <= 2.0;
      if (!fits) continue;
      double ratio = multiple_root_ratio(chart.poly(f), z, static_cast<int>(group.size()));
      if (ratio <= opts.multiple_root_rtol) {
        for (int i : group) clusters.unite(i, group[0]);
      } else if (ratio <= 100 * opts.multiple_root_rtol) {
        ambiguous.push_back(group);
      }
    }
  }
  for (const auto& g : ambiguous)
    for (int i : g)
      if (clusters.find(i) != clusters.find(g[0]))
        throw ClusterAmbiguous("nearby roots are neither clearly separate nor a clear multiple root");

  auto groups = members_of(clusters);
  for (size_t x = 0; x < groups.size(); ++x)
    for (size_t y = x + 1; y < groups.size(); ++y) {
      double sep = INFINITY;
      for (int i : groups[x])
        for (int j : groups[y]) sep = std::min(sep, dist(i, j));
      if (sep >= tol && sep <= 10 * tol)
        throw ClusterAmbiguous("root clusters separated by " + std::to_string(sep) +
                               ", inside the ambiguity band of the cluster tolerance");
    }

  struct Cluster {
    std::array<Complex, 2> p;
    int mult;
  };
  std::vector<Cluster> found;
  for (const auto& g : groups) {
    auto [chart, z] = centroid(g);
    found.push_back({normalize_projective(chart.point(z)[0], chart.point(z)[1]), static_cast<int>(g.size())});
  }

  // real input: real clusters are snapped to the real line, the rest are
  // paired with their conjugates and averaged
  RootMultiset out;
  out.degree = d;
  std::vector<bool> used(found.size(), false);
  for (size_t i = 0; i < found.size(); ++i) {
    if (used[i]) continue;
    auto& c = found[i];
    auto conj = normalize_projective(std::conj(c.p[0]), std::conj(c.p[1]));
    if (chordal_distance(c.p[0], c.p[1], conj[0], conj[1]) < tol) {
      out.roots.push_back(make_root(c.p[0], c.p[1], c.mult, true));
      used[i] = true;
      continue;
    }
    int partner = -1;
    double best = 10 * tol;
    for (size_t j = 0; j < found.size(); ++j) {
      if (j == i || used[j] || found[j].mult != c.mult) continue;
      double dj = chordal_distance(found[j].p[0], found[j].p[1], conj[0], conj[1]);
      if (dj < best) {
        best = dj;
        partner = static_cast<int>(j);
      }
    }
    if (partner < 0) throw ClusterAmbiguous("non-real root cluster without a conjugate partner");
    used[i] = used[partner] = true;
    Chart chart{std::abs(c.p[0]) >= std::abs(c.p[1])};
    Complex z = 0.5 * (chart.coord(c.p) + std::conj(chart.coord(found[partner].p)));
    auto p = chart.point(z);
    out.roots.push_back(make_root(p[0], p[1], c.mult, false));
    out.roots.push_back(make_root(std::conj(p[0]), std::conj(p[1]), c.mult, false));
  }
  sort_roots(out.roots);
  return out;
}

void trim(PolyQ& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

PolyQ derivative(const PolyQ& p) {
  PolyQ out;
  for (size_t k = 1; k < p.size(); ++k) out.push_back(p[k] * static_cast<long>(k));
  trim(out);
  return out;
}

namespace {

void divmod(const PolyQ& a, const PolyQ& b, PolyQ& q, PolyQ& r) {
  r = a;
  trim(r);
  q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, Rational(0));
  while (r.size() >= b.size() && !r.empty()) {
    size_t shift = r.size() - b.size();
    Rational f = r.back() / b.back();
    q[shift] = f;
    for (size_t i = 0; i < b.size(); ++i) r[shift + i] -= f * b[i];
    r.pop_back();
    trim(r);
  }
}

void make_monic(PolyQ& p) {
  trim(p);
  if (p.empty()) return;
  Rational lead = p.back();
  for (auto& c : p) c /= lead;
}

}  // namespace

PolyQ poly_gcd(PolyQ a, PolyQ b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    PolyQ q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  make_monic(a);
  return a;
}

PolyQ poly_divexact(const PolyQ& a, const PolyQ& b) {
  PolyQ q, r;
  divmod(a, b, q, r);
  if (!r.empty()) throw PreconditionViolation("polynomial division is not exact");
  trim(q);
  return q;
}

std::vector<PolyQ> square_free_decomposition(const PolyQ& p0) {
  PolyQ p = p0;
  trim(p);
  if (p.empty()) throw ZeroForm("zero polynomial");
  std::vector<PolyQ> factors;
  if (p.size() == 1) return factors;
  PolyQ dp = derivative(p);
  PolyQ a = poly_gcd(p, dp);
  PolyQ b = poly_divexact(p, a);
  PolyQ c = poly_divexact(dp, a);
  PolyQ db = derivative(b);
  PolyQ dd = c;
  for (size_t i = 0; i < std::max(dd.size(), db.size()); ++i) {
    if (i >= dd.size()) dd.push_back(0);
    if (i < db.size()) dd[i] -= db[i];
  }
  trim(dd);
  while (b.size() > 1) {
    PolyQ g = poly_gcd(b, dd);
    factors.push_back(g);
    b = poly_divexact(b, g);
    c = poly_divexact(dd, g);
    db = derivative(b);
    dd = c;
    for (size_t i = 0; i < std::max(dd.size(), db.size()); ++i) {
      if (i >= dd.size()) dd.push_back(0);
      if (i < db.size()) dd[i] -= db[i];
    }
    trim(dd);
  }
  while (!factors.empty() && factors.back().size() <= 1) factors.pop_back();
  for (auto& f : factors) make_monic(f);
  return factors;
}

namespace {

int sign_at(const PolyQ& p, int side) {  // side = +1 at +infinity, -1 at -infinity
  if (p.empty()) return 0;
  int s = p.back() > 0 ? 1 : -1;
  if (side < 0 && (p.size() - 1) % 2 == 1) s = -s;
  return s;
}

int variations(const std::vector<PolyQ>& chain, int side) {
  int count = 0, last = 0;
  for (const auto& p : chain) {
    int s = sign_at(p, side);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace

int count_real_roots(const PolyQ& p0) {
  PolyQ p = p0;
  trim(p);
  if (p.size() <= 1) return 0;
  std::vector<PolyQ> chain{p, derivative(p)};
  while (chain.back().size() > 1) {
    PolyQ q, r;
    divmod(chain[chain.size() - 2], chain.back(), q, r);
    for (auto& c : r) c = -c;
    if (r.empty()) break;
    chain.push_back(r);
  }
  return variations(chain, -1) - variations(chain, 1);
}

RootMultiset roots_with_multiplicities(const BinaryForm<Rational>& f) {
  if (f.is_zero()) throw ZeroForm("binary form is identically zero");
  const int d = f.degree();
  PolyQ p(f.coeffs.begin(), f.coeffs.end());
  trim(p);
  RootMultiset out;
  out.degree = d;
  const int deg = static_cast<int>(p.size()) - 1;
  if (deg < d) out.roots.push_back(make_root(1.0, 0.0, d - deg, true));
  auto factors = square_free_decomposition(p);
  for (size_t i = 0; i < factors.size(); ++i) {
    const PolyQ& g = factors[i];
    if (g.size() <= 1) continue;
    const int mult = static_cast<int>(i) + 1;
    std::vector<double> gd;
    for (const auto& c : g) gd.push_back(to_double(c));
    std::vector<Complex> xs;
    if (g.size() == 2) {
      xs.push_back(to_double(Rational(-g[0] / g[1])));
    } else {
      xs = monic_roots(gd);
    }
    const int real_count = count_real_roots(g);
    std::sort(xs.begin(), xs.end(), [](Complex x, Complex y) { return std::abs(x.imag()) < std::abs(y.imag()); });
    for (int k = 0; k < real_count; ++k) out.roots.push_back(make_root(xs[k].real(), 1.0, mult, true));
    std::vector<Complex> upper;
    for (size_t k = real_count; k < xs.size(); ++k)
      if (xs[k].imag() > 0) upper.push_back(xs[k]);
    std::vector<Complex> lower;
    for (size_t k = real_count; k < xs.size(); ++k)
      if (xs[k].imag() <= 0) lower.push_back(std::conj(xs[k]));
    if (upper.size() != lower.size()) throw ClusterAmbiguous("conjugate pairing failed for an exact factor");
    std::sort(upper.begin(), upper.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
    std::sort(lower.begin(), lower.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
    for (size_t k = 0; k < upper.size(); ++k) {
      Complex z = 0.5 * (upper[k] + lower[k]);
      out.roots.push_back(make_root(z, 1.0, mult, false));
      out.roots.push_back(make_root(std::conj(z), 1.0, mult, false));
    }
  }
  sort_roots(out.roots);
  return out;
}

}  // namespace pencurv
