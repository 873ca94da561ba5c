#include "doctest.h"
#include "support.hpp"

#include "pencurv/errors.hpp"

#include <algorithm>
#include <cmath>

using namespace pencurv;
using namespace pencurv::testing;

namespace {

std::vector<int> mults(const RootMultiset& r) {
  std::vector<int> m;
  for (const auto& x : r.roots) m.push_back(x.multiplicity);
  std::sort(m.begin(), m.end());
  return m;
}

bool same_point(const ProjectiveRoot& r, Complex a, Complex b, double tol = 1e-9) {
  return chordal_distance(r.a, r.b, a, b) < tol;
}

// prod (b_j s - a_j t)^{m_j}, coefficients of s^k t^(d-k)
std::vector<Complex> expand(const RootMultiset& r) {
  std::vector<Complex> c{1.0};
  for (const auto& x : r.roots)
    for (int k = 0; k < x.multiplicity; ++k) {
      std::vector<Complex> next(c.size() + 1, 0.0);
      for (size_t i = 0; i < c.size(); ++i) {
        next[i] += -x.a * c[i];
        next[i + 1] += x.b * c[i];
      }
      c = next;
    }
  return c;
}

double reconstruction_error(const BinaryForm<double>& f, const RootMultiset& r) {
  std::vector<Complex> c = expand(r);
  size_t top = 0;
  for (size_t k = 0; k < f.coeffs.size(); ++k)
    if (std::abs(f.coeffs[k]) > std::abs(f.coeffs[top])) top = k;
  Complex scale = f.coeffs[top] / c[top];
  double err = 0;
  for (size_t k = 0; k < f.coeffs.size(); ++k) err = std::max(err, std::abs(scale * c[k] - f.coeffs[k]));
  return err / std::abs(f.coeffs[top]);
}

PolyQ poly_mul(const PolyQ& a, const PolyQ& b) {
  PolyQ c(a.size() + b.size() - 1, Rational(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

BinaryForm<Rational> form_from(const PencilQ& p) { return det_pencil(p); }

}  // namespace

TEST_CASE("roots examples") {
  BinaryForm<double> s2t2{{0, 0, 1, 0, 0}};
  RootMultiset r = roots_with_multiplicities(s2t2);
  REQUIRE(r.roots.size() == 2);
  CHECK(r.max_multiplicity() == 2);
  CHECK(r.total_multiplicity() == 4);
  bool has_s = false, has_t = false;
  for (const auto& x : r.roots) {
    CHECK(x.multiplicity == 2);
    has_s |= same_point(x, 0, 1);
    has_t |= same_point(x, 1, 0);
  }
  CHECK(has_s);
  CHECK(has_t);

  RootMultiset cube = roots_with_multiplicities(BinaryForm<double>{{1, 3, 3, 1}});
  REQUIRE(cube.roots.size() == 1);
  CHECK(cube.max_multiplicity() == 3);
  CHECK(same_point(cube.max_root(), 1, -1, 1e-6));
  CHECK(cube.max_root().is_real);

  RootMultiset disk = roots_with_multiplicities(BinaryForm<double>{{-1, 0, -1}});
  REQUIRE(disk.roots.size() == 2);
  CHECK(disk.max_multiplicity() == 1);
  for (const auto& x : disk.roots) {
    CHECK_FALSE(x.is_real);
    CHECK((same_point(x, Complex(0, 1), 1) || same_point(x, Complex(0, -1), 1)));
  }
}

TEST_CASE("exact roots examples") {
  BinaryForm<Rational> s2t2{{0, 0, 1, 0, 0}};
  RootMultiset r = roots_with_multiplicities(s2t2);
  CHECK(mults(r) == std::vector<int>{2, 2});
  BinaryForm<Rational> cube{{1, 3, 3, 1}};
  CHECK(mults(roots_with_multiplicities(cube)) == std::vector<int>{3});
  BinaryForm<Rational> disk{{-1, 0, -1}};
  RootMultiset d = roots_with_multiplicities(disk);
  CHECK(mults(d) == std::vector<int>{1, 1});
  CHECK_FALSE(d.roots[0].is_real);
}

TEST_CASE("zero forms are rejected") {
  CHECK_THROWS_AS(roots_with_multiplicities(BinaryForm<double>{{0, 0, 0}}), ZeroForm);
  CHECK_THROWS_AS(roots_with_multiplicities(BinaryForm<Rational>{{0, 0, 0}}), ZeroForm);
}

TEST_CASE("normalization and chordal distance") {
  auto n = normalize_projective(Complex(2, 0), Complex(-4, 0));
  CHECK(std::max(std::abs(n[0]), std::abs(n[1])) == doctest::Approx(1));
  CHECK(chordal_distance(Complex(1), Complex(2), Complex(-3), Complex(-6)) < 1e-15);
  CHECK(chordal_distance(Complex(1), Complex(0), Complex(0), Complex(1)) == doctest::Approx(1));
}

TEST_CASE("square-free decomposition and Sturm count") {
  // (x - 1)^2 (x + 2)^3 (x^2 + 1)
  PolyQ a{Rational(-1), Rational(1)}, b{Rational(2), Rational(1)}, c{Rational(1), Rational(0), Rational(1)};
  PolyQ p = poly_mul(poly_mul(poly_mul(a, a), poly_mul(b, poly_mul(b, b))), c);
  std::vector<PolyQ> f = square_free_decomposition(p);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == c);
  CHECK(f[1] == a);
  CHECK(f[2] == b);
  CHECK(count_real_roots(p) == 2);
  CHECK(count_real_roots(c) == 0);
  CHECK(derivative(c) == PolyQ{Rational(0), Rational(2)});
  CHECK(poly_divexact(poly_mul(a, c), c) == a);
  CHECK(poly_gcd(poly_mul(a, b), poly_mul(a, c)) == a);
}

TEST_CASE("property: float roots reconstruct the form") {
  Gen g(5);
  for (int trial = 0; trial < 100; ++trial) {
    int d = g.uniform(2, 8);
    BinaryForm<double> f;
    for (int k = 0; k <= d; ++k) f.coeffs.push_back(g.real(-3, 3));
    RootMultiset r = roots_with_multiplicities(f);
    CHECK(r.total_multiplicity() == d);
    CHECK(reconstruction_error(f, r) <= 1e-6);
  }
}

TEST_CASE("property: exact decomposition multiplies back to the input") {
  Gen g(6);
  for (int trial = 0; trial < 60; ++trial) {
    PolyQ p{Rational(1)};
    int parts = g.uniform(1, 4);
    for (int i = 0; i < parts; ++i) {
      PolyQ lin{g.small(), Rational(1)};
      int power = g.uniform(1, 3);
      for (int k = 0; k < power; ++k) p = poly_mul(p, lin);
    }
    Rational lead = g.nonzero();
    for (auto& x : p) x *= lead;
    std::vector<PolyQ> f = square_free_decomposition(p);
    PolyQ back{Rational(1)};
    for (size_t i = 0; i < f.size(); ++i)
      for (size_t k = 0; k <= i; ++k) back = poly_mul(back, f[i]);
    trim(back);
    REQUIRE(back.size() == p.size());
    Rational c = p.back() / back.back();
    for (size_t i = 0; i < p.size(); ++i) CHECK(back[i] * c == p[i]);
  }
}

TEST_CASE("property: multiplicities are sigma-invariant") {
  Gen g(7);
  const std::vector<std::vector<int>> shapes = {{1, 1}, {2, 1}, {3}, {2, 2}, {3, 1, 1}, {4, 2}, {1, 1, 1, 1}};
  for (const auto& shape : shapes)
    for (int rep = 0; rep < 6; ++rep) {
      BinaryForm<Rational> f = form_from(g.with_multiplicities(shape));
      BinaryForm<Rational> h = substitute(f, g.sl2());
      std::vector<int> want = shape;
      std::sort(want.begin(), want.end());
      CHECK(mults(roots_with_multiplicities(f)) == want);
      CHECK(mults(roots_with_multiplicities(h)) == want);
    }
}

TEST_CASE("property: exact and float multiplicities agree") {
  Gen g(8);
  const std::vector<std::vector<int>> shapes = {{1, 1}, {2}, {2, 1}, {3}, {2, 2}, {3, 1}, {2, 1, 1}, {3, 3}};
  int compared = 0;
  for (const auto& shape : shapes)
    for (int rep = 0; rep < 5; ++rep) {
      BinaryForm<Rational> f = form_from(g.with_multiplicities(shape));
      try {
        RootMultiset fl = roots_with_multiplicities(to_double(f));
        CHECK(mults(fl) == mults(roots_with_multiplicities(f)));
        ++compared;
      } catch (const ClusterAmbiguous&) {
      }
    }
  CHECK(compared >= 30);
}
