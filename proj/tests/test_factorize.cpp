#include "doctest.h"
#include "support.hpp"

#include "pencurv/errors.hpp"
#include "pencurv/factorize.hpp"

#include <algorithm>
#include <cmath>

using namespace pencurv;
using namespace pencurv::testing;

namespace {

int total(const std::vector<int>& m) {
  int s = 0;
  for (int x : m) s += x;
  return s;
}

// L_j: sum over k != j of mu_jk equals m_j.
bool satisfies_equations(const PairFactorization& f) {
  const int n = static_cast<int>(f.multiplicities.size());
  for (int j = 0; j < n; ++j) {
    Rational sum = 0;
    for (int k = 0; k < n; ++k)
      if (k != j) sum += f.at(std::min(j, k), std::max(j, k));
    if (sum != f.multiplicities[j]) return false;
  }
  for (const auto& [jk, mu] : f.mu)
    if (mu < 0) return false;
  return true;
}

}  // namespace

TEST_CASE("pair_factorization examples") {
  auto one = std::get<PairFactorization>(pair_factorization({1, 1}, 2));
  CHECK(one.at(0, 1) == 1);

  auto three = std::get<PairFactorization>(pair_factorization({2, 1, 1}, 4));
  CHECK(satisfies_equations(three));
  CHECK(three.check());

  auto cert = std::get<FarkasCertificate>(pair_factorization({3, 1}, 4));
  REQUIRE(cert.y.size() == 2);
  CHECK(cert.y[0] == -1);
  CHECK(cert.y[1] == 1);
  CHECK(cert.check());
}

TEST_CASE("pair_factorization input validation") {
  CHECK_THROWS_AS(pair_factorization({2, 0}, 2), InvalidMultiplicities);
  CHECK_THROWS_AS(pair_factorization({2, 1}, 4), InvalidMultiplicities);
}

TEST_CASE("grouped_pair_factorization examples") {
  auto g1 = std::get<GroupedPairFactorization>(grouped_pair_factorization({{1}, {1}}, 2));
  CHECK(g1.check());
  REQUIRE(g1.mu.size() == 1);
  CHECK(g1.mu.begin()->second == 1);

  auto g2 = std::get<GroupedPairFactorization>(grouped_pair_factorization({{1, 1}, {2}}, 4));
  CHECK(g2.check());

  auto g3 = std::get<GroupedCertificate>(grouped_pair_factorization({{2, 1}, {1}}, 4));
  CHECK(g3.check());
  bool negative_in_first = false;
  for (const auto& y : g3.y[0]) negative_in_first |= y < 0;
  CHECK(negative_in_first);
}

TEST_CASE("flat_factorization examples") {
  CHECK(flat_factorization(3, {1, 1}) == std::vector<Rational>{Rational(3, 2), Rational(3, 2)});
  CHECK(flat_factorization(3, {1}) == std::vector<Rational>{Rational(3)});
  CHECK_THROWS_AS(flat_factorization(2, {1, 1}), PreconditionViolation);
}

TEST_CASE("lexmin_feasible") {
  // x + y = 1, x, y >= 0: lexicographic minimum puts x = 0
  MatQ a(1, 2);
  a << 1, 1;
  VecQ b(1);
  b << 1;
  auto x = lexmin_feasible(a, b);
  REQUIRE(x);
  CHECK((*x)(0) == 0);
  CHECK((*x)(1) == 1);
  b << -1;
  CHECK_FALSE(lexmin_feasible(a, b));
}

TEST_CASE("partitions") {
  CHECK(partitions(4).size() == 5);
  CHECK(partitions(12).size() == 77);
  for (const auto& p : partitions(7)) {
    CHECK(total(p) == 7);
    CHECK(std::is_sorted(p.rbegin(), p.rend()));
  }
}

TEST_CASE("property: Farkas dichotomy over every partition") {
  for (int d = 2; d <= 12; ++d)
    for (const auto& part : partitions(d)) {
      CAPTURE(d);
      PairResult r = pair_factorization(part, d);
      const bool balanced = 2 * part.front() <= d;
      CHECK(std::holds_alternative<PairFactorization>(r) == balanced);
      if (const auto* f = std::get_if<PairFactorization>(&r)) {
        CHECK(satisfies_equations(*f));
        CHECK(f->check());
      } else {
        const auto& c = std::get<FarkasCertificate>(r);
        CHECK(c.check());
        // y_j + y_k >= 0 for all pairs, m . y < 0
        Rational dot = 0;
        for (size_t j = 0; j < part.size(); ++j) {
          dot += c.y[j] * part[j];
          for (size_t k = j + 1; k < part.size(); ++k) CHECK(c.y[j] + c.y[k] >= 0);
        }
        CHECK(dot < 0);
      }
    }
}

TEST_CASE("property: shuffled multiplicities give the same answer") {
  Gen g(41);
  for (int trial = 0; trial < 60; ++trial) {
    int d = g.uniform(2, 12);
    auto parts = partitions(d);
    std::vector<int> m = parts[g.uniform(0, static_cast<int>(parts.size()) - 1)];
    std::shuffle(m.begin(), m.end(), g.rng);
    PairResult r = pair_factorization(m, d);
    CHECK(std::holds_alternative<PairFactorization>(r) == (2 * *std::max_element(m.begin(), m.end()) <= d));
    std::visit([](const auto& x) { CHECK(x.check()); }, r);
  }
}

TEST_CASE("property: grouped factorization follows the parent totals") {
  Gen g(42);
  for (int trial = 0; trial < 40; ++trial) {
    int groups = g.uniform(2, 4);
    std::vector<std::vector<int>> gs;
    int d = 0, biggest = 0;
    for (int i = 0; i < groups; ++i) {
      std::vector<int> members(g.uniform(1, 3));
      int sum = 0;
      for (int& x : members) sum += x = g.uniform(1, 3);
      gs.push_back(members);
      d += sum;
      biggest = std::max(biggest, sum);
    }
    GroupedResult r = grouped_pair_factorization(gs, d);
    CHECK(std::holds_alternative<GroupedPairFactorization>(r) == (2 * biggest <= d));
    std::visit([](const auto& x) { CHECK(x.check()); }, r);
  }
}

TEST_CASE("property: pair exponents reconstruct the determinant of well-curved pencils") {
  Gen g(43);
  const std::vector<std::vector<int>> shapes = {{1, 1}, {1, 1, 1}, {2, 1, 1}, {2, 2}, {1, 1, 1, 1}, {3, 2, 1}, {2, 2, 2}};
  for (const auto& shape : shapes)
    for (int rep = 0; rep < 3; ++rep) {
      PencilQ p = g.with_multiplicities(shape);
      BinaryForm<double> f = to_double(det_pencil(p));
      RootMultiset roots = roots_with_multiplicities(det_pencil(p));
      std::vector<int> m;
      for (const auto& r : roots.roots) m.push_back(r.multiplicity);
      auto fac = std::get<PairFactorization>(pair_factorization(m, p.dim()));
      // prod_{j<k} (theta_j theta_k)^{mu_jk} with theta_j = b_j s - a_j t
      auto product = [&](double s, double t) {
        double log_abs = 0;
        for (const auto& [jk, mu] : fac.mu) {
          const auto& x = roots.roots[jk.first];
          const auto& y = roots.roots[jk.second];
          double th = std::abs(x.b * s - x.a * t) * std::abs(y.b * s - y.a * t);
          log_abs += to_double(mu) * std::log(th);
        }
        return std::exp(log_abs);
      };
      std::vector<double> ratios;
      for (double th : {0.3, 0.9, 1.4, 2.2, 2.9}) {
        double s = std::cos(th), t = std::sin(th);
        ratios.push_back(std::abs(eval_form(f, s, t)) / product(s, t));
      }
      for (double r : ratios) CHECK(r == doctest::Approx(ratios[0]).epsilon(1e-6));
    }
}
