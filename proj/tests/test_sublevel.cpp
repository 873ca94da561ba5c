#include "doctest.h"

#include "pencurv/errors.hpp"
#include "pencurv/sublevel.hpp"

#include <cmath>
#include <random>

using namespace pencurv;

namespace {

const BinaryForm<double> kSt{{0, 1, 0}};
const BinaryForm<double> kDisk{{-1, 0, -1}};
const BinaryForm<double> kCube{{1, 3, 3, 1}};

std::vector<double> ladder(int from, int to) {
  std::vector<double> out;
  for (int k = from; k <= to; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

// s^mu t^nu as a binary form of degree mu + nu
BinaryForm<double> monomial(int mu, int nu) {
  BinaryForm<double> f;
  f.coeffs.assign(mu + nu + 1, 0.0);
  f.coeffs[mu] = 1;
  return f;
}

}  // namespace

TEST_CASE("sublevel_measure examples") {
  MeasureEstimate disk = sublevel_measure({kDisk, 0.25, MonteCarloMethod{1'000'000, 1}});
  CHECK(std::abs(disk.value - M_PI * 0.25) <= 3 * disk.std_error);

  const double delta = std::exp(-1.0);
  MeasureEstimate st = sublevel_measure({kSt, delta, MonteCarloMethod{1'000'000, 2}});
  CHECK(std::abs(st.value - 8 * delta) <= 3 * st.std_error);
  CHECK(8 * delta == doctest::Approx(2.943).epsilon(1e-3));

  CHECK(sublevel_measure({kSt, 1.5, GridMethod{128}}).value == 4);
  CHECK(sublevel_measure({kSt, 1.5, MonteCarloMethod{10'000, 3}}).value == 4);
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(sublevel_measure({kSt, 0, GridMethod{}}), PreconditionViolation);
  CHECK_THROWS_AS(sublevel_measure({kSt, 0.1, GridMethod{32}}), PreconditionViolation);
  CHECK_THROWS_AS(sublevel_measure({kSt, 0.1, MonteCarloMethod{100, 1}}), PreconditionViolation);
}

TEST_CASE("two_factor_oracle examples") {
  CHECK(two_factor_oracle(1, 1, std::exp(-1.0)) == doctest::Approx(8 * std::exp(-1.0)));
  CHECK(two_factor_oracle(1, 2, 2) == 4);
  CHECK(two_factor_oracle(2, 1, 1) == 4);
  // mu = 2, nu = 1: 4 (sqrt(delta) + (delta - sqrt(delta)) / (1 - 2)) = 4 (2 sqrt(delta) - delta)
  const double delta = 1e-4;
  const double exact = two_factor_oracle(2, 1, delta);
  CHECK(exact == doctest::Approx(4 * (2 * std::sqrt(delta) - delta)));
  CHECK(exact == doctest::Approx(two_factor_oracle(1, 2, delta)));
  // fine grid cross-check (the boundary layer needs many cells)
  CHECK(sublevel_measure({monomial(2, 1), delta, GridMethod{8192}}).value == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("log_plus") {
  CHECK(log_plus(1.0) == 1);
  CHECK(log_plus(2.0) == 1);
  CHECK(log_plus(std::exp(3.0)) == doctest::Approx(3));
}

TEST_CASE("fit_exponent examples") {
  ExponentFit st = fit_exponent(kSt, ladder(4, 14), MonteCarloMethod{1'000'000, 4}, true);
  CHECK(st.log_hypothesized);
  CHECK(std::abs(st.log_corrected_exponent - 1.0) <= 0.05);
  ExponentFit cube = fit_exponent(kCube, ladder(4, 16), MonteCarloMethod{1'000'000, 5}, false);
  CHECK(std::abs(cube.exponent - 1.0 / 3) <= 0.05);
  ExponentFit disk = fit_exponent(kDisk, ladder(4, 16), MonteCarloMethod{1'000'000, 6}, false);
  CHECK(std::abs(disk.exponent - 1.0) <= 0.05);
}

TEST_CASE("fit_exponent ladder validation") {
  CHECK_THROWS_AS(fit_exponent(kSt, ladder(4, 7), GridMethod{}, false), PreconditionViolation);
  CHECK_THROWS_AS(fit_exponent(kSt, {0.1, 0.05, 0.05, 0.01, 0.001}, GridMethod{}, false), PreconditionViolation);
  CHECK_THROWS_AS(fit_exponent(kDisk, ladder(20, 26), MonteCarloMethod{10'000, 1}, false),
                  DegenerateLadder);
}

TEST_CASE("fit_line") {
  LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2));
  CHECK(f.intercept == doctest::Approx(1));
  CHECK(f.max_residual < 1e-12);
}

TEST_CASE("Monte Carlo is reproducible from the seed") {
  MeasureEstimate a = sublevel_measure({kCube, 0.01, MonteCarloMethod{100'000, 9}});
  MeasureEstimate b = sublevel_measure({kCube, 0.01, MonteCarloMethod{100'000, 9}});
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("property: measure is nondecreasing in delta") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> coef(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    BinaryForm<double> f;
    int d = 2 + trial % 5;
    for (int k = 0; k <= d; ++k) f.coeffs.push_back(coef(rng));
    double last_grid = 0, last_mc = 0;
    for (int k = 12; k >= 1; --k) {
      double delta = std::ldexp(1.0, -k);
      double grid = sublevel_measure({f, delta, GridMethod{128}}).value;
      double mc = sublevel_measure({f, delta, MonteCarloMethod{20'000, 77}}).value;
      CHECK(grid >= last_grid);
      CHECK(mc >= last_mc);
      last_grid = grid;
      last_mc = mc;
    }
  }
}

TEST_CASE("property: Monte Carlo and grid agree with the monomial oracle") {
  for (auto [mu, nu] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {1, 3}, {2, 2}, {3, 1}}) {
    for (double delta : ladder(2, 10)) {
      CAPTURE(mu);
      CAPTURE(nu);
      CAPTURE(delta);
      double exact = two_factor_oracle(mu, nu, delta);
      MeasureEstimate mc = sublevel_measure({monomial(mu, nu), delta, MonteCarloMethod{200'000, 52}});
      CHECK(std::abs(mc.value - exact) <= 3 * mc.std_error + 1e-12);
      MeasureEstimate grid = sublevel_measure({monomial(mu, nu), delta, GridMethod{1024}});
      CHECK(std::abs(grid.value - exact) <= 3 * mc.std_error + 1e-12);
    }
  }
}

TEST_CASE("property: sharpness floor and upper bounds") {
  struct Case {
    BinaryForm<double> f;
    int m_star;
  };
  // well-curved-admissible forms first, then flat ones
  const std::vector<Case> balanced = {{kSt, 1}, {kDisk, 1}, {{{0, 0, 1, 0, 0}}, 2}, {{{1, 0, -5, 0, 4}}, 1}};
  const std::vector<Case> flat = {{kCube, 3}, {{{1, 2, 1}}, 2}, {{{0, 0, 0, 1, 0}}, 3}};
  for (bool is_flat : {false, true})
    for (const auto& c : is_flat ? flat : balanced) {
      const int d = c.f.degree();
      double worst = 0;
      for (double delta : ladder(4, 14)) {
        MeasureEstimate m = sublevel_measure({c.f, delta, MonteCarloMethod{200'000, 53}});
        CHECK(m.value >= 1e-2 * std::pow(delta, 2.0 / d));
        double bound = is_flat ? std::pow(delta, 1.0 / c.m_star) : std::pow(delta, 2.0 / d) * (1 + std::log(1 / delta));
        worst = std::max(worst, m.value / bound);
      }
      CHECK(worst <= 16);
    }
}
