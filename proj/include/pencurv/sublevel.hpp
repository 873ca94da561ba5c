#pragma once

#include "pencurv/pencil.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace pencurv {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eedULL;

struct GridMethod {
  int n = 1024;  // cells per axis
};

struct MonteCarloMethod {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
};

using SublevelMethod = std::variant<GridMethod, MonteCarloMethod>;

// Measure of {(s, t) in [-1, 1]^2 : |P(s, t)| < delta}.
struct SublevelQuery {
  BinaryForm<double> form;
  double delta = 0;
  SublevelMethod method = MonteCarloMethod{};
};

struct MeasureEstimate {
  double value = 0;
  double std_error = 0;  // zero for grids
};

MeasureEstimate sublevel_measure(const SublevelQuery& q);

// Exact measure of {|s|, |t| <= 1 : |s|^mu |t|^nu < delta}.
double two_factor_oracle(double mu, double nu, double delta);

// max(1, ln x)
double log_plus(double x);

struct ExponentFit {
  std::vector<double> ladder;
  std::vector<double> measures;
  std::vector<double> std_errors;
  bool log_hypothesized = false;
  double exponent = 0;  // slope of log measure against log delta
  double log_corrected_exponent = 0;  // same after dividing by log+(1/delta); only when hypothesized
  double intercept = 0;
  double residual = 0;  // max absolute residual of the reported fit
};

// 2^-4 .. 2^-16
std::vector<double> default_sublevel_ladder();

// Each rung gets its own seed derived from the method seed.
ExponentFit fit_exponent(const BinaryForm<double>& form, const std::vector<double>& ladder,
                         const SublevelMethod& method, bool hypothesize_log);

// Least-squares line through (x_i, y_i): returns {slope, intercept, max |residual|}.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pencurv
