#include "pencurv/sublevel.hpp"
#include "pencurv/errors.hpp"
#include "pencurv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pencurv {

namespace {

constexpr std::int64_t kBatch = 1 << 16;

void validate(const SublevelQuery& q) {
  if (!(q.delta > 0)) throw PreconditionViolation("sublevel threshold must be positive");
  if (q.form.coeffs.empty()) throw PreconditionViolation("empty binary form");
  if (const auto* g = std::get_if<GridMethod>(&q.method); g && g->n < 64)
    throw PreconditionViolation("grid needs at least 64 cells per axis");
  if (const auto* mc = std::get_if<MonteCarloMethod>(&q.method); mc && mc->samples < 10'000)
    throw PreconditionViolation("Monte Carlo needs at least 1e4 samples");
}

MeasureEstimate grid_measure(const BinaryForm<double>& f, double delta, int n) {
  std::vector<std::int64_t> hits(n, 0);
  const double h = 2.0 / n;
  parallel_for(n, [&](std::size_t i) {
    const double s = -1 + (i + 0.5) * h;
    std::int64_t c = 0;
    for (int j = 0; j < n; ++j)
      if (std::abs(eval_form(f, s, -1 + (j + 0.5) * h)) < delta) ++c;
    hits[i] = c;
  });
  std::int64_t total = 0;
  for (auto c : hits) total += c;
  return {4.0 * static_cast<double>(total) / (static_cast<double>(n) * n), 0.0};
}

MeasureEstimate mc_measure(const BinaryForm<double>& f, double delta, const MonteCarloMethod& m) {
  const std::int64_t batches = (m.samples + kBatch - 1) / kBatch;
  std::vector<std::int64_t> hits(batches, 0);
  parallel_for(batches, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(m.seed, b));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::int64_t count = std::min(kBatch, m.samples - static_cast<std::int64_t>(b) * kBatch);
    std::int64_t c = 0;
    for (std::int64_t i = 0; i < count; ++i) {
      double s = u(rng), t = u(rng);
      if (std::abs(eval_form(f, s, t)) < delta) ++c;
    }
    hits[b] = c;
  });
  std::int64_t total = 0;
  for (auto c : hits) total += c;
  const double n = static_cast<double>(m.samples);
  const double frac = static_cast<double>(total) / n;
  return {4.0 * frac, 4.0 * std::sqrt(frac * (1 - frac) / n)};
}

}  // namespace

MeasureEstimate sublevel_measure(const SublevelQuery& q) {
  validate(q);
  if (const auto* g = std::get_if<GridMethod>(&q.method)) return grid_measure(q.form, q.delta, g->n);
  return mc_measure(q.form, q.delta, std::get<MonteCarloMethod>(q.method));
}

double two_factor_oracle(double mu, double nu, double delta) {
  if (!(mu > 0) || !(nu > 0)) throw PreconditionViolation("exponents must be positive");
  if (delta >= 1) return 4.0;
  if (delta <= 0) return 0.0;
  if (mu < nu) std::swap(mu, nu);
  // In the unit square: all of s < a, then t < (delta / s^mu)^(1/nu) beyond.
  const double a = std::pow(delta, 1 / mu);
  if (mu == nu) return 4 * (a + a * std::log(1 / a));
  return 4 * (a + (std::pow(delta, 1 / nu) - a) / (1 - mu / nu));
}

double log_plus(double x) { return std::max(1.0, std::log(x)); }

std::vector<double> default_sublevel_ladder() {
  std::vector<double> l;
  for (int k = 4; k <= 16; ++k) l.push_back(std::ldexp(1.0, -k));
  return l;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  for (size_t i = 0; i < x.size(); ++i)
    f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.slope * x[i] - f.intercept));
  return f;
}

ExponentFit fit_exponent(const BinaryForm<double>& form, const std::vector<double>& ladder,
                         const SublevelMethod& method, bool hypothesize_log) {
  if (ladder.size() < 5) throw PreconditionViolation("ladder needs at least 5 points");
  for (size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0)) throw PreconditionViolation("ladder values must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) throw PreconditionViolation("ladder must be strictly decreasing");
  }
  ExponentFit fit;
  fit.ladder = ladder;
  fit.log_hypothesized = hypothesize_log;
  std::vector<double> lx, ly, lc;
  for (size_t i = 0; i < ladder.size(); ++i) {
    SublevelMethod m = method;
    if (auto* mc = std::get_if<MonteCarloMethod>(&m)) mc->seed = derive_seed(mc->seed, i);
    MeasureEstimate e = sublevel_measure({form, ladder[i], m});
    if (e.value <= 0)
      throw DegenerateLadder("measured value is zero at delta = " + std::to_string(ladder[i]) +
                             "; increase samples");
    fit.measures.push_back(e.value);
    fit.std_errors.push_back(e.std_error);
    lx.push_back(std::log(ladder[i]));
    ly.push_back(std::log(e.value));
    lc.push_back(std::log(e.value / log_plus(1 / ladder[i])));
  }
  LineFit plain = fit_line(lx, ly);
  fit.exponent = plain.slope;
  fit.intercept = plain.intercept;
  fit.residual = plain.max_residual;
  if (hypothesize_log) {
    LineFit corrected = fit_line(lx, lc);
    fit.log_corrected_exponent = corrected.slope;
    fit.intercept = corrected.intercept;
    fit.residual = corrected.max_residual;
  }
  return fit;
}

}  // namespace pencurv
