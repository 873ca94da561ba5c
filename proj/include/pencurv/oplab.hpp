#pragma once

#include "pencurv/classify.hpp"
#include "pencurv/sublevel.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pencurv {

// { center + axes * u : |u_i| <= half_widths_i }
struct Parallelotope {
  VecD center;
  MatD axes;
  VecD half_widths;

  double volume() const;
  VecD sample(std::mt19937_64& rng) const;
};

Parallelotope axis_box(const VecD& lower, const VecD& upper);

// A bounded set given by membership, with a parallelotope cover used for
// sampling and an axis-aligned bounding box. Products keep their factors
// so samplers can draw one factor at a time.
struct SetPredicate {
  int dim = 0;
  std::function<bool(const VecD&)> contains;
  Parallelotope cover;
  VecD lower, upper;
  std::optional<double> analytic_measure;
  std::vector<SetPredicate> factors;
};

SetPredicate make_set(int dim, std::function<bool(const VecD&)> contains, Parallelotope cover,
                      std::optional<double> analytic_measure = std::nullopt);
SetPredicate product(const SetPredicate& a, const SetPredicate& b);
SetPredicate box_set(const VecD& lower, const VecD& upper);
SetPredicate ball_set(int dim, double radius);

struct McBudget {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
};

MeasureEstimate estimate_measure(const SetPredicate& s, const McBudget& budget);
// The analytic measure when known, else a Monte Carlo estimate.
MeasureEstimate measure_of(const SetPredicate& s, const McBudget& budget);

// 4 (1 + |A| + |B|), operator norms: f supported in B(0, C) x [-1, 1]^2
// sees every reachable translate.
double support_bound(const PencilD& p);
// |A|_inf + |B|_inf (row sums); bounds |(sA + tB) xi| in every norm used here.
double pencil_bound(const PencilD& p);

using FunctionYST = std::function<double(const VecD& y, double s, double t)>;
using FunctionXXi = std::function<double(const VecD& x, const VecD& xi)>;

// Midpoint rule with n x n nodes over (s, t) in [-1, 1]^2.
double apply_T(const FunctionYST& f, const PencilD& p, const VecD& x, const VecD& xi, int n = 64);
// Midpoint rule with n^d nodes over xi in [-1, 1]^d for d <= 3, Monte
// Carlo with n^3 samples beyond.
double apply_T_star(const FunctionXXi& g, const PencilD& p, const VecD& y, double s, double t, int n = 64,
                    std::uint64_t seed = kDefaultSeed);

FunctionYST indicator_yst(const SetPredicate& e);
FunctionXXi indicator_xxi(const SetPredicate& f);

// values(i, j) = F(x_j, xi_i) on a grid with cell volumes cell_x, cell_xi.
// Inner L^r in x, outer L^q in xi; infinity gives the sup norm.
double mixed_norm(const MatD& values, double cell_x, double cell_xi, double q, double r);

struct PairingEstimate {
  double value = 0;
  double std_error = 0;
  std::int64_t samples = 0;
};

// <T 1_E, 1_F> sampled over F x [-1, 1]^2 (the (s, t) draw uses the last
// factor of E when E is a product, else its bounding box).
PairingEstimate pairing_forward(const SetPredicate& e, const SetPredicate& f, const PencilD& p,
                                const McBudget& budget);
// <1_E, T* 1_F> sampled over E x [-1, 1]^d.
PairingEstimate pairing_adjoint(const SetPredicate& e, const SetPredicate& f, const PencilD& p,
                                const McBudget& budget);

struct RwtResult {
  PairingEstimate forward, adjoint;
  MeasureEstimate measure_e, measure_f;
  double alpha = 0, beta = 0;
  double lhs = 0, rhs = 0, ratio = 0;
  double ratio_rel_error = 0;  // first-order relative standard error of ratio
};

// alpha = <T 1_E, 1_F> / |F|, beta = <1_E, T* 1_F> / |E|, ratio = alpha^(q-1) beta / |E|.
RwtResult rwt_functional(const SetPredicate& e, const SetPredicate& f, const PencilD& p, double q,
                         const McBudget& budget);

// A test set in R^d x [-1, 1]^2 and a dual set in R^d x [-1, 1]^d with
// T 1_test >~ 1_dual. The dual set is a product (x part, xi part).
struct Family {
  std::string name;
  PencilD pencil;
  double delta = 0;
  SetPredicate test;
  SetPredicate dual;
  std::map<std::string, double> constants;
  std::map<std::string, SetPredicate> parts;  // named pieces, for measure checks
};

Family family_ball(const PencilD& p, double delta, double c = 0.5);
Family family_intro_slab(const PencilD& p, double delta);
Family family_flat_boxes(const PencilQ& p, const FlatNonvanishing<Rational>& fe, double delta,
                         double eps_prime = 0.25);
Family family_degenerate(const PencilQ& p, const DegenerateKernelSplit<Rational>& ks, double delta);
Family family_common_kernel(const PencilQ& p, const DegenerateCommonKernel<Rational>& ck, double delta);
// Dispatches on the exact verdict; well-curved pencils get the ball family.
Family family_for(const PencilQ& p, const Verdict<Rational>& v, double delta);

using FamilyBuilder = std::function<Family(double delta)>;

struct ScalingPoint {
  double delta = 0;
  PairingEstimate pairing;
  double test_measure = 0;
  double dual_x_measure = 0;
  double dual_xi_measure = 0;
  double ratio = 0;
};

struct ScalingResult {
  std::string family;
  double p = 0, q = 0, r = 0;
  std::vector<ScalingPoint> points;
  double slope = 0;
  double intercept = 0;
  double residual = 0;
  McBudget budget;
  std::map<std::string, double> constants;  // from the smallest delta
};

// Per delta: ratio = <T 1_test, 1_dual> / (|test|^(1/p) |dual_x|^(1/r') |dual_xi|^(1/q')),
// r defaulting to q. A slope clearly below zero certifies failure of the
// estimate along the family.
ScalingResult scaling_experiment(const FamilyBuilder& family, double p_exp, double q_exp,
                                 const std::vector<double>& ladder, const McBudget& budget,
                                 std::optional<double> r_exp = std::nullopt);
// Re-evaluates ratios and the fit for other exponents; pairings do not depend on them.
ScalingResult rescale(const ScalingResult& base, double p_exp, double q_exp,
                      std::optional<double> r_exp = std::nullopt);
// 1/p at which the fitted slope vanishes, for fixed q and r.
double failure_boundary(const ScalingResult& base, double q_exp, std::optional<double> r_exp = std::nullopt);

std::vector<double> default_scaling_ladder();  // 2^-2 .. 2^-8

// Slab S_delta(x, xi) = {(y, s, t) : |y - x + s A xi + t B xi| < delta, (s, t) in [-1, 1]^2}.
struct Slab {
  VecD x;
  VecD xi;
  double delta = 0;
  bool contains(const PencilD& p, const VecD& y, double s, double t) const;
  double measure() const;  // 4 |B_d(delta)|
};

using Placement = std::function<VecD(const VecD& xi, std::mt19937_64& rng)>;
Placement random_placement();

struct KakeyaResult {
  double norm = 0;  // || sum 1_S ||_{L^r}
  double norm_std_error = 0;
  double norm_power = 0;  // norm^r
  double norm_power_std_error = 0;
  double union_measure = 0;
  double union_std_error = 0;
  std::int64_t slabs = 0;
  std::int64_t samples = 0;
};

// Slabs over a delta-lattice of directions xi_j in [-1, 1]^d, x_j from the
// placement. Monte Carlo over (s, t) strata, then y in the box around the
// slab centers of that stratum.
KakeyaResult kakeya_slab_norm(const PencilD& p, double delta, double r, const Placement& placement,
                              const McBudget& budget);
KakeyaResult kakeya_slab_norm(const PencilD& p, const std::vector<Slab>& slabs, double r, const McBudget& budget);

std::vector<VecD> direction_lattice(int d, double delta);

double ball_volume(int dim, double radius);

}  // namespace pencurv
