#pragma once

#include "pencurv/pencil.hpp"

#include <array>
#include <vector>

namespace pencurv {

// A zero [a:b] of a binary form, i.e. f(a, b) = 0. Stored normalized:
// max(|a|, |b|) = 1 with the larger component equal to +1 (or -1 when that
// makes the first nonzero component have positive real part).
struct ProjectiveRoot {
  Complex a;
  Complex b;
  int multiplicity = 1;
  bool is_real = true;
};

struct RootMultiset {
  int degree = 0;
  std::vector<ProjectiveRoot> roots;  // sorted by (Re a, Im a, Re b, Im b)

  int max_multiplicity() const;
  // First root of maximal multiplicity in the sorted order.
  const ProjectiveRoot& max_root() const;
  int total_multiplicity() const;
};

struct RootOptions {
  double cluster_tol = 1e-7;
  // Relative size of the lower Taylor coefficients below which a group of
  // nearby eigenvalues is accepted as one multiple root.
  double multiple_root_rtol = 1e-12;
};

RootMultiset roots_with_multiplicities(const BinaryForm<double>& f, const RootOptions& opts = {});
// Multiplicities come from an exact square-free decomposition; positions
// are double approximations of the square-free factors' roots.
RootMultiset roots_with_multiplicities(const BinaryForm<Rational>& f);

double chordal_distance(Complex a, Complex b, Complex c, Complex e);
double chordal_distance(const ProjectiveRoot& x, const ProjectiveRoot& y);
std::array<Complex, 2> normalize_projective(Complex a, Complex b);

using PolyQ = std::vector<Rational>;  // ascending powers

void trim(PolyQ& p);
PolyQ derivative(const PolyQ& p);
PolyQ poly_gcd(PolyQ a, PolyQ b);  // monic
PolyQ poly_divexact(const PolyQ& a, const PolyQ& b);
// factors[i] has every root of multiplicity i + 1; the product of
// factors[i]^(i+1) equals p up to a constant.
std::vector<PolyQ> square_free_decomposition(const PolyQ& p);
int count_real_roots(const PolyQ& p);  // distinct real roots, by Sturm sequence

}  // namespace pencurv
