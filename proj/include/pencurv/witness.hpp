#pragma once

#include "pencurv/classify.hpp"

#include <cstdint>

namespace pencurv {

// (M, N) in SL(d, C) x SL(2, C), acting by rho_M sigma_N.
struct GroupElement {
  MatC M;
  Mat2<Complex> N;
};

struct ComplexPair {
  MatC A;
  MatC B;
};

template <class T> ComplexPair to_complex(const SymmetricPencil<T>& p) {
  return {to_complex(p.A), to_complex(p.B)};
}

GroupElement identity_element(int d);
GroupElement compose(const GroupElement& g, const GroupElement& h);  // g after h
ComplexPair act(const GroupElement& g, const ComplexPair& p);
double frobenius_norm(const ComplexPair& p);
bool is_special(const GroupElement& g, double tol = 1e-9);

// lambda -> (diag(lambda^a) M0, diag(lambda^b) N0) with integer exponent
// vectors a (summing to 0) and b = (b0, -b0).
struct DestabilizingCurve {
  VerdictKind kind = VerdictKind::WellCurved;
  GroupElement g0;
  std::vector<int> m_exponents;
  std::array<int, 2> n_exponents{0, 0};

  GroupElement at(double lambda) const;
};

// Coordinates adapted to the dominant eigenvalue of a flat pencil.
// basis = [chains | rest]: the chains span the generalized eigenspace U
// of C = A' B'^{-1} at lambda_star (columns nil^(r-1) v .. v per chain,
// chain lengths in sizes), rest spans the complementary invariant space.
struct FlatFrame {
  PencilQ relabelled;  // act_sigma(relabel, p)
  MatQ b_inv;
  MatQ c;
  MatQ basis;
  std::vector<int> sizes;
  int m = 0;  // dim U
};

FlatFrame flat_frame(const PencilQ& p, const FlatNonvanishing<Rational>& fe);

// Block-diagonal anti-identity over the chains of `sizes`.
MatQ chain_flip(const std::vector<int>& sizes);

DestabilizingCurve destabilizing_curve(const PencilQ& p, const Verdict<Rational>& v);
// Float input is converted exactly to rationals and reclassified exactly.
DestabilizingCurve destabilizing_curve(const PencilD& p, const Verdict<double>& v);

// The transformed pair at lambda, computed entrywise from act(g0, p) with
// combined exponents. Entries whose combined exponent is <= 0 must vanish;
// they are set to zero and their largest relative size is returned in
// *structural_residual.
ComplexPair curve_pair(const DestabilizingCurve& c, const ComplexPair& p, double lambda,
                       double* structural_residual = nullptr);

struct DecayReport {
  std::vector<double> lambdas;
  std::vector<double> norms;
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;         // max |log norm - fit|, natural log
  double structural_residual = 0;  // relative size of entries snapped to zero
  int predicted_rate = 0;          // smallest combined exponent of a nonzero entry
};

std::vector<double> default_decay_ladder();  // 2^-2 .. 2^-12

DecayReport verify_decay(const DestabilizingCurve& c, const ComplexPair& p, const std::vector<double>& ladder);
template <class T>
DecayReport verify_decay(const DestabilizingCurve& c, const SymmetricPencil<T>& p, const std::vector<double>& ladder) {
  return verify_decay(c, to_complex(p), ladder);
}

// Minimum Frobenius norm over random real group elements with entries in
// [-radius, radius] (normalized to determinant one) and the extra elements.
double sampled_orbit_infimum(const ComplexPair& p, int trials, double radius, std::uint64_t seed,
                             const std::vector<GroupElement>& extra = {});

}  // namespace pencurv
