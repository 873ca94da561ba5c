#pragma once

#include "pencurv/classify.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pencurv {

enum class Truth { True, False, Unknown };

const char* to_string(Truth t);

// The verdict data that decides which exponent regions apply.
struct ExponentRange {
  VerdictKind kind = VerdictKind::WellCurved;
  int d = 0;
  int m_star = 0;
  bool critical = false;
  int n0 = 0;
  std::vector<int> block_sizes;
  bool blocks_resolved = true;
  int k = 0;
  int l_h = 0;
  Rational epsilon;
};

ExponentRange range_of(const Verdict<Rational>& v, int d);
ExponentRange range_of(const Verdict<double>& v, int d);

// 1/p for "inf", an integer, "a/b" or a decimal; p must be at least 1.
Rational reciprocal_of(const std::string& p);
Rational reciprocal_of(const Rational& p);

// Arguments are reciprocals x = 1/p, y = 1/q and optionally z = 1/r, all in [0, 1].
// Without z (or with z == y) the plain L^p -> L^q question is answered.
Truth predicted_true_region(const ExponentRange& range, const Rational& x, const Rational& y,
                            const std::optional<Rational>& z = std::nullopt);

// The two region tests behind predicted_true_region; they never overlap.
bool proven_true(const ExponentRange& range, const Rational& x, const Rational& y,
                 const std::optional<Rational>& z = std::nullopt);
bool proven_false(const ExponentRange& range, const Rational& x, const Rational& y,
                  const std::optional<Rational>& z = std::nullopt);

// -d + 2d/q' from the weighted slab bound; q = infinity when inv_q == 0.
Rational kakeya_exponent(int d, const Rational& inv_q);
// -2d/(d+4): the well-curved specialization in L^{(d+4)/d}.
Rational kakeya_exponent_well_curved(int d);
// -d/q: the weighted bound with unit weights over a full delta-lattice.
Rational kakeya_exponent_unit_weights(int d, const Rational& inv_q);

}  // namespace pencurv
