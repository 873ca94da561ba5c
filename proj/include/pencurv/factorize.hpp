#pragma once

#include "pencurv/rational.hpp"

#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace pencurv {

// Indices are 0-based throughout; mu is keyed by (j, k) with j < k.
struct PairFactorization {
  std::vector<int> multiplicities;
  std::map<std::pair<int, int>, Rational> mu;  // nonzero entries only

  Rational at(int j, int k) const;
  // mu >= 0, every row sum equals its multiplicity, total equals d/2.
  bool check() const;
};

// y with y_j + y_k >= 0 for all j < k and sum_j m_j y_j < 0.
struct FarkasCertificate {
  std::vector<int> multiplicities;
  std::vector<Rational> y;

  bool check() const;
};

using PairResult = std::variant<PairFactorization, FarkasCertificate>;

PairResult pair_factorization(const std::vector<int>& multiplicities, int d);

// Members are addressed as (group, member). Pairs only join different groups.
struct GroupedPairFactorization {
  std::vector<std::vector<int>> groups;
  std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, Rational> mu;

  bool check() const;
};

struct GroupedCertificate {
  std::vector<std::vector<int>> groups;
  std::vector<std::vector<Rational>> y;

  bool check() const;
};

using GroupedResult = std::variant<GroupedPairFactorization, GroupedCertificate>;

GroupedResult grouped_pair_factorization(const std::vector<std::vector<int>>& groups, int d);

// Exponents mu_j = m_j + (m_star - sum m) / l for the factors other than
// the dominant one.
std::vector<Rational> flat_factorization(int m_star, const std::vector<int>& others);

// Lexicographically smallest x >= 0 with a x = b, by exact simplex with
// Bland's rule; nullopt when infeasible.
std::optional<VecQ> lexmin_feasible(const MatQ& a, const VecQ& b);

// All partitions of n into positive parts, parts in descending order.
std::vector<std::vector<int>> partitions(int n);

}  // namespace pencurv
