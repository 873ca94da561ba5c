#include "pencurv/factorize.hpp"
#include "pencurv/errors.hpp"

#include <algorithm>
#include <numeric>

namespace pencurv {

namespace {

struct Tableau {
  MatQ t;  // rows: constraints; last column: right-hand side
  std::vector<int> basis;
  std::vector<bool> allowed;

  int rows() const { return static_cast<int>(t.rows()); }
  int vars() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int r, int c) {
    Rational inv = 1 / t(r, c);
    t.row(r) *= inv;
    for (int i = 0; i < rows(); ++i) {
      if (i == r || t(i, c) == 0) continue;
      Rational f = t(i, c);
      t.row(i) -= f * t.row(r);
    }
    basis[r] = c;
  }

  std::vector<Rational> reduced_costs(const std::vector<Rational>& cost) const {
    std::vector<Rational> r(cost.begin(), cost.end());
    for (int i = 0; i < rows(); ++i) {
      const Rational& cb = cost[basis[i]];
      if (cb == 0) continue;
      for (int j = 0; j < vars(); ++j) r[j] -= cb * t(i, j);
    }
    return r;
  }

  // Minimizes cost . x over the allowed columns with Bland's rule.
  std::vector<Rational> minimize(const std::vector<Rational>& cost) {
    for (;;) {
      std::vector<Rational> r = reduced_costs(cost);
      int enter = -1;
      for (int j = 0; j < vars(); ++j)
        if (allowed[j] && r[j] < 0 && std::find(basis.begin(), basis.end(), j) == basis.end()) {
          enter = j;
          break;
        }
      if (enter < 0) return r;
      int leave = -1;
      Rational best;
      for (int i = 0; i < rows(); ++i) {
        if (t(i, enter) <= 0) continue;
        Rational ratio = t(i, vars()) / t(i, enter);
        if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) throw PreconditionViolation("internal: unbounded linear program");
      pivot(leave, enter);
    }
  }
};

}  // namespace

std::optional<VecQ> lexmin_feasible(const MatQ& a, const VecQ& b) {
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  Tableau tab;
  tab.t = MatQ::Zero(m, n + m + 1);
  for (int i = 0; i < m; ++i) {
    Rational sign = b(i) < 0 ? -1 : 1;
    tab.t.row(i).head(n) = sign * a.row(i);
    tab.t(i, n + i) = 1;
    tab.t(i, n + m) = sign * b(i);
    tab.basis.push_back(n + i);
  }
  tab.allowed.assign(n + m, true);

  std::vector<Rational> phase1(n + m, Rational(0));
  for (int i = 0; i < m; ++i) phase1[n + i] = 1;
  tab.minimize(phase1);
  Rational infeasibility = 0;
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] >= n) infeasibility += tab.t(i, n + m);
  if (infeasibility != 0) return std::nullopt;

  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) continue;
    for (int j = 0; j < n; ++j)
      if (tab.t(i, j) != 0) {
        tab.pivot(i, j);
        break;
      }
  }
  for (int j = n; j < n + m; ++j) tab.allowed[j] = false;

  // optimize x_0, then x_1 on the optimal face, and so on
  for (int k = 0; k < n; ++k) {
    std::vector<Rational> cost(n + m, Rational(0));
    cost[k] = 1;
    std::vector<Rational> r = tab.minimize(cost);
    for (int j = 0; j < n; ++j)
      if (r[j] > 0 && std::find(tab.basis.begin(), tab.basis.end(), j) == tab.basis.end()) tab.allowed[j] = false;
  }
  VecQ x = VecQ::Zero(n);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < n) x(tab.basis[i]) = tab.t(i, n + m);
  return x;
}

namespace {

void validate(const std::vector<int>& m, int d) {
  if (d < 1) throw InvalidMultiplicities("degree must be positive");
  for (int x : m)
    if (x < 1) throw InvalidMultiplicities("multiplicities must be positive integers");
  if (std::accumulate(m.begin(), m.end(), 0) != d)
    throw InvalidMultiplicities("multiplicities must sum to the degree " + std::to_string(d));
}

}  // namespace

Rational PairFactorization::at(int j, int k) const {
  if (j > k) std::swap(j, k);
  auto it = mu.find({j, k});
  return it == mu.end() ? Rational(0) : it->second;
}

bool PairFactorization::check() const {
  const int l = static_cast<int>(multiplicities.size());
  Rational total = 0;
  for (const auto& [jk, v] : mu) {
    if (v < 0 || jk.first >= jk.second || jk.second >= l) return false;
    total += v;
  }
  for (int j = 0; j < l; ++j) {
    Rational row = 0;
    for (int k = 0; k < l; ++k)
      if (k != j) row += at(j, k);
    if (row != multiplicities[j]) return false;
  }
  return 2 * total == std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
}

bool FarkasCertificate::check() const {
  const size_t l = multiplicities.size();
  if (y.size() != l) return false;
  for (size_t j = 0; j < l; ++j)
    for (size_t k = j + 1; k < l; ++k)
      if (y[j] + y[k] < 0) return false;
  Rational dot = 0;
  for (size_t j = 0; j < l; ++j) dot += multiplicities[j] * y[j];
  return dot < 0;
}

PairResult pair_factorization(const std::vector<int>& m, int d) {
  validate(m, d);
  const int l = static_cast<int>(m.size());
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < l; ++j)
    for (int k = j + 1; k < l; ++k) pairs.push_back({j, k});
  MatQ a = MatQ::Zero(l, static_cast<Eigen::Index>(pairs.size()));
  for (size_t c = 0; c < pairs.size(); ++c) {
    a(pairs[c].first, c) = 1;
    a(pairs[c].second, c) = 1;
  }
  VecQ b(l);
  for (int j = 0; j < l; ++j) b(j) = m[j];
  const bool balanced = 2 * *std::max_element(m.begin(), m.end()) <= d;

  std::optional<VecQ> x = pairs.empty() ? std::nullopt : lexmin_feasible(a, b);
  if (x) {
    if (!balanced) throw PreconditionViolation("internal: feasible pairing with a dominant multiplicity");
    PairFactorization f{m, {}};
    for (size_t c = 0; c < pairs.size(); ++c)
      if ((*x)(c) != 0) f.mu[pairs[c]] = (*x)(c);
    return f;
  }
  if (balanced) throw PreconditionViolation("internal: infeasible pairing without a dominant multiplicity");
  FarkasCertificate cert{m, std::vector<Rational>(l, Rational(1))};
  cert.y[std::max_element(m.begin(), m.end()) - m.begin()] = -1;
  if (!cert.check()) throw PreconditionViolation("internal: certificate does not verify");
  return cert;
}

bool GroupedPairFactorization::check() const {
  std::map<std::pair<int, int>, Rational> rows;
  Rational total = 0;
  int d = 0;
  for (const auto& g : groups) d += std::accumulate(g.begin(), g.end(), 0);
  for (const auto& [key, v] : mu) {
    if (v < 0 || key.first.first >= key.second.first) return false;
    rows[key.first] += v;
    rows[key.second] += v;
    total += v;
  }
  for (size_t j = 0; j < groups.size(); ++j)
    for (size_t i = 0; i < groups[j].size(); ++i)
      if (rows[{static_cast<int>(j), static_cast<int>(i)}] != groups[j][i]) return false;
  return 2 * total == d;
}

bool GroupedCertificate::check() const {
  if (y.size() != groups.size()) return false;
  Rational dot = 0;
  for (size_t j = 0; j < groups.size(); ++j) {
    if (y[j].size() != groups[j].size()) return false;
    for (size_t i = 0; i < groups[j].size(); ++i) dot += groups[j][i] * y[j][i];
  }
  for (size_t j = 0; j < groups.size(); ++j)
    for (size_t k = j + 1; k < groups.size(); ++k)
      for (const auto& yj : y[j])
        for (const auto& yk : y[k])
          if (yj + yk < 0) return false;
  return dot < 0;
}

GroupedResult grouped_pair_factorization(const std::vector<std::vector<int>>& groups, int d) {
  std::vector<int> flat, totals;
  std::vector<std::pair<int, int>> members;
  for (size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].empty()) throw InvalidMultiplicities("empty group");
    totals.push_back(std::accumulate(groups[j].begin(), groups[j].end(), 0));
    for (size_t i = 0; i < groups[j].size(); ++i) {
      flat.push_back(groups[j][i]);
      members.push_back({static_cast<int>(j), static_cast<int>(i)});
    }
  }
  validate(flat, d);
  const int n = static_cast<int>(members.size());
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (members[u].first != members[v].first) pairs.push_back({u, v});
  const bool balanced = 2 * *std::max_element(totals.begin(), totals.end()) <= d;

  std::optional<VecQ> x;
  if (!pairs.empty()) {
    MatQ a = MatQ::Zero(n, static_cast<Eigen::Index>(pairs.size()));
    for (size_t c = 0; c < pairs.size(); ++c) {
      a(pairs[c].first, c) = 1;
      a(pairs[c].second, c) = 1;
    }
    VecQ b(n);
    for (int u = 0; u < n; ++u) b(u) = flat[u];
    x = lexmin_feasible(a, b);
  }
  if (x) {
    if (!balanced) throw PreconditionViolation("internal: feasible grouped pairing with a dominant group");
    GroupedPairFactorization f{groups, {}};
    for (size_t c = 0; c < pairs.size(); ++c)
      if ((*x)(c) != 0) f.mu[{members[pairs[c].first], members[pairs[c].second]}] = (*x)(c);
    return f;
  }
  if (balanced) throw PreconditionViolation("internal: infeasible grouped pairing without a dominant group");
  GroupedCertificate cert{groups, {}};
  const size_t heavy = std::max_element(totals.begin(), totals.end()) - totals.begin();
  for (size_t j = 0; j < groups.size(); ++j)
    cert.y.emplace_back(groups[j].size(), Rational(j == heavy ? -1 : 1));
  if (!cert.check()) throw PreconditionViolation("internal: grouped certificate does not verify");
  return cert;
}

std::vector<Rational> flat_factorization(int m_star, const std::vector<int>& others) {
  if (others.empty()) throw PreconditionViolation("flat factorization needs at least one other factor");
  int sum = 0;
  for (int m : others) {
    if (m < 1) throw InvalidMultiplicities("multiplicities must be positive integers");
    sum += m;
  }
  if (m_star <= sum) throw PreconditionViolation("dominant multiplicity must exceed the sum of the others");
  Rational excess = Rational(m_star - sum) / Rational(static_cast<long>(others.size()));
  std::vector<Rational> mu;
  for (int m : others) mu.push_back(Rational(m) + excess);
  return mu;
}

std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int left, int cap) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(left, cap); part >= 1; --part) {
      cur.push_back(part);
      self(self, left - part, part);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

}  // namespace pencurv
