#include "pencurv/ranges.hpp"
#include "pencurv/errors.hpp"

namespace pencurv {

const char* to_string(Truth t) {
  switch (t) {
    case Truth::True: return "True";
    case Truth::False: return "False";
    case Truth::Unknown: return "Unknown";
  }
  return "?";
}

namespace {

template <class T> ExponentRange range_impl(const Verdict<T>& v, int d) {
  ExponentRange r;
  r.kind = kind_of(v);
  r.d = d;
  std::visit(
      [&](const auto& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, WellCurved>) {
          r.m_star = x.m_star;
          r.critical = x.critical;
        } else if constexpr (std::is_same_v<X, FlatNonvanishing<T>>) {
          r.m_star = x.m_star;
          r.n0 = x.n0;
          r.block_sizes = x.block_sizes;
          r.blocks_resolved = x.blocks_resolved;
        } else if constexpr (std::is_same_v<X, DegenerateKernelSplit<T>>) {
          r.k = x.k;
          r.l_h = x.l_h;
          r.epsilon = x.epsilon;
        }
      },
      v);
  return r;
}

void check_unit(const Rational& v, const char* name) {
  if (v < 0 || v > 1) throw PreconditionViolation(std::string(name) + " must lie in [0, 1]");
}

// Always-false conditions from the ball and slab examples.
bool necessary_fails(int d, const Rational& x, const Rational& y, const Rational& z) {
  return 2 + d * z < (d + 2) * x || z + y < x;
}

bool plain_false(const ExponentRange& r, const Rational& x, const Rational& y) {
  if (necessary_fails(r.d, x, y, y) || 2 * y < x) return true;
  switch (r.kind) {
    case VerdictKind::WellCurved:
      return false;
    case VerdictKind::FlatNonvanishing: {
      const int m = r.m_star;
      if (2 * y == x && 1 + m * y < (m + 1) * x) return true;
      if (!r.blocks_resolved) return false;
      int sq = r.n0, tri = r.n0;
      for (int n : r.block_sizes) {
        sq += n * n;
        tri += n * (n + 1) / 2;
      }
      return 1 + sq * y < (1 + tri) * x;
    }
    case VerdictKind::DegenerateKernelSplit:
      return (2 - r.epsilon) * y < x;
    case VerdictKind::DegenerateCommonKernel:
      return y < x;
  }
  return false;
}

bool plain_true(const ExponentRange& r, const Rational& x, const Rational& y) {
  if (y >= x) return true;  // interpolation of p = infinity with p = q = 1
  const int d = r.d;
  switch (r.kind) {
    case VerdictKind::WellCurved: {
      if (2 * y < x) return false;
      const Rational lhs = 2 + d * y, rhs = (d + 2) * x;
      if (lhs > rhs) return true;
      // critical line: open segment from the endpoint to (1, 1) when no log loss
      const Rational px = Rational(4) / (d + 4), py = Rational(2) / (d + 4);
      return lhs == rhs && !r.critical && !(x == px && y == py);
    }
    case VerdictKind::FlatNonvanishing: {
      const int m = r.m_star;
      const bool endpoint = x == Rational(2) / (m + 2) && y == Rational(1) / (m + 2);
      return 2 * y >= x && 1 + m * y >= (m + 1) * x && !endpoint;
    }
    default:
      return false;
  }
}

bool mixed_false(const ExponentRange& r, const Rational& x, const Rational& y, const Rational& z) {
  return necessary_fails(r.d, x, y, z);
}

bool mixed_true(const ExponentRange& r, const Rational& x, const Rational& y, const Rational& z) {
  const int d = r.d;
  if (x == 0 || (x == 1 && z == 1)) return true;
  if (r.kind == VerdictKind::WellCurved && 2 + d * z > (d + 2) * x && z + y >= x && 2 * z >= x) return true;
  // Hoelder in xi moves a plain L^p -> L^r estimate to any smaller outer exponent
  return y >= z && plain_true(r, x, z);
}

Truth combine(bool is_true, bool is_false) {
  if (is_true && is_false) throw PreconditionViolation("internal: exponent regions overlap");
  return is_true ? Truth::True : is_false ? Truth::False : Truth::Unknown;
}

}  // namespace

ExponentRange range_of(const Verdict<Rational>& v, int d) { return range_impl(v, d); }
ExponentRange range_of(const Verdict<double>& v, int d) { return range_impl(v, d); }

Rational reciprocal_of(const Rational& p) {
  if (p < 1) throw PreconditionViolation("exponent must be at least 1");
  return 1 / p;
}

Rational reciprocal_of(const std::string& p) {
  if (p == "inf" || p == "infinity" || p == "oo") return Rational(0);
  return reciprocal_of(parse_rational(p));
}

bool proven_true(const ExponentRange& r, const Rational& x, const Rational& y, const std::optional<Rational>& z) {
  if (!z || *z == y) return plain_true(r, x, y);
  return mixed_true(r, x, y, *z);
}

bool proven_false(const ExponentRange& r, const Rational& x, const Rational& y, const std::optional<Rational>& z) {
  if (!z || *z == y) return plain_false(r, x, y);
  return mixed_false(r, x, y, *z);
}

Truth predicted_true_region(const ExponentRange& r, const Rational& x, const Rational& y,
                            const std::optional<Rational>& z) {
  check_unit(x, "1/p");
  check_unit(y, "1/q");
  if (z) check_unit(*z, "1/r");
  if (r.d < 1) throw PreconditionViolation("dimension must be positive");
  return combine(proven_true(r, x, y, z), proven_false(r, x, y, z));
}

Rational kakeya_exponent(int d, const Rational& inv_q) {
  check_unit(inv_q, "1/q");
  return -d + 2 * d * (1 - inv_q);
}

Rational kakeya_exponent_well_curved(int d) { return Rational(-2 * d) / (d + 4); }

Rational kakeya_exponent_unit_weights(int d, const Rational& inv_q) {
  check_unit(inv_q, "1/q");
  return -d * inv_q;
}

}  // namespace pencurv
