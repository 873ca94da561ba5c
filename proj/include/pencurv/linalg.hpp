#pragma once

#include "pencurv/rational.hpp"

#include <vector>

namespace pencurv {

// Fraction-free determinant: rows are cleared of denominators and the
// integer matrix goes through Bareiss elimination.
Rational det_bareiss(const MatQ& m);
double det_float(const MatD& m);
Complex det_float(const MatC& m);

inline Rational det(const MatQ& m) { return det_bareiss(m); }
inline double det(const MatD& m) { return det_float(m); }

struct Rref {
  MatQ r;
  std::vector<int> pivots;
};

Rref rref(MatQ m);
int rank(const MatQ& m);
// Columns form a basis of the null space.
MatQ kernel(const MatQ& m);
// Columns form a basis of the column space (pivot columns of m).
MatQ column_basis(const MatQ& m);
MatQ inverse(const MatQ& m);
// Extends the columns of `basis` with columns of `pool` to a basis of
// span(basis, pool), keeping `basis` first.
MatQ extend_basis(const MatQ& basis, const MatQ& pool);
MatQ hstack(const MatQ& a, const MatQ& b);

int numeric_rank(const MatD& m, double rtol);
int numeric_rank(const MatC& m, double rtol);
MatD numeric_kernel(const MatD& m, double rtol);
MatD numeric_range(const MatD& m, double rtol);

double max_abs(const MatD& m);
double max_abs(const MatQ& m);

}  // namespace pencurv
