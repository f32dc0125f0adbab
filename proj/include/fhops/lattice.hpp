#pragma once

// Exact integer linear algebra for small dense systems: Smith normal form
// and the solution set of A x = b over Z (a particular integer point plus a
// basis of the integer null lattice). Matrices here are at most a few rows
// and columns, so the textbook algorithm with full pivoting is fine.

#include <gmpxx.h>

#include <vector>

namespace fhops::lattice {

using Mat = std::vector<std::vector<mpz_class>>;
using Vec = std::vector<mpz_class>;

struct SmithForm {
  Mat U, V;  // unimodular: U * A * V = D
  Vec diag;  // d_1 | d_2 | ..., zero-padded to min(rows, cols)
  int rank = 0;
};
SmithForm smith_normal_form(const Mat& A);

struct IntegerAffine {
  bool consistent = false;
  Vec point;                // one integer solution (size = cols)
  std::vector<Vec> basis;   // integer null-space lattice basis
};
// Solves A x = b over the integers. A may be rank-deficient or empty
// (then every x is a solution and basis is the standard lattice).
IntegerAffine solve_integer(const Mat& A, const Vec& b, int cols);

}  // namespace fhops::lattice
