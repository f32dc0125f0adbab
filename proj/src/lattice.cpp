#include "fhops/lattice.hpp"

#include <cstdlib>
#include <utility>

namespace fhops::lattice {

namespace {

Mat identity(int n) {
  Mat I(n, Vec(n, 0));
  for (int i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

void swap_rows(Mat& M, int a, int b) {
  if (a != b) std::swap(M[a], M[b]);
}

void swap_cols(Mat& M, int a, int b) {
  if (a == b) return;
  for (auto& row : M) std::swap(row[a], row[b]);
}

// row a -= q * row b
void row_axpy(Mat& M, int a, int b, const mpz_class& q) {
  for (std::size_t j = 0; j < M[a].size(); ++j) M[a][j] -= q * M[b][j];
}

// col a -= q * col b
void col_axpy(Mat& M, int a, int b, const mpz_class& q) {
  for (auto& row : M) row[a] -= q * row[b];
}

}  // namespace

SmithForm smith_normal_form(const Mat& A) {
  const int rows = static_cast<int>(A.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(A[0].size());
  SmithForm out;
  out.U = identity(rows);
  out.V = identity(cols);
  Mat D = A;
  const int steps = std::min(rows, cols);
  out.diag.assign(steps, 0);

  int t = 0;
  while (t < steps) {
    // Locate the entry of least nonzero magnitude in the trailing block.
    int pi = -1, pj = -1;
    mpz_class best;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j) {
        if (sgn(D[i][j]) == 0) continue;
        mpz_class mag = abs(D[i][j]);
        if (pi < 0 || mag < best) {
          best = mag;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;
    swap_rows(D, t, pi);
    swap_rows(out.U, t, pi);
    swap_cols(D, t, pj);
    swap_cols(out.V, t, pj);

    // Clear row t and column t against the pivot; remainders shrink, so the
    // loop terminates.
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (int i = t + 1; i < rows; ++i) {
        if (sgn(D[i][t]) == 0) continue;
        mpz_class q = D[i][t] / D[t][t];
        if (sgn(q) != 0) {
          row_axpy(D, i, t, q);
          row_axpy(out.U, i, t, q);
        }
        if (sgn(D[i][t]) != 0) {
          swap_rows(D, t, i);
          swap_rows(out.U, t, i);
          dirty = true;
        }
      }
      for (int j = t + 1; j < cols; ++j) {
        if (sgn(D[t][j]) == 0) continue;
        mpz_class q = D[t][j] / D[t][t];
        if (sgn(q) != 0) {
          col_axpy(D, j, t, q);
          col_axpy(out.V, j, t, q);
        }
        if (sgn(D[t][j]) != 0) {
          swap_cols(D, t, j);
          swap_cols(out.V, t, j);
          dirty = true;
        }
      }
    }

    // Enforce the divisibility chain d_t | D[i][j] on the trailing block.
    bool redo = false;
    for (int i = t + 1; i < rows && !redo; ++i)
      for (int j = t + 1; j < cols && !redo; ++j)
        if (sgn(D[i][j] % D[t][t]) != 0) {
          row_axpy(D, t, i, mpz_class(-1));
          row_axpy(out.U, t, i, mpz_class(-1));
          redo = true;
        }
    if (redo) continue;

    if (sgn(D[t][t]) < 0) {
      for (int j = 0; j < cols; ++j) D[t][j] = -D[t][j];
      for (int j = 0; j < rows; ++j) out.U[t][j] = -out.U[t][j];
    }
    out.diag[t] = D[t][t];
    ++t;
  }

  out.rank = 0;
  for (const mpz_class& d : out.diag)
    if (sgn(d) != 0) ++out.rank;
  return out;
}

IntegerAffine solve_integer(const Mat& A, const Vec& b, int cols) {
  IntegerAffine out;
  if (A.empty()) {
    out.consistent = true;
    out.point.assign(cols, 0);
    Mat I = identity(cols);
    for (int j = 0; j < cols; ++j) {
      Vec e(cols);
      for (int i = 0; i < cols; ++i) e[i] = I[i][j];
      out.basis.push_back(std::move(e));
    }
    return out;
  }

  const int rows = static_cast<int>(A.size());
  SmithForm snf = smith_normal_form(A);

  Vec c(rows, 0);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < rows; ++k) c[i] += snf.U[i][k] * b[k];

  Vec y(cols, 0);
  for (int i = 0; i < rows; ++i) {
    if (i < snf.rank) {
      mpz_class q, r;
      mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), c[i].get_mpz_t(),
                  snf.diag[i].get_mpz_t());
      if (sgn(r) != 0) return out;  // no integer solution
      y[i] = q;
    } else if (sgn(c[i]) != 0) {
      return out;  // inconsistent beyond the rank
    }
  }

  out.consistent = true;
  out.point.assign(cols, 0);
  for (int i = 0; i < cols; ++i)
    for (int k = 0; k < cols; ++k) out.point[i] += snf.V[i][k] * y[k];

  for (int k = snf.rank; k < cols; ++k) {
    Vec v(cols);
    for (int i = 0; i < cols; ++i) v[i] = snf.V[i][k];
    out.basis.push_back(std::move(v));
  }
  return out;
}

}  // namespace fhops::lattice
