#pragma once

// Eigenvalue/eigenfunction providers for the operator P acting in the real
// variables, plus the Hermite function evaluator they share.
//
// Built-in spectra:
//   harmonic1d      lambda_j = 2j + 1 on R, eigenfunctions are the Hermite
//                   functions h_j (L2-normalized, h_0 = pi^{-1/4} e^{-x^2/2}).
//   harmonic_nd(n)  lambda of the n-dimensional oscillator, 2|alpha| + n over
//                   multi-indices alpha, enumerated by level |alpha| with
//                   lexicographic tie-break; level 2k + n repeats
//                   C(k+n-1, n-1) times.
//   power_of(B, M') lambda_j = (lambda^B_j)^{M'}, same eigenfunctions as B.
//   custom          tabulated eigenvalue list, eigenvalue access only.
//
// order_M() is the differential order of P (2 for the oscillator, scaled by
// M' under power_of); Weyl asymptotics give |lambda_j| ~ rho * j^{M/(2n)}.

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fhops/rational.hpp"
#include "fhops/space.hpp"

namespace fhops {

// L2-normalized Hermite function h_j(x) by the stable three-term recurrence
//   h_{k+1}(x) = x sqrt(2/(k+1)) h_k(x) - sqrt(k/(k+1)) h_{k-1}(x).
// O(j) per call; far-tail values underflow gracefully to 0.
double hermite_eval(long long j, double x);

class EigenProvider {
 public:
  static EigenProvider harmonic1d();
  static EigenProvider harmonic_nd(int n);
  static EigenProvider power_of(const EigenProvider& base, int exponent);
  // M is the declared differential order of the operator behind the list.
  // exact, when given, must mirror `values` entry for entry.
  static EigenProvider custom(std::vector<double> values, double M, int n,
                              std::vector<Rational> exact = {});

  double order_M() const;
  int dim_n() const;

  // Number of available indices; custom lists are finite, everything else
  // reports INT64_MAX.
  long long index_count() const;

  double eigenvalue(long long j) const;
  std::optional<Rational> eigenvalue_exact(long long j) const;

  bool has_eigenfunctions() const;
  // Product Hermite eigenfunction at x in R^n. Contract violation on custom
  // providers (eigenvalue-only) and on dimension mismatch.
  double eigenfunction(long long j, std::span<const double> x) const;
  // Multi-index alpha of the j-th oscillator eigenfunction (size n).
  std::vector<int> multi_index(long long j) const;

  // Exact description of the spectrum when every eigenvalue is rational.
  // Either the finite list of values (custom) or the integer progression
  //   lambda = (stride*k + offset)^exponent, k >= 0,
  // where level k carries multiplicity C(k+baseN-1, baseN-1).
  struct ExactSpectrum {
    bool finite = false;
    std::vector<Rational> values;  // finite case, one per index j
    long long stride = 2;
    long long offset = 1;
    int exponent = 1;
    int baseN = 1;
  };
  std::optional<ExactSpectrum> exact_spectrum() const;

  std::string describe() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Least-squares fit of log|lambda_j| = log(rho) + e * log(j) over every
// integer j in [jLo, jHi]. Requires 1 <= jLo < jHi, at least 16 indices, and
// nonzero eigenvalues on the range.
struct WeylFit {
  double exponentHat = 0;
  double rhoHat = 0;
  double residual = 0;  // RMS of the log-log fit residuals
};
WeylFit weyl_fit(const EigenProvider& provider, long long jLo, long long jHi);

// Samples u(t, x) = sum a(tau,j) e^{i tau.t} h_j(x) on the tensor grid of
// `tPerAxis` uniform torus points per axis and the given x points (row-major
// xCount x n). Output index is xIdx * tPerAxis^m + tIdx with tIdx row-major
// over the torus axes. Contract violation if the provider lacks
// eigenfunctions.
std::vector<std::complex<double>> reconstruct(const SpectralField& field,
                                              const EigenProvider& provider,
                                              int tPerAxis,
                                              std::span<const double> xs,
                                              int xCount);

}  // namespace fhops
