#pragma once

// Reduction of variable-coefficient systems L_r = D_{t_r} + a_r(t_r) P to
// the constant-coefficient normal form L_{r,0} = D_{t_r} + a_{r,0} P, where
// a_{r,0} is the mean of a_r over the torus. The gauge is
//
//   (Psi u)_j(t) = exp(-i A(t) lambda_j) u_j(t),
//   A(t) = sum_r [ integral_0^{t_r} a_r - a_{r,0} t_r ],
//
// so A(0) = 0, A is 2pi-periodic per axis, and Psi^{-1} L_r Psi = L_{r,0}.
// Applying Psi costs one decaying scale of regularity, which is admissible
// only while M mu - 1 <= sigma; reduce_system enforces that bound.
//
// Psi is evaluated per j-slice through a uniform time grid: inverse DFT of
// the tau-slice, pointwise phase multiply, forward DFT, truncate back to
// the box. The grid must resolve both the slice (N_t >= 2 tauMax + 2) and
// the phase oscillation; the automatic choice doubles
// max(2 tauMax + 2, 8 lambda_max ||a - a_0||_inf) and rounds to a power of
// two. Transforms use FFTW with FFTW_ESTIMATE plans only, which keeps the
// plan, and therefore every rounding decision, independent of timing and
// thread count.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fhops/eigen.hpp"
#include "fhops/rational.hpp"
#include "fhops/space.hpp"
#include "fhops/symbols.hpp"

namespace fhops {

// a(t) = c0 + sum_k cosC[k-1] cos(kt) + sinC[k-1] sin(kt), real-valued.
struct TrigPoly {
  double c0 = 0;
  std::optional<Rational> c0Exact;
  std::vector<double> cosC;
  std::vector<double> sinC;
};

// Uniform samples a(2 pi i / N), i = 0..N-1, N >= 4.
struct SampledCoeff {
  std::vector<double> values;
};

using TimeCoefficient = std::variant<TrigPoly, SampledCoeff>;

struct TimeCoefficientSet {
  SpaceParams params;
  EigenProvider eigen;
  std::vector<TimeCoefficient> a;  // size params.m

  void validate() const;
};

// Mean over one period: the constant term for trig data, the sample mean
// (composite trapezoid over a full period) for sampled data.
double average_coefficient(const TimeCoefficient& a);
std::optional<Rational> average_exact(const TimeCoefficient& a);

// A(t) at an arbitrary point; sampled coefficients integrate by composite
// trapezoid with linear interpolation between nodes.
double phase_A(const TimeCoefficientSet& set, std::span<const double> t);

struct PsiOptions {
  long long Nt = 0;  // time grid per axis; 0 picks the automatic size
  bool inverse = false;
  int threads = 1;
};

struct PsiReport {
  long long Nt = 0;
  // Largest coefficient modulus the truncation back to the box discarded.
  double truncatedMax = 0;
  // Certified bound on the phase error from sampled coefficients (0 for
  // trig data, O(N^-2) from second differences otherwise).
  double quadratureError = 0;
};

// Contract violations: field/set dimension mismatch, Nt < 2 tauMax + 2 on
// some axis, custom providers without eigenvalues up to the field's jMax.
std::pair<SpectralField, PsiReport> psi_apply(const TimeCoefficientSet& set,
                                              const SpectralField& field,
                                              const PsiOptions& opts = {});

// Constant-coefficient image of the set: l = m operators with Q_r = tau_r
// and d_r = a_{r,0} (exact when the mean is exact). Enforces the regularity
// budget M mu - 1 <= sigma (boundary accepted).
SystemSpec reduce_system(const TimeCoefficientSet& set);

// Max over r and j-slices of the relative discrepancy between
// Psi^{-1} L_r Psi u and L_{r,0} u on the box, with L_r applied on the time
// grid (spectral derivative in tau, pointwise multiply by a_r).
double conjugation_residual(const TimeCoefficientSet& set,
                            const SpectralField& field, long long Nt = 0,
                            int threads = 1);

// Obstruction integral for component r at Hermite level j:
//   I(t') = integral_0^{2pi} exp(i lambda_j integral_0^{t_r} a_r) f_{r,j}(t) dt_r,
// evaluated on the grid for every frozen t', reported as max |I|. Only
// meaningful when exp(2 pi i a_{r,0} lambda_j) = 1; applicability uses the
// 1e-9 integrality window (exact test when the mean and eigenvalue are
// rational).
struct CompatResult {
  bool applicable = false;
  double maxAbs = 0;
};
CompatResult compat_integral(const TimeCoefficientSet& set,
                             const SpectralField& fr, int r, long long j,
                             long long Nt = 0);

}  // namespace fhops
