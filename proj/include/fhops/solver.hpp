#pragma once

// Mode-wise solver for L_r u = f_r, r = 1..l. Off the zero set the solution
// is u^(tau,j) = f_r*^(tau,j) / sigma_r*(tau,j) with r* the argmax of the
// component moduli; on the zero set u is 0 plus an optional kernel field.
// Admissible data satisfies the cross-compatibility identities
// sigma_r f_s = sigma_s f_r for all pairs and vanishes on the zero set.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fhops/symbols.hpp"

namespace fhops {

// Right-hand side (f_1, ..., f_l): one field per operator, all on the same
// box with the same space parameters.
struct DataVector {
  std::vector<SpectralField> components;

  void validate(const SystemSpec& spec) const;
  double max_abs() const;
};

DataVector apply_system(const SystemSpec& spec, const SpectralField& u,
                        int threads = 1);

struct AdmissibilityReport {
  bool admissible = false;
  double commutationResidual = 0;  // max |sigma_r f_s - sigma_s f_r|
  double maxAbs = 0;               // max coefficient modulus of the data
  double tol = 0;                  // residual allowance: tol * max(1, maxAbs)
  std::vector<ModeIndex> kernelViolations;  // zero-set modes with data
  std::vector<std::string> caveats;
};
AdmissibilityReport admissibility_check(const SystemSpec& spec,
                                        const DataVector& F,
                                        double tol = 1e-10, int threads = 1);

struct SolveReport {
  double residual = 0;  // max |sigma_r u - f_r| after re-application
  long long zeroedModes = 0;
  std::vector<std::string> caveats;
};
// `kernel`, when given, may only carry modes of the zero set; it is added to
// the particular solution. Data is not admissibility-checked here; run
// admissibility_check first when the data is untrusted.
std::pair<SpectralField, SolveReport> solve(
    const SystemSpec& spec, const DataVector& F,
    const std::optional<SpectralField>& kernel = std::nullopt,
    int threads = 1);

// Formal mode-wise division f_r* / sigma_r* ignoring admissibility; zero-set
// modes map to 0. This is the candidate solution a counterexample pair is
// built to make misbehave.
SpectralField symbol_division(const SystemSpec& spec, const DataVector& F,
                              int threads = 1);

// Witness-based counterexample pairs. Every witness must satisfy
// 0 < ||sigma(mode)|| < exp(-eps * weight(mode)).
//
// GH flavor: u carries |(tau, j)| at each witness (Euclidean norm of the
// concatenated (m+1)-vector; a witness at the all-zero mode contributes 0
// and drops out) and F = apply_system(u) restricted to the witnesses, so u
// grows polynomially while F decays superexponentially.
//
// GS flavor additionally requires ||sigma|| < exp(-eps * weight) / k at the
// k-th witness in weight order; F is 1 at every witness and no u is
// returned, since any mode-wise solution must exceed k * exp(eps * weight).
enum class CounterexampleFlavor { GH, GS };
struct CounterexamplePair {
  DataVector F;
  std::optional<SpectralField> u;
  double eps = 0;
  std::vector<ModeIndex> witnesses;
};
CounterexamplePair counterexample_pair(const SystemSpec& spec,
                                       const Bounds& bounds,
                                       const std::vector<ModeIndex>& witnesses,
                                       double eps, CounterexampleFlavor flavor);

}  // namespace fhops
