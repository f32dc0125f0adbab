#pragma once

// Operator systems L = (L_1, ..., L_l) acting on T^m x R^n, where
//   L_r = Q_r(D_t) + d_r P(x, D_x).
// On the mode (tau, j) the r-th symbol is
//   sigma_r(tau, j) = sum_{alpha} c_{alpha,r} tau^alpha + d_r lambda_j,
// the system norm is ||sigma(tau,j)|| = max_r |sigma_r(tau,j)|, and the zero
// set N is where every component vanishes.
//
// Zero decisions follow the exact-zero rule: a value counts as zero only
// when exact rational arithmetic says so (available when the touched
// coefficients, coupling, and eigenvalue are all rational), or, lacking
// exactness, when its double modulus is below 1e-30, which attaches a
// caveat to the result.

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fhops/eigen.hpp"
#include "fhops/rational.hpp"
#include "fhops/space.hpp"

namespace fhops {

// Polynomial in tau with complex coefficients; exact mirrors are kept when
// the construction supplies them.
struct PolySymbol {
  struct Term {
    std::vector<int> alpha;  // size m, entries >= 0
    std::complex<double> c{0.0, 0.0};
    std::optional<CRational> exact;
  };
  std::vector<Term> terms;

  int degree() const;
  bool affine() const { return degree() <= 1; }
  bool all_exact() const;
  std::complex<double> eval(const std::vector<long long>& tau) const;
  std::optional<CRational> eval_exact(const std::vector<long long>& tau) const;
};

// Symbol tabulated on a finite tau box with a declared polynomial growth
// bound |a(tau)| <= C (1 + |tau|)^nu. Evaluation outside the box is a
// contract violation; missing inside entries are zero.
struct TabulatedSymbol {
  std::vector<long long> tauMax;
  double growthC = 1.0;
  double growthNu = 0.0;
  std::map<std::vector<long long>, std::complex<double>> values;

  bool covers(const std::vector<long long>& tau) const;
  std::complex<double> eval(const std::vector<long long>& tau) const;
  void validate_growth() const;
};

using TimeSymbol = std::variant<PolySymbol, TabulatedSymbol>;

struct Coupling {
  std::complex<double> v{0.0, 0.0};
  std::optional<CRational> exact;
};

struct OperatorSpec {
  TimeSymbol Q;
  Coupling d;
};

struct SystemSpec {
  SpaceParams params;
  EigenProvider eigen;
  std::vector<OperatorSpec> ops;

  void validate() const;
  int op_count() const { return static_cast<int>(ops.size()); }
  // True when every polynomial coefficient and coupling carries an exact
  // mirror and the spectrum is rational.
  bool fully_exact() const;
};

std::complex<double> symbol_eval(const SystemSpec& spec, int r,
                                 const ModeIndex& mode);
std::optional<CRational> symbol_eval_exact(const SystemSpec& spec, int r,
                                           const ModeIndex& mode);

struct SystemNorm {
  double norm = 0;
  int argmax = 0;  // 0-based operator index, smallest index wins ties
};
SystemNorm system_norm(const SystemSpec& spec, const ModeIndex& mode);

// Zero test for one mode under the exact-zero rule.
struct ZeroTest {
  bool zero = false;
  bool exact = false;    // decision was made in exact arithmetic
  bool caveat = false;   // double path below 1e-30 was used
};
ZeroTest symbol_zero_test(const SystemSpec& spec, const ModeIndex& mode);

struct ZeroSetResult {
  std::vector<ModeIndex> modes;  // canonical order
  bool exact = true;
  std::vector<std::string> caveats;
};
// All modes of the box where every component symbol vanishes. Large boxes
// are handled by the pruned sweep; see sweep.hpp for the size contract.
ZeroSetResult zero_set(const SystemSpec& spec, const Bounds& bounds,
                       int threads = 1);

// Exact decision on whether the simultaneous system sigma_r(tau, j) = 0 has
// infinitely many solutions over tau in Z^m and j in the provider's index
// set. Requires affine Q_r with exact coefficients, exact couplings, and a
// rational spectrum; otherwise Undecided with the reason in `detail`.
enum class ResonanceKind { FiniteCertified, InfiniteCertified, Undecided };
struct ResonanceResult {
  ResonanceKind kind = ResonanceKind::Undecided;
  long long count = 0;  // exact solution count for FiniteCertified
  std::string detail;
};
ResonanceResult resonance_exact(const SystemSpec& spec);

const char* resonance_kind_name(ResonanceKind kind);

}  // namespace fhops
