#pragma once

// Continued fractions with big-integer convergents and log-space bounds on
// the approximation error, for detecting exponential-Liouville behavior.
//
// For alpha = [a_1, a_2, ...] in (0, 1) the convergents p_k/q_k obey
//   p_k = a_k p_{k-1} + p_{k-2},  q_k = a_k q_{k-1} + q_{k-2},
//   (p_0, p_{-1}) = (0, 1),       (q_0, q_{-1}) = (1, 0),
// and the error is sandwiched by
//   1/(q_{k+1} + q_k) <= |q_k alpha - p_k| <= 1/q_{k+1}.
//
// Everything derived from these inequalities is handled in log space. The
// engine materializes quotients and denominators as big integers only while
// they fit a bit budget; past that it carries log q_k, and for generator
// rules whose quotients explode (a_{k+1} = c^{q_k}) even log q_k can leave
// double range, so internally the logs are themselves tracked on a log
// scale. Reported log bounds carry absolute error below 1e-9. Depths whose
// bounds are not representable at all raise the insufficient-depth error;
// rule() continued fractions expose that horizon up front. No floating type
// wider than double is used anywhere.
//
// The order-sigma test evaluates epsHat_k = log(q_{k+1}) / q_k^{1/sigma}
// (the certified upper-bound rate at the k-th convergent) and flags when
// the minimum over the last half of the depths stays at or above 1e-3.
// When not flagged, it also reports, for each epsilon on a log-spaced grid,
// from which depth onward the certified lower bounds stay above
// -epsilon * q_k^{1/sigma}; a clean suffix for every grid epsilon plus a
// nonincreasing tail of epsHat_k is the "certified tail" property the
// vector test requires.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "fhops/errors.hpp"

namespace fhops {

class ContinuedFraction;
struct ConvergentBounds;
struct LiouvilleVerdict;
std::vector<ConvergentBounds> convergents(const ContinuedFraction& cf,
                                          int depth);
LiouvilleVerdict exp_liouville_test(const ContinuedFraction& cf, double sigma,
                                    int depth);

class ContinuedFraction {
 public:
  // Explicit positive quotients a_1, a_2, ...
  static ContinuedFraction from_quotients(std::vector<mpz_class> quotients);
  // a_k = base^{k!}
  static ContinuedFraction factorial_power(unsigned long base);
  // a_1 given, a_{k+1} = base^{q_k}
  static ContinuedFraction exp_rule(unsigned long base, unsigned long a1);
  // a_k = value for every k (value = 1 gives the golden-ratio tail).
  static ContinuedFraction constant(unsigned long value);

  // Largest depth whose convergent bounds are representable (needs the
  // quotient a_{depth+1}); INT_MAX-ish for explicit lists limited only by
  // their length.
  int max_depth() const;

  std::string describe() const;

 private:
  friend struct CFEngine;
  friend std::vector<ConvergentBounds> convergents(const ContinuedFraction&,
                                                   int);
  friend LiouvilleVerdict exp_liouville_test(const ContinuedFraction&, double,
                                             int);
  struct Rule {
    enum Kind { List, FactorialPower, ExpRule, Constant } kind = List;
    unsigned long base = 0;
    unsigned long a1 = 0;
    std::vector<mpz_class> list;
  } rule_;
};

struct ConvergentBounds {
  int k = 0;
  // Exact convergent; present while the denominators fit the bit budget.
  std::optional<mpz_class> p, q;
  double logQ = 0;       // log q_k, +inf once even the log leaves doubles
  double logLower = 0;   // certified log|q_k alpha - p_k| >= logLower
  double logUpper = 0;   // certified log|q_k alpha - p_k| <= logUpper
};

// Bounds for k = 1..depth. Needs quotients up to depth+1; throws
// precondition_error when the fraction cannot supply them.
std::vector<ConvergentBounds> convergents(const ContinuedFraction& cf,
                                          int depth);

struct LiouvilleVerdict {
  bool flagged = false;
  double epsHat = 0;                // min of epsSeq over the tail depths
  std::vector<double> epsSeq;       // epsHat_k for k = 1..depth
  // Per grid epsilon: smallest k0 with every k in [k0, depth] certified
  // above -epsilon * q_k^{1/sigma}; -1 when even the last depth fails.
  std::vector<std::pair<double, int>> certifiedFrom;
  bool certifiedTail = false;
  std::vector<std::string> caveats;
};

// Requires sigma >= 1 and 1 <= depth <= cf.max_depth().
LiouvilleVerdict exp_liouville_test(const ContinuedFraction& cf, double sigma,
                                    int depth);

// Coordinate sufficiency for alpha in R^m: if some coordinate is certified
// non-exponential-Liouville (not flagged, certified tail), the vector is.
// The converse direction cannot be concluded from coordinates, hence
// Inconclusive otherwise.
struct VectorVerdict {
  bool certified = false;
  int coordinate = 0;  // 1-based index of the certifying coordinate
  std::vector<LiouvilleVerdict> perCoordinate;
};
VectorVerdict vector_coordinate_test(const std::vector<ContinuedFraction>& cfs,
                                     double sigma, int depth);

}  // namespace fhops
