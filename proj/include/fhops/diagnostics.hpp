#pragma once

// Decay classification of coefficient fields and the small-divisor profile
// of operator systems, feeding the hypoellipticity and solvability verdicts.
//
// Classification measures, per nonzero entry, the anchored decay rate
//   s(mode) = (-log|a| - b) / (w - w_a),
// where (w_a, b) is the point of largest -log|a| on the innermost occupied
// weight shell. Anchoring makes the rate invariant under rescaling all
// coefficients and reproduces s == 1 identically for a = exp(-w). A field
// is Smooth when the tail rates stay above delta0 (liminf proxy: minimum of
// s over the outer half of the shells), Ultra when the tail growth rates
// -s stay below delta0 (limsup proxy), and Neither otherwise.
//
// The profile bins the clamped ratios -log||sigma||/w into geometric weight
// shells. The tail (outer half of the shells) decides the trend:
//   ConditionFails   at least two tail shells sit at or above delta1,
//   ConditionHolds   the tail is nonincreasing and ends at or below delta0,
//   Inconclusive     anything else.
// Fails wins when both patterns are present.

#include <optional>
#include <string>
#include <vector>

#include "fhops/sweep.hpp"
#include "fhops/symbols.hpp"

namespace fhops {

struct DiagnosticsConfig {
  double delta0 = 1e-3;  // decay/trend threshold
  double delta1 = 1e-2;  // failure threshold
  int shellCount = 8;
};

enum class DecayLabel { Smooth, Ultradistribution, Neither };
const char* decay_label_name(DecayLabel label);

struct DecayProfile {
  // (weight, -log|a|) per nonzero entry, sorted by weight.
  std::vector<std::pair<double, double>> points;
  double epsilonHat = 0;       // lower-envelope slope; +inf for empty fields
  double intercept = 0;        // envelope value extrapolated to weight 0
  DecayLabel label = DecayLabel::Neither;
  double liminfProxy = 0;
  double limsupNegProxy = 0;
  std::vector<std::string> caveats;
};

// Needs >= 32 nonzero entries spanning >= 4 weight shells for a real label;
// otherwise Neither with an "insufficient support" caveat. The empty field
// is Smooth with epsilonHat = +inf and a "zero field" caveat.
DecayProfile decay_classify(const SpectralField& field,
                            const DiagnosticsConfig& cfg = {});

enum class Trend { ConditionHolds, ConditionFails, Inconclusive };
const char* trend_name(Trend trend);

struct DiophantineProfile {
  std::vector<std::pair<double, double>> shellEps;  // (shell upper edge R, eps)
  Trend trend = Trend::Inconclusive;
  std::vector<WorstMode> worstModes;
  bool exact = false;
  std::vector<std::string> caveats;
};

DiophantineProfile diophantine_profile(const SystemSpec& spec,
                                       const Bounds& bounds,
                                       const DiagnosticsConfig& cfg = {},
                                       int threads = 1);

enum class Verdict { Holds, Fails, Inconclusive };
const char* verdict_name(Verdict verdict);

struct VerdictReport {
  Verdict verdict = Verdict::Inconclusive;
  bool exact = false;  // grid bounds and zero decisions certified exactly
  Bounds grid;
  DiophantineProfile profile;
  ResonanceResult resonance;
  long long zeroCount = 0;
  std::vector<ModeIndex> zeroSample;  // first few zeros in canonical order
  double minNorm = 0;
  double minNonzeroNorm = 0;
  std::vector<std::string> caveats;
};

// Global hypoellipticity: Fails on certified infinite resonance or a failing
// profile; Holds when finiteness is certified (exact resonance count, or a
// zero-free box) and the profile trend holds; otherwise Inconclusive.
VerdictReport hypoellipticity_verdict(const SystemSpec& spec,
                                      const Bounds& bounds,
                                      const DiagnosticsConfig& cfg = {},
                                      int threads = 1);

// Global solvability: the same decision without the finiteness requirement.
VerdictReport solvability_verdict(const SystemSpec& spec, const Bounds& bounds,
                                  const DiagnosticsConfig& cfg = {},
                                  int threads = 1);

}  // namespace fhops
