#pragma once

// Grid sweep over a truncation box collecting the small-divisor statistics
// every verdict needs: per-shell maxima of the clamped ratio
// -log||sigma|| / weight, the worst offending modes, the exact zero set,
// and minima of the system norm.
//
// Boxes up to ~2e7 modes are scanned densely. Larger boxes switch to a
// pruned scan that enumerates exactly the modes where some |sigma_r| can be
// below the cutoff 1 (solved from the affine symbol structure: an imaginary
// coupling bounds lambda_j, a nonzero affine tau coefficient bounds one tau
// axis, a constant polynomial plus coupling bounds a j window). Modes the
// pruning skips are certified to have ||sigma|| >= 1, where the clamped
// ratio is 0, so shell maxima, zeros, and small minima match the dense scan
// exactly. Boxes that are both huge and unprunable (tabulated symbols, all
// couplings and coefficients conspiring against a window) are rejected.
//
// Shells here are geometric in weight: edges w_min * (w_max/w_min)^(k/S)
// computed in closed form from the box, so dense and pruned scans bin
// identically without enumerating anything.

#include <optional>
#include <string>
#include <vector>

#include "fhops/symbols.hpp"

namespace fhops {

struct ShellGrid {
  double wMin = 1.0;
  double wMax = 1.0;
  int count = 1;

  static ShellGrid from_bounds(const SpaceParams& params, const Bounds& bounds,
                               int shellCount);
  int shell_of(double w) const;
  double upper_edge(int k) const;
};

struct WorstMode {
  ModeIndex mode;
  double norm = 0;
  double weight = 0;
  double ratio = 0;  // clamped -log(norm)/weight, > 0 by construction
};

struct SweepResult {
  ShellGrid shells;
  std::vector<double> shellEps;  // size shells.count, clamped at 0
  // Up to 10 modes with the largest positive ratio (norm < 1); ties broken
  // by smaller weight, then canonical mode order.
  std::vector<WorstMode> worst;
  std::vector<ModeIndex> zeros;
  bool zerosExact = true;
  double minNorm = 0;         // over the whole box
  double minNonzeroNorm = 0;  // excluding the zero set
  bool minExact = false;      // minima certified through the exact path
  std::optional<ModeIndex> argMin;
  std::optional<ModeIndex> argMinNonzero;
  // Lower bounds established in exact rational arithmetic, independent of
  // the enumeration: ||sigma|| >= certifiedLowerBound on every box mode
  // (from one operator whose real and imaginary parts bound separate
  // variables) and ||sigma|| >= certifiedNonzeroLowerBound off the zero set
  // (from the common denominator of a fully rational system). Zero when no
  // certificate applies.
  double certifiedLowerBound = 0;
  double certifiedNonzeroLowerBound = 0;
  bool certifiedExact = false;
  bool pruned = false;
  std::vector<std::string> caveats;
};

// Throws precondition_error when every symbol vanishes identically on the
// box (degenerate system) and std::runtime_error when a huge box offers no
// pruning structure.
SweepResult sweep_grid(const SystemSpec& spec, const Bounds& bounds,
                       int shellCount, int threads);

}  // namespace fhops
