#include "fhops/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fhops {

const char* decay_label_name(DecayLabel label) {
  switch (label) {
    case DecayLabel::Smooth:
      return "Smooth";
    case DecayLabel::Ultradistribution:
      return "Ultradistribution";
    case DecayLabel::Neither:
      return "Neither";
  }
  return "Neither";
}

const char* trend_name(Trend trend) {
  switch (trend) {
    case Trend::ConditionHolds:
      return "ConditionHolds";
    case Trend::ConditionFails:
      return "ConditionFails";
    case Trend::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

const char* verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::Holds:
      return "Holds";
    case Verdict::Fails:
      return "Fails";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

DecayProfile decay_classify(const SpectralField& field,
                            const DiagnosticsConfig& cfg) {
  DecayProfile out;
  const double inf = std::numeric_limits<double>::infinity();

  for (const FieldEntry& e : field.entries()) {
    double mag = std::abs(e.a);
    if (mag == 0.0) continue;
    out.points.emplace_back(weight(field.params(), e.mode), -std::log(mag));
  }
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  if (out.points.empty()) {
    out.label = DecayLabel::Smooth;
    out.epsilonHat = inf;
    out.caveats.push_back("zero field");
    return out;
  }

  std::vector<double> weights;
  weights.reserve(out.points.size());
  for (const auto& [w, y] : out.points) weights.push_back(w);
  auto shells = group_by_weight(weights, cfg.shellCount);

  // Anchor: the deepest point (largest -log|a|) of the innermost shell,
  // smallest weight on ties.
  double wA = out.points[0].first;
  double b = out.points[0].second;
  for (std::size_t idx : shells[0]) {
    const auto& [w, y] = out.points[idx];
    if (y > b || (y == b && w < wA)) {
      wA = w;
      b = y;
    }
  }

  out.epsilonHat = inf;
  for (const auto& [w, y] : out.points) {
    if (w <= wA) continue;
    out.epsilonHat = std::min(out.epsilonHat, (y - b) / (w - wA));
  }
  out.intercept = std::isinf(out.epsilonHat) ? b : b - out.epsilonHat * wA;

  if (out.points.size() < 32 || shells.size() < 4) {
    out.label = DecayLabel::Neither;
    out.caveats.push_back("insufficient support for a decay label");
    return out;
  }

  double liminf = inf;
  double limsupNeg = -inf;
  for (std::size_t s = shells.size() / 2; s < shells.size(); ++s) {
    for (std::size_t idx : shells[s]) {
      const auto& [w, y] = out.points[idx];
      if (w <= wA) continue;
      double slope = (y - b) / (w - wA);
      liminf = std::min(liminf, slope);
      limsupNeg = std::max(limsupNeg, -slope);
    }
  }
  out.liminfProxy = liminf;
  out.limsupNegProxy = limsupNeg;

  if (liminf >= cfg.delta0)
    out.label = DecayLabel::Smooth;
  else if (limsupNeg <= cfg.delta0)
    out.label = DecayLabel::Ultradistribution;
  else
    out.label = DecayLabel::Neither;
  return out;
}

namespace {

Trend classify_trend(const std::vector<double>& eps,
                     const DiagnosticsConfig& cfg) {
  const std::size_t tailStart = eps.size() / 2;
  int above = 0;
  for (std::size_t k = tailStart; k < eps.size(); ++k)
    if (eps[k] >= cfg.delta1) ++above;
  if (above >= 2) return Trend::ConditionFails;

  bool nonincreasing = true;
  for (std::size_t k = tailStart; k + 1 < eps.size(); ++k)
    if (eps[k + 1] > eps[k] * (1.0 + 1e-9) + 1e-12) nonincreasing = false;
  if (nonincreasing && eps.back() <= cfg.delta0) return Trend::ConditionHolds;
  return Trend::Inconclusive;
}

DiophantineProfile profile_from_sweep(const SweepResult& sweep,
                                      const DiagnosticsConfig& cfg) {
  DiophantineProfile out;
  for (int k = 0; k < sweep.shells.count; ++k)
    out.shellEps.emplace_back(sweep.shells.upper_edge(k),
                              sweep.shellEps[static_cast<std::size_t>(k)]);
  out.trend = classify_trend(sweep.shellEps, cfg);
  out.worstModes = sweep.worst;
  out.exact = sweep.certifiedExact;
  out.caveats = sweep.caveats;
  return out;
}

VerdictReport verdict_impl(const SystemSpec& spec, const Bounds& bounds,
                           const DiagnosticsConfig& cfg, int threads,
                           bool needFiniteness) {
  SweepResult sweep = sweep_grid(spec, bounds, cfg.shellCount, threads);

  VerdictReport report;
  report.grid = bounds;
  report.profile = profile_from_sweep(sweep, cfg);
  report.resonance = resonance_exact(spec);
  report.minNorm = sweep.minNorm;
  report.minNonzeroNorm = sweep.minNonzeroNorm;
  report.caveats = sweep.caveats;

  const bool resonanceInfinite =
      report.resonance.kind == ResonanceKind::InfiniteCertified;
  const bool resonanceFinite =
      report.resonance.kind == ResonanceKind::FiniteCertified;
  const bool gridZeroFree = sweep.zeros.empty();

  if (resonanceFinite) {
    report.zeroCount = report.resonance.count;
  } else {
    report.zeroCount = static_cast<long long>(sweep.zeros.size());
    if (!sweep.zeros.empty())
      report.caveats.push_back("zero count restricted to the grid");
  }
  for (std::size_t k = 0; k < sweep.zeros.size() && k < 16; ++k)
    report.zeroSample.push_back(sweep.zeros[k]);

  const bool profileHolds = report.profile.trend == Trend::ConditionHolds;
  const bool profileFails = report.profile.trend == Trend::ConditionFails;

  if ((needFiniteness && resonanceInfinite) || profileFails) {
    report.verdict = Verdict::Fails;
    report.exact = needFiniteness && resonanceInfinite;
    return report;
  }

  bool finitenessOk = true;
  bool finitenessExact = true;
  if (needFiniteness) {
    if (resonanceFinite) {
      finitenessOk = true;
      finitenessExact = true;
    } else if (gridZeroFree) {
      finitenessOk = true;
      finitenessExact = sweep.zerosExact;
      report.caveats.push_back("finiteness evidence limited to the grid");
    } else {
      finitenessOk = false;
    }
  }

  if (profileHolds && finitenessOk) {
    report.verdict = Verdict::Holds;
    report.exact = sweep.zerosExact && (!needFiniteness || finitenessExact);
  } else {
    report.verdict = Verdict::Inconclusive;
  }
  return report;
}

}  // namespace

DiophantineProfile diophantine_profile(const SystemSpec& spec,
                                       const Bounds& bounds,
                                       const DiagnosticsConfig& cfg,
                                       int threads) {
  SweepResult sweep = sweep_grid(spec, bounds, cfg.shellCount, threads);
  return profile_from_sweep(sweep, cfg);
}

VerdictReport hypoellipticity_verdict(const SystemSpec& spec,
                                      const Bounds& bounds,
                                      const DiagnosticsConfig& cfg,
                                      int threads) {
  return verdict_impl(spec, bounds, cfg, threads, true);
}

VerdictReport solvability_verdict(const SystemSpec& spec, const Bounds& bounds,
                                  const DiagnosticsConfig& cfg, int threads) {
  return verdict_impl(spec, bounds, cfg, threads, false);
}

}  // namespace fhops
