#include "fhops/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fhops/parallel.hpp"

namespace fhops {

namespace {

constexpr std::int64_t kPieces = 64;

bool same_params(const SpaceParams& a, const SpaceParams& b) {
  return a.m == b.m && a.n == b.n && a.sigma == b.sigma && a.mu == b.mu;
}

bool same_bounds(const Bounds& a, const Bounds& b) {
  return a.tauMax == b.tauMax && a.jMax == b.jMax;
}

// Sorted union of the modes carried by the components.
std::vector<ModeIndex> mode_union(const DataVector& F) {
  std::vector<ModeIndex> all;
  for (const SpectralField& f : F.components)
    for (const FieldEntry& e : f.entries()) all.push_back(e.mode);
  std::sort(all.begin(), all.end(), mode_less);
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

// Component values aligned with a sorted mode list; absent modes are zero.
std::vector<std::complex<double>> aligned_values(
    const SpectralField& f, const std::vector<ModeIndex>& modes) {
  std::vector<std::complex<double>> out(modes.size(), {0.0, 0.0});
  std::size_t cursor = 0;
  const auto& entries = f.entries();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    while (cursor < entries.size() && mode_less(entries[cursor].mode, modes[i]))
      ++cursor;
    if (cursor < entries.size() && entries[cursor].mode == modes[i])
      out[i] = entries[cursor].a;
  }
  return out;
}

// Zero test gated by a cheap norm filter; exact zeros always pass the gate
// because their double norms sit at rounding-error scale.
ZeroTest gated_zero_test(const SystemSpec& spec, const ModeIndex& mode,
                         double norm) {
  if (norm >= 1e-6) return ZeroTest{false, false, false};
  return symbol_zero_test(spec, mode);
}

struct ModeTable {
  std::vector<ModeIndex> modes;
  // sigma[r][i] for operator r at modes[i]
  std::vector<std::vector<std::complex<double>>> sigma;
  std::vector<double> norm;
  std::vector<int> argmax;
  std::vector<char> isZero;
  bool anyCaveat = false;
};

ModeTable build_table(const SystemSpec& spec, std::vector<ModeIndex> modes,
                      int threads) {
  ModeTable t;
  t.modes = std::move(modes);
  const std::size_t count = t.modes.size();
  const int l = spec.op_count();
  t.sigma.assign(static_cast<std::size_t>(l), {});
  for (auto& v : t.sigma) v.resize(count);
  t.norm.resize(count);
  t.argmax.resize(count);
  t.isZero.assign(count, 0);
  std::vector<char> caveat(count, 0);

  auto ranges = par::split_range(0, static_cast<std::int64_t>(count), kPieces);
  par::for_pieces(static_cast<std::int64_t>(ranges.size()), threads,
                  [&](std::int64_t piece) {
                    auto [lo, hi] = ranges[static_cast<std::size_t>(piece)];
                    for (std::int64_t i = lo; i < hi; ++i) {
                      auto idx = static_cast<std::size_t>(i);
                      const ModeIndex& mode = t.modes[idx];
                      for (int r = 0; r < l; ++r)
                        t.sigma[static_cast<std::size_t>(r)][idx] =
                            symbol_eval(spec, r, mode);
                      SystemNorm sn = system_norm(spec, mode);
                      t.norm[idx] = sn.norm;
                      t.argmax[idx] = sn.argmax;
                      ZeroTest zt = gated_zero_test(spec, mode, sn.norm);
                      t.isZero[idx] = zt.zero ? 1 : 0;
                      if (zt.caveat) caveat[idx] = 1;
                    }
                  });
  t.anyCaveat =
      std::find(caveat.begin(), caveat.end(), char(1)) != caveat.end();
  return t;
}

}  // namespace

void DataVector::validate(const SystemSpec& spec) const {
  require_pre(static_cast<int>(components.size()) == spec.op_count(),
              "data vector needs one component per operator");
  for (const SpectralField& f : components) {
    require_pre(same_params(f.params(), spec.params),
                "data component on mismatched space parameters");
    require_pre(same_bounds(f.bounds(), components.front().bounds()),
                "data components on mismatched boxes");
  }
}

double DataVector::max_abs() const {
  double m = 0;
  for (const SpectralField& f : components) m = std::max(m, f.max_abs());
  return m;
}

DataVector apply_system(const SystemSpec& spec, const SpectralField& u,
                        int threads) {
  spec.validate();
  require_pre(same_params(u.params(), spec.params),
              "field on mismatched space parameters");
  const auto& entries = u.entries();
  const std::size_t count = entries.size();
  const int l = spec.op_count();
  std::vector<std::vector<std::complex<double>>> values(
      static_cast<std::size_t>(l));
  for (auto& v : values) v.resize(count);

  auto ranges = par::split_range(0, static_cast<std::int64_t>(count), kPieces);
  par::for_pieces(static_cast<std::int64_t>(ranges.size()), threads,
                  [&](std::int64_t piece) {
                    auto [lo, hi] = ranges[static_cast<std::size_t>(piece)];
                    for (std::int64_t i = lo; i < hi; ++i) {
                      auto idx = static_cast<std::size_t>(i);
                      for (int r = 0; r < l; ++r)
                        values[static_cast<std::size_t>(r)][idx] =
                            symbol_eval(spec, r, entries[idx].mode) *
                            entries[idx].a;
                    }
                  });

  DataVector F;
  for (int r = 0; r < l; ++r) {
    SpectralField f(u.params(), u.bounds());
    for (std::size_t i = 0; i < count; ++i)
      f.accumulate(entries[i].mode, values[static_cast<std::size_t>(r)][i]);
    f.finalize();
    F.components.push_back(std::move(f));
  }
  return F;
}

AdmissibilityReport admissibility_check(const SystemSpec& spec,
                                        const DataVector& F, double tol,
                                        int threads) {
  spec.validate();
  F.validate(spec);
  require_pre(std::isfinite(tol) && tol >= 0, "tolerance must be >= 0");

  AdmissibilityReport report;
  report.tol = tol;
  report.maxAbs = F.max_abs();
  const double allowance = tol * std::max(1.0, report.maxAbs);

  ModeTable table = build_table(spec, mode_union(F), threads);
  const int l = spec.op_count();
  std::vector<std::vector<std::complex<double>>> f(static_cast<std::size_t>(l));
  for (int r = 0; r < l; ++r)
    f[static_cast<std::size_t>(r)] =
        aligned_values(F.components[static_cast<std::size_t>(r)], table.modes);

  for (std::size_t i = 0; i < table.modes.size(); ++i) {
    for (int r = 0; r < l; ++r)
      for (int s = r + 1; s < l; ++s) {
        double resid = std::abs(
            table.sigma[static_cast<std::size_t>(r)][i] *
                f[static_cast<std::size_t>(s)][i] -
            table.sigma[static_cast<std::size_t>(s)][i] *
                f[static_cast<std::size_t>(r)][i]);
        report.commutationResidual =
            std::max(report.commutationResidual, resid);
      }
    if (table.isZero[i]) {
      double dataHere = 0;
      for (int r = 0; r < l; ++r)
        dataHere = std::max(dataHere, std::abs(f[static_cast<std::size_t>(r)][i]));
      if (dataHere > allowance) report.kernelViolations.push_back(table.modes[i]);
    }
  }
  if (table.anyCaveat)
    report.caveats.push_back("zero decisions used the 1e-30 double window");
  report.admissible = report.commutationResidual <= allowance &&
                      report.kernelViolations.empty();
  return report;
}

std::pair<SpectralField, SolveReport> solve(
    const SystemSpec& spec, const DataVector& F,
    const std::optional<SpectralField>& kernel, int threads) {
  spec.validate();
  F.validate(spec);

  ModeTable table = build_table(spec, mode_union(F), threads);
  const int l = spec.op_count();
  std::vector<std::vector<std::complex<double>>> f(static_cast<std::size_t>(l));
  for (int r = 0; r < l; ++r)
    f[static_cast<std::size_t>(r)] =
        aligned_values(F.components[static_cast<std::size_t>(r)], table.modes);

  SolveReport report;
  SpectralField u(F.components.front().params(), F.components.front().bounds());
  for (std::size_t i = 0; i < table.modes.size(); ++i) {
    if (table.isZero[i]) {
      ++report.zeroedModes;
      continue;
    }
    int r = table.argmax[i];
    u.accumulate(table.modes[i],
                 f[static_cast<std::size_t>(r)][i] /
                     table.sigma[static_cast<std::size_t>(r)][i]);
  }

  if (kernel) {
    require_pre(same_params(kernel->params(), spec.params),
                "kernel field on mismatched space parameters");
    for (const FieldEntry& e : kernel->entries()) {
      SystemNorm sn = system_norm(spec, e.mode);
      ZeroTest zt = gated_zero_test(spec, e.mode, sn.norm);
      require_pre(zt.zero, "kernel field carries a mode off the zero set");
      u.accumulate(e.mode, e.a);
    }
  }
  u.finalize();

  // re-application residual over the data modes
  for (std::size_t i = 0; i < table.modes.size(); ++i) {
    std::complex<double> uv = u.at(table.modes[i]);
    for (int r = 0; r < l; ++r) {
      double resid = std::abs(table.sigma[static_cast<std::size_t>(r)][i] * uv -
                              f[static_cast<std::size_t>(r)][i]);
      report.residual = std::max(report.residual, resid);
    }
  }
  if (table.anyCaveat)
    report.caveats.push_back("zero decisions used the 1e-30 double window");
  return {std::move(u), std::move(report)};
}

SpectralField symbol_division(const SystemSpec& spec, const DataVector& F,
                              int threads) {
  spec.validate();
  F.validate(spec);
  ModeTable table = build_table(spec, mode_union(F), threads);
  const int l = spec.op_count();
  std::vector<std::vector<std::complex<double>>> f(static_cast<std::size_t>(l));
  for (int r = 0; r < l; ++r)
    f[static_cast<std::size_t>(r)] =
        aligned_values(F.components[static_cast<std::size_t>(r)], table.modes);

  SpectralField u(F.components.front().params(), F.components.front().bounds());
  for (std::size_t i = 0; i < table.modes.size(); ++i) {
    if (table.isZero[i]) continue;
    int r = table.argmax[i];
    u.accumulate(table.modes[i],
                 f[static_cast<std::size_t>(r)][i] /
                     table.sigma[static_cast<std::size_t>(r)][i]);
  }
  u.finalize();
  return u;
}

CounterexamplePair counterexample_pair(const SystemSpec& spec,
                                       const Bounds& bounds,
                                       const std::vector<ModeIndex>& witnesses,
                                       double eps,
                                       CounterexampleFlavor flavor) {
  spec.validate();
  bounds.validate(spec.params.m);
  require_pre(std::isfinite(eps) && eps > 0, "eps must be positive");
  require_pre(!witnesses.empty(), "need at least one witness mode");

  std::vector<ModeIndex> sorted = witnesses;
  std::sort(sorted.begin(), sorted.end(), mode_less);
  require_pre(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
              "witness modes must be distinct");
  for (const ModeIndex& w : sorted)
    require_pre(bounds.contains(w), "witness mode outside the box");

  struct Checked {
    ModeIndex mode;
    double norm;
    double w;
  };
  std::vector<Checked> checked;
  for (const ModeIndex& mode : sorted) {
    SystemNorm sn = system_norm(spec, mode);
    double w = weight(spec.params, mode);
    require_pre(sn.norm > 0, "witness mode lies on the zero set");
    require_pre(sn.norm < std::exp(-eps * w),
                "witness norm not below exp(-eps * weight) at " +
                    mode_to_string(mode));
    checked.push_back({mode, sn.norm, w});
  }
  if (flavor == CounterexampleFlavor::GS) {
    std::vector<std::size_t> order(checked.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return checked[a].w < checked[b].w;
                     });
    for (std::size_t k = 0; k < order.size(); ++k) {
      const Checked& c = checked[order[k]];
      require_pre(c.norm < std::exp(-eps * c.w) / static_cast<double>(k + 1),
                  "witness norm not below exp(-eps * weight)/k at " +
                      mode_to_string(c.mode));
    }
  }

  CounterexamplePair pair;
  pair.eps = eps;
  pair.witnesses = sorted;
  if (flavor == CounterexampleFlavor::GH) {
    SpectralField u(spec.params, bounds);
    for (const Checked& c : checked) {
      double s2 = static_cast<double>(c.mode.j) * static_cast<double>(c.mode.j);
      for (long long t : c.mode.tau)
        s2 += static_cast<double>(t) * static_cast<double>(t);
      u.accumulate(c.mode, std::sqrt(s2));
    }
    u.finalize();
    u.drop_exact_zeros();
    pair.F = apply_system(spec, u);
    pair.u = std::move(u);
  } else {
    DataVector F;
    for (int r = 0; r < spec.op_count(); ++r) {
      SpectralField f(spec.params, bounds);
      for (const Checked& c : checked) f.accumulate(c.mode, {1.0, 0.0});
      f.finalize();
      F.components.push_back(std::move(f));
    }
    pair.F = std::move(F);
  }
  return pair;
}

}  // namespace fhops
