#include "fhops/normal_form.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <new>
#include <numbers>

#include "fhops/parallel.hpp"

namespace fhops {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long long kMaxGridTotal = 1LL << 26;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffer {
  fftw_complex* p = nullptr;
  explicit FftBuffer(std::size_t n) {
    p = fftw_alloc_complex(n);
    if (!p) throw std::bad_alloc();
    for (std::size_t i = 0; i < n; ++i) p[i][0] = p[i][1] = 0.0;
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  ~FftBuffer() { fftw_free(p); }
};

// One forward and one backward plan for the m-dimensional grid, reusable on
// any fftw_alloc'd buffer pair of the same shape.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  PlanPair(int m, long long Nt) {
    std::vector<int> dims(static_cast<std::size_t>(m),
                          static_cast<int>(Nt));
    std::size_t total = 1;
    for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(Nt);
    FftBuffer a(total), b(total);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft(m, dims.data(), a.p, b.p, FFTW_FORWARD,
                        FFTW_ESTIMATE);
    bwd = fftw_plan_dft(m, dims.data(), a.p, b.p, FFTW_BACKWARD,
                        FFTW_ESTIMATE);
    if (!fwd || !bwd) throw std::runtime_error("fftw plan creation failed");
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

double coeff_value(const TimeCoefficient& a, double t) {
  if (const auto* trig = std::get_if<TrigPoly>(&a)) {
    double v = trig->c0;
    for (std::size_t k = 0; k < trig->cosC.size(); ++k)
      v += trig->cosC[k] * std::cos(static_cast<double>(k + 1) * t);
    for (std::size_t k = 0; k < trig->sinC.size(); ++k)
      v += trig->sinC[k] * std::sin(static_cast<double>(k + 1) * t);
    return v;
  }
  const auto& s = std::get<SampledCoeff>(a);
  const auto N = static_cast<double>(s.values.size());
  double tm = std::fmod(t, kTwoPi);
  if (tm < 0) tm += kTwoPi;
  double pos = tm * N / kTwoPi;
  auto cell = static_cast<std::size_t>(pos);
  if (cell >= s.values.size()) cell = s.values.size() - 1;
  double frac = pos - static_cast<double>(cell);
  double v0 = s.values[cell];
  double v1 = s.values[(cell + 1) % s.values.size()];
  return v0 + (v1 - v0) * frac;
}

// integral_0^t a  -  a_0 t for one axis; 2pi-periodic by construction.
double axis_A(const TimeCoefficient& a, double t) {
  if (const auto* trig = std::get_if<TrigPoly>(&a)) {
    double v = 0;
    for (std::size_t k = 0; k < trig->cosC.size(); ++k) {
      double kk = static_cast<double>(k + 1);
      v += trig->cosC[k] * std::sin(kk * t) / kk;
    }
    for (std::size_t k = 0; k < trig->sinC.size(); ++k) {
      double kk = static_cast<double>(k + 1);
      v += trig->sinC[k] * (1.0 - std::cos(kk * t)) / kk;
    }
    return v;
  }
  const auto& s = std::get<SampledCoeff>(a);
  const std::size_t N = s.values.size();
  const double h = kTwoPi / static_cast<double>(N);
  double mean = 0;
  for (double v : s.values) mean += v;
  mean /= static_cast<double>(N);
  double tm = std::fmod(t, kTwoPi);
  if (tm < 0) tm += kTwoPi;
  double pos = tm / h;
  auto cell = static_cast<std::size_t>(pos);
  if (cell >= N) cell = N - 1;
  double integral = 0;
  for (std::size_t c = 0; c < cell; ++c)
    integral += h * (s.values[c] + s.values[(c + 1) % N]) / 2.0;
  double sLen = tm - static_cast<double>(cell) * h;
  double v0 = s.values[cell];
  double v1 = s.values[(cell + 1) % N];
  double vt = v0 + (v1 - v0) * (sLen / h);
  integral += sLen * (v0 + vt) / 2.0;
  return integral - mean * tm;
}

// ||a - a_0||_inf bound for the automatic grid choice.
double deviation_bound(const TimeCoefficient& a) {
  if (const auto* trig = std::get_if<TrigPoly>(&a)) {
    double v = 0;
    for (double c : trig->cosC) v += std::abs(c);
    for (double c : trig->sinC) v += std::abs(c);
    return v;
  }
  const auto& s = std::get<SampledCoeff>(a);
  double mean = average_coefficient(a);
  double v = 0;
  for (double x : s.values) v = std::max(v, std::abs(x - mean));
  return v;
}

long long next_pow2(double x) {
  long long p = 4;
  while (static_cast<double>(p) < x && p < (1LL << 40)) p <<= 1;
  return p;
}

long long automatic_grid(const TimeCoefficientSet& set, const Bounds& bounds,
                         double lambdaMax) {
  long long tauMax = 0;
  for (long long t : bounds.tauMax) tauMax = std::max(tauMax, t);
  double dev = 0;
  for (const TimeCoefficient& a : set.a) dev = std::max(dev, deviation_bound(a));
  double need = std::max(static_cast<double>(2 * tauMax + 2),
                         8.0 * lambdaMax * dev);
  return next_pow2(2.0 * need);
}

std::map<long long, std::vector<FieldEntry>> slices_by_j(
    const SpectralField& field) {
  std::map<long long, std::vector<FieldEntry>> slices;
  for (const FieldEntry& e : field.entries()) slices[e.mode.j].push_back(e);
  return slices;
}

// Total grid points and the strides of a row-major Nt^m grid.
struct Grid {
  int m;
  long long Nt;
  long long total;
  Grid(int mDim, long long nt) : m(mDim), Nt(nt), total(1) {
    for (int i = 0; i < m; ++i) {
      require_pre(total <= kMaxGridTotal / Nt, "time grid too large");
      total *= Nt;
    }
  }
  // flat index of the frequency bin holding tau
  long long bin_of(const std::vector<long long>& tau) const {
    long long idx = 0;
    for (int i = 0; i < m; ++i) {
      long long k = tau[static_cast<std::size_t>(i)];
      if (k < 0) k += Nt;
      idx = idx * Nt + k;
    }
    return idx;
  }
  // signed frequency on one axis for a flat index
  long long freq(long long flat, int axis) const {
    long long rem = flat;
    for (int i = m - 1; i > axis; --i) rem /= Nt;
    long long k = rem % Nt;
    return k <= Nt / 2 ? k : k - Nt;
  }
};

// Per-axis tables of A_r at the Nt grid points; A(t) = sum of rows.
std::vector<std::vector<double>> phase_tables(const TimeCoefficientSet& set,
                                              long long Nt) {
  std::vector<std::vector<double>> tables;
  for (const TimeCoefficient& a : set.a) {
    std::vector<double> row(static_cast<std::size_t>(Nt));
    for (long long i = 0; i < Nt; ++i)
      row[static_cast<std::size_t>(i)] =
          axis_A(a, kTwoPi * static_cast<double>(i) / static_cast<double>(Nt));
    tables.push_back(std::move(row));
  }
  return tables;
}

double grid_phase(const Grid& g,
                  const std::vector<std::vector<double>>& tables,
                  long long flat) {
  double phase = 0;
  long long rem = flat;
  for (int axis = g.m - 1; axis >= 0; --axis) {
    phase += tables[static_cast<std::size_t>(axis)]
                   [static_cast<std::size_t>(rem % g.Nt)];
    rem /= g.Nt;
  }
  return phase;
}

double max_lambda(const EigenProvider& eigen,
                  const std::map<long long, std::vector<FieldEntry>>& slices) {
  double lambdaMax = 0;
  for (const auto& [j, entries] : slices)
    lambdaMax = std::max(lambdaMax, std::abs(eigen.eigenvalue(j)));
  return lambdaMax;
}

void check_field_matches(const TimeCoefficientSet& set,
                         const SpectralField& field) {
  require_pre(field.params().m == set.params.m &&
                  field.params().n == set.params.n,
              "field dimensions do not match the coefficient set");
  long long jTop = field.bounds().jMax;
  require_pre(jTop < set.eigen.index_count(),
              "eigenvalue table too short for the field");
}

}  // namespace

void TimeCoefficientSet::validate() const {
  params.validate();
  require_pre(static_cast<int>(a.size()) == params.m,
              "need one time coefficient per torus axis");
  for (const TimeCoefficient& coeff : a) {
    if (const auto* trig = std::get_if<TrigPoly>(&coeff)) {
      require_pre(std::isfinite(trig->c0), "coefficient constant not finite");
      for (double c : trig->cosC)
        require_pre(std::isfinite(c), "cosine coefficient not finite");
      for (double c : trig->sinC)
        require_pre(std::isfinite(c), "sine coefficient not finite");
      if (trig->c0Exact)
        require_pre(std::abs(to_double(*trig->c0Exact) - trig->c0) <=
                        1e-12 * std::max(1.0, std::abs(trig->c0)),
                    "exact constant does not mirror the double value");
    } else {
      const auto& s = std::get<SampledCoeff>(coeff);
      require_pre(s.values.size() >= 4, "need at least 4 samples per period");
      for (double v : s.values)
        require_pre(std::isfinite(v), "sample value not finite");
    }
  }
}

double average_coefficient(const TimeCoefficient& a) {
  if (const auto* trig = std::get_if<TrigPoly>(&a)) return trig->c0;
  const auto& s = std::get<SampledCoeff>(a);
  double mean = 0;
  for (double v : s.values) mean += v;
  return mean / static_cast<double>(s.values.size());
}

std::optional<Rational> average_exact(const TimeCoefficient& a) {
  if (const auto* trig = std::get_if<TrigPoly>(&a)) return trig->c0Exact;
  return std::nullopt;
}

double phase_A(const TimeCoefficientSet& set, std::span<const double> t) {
  require_pre(static_cast<int>(t.size()) == set.params.m,
              "time point dimension mismatch");
  double v = 0;
  for (int r = 0; r < set.params.m; ++r)
    v += axis_A(set.a[static_cast<std::size_t>(r)],
                t[static_cast<std::size_t>(r)]);
  return v;
}

std::pair<SpectralField, PsiReport> psi_apply(const TimeCoefficientSet& set,
                                              const SpectralField& field,
                                              const PsiOptions& opts) {
  set.validate();
  check_field_matches(set, field);
  const int m = set.params.m;

  auto slices = slices_by_j(field);
  double lambdaMax = max_lambda(set.eigen, slices);
  long long Nt = opts.Nt > 0 ? opts.Nt : automatic_grid(set, field.bounds(),
                                                        lambdaMax);
  for (long long tauTop : field.bounds().tauMax)
    require_pre(Nt >= 2 * tauTop + 2, "time grid does not resolve the box");
  Grid grid(m, Nt);
  auto tables = phase_tables(set, Nt);

  PsiReport report;
  report.Nt = Nt;
  for (const TimeCoefficient& a : set.a) {
    if (const auto* s = std::get_if<SampledCoeff>(&a)) {
      double maxD2 = 0;
      const std::size_t N = s->values.size();
      for (std::size_t i = 0; i < N; ++i) {
        double d2 = s->values[(i + 1) % N] - 2.0 * s->values[i] +
                    s->values[(i + N - 1) % N];
        maxD2 = std::max(maxD2, std::abs(d2));
      }
      report.quadratureError +=
          lambdaMax * std::numbers::pi / 6.0 * maxD2;
    }
  }

  PlanPair plans(m, Nt);
  std::vector<long long> jList;
  for (const auto& [j, entries] : slices) jList.push_back(j);

  std::vector<std::vector<FieldEntry>> produced(jList.size());
  std::vector<double> truncated(jList.size(), 0.0);
  const double sign = opts.inverse ? 1.0 : -1.0;
  const double scale = 1.0 / static_cast<double>(grid.total);

  par::for_pieces(
      static_cast<std::int64_t>(jList.size()), par::resolve_threads(opts.threads),
      [&](std::int64_t sliceIdx) {
        long long j = jList[static_cast<std::size_t>(sliceIdx)];
        const auto& entries = slices.at(j);
        double lambda = set.eigen.eigenvalue(j);
        FftBuffer in(static_cast<std::size_t>(grid.total));
        FftBuffer out(static_cast<std::size_t>(grid.total));
        for (const FieldEntry& e : entries) {
          long long bin = grid.bin_of(e.mode.tau);
          in.p[bin][0] = e.a.real();
          in.p[bin][1] = e.a.imag();
        }
        fftw_execute_dft(plans.bwd, in.p, out.p);
        for (long long i = 0; i < grid.total; ++i) {
          double phi = sign * grid_phase(grid, tables, i) * lambda;
          double c = std::cos(phi), s = std::sin(phi);
          double re = out.p[i][0], im = out.p[i][1];
          out.p[i][0] = re * c - im * s;
          out.p[i][1] = re * s + im * c;
        }
        fftw_execute_dft(plans.fwd, out.p, in.p);
        std::vector<FieldEntry>& got =
            produced[static_cast<std::size_t>(sliceIdx)];
        for (long long i = 0; i < grid.total; ++i) {
          std::complex<double> v(in.p[i][0] * scale, in.p[i][1] * scale);
          ModeIndex mode;
          mode.j = j;
          mode.tau.resize(static_cast<std::size_t>(m));
          bool inside = true;
          for (int axis = 0; axis < m; ++axis) {
            long long f = grid.freq(i, axis);
            mode.tau[static_cast<std::size_t>(axis)] = f;
            if (std::llabs(f) > field.bounds().tauMax[static_cast<std::size_t>(axis)])
              inside = false;
          }
          if (inside) {
            if (v != std::complex<double>(0.0, 0.0))
              got.push_back({std::move(mode), v});
          } else {
            truncated[static_cast<std::size_t>(sliceIdx)] =
                std::max(truncated[static_cast<std::size_t>(sliceIdx)],
                         std::abs(v));
          }
        }
      });

  SpectralField result(field.params(), field.bounds());
  for (std::size_t s = 0; s < produced.size(); ++s) {
    for (FieldEntry& e : produced[s]) result.accumulate(e.mode, e.a);
    report.truncatedMax = std::max(report.truncatedMax, truncated[s]);
  }
  result.finalize();
  return {std::move(result), report};
}

SystemSpec reduce_system(const TimeCoefficientSet& set) {
  set.validate();
  const double M = set.eigen.order_M();
  require_pre(M * set.params.mu - 1.0 <= set.params.sigma + 1e-12,
              "regularity budget exhausted: need M*mu - 1 <= sigma");

  SystemSpec spec;
  spec.params = set.params;
  spec.eigen = set.eigen;
  for (int r = 0; r < set.params.m; ++r) {
    PolySymbol q;
    PolySymbol::Term term;
    term.alpha.assign(static_cast<std::size_t>(set.params.m), 0);
    term.alpha[static_cast<std::size_t>(r)] = 1;
    term.c = {1.0, 0.0};
    term.exact = CRational(1);
    q.terms.push_back(std::move(term));
    OperatorSpec op;
    op.Q = std::move(q);
    double a0 = average_coefficient(set.a[static_cast<std::size_t>(r)]);
    op.d.v = {a0, 0.0};
    if (auto exact = average_exact(set.a[static_cast<std::size_t>(r)]))
      op.d.exact = CRational(*exact, Rational(0));
    spec.ops.push_back(std::move(op));
  }
  spec.validate();
  return spec;
}

double conjugation_residual(const TimeCoefficientSet& set,
                            const SpectralField& field, long long Nt,
                            int threads) {
  set.validate();
  check_field_matches(set, field);
  const int m = set.params.m;

  auto slices = slices_by_j(field);
  if (slices.empty()) return 0.0;
  double lambdaMax = max_lambda(set.eigen, slices);
  if (Nt <= 0) Nt = automatic_grid(set, field.bounds(), lambdaMax);
  for (long long tauTop : field.bounds().tauMax)
    require_pre(Nt >= 2 * tauTop + 2, "time grid does not resolve the box");
  Grid grid(m, Nt);
  auto tables = phase_tables(set, Nt);

  // a_r at the grid points, per axis
  std::vector<std::vector<double>> coeffAt(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    auto& row = coeffAt[static_cast<std::size_t>(r)];
    row.resize(static_cast<std::size_t>(Nt));
    for (long long i = 0; i < Nt; ++i)
      row[static_cast<std::size_t>(i)] =
          coeff_value(set.a[static_cast<std::size_t>(r)],
                      kTwoPi * static_cast<double>(i) / static_cast<double>(Nt));
  }
  std::vector<double> a0(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r)
    a0[static_cast<std::size_t>(r)] =
        average_coefficient(set.a[static_cast<std::size_t>(r)]);

  PlanPair plans(m, Nt);
  std::vector<long long> jList;
  for (const auto& [j, entries] : slices) jList.push_back(j);
  std::vector<double> worst(jList.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(grid.total);

  par::for_pieces(
      static_cast<std::int64_t>(jList.size()), par::resolve_threads(threads),
      [&](std::int64_t sliceIdx) {
        long long j = jList[static_cast<std::size_t>(sliceIdx)];
        const auto& entries = slices.at(j);
        double lambda = set.eigen.eigenvalue(j);
        const auto total = static_cast<std::size_t>(grid.total);
        FftBuffer bufA(total), bufB(total), bufC(total), bufD(total);

        // u on the grid
        for (const FieldEntry& e : entries) {
          long long bin = grid.bin_of(e.mode.tau);
          bufA.p[bin][0] = e.a.real();
          bufA.p[bin][1] = e.a.imag();
        }
        fftw_execute_dft(plans.bwd, bufA.p, bufB.p);  // bufB = u(t)

        // Psi u on the grid
        for (long long i = 0; i < grid.total; ++i) {
          double phi = -grid_phase(grid, tables, i) * lambda;
          double c = std::cos(phi), s = std::sin(phi);
          double re = bufB.p[i][0], im = bufB.p[i][1];
          bufC.p[i][0] = re * c - im * s;
          bufC.p[i][1] = re * s + im * c;
        }
        fftw_execute_dft(plans.fwd, bufC.p, bufA.p);  // bufA = full spectrum * total

        for (int r = 0; r < m; ++r) {
          // D_{t_r} (Psi u): multiply the spectrum by the signed frequency
          for (long long i = 0; i < grid.total; ++i) {
            double f = static_cast<double>(grid.freq(i, r)) * scale;
            bufD.p[i][0] = bufA.p[i][0] * f;
            bufD.p[i][1] = bufA.p[i][1] * f;
          }
          fftw_execute_dft(plans.bwd, bufD.p, bufB.p);  // bufB = D_t Psi u (t)

          // G = D_t Psi u + a_r(t_r) lambda Psi u, then Psi^{-1} G
          for (long long i = 0; i < grid.total; ++i) {
            long long rem = i;
            for (int axis = m - 1; axis > r; --axis) rem /= grid.Nt;
            double ar = coeffAt[static_cast<std::size_t>(r)]
                               [static_cast<std::size_t>(rem % grid.Nt)];
            double gRe = bufB.p[i][0] + ar * lambda * bufC.p[i][0];
            double gIm = bufB.p[i][1] + ar * lambda * bufC.p[i][1];
            double phi = grid_phase(grid, tables, i) * lambda;
            double c = std::cos(phi), s = std::sin(phi);
            bufD.p[i][0] = gRe * c - gIm * s;
            bufD.p[i][1] = gRe * s + gIm * c;
          }
          fftw_execute_dft(plans.fwd, bufD.p, bufB.p);

          // reference L_{r,0} u in coefficient space, keyed by grid bin
          double maxDiff = 0, maxRef = 0;
          std::vector<std::pair<long long, std::complex<double>>> ref;
          ref.reserve(entries.size());
          for (const FieldEntry& e : entries) {
            double tr =
                static_cast<double>(e.mode.tau[static_cast<std::size_t>(r)]);
            std::complex<double> v =
                (tr + a0[static_cast<std::size_t>(r)] * lambda) * e.a;
            maxRef = std::max(maxRef, std::abs(v));
            ref.emplace_back(grid.bin_of(e.mode.tau), v);
          }
          std::sort(ref.begin(), ref.end(),
                    [](const auto& x, const auto& y) { return x.first < y.first; });
          // walk every box bin: computed coefficient vs reference (sparse)
          std::size_t cursor = 0;
          for (long long i = 0; i < grid.total; ++i) {
            bool inside = true;
            for (int axis = 0; axis < m && inside; ++axis)
              if (std::llabs(grid.freq(i, axis)) >
                  field.bounds().tauMax[static_cast<std::size_t>(axis)])
                inside = false;
            if (!inside) continue;
            std::complex<double> got(bufB.p[i][0] * scale,
                                     bufB.p[i][1] * scale);
            std::complex<double> want(0.0, 0.0);
            while (cursor < ref.size() && ref[cursor].first < i) ++cursor;
            if (cursor < ref.size() && ref[cursor].first == i)
              want = ref[cursor].second;
            maxDiff = std::max(maxDiff, std::abs(got - want));
          }
          worst[static_cast<std::size_t>(sliceIdx)] =
              std::max(worst[static_cast<std::size_t>(sliceIdx)],
                       maxDiff / std::max(1.0, maxRef));
        }
      });

  double residual = 0;
  for (double w : worst) residual = std::max(residual, w);
  return residual;
}

CompatResult compat_integral(const TimeCoefficientSet& set,
                             const SpectralField& fr, int r, long long j,
                             long long Nt) {
  set.validate();
  check_field_matches(set, fr);
  const int m = set.params.m;
  require_pre(r >= 0 && r < m, "component index out of range");
  require_pre(j >= 0 && j <= fr.bounds().jMax, "Hermite level out of range");

  CompatResult result;
  const TimeCoefficient& ar = set.a[static_cast<std::size_t>(r)];
  double lambda = set.eigen.eigenvalue(j);
  auto a0Exact = average_exact(ar);
  auto lamExact = set.eigen.eigenvalue_exact(j);
  if (a0Exact && lamExact) {
    Rational prod = *a0Exact * *lamExact;
    prod.canonicalize();
    result.applicable = prod.get_den() == 1;
  } else {
    double prod = average_coefficient(ar) * lambda;
    result.applicable = std::abs(prod - std::round(prod)) <= 1e-9;
  }
  if (!result.applicable) return result;

  auto slices = slices_by_j(fr);
  auto it = slices.find(j);
  if (it == slices.end()) return result;  // zero slice, zero integral

  if (Nt <= 0) Nt = automatic_grid(set, fr.bounds(), std::abs(lambda));
  for (long long tauTop : fr.bounds().tauMax)
    require_pre(Nt >= 2 * tauTop + 2, "time grid does not resolve the box");
  Grid grid(m, Nt);

  // f_{r,j} on the grid
  FftBuffer in(static_cast<std::size_t>(grid.total));
  FftBuffer out(static_cast<std::size_t>(grid.total));
  for (const FieldEntry& e : it->second) {
    long long bin = grid.bin_of(e.mode.tau);
    in.p[bin][0] = e.a.real();
    in.p[bin][1] = e.a.imag();
  }
  {
    PlanPair plans(m, Nt);
    fftw_execute_dft(plans.bwd, in.p, out.p);
  }

  // e^{i lambda B(t_r)} with B the raw integral of a_r
  double a0 = average_coefficient(ar);
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(Nt));
  for (long long i = 0; i < Nt; ++i) {
    double t = kTwoPi * static_cast<double>(i) / static_cast<double>(Nt);
    double B = axis_A(ar, t) + a0 * t;
    phase[static_cast<std::size_t>(i)] =
        std::polar(1.0, lambda * B);
  }

  // integrate over axis r for every frozen combination of the other axes
  long long innerStride = 1;
  for (int axis = m - 1; axis > r; --axis) innerStride *= Nt;
  long long outerCount = grid.total / (innerStride * Nt);
  const double h = kTwoPi / static_cast<double>(Nt);
  for (long long outer = 0; outer < outerCount; ++outer) {
    for (long long innerBase = 0; innerBase < innerStride; ++innerBase) {
      std::complex<double> acc(0.0, 0.0);
      for (long long iR = 0; iR < Nt; ++iR) {
        long long flat = (outer * Nt + iR) * innerStride + innerBase;
        std::complex<double> fv(out.p[flat][0], out.p[flat][1]);
        acc += phase[static_cast<std::size_t>(iR)] * fv;
      }
      result.maxAbs = std::max(result.maxAbs, std::abs(acc * h));
    }
  }
  return result;
}

}  // namespace fhops
