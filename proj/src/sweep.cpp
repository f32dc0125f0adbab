#include "fhops/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fhops/parallel.hpp"

namespace fhops {

namespace {

constexpr std::int64_t kDenseLimit = 20'000'000;
constexpr std::int64_t kPieceCount = 64;
constexpr double kCutoff = 1.0;

long long binom_sat(long long a, int b) {
  const long long cap = std::numeric_limits<long long>::max();
  if (b < 0 || a < b) return 0;
  long long r = 1;
  for (int i = 1; i <= b; ++i) {
    long long num = a - b + i;
    if (r > cap / num) return cap;
    r = r * num / i;
  }
  return r;
}

double ipow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Walks lambda_j for consecutive j without re-deriving the level each time.
struct LambdaIter {
  const EigenProvider* eigen = nullptr;
  bool progression = false;
  long long stride = 2, offset = 1;
  int exponent = 1, baseN = 1;
  long long level = 0;
  long long leftInLevel = 0;
  double lambda = 0;

  void init(const EigenProvider& provider, long long j) {
    eigen = &provider;
    auto es = provider.exact_spectrum();
    progression = es && !es->finite;
    if (!progression) {
      lambda = provider.eigenvalue(j);
      return;
    }
    stride = es->stride;
    offset = es->offset;
    exponent = es->exponent;
    baseN = es->baseN;
    if (baseN == 1) {
      level = j;
      leftInLevel = 1;
    } else {
      level = 0;
      while (binom_sat(level + baseN, baseN) <= j) ++level;
      long long before = binom_sat(level - 1 + baseN, baseN);
      leftInLevel = binom_sat(level + baseN - 1, baseN - 1) - (j - before);
    }
    lambda = ipow(static_cast<double>(stride * level + offset), exponent);
  }

  void advance() {
    if (!progression) {
      lambda = 0;  // caller must re-init; non-progression paths do not advance
      return;
    }
    if (--leftInLevel == 0) {
      ++level;
      leftInLevel = binom_sat(level + baseN - 1, baseN - 1);
      lambda = ipow(static_cast<double>(stride * level + offset), exponent);
    }
  }
};

// Inclusive integer window; empty when lo > hi.
struct Window {
  long long lo = 0;
  long long hi = -1;
  bool empty() const { return lo > hi; }
  std::int64_t width() const { return empty() ? 0 : hi - lo + 1; }
  void intersect(long long a, long long b) {
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
};

struct CandidateBox {
  std::vector<Window> tau;
  Window j;
  bool empty() const {
    if (j.empty()) return true;
    for (const Window& w : tau)
      if (w.empty()) return true;
    return false;
  }
  std::int64_t count() const {
    if (empty()) return 0;
    const std::int64_t cap = std::numeric_limits<std::int64_t>::max();
    std::int64_t c = j.width();
    for (const Window& w : tau) {
      if (c > cap / w.width()) return cap;
      c *= w.width();
    }
    return c;
  }
};

// Real-affine view of one component (Re or Im part) of an affine symbol:
// value = c + sum_i a[i] tau_i + d lambda.
struct FormView {
  double c = 0;
  std::vector<double> a;
  double d = 0;

  int var_count() const {
    int k = d != 0.0 ? 1 : 0;
    for (double v : a)
      if (v != 0.0) ++k;
    return k;
  }
};

std::optional<std::pair<FormView, FormView>> affine_forms(
    const OperatorSpec& op, int m) {
  const auto* poly = std::get_if<PolySymbol>(&op.Q);
  if (!poly || !poly->affine()) return std::nullopt;
  FormView re, im;
  re.a.assign(static_cast<std::size_t>(m), 0.0);
  im.a.assign(static_cast<std::size_t>(m), 0.0);
  for (const auto& t : poly->terms) {
    int axis = -1;
    for (int i = 0; i < m; ++i)
      if (t.alpha[static_cast<std::size_t>(i)] == 1) axis = i;
    if (axis < 0) {
      re.c += t.c.real();
      im.c += t.c.imag();
    } else {
      re.a[static_cast<std::size_t>(axis)] += t.c.real();
      im.a[static_cast<std::size_t>(axis)] += t.c.imag();
    }
  }
  re.d = op.d.v.real();
  im.d = op.d.v.imag();
  return std::make_pair(re, im);
}

// Monotone nondecreasing eigenvalues let a lambda interval become a j
// interval by binary search.
bool lambda_monotone(const EigenProvider& eigen) {
  auto es = eigen.exact_spectrum();
  return es && !es->finite;
}

Window lambda_to_j_window(const EigenProvider& eigen, long long jMax,
                          double lamLo, double lamHi) {
  Window w;
  w.lo = 0;
  w.hi = jMax;
  // first j with lambda_j >= lamLo
  long long lo = 0, hi = jMax + 1;
  while (lo < hi) {
    long long mid = lo + (hi - lo) / 2;
    if (eigen.eigenvalue(mid) >= lamLo)
      hi = mid;
    else
      lo = mid + 1;
  }
  w.lo = lo;
  // last j with lambda_j <= lamHi
  lo = -1;
  hi = jMax;
  while (lo < hi) {
    long long mid = hi - (hi - lo) / 2;
    if (eigen.eigenvalue(mid) <= lamHi)
      lo = mid;
    else
      hi = mid - 1;
  }
  w.hi = lo;
  return w;
}

struct LocalStats {
  std::vector<double> shellEps;
  std::vector<WorstMode> worst;
  std::vector<std::pair<ModeIndex, ZeroTest>> zeros;
  double minSq = std::numeric_limits<double>::infinity();
  ModeIndex argMin;
  double minNzSq = std::numeric_limits<double>::infinity();
  ModeIndex argMinNz;
  double maxSq = 0;
  bool floatingZeroCaveat = false;
};

bool worst_less(const WorstMode& a, const WorstMode& b) {
  if (a.ratio != b.ratio) return a.ratio > b.ratio;
  if (a.weight != b.weight) return a.weight < b.weight;
  return mode_less(a.mode, b.mode);
}

void push_worst(std::vector<WorstMode>& worst, const WorstMode& cand) {
  if (worst.size() == 10 && worst_less(worst.back(), cand)) return;
  auto it = std::lower_bound(worst.begin(), worst.end(), cand, worst_less);
  worst.insert(it, cand);
  if (worst.size() > 10) worst.pop_back();
}

// Largest magnitude any term of sigma_r can contribute at the mode, used to
// scale the near-zero gate.
double term_scale(const SystemSpec& spec, const ModeIndex& mode) {
  double scale = 0;
  for (const OperatorSpec& op : spec.ops) {
    double s = std::abs(op.d.v) * std::abs(spec.eigen.eigenvalue(mode.j));
    if (const auto* poly = std::get_if<PolySymbol>(&op.Q)) {
      for (const auto& t : poly->terms) {
        double mono = 1.0;
        for (std::size_t i = 0; i < t.alpha.size(); ++i)
          for (int k = 0; k < t.alpha[i]; ++k)
            mono *= static_cast<double>(mode.tau[i]);
        s += std::abs(t.c) * std::abs(mono);
      }
    } else {
      s += std::abs(std::get<TabulatedSymbol>(op.Q).eval(mode.tau));
    }
    scale = std::max(scale, s);
  }
  return scale;
}

bool syntactically_zero(const SystemSpec& spec) {
  for (const OperatorSpec& op : spec.ops) {
    if (op.d.v.real() != 0.0 || op.d.v.imag() != 0.0) return false;
    if (const auto* poly = std::get_if<PolySymbol>(&op.Q)) {
      for (const auto& t : poly->terms)
        if (t.c.real() != 0.0 || t.c.imag() != 0.0) return false;
    } else {
      for (const auto& [tau, v] : std::get<TabulatedSymbol>(op.Q).values)
        if (v.real() != 0.0 || v.imag() != 0.0) return false;
    }
  }
  return true;
}

// ----- exact certificates -------------------------------------------------

struct ExactForm {
  CRational c;  // only .re used; forms are real-valued
  std::vector<Rational> a;
  Rational d = 0;
  std::vector<int> vars;  // tau axes with nonzero coefficient
  bool usesLambda = false;
};

std::optional<std::pair<ExactForm, ExactForm>> exact_forms(
    const OperatorSpec& op, int m) {
  const auto* poly = std::get_if<PolySymbol>(&op.Q);
  if (!poly || !poly->affine() || !poly->all_exact() || !op.d.exact)
    return std::nullopt;
  ExactForm re, im;
  re.a.assign(static_cast<std::size_t>(m), Rational(0));
  im.a.assign(static_cast<std::size_t>(m), Rational(0));
  for (const auto& t : poly->terms) {
    if (t.exact->is_zero()) continue;
    int axis = -1;
    for (int i = 0; i < m; ++i)
      if (t.alpha[static_cast<std::size_t>(i)] == 1) axis = i;
    if (axis < 0) {
      re.c.re += t.exact->re;
      im.c.re += t.exact->im;
    } else {
      re.a[static_cast<std::size_t>(axis)] += t.exact->re;
      im.a[static_cast<std::size_t>(axis)] += t.exact->im;
    }
  }
  re.d = op.d.exact->re;
  im.d = op.d.exact->im;
  for (int i = 0; i < m; ++i) {
    if (sgn(re.a[static_cast<std::size_t>(i)]) != 0) re.vars.push_back(i);
    if (sgn(im.a[static_cast<std::size_t>(i)]) != 0) im.vars.push_back(i);
  }
  re.usesLambda = sgn(re.d) != 0;
  im.usesLambda = sgn(im.d) != 0;
  return std::make_pair(re, im);
}

// Exact minimum of (c + a*t)^2 over integer t in [-T, T].
Rational min_single_tau_sq(const Rational& c, const Rational& a, long long T) {
  Rational target = -c / a;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), target.get_num().get_mpz_t(),
             target.get_den().get_mpz_t());
  Rational best;
  bool first = true;
  const mpz_class tMax(static_cast<long>(T));
  for (int off = 0; off <= 1; ++off) {
    mpz_class t = fl + off;
    if (t < -tMax) t = -tMax;
    if (t > tMax) t = tMax;
    Rational v = c + a * Rational(t);
    Rational sq = v * v;
    if (first || sq < best) {
      best = sq;
      first = false;
    }
  }
  return best;
}

// Exact minimum of (c + d*lambda)^2 over the progression levels 0..K.
Rational min_lambda_sq(const Rational& c, const Rational& d,
                       const EigenProvider::ExactSpectrum& es, long long K) {
  auto lambda_at = [&](long long k) {
    mpz_class base = mpz_class(static_cast<long>(es.stride)) *
                         static_cast<long>(k) +
                     static_cast<long>(es.offset);
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(),
               static_cast<unsigned long>(es.exponent));
    return Rational(p);
  };
  double target = -Rational(c / d).get_d();
  double root = target > 0
                    ? std::pow(target, 1.0 / static_cast<double>(es.exponent))
                    : 0.0;
  long long kHat =
      static_cast<long long>(std::floor((root - es.offset) / es.stride));
  Rational best;
  bool first = true;
  for (long long k :
       {kHat - 1, kHat, kHat + 1, static_cast<long long>(0), K}) {
    long long kc = std::clamp(k, static_cast<long long>(0), K);
    Rational v = c + d * lambda_at(kc);
    Rational sq = v * v;
    if (first || sq < best) {
      best = sq;
      first = false;
    }
  }
  return best;
}

// Exact minimum of one real form over the box, when the form depends on at
// most one tau axis or on lambda alone. nullopt when the shape is richer.
std::optional<Rational> min_form_sq(const ExactForm& f, const Bounds& bounds,
                                    const EigenProvider& eigen) {
  if (f.vars.empty() && !f.usesLambda) return f.c.re * f.c.re;
  if (f.vars.size() == 1 && !f.usesLambda) {
    int axis = f.vars[0];
    return min_single_tau_sq(f.c.re, f.a[static_cast<std::size_t>(axis)],
                             bounds.tauMax[static_cast<std::size_t>(axis)]);
  }
  if (f.vars.empty() && f.usesLambda) {
    auto es = eigen.exact_spectrum();
    if (!es || es->finite) return std::nullopt;
    long long K = 0;
    if (es->baseN == 1) {
      K = bounds.jMax;
    } else {
      while (binom_sat(K + es->baseN, es->baseN) <= bounds.jMax) ++K;
    }
    return min_lambda_sq(f.c.re, f.d, *es, K);
  }
  return std::nullopt;
}

void attach_certificates(const SystemSpec& spec, const Bounds& bounds,
                         SweepResult& result) {
  // (a) One operator whose Re and Im parts constrain disjoint variables
  // bounds ||sigma|| from below over the whole box.
  Rational bestSq = 0;
  bool haveBound = false;
  for (const OperatorSpec& op : spec.ops) {
    auto forms = exact_forms(op, spec.params.m);
    if (!forms) continue;
    const ExactForm& re = forms->first;
    const ExactForm& im = forms->second;
    bool disjoint = !(re.usesLambda && im.usesLambda);
    for (int v : re.vars)
      if (std::find(im.vars.begin(), im.vars.end(), v) != im.vars.end())
        disjoint = false;
    if (!disjoint) continue;
    auto reMin = min_form_sq(re, bounds, spec.eigen);
    auto imMin = min_form_sq(im, bounds, spec.eigen);
    if (!reMin || !imMin) continue;
    Rational sq = *reMin + *imMin;
    if (!haveBound || sq > bestSq) {
      bestSq = sq;
      haveBound = true;
    }
  }
  if (haveBound) {
    result.certifiedLowerBound = std::sqrt(bestSq.get_d());
    result.certifiedExact = true;
  }

  // (b) A fully rational system with common denominator D cannot produce a
  // nonzero symbol value with modulus below 1/D.
  if (spec.fully_exact()) {
    auto es = spec.eigen.exact_spectrum();
    mpz_class den = 1;
    bool ok = true;
    for (const OperatorSpec& op : spec.ops) {
      const auto& poly = std::get<PolySymbol>(op.Q);
      for (const auto& t : poly.terms) {
        den = lcm(den, t.exact->re.get_den());
        den = lcm(den, t.exact->im.get_den());
      }
      mpz_class lamDen = 1;
      if (es->finite) {
        for (const Rational& v : es->values) lamDen = lcm(lamDen, v.get_den());
      }
      den = lcm(den, op.d.exact->re.get_den() * lamDen);
      den = lcm(den, op.d.exact->im.get_den() * lamDen);
      if (!es->finite && es->exponent > 30) ok = false;
    }
    if (ok) {
      double offZero = 1.0 / den.get_d();
      result.certifiedNonzeroLowerBound =
          std::max(result.certifiedLowerBound, offZero);
      result.certifiedExact = true;
    }
  } else if (haveBound) {
    result.certifiedNonzeroLowerBound = result.certifiedLowerBound;
  }
}

// ----- candidate window derivation ----------------------------------------

// Widen an open real interval and convert to integers, erring outward so the
// window over-approximates {v : |c + a v| < cutoff}.
Window integer_window(double loReal, double hiReal, long long boxLo,
                      long long boxHi) {
  double margin = 1e-6 + 1e-12 * (std::abs(loReal) + std::abs(hiReal));
  Window w;
  w.lo = boxLo;
  w.hi = boxHi;
  // clamp before casting so out-of-range doubles cannot overflow
  double lo = std::clamp(loReal - margin, static_cast<double>(boxLo) - 2.0,
                         static_cast<double>(boxHi) + 2.0);
  double hi = std::clamp(hiReal + margin, static_cast<double>(boxLo) - 2.0,
                         static_cast<double>(boxHi) + 2.0);
  if (lo > static_cast<double>(boxLo))
    w.lo = static_cast<long long>(std::ceil(lo));
  if (hi < static_cast<double>(boxHi))
    w.hi = static_cast<long long>(std::floor(hi));
  return w;
}

// Intersects `box` with the windows implied by each single-variable form.
// Returns false when some constant form already exceeds the cutoff
// everywhere (no candidates at all).
bool derive_windows(const SystemSpec& spec, const Bounds& bounds,
                    CandidateBox& box) {
  const int m = spec.params.m;
  for (const OperatorSpec& op : spec.ops) {
    auto forms = affine_forms(op, m);
    if (!forms) continue;
    for (const FormView* f : {&forms->first, &forms->second}) {
      int vars = f->var_count();
      if (vars == 0) {
        if (std::abs(f->c) >= kCutoff) return false;
        continue;
      }
      if (vars > 1) continue;
      if (f->d != 0.0) {
        if (!lambda_monotone(spec.eigen)) continue;
        double lo = (-kCutoff - f->c) / f->d;
        double hi = (kCutoff - f->c) / f->d;
        if (lo > hi) std::swap(lo, hi);
        double margin = 1e-6 + 1e-12 * (std::abs(lo) + std::abs(hi));
        Window jw = lambda_to_j_window(spec.eigen, bounds.jMax, lo - margin,
                                       hi + margin);
        box.j.intersect(jw.lo, jw.hi);
      } else {
        int axis = -1;
        for (int i = 0; i < m; ++i)
          if (f->a[static_cast<std::size_t>(i)] != 0.0) axis = i;
        double a = f->a[static_cast<std::size_t>(axis)];
        double lo = (-kCutoff - f->c) / a;
        double hi = (kCutoff - f->c) / a;
        if (lo > hi) std::swap(lo, hi);
        Window tw =
            integer_window(lo, hi, -bounds.tauMax[static_cast<std::size_t>(axis)],
                           bounds.tauMax[static_cast<std::size_t>(axis)]);
        box.tau[static_cast<std::size_t>(axis)].intersect(tw.lo, tw.hi);
      }
    }
  }
  return true;
}

// ----- enumeration ----------------------------------------------------------

struct OpEval {
  bool poly = false;
  const PolySymbol* p = nullptr;
  const TabulatedSymbol* tab = nullptr;
  std::complex<double> d;
};

void enumerate_box(const SystemSpec& spec, const CandidateBox& box,
                   const ShellGrid& grid, int threads,
                   std::vector<LocalStats>& pieces) {
  const int m = spec.params.m;
  const double sigma = spec.params.sigma;
  const double jExp = 1.0 / (2.0 * spec.params.n * spec.params.mu);
  const std::int64_t jW = box.j.width();
  std::int64_t tauCombos = 1;
  for (const Window& w : box.tau) tauCombos *= w.width();
  const std::int64_t total = tauCombos * jW;
  if (total == 0) return;

  std::vector<OpEval> evals;
  for (const OperatorSpec& op : spec.ops) {
    OpEval e;
    if (const auto* poly = std::get_if<PolySymbol>(&op.Q)) {
      e.poly = true;
      e.p = poly;
    } else {
      e.tab = &std::get<TabulatedSymbol>(op.Q);
    }
    e.d = op.d.v;
    evals.push_back(e);
  }

  auto ranges = par::split_range(0, total, std::min(kPieceCount, total));
  pieces.assign(ranges.size(), LocalStats{});
  for (auto& p : pieces)
    p.shellEps.assign(static_cast<std::size_t>(grid.count), 0.0);

  par::for_pieces(static_cast<std::int64_t>(ranges.size()), threads,
                  [&](std::int64_t pi) {
    LocalStats& st = pieces[static_cast<std::size_t>(pi)];
    auto [g0, g1] = ranges[static_cast<std::size_t>(pi)];

    std::vector<long long> tau(static_cast<std::size_t>(m));
    std::int64_t tc = g0 / jW;
    std::int64_t jOff = g0 % jW;
    // decompose the tau-combination index, last axis fastest
    {
      std::int64_t rem = tc;
      for (int i = m - 1; i >= 0; --i) {
        std::int64_t wdt = box.tau[static_cast<std::size_t>(i)].width();
        tau[static_cast<std::size_t>(i)] =
            box.tau[static_cast<std::size_t>(i)].lo + rem % wdt;
        rem /= wdt;
      }
    }

    std::vector<std::complex<double>> q(evals.size());
    double tauPart = 0;
    auto refresh_tau = [&] {
      double sq = 0;
      for (long long t : tau) {
        double td = static_cast<double>(t);
        sq += td * td;
      }
      double nrm = std::sqrt(sq);
      tauPart = sigma == 1.0 ? nrm : std::pow(nrm, 1.0 / sigma);
      for (std::size_t r = 0; r < evals.size(); ++r)
        q[r] = evals[r].poly ? evals[r].p->eval(tau) : evals[r].tab->eval(tau);
    };
    refresh_tau();

    LambdaIter lam;
    long long j = box.j.lo + jOff;
    lam.init(spec.eigen, j);

    ModeIndex scratch;
    for (std::int64_t g = g0; g < g1; ++g) {
      const double lambda = lam.lambda;
      double maxSq = 0;
      for (std::size_t r = 0; r < evals.size(); ++r) {
        double re = q[r].real() + evals[r].d.real() * lambda;
        double im = q[r].imag() + evals[r].d.imag() * lambda;
        double sq = re * re + im * im;
        if (sq > maxSq) maxSq = sq;
      }
      if (maxSq > st.maxSq) st.maxSq = maxSq;

      bool isZero = false;
      if (maxSq < 1e-6) {
        scratch.tau = tau;
        scratch.j = j;
        double scale = term_scale(spec, scratch);
        if (std::sqrt(maxSq) < 1e-9 * std::max(1.0, scale)) {
          ZeroTest zt = symbol_zero_test(spec, scratch);
          if (zt.zero) {
            isZero = true;
            st.zeros.emplace_back(scratch, zt);
            if (zt.caveat) st.floatingZeroCaveat = true;
            if (0.0 < st.minSq) {
              st.minSq = 0.0;
              st.argMin = scratch;
            }
          }
        }
      }

      if (!isZero) {
        if (maxSq < st.minSq) {
          st.minSq = maxSq;
          st.argMin.tau = tau;
          st.argMin.j = j;
        }
        if (maxSq < st.minNzSq) {
          st.minNzSq = maxSq;
          st.argMinNz.tau = tau;
          st.argMinNz.j = j;
        }
        if (maxSq < kCutoff * kCutoff) {
          double norm = std::max(std::sqrt(maxSq), 1e-300);
          double jPart = jExp == 1.0
                             ? static_cast<double>(j) + 1.0
                             : std::pow(static_cast<double>(j) + 1.0, jExp);
          double w = tauPart + jPart;
          double ratio = -std::log(norm) / w;
          if (ratio > 0) {
            int shell = grid.shell_of(w);
            if (ratio > st.shellEps[static_cast<std::size_t>(shell)])
              st.shellEps[static_cast<std::size_t>(shell)] = ratio;
            WorstMode wm;
            wm.mode.tau = tau;
            wm.mode.j = j;
            wm.norm = norm;
            wm.weight = w;
            wm.ratio = ratio;
            push_worst(st.worst, wm);
          }
        }
      }

      // advance the odometer: j fastest, then the last tau axis
      if (g + 1 == g1) break;
      if (++j > box.j.hi) {
        j = box.j.lo;
        int axis = m - 1;
        while (axis >= 0 &&
               tau[static_cast<std::size_t>(axis)] ==
                   box.tau[static_cast<std::size_t>(axis)].hi) {
          tau[static_cast<std::size_t>(axis)] =
              box.tau[static_cast<std::size_t>(axis)].lo;
          --axis;
        }
        if (axis >= 0) ++tau[static_cast<std::size_t>(axis)];
        refresh_tau();
        lam.init(spec.eigen, j);
      } else if (lam.progression) {
        lam.advance();
      } else {
        lam.init(spec.eigen, j);
      }
    }
  });
}

}  // namespace

ShellGrid ShellGrid::from_bounds(const SpaceParams& params,
                                 const Bounds& bounds, int shellCount) {
  require_pre(shellCount >= 1, "shellCount must be >= 1");
  ShellGrid g;
  g.wMin = 1.0;
  g.wMax = std::max(max_weight(params, bounds), 1.0 + 1e-12);
  g.count = shellCount;
  return g;
}

int ShellGrid::shell_of(double w) const {
  if (w <= wMin) return 0;
  if (w >= wMax) return count - 1;
  double k = count * std::log(w / wMin) / std::log(wMax / wMin);
  int shell = static_cast<int>(k);
  return std::clamp(shell, 0, count - 1);
}

double ShellGrid::upper_edge(int k) const {
  return wMin * std::pow(wMax / wMin, static_cast<double>(k + 1) / count);
}

SweepResult sweep_grid(const SystemSpec& spec, const Bounds& bounds,
                       int shellCount, int threads) {
  spec.validate();
  bounds.validate(spec.params.m);
  require_pre(shellCount >= 1, "shellCount must be >= 1");
  require_pre(!syntactically_zero(spec),
              "every symbol vanishes identically; verdicts are vacuous");
  require_pre(bounds.jMax < spec.eigen.index_count(),
              "jMax exceeds the available spectrum");

  SweepResult result;
  result.shells = ShellGrid::from_bounds(spec.params, bounds, shellCount);
  result.shellEps.assign(static_cast<std::size_t>(shellCount), 0.0);

  CandidateBox box;
  box.tau.resize(static_cast<std::size_t>(spec.params.m));
  for (int i = 0; i < spec.params.m; ++i) {
    box.tau[static_cast<std::size_t>(i)].lo =
        -bounds.tauMax[static_cast<std::size_t>(i)];
    box.tau[static_cast<std::size_t>(i)].hi =
        bounds.tauMax[static_cast<std::size_t>(i)];
  }
  box.j.lo = 0;
  box.j.hi = bounds.jMax;

  bool anyCandidates = true;
  if (bounds.mode_count() > kDenseLimit) {
    result.pruned = true;
    anyCandidates = derive_windows(spec, bounds, box);
    if (anyCandidates && box.count() > kDenseLimit)
      throw std::runtime_error(
          "box too large to scan and too unstructured to prune");
    result.caveats.push_back(
        "pruned scan: modes outside candidate windows certified "
        "||sigma|| >= 1");
  }

  std::vector<LocalStats> pieces;
  if (anyCandidates && !box.empty())
    enumerate_box(spec, box, result.shells, threads, pieces);

  double minSq = std::numeric_limits<double>::infinity();
  double minNzSq = std::numeric_limits<double>::infinity();
  double maxSq = 0;
  bool floatingZero = false;
  std::vector<WorstMode> worstAll;
  for (const LocalStats& st : pieces) {
    for (std::size_t k = 0; k < result.shellEps.size(); ++k)
      result.shellEps[k] = std::max(result.shellEps[k], st.shellEps[k]);
    for (const WorstMode& wm : st.worst) worstAll.push_back(wm);
    for (const auto& [mode, zt] : st.zeros) {
      result.zeros.push_back(mode);
      if (!zt.exact) result.zerosExact = false;
    }
    if (st.minSq < minSq) {
      minSq = st.minSq;
      result.argMin = st.argMin;
    }
    if (st.minNzSq < minNzSq) {
      minNzSq = st.minNzSq;
      result.argMinNonzero = st.argMinNz;
    }
    maxSq = std::max(maxSq, st.maxSq);
    floatingZero = floatingZero || st.floatingZeroCaveat;
  }
  std::sort(worstAll.begin(), worstAll.end(), worst_less);
  if (worstAll.size() > 10) worstAll.resize(10);
  result.worst = std::move(worstAll);
  std::sort(result.zeros.begin(), result.zeros.end(), mode_less);
  if (floatingZero)
    result.caveats.push_back(
        "zero accepted below 1e-30 without exact arithmetic");

  if (!result.pruned && maxSq == 0.0)
    throw precondition_error(
        "every symbol vanishes on the whole box; verdicts are vacuous");

  if (std::isinf(minSq)) {
    // No candidate was enumerated; everything is certified >= cutoff.
    result.minNorm = kCutoff;
    result.minNonzeroNorm = kCutoff;
    result.caveats.push_back(
        "no mode below the cutoff; minima reported as the cutoff");
  } else {
    result.minNorm = std::sqrt(minSq);
    if (std::isinf(minNzSq)) {
      result.minNonzeroNorm = kCutoff;
      result.caveats.push_back(
          "every enumerated mode was a zero; nonzero minimum reported as "
          "the cutoff");
    } else {
      result.minNonzeroNorm = std::sqrt(minNzSq);
    }
    if (result.pruned && result.minNorm >= kCutoff) {
      result.minNorm = kCutoff;
      result.minNonzeroNorm = kCutoff;
      result.argMin.reset();
      result.argMinNonzero.reset();
      result.caveats.push_back(
          "candidate minima exceed the cutoff; minima clamped at the cutoff");
    }
  }

  attach_certificates(spec, bounds, result);
  result.minExact = result.certifiedExact;
  return result;
}

ZeroSetResult zero_set(const SystemSpec& spec, const Bounds& bounds,
                       int threads) {
  SweepResult sweep = sweep_grid(spec, bounds, 1, threads);
  ZeroSetResult out;
  out.modes = std::move(sweep.zeros);
  out.exact = sweep.zerosExact;
  out.caveats = std::move(sweep.caveats);
  return out;
}

}  // namespace fhops
