#include "fhops/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fhops/lattice.hpp"

namespace fhops {

namespace {

bool term_is_zero(const PolySymbol::Term& t) {
  if (t.exact) return t.exact->is_zero();
  return t.c.real() == 0.0 && t.c.imag() == 0.0;
}

mpz_class int_pow(long long base, int exp) {
  mpz_class r;
  mpz_class b(static_cast<long>(base));
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(exp));
  return r;
}

}  // namespace

int PolySymbol::degree() const {
  int deg = 0;
  for (const Term& t : terms) {
    if (term_is_zero(t)) continue;
    int d = 0;
    for (int a : t.alpha) d += a;
    deg = std::max(deg, d);
  }
  return deg;
}

bool PolySymbol::all_exact() const {
  for (const Term& t : terms)
    if (!t.exact) return false;
  return true;
}

std::complex<double> PolySymbol::eval(
    const std::vector<long long>& tau) const {
  std::complex<double> sum{0.0, 0.0};
  for (const Term& t : terms) {
    double mono = 1.0;
    for (std::size_t i = 0; i < t.alpha.size(); ++i)
      for (int k = 0; k < t.alpha[i]; ++k)
        mono *= static_cast<double>(tau[i]);
    sum += t.c * mono;
  }
  return sum;
}

std::optional<CRational> PolySymbol::eval_exact(
    const std::vector<long long>& tau) const {
  CRational sum;
  for (const Term& t : terms) {
    if (!t.exact) return std::nullopt;
    mpz_class mono = 1;
    for (std::size_t i = 0; i < t.alpha.size(); ++i)
      if (t.alpha[i] > 0) mono *= int_pow(tau[i], t.alpha[i]);
    sum += *t.exact * Rational(mono);
  }
  return sum;
}

bool TabulatedSymbol::covers(const std::vector<long long>& tau) const {
  if (tau.size() != tauMax.size()) return false;
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] < -tauMax[i] || tau[i] > tauMax[i]) return false;
  return true;
}

std::complex<double> TabulatedSymbol::eval(
    const std::vector<long long>& tau) const {
  require_pre(covers(tau), "tabulated symbol evaluated outside its box");
  auto it = values.find(tau);
  if (it == values.end()) return {0.0, 0.0};
  return it->second;
}

void TabulatedSymbol::validate_growth() const {
  require_pre(growthC > 0, "growth constant must be positive");
  require_pre(growthNu >= 0, "growth order must be >= 0");
  for (const auto& [tau, v] : values) {
    require_pre(covers(tau), "tabulated entry outside the declared box");
    double sq = 0.0;
    for (long long t : tau) sq += static_cast<double>(t) * t;
    double bound = growthC * std::pow(1.0 + std::sqrt(sq), growthNu);
    require_pre(std::abs(v) <= bound * (1.0 + 1e-12),
                "tabulated entry violates its growth bound");
  }
}

void SystemSpec::validate() const {
  params.validate();
  require_pre(!ops.empty(), "system needs at least one operator");
  require_pre(eigen.dim_n() == params.n,
              "eigen provider dimension does not match the space");
  for (const OperatorSpec& op : ops) {
    if (const auto* poly = std::get_if<PolySymbol>(&op.Q)) {
      for (const auto& t : poly->terms) {
        require_pre(static_cast<int>(t.alpha.size()) == params.m,
                    "polynomial term exponent has wrong arity");
        for (int a : t.alpha)
          require_pre(a >= 0, "polynomial exponents must be >= 0");
      }
    } else {
      const auto& tab = std::get<TabulatedSymbol>(op.Q);
      require_pre(static_cast<int>(tab.tauMax.size()) == params.m,
                  "tabulated symbol box has wrong arity");
      for (long long t : tab.tauMax)
        require_pre(t >= 0, "tabulated box bounds must be >= 0");
      tab.validate_growth();
    }
    require_pre(std::isfinite(op.d.v.real()) && std::isfinite(op.d.v.imag()),
                "coupling must be finite");
  }
}

bool SystemSpec::fully_exact() const {
  if (!eigen.exact_spectrum()) return false;
  for (const OperatorSpec& op : ops) {
    const auto* poly = std::get_if<PolySymbol>(&op.Q);
    if (!poly || !poly->all_exact()) return false;
    if (!op.d.exact) return false;
  }
  return true;
}

std::complex<double> symbol_eval(const SystemSpec& spec, int r,
                                 const ModeIndex& mode) {
  require_pre(r >= 0 && r < spec.op_count(), "operator index out of range");
  const OperatorSpec& op = spec.ops[static_cast<std::size_t>(r)];
  std::complex<double> q =
      std::visit([&](const auto& s) { return s.eval(mode.tau); }, op.Q);
  return q + op.d.v * spec.eigen.eigenvalue(mode.j);
}

std::optional<CRational> symbol_eval_exact(const SystemSpec& spec, int r,
                                           const ModeIndex& mode) {
  require_pre(r >= 0 && r < spec.op_count(), "operator index out of range");
  const OperatorSpec& op = spec.ops[static_cast<std::size_t>(r)];
  const auto* poly = std::get_if<PolySymbol>(&op.Q);
  if (!poly || !op.d.exact) return std::nullopt;
  auto q = poly->eval_exact(mode.tau);
  if (!q) return std::nullopt;
  auto lambda = spec.eigen.eigenvalue_exact(mode.j);
  if (!lambda) return std::nullopt;
  return *q + *op.d.exact * *lambda;
}

SystemNorm system_norm(const SystemSpec& spec, const ModeIndex& mode) {
  SystemNorm out;
  out.norm = -1.0;
  for (int r = 0; r < spec.op_count(); ++r) {
    double v = std::abs(symbol_eval(spec, r, mode));
    if (v > out.norm) {
      out.norm = v;
      out.argmax = r;
    }
  }
  return out;
}

ZeroTest symbol_zero_test(const SystemSpec& spec, const ModeIndex& mode) {
  ZeroTest out;
  bool allExact = true;
  for (int r = 0; r < spec.op_count(); ++r) {
    auto exact = symbol_eval_exact(spec, r, mode);
    if (exact) {
      if (!exact->is_zero()) {
        out.zero = false;
        out.exact = true;
        return out;
      }
    } else {
      allExact = false;
    }
  }
  if (allExact) {
    out.zero = true;
    out.exact = true;
    return out;
  }
  // Exactness is unavailable for at least one component; every exact
  // component already vanished, so fall back to the double threshold.
  for (int r = 0; r < spec.op_count(); ++r) {
    if (symbol_eval_exact(spec, r, mode)) continue;
    if (std::abs(symbol_eval(spec, r, mode)) >= 1e-30) return out;
  }
  out.zero = true;
  out.caveat = true;
  return out;
}

const char* resonance_kind_name(ResonanceKind kind) {
  switch (kind) {
    case ResonanceKind::FiniteCertified:
      return "FiniteCertified";
    case ResonanceKind::InfiniteCertified:
      return "InfiniteCertified";
    case ResonanceKind::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

namespace {

// One real affine equation sum_i coeff[i] * x_i = rhs with rational data.
struct RationalRow {
  std::vector<Rational> coeff;
  Rational rhs;
};

// Multiplies each row by the lcm of its denominators.
void clear_denominators(const std::vector<RationalRow>& rows,
                        lattice::Mat& A, lattice::Vec& b) {
  A.clear();
  b.clear();
  for (const RationalRow& row : rows) {
    mpz_class l = row.rhs.get_den();
    for (const Rational& c : row.coeff)
      l = lcm(l, c.get_den());
    lattice::Vec r;
    r.reserve(row.coeff.size());
    for (const Rational& c : row.coeff) {
      Rational scaled = c * Rational(l);
      r.push_back(scaled.get_num());
    }
    Rational scaledRhs = row.rhs * Rational(l);
    A.push_back(std::move(r));
    b.push_back(scaledRhs.get_num());
  }
}

// Affine data of operator r: constant term plus one coefficient per axis.
struct AffineOp {
  CRational c0;
  std::vector<CRational> ci;  // size m
  CRational d;
};

long long level_multiplicity(long long level, int baseN) {
  // C(level + baseN - 1, baseN - 1)
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(level + baseN - 1),
               static_cast<unsigned long>(baseN - 1));
  if (!r.fits_slong_p()) return std::numeric_limits<long long>::max();
  return r.get_si();
}

}  // namespace

ResonanceResult resonance_exact(const SystemSpec& spec) {
  spec.validate();
  ResonanceResult out;

  auto es = spec.eigen.exact_spectrum();
  if (!es) {
    out.detail = "spectrum has no exact rational description";
    return out;
  }

  const int m = spec.params.m;
  std::vector<AffineOp> affine;
  for (int r = 0; r < spec.op_count(); ++r) {
    const OperatorSpec& op = spec.ops[static_cast<std::size_t>(r)];
    const auto* poly = std::get_if<PolySymbol>(&op.Q);
    if (!poly) {
      out.detail = "operator " + std::to_string(r + 1) +
                   " has a tabulated torus symbol";
      return out;
    }
    if (!poly->affine()) {
      out.detail = "operator " + std::to_string(r + 1) +
                   " has a non-affine torus symbol";
      return out;
    }
    if (!poly->all_exact() || !op.d.exact) {
      out.detail = "operator " + std::to_string(r + 1) +
                   " lacks exact rational coefficients";
      return out;
    }
    AffineOp a;
    a.ci.assign(static_cast<std::size_t>(m), CRational{});
    a.d = *op.d.exact;
    for (const auto& t : poly->terms) {
      if (t.exact->is_zero()) continue;
      int degree = 0;
      int axis = -1;
      for (int i = 0; i < m; ++i) {
        degree += t.alpha[static_cast<std::size_t>(i)];
        if (t.alpha[static_cast<std::size_t>(i)] == 1) axis = i;
      }
      if (degree == 0)
        a.c0 += *t.exact;
      else
        a.ci[static_cast<std::size_t>(axis)] += *t.exact;
    }
    affine.push_back(std::move(a));
  }

  if (es->finite) {
    // Substitute each distinct eigenvalue and solve for tau alone.
    std::map<Rational, long long> multiplicity;
    for (const Rational& v : es->values) ++multiplicity[v];

    long long total = 0;
    for (const auto& [lambda, mult] : multiplicity) {
      std::vector<RationalRow> rows;
      for (const AffineOp& a : affine) {
        CRational c = a.c0 + a.d * lambda;
        RationalRow re, im;
        for (const CRational& ci : a.ci) {
          re.coeff.push_back(ci.re);
          im.coeff.push_back(ci.im);
        }
        re.rhs = -c.re;
        im.rhs = -c.im;
        rows.push_back(std::move(re));
        rows.push_back(std::move(im));
      }
      lattice::Mat A;
      lattice::Vec b;
      clear_denominators(rows, A, b);
      auto sol = lattice::solve_integer(A, b, m);
      if (!sol.consistent) continue;
      if (!sol.basis.empty()) {
        out.kind = ResonanceKind::InfiniteCertified;
        out.detail = "eigenvalue " + rational_to_string(lambda) +
                     " admits a free tau direction";
        return out;
      }
      total += mult;
    }
    out.kind = ResonanceKind::FiniteCertified;
    out.count = total;
    out.detail = "finite eigenvalue list exhausted";
    return out;
  }

  // Integer progression lambda = (stride*k + offset)^exponent, k >= 0.
  // Treat lambda as an extra integer unknown and solve the joint lattice
  // system, then intersect the lambda solution set with the progression.
  std::vector<RationalRow> rows;
  for (const AffineOp& a : affine) {
    RationalRow re, im;
    for (const CRational& ci : a.ci) {
      re.coeff.push_back(ci.re);
      im.coeff.push_back(ci.im);
    }
    re.coeff.push_back(a.d.re);
    im.coeff.push_back(a.d.im);
    re.rhs = -a.c0.re;
    im.rhs = -a.c0.im;
    rows.push_back(std::move(re));
    rows.push_back(std::move(im));
  }
  lattice::Mat A;
  lattice::Vec b;
  clear_denominators(rows, A, b);
  auto sol = lattice::solve_integer(A, b, m + 1);
  if (!sol.consistent) {
    out.kind = ResonanceKind::FiniteCertified;
    out.count = 0;
    out.detail = "joint lattice system is inconsistent";
    return out;
  }

  mpz_class g = 0;
  for (const auto& v : sol.basis)
    g = gcd(g, v[static_cast<std::size_t>(m)]);

  const mpz_class strideZ(static_cast<long>(es->stride));
  const mpz_class offsetZ(static_cast<long>(es->offset));
  auto progression_member = [&](const mpz_class& lambda,
                                long long& levelOut) {
    if (sgn(lambda) <= 0) return false;
    mpz_class root;
    if (es->exponent == 1) {
      root = lambda;
    } else {
      int exactRoot =
          mpz_root(root.get_mpz_t(), lambda.get_mpz_t(),
                   static_cast<unsigned long>(es->exponent));
      if (exactRoot == 0) return false;
    }
    mpz_class shifted = root - offsetZ;
    if (sgn(shifted) < 0) return false;
    mpz_class q, rem;
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), shifted.get_mpz_t(),
                strideZ.get_mpz_t());
    if (sgn(rem) != 0) return false;
    levelOut = q.fits_slong_p() ? q.get_si()
                                : std::numeric_limits<long long>::max();
    return true;
  };

  if (sgn(g) == 0) {
    // lambda is pinned to a single integer.
    mpz_class lambda = sol.point[static_cast<std::size_t>(m)];
    long long level = 0;
    if (!progression_member(lambda, level)) {
      out.kind = ResonanceKind::FiniteCertified;
      out.count = 0;
      out.detail = "pinned eigenvalue " + lambda.get_str() +
                   " lies outside the spectrum";
      return out;
    }
    if (!sol.basis.empty()) {
      out.kind = ResonanceKind::InfiniteCertified;
      out.detail = "free tau direction at eigenvalue " + lambda.get_str();
      return out;
    }
    out.kind = ResonanceKind::FiniteCertified;
    out.count = level_multiplicity(level, es->baseN);
    out.detail = "single lattice point at eigenvalue " + lambda.get_str();
    return out;
  }

  // lambda ranges over a full congruence class mod g; the progression meets
  // it if and only if some residue k in [0, g) does.
  mpz_class target = sol.point[static_cast<std::size_t>(m)] % g;
  if (sgn(target) < 0) target += g;
  for (mpz_class k = 0; k < g; ++k) {
    mpz_class lam = strideZ * k + offsetZ;
    mpz_class powed;
    mpz_powm_ui(powed.get_mpz_t(), lam.get_mpz_t(),
                static_cast<unsigned long>(es->exponent), g.get_mpz_t());
    if (powed == target) {
      out.kind = ResonanceKind::InfiniteCertified;
      out.detail = "infinitely many eigenvalue levels hit the class mod " +
                   g.get_str();
      return out;
    }
  }
  out.kind = ResonanceKind::FiniteCertified;
  out.count = 0;
  out.detail = "spectrum never meets the solution class mod " + g.get_str();
  return out;
}

}  // namespace fhops
