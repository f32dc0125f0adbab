#include "fhops/liouville.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fhops {

namespace {

constexpr std::size_t kBitBudget = std::size_t{1} << 20;
constexpr double kFlagThreshold = 1e-3;
constexpr double kLogSlack = 1e-9;
constexpr int kRuleDepthCap = 10000;
const double kInf = std::numeric_limits<double>::infinity();

// A value >= 1 carried at the finest affordable scale: exact big integer,
// its logarithm, or the logarithm of the logarithm. `beyond` marks values
// even the log-log scale cannot hold.
struct Magnitude {
  std::optional<mpz_class> exact;
  double L = 0;
  double M = -kInf;
  bool beyond = false;
};

double accurate_log(const mpz_class& z) {
  signed long e = 0;
  double d = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(d) + static_cast<double>(e) * std::numbers::ln2;
}

Magnitude mag_from_mpz(mpz_class z) {
  Magnitude m;
  m.L = accurate_log(z);
  m.M = m.L > 0 ? std::log(m.L) : -kInf;
  m.exact = std::move(z);
  return m;
}

double logsumexp2(double x, double y) {
  if (std::isinf(x) && x < 0) return y;
  if (std::isinf(y) && y < 0) return x;
  double hi = std::max(x, y);
  double lo = std::min(x, y);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

// Generates quotients and convergents for one fraction, degrading the
// representation as the numbers grow.
struct CFEngine {
  const ContinuedFraction::Rule& rule;
  std::vector<Magnitude> a;  // a[k], 1-based; a[0] unused
  std::vector<Magnitude> q;  // q[k]; q[0] == 1
  std::vector<std::optional<mpz_class>> p;  // p[k]; p[0] == 0
  mpz_class factorial = 1;  // k! tracker for the factorial-power rule

  explicit CFEngine(const ContinuedFraction::Rule& r) : rule(r) {
    a.resize(1);
    q.resize(1);
    p.resize(1);
    q[0] = mag_from_mpz(mpz_class(1));
    p[0] = mpz_class(0);
  }

  // Appends a_k; false when the rule cannot represent it.
  bool push_quotient(int k) {
    Magnitude m;
    switch (rule.kind) {
      case ContinuedFraction::Rule::List: {
        if (k > static_cast<int>(rule.list.size())) return false;
        m = mag_from_mpz(rule.list[static_cast<std::size_t>(k - 1)]);
        break;
      }
      case ContinuedFraction::Rule::Constant:
        m = mag_from_mpz(mpz_class(rule.base));
        break;
      case ContinuedFraction::Rule::FactorialPower: {
        factorial *= k;
        m = power_magnitude(factorial);
        break;
      }
      case ContinuedFraction::Rule::ExpRule: {
        if (k == 1) {
          m = mag_from_mpz(mpz_class(rule.a1));
          break;
        }
        const Magnitude& prev = q[static_cast<std::size_t>(k - 1)];
        if (prev.beyond) return false;
        if (prev.exact && prev.exact->fits_ulong_p()) {
          mpz_class exponent = *prev.exact;
          m = power_magnitude(exponent);
        } else if (std::isfinite(prev.L)) {
          m = power_from_log(prev.L);
        } else {
          return false;  // exponent itself only known at log-log scale
        }
        break;
      }
    }
    if (m.beyond) return false;
    a.push_back(std::move(m));
    return true;
  }

  // base^exponent for a big exponent.
  Magnitude power_magnitude(const mpz_class& exponent) {
    const double logBase = std::log(static_cast<double>(rule.base));
    std::size_t baseBits = mpz_sizeinbase(mpz_class(rule.base).get_mpz_t(), 2);
    if (exponent.fits_ulong_p()) {
      unsigned long e = exponent.get_ui();
      if (static_cast<std::size_t>(e) * baseBits <= kBitBudget) {
        mpz_class v;
        mpz_ui_pow_ui(v.get_mpz_t(), rule.base, e);
        return mag_from_mpz(std::move(v));
      }
    }
    double logExp = accurate_log(exponent);
    if (logExp <= 700.0) {
      Magnitude m;
      m.L = std::exp(logExp) * logBase;
      m.M = std::log(m.L);
      return m;
    }
    Magnitude m;
    m.L = kInf;
    m.M = logExp + std::log(logBase);
    return m;
  }

  Magnitude power_from_log(double logExponent) {
    const double logBase = std::log(static_cast<double>(rule.base));
    if (logExponent <= 700.0) {
      Magnitude m;
      m.L = std::exp(logExponent) * logBase;
      m.M = m.L > 0 ? std::log(m.L) : -kInf;
      return m;
    }
    Magnitude m;
    m.L = kInf;
    m.M = logExponent + std::log(logBase);
    return m;
  }

  // Appends q_k (and p_k while exact); false once beyond representation.
  bool push_convergent(int k) {
    const Magnitude& ak = a[static_cast<std::size_t>(k)];
    if (k == 1) {
      q.push_back(ak);
      p.push_back(mpz_class(1));
      return true;
    }
    const Magnitude& q1 = q[static_cast<std::size_t>(k - 1)];
    const Magnitude& q2 = q[static_cast<std::size_t>(k - 2)];
    Magnitude next;
    if (ak.exact && q1.exact && q2.exact &&
        mpz_sizeinbase(ak.exact->get_mpz_t(), 2) +
                mpz_sizeinbase(q1.exact->get_mpz_t(), 2) + 2 <=
            kBitBudget) {
      next = mag_from_mpz(*ak.exact * *q1.exact + *q2.exact);
      if (p[static_cast<std::size_t>(k - 1)] &&
          p[static_cast<std::size_t>(k - 2)]) {
        p.push_back(*ak.exact * *p[static_cast<std::size_t>(k - 1)] +
                    *p[static_cast<std::size_t>(k - 2)]);
      } else {
        p.push_back(std::nullopt);
      }
      q.push_back(std::move(next));
      return true;
    }
    if (ak.beyond || q1.beyond) return false;
    if (std::isfinite(ak.L) && std::isfinite(q1.L)) {
      double corr = q2.L - ak.L - q1.L;  // <= 0
      next.L = ak.L + q1.L + std::log1p(std::exp(corr));
      next.M = next.L > 0 ? std::log(next.L) : -kInf;
      if (std::isinf(next.L)) next.M = logsumexp2(ak.M, q1.M);
    } else {
      next.L = kInf;
      next.M = logsumexp2(ak.M, q1.M);
    }
    next.exact.reset();
    p.push_back(std::nullopt);
    q.push_back(std::move(next));
    return true;
  }

  // Extends to q_count; returns the largest index reached.
  int extend_to(int count) {
    for (int k = static_cast<int>(q.size()); k <= count; ++k) {
      if (!push_quotient(k)) return k - 1;
      if (!push_convergent(k)) {
        a.pop_back();
        return k - 1;
      }
    }
    return count;
  }
};

ContinuedFraction ContinuedFraction::from_quotients(
    std::vector<mpz_class> quotients) {
  require_pre(!quotients.empty(), "need at least one quotient");
  for (const mpz_class& v : quotients)
    require_pre(sgn(v) > 0, "quotients must be positive");
  ContinuedFraction cf;
  cf.rule_.kind = Rule::List;
  cf.rule_.list = std::move(quotients);
  return cf;
}

ContinuedFraction ContinuedFraction::factorial_power(unsigned long base) {
  require_pre(base >= 2, "factorial-power base must be >= 2");
  ContinuedFraction cf;
  cf.rule_.kind = Rule::FactorialPower;
  cf.rule_.base = base;
  return cf;
}

ContinuedFraction ContinuedFraction::exp_rule(unsigned long base,
                                              unsigned long a1) {
  require_pre(base >= 2, "exponential-rule base must be >= 2");
  require_pre(a1 >= 1, "first quotient must be >= 1");
  ContinuedFraction cf;
  cf.rule_.kind = Rule::ExpRule;
  cf.rule_.base = base;
  cf.rule_.a1 = a1;
  return cf;
}

ContinuedFraction ContinuedFraction::constant(unsigned long value) {
  require_pre(value >= 1, "constant quotient must be >= 1");
  ContinuedFraction cf;
  cf.rule_.kind = Rule::Constant;
  cf.rule_.base = value;
  return cf;
}

int ContinuedFraction::max_depth() const {
  if (rule_.kind == Rule::List) return static_cast<int>(rule_.list.size()) - 1;
  CFEngine engine(rule_);
  int reached = engine.extend_to(kRuleDepthCap);
  return reached - 1;
}

std::string ContinuedFraction::describe() const {
  std::ostringstream out;
  switch (rule_.kind) {
    case Rule::List:
      out << "quotients[" << rule_.list.size() << "]";
      break;
    case Rule::FactorialPower:
      out << "factorial-power(base=" << rule_.base << ")";
      break;
    case Rule::ExpRule:
      out << "exp-rule(base=" << rule_.base << ", a1=" << rule_.a1 << ")";
      break;
    case Rule::Constant:
      out << "constant(" << rule_.base << ")";
      break;
  }
  return out.str();
}

std::vector<ConvergentBounds> convergents(const ContinuedFraction& cf,
                                          int depth) {
  require_pre(depth >= 1, "depth must be >= 1");
  CFEngine engine(cf.rule_);
  int reached = engine.extend_to(depth + 1);
  require_pre(reached >= depth + 1,
              "depth exceeds the representable horizon (" +
                  std::to_string(std::max(0, reached - 1)) + ")");

  std::vector<ConvergentBounds> out;
  for (int k = 1; k <= depth; ++k) {
    const Magnitude& qk = engine.q[static_cast<std::size_t>(k)];
    const Magnitude& qn = engine.q[static_cast<std::size_t>(k + 1)];
    ConvergentBounds b;
    b.k = k;
    b.p = engine.p[static_cast<std::size_t>(k)];
    b.q = qk.exact;
    b.logQ = qk.L;
    if (qk.exact && qn.exact) {
      double logSum = accurate_log(*qn.exact + *qk.exact);
      b.logLower = -logSum - kLogSlack;
      b.logUpper = -accurate_log(*qn.exact) + kLogSlack;
    } else if (std::isfinite(qn.L)) {
      b.logLower = -qn.L - std::numbers::ln2 - kLogSlack;
      b.logUpper = -qn.L + kLogSlack;
    } else {
      // log q_{k+1} exceeds double range; the error lower bound is vacuous
      // and the upper bound is weakened to the largest expressible one.
      b.logLower = -kInf;
      b.logUpper = -std::numeric_limits<double>::max();
    }
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

// log(q_{k+1} + q_k) < eps * q_k^{1/sigma}, certified against the slack.
bool certified_at(const CFEngine& engine, int k, double eps, double sigma) {
  const Magnitude& qk = engine.q[static_cast<std::size_t>(k)];
  const Magnitude& qn = engine.q[static_cast<std::size_t>(k + 1)];

  // left side, linear scale when possible, else log scale
  double lhs;
  bool lhsLogScale;
  if (qk.exact && qn.exact) {
    lhs = accurate_log(*qn.exact + *qk.exact) + kLogSlack;
    lhsLogScale = false;
  } else if (std::isfinite(qn.L)) {
    lhs = qn.L + std::numbers::ln2 + kLogSlack;
    lhsLogScale = false;
  } else {
    lhs = qn.M + kLogSlack;
    lhsLogScale = true;
  }

  // right side eps * exp(L_k / sigma)
  double t = std::isfinite(qk.L) ? qk.L / sigma : kInf;
  if (!lhsLogScale && t <= 700.0) return lhs < eps * std::exp(t);
  double logRhs = std::log(eps) + t;
  double logLhs = lhsLogScale ? lhs : (lhs > 0 ? std::log(lhs) : -kInf);
  return logLhs < logRhs;
}

double eps_hat(const CFEngine& engine, int k, double sigma) {
  const Magnitude& qk = engine.q[static_cast<std::size_t>(k)];
  const Magnitude& qn = engine.q[static_cast<std::size_t>(k + 1)];
  double t = std::isfinite(qk.L) ? qk.L / sigma : kInf;
  if (std::isfinite(qn.L)) {
    if (t <= 700.0) return qn.L / std::exp(t);
    return std::exp((qn.L > 0 ? std::log(qn.L) : -kInf) - t);
  }
  return std::exp(qn.M - t);
}

}  // namespace

LiouvilleVerdict exp_liouville_test(const ContinuedFraction& cf, double sigma,
                                    int depth) {
  require_pre(std::isfinite(sigma) && sigma >= 1.0, "sigma must be >= 1");
  require_pre(depth >= 1, "depth must be >= 1");
  CFEngine engine(cf.rule_);
  int reached = engine.extend_to(depth + 1);
  require_pre(reached >= depth + 1,
              "depth exceeds the representable horizon (" +
                  std::to_string(std::max(0, reached - 1)) + ")");

  LiouvilleVerdict out;
  bool logLogUsed = false;
  for (int k = 1; k <= depth + 1; ++k)
    if (!std::isfinite(engine.q[static_cast<std::size_t>(k)].L))
      logLogUsed = true;
  if (logLogUsed)
    out.caveats.push_back("denominator logs carried at log-log scale");

  for (int k = 1; k <= depth; ++k)
    out.epsSeq.push_back(eps_hat(engine, k, sigma));

  const int tailStart = depth - depth / 2 + 1;
  out.epsHat = kInf;
  for (int k = tailStart; k <= depth; ++k)
    out.epsHat = std::min(out.epsHat,
                          out.epsSeq[static_cast<std::size_t>(k - 1)]);
  out.flagged = out.epsHat >= kFlagThreshold;

  bool allCertified = true;
  for (int i = 0; i <= 6; ++i) {
    double eps = std::pow(10.0, -3.0 + 3.0 * i / 6.0);
    int k0 = depth + 1;
    while (k0 - 1 >= 1 && certified_at(engine, k0 - 1, eps, sigma)) --k0;
    if (k0 == depth + 1) {
      out.certifiedFrom.emplace_back(eps, -1);
      allCertified = false;
    } else {
      out.certifiedFrom.emplace_back(eps, k0);
    }
  }

  bool tailNonincreasing = true;
  for (int k = tailStart; k < depth; ++k) {
    double cur = out.epsSeq[static_cast<std::size_t>(k - 1)];
    double nxt = out.epsSeq[static_cast<std::size_t>(k)];
    if (nxt > cur * (1.0 + 1e-9) + 1e-12) tailNonincreasing = false;
  }
  out.certifiedTail = !out.flagged && allCertified && tailNonincreasing;
  return out;
}

VectorVerdict vector_coordinate_test(const std::vector<ContinuedFraction>& cfs,
                                     double sigma, int depth) {
  require_pre(!cfs.empty(), "vector test needs at least one coordinate");
  VectorVerdict out;
  for (std::size_t i = 0; i < cfs.size(); ++i) {
    out.perCoordinate.push_back(exp_liouville_test(cfs[i], sigma, depth));
    const LiouvilleVerdict& v = out.perCoordinate.back();
    if (!out.certified && !v.flagged && v.certifiedTail) {
      out.certified = true;
      out.coordinate = static_cast<int>(i) + 1;
    }
  }
  return out;
}

}  // namespace fhops
