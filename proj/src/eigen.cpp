#include "fhops/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fhops {

double hermite_eval(long long j, double x) {
  require_pre(j >= 0, "eigenfunction index must be >= 0");
  double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (j == 0) return h0;
  double prev = 0.0;
  double cur = h0;
  for (long long k = 0; k < j; ++k) {
    double kd = static_cast<double>(k);
    double next = x * std::sqrt(2.0 / (kd + 1.0)) * cur -
                  std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// C(a, b) with saturation at INT64_MAX; b stays small (the dimension).
long long binomial(long long a, int b) {
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

// Smallest level k whose cumulative index count C(k+n, n) exceeds j.
long long level_of(long long j, int n) {
  if (n == 1) return j;
  long long k = 0;
  while (binomial(k + n, n) <= j) ++k;
  return k;
}

// Multi-index of given level and rank in lexicographic order.
std::vector<int> unrank_level(long long rank, long long level, int n) {
  std::vector<int> alpha(n, 0);
  long long rest = level;
  for (int i = 0; i < n - 1; ++i) {
    int a = 0;
    for (;;) {
      long long block = binomial(rest - a + (n - i - 2), n - i - 2);
      if (rank < block) break;
      rank -= block;
      ++a;
    }
    alpha[i] = a;
    rest -= a;
  }
  alpha[n - 1] = static_cast<int>(rest);
  return alpha;
}

}  // namespace

struct EigenProvider::Impl {
  enum class Kind { Harmonic, PowerOf, Custom };
  Kind kind = Kind::Harmonic;
  int n = 1;
  double M = 2.0;
  int exponent = 1;                   // PowerOf
  std::shared_ptr<const Impl> base;   // PowerOf
  std::vector<double> values;         // Custom
  std::vector<Rational> exactValues;  // Custom, optional
};

EigenProvider EigenProvider::harmonic1d() { return harmonic_nd(1); }

EigenProvider EigenProvider::harmonic_nd(int n) {
  require_pre(n >= 1, "oscillator dimension must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Harmonic;
  impl->n = n;
  impl->M = 2.0;
  EigenProvider p;
  p.impl_ = std::move(impl);
  return p;
}

EigenProvider EigenProvider::power_of(const EigenProvider& base,
                                      int exponent) {
  require_pre(base.impl_ != nullptr, "power_of needs a base provider");
  require_pre(exponent >= 1, "power_of exponent must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::PowerOf;
  impl->n = base.impl_->n;
  impl->M = base.impl_->M * exponent;
  impl->exponent = exponent;
  impl->base = base.impl_;
  EigenProvider p;
  p.impl_ = std::move(impl);
  return p;
}

EigenProvider EigenProvider::custom(std::vector<double> values, double M,
                                    int n, std::vector<Rational> exact) {
  require_pre(!values.empty(), "custom spectrum needs at least one value");
  require_pre(M > 0, "custom spectrum order M must be > 0");
  require_pre(n >= 1, "custom spectrum dimension must be >= 1");
  require_pre(exact.empty() || exact.size() == values.size(),
              "exact list must match the eigenvalue list");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Custom;
  impl->n = n;
  impl->M = M;
  impl->values = std::move(values);
  impl->exactValues = std::move(exact);
  EigenProvider p;
  p.impl_ = std::move(impl);
  return p;
}

double EigenProvider::order_M() const { return impl_->M; }

int EigenProvider::dim_n() const { return impl_->n; }

long long EigenProvider::index_count() const {
  const Impl* impl = impl_.get();
  while (impl->kind == Impl::Kind::PowerOf) impl = impl->base.get();
  if (impl->kind == Impl::Kind::Custom)
    return static_cast<long long>(impl->values.size());
  return std::numeric_limits<long long>::max();
}

double EigenProvider::eigenvalue(long long j) const {
  require_pre(j >= 0 && j < index_count(), "eigenvalue index out of range");
  switch (impl_->kind) {
    case Impl::Kind::Harmonic:
      return static_cast<double>(2 * level_of(j, impl_->n) + impl_->n);
    case Impl::Kind::PowerOf: {
      EigenProvider base;
      base.impl_ = impl_->base;
      return std::pow(base.eigenvalue(j), impl_->exponent);
    }
    case Impl::Kind::Custom:
      return impl_->values[static_cast<std::size_t>(j)];
  }
  return 0.0;
}

std::optional<Rational> EigenProvider::eigenvalue_exact(long long j) const {
  require_pre(j >= 0 && j < index_count(), "eigenvalue index out of range");
  switch (impl_->kind) {
    case Impl::Kind::Harmonic:
      return Rational(static_cast<long>(2 * level_of(j, impl_->n) + impl_->n));
    case Impl::Kind::PowerOf: {
      EigenProvider base;
      base.impl_ = impl_->base;
      auto b = base.eigenvalue_exact(j);
      if (!b) return std::nullopt;
      Rational r = 1;
      for (int i = 0; i < impl_->exponent; ++i) r *= *b;
      return r;
    }
    case Impl::Kind::Custom:
      if (impl_->exactValues.empty()) return std::nullopt;
      return impl_->exactValues[static_cast<std::size_t>(j)];
  }
  return std::nullopt;
}

bool EigenProvider::has_eigenfunctions() const {
  const Impl* impl = impl_.get();
  while (impl->kind == Impl::Kind::PowerOf) impl = impl->base.get();
  return impl->kind == Impl::Kind::Harmonic;
}

std::vector<int> EigenProvider::multi_index(long long j) const {
  require_pre(has_eigenfunctions(),
              "provider has no eigenfunction enumeration");
  require_pre(j >= 0, "eigenfunction index must be >= 0");
  int n = impl_->n;
  if (n == 1) {
    require_pre(j <= std::numeric_limits<int>::max(),
                "eigenfunction index too large");
    return {static_cast<int>(j)};
  }
  long long k = level_of(j, n);
  long long rank = j - binomial(k - 1 + n, n);
  return unrank_level(rank, k, n);
}

double EigenProvider::eigenfunction(long long j,
                                    std::span<const double> x) const {
  require_pre(static_cast<int>(x.size()) == impl_->n,
              "eigenfunction point has wrong dimension");
  std::vector<int> alpha = multi_index(j);
  double v = 1.0;
  for (int i = 0; i < impl_->n; ++i) v *= hermite_eval(alpha[i], x[i]);
  return v;
}

std::optional<EigenProvider::ExactSpectrum> EigenProvider::exact_spectrum()
    const {
  switch (impl_->kind) {
    case Impl::Kind::Harmonic: {
      ExactSpectrum s;
      s.finite = false;
      s.stride = 2;
      s.offset = impl_->n;
      s.exponent = 1;
      s.baseN = impl_->n;
      return s;
    }
    case Impl::Kind::PowerOf: {
      EigenProvider base;
      base.impl_ = impl_->base;
      auto b = base.exact_spectrum();
      if (!b) return std::nullopt;
      if (b->finite) {
        ExactSpectrum s = *b;
        for (Rational& v : s.values) {
          Rational r = 1;
          for (int i = 0; i < impl_->exponent; ++i) r *= v;
          v = r;
        }
        return s;
      }
      ExactSpectrum s = *b;
      s.exponent = b->exponent * impl_->exponent;
      return s;
    }
    case Impl::Kind::Custom: {
      if (impl_->exactValues.empty()) return std::nullopt;
      ExactSpectrum s;
      s.finite = true;
      s.values = impl_->exactValues;
      s.baseN = impl_->n;
      return s;
    }
  }
  return std::nullopt;
}

std::string EigenProvider::describe() const {
  std::ostringstream out;
  switch (impl_->kind) {
    case Impl::Kind::Harmonic:
      if (impl_->n == 1)
        out << "harmonic1d";
      else
        out << "harmonic_nd(" << impl_->n << ")";
      break;
    case Impl::Kind::PowerOf: {
      EigenProvider base;
      base.impl_ = impl_->base;
      out << "power_of(" << base.describe() << ", " << impl_->exponent << ")";
      break;
    }
    case Impl::Kind::Custom:
      out << "custom(" << impl_->values.size() << " eigenvalues, M=" << impl_->M
          << ", n=" << impl_->n << ")";
      break;
  }
  return out.str();
}

WeylFit weyl_fit(const EigenProvider& provider, long long jLo, long long jHi) {
  require_pre(jLo >= 1 && jLo < jHi, "need 1 <= jLo < jHi");
  require_pre(jHi - jLo + 1 >= 16, "need at least 16 indices for the fit");
  require_pre(jHi < provider.index_count(), "fit range exceeds the spectrum");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long long count = jHi - jLo + 1;
  for (long long j = jLo; j <= jHi; ++j) {
    double lambda = provider.eigenvalue(j);
    require_pre(lambda != 0.0, "zero eigenvalue inside the fit range");
    double x = std::log(static_cast<double>(j));
    double y = std::log(std::abs(lambda));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double nd = static_cast<double>(count);
  double denom = nd * sxx - sx * sx;
  require_pre(denom > 0, "degenerate abscissa in the fit range");
  WeylFit fit;
  fit.exponentHat = (nd * sxy - sx * sy) / denom;
  double intercept = (sy - fit.exponentHat * sx) / nd;
  fit.rhoHat = std::exp(intercept);

  double ss = 0;
  for (long long j = jLo; j <= jHi; ++j) {
    double x = std::log(static_cast<double>(j));
    double y = std::log(std::abs(provider.eigenvalue(j)));
    double r = y - (intercept + fit.exponentHat * x);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / nd);
  return fit;
}

std::vector<std::complex<double>> reconstruct(const SpectralField& field,
                                              const EigenProvider& provider,
                                              int tPerAxis,
                                              std::span<const double> xs,
                                              int xCount) {
  require_pre(provider.has_eigenfunctions(),
              "reconstruction needs an eigenfunction provider");
  require_pre(provider.dim_n() == field.params().n,
              "provider dimension does not match the field");
  require_pre(tPerAxis >= 1, "need at least one torus sample per axis");
  require_pre(xCount >= 1, "need at least one x sample");
  require_pre(static_cast<int>(xs.size()) == xCount * provider.dim_n(),
              "x sample array has wrong shape");

  const int m = field.params().m;
  const int n = provider.dim_n();
  std::int64_t tCount = 1;
  for (int i = 0; i < m; ++i) tCount *= tPerAxis;
  require_pre(tCount * xCount <= (std::int64_t{1} << 26),
              "reconstruction grid is too large");

  const auto& entries = field.entries();
  // h_j(x) for every entry and x sample, reusing per-axis Hermite values.
  std::vector<double> hVals(entries.size() * static_cast<std::size_t>(xCount));
  for (std::size_t e = 0; e < entries.size(); ++e) {
    std::vector<int> alpha = provider.multi_index(entries[e].mode.j);
    for (int p = 0; p < xCount; ++p) {
      double v = 1.0;
      for (int i = 0; i < n; ++i)
        v *= hermite_eval(alpha[i], xs[static_cast<std::size_t>(p) * n + i]);
      hVals[e * xCount + p] = v;
    }
  }

  std::vector<std::complex<double>> out(
      static_cast<std::size_t>(tCount) * xCount, {0.0, 0.0});
  const double step = 2.0 * std::numbers::pi / tPerAxis;
  std::vector<int> tIdx(m, 0);
  for (std::int64_t t = 0; t < tCount; ++t) {
    for (std::size_t e = 0; e < entries.size(); ++e) {
      double phase = 0.0;
      for (int i = 0; i < m; ++i)
        phase += static_cast<double>(entries[e].mode.tau[i]) * tIdx[i] * step;
      std::complex<double> wave(std::cos(phase), std::sin(phase));
      for (int p = 0; p < xCount; ++p)
        out[static_cast<std::size_t>(p) * tCount + t] +=
            entries[e].a * wave * hVals[e * xCount + p];
    }
    int axis = m - 1;
    while (axis >= 0 && ++tIdx[axis] == tPerAxis) tIdx[axis--] = 0;
  }
  return out;
}

}  // namespace fhops
