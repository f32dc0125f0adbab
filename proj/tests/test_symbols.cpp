#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "fhops/symbols.hpp"

using namespace fhops;

namespace {

PolySymbol::Term term(std::vector<int> alpha, long num, long den = 1) {
  PolySymbol::Term t;
  t.alpha = std::move(alpha);
  t.exact = CRational(Rational(num, den), Rational(0));
  t.c = t.exact->to_complex();
  return t;
}

Coupling coupling(long num, long den = 1) {
  Coupling d;
  d.exact = CRational(Rational(num, den), Rational(0));
  d.v = d.exact->to_complex();
  return d;
}

// D_t + c * H on T^1 x R^1 with lambda_j = 2j+1
SystemSpec dt_plus(long cNum, long cDen) {
  SystemSpec spec;
  spec.params.m = 1;
  spec.params.sigma = 1.0;
  spec.params.mu = 0.5;
  spec.eigen = EigenProvider::harmonic1d();
  PolySymbol q;
  q.terms.push_back(term({1}, 1));
  spec.ops.push_back({q, coupling(cNum, cDen)});
  spec.validate();
  return spec;
}

}  // namespace

TEST_CASE("polynomial symbols evaluate exactly and in doubles") {
  // q(tau) = 3 tau1^2 - (1/2) tau2 + 5 on m = 2
  PolySymbol q;
  q.terms.push_back(term({2, 0}, 3));
  q.terms.push_back(term({0, 1}, -1, 2));
  q.terms.push_back(term({0, 0}, 5));

  CHECK(q.degree() == 2);
  CHECK(!q.affine());
  CHECK(q.all_exact());

  std::vector<long long> tau{2, 6};
  CHECK(q.eval(tau) == std::complex<double>(3.0 * 4 - 3 + 5, 0.0));
  auto exact = q.eval_exact(tau);
  REQUIRE(exact.has_value());
  CHECK(exact->re == Rational(14));
  CHECK(exact->im == Rational(0));

  PolySymbol affineQ;
  affineQ.terms.push_back(term({1, 0}, 2));
  affineQ.terms.push_back(term({0, 0}, -7));
  CHECK(affineQ.affine());
}

TEST_CASE("tabulated symbols are zero off support and bounded by growth") {
  TabulatedSymbol tab;
  tab.tauMax = {4};
  tab.growthC = 10.0;
  tab.growthNu = 0.0;
  tab.values[{2}] = {1.5, -0.5};

  CHECK(tab.covers({-4}));
  CHECK(!tab.covers({5}));
  CHECK(tab.eval({2}) == std::complex<double>(1.5, -0.5));
  CHECK(tab.eval({3}) == std::complex<double>(0.0, 0.0));
  CHECK_NOTHROW(tab.validate_growth());

  tab.values[{1}] = {100.0, 0.0};
  CHECK_THROWS_AS(tab.validate_growth(), precondition_error);
}

TEST_CASE("component symbols combine time part and coupled eigenvalue") {
  SystemSpec spec = dt_plus(1, 2);  // sigma = tau + (2j+1)/2

  ModeIndex mode{{3}, 1};  // tau = 3, lambda = 3
  CHECK(symbol_eval(spec, 0, mode) == std::complex<double>(4.5, 0.0));
  auto exact = symbol_eval_exact(spec, 0, mode);
  REQUIRE(exact.has_value());
  CHECK(exact->re == Rational(9, 2));

  ModeIndex neg{{-2}, 0};  // tau = -2, lambda = 1
  CHECK(symbol_eval(spec, 0, neg) == std::complex<double>(-1.5, 0.0));
}

TEST_CASE("system norm takes the max component, ties go to the lower index") {
  SystemSpec spec;
  spec.params.m = 1;
  spec.eigen = EigenProvider::harmonic1d();
  PolySymbol q1;  // tau
  q1.terms.push_back(term({1}, 1));
  PolySymbol q2;  // -tau
  q2.terms.push_back(term({1}, -1));
  spec.ops.push_back({q1, coupling(0)});
  spec.ops.push_back({q2, coupling(0)});
  spec.validate();

  SystemNorm norm = system_norm(spec, ModeIndex{{5}, 0});
  CHECK(norm.norm == 5.0);
  CHECK(norm.argmax == 0);  // |5| == |-5|, first operator wins

  // make the second strictly dominant
  spec.ops[1].Q = [] {
    PolySymbol q;
    q.terms.push_back(term({1}, -3));
    return q;
  }();
  norm = system_norm(spec, ModeIndex{{5}, 0});
  CHECK(norm.norm == 15.0);
  CHECK(norm.argmax == 1);
}

TEST_CASE("zero decisions use exact arithmetic when available") {
  SystemSpec spec = dt_plus(1, 1);  // sigma = tau + 2j+1

  ZeroTest hit = symbol_zero_test(spec, ModeIndex{{-3}, 1});
  CHECK(hit.zero);
  CHECK(hit.exact);
  CHECK(!hit.caveat);

  ZeroTest miss = symbol_zero_test(spec, ModeIndex{{-3}, 2});
  CHECK(!miss.zero);
  CHECK(miss.exact);

  // an inexact coupling forces the double path; exactly representable values
  // stay above the threshold so no caveat fires
  SystemSpec inexact = dt_plus(1, 1);
  inexact.ops[0].d.exact.reset();
  ZeroTest dbl = symbol_zero_test(inexact, ModeIndex{{-3}, 2});
  CHECK(!dbl.zero);
  CHECK(!dbl.exact);
  CHECK(!dbl.caveat);

  // double value that lands exactly on zero is below 1e-30: caveat
  ZeroTest dblHit = symbol_zero_test(inexact, ModeIndex{{-3}, 1});
  CHECK(dblHit.zero);
  CHECK(!dblHit.exact);
  CHECK(dblHit.caveat);
}

TEST_CASE("zero sets enumerate the box in canonical order") {
  SystemSpec spec = dt_plus(1, 1);  // zeros at tau = -(2j+1)
  Bounds bounds;
  bounds.tauMax = {9};
  bounds.jMax = 6;

  ZeroSetResult zs = zero_set(spec, bounds);
  CHECK(zs.exact);
  CHECK(zs.caveats.empty());
  REQUIRE(zs.modes.size() == 5);  // tau in {-1,-3,-5,-7,-9} for j = 0..4
  for (const ModeIndex& mode : zs.modes) {
    CHECK(mode.tau[0] == -(2 * mode.j + 1));
  }
  for (std::size_t i = 0; i + 1 < zs.modes.size(); ++i)
    CHECK(mode_less(zs.modes[i], zs.modes[i + 1]));

  // parity obstruction: tau + (2j+1)/2 never vanishes on integers
  ZeroSetResult none = zero_set(dt_plus(1, 2), bounds);
  CHECK(none.modes.empty());
  CHECK(none.exact);
}

TEST_CASE("zero sets agree across thread counts") {
  SystemSpec spec = dt_plus(1, 1);
  Bounds bounds;
  bounds.tauMax = {40};
  bounds.jMax = 30;
  ZeroSetResult one = zero_set(spec, bounds, 1);
  ZeroSetResult four = zero_set(spec, bounds, 4);
  REQUIRE(one.modes.size() == four.modes.size());
  for (std::size_t i = 0; i < one.modes.size(); ++i) {
    CHECK(one.modes[i].tau == four.modes[i].tau);
    CHECK(one.modes[i].j == four.modes[i].j);
  }
}

TEST_CASE("resonance certificates decide finite versus infinite zero sets") {
  {
    // tau - (2j+1): a zero for every j
    ResonanceResult r = resonance_exact(dt_plus(-1, 1));
    CHECK(r.kind == ResonanceKind::InfiniteCertified);
  }
  {
    // tau + (2j+1)/2: blocked by parity, zero count 0
    ResonanceResult r = resonance_exact(dt_plus(1, 2));
    CHECK(r.kind == ResonanceKind::FiniteCertified);
    CHECK(r.count == 0);
  }
  {
    // two operators pin (tau, j) = (3, 2) exactly
    SystemSpec spec;
    spec.params.m = 1;
    spec.eigen = EigenProvider::harmonic1d();
    PolySymbol q1;  // tau - 3
    q1.terms.push_back(term({1}, 1));
    q1.terms.push_back(term({0}, -3));
    PolySymbol q2;  // lambda_j - 5
    q2.terms.push_back(term({0}, -5));
    spec.ops.push_back({q1, coupling(0)});
    spec.ops.push_back({q2, coupling(1)});
    spec.validate();

    ResonanceResult r = resonance_exact(spec);
    CHECK(r.kind == ResonanceKind::FiniteCertified);
    CHECK(r.count == 1);
  }
  {
    // nonaffine time symbol cannot be certified by this routine
    SystemSpec spec;
    spec.params.m = 1;
    spec.eigen = EigenProvider::harmonic1d();
    PolySymbol q;
    q.terms.push_back(term({2}, 1));
    spec.ops.push_back({q, coupling(1)});
    spec.validate();
    ResonanceResult r = resonance_exact(spec);
    CHECK(r.kind == ResonanceKind::Undecided);
    CHECK(!r.detail.empty());
  }
}

TEST_CASE("resonance names are stable strings") {
  CHECK(std::string(resonance_kind_name(ResonanceKind::FiniteCertified)) ==
        "FiniteCertified");
  CHECK(std::string(resonance_kind_name(ResonanceKind::InfiniteCertified)) ==
        "InfiniteCertified");
  CHECK(std::string(resonance_kind_name(ResonanceKind::Undecided)) ==
        "Undecided");
}
