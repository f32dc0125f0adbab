#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fhops/solver.hpp"

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

SystemSpec dt_plus(long cNum, long cDen) {
  SystemSpec spec;
  spec.params.m = 1;
  spec.eigen = EigenProvider::harmonic1d();
  PolySymbol q;
  q.terms.push_back(term({1}, 1));
  spec.ops.push_back({q, coupling(cNum, cDen)});
  spec.validate();
  return spec;
}

// two commuting operators sharing the zero set {tau = -(2j+1)}
SystemSpec two_op_system() {
  SystemSpec spec = dt_plus(1, 1);
  PolySymbol q2;  // 2 tau
  q2.terms.push_back(term({1}, 2));
  spec.ops.push_back({q2, coupling(2)});
  spec.validate();
  return spec;
}

SpectralField random_field(const SystemSpec& spec, const Bounds& bounds,
                           unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979);
  SpectralField u(spec.params, bounds);
  for (long long tau = -bounds.tauMax[0]; tau <= bounds.tauMax[0]; ++tau)
    for (long long j = 0; j <= bounds.jMax; ++j) {
      double w = weight(spec.params, ModeIndex{{tau}, j});
      double t = phase(rng);
      u.accumulate({{tau}, j}, std::polar(std::exp(-w), t));
    }
  u.finalize();
  return u;
}

}  // namespace

TEST_CASE("applying the system multiplies each mode by its symbol") {
  SystemSpec spec = two_op_system();
  Bounds bounds;
  bounds.tauMax = {4};
  bounds.jMax = 3;

  SpectralField u(spec.params, bounds);
  u.accumulate({{2}, 1}, {1.0, -2.0});
  u.accumulate({{-3}, 0}, {0.5, 0.0});
  u.finalize();

  DataVector F = apply_system(spec, u);
  REQUIRE(F.components.size() == 2);
  // sigma_1(2,1) = 2 + 3 = 5, sigma_2 = 2*2 + 2*3 = 10
  CHECK(F.components[0].at({{2}, 1}) == std::complex<double>(5.0, -10.0));
  CHECK(F.components[1].at({{2}, 1}) == std::complex<double>(10.0, -20.0));
  // sigma_1(-3,0) = -3 + 1 = -2
  CHECK(F.components[0].at({{-3}, 0}) == std::complex<double>(-1.0, 0.0));
  // the zero-set mode (-1, 0) carries nothing
  CHECK(F.components[0].at({{-1}, 0}) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("data produced by the system passes admissibility") {
  SystemSpec spec = two_op_system();
  Bounds bounds;
  bounds.tauMax = {16};
  bounds.jMax = 8;
  SpectralField u = random_field(spec, bounds, 7);

  DataVector F = apply_system(spec, u);
  AdmissibilityReport report = admissibility_check(spec, F);
  CHECK(report.admissible);
  CHECK(report.commutationResidual <= report.tol);
  CHECK(report.kernelViolations.empty());
  CHECK(report.maxAbs > 0);
}

TEST_CASE("data charged on the zero set is rejected with the offending modes") {
  SystemSpec spec = dt_plus(1, 1);  // zeros at tau = -(2j+1)
  Bounds bounds;
  bounds.tauMax = {8};
  bounds.jMax = 3;

  SpectralField f(spec.params, bounds);
  f.accumulate({{-3}, 1}, {1.0, 0.0});  // sigma(-3,1) = 0
  f.accumulate({{2}, 0}, {1.0, 0.0});
  f.finalize();
  DataVector F;
  F.components.push_back(std::move(f));

  AdmissibilityReport report = admissibility_check(spec, F);
  CHECK(!report.admissible);
  REQUIRE(report.kernelViolations.size() == 1);
  CHECK(report.kernelViolations[0].tau == std::vector<long long>{-3});
  CHECK(report.kernelViolations[0].j == 1);
}

TEST_CASE("mismatched cross-identities are rejected") {
  SystemSpec spec = two_op_system();
  Bounds bounds;
  bounds.tauMax = {4};
  bounds.jMax = 2;

  // F = (sigma_1 u, sigma_2 u) at one mode, then corrupt the second entry
  SpectralField f1(spec.params, bounds), f2(spec.params, bounds);
  f1.accumulate({{2}, 1}, {5.0, 0.0});
  f2.accumulate({{2}, 1}, {10.0 + 0.5, 0.0});
  f1.finalize();
  f2.finalize();
  DataVector F;
  F.components.push_back(std::move(f1));
  F.components.push_back(std::move(f2));

  AdmissibilityReport report = admissibility_check(spec, F);
  CHECK(!report.admissible);
  CHECK(report.commutationResidual > report.tol);
}

TEST_CASE("solving recovers the field that produced the data") {
  SystemSpec spec = two_op_system();
  Bounds bounds;
  bounds.tauMax = {24};
  bounds.jMax = 12;
  SpectralField u = random_field(spec, bounds, 99);

  DataVector F = apply_system(spec, u);
  auto [v, report] = solve(spec, F);
  CHECK(report.residual <= 1e-12);

  // per-mode relative recovery off the zero set
  for (const FieldEntry& e : u.entries()) {
    if (symbol_zero_test(spec, e.mode).zero) continue;
    std::complex<double> got = v.at(e.mode);
    CHECK(std::abs(got - e.a) <= 1e-12 * std::abs(e.a));
  }
  // zero-set modes of the solution are zeroed
  CHECK(report.zeroedModes > 0);
  for (const FieldEntry& e : u.entries()) {
    if (!symbol_zero_test(spec, e.mode).zero) continue;
    CHECK(v.at(e.mode) == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("a kernel field shifts the solution only on the zero set") {
  SystemSpec spec = dt_plus(1, 1);
  Bounds bounds;
  bounds.tauMax = {8};
  bounds.jMax = 3;

  SpectralField u(spec.params, bounds);
  u.accumulate({{2}, 1}, {3.0, 0.0});
  u.finalize();
  DataVector F = apply_system(spec, u);

  SpectralField kernel(spec.params, bounds);
  kernel.accumulate({{-3}, 1}, {7.0, 1.0});
  kernel.finalize();

  auto [v, report] = solve(spec, F, kernel);
  CHECK(report.residual <= 1e-12);
  CHECK(v.at({{-3}, 1}) == std::complex<double>(7.0, 1.0));
  CHECK(std::abs(v.at({{2}, 1}) - std::complex<double>(3.0, 0.0)) <= 1e-12);

  // kernel mass off the zero set is a contract violation
  SpectralField bad(spec.params, bounds);
  bad.accumulate({{2}, 0}, {1.0, 0.0});
  bad.finalize();
  CHECK_THROWS_AS(solve(spec, F, bad), precondition_error);
}

TEST_CASE("solutions and division agree off the zero set") {
  SystemSpec spec = dt_plus(1, 1);
  Bounds bounds;
  bounds.tauMax = {6};
  bounds.jMax = 3;

  SpectralField f(spec.params, bounds);
  f.accumulate({{4}, 1}, {2.0, 2.0});   // sigma = 4 + 3 = 7
  f.accumulate({{-1}, 0}, {0.0, 0.0});  // zero-set mode, empty data
  f.finalize();
  DataVector F;
  F.components.push_back(std::move(f));

  SpectralField div = symbol_division(spec, F);
  CHECK(std::abs(div.at({{4}, 1}) -
                 std::complex<double>(2.0 / 7.0, 2.0 / 7.0)) <= 1e-15);
  CHECK(div.at({{-1}, 0}) == std::complex<double>(0.0, 0.0));

  auto [v, report] = solve(spec, F);
  CHECK(report.residual <= 1e-15);
  CHECK(v.at({{4}, 1}) == div.at({{4}, 1}));
}

TEST_CASE("data vectors are validated against the system") {
  SystemSpec spec = two_op_system();
  Bounds bounds;
  bounds.tauMax = {4};
  bounds.jMax = 2;

  DataVector wrongCount;
  wrongCount.components.emplace_back(spec.params, bounds);
  wrongCount.components.back().finalize();
  CHECK_THROWS_AS(wrongCount.validate(spec), precondition_error);
  CHECK_THROWS_AS(admissibility_check(spec, wrongCount), precondition_error);

  Bounds other;
  other.tauMax = {5};
  other.jMax = 2;
  DataVector mismatched;
  mismatched.components.emplace_back(spec.params, bounds);
  mismatched.components.emplace_back(spec.params, other);
  for (auto& c : mismatched.components) c.finalize();
  CHECK_THROWS_AS(mismatched.validate(spec), precondition_error);
}

TEST_CASE("witness counterexamples obey the window contract") {
  // sigma = tau + (2j+1)/2 has |sigma| = 1/2 along tau = -(j+1); those modes
  // are witnesses once 1/2 < exp(-eps * w), i.e. eps < log(2)/w
  SystemSpec spec = dt_plus(1, 2);
  Bounds bounds;
  bounds.tauMax = {40};
  bounds.jMax = 40;

  std::vector<ModeIndex> witnesses;
  for (long long j = 0; j <= 6; ++j)
    witnesses.push_back({{-(j + 1)}, j});

  // weights are 2(j+1), largest 14: any eps below log(2)/14 ~ 0.0495 works
  CounterexamplePair gh =
      counterexample_pair(spec, bounds, witnesses, 0.02, CounterexampleFlavor::GH);
  CHECK(gh.eps == 0.02);
  REQUIRE(gh.u.has_value());
  REQUIRE(gh.F.components.size() == 1);
  CHECK(gh.witnesses.size() == witnesses.size());

  // u carries the mode magnitude |(tau, j)|, F = sigma * u
  for (const ModeIndex& mode : witnesses) {
    double tauD = static_cast<double>(mode.tau[0]);
    double jD = static_cast<double>(mode.j);
    double mag = std::sqrt(tauD * tauD + jD * jD);
    CHECK(std::abs(gh.u->at(mode)) == doctest::Approx(mag).epsilon(1e-12));
    std::complex<double> sigma = symbol_eval(spec, 0, mode);
    CHECK(std::abs(gh.F.components[0].at(mode) - sigma * gh.u->at(mode)) <=
          1e-12 * mag);
  }

  // eps too large: the window 0 < |sigma| < exp(-eps w) excludes the modes
  CHECK_THROWS_AS(counterexample_pair(spec, bounds, witnesses, 1.0,
                                      CounterexampleFlavor::GH),
                  precondition_error);

  // a zero-set mode can never be a witness
  SystemSpec resonant = dt_plus(-1, 1);
  std::vector<ModeIndex> zeroMode{{{1}, 0}};
  CHECK_THROWS_AS(counterexample_pair(resonant, bounds, zeroMode, 0.01,
                                      CounterexampleFlavor::GH),
                  precondition_error);
}

TEST_CASE("division-flavor counterexamples force unbounded growth") {
  // plant a tabulated symbol decaying fast enough for every witness rank:
  // |sigma(k)| = 0.9 exp(-0.05 w_k)/k at tau = k, j = 0, w_k = k + 1
  SystemSpec spec;
  spec.params.m = 1;
  spec.eigen = EigenProvider::harmonic1d();
  TabulatedSymbol tab;
  tab.tauMax = {40};
  tab.growthC = 1.0;
  tab.growthNu = 0.0;
  std::vector<ModeIndex> witnesses;
  for (long long k = 1; k <= 8; ++k) {
    double w = static_cast<double>(k) + 1.0;
    tab.values[{k}] = {0.9 * std::exp(-0.05 * w) / static_cast<double>(k), 0.0};
    witnesses.push_back({{k}, 0});
  }
  spec.ops.push_back({TimeSymbol{tab}, coupling(0)});
  spec.validate();

  Bounds bounds;
  bounds.tauMax = {40};
  bounds.jMax = 4;

  CounterexamplePair gs =
      counterexample_pair(spec, bounds, witnesses, 0.04, CounterexampleFlavor::GS);
  CHECK(!gs.u.has_value());
  for (const ModeIndex& mode : witnesses)
    CHECK(gs.F.components[0].at(mode) == std::complex<double>(1.0, 0.0));

  // the formal division grows at least like the witness rank
  SpectralField div = symbol_division(spec, gs.F);
  for (std::size_t k = 1; k <= witnesses.size(); ++k) {
    double got = std::abs(div.at(witnesses[k - 1]));
    CHECK(got >= static_cast<double>(k));
  }

  // a rate the planted decay cannot beat is rejected
  CHECK_THROWS_AS(counterexample_pair(spec, bounds, witnesses, 0.2,
                                      CounterexampleFlavor::GS),
                  precondition_error);
}

TEST_CASE("application and solving are deterministic across threads") {
  SystemSpec spec = two_op_system();
  Bounds bounds;
  bounds.tauMax = {32};
  bounds.jMax = 16;
  SpectralField u = random_field(spec, bounds, 1234);

  DataVector f1 = apply_system(spec, u, 1);
  DataVector f8 = apply_system(spec, u, 8);
  REQUIRE(f1.components[0].entries().size() == f8.components[0].entries().size());
  for (std::size_t i = 0; i < f1.components[0].entries().size(); ++i) {
    CHECK(f1.components[0].entries()[i].a == f8.components[0].entries()[i].a);
    CHECK(f1.components[1].entries()[i].a == f8.components[1].entries()[i].a);
  }

  auto [v1, r1] = solve(spec, f1, std::nullopt, 1);
  auto [v8, r8] = solve(spec, f1, std::nullopt, 8);
  CHECK(r1.residual == r8.residual);
  REQUIRE(v1.entries().size() == v8.entries().size());
  for (std::size_t i = 0; i < v1.entries().size(); ++i)
    CHECK(v1.entries()[i].a == v8.entries()[i].a);
}
