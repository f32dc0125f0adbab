#include "doctest.h"

#include <gmpxx.h>

#include <cmath>
#include <vector>

#include "fhops/liouville.hpp"

using namespace fhops;

namespace {

double log_mpz(const mpz_class& z) {
  signed long e = 0;
  double d = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(d) + static_cast<double>(e) * std::log(2.0);
}

std::vector<mpz_class> quotients(std::initializer_list<long> values) {
  std::vector<mpz_class> out;
  for (long v : values) out.emplace_back(v);
  return out;
}

// Direct big-integer recurrence for a_k = base^{k!}, used as the oracle
// against the tiered engine.
struct FactorialOracle {
  std::vector<mpz_class> p{mpz_class(0)}, q{mpz_class(1)};
  mpz_class fact = 1;

  explicit FactorialOracle(unsigned long base, int count) {
    mpz_class pPrev = 1, qPrev = 0;
    for (int k = 1; k <= count; ++k) {
      fact *= k;
      mpz_class a;
      mpz_ui_pow_ui(a.get_mpz_t(), base, fact.get_ui());
      mpz_class pNext = a * p.back() + pPrev;
      mpz_class qNext = a * q.back() + qPrev;
      pPrev = p.back();
      qPrev = q.back();
      p.push_back(pNext);
      q.push_back(qNext);
    }
  }
};

}  // namespace

TEST_CASE("convergents of an explicit list match the textbook recurrence") {
  // alpha = [2, 3, 4] = 13/30
  ContinuedFraction cf = ContinuedFraction::from_quotients(quotients({2, 3, 4}));
  CHECK(cf.max_depth() == 2);

  auto bounds = convergents(cf, 2);
  REQUIRE(bounds.size() == 2);
  REQUIRE(bounds[0].p.has_value());
  CHECK(*bounds[0].p == 1);
  CHECK(*bounds[0].q == 2);
  CHECK(*bounds[1].p == 3);
  CHECK(*bounds[1].q == 7);
  CHECK(bounds[1].logQ == doctest::Approx(std::log(7.0)).epsilon(1e-12));

  // |q_k alpha - p_k| sits inside the certified sandwich
  const double alpha = 13.0 / 30.0;
  for (const ConvergentBounds& b : bounds) {
    double err = std::abs(b.q->get_d() * alpha - b.p->get_d());
    CHECK(std::log(err) >= b.logLower - 1e-6);
    CHECK(std::log(err) <= b.logUpper + 1e-6);
  }

  // needs a_4, which the list cannot supply
  CHECK_THROWS_AS(convergents(cf, 3), precondition_error);
}

TEST_CASE("golden-ratio convergents are Fibonacci and obey the sandwich") {
  ContinuedFraction golden = ContinuedFraction::constant(1);
  auto bounds = convergents(golden, 20);
  REQUIRE(bounds.size() == 20);

  // q_k = F_{k+1}, p_k = F_k
  long f1 = 1, f2 = 1;
  for (const ConvergentBounds& b : bounds) {
    long f3 = f1 + f2;
    REQUIRE(b.p.has_value());
    CHECK(*b.p == f1);
    CHECK(*b.q == f2);
    f1 = f2;
    f2 = f3;
  }
  CHECK(*bounds[19].q == 10946);

  const double alpha = (std::sqrt(5.0) - 1.0) / 2.0;
  for (const ConvergentBounds& b : bounds) {
    double err = std::abs(b.q->get_d() * alpha - b.p->get_d());
    CHECK(std::log(err) >= b.logLower - 1e-6);
    CHECK(std::log(err) <= b.logUpper + 1e-6);
  }
}

TEST_CASE("factorial-power convergents match a direct big-integer oracle") {
  ContinuedFraction cf = ContinuedFraction::factorial_power(10);
  FactorialOracle oracle(10, 5);

  auto bounds = convergents(cf, 4);
  REQUIRE(bounds.size() == 4);
  for (int k = 1; k <= 4; ++k) {
    const ConvergentBounds& b = bounds[static_cast<std::size_t>(k - 1)];
    REQUIRE(b.q.has_value());
    CHECK(*b.q == oracle.q[static_cast<std::size_t>(k)]);
    CHECK(*b.p == oracle.p[static_cast<std::size_t>(k)]);
  }
  CHECK(*bounds[1].q == 1001);
  CHECK(*bounds[2].q == 1001000010);
  CHECK(*bounds[2].p == 100000001);
}

TEST_CASE("the factorial-power number is not flagged at depth 4") {
  ContinuedFraction cf = ContinuedFraction::factorial_power(10);
  LiouvilleVerdict v = exp_liouville_test(cf, 1.0, 4);
  CHECK(!v.flagged);

  // epsHat_k = log q_{k+1} / q_k against the direct oracle
  FactorialOracle oracle(10, 5);
  REQUIRE(v.epsSeq.size() == 4);
  for (int k = 1; k <= 4; ++k) {
    double want = log_mpz(oracle.q[static_cast<std::size_t>(k + 1)]) /
                  oracle.q[static_cast<std::size_t>(k)].get_d();
    CHECK(v.epsSeq[static_cast<std::size_t>(k - 1)] ==
          doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(v.epsSeq[0] == doctest::Approx(std::log(1001.0) / 10.0).epsilon(1e-12));
  CHECK(v.epsSeq[3] <= 1e-30);

  // every grid epsilon certifies a clean suffix; the strictest one from k=3
  REQUIRE(v.certifiedFrom.size() == 7);
  CHECK(v.certifiedFrom[0].first == doctest::Approx(1e-3));
  CHECK(v.certifiedFrom[0].second == 3);
  CHECK(v.certifiedFrom[6].first == doctest::Approx(1.0));
  CHECK(v.certifiedFrom[6].second == 1);
  CHECK(v.certifiedTail);
  CHECK(v.caveats.empty());
}

TEST_CASE("the doubly exponential rule is flagged with rate near log 2") {
  ContinuedFraction cf = ContinuedFraction::exp_rule(2, 2);
  CHECK(cf.max_depth() == 4);

  // q_1 = 2, q_2 = 9, q_3 = 4610, q_4 = 2^4610 * 4610 + 9
  auto bounds = convergents(cf, 3);
  CHECK(*bounds[0].q == 2);
  CHECK(*bounds[1].q == 9);
  CHECK(*bounds[2].q == 4610);

  mpz_class q4;
  mpz_ui_pow_ui(q4.get_mpz_t(), 2, 4610);
  q4 = q4 * 4610 + 9;
  double logQ4 = log_mpz(q4);

  LiouvilleVerdict d3 = exp_liouville_test(cf, 1.0, 3);
  CHECK(d3.flagged);
  CHECK(d3.epsHat >= 0.69);
  CHECK(d3.epsHat == doctest::Approx(logQ4 / 4610.0).epsilon(1e-9));

  LiouvilleVerdict d4 = exp_liouville_test(cf, 1.0, 4);
  CHECK(d4.flagged);
  CHECK(d4.epsHat >= 0.69);
  // epsHat_4 = log(q_5)/q_4 with log q_5 ~ q_4 log 2, i.e. the planted rate
  CHECK(d4.epsSeq[3] == doctest::Approx(std::log(2.0)).epsilon(1e-3));
  REQUIRE(!d4.caveats.empty());
  CHECK(d4.caveats[0].find("log-log") != std::string::npos);

  // depth 5 needs a_6 = 2^{q_5}, beyond every representation
  CHECK_THROWS_AS(exp_liouville_test(cf, 1.0, 5), precondition_error);
}

TEST_CASE("the golden ratio is not flagged at depth 20 but is at 19") {
  ContinuedFraction golden = ContinuedFraction::constant(1);

  LiouvilleVerdict v20 = exp_liouville_test(golden, 1.0, 20);
  CHECK(!v20.flagged);
  CHECK(v20.epsHat == doctest::Approx(std::log(17711.0) / 10946.0).epsilon(1e-12));
  // the strictest grid epsilon only certifies the last depth
  CHECK(v20.certifiedFrom[0].second == 20);
  CHECK(v20.certifiedTail);

  // one depth earlier the tail minimum still sits above the threshold
  LiouvilleVerdict v19 = exp_liouville_test(golden, 1.0, 19);
  CHECK(v19.flagged);
  CHECK(v19.epsHat == doctest::Approx(std::log(10946.0) / 6765.0).epsilon(1e-12));
}

TEST_CASE("larger sigma weakens the denominator power and the flag") {
  // at sigma = 2 the rate scale is q^(1/2), so even the doubly exponential
  // rule's tail rate log(q_5)/sqrt(q_4) ~ log(2) sqrt(q_4) explodes upward
  ContinuedFraction cf = ContinuedFraction::exp_rule(2, 2);
  LiouvilleVerdict v = exp_liouville_test(cf, 2.0, 4);
  CHECK(v.flagged);
  CHECK(v.epsHat > 1.0);

  // the factorial number stays unflagged at sigma = 2 and depth 4
  LiouvilleVerdict f = exp_liouville_test(ContinuedFraction::factorial_power(10),
                                          2.0, 4);
  CHECK(!f.flagged);
}

TEST_CASE("vector sufficiency certifies through the first clean coordinate") {
  std::vector<ContinuedFraction> coords;
  coords.push_back(ContinuedFraction::constant(1));
  coords.push_back(ContinuedFraction::factorial_power(10));

  VectorVerdict v = vector_coordinate_test(coords, 1.0, 20);
  CHECK(v.certified);
  CHECK(v.coordinate == 1);
  REQUIRE(v.perCoordinate.size() == 2);
  CHECK(!v.perCoordinate[0].flagged);
  CHECK(!v.perCoordinate[1].flagged);

  // a vector of flagged coordinates certifies nothing
  std::vector<ContinuedFraction> bad;
  bad.push_back(ContinuedFraction::exp_rule(2, 2));
  bad.push_back(ContinuedFraction::constant(1));
  VectorVerdict w = vector_coordinate_test(bad, 1.0, 4);
  CHECK(!w.certified);
  CHECK(w.perCoordinate[0].flagged);
  CHECK(w.perCoordinate[1].flagged);  // golden is flagged at shallow depth
}

TEST_CASE("construction and evaluation preconditions are enforced") {
  CHECK_THROWS_AS(ContinuedFraction::from_quotients({}), precondition_error);
  CHECK_THROWS_AS(ContinuedFraction::from_quotients(quotients({3, 0})),
                  precondition_error);
  CHECK_THROWS_AS(ContinuedFraction::from_quotients(quotients({-2})),
                  precondition_error);
  CHECK_THROWS_AS(ContinuedFraction::factorial_power(1), precondition_error);
  CHECK_THROWS_AS(ContinuedFraction::exp_rule(1, 1), precondition_error);
  CHECK_THROWS_AS(ContinuedFraction::exp_rule(2, 0), precondition_error);
  CHECK_THROWS_AS(ContinuedFraction::constant(0), precondition_error);

  ContinuedFraction golden = ContinuedFraction::constant(1);
  CHECK_THROWS_AS(convergents(golden, 0), precondition_error);
  CHECK_THROWS_AS(exp_liouville_test(golden, 0.5, 4), precondition_error);
  CHECK_THROWS_AS(exp_liouville_test(golden, 1.0, 0), precondition_error);
  CHECK_THROWS_AS(vector_coordinate_test({}, 1.0, 4), precondition_error);
}

TEST_CASE("exact denominators degrade gracefully past the bit budget") {
  // a_9 = 10^{9!} needs ~1.2e6 bits, past the budget, so q_9 onward is
  // carried in log space while earlier convergents stay exact
  ContinuedFraction cf = ContinuedFraction::factorial_power(10);
  auto bounds = convergents(cf, 9);
  CHECK(bounds[7].q.has_value());
  CHECK(!bounds[8].q.has_value());
  CHECK(std::isfinite(bounds[8].logQ));
  CHECK(bounds[8].logQ > bounds[7].logQ);
  // the log value still matches the exact recurrence
  FactorialOracle oracle(10, 9);
  CHECK(bounds[8].logQ ==
        doctest::Approx(log_mpz(oracle.q[9])).epsilon(1e-9));
}

TEST_CASE("descriptions name the generating rule") {
  CHECK(ContinuedFraction::constant(1).describe() == "constant(1)");
  CHECK(ContinuedFraction::factorial_power(10).describe() ==
        "factorial-power(base=10)");
  CHECK(ContinuedFraction::exp_rule(2, 2).describe() ==
        "exp-rule(base=2, a1=2)");
  CHECK(ContinuedFraction::from_quotients(quotients({1, 2, 3})).describe() ==
        "quotients[3]");
}
