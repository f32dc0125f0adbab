#pragma once

#include <gmpxx.h>

#include <complex>
#include <optional>
#include <string>

#include "fhops/errors.hpp"

namespace fhops {

using Rational = mpq_class;

// Exact complex rational, used wherever a symbol value must be decided to be
// zero or compared without round-off.
struct CRational {
  Rational re{0};
  Rational im{0};

  CRational() = default;
  CRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  explicit CRational(long v) : re(v), im(0) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  Rational abs2() const { return re * re + im * im; }

  CRational operator+(const CRational& o) const { return {re + o.re, im + o.im}; }
  CRational operator-(const CRational& o) const { return {re - o.re, im - o.im}; }
  CRational operator*(const CRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  CRational operator*(const Rational& s) const { return {re * s, im * s}; }
  CRational& operator+=(const CRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

// Accepts "p/q", a plain integer, or a finite decimal such as "0.7" (decimals
// convert exactly, 0.7 -> 7/10). Throws precondition_error on anything else
// or on a zero denominator.
Rational parse_rational(const std::string& text);

// Renders canonical "p/q" (or just "p" when q == 1).
std::string rational_to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace fhops
