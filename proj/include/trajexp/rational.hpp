#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>

#include "trajexp/common.hpp"

namespace trajexp {

/// Exact arbitrary-precision rational. All semigroup lattice arithmetic and
/// the rational coefficient mode run on this type.
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);
inline double to_double(double x) { return x; }

/// Parses "p/q" or "p" (optionally signed). Throws InvalidInput on anything else.
Rational parse_rational(const std::string& s);

/// Canonical "p/q" (or "p" when the denominator is 1).
std::string fraction_string(const Rational& r);

/// Exact conversion of a finite double (doubles are dyadic rationals).
Rational exact_rational(double x);

/// Smallest integer >= r. The values seen here are small (index ratios).
long ceil_to_long(const Rational& r);

/// Per-scalar policy shared by the polynomial/tensor/engine templates.
/// Rational mode is exact; float mode trims with a relative threshold.
template <typename T>
struct scalar_mode;

template <>
struct scalar_mode<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";
  static Rational from_rational(const Rational& r) { return r; }
  static double to_dbl(const Rational& v) { return trajexp::to_double(v); }
  static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
  static bool negligible(const Rational& v, const Rational&) { return v == 0; }
};

template <>
struct scalar_mode<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static double from_rational(const Rational& r) { return trajexp::to_double(r); }
  static double to_dbl(double v) { return v; }
  static double abs(double v) { return std::abs(v); }
  static bool negligible(double v, double scale) {
    return std::abs(v) < 1e-14 * (scale > 0 ? scale : 1.0);
  }
};

}  // namespace trajexp
