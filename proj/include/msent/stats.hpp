#pragma once

#include <cmath>
#include <limits>

#include "msent/errors.hpp"

namespace msent {

namespace detail {

// Continued fraction for the regularized incomplete beta, evaluated with the
// modified Lentz method. Converges quickly for x < (a+1)/(a+b+2); the caller
// handles the symmetric tail.
inline double ibeta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 3e-14;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw numeric_error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double ibeta_reg(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw param_error("incomplete beta needs a > 0 and b > 0");
  if (std::isnan(x)) throw param_error("incomplete beta needs a finite x");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * detail::ibeta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::ibeta_continued_fraction(b, a, 1.0 - x) / b;
}

// Two-sided p-value of a t statistic with `dof` degrees of freedom.
inline double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw param_error("t distribution needs positive degrees of freedom");
  if (std::isinf(t)) return 0.0;
  return ibeta_reg(dof / 2.0, 0.5, dof / (dof + t * t));
}

// Survival function P(F' >= f) of the F distribution with (d1, d2) degrees
// of freedom.
inline double f_survival(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw param_error("F distribution needs positive degrees of freedom");
  if (std::isnan(f)) throw param_error("F statistic must not be NaN");
  if (f <= 0.0) return 1.0;
  return ibeta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

}  // namespace msent
