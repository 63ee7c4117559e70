#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wam/errors.hpp"

namespace wam {

namespace detail {

// Continued-fraction evaluation of the regularized incomplete beta
// function, modified Lentz scheme.
inline double ibeta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

/// Regularized incomplete beta function I_x(a, b).
inline double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(a, b, x) / a;
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        b * std::log1p(-x) + a * std::log(x)) *
                   ibeta_cf(b, a, 1.0 - x) / b;
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

/// Pearson correlation coefficient. Throws NumericError when either input
/// is constant (zero variance).
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw NumericError("pearson: series length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw NumericError("pearson: need at least 3 samples");
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw NumericError("pearson: degenerate correlation (constant input)");
  double r = sxy / std::sqrt(sxx * syy);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

/// Two-sided p-value of a Pearson correlation: t = r*sqrt((n-2)/(1-r^2))
/// against a Student-t distribution with n-2 degrees of freedom.
inline double pearson_pvalue(double r, std::size_t n) {
  if (n < 3) throw NumericError("pearson_pvalue: need n >= 3");
  const double ar = std::fabs(r);
  if (ar >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t2 = r * r * dof / (1.0 - r * r);
  // two-sided p = I_{dof/(dof+t^2)}(dof/2, 1/2)
  return detail::ibeta(dof / 2.0, 0.5, dof / (dof + t2));
}

// Per-pixel target transform: z = (value - mean) / sd with the sample
// (n-1) standard deviation.
struct Standardizer {
  double mean = 0.0;
  double sd = 1.0;

  double standardize(double v) const { return (v - mean) / sd; }
  double destandardize(double z) const { return z * sd + mean; }
};

/// Fit a Standardizer to a series. Requires >= 2 values and nonzero spread.
inline Standardizer fit_standardizer(std::span<const double> values) {
  if (values.size() < 2)
    throw NumericError("fit_standardizer: need at least 2 values");
  const double m = detail::mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  if (sd == 0.0) throw NumericError("fit_standardizer: zero spread");
  return {m, sd};
}

/// Standardize a series in one go; returns the z-scores and the transform.
inline std::pair<std::vector<double>, Standardizer> standardize(
    std::span<const double> values) {
  const Standardizer s = fit_standardizer(values);
  std::vector<double> z(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) z[i] = s.standardize(values[i]);
  return {std::move(z), s};
}

}  // namespace wam
