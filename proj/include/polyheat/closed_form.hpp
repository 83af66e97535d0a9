#pragma once

// Series heat kernels for the worked examples: the line, the circle, the
// Neumann interval, the n-legged star, and the two-star graph.  These are the
// oracles the numerical modules are tested against.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "polyheat/errors.hpp"

namespace polyheat {

namespace series {

constexpr double pi = 3.14159265358979323846;

// Periodized Gaussian sum_k exp(-(d-kP)^2/4t)/sqrt(4 pi t).  Below
// s = 2t/P^2 = 1/(2 pi) the image sum needs the fewest terms; above it the
// Fourier dual converges faster, and both stay under 25 terms for 1e-12
// tails.  `tail` accumulates a bound on the truncated remainder.
inline double images_sum(double d, double P, double t, double* tail = nullptr) {
  double s = 2.0 * t / (P * P);
  if (s <= 1.0 / (2.0 * pi)) {
    double pref = 1.0 / std::sqrt(4.0 * pi * t);
    double acc = 0;
    long long k0 = std::llround(d / P);
    for (int dir = 0; dir < 2; ++dir) {
      for (long long j = dir; ; ++j) {
        long long k = dir == 0 ? k0 + j : k0 - j;
        double u = d - static_cast<double>(k) * P;
        double term = std::exp(-u * u / (4.0 * t));
        acc += term;
        if (term < 1e-18 * (acc + 1e-300) && j > 1) {
          if (tail) *tail += 2 * pref * term;
          break;
        }
      }
    }
    return pref * acc;
  }
  double acc = 1.0;
  for (int k = 1;; ++k) {
    double damp = std::exp(-2.0 * pi * pi * k * k * s);
    acc += 2.0 * damp * std::cos(2.0 * pi * k * d / P);
    if (damp < 1e-18) {
      if (tail) *tail += 4 * damp / P;
      break;
    }
  }
  return acc / P;
}

}  // namespace series

struct ThetaPair {
  double lhs = 0;
  double rhs = 0;
};

// Both sides of sum_k e^{-(x-k)^2/(2s)} = sqrt(2 pi s) sum_k e^{-2 pi^2 k^2 s}
// cos(2 pi k x), each truncated once increments drop below tol.
inline ThetaPair theta_identity(double x, double s, double tol) {
  if (!(s > 0)) throw RangeError("theta parameter s must be positive");
  ThetaPair out;
  long long k0 = std::llround(x);
  for (int dir = 0; dir < 2; ++dir)
    for (long long j = dir;; ++j) {
      long long k = dir == 0 ? k0 + j : k0 - j;
      double u = x - static_cast<double>(k);
      double term = std::exp(-u * u / (2.0 * s));
      out.lhs += term;
      if (term < tol * 1e-3 && j > 1) break;
    }
  double pref = std::sqrt(2.0 * series::pi * s);
  out.rhs = 1.0;
  for (int k = 1;; ++k) {
    double damp = std::exp(-2.0 * series::pi * series::pi * k * k * s);
    out.rhs += 2.0 * damp * std::cos(2.0 * series::pi * k * x);
    if (damp < tol * 1e-3) break;
  }
  out.rhs *= pref;
  return out;
}

inline double line_kernel(int n, double dist, double t) {
  if (!(t > 0)) throw RangeError("time must be positive");
  if (n < 1) throw RangeError("dimension must be >= 1");
  return std::exp(-dist * dist / (4.0 * t)) /
         std::pow(4.0 * series::pi * t, n / 2.0);
}

inline double line_kernel(int n, const std::vector<double>& x,
                          const std::vector<double>& y, double t) {
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw RangeError("line kernel points must have n coordinates");
  double d2 = 0;
  for (int i = 0; i < n; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  return line_kernel(n, std::sqrt(d2), t);
}

// Circle of unit circumference (wrapped Gaussian).
inline double circle_kernel(double x, double y, double t,
                            double* tail = nullptr) {
  if (!(t > 0)) throw RangeError("time must be positive");
  return series::images_sum(x - y, 1.0, t, tail);
}

// Neumann interval [0, L] by the method of images.
inline double interval_kernel(double L, double x, double y, double t,
                              double* tail = nullptr) {
  if (!(t > 0)) throw RangeError("time must be positive");
  if (!(L > 0) || x < -1e-12 || x > L + 1e-12 || y < -1e-12 || y > L + 1e-12)
    throw RangeError("interval kernel needs 0 <= x,y <= L");
  return series::images_sum(x - y, 2.0 * L, t, tail) +
         series::images_sum(x + y, 2.0 * L, t, tail);
}

// Star with n unit legs; points are (leg index, offset from the center).
// Assembled from three image series; the odd-sector coefficient is
// c = 2(1 - 1/n) on the same leg and c = -2/n across legs.
inline double star_kernel(int n, int leg_i, double x, int leg_j, double y,
                          double t, double* tail = nullptr) {
  if (n < 1) throw RangeError("star needs at least one leg");
  if (leg_i < 0 || leg_i >= n || leg_j < 0 || leg_j >= n)
    throw RangeError("leg index out of range");
  if (x < -1e-12 || x > 1 + 1e-12 || y < -1e-12 || y > 1 + 1e-12)
    throw RangeError("star offsets lie in [0, 1]");
  if (!(t > 0)) throw RangeError("time must be positive");
  double c = leg_i == leg_j ? 2.0 * (1.0 - 1.0 / n) : -2.0 / n;
  double s1 = (series::images_sum(x - y, 2.0, t, tail) +
               series::images_sum(x + y, 2.0, t, tail)) /
              n;
  double s2 = c * (series::images_sum(x - y, 4.0, t, tail) -
                   series::images_sum(x + y, 4.0, t, tail));
  double s3 = 0.5 * c * (series::images_sum(x + y, 2.0, t, tail) -
                         series::images_sum(x - y, 2.0, t, tail));
  return s1 + s2 + s3;
}

enum class TwoStarEntry { v1v2, v1v1 };

// Two vertices joined by a unit edge, m extra unit legs at v1 and n at v2.
// The lowest positive frequency solves cos^2(sqrt(lambda)) =
// mn/((m+1)(n+1)); the displayed series telescope over integer shifts of it.
inline double two_star_kernel(int m, int n, TwoStarEntry which, double t) {
  if (m < 0 || n < 0) throw RangeError("leg counts must be >= 0");
  if (!(t > 0)) throw RangeError("time must be positive");
  double r = std::sqrt(static_cast<double>(m) * n /
                       (static_cast<double>(m + 1) * (n + 1)));
  double root = std::acos(r);  // sqrt(lambda_0)
  double pref = 1.0 / ((m + n + 1) * std::sqrt(series::pi * t));
  double acc = 0;
  if (which == TwoStarEntry::v1v2) {
    for (long long k = 0;; ++k) {
      double u = 2.0 * k + 1.0;
      double damp = std::exp(-u * u / (4.0 * t));
      acc += 2.0 * damp * (1.0 - r * std::cos(u * root));
      if (damp < 1e-18 && k > 0) break;
    }
    return pref * acc;
  }
  acc = 1.0 + static_cast<double>(m) / (n + 1);
  for (long long k = 1;; ++k) {
    double damp = std::exp(-static_cast<double>(k) * k / t);
    acc += 2.0 * damp *
           (1.0 + static_cast<double>(m) / (n + 1) * std::cos(2.0 * k * root));
    if (damp < 1e-18) break;
  }
  return pref * acc;
}

}  // namespace polyheat
