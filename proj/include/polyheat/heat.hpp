#pragma once

// Heat kernel evaluation from a spectral decomposition: pointwise values,
// traces, and the small-time diagonal exponent fit.

#include <algorithm>
#include <cmath>
#include <vector>

#include "polyheat/eigensolve.hpp"
#include "polyheat/metric.hpp"

namespace polyheat {

struct KernelValue {
  double value = 0;
  double tail_bound = 0;  // bound on the truncated eigenpairs' contribution
  bool truncation_warning = false;
  double snap_p = 0;  // distance from p to the node it snapped to
  double snap_q = 0;
};

struct TraceValue {
  double value = 0;
  double tail_bound = 0;
  bool truncation_warning = false;
};

inline KernelValue heat_kernel_eval(const SpectralDecomposition& S, double t,
                                    PointRef p, PointRef q, double tol = 1e-9) {
  if (!(t > 0)) throw RangeError("time must be positive");
  const DiscreteOperator& D = *S.op;
  KernelValue out;
  int np = D.nearest_node(p, &out.snap_p);
  int nq = D.nearest_node(q, &out.snap_q);
  int count = static_cast<int>(S.eigenvalues.size());
  double acc = 0;
  for (int i = 0; i < count; ++i)
    acc += std::exp(-S.eigenvalues[i] * t) * S.vectors(np, i) * S.vectors(nq, i);
  out.value = acc;
  if (count < S.total_nodes) {
    // mass-orthonormality bounds |phi_i(x)| by 1/sqrt(m_x)
    double lam = S.eigenvalues.back();
    out.tail_bound = (S.total_nodes - count) * std::exp(-lam * t) /
                     std::sqrt(D.mass[np] * D.mass[nq]);
    out.truncation_warning = out.tail_bound > tol;
  }
  return out;
}

inline TraceValue heat_trace(const SpectralDecomposition& S, double t,
                             double tol = 1e-9) {
  if (!(t > 0)) throw RangeError("time must be positive");
  TraceValue out;
  for (double l : S.eigenvalues) out.value += std::exp(-l * t);
  int count = static_cast<int>(S.eigenvalues.size());
  if (count < S.total_nodes) {
    out.tail_bound =
        (S.total_nodes - count) * std::exp(-S.eigenvalues.back() * t);
    out.truncation_warning = out.tail_bound > tol;
  }
  return out;
}

struct ExponentFit {
  double slope = 0;
  double intercept = 0;  // log h_t at log t = 0 under the fitted line
  int samples = 0;
};

// Least-squares slope of log h_t(p,p) against log t over a log-spaced window.
// The window must sit above the mesh resolution scale and below the scale
// where the complex stops looking locally Euclidean.
inline ExponentFit diagonal_exponent_fit(const SpectralDecomposition& S,
                                         PointRef p, double t_lo, double t_hi,
                                         int samples = 13) {
  if (samples < 2) throw RangeError("exponent fit needs at least 2 samples");
  if (!(t_lo > 0) || !(t_hi > t_lo)) throw WindowError("empty time window");
  const Complex& X = *S.op->X;
  auto g = geometry_constants(X);
  double diam = complex_diameter(X, std::max(g.ell / 8, S.h));
  double lo_limit = 4.0 * S.h * S.h;
  double hi_limit = std::max(g.R0 * g.R0, diam * diam / 16.0);
  if (t_lo < lo_limit * (1 - 1e-9))
    throw WindowError("window start below 4 h^2; discretization error "
                      "dominates there");
  if (t_hi > hi_limit * (1 + 1e-9))
    throw WindowError("window end beyond the locally Euclidean regime");
  ExponentFit fit;
  fit.samples = samples;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    double t = t_lo * std::pow(t_hi / t_lo,
                               samples == 1 ? 0.0
                                            : static_cast<double>(i) /
                                                  (samples - 1));
    double x = std::log(t);
    double y = std::log(heat_kernel_eval(S, t, p, p).value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / samples;
  return fit;
}

}  // namespace polyheat
