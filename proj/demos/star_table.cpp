// Prints the heat kernel on the unit 3-star three ways: the image series,
// the spectral mesh kernel, and a Monte Carlo estimate.  The series is exact,
// so the other two columns show their discretization and sampling error.

#include <cstdio>
#include <iostream>

#include "polyheat/brownian.hpp"
#include "polyheat/closed_form.hpp"
#include "polyheat/csv.hpp"
#include "polyheat/discretize.hpp"
#include "polyheat/eigensolve.hpp"
#include "polyheat/heat.hpp"
#include "polyheat/spec_json.hpp"

using namespace polyheat;

int main() {
  Complex X = build_complex(builtin_complex("star3"));
  DiscreteOperator D = discretize(X, 1.0 / 100);
  SpectralDecomposition S = eigensolve(D, D.node_count());

  struct Probe {
    int leg_p;
    double x;  // distance from the center; leg -1 means the center itself
    int leg_q;
    double y;
  };
  const Probe probes[] = {
      {-1, 0.0, 0, 0.30}, {0, 0.25, 0, 0.75}, {0, 0.50, 1, 0.50},
      {1, 0.80, 2, 0.20},
  };
  const double times[] = {0.01, 0.05, 0.25};

  auto point_of = [&](int leg, double x) {
    return leg < 0 ? vertex_point(0) : edge_point(leg, x);
  };

  csv::Table t({"t", "p", "q", "series", "spectral", "mc", "mc_stderr"});
  for (double tv : times)
    for (const Probe& pr : probes) {
      int lp = pr.leg_p < 0 ? 0 : pr.leg_p;
      double series = star_kernel(3, lp, pr.x, pr.leg_q, pr.y, tv);
      PointRef p = point_of(pr.leg_p, pr.x);
      PointRef q = point_of(pr.leg_q, pr.y);
      KernelValue k = heat_kernel_eval(S, tv, p, q);
      McEstimate mc = mc_kernel_estimate(X, p, q, tv, 20000, 0.05, 42);
      char pbuf[32], qbuf[32];
      if (pr.leg_p < 0)
        std::snprintf(pbuf, sizeof pbuf, "center");
      else
        std::snprintf(pbuf, sizeof pbuf, "leg%d:%.2f", pr.leg_p, pr.x);
      std::snprintf(qbuf, sizeof qbuf, "leg%d:%.2f", pr.leg_q, pr.y);
      t.add_row({tv, std::string(pbuf), std::string(qbuf), series, k.value,
                 mc.value, mc.std_error});
    }
  t.write(std::cout);
  return 0;
}
