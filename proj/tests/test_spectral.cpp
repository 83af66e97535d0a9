#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "polyheat/closed_form.hpp"
#include "polyheat/discretize.hpp"
#include "polyheat/eigensolve.hpp"
#include "polyheat/heat.hpp"
#include "polyheat/spec_json.hpp"

using namespace polyheat;
using Catch::Approx;

namespace {
const double pi = 3.14159265358979323846;
}

TEST_CASE("interval eigenvalues are (k pi)^2 to roundoff") {
  Complex X = build_complex(builtin_complex("interval"));
  DiscreteOperator D = discretize(X, 0.01);
  SpectralDecomposition S = eigensolve(D, 10);
  REQUIRE(S.eigenvalues.size() == 10);
  REQUIRE(S.eigenvalues[0] == Approx(0.0).margin(1e-9));
  for (int k = 1; k < 10; ++k)
    REQUIRE(S.eigenvalues[k] == Approx(k * k * pi * pi).epsilon(1e-10));
}

TEST_CASE("star eigenvalues alternate branch and symmetric modes") {
  // cos modes matched at the center: a double eigenvalue at ((2j+1) pi/2)^2
  // from functions vanishing there, a simple one at (j pi)^2 from the
  // symmetric continuation
  Complex X = build_complex(builtin_complex("star3"));
  DiscreteOperator D = discretize(X, 0.01);
  SpectralDecomposition S = eigensolve(D, 8);
  std::vector<double> expect = {0.0,
                                pi * pi / 4,
                                pi * pi / 4,
                                pi * pi,
                                9 * pi * pi / 4,
                                9 * pi * pi / 4,
                                4 * pi * pi,
                                25 * pi * pi / 4};
  for (size_t k = 0; k < expect.size(); ++k)
    REQUIRE(S.eigenvalues[k] == Approx(expect[k]).margin(1e-8).epsilon(1e-10));
}

TEST_CASE("eigenvectors come back mass orthonormal") {
  Complex X = build_complex(builtin_complex("star3"));
  DiscreteOperator D = discretize(X, 0.02);
  SpectralDecomposition S = eigensolve(D, 12);
  REQUIRE(S.max_residual < 1e-8);
  for (int a = 0; a < 12; ++a)
    for (int b = a; b < 12; ++b) {
      double dot = (S.vectors.col(a).cwiseProduct(D.mass))
                       .dot(S.vectors.col(b));
      REQUIRE(dot == Approx(a == b ? 1.0 : 0.0).margin(1e-9));
    }
}

TEST_CASE("iterative and dense paths agree") {
  Complex X = build_complex(builtin_complex("star3"));
  DiscreteOperator D = discretize(X, 0.01);
  SpectralDecomposition dense = eigensolve(D, 6);
  SpectralDecomposition lanczos = eigensolve(D, 6, 50);
  for (int k = 0; k < 6; ++k)
    REQUIRE(lanczos.eigenvalues[k] ==
            Approx(dense.eigenvalues[k]).margin(1e-7).epsilon(1e-9));
}

TEST_CASE("heat kernel on the interval matches the image series") {
  Complex X = build_complex(builtin_complex("interval"));
  DiscreteOperator D = discretize(X, 0.01);
  SpectralDecomposition S = eigensolve(D, D.node_count());
  struct Case {
    double x, y, t;
  };
  for (Case c : {Case{0.30, 0.30, 1e-3}, Case{0.30, 0.70, 5e-3},
                 Case{0.00, 0.50, 2e-2}, Case{0.25, 0.26, 1e-3},
                 Case{0.50, 0.50, 0.5}}) {
    double ref = interval_kernel(1, c.x, c.y, c.t);
    KernelValue kv = heat_kernel_eval(S, c.t, edge_point(0, c.x),
                                      edge_point(0, c.y));
    INFO("x=" << c.x << " y=" << c.y << " t=" << c.t);
    REQUIRE(kv.value == Approx(ref).epsilon(1e-6).margin(1e-12));
  }
}

TEST_CASE("snap distances and truncation bounds are reported honestly") {
  Complex X = build_complex(builtin_complex("interval"));
  DiscreteOperator D = discretize(X, 0.01);
  SpectralDecomposition full = eigensolve(D, D.node_count());
  SpectralDecomposition low = eigensolve(D, 8);

  KernelValue kv = heat_kernel_eval(full, 0.01, edge_point(0, 0.2503),
                                    edge_point(0, 0.75));
  REQUIRE(kv.snap_p == Approx(0.0003).margin(1e-12));
  REQUIRE(kv.snap_q == Approx(0.0).margin(1e-12));

  KernelValue a = heat_kernel_eval(low, 0.05, edge_point(0, 0.3),
                                   edge_point(0, 0.4));
  KernelValue b = heat_kernel_eval(full, 0.05, edge_point(0, 0.3),
                                   edge_point(0, 0.4));
  REQUIRE(std::abs(a.value - b.value) <= a.tail_bound + 1e-12);
}

TEST_CASE("heat trace against Poisson summation") {
  Complex X = build_complex(builtin_complex("interval"));
  DiscreteOperator D = discretize(X, 0.01);
  SpectralDecomposition S = eigensolve(D, D.node_count());
  double t = 1e-3;
  double theta = 1.0 + 2 * std::exp(-1.0 / t) + 2 * std::exp(-4.0 / t);
  double ref = 0.5 + theta / (2.0 * std::sqrt(pi * t));
  TraceValue tr = heat_trace(S, t);
  REQUIRE(tr.value == Approx(ref).epsilon(1e-9));
  REQUIRE(tr.tail_bound >= 0);
  // long-time limit: only the constant mode survives
  REQUIRE(heat_trace(S, 100.0).value == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("diagonal exponent fit sees dimension one") {
  Complex X = build_complex(builtin_complex("interval"));
  DiscreteOperator D = discretize(X, 0.01);
  SpectralDecomposition S = eigensolve(D, D.node_count());
  ExponentFit fit = diagonal_exponent_fit(S, edge_point(0, 0.37), 1e-3, 1e-2);
  REQUIRE(fit.samples == 13);
  REQUIRE(fit.slope == Approx(-0.5).margin(0.03));
}

TEST_CASE("fit windows outside the trusted range are rejected") {
  Complex X = build_complex(builtin_complex("interval"));
  DiscreteOperator D = discretize(X, 0.01);
  SpectralDecomposition S = eigensolve(D, D.node_count());
  REQUIRE_THROWS_AS(
      diagonal_exponent_fit(S, edge_point(0, 0.37), 1e-5, 1e-2), WindowError);
  REQUIRE_THROWS_AS(
      diagonal_exponent_fit(S, edge_point(0, 0.37), 1e-3, 10.0), WindowError);
}

TEST_CASE("node-removal restriction gives the Dirichlet spectrum") {
  Complex X = build_complex(builtin_complex("interval"));
  DiscreteOperator D = discretize(X, 0.005);
  std::vector<char> keep(D.node_count(), 0);
  for (int i = 0; i < D.node_count(); ++i) {
    const PointRef& p = D.nodes[i];
    if (p.kind == PointRef::Kind::edge && p.s > 0.25 + 1e-9 &&
        p.s < 0.75 - 1e-9)
      keep[i] = 1;
  }
  DiscreteOperator W = dirichlet_subdomain(D, keep);
  REQUIRE(W.dirichlet);
  SpectralDecomposition S = eigensolve(W, 3);
  for (int k = 1; k <= 3; ++k)
    REQUIRE(S.eigenvalues[k - 1] ==
            Approx(k * k * pi * pi / 0.25).epsilon(1e-9));
}

TEST_CASE("square eigenvalues match the Neumann product spectrum") {
  Complex X = build_complex(builtin_complex("square"));
  DiscreteOperator D = discretize(X, 1.0 / 24);
  SpectralDecomposition S = eigensolve(D, 6);
  // lambda = pi^2 (a^2 + b^2); the 5-point stencil is second order, no
  // dispersion inversion applies in dimension two
  std::vector<double> expect = {0, pi * pi, pi * pi, 2 * pi * pi,
                                4 * pi * pi, 4 * pi * pi};
  for (size_t k = 0; k < expect.size(); ++k)
    REQUIRE(S.eigenvalues[k] ==
            Approx(expect[k]).margin(1e-9).epsilon(4e-3));
}

TEST_CASE("spectral layer rejects bad arguments") {
  Complex X = build_complex(builtin_complex("interval"));
  REQUIRE_THROWS_AS(discretize(X, 0.0), RangeError);
  REQUIRE_THROWS_AS(discretize(X, -1.0), RangeError);
  DiscreteOperator D = discretize(X, 0.05);
  REQUIRE_THROWS_AS(eigensolve(D, 0), RangeError);
  REQUIRE_THROWS_AS(eigensolve(D, D.node_count() + 1), RangeError);
  SpectralDecomposition S = eigensolve(D, 4);
  REQUIRE_THROWS_AS(heat_kernel_eval(S, 0.0, edge_point(0, 0.1),
                                     edge_point(0, 0.2)),
                    RangeError);
  REQUIRE_THROWS_AS(heat_trace(S, -1.0), RangeError);
}
