#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "polyheat/brownian.hpp"
#include "polyheat/closed_form.hpp"
#include "polyheat/spec_json.hpp"

using namespace polyheat;
using Catch::Approx;

TEST_CASE("random streams are reproducible and well distributed") {
  Stream a(42), b(42), c(43);
  for (int i = 0; i < 16; ++i) {
    double x = a.uniform();
    REQUIRE(x == b.uniform());
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  REQUIRE(a.uniform() != c.uniform());

  // substreams decorrelate under the same seed
  Stream s0(7, 0), s1(7, 1);
  REQUIRE(s0.uniform() != s1.uniform());

  Stream n(5);
  double mean = 0, var = 0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    double g = n.normal();
    mean += g;
    var += g * g;
  }
  mean /= N;
  var = var / N - mean * mean;
  REQUIRE(mean == Approx(0.0).margin(0.03));
  REQUIRE(var == Approx(1.0).margin(0.05));
}

TEST_CASE("paths land where started for tiny times") {
  Complex X = build_complex(builtin_complex("star3"));
  PointRef start = edge_point(1, 0.5);
  PointRef end = simulate_path(X, start, 1e-6, 1e-6, 11);
  REQUIRE(end.kind == PointRef::Kind::edge);
  double d = geodesic_distance(X, start, end, 0.01);
  REQUIRE(d < 0.05);
}

TEST_CASE("simulate_path validates steps") {
  Complex X = build_complex(builtin_complex("interval"));
  REQUIRE_THROWS_AS(simulate_path(X, edge_point(0, 0.5), 0.1, 0.5, 1),
                    StepError);
  REQUIRE_THROWS_AS(simulate_path(X, edge_point(0, 0.5), 1e-9, 1e-4, 1),
                    StepError);
}

TEST_CASE("monte carlo matches the interval closed form") {
  Complex X = build_complex(builtin_complex("interval"));
  PointRef p = edge_point(0, 0.3), q = edge_point(0, 0.6);
  double t = 0.1;
  McEstimate est = mc_kernel_estimate(X, p, q, t, 40000, 0.05, 321);
  double ref = interval_kernel(1, 0.3, 0.6, t);
  REQUIRE(est.samples == 40000);
  REQUIRE(est.hits > 0);
  REQUIRE(est.std_error > 0);
  REQUIRE(std::abs(est.value - ref) <= 4 * est.std_error + 0.01 * ref);
}

TEST_CASE("monte carlo matches the circle closed form") {
  Complex X = build_complex(builtin_complex("circle"));
  // arc positions 0.1 and 0.35: edge 1 starts at arc 0.25
  PointRef p = edge_point(0, 0.1), q = edge_point(1, 0.10);
  double t = 0.08;
  McEstimate est = mc_kernel_estimate(X, p, q, t, 40000, 0.05, 654);
  double ref = circle_kernel(0.1, 0.35, t);
  REQUIRE(std::abs(est.value - ref) <= 4 * est.std_error + 0.01 * ref);
}

TEST_CASE("monte carlo crosses the star center correctly") {
  Complex X = build_complex(builtin_complex("star3"));
  PointRef p = edge_point(0, 0.25), q = edge_point(1, 0.25);
  double t = 0.15;
  McEstimate est = mc_kernel_estimate(X, p, q, t, 60000, 0.05, 99);
  double ref = star_kernel(3, 0, 0.25, 1, 0.25, t);
  REQUIRE(std::abs(est.value - ref) <= 4 * est.std_error + 0.01 * ref);
}

TEST_CASE("estimates are deterministic and shard invariant") {
  Complex X = build_complex(builtin_complex("star3"));
  PointRef p = vertex_point(0), q = edge_point(2, 0.3);
  McEstimate a = mc_kernel_estimate(X, p, q, 0.05, 5000, 0.05, 2024);
  McEstimate b = mc_kernel_estimate(X, p, q, 0.05, 5000, 0.05, 2024);
  REQUIRE(a.value == b.value);
  REQUIRE(a.hits == b.hits);

  // sample i always draws from Stream(seed, i), so the thread count only
  // shards the loop
  setenv("POLYHEAT_THREADS", "4", 1);
  McEstimate c = mc_kernel_estimate(X, p, q, 0.05, 5000, 0.05, 2024);
  unsetenv("POLYHEAT_THREADS");
  REQUIRE(c.hits == a.hits);
  REQUIRE(c.value == a.value);

  McEstimate d = mc_kernel_estimate(X, p, q, 0.05, 5000, 0.05, 2025);
  REQUIRE(d.hits != a.hits);
}

TEST_CASE("monte carlo rejects bad configurations") {
  Complex star = build_complex(builtin_complex("star3"));
  Complex square = build_complex(builtin_complex("square"));
  PointRef p = edge_point(0, 0.2), q = edge_point(0, 0.8);
  REQUIRE_THROWS_AS(mc_kernel_estimate(square, p, q, 0.1, 2000, 0.05, 1),
                    RangeError);
  REQUIRE_THROWS_AS(mc_kernel_estimate(star, p, q, 0.1, 100, 0.05, 1),
                    RangeError);
  REQUIRE_THROWS_AS(mc_kernel_estimate(star, p, q, -0.1, 2000, 0.05, 1),
                    Error);
}
