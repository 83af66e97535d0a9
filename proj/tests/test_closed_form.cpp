#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "polyheat/closed_form.hpp"

using namespace polyheat;
using Catch::Approx;

namespace {

double gauss(double d, double t) {
  return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
}

// Reference image sums with a wide fixed truncation; every test time is
// large enough that the dropped images are below 1e-300.
double interval_images(double L, double x, double y, double t) {
  double k = 0;
  for (int m = -80; m <= 80; ++m)
    k += gauss(x - y - 2 * L * m, t) + gauss(x + y - 2 * L * m, t);
  return k;
}

double circle_images(double x, double y, double t) {
  double k = 0;
  for (int m = -80; m <= 80; ++m) k += gauss(x - y - m, t);
  return k;
}

}  // namespace

TEST_CASE("line kernel is the Gaussian") {
  REQUIRE(line_kernel(1, 0.0, 0.25) == Approx(gauss(0, 0.25)).epsilon(1e-14));
  REQUIRE(line_kernel(1, 0.7, 0.03) == Approx(gauss(0.7, 0.03)).epsilon(1e-14));
  // product form in higher dimension
  std::vector<double> x{0.1, 0.4}, y{0.3, 0.9};
  double expect = gauss(0.2, 0.05) * gauss(0.5, 0.05);
  REQUIRE(line_kernel(2, x, y, 0.05) == Approx(expect).epsilon(1e-13));
}

TEST_CASE("interval kernel against the image sum") {
  for (double t : {0.005, 0.02, 0.1, 0.5, 1.0}) {
    REQUIRE(interval_kernel(1, 0.3, 0.7, t) ==
            Approx(interval_images(1, 0.3, 0.7, t)).epsilon(1e-12));
    REQUIRE(interval_kernel(1, 0.0, 0.0, t) ==
            Approx(interval_images(1, 0.0, 0.0, t)).epsilon(1e-12));
    REQUIRE(interval_kernel(3, 1.0, 2.0, t) ==
            Approx(interval_images(3, 1.0, 2.0, t)).epsilon(1e-12));
  }
}

TEST_CASE("interval kernel conserves mass and is symmetric") {
  double t = 0.07, x = 0.31;
  int n = 4000;
  double mass = 0;
  for (int i = 0; i <= n; ++i) {
    double y = static_cast<double>(i) / n;
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    mass += w * interval_kernel(1, x, y, t) / n;
  }
  REQUIRE(mass == Approx(1.0).epsilon(1e-6));
  REQUIRE(interval_kernel(1, 0.2, 0.9, t) ==
          Approx(interval_kernel(1, 0.9, 0.2, t)).epsilon(1e-14));
}

TEST_CASE("circle kernel against the wrapped Gaussian") {
  for (double t : {0.01, 0.1, 0.6}) {
    REQUIRE(circle_kernel(0.1, 0.8, t) ==
            Approx(circle_images(0.1, 0.8, t)).epsilon(1e-12));
    REQUIRE(circle_kernel(0.5, 0.5, t) ==
            Approx(circle_images(0.5, 0.5, t)).epsilon(1e-12));
  }
  // periodicity and the uniform long-time limit
  REQUIRE(circle_kernel(0.15, 0.4, 0.2) ==
          Approx(circle_kernel(1.15, 0.4, 0.2)).epsilon(1e-12));
  REQUIRE(circle_kernel(0.3, 0.9, 40.0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one- and two-leg stars reduce to intervals") {
  // a single leg is the unit interval with the center at 0
  for (double t : {0.02, 0.2})
    REQUIRE(star_kernel(1, 0, 0.25, 0, 0.8, t) ==
            Approx(interval_images(1, 0.25, 0.8, t)).epsilon(1e-11));
  // two legs make the interval [-1, 1]; offsets count from the center
  for (double t : {0.02, 0.2}) {
    REQUIRE(star_kernel(2, 0, 0.3, 0, 0.6, t) ==
            Approx(interval_images(2, 1 - 0.3, 1 - 0.6, t)).epsilon(1e-11));
    REQUIRE(star_kernel(2, 0, 0.3, 1, 0.6, t) ==
            Approx(interval_images(2, 1 - 0.3, 1 + 0.6, t)).epsilon(1e-11));
  }
}

TEST_CASE("star kernel symmetry and mass") {
  double t = 0.09;
  REQUIRE(star_kernel(3, 0, 0.2, 1, 0.7, t) ==
          Approx(star_kernel(3, 1, 0.7, 0, 0.2, t)).epsilon(1e-13));
  REQUIRE(star_kernel(3, 1, 0.4, 2, 0.4, t) ==
          Approx(star_kernel(3, 2, 0.4, 1, 0.4, t)).epsilon(1e-13));

  // integrate k(p, .) over all three legs
  int n = 2000;
  double mass = 0;
  for (int leg = 0; leg < 3; ++leg)
    for (int i = 0; i <= n; ++i) {
      double y = static_cast<double>(i) / n;
      double w = (i == 0 || i == n) ? 0.5 : 1.0;
      mass += w * star_kernel(3, 0, 0.35, leg, y, t) / n;
    }
  REQUIRE(mass == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("star kernel long-time limit is uniform") {
  for (int legs : {3, 5}) {
    double uniform = 1.0 / legs;
    REQUIRE(star_kernel(legs, 0, 0.5, 1, 0.3, 60.0) ==
            Approx(uniform).epsilon(1e-10));
  }
}

TEST_CASE("star kernel small-time diagonal constants") {
  double t = 1e-4;
  double root = std::sqrt(M_PI * t);
  for (int n : {3, 4, 7}) {
    REQUIRE(star_kernel(n, 0, 0.0, 0, 0.0, t) * n * root ==
            Approx(1.0).epsilon(1e-8));
    REQUIRE(star_kernel(n, 0, 1.0, 0, 1.0, t) * root ==
            Approx(1.0).epsilon(1e-8));
    REQUIRE(star_kernel(n, 0, 0.5, 0, 0.5, t) * 2.0 * root ==
            Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("star kernel reports a usable tail bound") {
  double tail = -1;
  double v = star_kernel(3, 0, 0.3, 1, 0.5, 0.05, &tail);
  REQUIRE(v > 0);
  REQUIRE(tail >= 0);
  REQUIRE(tail < 1e-9 * v + 1e-300);
}

TEST_CASE("two-star bridge entries against the three-interval") {
  for (double t : {0.01, 0.05, 0.3, 1.0}) {
    REQUIRE(two_star_kernel(1, 1, TwoStarEntry::v1v2, t) ==
            Approx(interval_images(3, 1.0, 2.0, t)).epsilon(1e-11));
    REQUIRE(two_star_kernel(1, 1, TwoStarEntry::v1v1, t) ==
            Approx(interval_images(3, 1.0, 1.0, t)).epsilon(1e-11));
  }
}

TEST_CASE("two-star symmetry and long-time limit") {
  for (double t : {0.05, 0.4})
    REQUIRE(two_star_kernel(2, 3, TwoStarEntry::v1v2, t) ==
            Approx(two_star_kernel(3, 2, TwoStarEntry::v1v2, t)).epsilon(1e-12));
  // total measure m + n + 1
  REQUIRE(two_star_kernel(2, 3, TwoStarEntry::v1v2, 80.0) ==
          Approx(1.0 / 6.0).epsilon(1e-9));
  REQUIRE(two_star_kernel(1, 1, TwoStarEntry::v1v1, 80.0) ==
          Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("closed forms reject bad arguments") {
  REQUIRE_THROWS_AS(star_kernel(3, 0, 0.5, 1, 0.5, 0.0), RangeError);
  REQUIRE_THROWS_AS(star_kernel(0, 0, 0.5, 0, 0.5, 0.1), RangeError);
  REQUIRE_THROWS_AS(star_kernel(3, 3, 0.5, 0, 0.5, 0.1), RangeError);
  REQUIRE_THROWS_AS(star_kernel(3, 0, 1.5, 0, 0.5, 0.1), RangeError);
  REQUIRE_THROWS_AS(interval_kernel(1, -0.1, 0.5, 0.1), RangeError);
  REQUIRE_THROWS_AS(two_star_kernel(-1, 1, TwoStarEntry::v1v2, 0.1), RangeError);
  REQUIRE_THROWS_AS(circle_kernel(0.1, 0.2, -0.5), RangeError);
}
