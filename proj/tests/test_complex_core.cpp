#include <catch_amalgamated.hpp>

#include "polyheat/complex.hpp"
#include "polyheat/metric.hpp"
#include "polyheat/spec_json.hpp"

using namespace polyheat;
using Catch::Approx;

TEST_CASE("builtin complexes build with the expected cells") {
  Complex star = build_complex(builtin_complex("star3"));
  REQUIRE(star.dimension == 1);
  REQUIRE(star.vertices.size() == 4);
  REQUIRE(star.edges.size() == 3);
  REQUIRE(star.total_measure() == Approx(3.0));

  Complex circle = build_complex(builtin_complex("circle"));
  REQUIRE(circle.vertices.size() == 4);
  REQUIRE(circle.edges.size() == 4);
  REQUIRE(circle.total_measure() == Approx(1.0));

  Complex square = build_complex(builtin_complex("square"));
  REQUIRE(square.dimension == 2);
  REQUIRE(square.faces.size() == 1);
  REQUIRE(square.total_measure() == Approx(1.0));

  Complex lshape = build_complex(builtin_complex("lshape"));
  REQUIRE(lshape.faces.size() == 3);
  REQUIRE(lshape.total_measure() == Approx(3.0));
}

TEST_CASE("two-star counts match its legs") {
  Complex X = build_complex(builtin_complex("twostar_2_3"));
  // two centers, 2 + 3 tips, plus the bridge edge
  REQUIRE(X.vertices.size() == 7);
  REQUIRE(X.edges.size() == 6);
  REQUIRE(X.total_measure() == Approx(6.0));
}

TEST_CASE("spec json round trip preserves the complex") {
  ComplexData d = make_two_star(2, 3);
  ComplexData back = parse_complex_spec(complex_spec_to_json(d));
  Complex a = build_complex(d);
  Complex b = build_complex(back);
  REQUIRE(a.vertices.size() == b.vertices.size());
  REQUIRE(a.edges.size() == b.edges.size());
  REQUIRE(a.total_measure() == Approx(b.total_measure()));
  for (size_t e = 0; e < a.edges.size(); ++e) {
    REQUIRE(a.edges[e].id == b.edges[e].id);
    REQUIRE(a.edges[e].length == Approx(b.edges[e].length));
  }
}

TEST_CASE("deck annotations survive the round trip") {
  ComplexData d = make_zline();
  ComplexData back = parse_complex_spec(complex_spec_to_json(d));
  REQUIRE(back.group.kind == GroupKind::zd);
  REQUIRE(back.group.rank == 1);
  REQUIRE(back.group.rules.size() == d.group.rules.size());
}

TEST_CASE("malformed specs are rejected") {
  REQUIRE_THROWS_AS(parse_complex_spec("{"), ParseError);
  REQUIRE_THROWS_AS(parse_complex_spec("[]"), ParseError);

  ComplexData dangling = make_interval();
  dangling.edges[0].ends[1] = "ghost";
  REQUIRE_THROWS_AS(build_complex(dangling), ParseError);

  ComplexData zero = make_interval();
  zero.edges[0].length = 0;
  REQUIRE_THROWS_AS(build_complex(zero), Error);

  ComplexData dim = make_interval();
  dim.dimension = 2;
  REQUIRE_THROWS_AS(build_complex(dim), ParseError);
}

TEST_CASE("unknown builtin names are rejected") {
  REQUIRE_THROWS_AS(builtin_complex("frobnicate"), ParseError);
  REQUIRE_THROWS_AS(builtin_complex("interval", 3), ConstructionError);
}

TEST_CASE("point canonicalization folds edge endpoints onto vertices") {
  Complex X = build_complex(builtin_complex("star3"));
  PointRef origin = canonicalize(X, edge_point(0, 0.0));
  REQUIRE(origin.kind == PointRef::Kind::vertex);
  REQUIRE(same_point(X, edge_point(0, 0.0), vertex_point(X.edges[0].ends[0])));
  REQUIRE(same_point(X, edge_point(1, 1.0), vertex_point(X.edges[1].ends[1])));
  REQUIRE_FALSE(same_point(X, edge_point(0, 0.5), edge_point(1, 0.5)));
}

TEST_CASE("geodesic distances on the star") {
  Complex X = build_complex(builtin_complex("star3"));
  double res = 0.01;
  REQUIRE(geodesic_distance(X, vertex_point(0), vertex_point(1), res) ==
          Approx(1.0).margin(1e-9));
  REQUIRE(geodesic_distance(X, vertex_point(1), vertex_point(2), res) ==
          Approx(2.0).margin(1e-9));
  // different legs join through the center
  REQUIRE(geodesic_distance(X, edge_point(0, 0.3), edge_point(1, 0.4), res) ==
          Approx(0.7).margin(1e-9));
  REQUIRE(geodesic_distance(X, edge_point(0, 0.3), edge_point(0, 0.8), res) ==
          Approx(0.5).margin(1e-9));
}

TEST_CASE("ball volumes count every branch") {
  Complex X = build_complex(builtin_complex("star3"));
  // around the center a radius-r ball has measure 3r
  REQUIRE(ball_volume(X, vertex_point(0), 0.2, 0.01) == Approx(0.6).margin(1e-9));
  // interior point away from the center: plain interval
  REQUIRE(ball_volume(X, edge_point(0, 0.5), 0.2, 0.01) ==
          Approx(0.4).margin(1e-9));
  // tip ball is one-sided
  REQUIRE(ball_volume(X, vertex_point(1), 0.2, 0.01) == Approx(0.2).margin(1e-9));
}

TEST_CASE("complex diameter") {
  REQUIRE(complex_diameter(build_complex(builtin_complex("star3")), 0.01) ==
          Approx(2.0).margin(1e-6));
  REQUIRE(complex_diameter(build_complex(builtin_complex("interval")), 0.01) ==
          Approx(1.0).margin(1e-6));
}

// Frozen values of the explicit constant formulas on the reference shapes.
// kappa = 6 (2 / sqrt(2 (1 - cos alpha)) + 1)^n with alpha = pi in dimension
// one, and the downstream constants evaluated once and pinned.
TEST_CASE("geometry constants on the reference complexes") {
  GeometryBounds gi = geometry_constants(build_complex(builtin_complex("interval")));
  REQUIRE(gi.n == 1);
  REQUIRE(gi.M == 1);
  REQUIRE(gi.kappa == Approx(12.0).epsilon(1e-14));
  REQUIRE(gi.R0 == Approx(1.0 / 12.0).epsilon(1e-14));
  REQUIRE(gi.C_X == Approx(20.371832715762604).epsilon(1e-13));
  REQUIRE(gi.C_Weak == Approx(2933.5439110698148).epsilon(1e-13));
  REQUIRE(gi.K_cover == Approx(96008.0).epsilon(1e-13));
  REQUIRE(gi.P0 == Approx(2922312331759.2646).epsilon(1e-13));

  GeometryBounds gs = geometry_constants(build_complex(builtin_complex("star3")));
  REQUIRE(gs.M == 3);
  REQUIRE(gs.C_X == Approx(183.34649444186343).epsilon(1e-13));
  REQUIRE(gs.C_Weak == Approx(79205.685598885).epsilon(1e-12));
  REQUIRE(gs.K_cover == Approx(288024.0).epsilon(1e-13));
  REQUIRE(gs.P0 == Approx(2.0758322149592209e+21).epsilon(1e-12));

  GeometryBounds gq = geometry_constants(build_complex(builtin_complex("square")));
  REQUIRE(gq.n == 2);
  REQUIRE(gq.alpha == Approx(3.14159265358979312 / 2).epsilon(1e-14));
  REQUIRE(gq.kappa == Approx(34.970562748477136).epsilon(1e-13));
  REQUIRE(gq.C_X == Approx(651.89864690440334).epsilon(1e-13));

  // unrolled Z^2 cover: interior vertices meet four squares
  GeometryBounds gg =
      geometry_constants(build_complex(builtin_complex("square", 2)));
  REQUIRE(gg.M == 4);
  REQUIRE(gg.C_X == Approx(2607.5945876176133).epsilon(1e-13));
  REQUIRE(gg.C_Weak == Approx(446075042.40810055).epsilon(1e-12));
  REQUIRE(gg.K_cover == Approx(313090611474.09241).epsilon(1e-12));
  REQUIRE(gg.P0 == Approx(4.2117305636723863e+39).epsilon(1e-12));
}

TEST_CASE("volume doubling holds on the reference shapes") {
  for (const char* name : {"interval", "star3", "square"}) {
    Complex X = build_complex(builtin_complex(name));
    DoublingReport rep = check_volume_doubling(X, 80, 2.0, 17);
    INFO(name);
    REQUIRE(rep.checked > 0);
    REQUIRE(rep.pass);
    REQUIRE(rep.worst_ratio <= rep.bound * (1 + 1e-12));
  }
}

TEST_CASE("truncated covers expose their boundary") {
  Complex X = build_complex(builtin_complex("zline", 3));
  REQUIRE(X.deck.kind == GroupKind::zd);
  REQUIRE(X.deck.radius == 3);
  REQUIRE(X.deck.words.size() == 7);
  REQUIRE_FALSE(X.deck.exposed.empty());
  REQUIRE(X.total_measure() == Approx(7.0));

  Complex L = build_complex(builtin_complex("lshape", 1));
  REQUIRE(L.deck.kind == GroupKind::free_group);
  // identity plus four neighbors, three unit squares each
  REQUIRE(L.total_measure() == Approx(15.0));
}
