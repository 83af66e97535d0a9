#include <catch_amalgamated.hpp>

#include <cmath>

#include "polyheat/spec_json.hpp"
#include "polyheat/whitney.hpp"

using namespace polyheat;
using Catch::Approx;

TEST_CASE("interval cover passes its audit") {
  Complex X = build_complex(builtin_complex("interval"));
  WhitneyCover C = whitney_cover(X, edge_point(0, 0.5), 0.05);
  REQUIRE_FALSE(C.balls.empty());
  REQUIRE(C.central == 0);
  REQUIRE(C.balls[0].radius > 0);
  REQUIRE(C.K_bound == Approx(geometry_constants(X).K_cover));

  WhitneyAudit A = audit_whitney_cover(C, 40, 1234);
  REQUIRE(A.disjoint);
  REQUIRE(A.cover_ratio <= 1 + 1e-9);
  REQUIRE(A.radius_dev <= 1e-9);
  REQUIRE(A.K_measured <= A.K_bound);
  REQUIRE(A.chains_checked > 0);
  REQUIRE(A.worst_chain_ratio <= A.chain_ratio_bound * (1 + 1e-9));
  REQUIRE(A.chain_inclusions);
  REQUIRE(A.min_enlargement_margin >= -1e-9);
  REQUIRE(A.member_radius_ok);
  REQUIRE(A.pass);
}

TEST_CASE("radius rule ties radii to boundary depth") {
  Complex X = build_complex(builtin_complex("interval"));
  WhitneyCover C = whitney_cover(X, edge_point(0, 0.5), 0.04);
  double denom = 1e3 * C.gb.kappa + 1;
  REQUIRE(C.beta == Approx(1.0 / denom));
  for (const WhitneyBall& B : C.balls) {
    REQUIRE(B.radius == Approx(B.depth / denom).epsilon(1e-9));
    REQUIRE(B.depth > 0);
  }
}

TEST_CASE("cover warns when the requested radius exceeds R0") {
  Complex X = build_complex(builtin_complex("interval"));
  // R0 = ell / kappa = 1/12
  WhitneyCover small = whitney_cover(X, edge_point(0, 0.5), 0.05);
  REQUIRE_FALSE(small.radius_warning);
  WhitneyCover big = whitney_cover(X, edge_point(0, 0.5), 0.2);
  REQUIRE(big.radius_warning);
}

TEST_CASE("star cover reaches across the center") {
  Complex X = build_complex(builtin_complex("star3"));
  WhitneyCover C = whitney_cover(X, vertex_point(0), 0.06);
  bool on[3] = {false, false, false};
  for (const WhitneyBall& B : C.balls)
    if (B.center.kind == PointRef::Kind::edge) on[B.center.cell] = true;
  REQUIRE((on[0] && on[1] && on[2]));
  WhitneyAudit A = audit_whitney_cover(C, 30, 77);
  REQUIRE(A.pass);
}

TEST_CASE("square cover audits clean in the face interior") {
  Complex X = build_complex(builtin_complex("square"));
  WhitneyCover C = whitney_cover(X, face_point(0, {0.5, 0.5}), 0.02);
  REQUIRE_FALSE(C.balls.empty());
  WhitneyAudit A = audit_whitney_cover(C, 25, 555);
  REQUIRE(A.distance_spot_checks > 0);
  REQUIRE(A.worst_distance_err <= 1e-9);
  REQUIRE(A.pass);
}

TEST_CASE("off-center covers carry their own depth") {
  Complex X = build_complex(builtin_complex("star3"));
  WhitneyCover C = whitney_cover(X, edge_point(1, 0.62), 0.05);
  WhitneyAudit A = audit_whitney_cover(C, 30, 31);
  REQUIRE(A.pass);
}

TEST_CASE("whitney construction rejects degenerate requests") {
  Complex X = build_complex(builtin_complex("interval"));
  REQUIRE_THROWS_AS(whitney_cover(X, edge_point(0, 0.5), 0.0),
                    ConstructionError);
  REQUIRE_THROWS_AS(whitney_cover(X, edge_point(0, 0.5), -1.0),
                    ConstructionError);
}
