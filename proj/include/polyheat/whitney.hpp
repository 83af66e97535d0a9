#pragma once

// Whitney-type covers of a metric ball E = B(z, r): disjoint balls whose
// radius is 1e-3/kappa times the distance to the complement, doubled balls
// covering E, chains of comparable balls from the central ball outward, and
// the audits for the cover properties and the chain radius/inclusion bounds.
//
// Construction is a greedy maximal packing over a finite candidate set laid
// out along radial lines from z, processed by decreasing rule radius.  A
// rejected candidate intersects an earlier (not smaller) ball, hence lies in
// its closed double; every audit point is a candidate, so the covering
// property is checked exactly where it is used.  On 1-complexes the lines
// sweep every branch of the ball, so chains reach every ball.  On
// 2-complexes the cover carpets a fixed number of radial rays (plus
// scattered probe balls kept clear of the rays); chains run along the rays.
//
// Local distances are evaluated in closed form: same cell, shared face
// chart, unfolding across a shared edge, through a shared vertex, or
// radially through z.  Below the wedge radius limit of z these cases are
// exact for every pair of points close enough to interact.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "polyheat/complex.hpp"
#include "polyheat/errors.hpp"
#include "polyheat/metric.hpp"
#include "polyheat/rng.hpp"

namespace polyheat {

struct WhitneyOptions {
  double depth_floor = -1;  // fraction of r kept; default 0.02 (1-D), 0.8 (2-D)
  int rays = 6;             // radial lines on 2-complexes
  int scatter = 1000;       // extra probe candidates
  int overlap_samples = 1000;
  unsigned long long seed = 7;
};

struct WhitneyBall {
  PointRef center;
  double radius = 0;
  double depth = 0;  // distance from the center to the complement of E
  double arc = 0;    // distance from z (= position along its line)
  int line = -1;     // -1 for scattered probe balls off every line (2-D)
};

// A radial line from z with arclength parameter u = distance to z.  1-D
// lines walk edge segments, branching at vertices (a branched line shares
// its prefix with the parent, so u stays the distance to z); 2-D lines are
// either a straight chart ray inside one face or an edge segment.
struct CoverLine {
  struct Seg {
    int edge = -1;
    double s0 = 0, s1 = 0;  // oriented arclength range on the edge
    double u0 = 0;          // arc at s0
  };
  std::vector<Seg> segs;  // 1-D mode (also 2-D along-edge rays)
  int face = -1;          // 2-D ray mode
  Vec2 base{}, dir{};
  int parent = -1;        // line it branched from
  double branch_arc = 0;  // arc where it leaves the parent
  double u_lo = 0;        // first arc owned by this line
  double u_hi = 0;

  PointRef at(double u) const {
    if (face >= 0) return face_point(face, base + u * dir);
    for (const auto& g : segs) {
      double len = std::abs(g.s1 - g.s0);
      if (u <= g.u0 + len + 1e-12) {
        double s = g.s0 + (g.s1 > g.s0 ? u - g.u0 : g.u0 - u);
        return edge_point(g.edge, s);
      }
    }
    throw RangeError("arc beyond the end of a cover line");
  }
};

class WhitneyCover {
 public:
  const Complex* X = nullptr;
  PointRef z;
  double r = 0;
  GeometryBounds gb;
  double q = 0;     // radius factor 1e-3 / kappa
  double beta = 0;  // radius / center depth = 1 / (1e3 kappa + 1)
  bool radius_warning = false;  // r exceeded R0
  double depth_floor = 0;

  std::vector<WhitneyBall> balls;
  int central = 0;  // index of B_z; the ball centered at z, accepted first
  std::vector<CoverLine> lines;

  int candidate_count = 0;
  int rejected_count = 0;
  double worst_cover_ratio = 0;  // max over rejected x of d(x, c_B) / (2 r_B)
  double worst_radius_dev = 0;   // max relative defect of the radius rule
  int K_measured = 0;            // max sampled overlap count of 36 kappa B
  double K_bound = 0;

  // ball lookup: per line, arc -> ball id; scattered balls listed apart
  std::vector<std::multimap<double, int>> line_index;
  std::vector<int> scatter_index;
};

namespace detail {

// Sector decomposition around z: every direction out of z lives in one
// sector carried by a single face chart; direction(phi) = cos(phi) ref +
// sin(phi) perp with phi in [0, angle].
struct Sector {
  int face = -1;
  Vec2 base{}, ref{}, perp{};
  double angle = 0;
};

inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

inline std::vector<Sector> z_sectors(const Complex& X, const PointRef& z) {
  const double pi = 3.14159265358979323846;
  std::vector<Sector> out;
  if (z.kind == PointRef::Kind::face) {
    out.push_back({z.cell, z.uv, {1, 0}, {0, 1}, 2 * pi});
    return out;
  }
  if (z.kind == PointRef::Kind::edge) {
    for (int f : X.edges[z.cell].faces) {
      const Face& F = X.faces[f];
      int side = X.side_of_edge(f, z.cell);
      size_t m = F.cycle.size();
      Vec2 A = F.chart[side], B = F.chart[(side + 1) % m];
      Vec2 dE = (1.0 / norm(B - A)) * (B - A);
      Vec2 base = chart_of(X, f, z);
      Vec2 nI = rot90(dE);
      if (!point_in_polygon(F.chart, base + 1e-7 * nI, 1e-12)) nI = -1.0 * nI;
      out.push_back({f, base, dE, nI, pi});
    }
    return out;
  }
  for (int f : X.vertices[z.cell].faces) {
    const Face& F = X.faces[f];
    int pos = X.cycle_position(f, z.cell);
    size_t m = F.cycle.size();
    Vec2 C = F.chart[pos];
    Vec2 d1 = F.chart[(pos + 1) % m] - C;
    Vec2 d2 = F.chart[(pos + m - 1) % m] - C;
    d1 = (1.0 / norm(d1)) * d1;
    d2 = (1.0 / norm(d2)) * d2;
    double theta =
        corner_angle(F.chart[(pos + m - 1) % m], C, F.chart[(pos + 1) % m]);
    Vec2 perp = cross(d1, d2) > 0 ? rot90(d1) : -1.0 * rot90(d1);
    out.push_back({f, C, d1, perp, theta});
  }
  return out;
}

// Exact-at-scale distance between two points of the ball fan around z.
// dz_p, dz_q are their known distances to z.  Minimum over the closed-form
// routes; the radial route through z is always available.
inline double local_distance(const Complex& X, const PointRef& pc,
                             const PointRef& qc, double dz_p, double dz_q) {
  double best = dz_p + dz_q;
  auto edge_pos = [&](const PointRef& a, int e, double& s) {
    if (a.kind == PointRef::Kind::edge && a.cell == e) {
      s = a.s;
      return true;
    }
    if (a.kind == PointRef::Kind::vertex) {
      if (X.edges[e].ends[0] == a.cell) {
        s = 0;
        return true;
      }
      if (X.edges[e].ends[1] == a.cell) {
        s = X.edges[e].length;
        return true;
      }
    }
    return false;
  };
  if (pc.kind == PointRef::Kind::edge) {
    double sq;
    if (edge_pos(qc, pc.cell, sq)) best = std::min(best, std::abs(pc.s - sq));
  } else if (qc.kind == PointRef::Kind::edge) {
    double sp;
    if (edge_pos(pc, qc.cell, sp)) best = std::min(best, std::abs(qc.s - sp));
  }
  auto cell_vertices = [&](const PointRef& a, std::vector<int>& vs) {
    vs.clear();
    if (a.kind == PointRef::Kind::vertex) {
      vs.push_back(a.cell);
    } else if (a.kind == PointRef::Kind::edge) {
      vs.push_back(X.edges[a.cell].ends[0]);
      vs.push_back(X.edges[a.cell].ends[1]);
    } else {
      for (int v : X.faces[a.cell].cycle) vs.push_back(v);
    }
  };
  auto vdist = [&](const PointRef& a, int v) {
    if (a.kind == PointRef::Kind::vertex)
      return a.cell == v ? 0.0 : std::numeric_limits<double>::infinity();
    if (a.kind == PointRef::Kind::edge) {
      if (X.edges[a.cell].ends[0] == v) return a.s;
      if (X.edges[a.cell].ends[1] == v) return X.edges[a.cell].length - a.s;
      return std::numeric_limits<double>::infinity();
    }
    int pos = X.cycle_position(a.cell, v);
    if (pos < 0) return std::numeric_limits<double>::infinity();
    return norm(a.uv - X.faces[a.cell].chart[pos]);
  };
  std::vector<int> vs;
  cell_vertices(pc, vs);
  for (int v : vs) {
    double dq = vdist(qc, v);
    if (std::isfinite(dq)) best = std::min(best, vdist(pc, v) + dq);
  }
  if (X.dimension == 1) return best;

  auto face_chart = [&](const PointRef& a, int f, Vec2& uv) {
    if (a.kind == PointRef::Kind::face) {
      if (a.cell != f) return false;
      uv = a.uv;
      return true;
    }
    if (a.kind == PointRef::Kind::vertex) {
      int pos = X.cycle_position(f, a.cell);
      if (pos < 0) return false;
      uv = X.faces[f].chart[pos];
      return true;
    }
    if (X.side_of_edge(f, a.cell) < 0) return false;
    uv = chart_of(X, f, a);
    return true;
  };
  auto faces_of = [&](const PointRef& a, std::vector<int>& fs) {
    fs.clear();
    if (a.kind == PointRef::Kind::face)
      fs.push_back(a.cell);
    else if (a.kind == PointRef::Kind::edge)
      fs = X.edges[a.cell].faces;
    else
      fs = X.vertices[a.cell].faces;
  };
  std::vector<int> fp;
  faces_of(pc, fp);
  for (int f : fp) {
    Vec2 a, b;
    if (face_chart(pc, f, a) && face_chart(qc, f, b))
      best = std::min(best, norm(a - b));
  }
  // unfold across a shared edge (interior face points on both sides)
  if (pc.kind == PointRef::Kind::face && qc.kind == PointRef::Kind::face &&
      pc.cell != qc.cell) {
    const Face& Fp = X.faces[pc.cell];
    const Face& Fq = X.faces[qc.cell];
    for (size_t sp = 0; sp < Fp.edges.size(); ++sp) {
      int e = Fp.edges[sp];
      int sq = X.side_of_edge(qc.cell, e);
      if (sq < 0) continue;
      size_t mp = Fp.cycle.size(), mq = Fq.cycle.size();
      Vec2 A1 = Fp.chart[sp], B1 = Fp.chart[(sp + 1) % mp];
      Vec2 A2 = Fq.chart[sq], B2 = Fq.chart[(sq + 1) % mq];
      if (Fq.cycle[sq] != Fp.cycle[sp]) std::swap(A2, B2);
      Vec2 u1 = (1.0 / norm(B1 - A1)) * (B1 - A1);
      Vec2 u2 = (1.0 / norm(B2 - A2)) * (B2 - A2);
      Vec2 w = qc.uv - A2;
      double along = dot(w, u2), off = std::abs(cross(u2, w));
      Vec2 n1 = rot90(u1);
      if (!point_in_polygon(Fp.chart, A1 + 0.5 * norm(B1 - A1) * u1 + 1e-7 * n1,
                            1e-12))
        n1 = -1.0 * n1;
      Vec2 quv = A1 + along * u1 - off * n1;  // far side of the edge
      Vec2 d = quv - pc.uv;
      double denom = cross(d, B1 - A1);
      if (std::abs(denom) < 1e-300) continue;
      double t = cross(A1 - pc.uv, B1 - A1) / denom;
      if (t < 0 || t > 1) continue;
      Vec2 hit = pc.uv + t * d;
      double along_e = dot(hit - A1, u1) / norm(B1 - A1);
      // the straight unfolded segment must cross the shared edge
      if (along_e >= -1e-12 && along_e <= 1 + 1e-12)
        best = std::min(best, norm(d));
    }
  }
  return best;
}

struct WhitneyCandidate {
  double radius;
  double arc;
  int line;
  PointRef pos;
};

}  // namespace detail

inline WhitneyCover whitney_cover(const Complex& X, PointRef z, double r,
                                  WhitneyOptions opt = {}) {
  if (!(r > 0)) throw ConstructionError("cover radius must be positive");
  WhitneyCover C;
  C.X = &X;
  C.z = canonicalize(X, z);
  C.r = r;
  C.gb = geometry_constants(X);
  C.q = 1e-3 / C.gb.kappa;
  C.beta = 1.0 / (1e3 * C.gb.kappa + 1.0);
  C.K_bound = C.gb.K_cover;
  C.radius_warning = r > C.gb.R0 * (1 + 1e-12);
  C.depth_floor = opt.depth_floor > 0 ? opt.depth_floor
                                      : (X.dimension == 1 ? 0.02 : 0.8);
  if (!(C.depth_floor > 0 && C.depth_floor < 1))
    throw RangeError("depth floor must lie in (0, 1)");
  const double pi = 3.14159265358979323846;

  // --- lines ---------------------------------------------------------------
  if (X.dimension == 1) {
    struct Spill {
      int vertex;
      double arc;
      int from_edge;
      int parent_line;
    };
    std::queue<Spill> todo;
    auto extend = [&](int parent, int e, double s_at, bool toward_end1,
                      double arc_at) {
      CoverLine L;
      L.parent = parent;
      L.branch_arc = arc_at;
      L.u_lo = arc_at;
      double len = X.edges[e].length;
      double room = toward_end1 ? len - s_at : s_at;
      double take = std::min(room, r - arc_at);
      CoverLine::Seg g;
      g.edge = e;
      g.s0 = s_at;
      g.s1 = toward_end1 ? s_at + take : s_at - take;
      g.u0 = arc_at;
      L.segs.push_back(g);
      L.u_hi = arc_at + take;
      int id = static_cast<int>(C.lines.size());
      C.lines.push_back(L);
      if (take < r - arc_at - 1e-15) {
        int v = X.edges[e].ends[toward_end1 ? 1 : 0];
        if (X.vertices[v].edges.size() == 1)
          throw ConstructionError(
              "ball reaches a boundary vertex; the depth rule needs the "
              "complement on every side");
        todo.push({v, arc_at + take, e, id});
      }
    };
    if (C.z.kind == PointRef::Kind::vertex) {
      if (X.vertices[C.z.cell].edges.size() == 1)
        throw ConstructionError("cover centered at a boundary vertex");
      for (int e : X.vertices[C.z.cell].edges) {
        bool t1 = X.edges[e].ends[0] == C.z.cell;
        extend(-1, e, t1 ? 0 : X.edges[e].length, t1, 0);
      }
    } else {
      extend(-1, C.z.cell, C.z.s, true, 0);
      extend(-1, C.z.cell, C.z.s, false, 0);
    }
    while (!todo.empty()) {
      Spill sp = todo.front();
      todo.pop();
      for (int e : X.vertices[sp.vertex].edges) {
        if (e == sp.from_edge) continue;
        bool t1 = X.edges[e].ends[0] == sp.vertex;
        extend(sp.parent_line, e, t1 ? 0 : X.edges[e].length, t1, sp.arc);
      }
    }
    // a ball wrapping a cycle would cover some edge stretch twice
    std::vector<std::vector<std::pair<double, double>>> covered(
        X.edges.size());
    for (const auto& L : C.lines)
      for (const auto& g : L.segs)
        covered[g.edge].push_back({std::min(g.s0, g.s1), std::max(g.s0, g.s1)});
    for (auto& iv : covered) {
      std::sort(iv.begin(), iv.end());
      for (size_t i = 1; i < iv.size(); ++i)
        if (iv[i].first < iv[i - 1].second - 1e-12)
          throw ConstructionError("ball wraps around a cycle; reduce the radius");
    }
  } else {
    double lim = wedge_radius_limit(X, C.z);
    if (r >= lim)
      throw ConstructionError(
          "cover radius reaches other cells (limit " + std::to_string(lim) +
          "); the radial chart construction needs r below it");
    if (C.z.kind == PointRef::Kind::edge) {
      for (int dirn = 0; dirn < 2; ++dirn) {
        CoverLine L;
        CoverLine::Seg g;
        g.edge = C.z.cell;
        g.s0 = C.z.s;
        g.s1 = C.z.s + (dirn ? r : -r);
        g.u0 = 0;
        L.segs.push_back(g);
        L.u_hi = r;
        C.lines.push_back(L);
      }
    } else if (C.z.kind == PointRef::Kind::vertex) {
      for (int e : X.vertices[C.z.cell].edges) {
        CoverLine L;
        CoverLine::Seg g;
        g.edge = e;
        bool from0 = X.edges[e].ends[0] == C.z.cell;
        g.s0 = from0 ? 0 : X.edges[e].length;
        g.s1 = from0 ? r : X.edges[e].length - r;
        g.u0 = 0;
        L.segs.push_back(g);
        L.u_hi = r;
        C.lines.push_back(L);
      }
    }
    // chart rays, kept at least ~37 degrees apart so that interactions
    // between different lines never pass the central ball
    for (const auto& sec : detail::z_sectors(X, C.z)) {
      int m;
      bool full = sec.angle > 2 * pi - 1e-9;
      if (full) {
        m = std::max(1, std::min(opt.rays, 9));
      } else {
        m = std::max(1, std::min(static_cast<int>(opt.rays * sec.angle /
                                                  (2 * pi)),
                                 static_cast<int>(sec.angle / 1.3)));
      }
      for (int j = 0; j < m; ++j) {
        double phi = full ? j * sec.angle / m : (j + 0.5) * sec.angle / m;
        CoverLine L;
        L.face = sec.face;
        L.base = sec.base;
        L.dir = std::cos(phi) * sec.ref + std::sin(phi) * sec.perp;
        L.u_hi = r;
        C.lines.push_back(L);
      }
    }
  }

  // --- candidates -----------------------------------------------------------
  std::vector<detail::WhitneyCandidate> cand;
  cand.push_back({C.beta * r, 0.0, 0, C.z});  // the central ball, deepest
  for (size_t li = 0; li < C.lines.size(); ++li) {
    const CoverLine& L = C.lines[li];
    double cap = std::min(L.u_hi, r * (1 - C.depth_floor));
    double u = L.u_lo;
    while (true) {
      u += 1.8 * C.beta * (r - u);
      if (u > cap) break;
      cand.push_back({C.beta * (r - u), u, static_cast<int>(li), L.at(u)});
    }
  }
  Stream rng(opt.seed);
  if (opt.scatter > 0) {
    if (X.dimension == 1) {
      std::vector<double> w;
      double tot = 0;
      for (const auto& L : C.lines) {
        double cap = std::min(L.u_hi, r * (1 - C.depth_floor));
        w.push_back(std::max(0.0, cap - L.u_lo));
        tot += w.back();
      }
      for (int k = 0; k < opt.scatter && tot > 0; ++k) {
        double pick = rng.uniform(0.0, tot);
        size_t li = 0;
        while (li + 1 < w.size() && pick > w[li]) pick -= w[li], ++li;
        double cap = std::min(C.lines[li].u_hi, r * (1 - C.depth_floor));
        if (cap <= C.lines[li].u_lo) continue;
        double u = rng.uniform(C.lines[li].u_lo, cap);
        cand.push_back(
            {C.beta * (r - u), u, static_cast<int>(li), C.lines[li].at(u)});
      }
    } else {
      auto secs = detail::z_sectors(X, C.z);
      double tot = 0;
      for (const auto& s : secs) tot += s.angle;
      for (int k = 0; k < opt.scatter; ++k) {
        double u = std::min(r * std::sqrt(rng.uniform()), r * 0.98);
        double a = rng.uniform(0.0, tot);
        size_t si = 0;
        while (si + 1 < secs.size() && a > secs[si].angle)
          a -= secs[si].angle, ++si;
        Vec2 dir = std::cos(a) * secs[si].ref + std::sin(a) * secs[si].perp;
        PointRef p = face_point(secs[si].face, secs[si].base + u * dir);
        // probes stay clear of the carpeted lines so they never disturb
        // the along-line packing pattern
        bool clash = false;
        for (const auto& L : C.lines) {
          for (double uu : {0.5 * u, std::min(u, L.u_hi),
                            std::min(1.5 * u, L.u_hi)}) {
            if (detail::local_distance(X, p, L.at(uu), u, uu) <
                6 * C.beta * r) {
              clash = true;
              break;
            }
          }
          if (clash) break;
        }
        if (!clash) cand.push_back({C.beta * (r - u), u, -1, p});
      }
    }
  }
  C.candidate_count = static_cast<int>(cand.size());

  // --- greedy maximal packing by decreasing radius ---------------------------
  std::vector<int> order(cand.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cand[a].radius != cand[b].radius) return cand[a].radius > cand[b].radius;
    return a < b;
  });
  C.line_index.assign(C.lines.size(), {});
  for (int ci : order) {
    const auto& x = cand[ci];
    // an intersecting accepted ball B has |arc difference| <= r_x + r_B
    // and, since depths differ by at most that arc difference, the window
    // 2.1 beta (r - arc) suffices
    double W = 2.1 * C.beta * (r - x.arc) + 1e-12 * r;
    int hit = -1;
    double hit_d = 0;
    for (size_t li = 0; li < C.lines.size() && hit < 0; ++li) {
      auto& idx = C.line_index[li];
      for (auto it = idx.lower_bound(x.arc - W);
           it != idx.end() && it->first <= x.arc + W; ++it) {
        const WhitneyBall& B = C.balls[it->second];
        double d = detail::local_distance(X, x.pos, B.center, x.arc, B.arc);
        if (d <= x.radius + B.radius) {
          hit = it->second;
          hit_d = d;
          break;
        }
      }
    }
    if (hit < 0)
      for (int id : C.scatter_index) {
        const WhitneyBall& B = C.balls[id];
        if (std::abs(B.arc - x.arc) > W) continue;
        double d = detail::local_distance(X, x.pos, B.center, x.arc, B.arc);
        if (d <= x.radius + B.radius) {
          hit = id;
          hit_d = d;
          break;
        }
      }
    if (hit >= 0) {
      ++C.rejected_count;
      double ratio = hit_d / (2 * C.balls[hit].radius);
      C.worst_cover_ratio = std::max(C.worst_cover_ratio, ratio);
      if (ratio > 1 + 1e-9)
        throw ConstructionError(
            "greedy packing cannot satisfy the covering property");
      continue;
    }
    WhitneyBall B;
    B.center = x.pos;
    B.radius = x.radius;
    B.depth = r - x.arc;
    B.arc = x.arc;
    B.line = x.line;
    int id = static_cast<int>(C.balls.size());
    C.balls.push_back(B);
    if (x.line >= 0)
      C.line_index[x.line].insert({x.arc, id});
    else
      C.scatter_index.push_back(id);
  }
  C.central = 0;

  // --- radius rule -----------------------------------------------------------
  for (const auto& B : C.balls) {
    double rule = C.q * (B.depth - B.radius);
    C.worst_radius_dev =
        std::max(C.worst_radius_dev, std::abs(B.radius - rule) / rule);
  }

  // --- overlap constant -------------------------------------------------------
  for (int s = 0; s < opt.overlap_samples; ++s) {
    size_t li = rng.below(C.lines.size());
    const CoverLine& L = C.lines[li];
    double cap = std::min(L.u_hi, r * (1 - C.depth_floor));
    if (cap <= L.u_lo) continue;
    double u = rng.uniform(L.u_lo, cap);
    PointRef p = L.at(u);
    // a ball whose 36 kappa dilate reaches p satisfies
    // |arc - u| <= 36 kappa beta (depth(p) + |arc - u|)
    double f36 = 36 * C.gb.kappa * C.beta;
    double W = f36 * (r - u) / (1 - f36) + 1e-12 * r;
    int count = 0;
    for (size_t lj = 0; lj < C.lines.size(); ++lj) {
      auto& idx = C.line_index[lj];
      for (auto it = idx.lower_bound(u - W);
           it != idx.end() && it->first <= u + W; ++it) {
        const WhitneyBall& B = C.balls[it->second];
        if (detail::local_distance(X, p, B.center, u, B.arc) <=
            36 * C.gb.kappa * B.radius)
          ++count;
      }
    }
    for (int id : C.scatter_index) {
      const WhitneyBall& B = C.balls[id];
      if (std::abs(B.arc - u) > W) continue;
      if (detail::local_distance(X, p, B.center, u, B.arc) <=
          36 * C.gb.kappa * B.radius)
        ++count;
    }
    C.K_measured = std::max(C.K_measured, count);
  }
  return C;
}

// ---------------------------------------------------------------------------
// Chains.

struct WhitneyChain {
  std::vector<int> balls;      // cover indices, central ball first
  double worst_ratio = 1;      // max of r_{i+1}/r_i and its inverse
  double ratio_bound = 0;      // 1 + 1e-2 / kappa
  bool inclusions_6B = true;   // B_{i+1} in 6B_i and conversely
  double enlargement_margin = std::numeric_limits<double>::infinity();
  double min_path_depth = 0;   // min depth along the geodesic to the target
  double depth_bound = 0;        // half the target's boundary distance
  double min_member_radius = 0;
};

namespace detail {

// root-to-line ancestry; entry (line, exit arc of the path toward the child)
inline std::vector<std::pair<int, double>> line_ancestry(const WhitneyCover& C,
                                                         int line) {
  std::vector<std::pair<int, double>> up;
  int l = line;
  double exit = std::numeric_limits<double>::infinity();
  while (l >= 0) {
    up.push_back({l, exit});
    exit = C.lines[l].branch_arc;
    l = C.lines[l].parent;
  }
  std::reverse(up.begin(), up.end());
  return up;
}

struct PathHit {
  bool on_path = false;
  double diverge = 0;  // arc where the ball's route leaves the target path
};

inline PathHit path_relation(const WhitneyCover& C,
                             const std::vector<std::pair<int, double>>& target,
                             const WhitneyBall& B) {
  PathHit h;
  if (B.line < 0) return h;  // scattered: only the radial route via z
  auto mine = line_ancestry(C, B.line);
  size_t i = 0;
  while (i < mine.size() && i < target.size() &&
         mine[i].first == target[i].first)
    ++i;
  if (i == mine.size()) {
    // the ball's line lies on the target path
    double exit = i < target.size()
                      ? target[i - 1].second
                      : std::numeric_limits<double>::infinity();
    if (B.arc <= exit) {
      h.on_path = true;
      return h;
    }
    h.diverge = exit;
    return h;
  }
  h.diverge = i == 0 ? 0.0 : std::min(mine[i - 1].second, target[i - 1].second);
  return h;
}

}  // namespace detail

inline WhitneyChain whitney_chain(const WhitneyCover& C, int ball_id) {
  if (ball_id < 0 || ball_id >= static_cast<int>(C.balls.size()))
    throw RangeError("no such ball in the cover");
  const Complex& X = *C.X;
  WhitneyChain ch;
  ch.ratio_bound = 1 + 1e-2 / C.gb.kappa;
  const WhitneyBall& T = C.balls[ball_id];
  ch.depth_bound = 0.5 * 1e3 * C.gb.kappa * T.radius;
  // depth along the radial geodesic decreases monotonically
  ch.min_path_depth = T.depth;
  ch.balls.push_back(C.central);
  ch.min_member_radius = C.balls[C.central].radius;
  if (ball_id == C.central) return ch;
  if (X.dimension == 2 && T.line < 0)
    throw ConstructionError(
        "chains need a line through the target; scattered probe balls on "
        "2-complexes are not chained");
  auto target = detail::line_ancestry(C, T.line);

  auto rel_of = [&](const WhitneyBall& B) {
    return detail::path_relation(C, target, B);
  };
  auto dist_to_path = [&](const WhitneyBall& B, double w) {
    auto rel = rel_of(B);
    if (rel.on_path) return std::abs(w - B.arc);
    return (B.arc - rel.diverge) + std::abs(w - rel.diverge);
  };
  auto reach_on_path = [&](const WhitneyBall& B) {
    auto rel = rel_of(B);
    if (rel.on_path) return B.arc + 2 * B.radius;
    return rel.diverge + 2 * B.radius - (B.arc - rel.diverge);
  };
  auto dist_between = [&](const WhitneyBall& A, const WhitneyBall& B) {
    return detail::local_distance(X, A.center, B.center, A.arc, B.arc);
  };

  int cur = C.central;
  const int cap = 200000;
  int steps = 0;
  while (true) {
    if (++steps > cap)
      throw ChainOverflowError("chain exceeded " + std::to_string(cap) +
                               " balls toward ball " + std::to_string(ball_id));
    const WhitneyBall& Bc = C.balls[cur];
    double dct = dist_to_path(Bc, T.arc);
    if (dct <= (2 * Bc.radius + 2 * T.radius) * (1 + 1e-9)) {
      double ra = Bc.radius, rb = T.radius;
      ch.worst_ratio = std::max({ch.worst_ratio, ra / rb, rb / ra});
      double dpair = dist_between(Bc, T);
      if (dpair + rb > 6 * ra * (1 + 1e-9) || dpair + ra > 6 * rb * (1 + 1e-9))
        ch.inclusions_6B = false;
      ch.balls.push_back(ball_id);
      break;
    }
    // first path point outside the double of the current ball
    double w = reach_on_path(Bc);
    double W = 3 * C.beta * (C.r - w) + 1e-12 * C.r;
    int nxt = -1;
    double best_hi = w;
    for (size_t li = 0; li < C.lines.size(); ++li) {
      auto& idx = C.line_index[li];
      for (auto it = idx.lower_bound(w - W);
           it != idx.end() && it->first <= w + W; ++it) {
        const WhitneyBall& B = C.balls[it->second];
        if (dist_to_path(B, w) <= 2 * B.radius * (1 + 1e-9)) {
          double hi = reach_on_path(B);
          if (hi > best_hi) {
            best_hi = hi;
            nxt = it->second;
          }
        }
      }
    }
    if (nxt < 0)
      throw ConstructionError("chain step left the covered set at arc " +
                              std::to_string(w));
    double ra = C.balls[cur].radius, rb = C.balls[nxt].radius;
    ch.worst_ratio = std::max({ch.worst_ratio, ra / rb, rb / ra});
    double dpair = dist_between(C.balls[cur], C.balls[nxt]);
    if (dpair + rb > 6 * ra * (1 + 1e-9) || dpair + ra > 6 * rb * (1 + 1e-9))
      ch.inclusions_6B = false;
    ch.balls.push_back(nxt);
    cur = nxt;
    if (cur == ball_id) break;
  }
  ch.min_member_radius = std::numeric_limits<double>::infinity();
  for (int id : ch.balls) {
    const WhitneyBall& A = C.balls[id];
    double d = dist_to_path(A, T.arc);
    ch.enlargement_margin = std::min(
        ch.enlargement_margin, (1e3 * C.gb.kappa + 9) * A.radius - d - T.radius);
    ch.min_member_radius = std::min(ch.min_member_radius, A.radius);
  }
  return ch;
}

// ---------------------------------------------------------------------------
// Cover audit.

struct WhitneyAudit {
  bool disjoint = true;
  double min_gap = std::numeric_limits<double>::infinity();  // d - r1 - r2
  double cover_ratio = 0;   // worst rejected-candidate ratio, <= 1 + 1e-9
  double radius_dev = 0;    // worst radius-rule deviation, <= 1e-9
  int K_measured = 0;
  double K_bound = 0;
  int chains_checked = 0;
  double worst_chain_ratio = 1;
  double chain_ratio_bound = 0;
  bool chain_inclusions = true;
  double min_enlargement_margin = std::numeric_limits<double>::infinity();
  double worst_depth_ratio = std::numeric_limits<double>::infinity();
  bool member_radius_ok = true;  // every chain member at least r_B / 4
  int distance_spot_checks = 0;
  double worst_distance_err = 0;
  bool pass = false;
};

inline WhitneyAudit audit_whitney_cover(const WhitneyCover& C,
                                        int chain_samples,
                                        unsigned long long seed) {
  const Complex& X = *C.X;
  WhitneyAudit A;
  A.cover_ratio = C.worst_cover_ratio;
  A.radius_dev = C.worst_radius_dev;
  A.K_measured = C.K_measured;
  A.K_bound = C.K_bound;
  A.chain_ratio_bound = 1 + 1e-2 / C.gb.kappa;

  // pairwise disjointness, same line and across lines
  for (size_t li = 0; li < C.lines.size(); ++li) {
    for (auto it = C.line_index[li].begin(); it != C.line_index[li].end();
         ++it) {
      const WhitneyBall& B1 = C.balls[it->second];
      double W = 2.2 * C.beta * (C.r - B1.arc) + 1e-12 * C.r;
      for (auto jt = std::next(it);
           jt != C.line_index[li].end() && jt->first <= B1.arc + W; ++jt) {
        const WhitneyBall& B2 = C.balls[jt->second];
        double d =
            detail::local_distance(X, B1.center, B2.center, B1.arc, B2.arc);
        A.min_gap = std::min(A.min_gap, d - B1.radius - B2.radius);
      }
      for (size_t lj = li + 1; lj < C.lines.size(); ++lj) {
        auto& idx = C.line_index[lj];
        for (auto jt = idx.lower_bound(B1.arc - W);
             jt != idx.end() && jt->first <= B1.arc + W; ++jt) {
          const WhitneyBall& B2 = C.balls[jt->second];
          double d =
              detail::local_distance(X, B1.center, B2.center, B1.arc, B2.arc);
          A.min_gap = std::min(A.min_gap, d - B1.radius - B2.radius);
        }
      }
      for (int id : C.scatter_index) {
        const WhitneyBall& B2 = C.balls[id];
        if (std::abs(B2.arc - B1.arc) > W) continue;
        double d =
            detail::local_distance(X, B1.center, B2.center, B1.arc, B2.arc);
        A.min_gap = std::min(A.min_gap, d - B1.radius - B2.radius);
      }
    }
  }
  for (size_t i = 0; i < C.scatter_index.size(); ++i)
    for (size_t j = i + 1; j < C.scatter_index.size(); ++j) {
      const WhitneyBall& B1 = C.balls[C.scatter_index[i]];
      const WhitneyBall& B2 = C.balls[C.scatter_index[j]];
      if (std::abs(B1.arc - B2.arc) > B1.radius + B2.radius) continue;
      double d =
          detail::local_distance(X, B1.center, B2.center, B1.arc, B2.arc);
      A.min_gap = std::min(A.min_gap, d - B1.radius - B2.radius);
    }
  A.disjoint = A.min_gap >= -1e-12 * C.r;

  // spot check stored arcs against the subdivision graph (1-complexes are
  // exact there; 2-D arcs are chart-exact by construction)
  Stream rng(seed);
  if (X.dimension == 1) {
    MetricGraph mg(X, C.gb.ell);
    for (int s = 0; s < 12; ++s) {
      const WhitneyBall& B = C.balls[rng.below(C.balls.size())];
      if (B.arc <= 0) continue;
      double dmg = mg.distance(C.z, B.center);
      A.worst_distance_err =
          std::max(A.worst_distance_err, std::abs(dmg - B.arc) / B.arc);
      ++A.distance_spot_checks;
    }
  }

  // chains: the deepest ball of each line plus random members
  std::vector<int> targets;
  for (size_t li = 0; li < C.lines.size(); ++li)
    if (!C.line_index[li].empty())
      targets.push_back(std::prev(C.line_index[li].end())->second);
  int guard = 0;
  while (static_cast<int>(targets.size()) < chain_samples &&
         ++guard < 100 * chain_samples) {
    int id = static_cast<int>(rng.below(C.balls.size()));
    if (X.dimension == 2 && C.balls[id].line < 0) continue;
    targets.push_back(id);
  }
  if (static_cast<int>(targets.size()) > chain_samples)
    targets.resize(chain_samples);
  for (int id : targets) {
    auto ch = whitney_chain(C, id);
    ++A.chains_checked;
    A.worst_chain_ratio = std::max(A.worst_chain_ratio, ch.worst_ratio);
    A.chain_inclusions = A.chain_inclusions && ch.inclusions_6B;
    A.min_enlargement_margin =
        std::min(A.min_enlargement_margin, ch.enlargement_margin);
    if (ch.depth_bound > 0)
      A.worst_depth_ratio =
          std::min(A.worst_depth_ratio, ch.min_path_depth / ch.depth_bound);
    if (ch.min_member_radius < 0.25 * C.balls[id].radius * (1 - 1e-9))
      A.member_radius_ok = false;
  }
  A.pass = A.disjoint && A.cover_ratio <= 1 + 1e-9 && A.radius_dev <= 1e-9 &&
           A.K_measured <= A.K_bound &&
           A.worst_chain_ratio <= A.chain_ratio_bound * (1 + 1e-9) &&
           A.chain_inclusions && A.min_enlargement_margin >= -1e-9 &&
           A.worst_depth_ratio >= 1 - 1e-9 && A.member_radius_ok &&
           A.worst_distance_err <= 1e-9;
  return A;
}

}  // namespace polyheat
