#pragma once

// Bridges between a cocompact deck cover and its deck group: skeleton
// distance constants, delta-nets with overlap counts, ball averages mapping
// mesh functions to group functions, a partition-of-unity extension mapping
// group functions back to the mesh, two-sided norm and gradient comparisons,
// Dirichlet eigenvalue and trace comparisons against the restricted walk
// operator, and the large-time heat/walk comparison table.
//
// Z and Z^2 covers of the builtin complexes lay flat (the cover is a subset
// of the line or the plane), so distances between nearby points are exact
// Euclidean ones; the embedding carries containment certificates and any
// consumer that would need geometry outside the truncated cover throws
// TruncationError instead of silently using a wall.  Free-group covers do
// not lay flat; the operations that need a flat certificate reject them.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "csv.hpp"
#include "discretize.hpp"
#include "eigensolve.hpp"
#include "errors.hpp"
#include "group.hpp"
#include "metric.hpp"
#include "poincare.hpp"
#include "rng.hpp"
#include "spec_json.hpp"

namespace polyheat {

// ---------------------------------------------------------------------------
// 1-skeleton distances

namespace detail {

// Vertex-to-vertex distances along edges only.  Geodesics of the 1-skeleton
// between vertices pass through vertices, so no subdivision is needed.
inline std::vector<double> skeleton_vertex_field(const Complex& X, int from) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(X.vertices.size(), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[from] = 0;
  pq.push({0.0, from});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v] + 1e-15) continue;
    for (int e : X.vertices[v].edges) {
      const Edge& E = X.edges[e];
      int w = E.ends[0] == v ? E.ends[1] : E.ends[0];
      if (d + E.length < dist[w] - 1e-15) {
        dist[w] = d + E.length;
        pq.push({dist[w], w});
      }
    }
  }
  return dist;
}

// Subdivision graph of the 1-skeleton alone: nodes are vertices plus edge
// interior samples, links run along edges only.  Face chords are deliberately
// absent; this measures skeleton distance, not intrinsic distance.
struct SkeletonGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<int> first_interior;  // per edge
  std::vector<int> segments;       // per edge
  int nodes = 0;

  SkeletonGraph(const Complex& X, double res) {
    if (!(res > 0)) throw RangeError("resolution must be positive");
    int n = static_cast<int>(X.vertices.size());
    first_interior.resize(X.edges.size());
    segments.resize(X.edges.size());
    for (size_t e = 0; e < X.edges.size(); ++e) {
      segments[e] =
          std::max<int>(1, static_cast<int>(std::ceil(X.edges[e].length / res)));
      first_interior[e] = n;
      n += segments[e] - 1;
    }
    nodes = n;
    adj.assign(n, {});
    for (size_t e = 0; e < X.edges.size(); ++e) {
      double seg = X.edges[e].length / segments[e];
      for (int j = 0; j < segments[e]; ++j) {
        int a = node_at(X, static_cast<int>(e), j);
        int b = node_at(X, static_cast<int>(e), j + 1);
        adj[a].push_back({b, seg});
        adj[b].push_back({a, seg});
      }
    }
  }

  int node_at(const Complex& X, int e, int j) const {
    if (j == 0) return X.edges[e].ends[0];
    if (j == segments[e]) return X.edges[e].ends[1];
    return first_interior[e] + j - 1;
  }

  std::vector<double> field(int from) const {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(nodes, inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[from] = 0;
    pq.push({0.0, from});
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v] + 1e-15) continue;
      for (auto [w, len] : adj[v])
        if (d + len < dist[w] - 1e-15) {
          dist[w] = d + len;
          pq.push({dist[w], w});
        }
    }
    return dist;
  }
};

inline bool identity_cell(const Complex& X, int copy) {
  return X.deck.kind == GroupKind::none || copy == X.deck.identity_copy ||
         X.deck.identity_copy < 0;
}

// Largest skeleton distance, measured through the whole cover, between two
// points of the identity copy's 1-skeleton.  Probes sit at `res` spacing on
// the identity edges; skeleton geodesics between edge points bend only at
// vertices and probe endpoints are included, so the maximum over probes is
// exact up to one probe spacing and exact when attained at vertices.
inline double identity_skeleton_span(const Complex& X, double res) {
  SkeletonGraph g(X, res);
  std::vector<int> probes;
  for (size_t e = 0; e < X.edges.size(); ++e) {
    if (!identity_cell(X, X.edges[e].copy)) continue;
    for (int j = 0; j <= g.segments[e]; ++j)
      probes.push_back(g.node_at(X, static_cast<int>(e), j));
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  double best = 0;
  for (int p : probes) {
    auto dist = g.field(p);
    for (int q : probes) {
      if (!std::isfinite(dist[q]))
        throw DisconnectedError("1-skeleton is disconnected");
      best = std::max(best, dist[q]);
    }
  }
  return best;
}

// Smallest nonzero skeleton distance between identity-copy vertices.
inline double min_post_separation(const Complex& X) {
  std::vector<int> posts;
  for (size_t v = 0; v < X.vertices.size(); ++v)
    if (identity_cell(X, X.vertices[v].copy)) posts.push_back(static_cast<int>(v));
  double best = std::numeric_limits<double>::infinity();
  for (int p : posts) {
    auto dist = skeleton_vertex_field(X, p);
    for (int q : posts)
      if (q != p) best = std::min(best, dist[q]);
  }
  if (!std::isfinite(best))
    throw DisconnectedError("no second vertex reachable along the 1-skeleton");
  return best;
}

}  // namespace detail

// Diameter of the k-skeleton over vertex pairs.  The 0-skeleton carries no
// paths between distinct points so its diameter is not a usable quantity.
inline double skeleton_diameter(const Complex& Y, int k) {
  if (k == 0)
    throw IllDefinedTermError(
        "0-skeleton diameter: no paths join distinct vertices");
  if (k != 1) throw RangeError("only the 1-skeleton diameter is implemented");
  if (Y.vertices.size() < 2) return 0;
  double best = 0;
  for (size_t v = 0; v < Y.vertices.size(); ++v) {
    auto dist = detail::skeleton_vertex_field(Y, static_cast<int>(v));
    for (double d : dist) {
      if (!std::isfinite(d))
        throw DisconnectedError("1-skeleton is disconnected");
      best = std::max(best, d);
    }
  }
  return best;
}

// Constants comparing intrinsic distance on the cover with word distance on
// the deck group:  (1/C0) d_X <= d_G <= C_XG d_X  between orbit points.
//
// C_XG multiplies one factor per dimension.  The printed first factor would
// divide by a 0-skeleton diameter, which is not defined; only its angle part
// sqrt(2/(1-cos alpha)) survives, and the flag below records that the factor
// stands on that reading.
struct DistanceConstants {
  double C0 = 0;
  double C_XG = 0;
  double post_separation = 0;    // min skeleton distance between base vertices
  std::vector<double> terms;     // factor per dimension, lowest first
  bool first_term_angle_only = true;
};

inline DistanceConstants distance_constants(const Complex& Y, const Complex& X) {
  DistanceConstants out;
  out.C0 = skeleton_diameter(Y, 1);
  auto gb = geometry_constants(X);
  double angle = std::sqrt(2.0 / (1.0 - std::cos(gb.alpha)));
  out.terms.push_back(angle);
  if (X.dimension >= 2) {
    double span = detail::identity_skeleton_span(X, gb.ell / 8.0);
    out.terms.push_back(std::max(angle, span / gb.ell));
  }
  out.post_separation = detail::min_post_separation(X);
  out.C_XG = 1.0 / out.post_separation;
  for (double t : out.terms) out.C_XG *= t;
  return out;
}

// ---------------------------------------------------------------------------
// Flat embeddings of Z^d covers

namespace detail {

struct ZdEmbedding {
  int rank = 1;
  double scale[2] = {1, 1};  // lattice step per axis
  std::vector<Vec2> vertex_pos;
  std::set<std::array<long long, 2>> cells;  // unit cells present
  std::map<std::string, std::array<long long, 2>> orbit_coord;
};

inline Vec2 embedded_point(const Complex& X, const ZdEmbedding& E, PointRef p) {
  switch (p.kind) {
    case PointRef::Kind::vertex:
      return E.vertex_pos[p.cell];
    case PointRef::Kind::edge: {
      const Edge& e = X.edges[p.cell];
      Vec2 a = E.vertex_pos[e.ends[0]], b = E.vertex_pos[e.ends[1]];
      double t = p.s / e.length;
      return a + t * (b - a);
    }
    case PointRef::Kind::face: {
      const Face& f = X.faces[p.cell];
      Vec2 anchor = E.vertex_pos[f.cycle[0]] - f.chart[0];
      return anchor + p.uv;
    }
  }
  throw RangeError("unknown point kind");
}

inline ZdEmbedding zd_embedding(const Complex& X) {
  if (X.deck.kind != GroupKind::zd)
    throw ConstructionError("flat embeddings need a Z^d deck cover");
  ZdEmbedding E;
  E.rank = X.deck.rank;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  E.vertex_pos.assign(X.vertices.size(), Vec2{nan, nan});
  const auto& deck = X.deck;

  if (X.dimension == 2) {
    if (E.rank != 2)
      throw ConstructionError("plane embeddings need a rank-2 deck group");
    // Propagate chart offsets across shared edges.  Plane covers close up
    // consistently; a conflict means the cover does not lay flat.
    std::vector<char> placed(X.faces.size(), 0);
    auto place =
        [&](int f, Vec2 offset) {
          const Face& F = X.faces[f];
          for (size_t k = 0; k < F.cycle.size(); ++k) {
            Vec2 pos = offset + F.chart[k];
            Vec2& slot = E.vertex_pos[F.cycle[k]];
            if (std::isnan(slot.x)) {
              slot = pos;
            } else if (norm(slot - pos) > 1e-9) {
              throw ConstructionError("cover does not lay flat in the plane");
            }
          }
        };
    std::queue<int> bfs;
    place(0, Vec2{0, 0});
    placed[0] = 1;
    bfs.push(0);
    while (!bfs.empty()) {
      int f = bfs.front();
      bfs.pop();
      const Face& F = X.faces[f];
      for (int e : F.edges)
        for (int g : X.edges[e].faces) {
          if (placed[g]) continue;
          const Face& Gf = X.faces[g];
          int shared = X.edges[e].ends[0];
          int k = X.cycle_position(g, shared);
          Vec2 offset = E.vertex_pos[shared] - Gf.chart[k];
          place(g, offset);
          placed[g] = 1;
          bfs.push(g);
        }
    }
    for (const auto& pos : E.vertex_pos)
      if (std::isnan(pos.x))
        throw ConstructionError("a vertex lies on no face of the cover");
  } else {
    if (E.rank != 1)
      throw ConstructionError("line embeddings need a rank-1 deck group");
    // Walk the path from one end, accumulating edge lengths.
    std::vector<int> degree(X.vertices.size(), 0);
    for (const auto& e : X.edges) {
      ++degree[e.ends[0]];
      ++degree[e.ends[1]];
    }
    int start = -1;
    for (size_t v = 0; v < X.vertices.size(); ++v)
      if (degree[v] == 1) start = static_cast<int>(v);
    if (start < 0)
      throw ConstructionError("line cover closed into a cycle");
    double x = 0;
    int cur = start, prev_edge = -1;
    E.vertex_pos[cur] = Vec2{0, 0};
    while (true) {
      int next_edge = -1;
      for (int e : X.vertices[cur].edges)
        if (e != prev_edge) next_edge = e;
      if (next_edge < 0) break;
      const Edge& e = X.edges[next_edge];
      cur = e.ends[0] == cur ? e.ends[1] : e.ends[0];
      x += e.length;
      E.vertex_pos[cur] = Vec2{x, 0};
      prev_edge = next_edge;
    }
  }

  // Normalize: orbit of the identity at the origin, positive unit steps,
  // every orbit vertex exactly on the lattice it claims.
  auto orbit_pos = [&](const std::string& w) {
    auto it = deck.orbit.find(w);
    if (it == deck.orbit.end())
      throw ConstructionError("deck orbit misses word " + w);
    return E.vertex_pos[X.vertex_index(it->second)];
  };
  std::string id = grp::zd_str(std::vector<long long>(E.rank, 0));
  Vec2 origin = orbit_pos(id);
  for (auto& pos : E.vertex_pos) pos = pos - origin;

  if (E.rank == 1) {
    std::string one = grp::zd_str({1});
    if (!deck.orbit.count(one))
      throw ConstructionError("cover too shallow to calibrate the lattice");
    double s = orbit_pos(one).x;
    if (s < 0)
      for (auto& pos : E.vertex_pos) pos.x = -pos.x;
    E.scale[0] = std::abs(s);
  } else {
    std::string ex = grp::zd_str({1, 0}), ey = grp::zd_str({0, 1});
    if (!deck.orbit.count(ex) || !deck.orbit.count(ey))
      throw ConstructionError("cover too shallow to calibrate the lattice");
    Vec2 px = orbit_pos(ex), py = orbit_pos(ey);
    // Align axes: allow the generators to point along -x / -y.
    if (std::abs(px.y) > 1e-9 || std::abs(py.x) > 1e-9)
      throw ConstructionError("deck translations are not axis-aligned");
    if (px.x < 0)
      for (auto& pos : E.vertex_pos) pos.x = -pos.x;
    if (py.y < 0)
      for (auto& pos : E.vertex_pos) pos.y = -pos.y;
    E.scale[0] = std::abs(px.x);
    E.scale[1] = std::abs(py.y);
  }
  if (!(E.scale[0] > 0) || (E.rank == 2 && !(E.scale[1] > 0)))
    throw ConstructionError("degenerate lattice step");

  for (const auto& [w, name] : deck.orbit) {
    auto v = grp::zd_parse(w, E.rank);
    Vec2 expect{v[0] * E.scale[0], E.rank == 2 ? v[1] * E.scale[1] : 0.0};
    Vec2 got = E.vertex_pos[X.vertex_index(name)];
    if (norm(got - expect) > 1e-9)
      throw ConstructionError("deck orbit does not sit on a lattice");
    E.orbit_coord[w] = {v[0], E.rank == 2 ? v[1] : 0};
    E.cells.insert({v[0], E.rank == 2 ? v[1] : 0});
  }
  return E;
}

// True when the closed metric ball B(p, r) lies inside the union of cells the
// truncated cover actually has.  Cells are axis-aligned unit lattice boxes
// (or intervals), so the check clamps the center into each candidate box.
inline bool ball_in_region(const ZdEmbedding& E, Vec2 p, double r) {
  const double tol = 1e-12;
  if (E.rank == 1) {
    double s = E.scale[0];
    long long lo = static_cast<long long>(std::floor((p.x - r) / s)) - 1;
    long long hi = static_cast<long long>(std::floor((p.x + r) / s)) + 1;
    for (long long k = lo; k <= hi; ++k) {
      if (k * s >= p.x + r - tol || (k + 1) * s <= p.x - r + tol) continue;
      if (!E.cells.count({k, 0})) return false;
    }
    return true;
  }
  double sx = E.scale[0], sy = E.scale[1];
  long long ax = static_cast<long long>(std::floor((p.x - r) / sx)) - 1;
  long long bx = static_cast<long long>(std::floor((p.x + r) / sx)) + 1;
  long long ay = static_cast<long long>(std::floor((p.y - r) / sy)) - 1;
  long long by = static_cast<long long>(std::floor((p.y + r) / sy)) + 1;
  for (long long a = ax; a <= bx; ++a)
    for (long long b = ay; b <= by; ++b) {
      double dx = std::max({a * sx - p.x, p.x - (a + 1) * sx, 0.0});
      double dy = std::max({b * sy - p.y, p.y - (b + 1) * sy, 0.0});
      if (dx * dx + dy * dy >= r * r - tol) continue;
      if (!E.cells.count({a, b})) return false;
    }
  return true;
}

// Lattice points within distance r of p, as (coordinates, distance).
inline std::vector<std::pair<std::array<long long, 2>, double>> lattice_in_ball(
    const ZdEmbedding& E, Vec2 p, double r) {
  std::vector<std::pair<std::array<long long, 2>, double>> out;
  if (E.rank == 1) {
    double s = E.scale[0];
    long long lo = static_cast<long long>(std::ceil((p.x - r) / s));
    long long hi = static_cast<long long>(std::floor((p.x + r) / s));
    for (long long k = lo; k <= hi; ++k)
      out.push_back({{k, 0}, std::abs(p.x - k * s)});
    return out;
  }
  double sx = E.scale[0], sy = E.scale[1];
  long long ax = static_cast<long long>(std::ceil((p.x - r) / sx));
  long long bx = static_cast<long long>(std::floor((p.x + r) / sx));
  for (long long a = ax; a <= bx; ++a) {
    double dx = p.x - a * sx;
    double rest = r * r - dx * dx;
    if (rest < 0) continue;
    double ry = std::sqrt(rest);
    long long ay = static_cast<long long>(std::ceil((p.y - ry) / sy));
    long long by = static_cast<long long>(std::floor((p.y + ry) / sy));
    for (long long b = ay; b <= by; ++b) {
      double dy = p.y - b * sy;
      out.push_back({{a, b}, std::hypot(dx, dy)});
    }
  }
  return out;
}

inline Vec2 lattice_pos(const ZdEmbedding& E, std::array<long long, 2> g) {
  return Vec2{g[0] * E.scale[0], E.rank == 2 ? g[1] * E.scale[1] : 0.0};
}

inline std::string lattice_word(const ZdEmbedding& E,
                                std::array<long long, 2> g) {
  if (E.rank == 1) return grp::zd_str({g[0]});
  return grp::zd_str({g[0], g[1]});
}

}  // namespace detail

// Pair audit of the distance constants.  Z^d covers use exact flat
// distances (for rank 2 the word pairs are restricted to the largest
// centered box whose convex hull the truncation contains, so segments
// between orbit points stay inside the cover).  Free covers use the
// subdivision-graph distance: it only overestimates, so the upper
// comparison d_skel <= C0 d_G is a certificate while the lower one is a
// smoke check, recorded as such.
struct DistanceAudit {
  int pairs = 0;
  double worst_upper = 0;  // d_X proxy / (C0 * d_G)
  double worst_lower = 0;  // d_G / (C_XG * d_X proxy)
  bool lower_certified = false;
  bool pass = false;
};

inline DistanceAudit audit_distance_constants(const Complex& Y, const Complex& X,
                                              int pairs,
                                              std::uint64_t seed = 17) {
  if (pairs < 1) throw RangeError("pair count must be positive");
  auto dc = distance_constants(Y, X);
  DistanceAudit out;
  out.pairs = pairs;
  Stream rng(seed);

  const auto& deck = X.deck;
  if (deck.kind == GroupKind::none)
    throw ConstructionError("distance audits need a deck cover");
  int rank = deck.rank;

  if (deck.kind == GroupKind::zd) {
    auto E = detail::zd_embedding(X);
    out.lower_certified = true;
    std::vector<std::array<long long, 2>> pool;
    if (rank == 1) {
      for (const auto& c : E.cells) pool.push_back({c[0], 0});
    } else {
      long long box = 0;
      for (const auto& c : E.cells)
        box = std::max({box, std::llabs(c[0]), std::llabs(c[1])});
      box = std::max<long long>(1, box / 2);
      for (long long a = -box; a <= box; ++a)
        for (long long b = -box; b <= box; ++b)
          if (E.orbit_coord.count(grp::zd_str({a, b})))
            pool.push_back({a, b});
    }
    if (pool.size() < 2) throw ConstructionError("cover too shallow to audit");
    for (int k = 0; k < pairs; ++k) {
      auto g = pool[rng.below(pool.size())];
      auto h = pool[rng.below(pool.size())];
      if (g == h) {
        --k;
        continue;
      }
      double dg = static_cast<double>(std::llabs(g[0] - h[0]) +
                                      std::llabs(g[1] - h[1]));
      double dx = norm(detail::lattice_pos(E, g) - detail::lattice_pos(E, h));
      out.worst_upper = std::max(out.worst_upper, dx / (dc.C0 * dg));
      out.worst_lower = std::max(out.worst_lower, dg / (dc.C_XG * dx));
    }
  } else {
    auto gb = geometry_constants(X);
    MetricGraph mg(X, gb.ell / 8.0);
    std::vector<std::string> pool;
    for (const auto& [w, name] : deck.orbit) pool.push_back(w);
    GroupModel G = free_group(rank);
    for (int k = 0; k < pairs; ++k) {
      const auto& gw = pool[rng.below(pool.size())];
      const auto& hw = pool[rng.below(pool.size())];
      if (gw == hw) {
        --k;
        continue;
      }
      double dg = word_length(G, group_mul(G, group_inverse(G, gw), hw));
      PointRef pg = vertex_point(X.vertex_index(deck.orbit.at(gw)));
      PointRef ph = vertex_point(X.vertex_index(deck.orbit.at(hw)));
      double dx = mg.distance(pg, ph);
      out.worst_upper = std::max(out.worst_upper, dx / (dc.C0 * dg));
      out.worst_lower = std::max(out.worst_lower, dg / (dc.C_XG * dx));
    }
  }
  out.pass = out.worst_upper <= 1 + 1e-9 && out.worst_lower <= 1 + 1e-9;
  return out;
}

// ---------------------------------------------------------------------------
// Nets

// Greedy delta-net over the identity copy of a flat cover.  Packing uses
// exact flat distances; candidates are mesh nodes at delta/8, taken in node
// order, and a candidate joins the net only when strictly farther than delta
// from every kept center.  The overlap count is the largest number of
// translated net balls containing a single probe point.
struct Net {
  double delta = 0;
  std::vector<PointRef> centers;
  std::vector<Vec2> center_pos;
  int overlap = 0;
  double coverage_worst = 0;  // max over probes of distance to the orbit net
  int probe_count = 0;
};

inline Net build_net(const Complex& X, double delta, int random_probes = 1000,
                     std::uint64_t seed = 11) {
  if (!(delta > 0)) throw RangeError("net radius must be positive");
  Net net;
  net.delta = delta;
  auto E = detail::zd_embedding(X);
  DiscreteOperator D = discretize(X, delta / 8.0);

  std::vector<int> cand;
  for (int i = 0; i < D.node_count(); ++i) {
    const PointRef& p = D.nodes[i];
    int copy = p.kind == PointRef::Kind::vertex ? X.vertices[p.cell].copy
               : p.kind == PointRef::Kind::edge ? X.edges[p.cell].copy
                                                : X.faces[p.cell].copy;
    if (detail::identity_cell(X, copy)) cand.push_back(i);
  }
  if (cand.empty()) throw EmptyDomainError("no identity-copy nodes to pack");

  double span = 0;
  std::vector<Vec2> cpos(cand.size());
  for (size_t i = 0; i < cand.size(); ++i)
    cpos[i] = detail::embedded_point(X, E, D.nodes[cand[i]]);
  for (const auto& a : cpos)
    for (const auto& b : cpos) span = std::max(span, norm(a - b));
  for (const auto& a : cpos)
    if (!detail::ball_in_region(E, a, std::min(delta, span) + 1e-9))
      throw TruncationError("net packing needs a deeper cover");

  for (size_t i = 0; i < cand.size(); ++i) {
    bool keep = true;
    for (const auto& c : net.center_pos)
      if (!(norm(cpos[i] - c) > delta)) {
        keep = false;
        break;
      }
    if (keep) {
      net.centers.push_back(D.nodes[cand[i]]);
      net.center_pos.push_back(cpos[i]);
    }
  }

  // Probes: the identity mesh nodes plus random points of the identity cells.
  std::vector<Vec2> probes = cpos;
  Stream rng(seed);
  std::vector<int> idfaces, idedges;
  for (size_t f = 0; f < X.faces.size(); ++f)
    if (detail::identity_cell(X, X.faces[f].copy))
      idfaces.push_back(static_cast<int>(f));
  for (size_t e = 0; e < X.edges.size(); ++e)
    if (detail::identity_cell(X, X.edges[e].copy))
      idedges.push_back(static_cast<int>(e));
  for (int k = 0; k < random_probes; ++k) {
    PointRef p;
    if (X.dimension == 2 && !idfaces.empty()) {
      int f = idfaces[rng.below(idfaces.size())];
      const Face& F = X.faces[f];
      double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
      for (auto q : F.chart) {
        xlo = std::min(xlo, q.x);
        xhi = std::max(xhi, q.x);
        ylo = std::min(ylo, q.y);
        yhi = std::max(yhi, q.y);
      }
      p = face_point(f, {rng.uniform(xlo, xhi), rng.uniform(ylo, yhi)});
    } else {
      int e = idedges[rng.below(idedges.size())];
      p = edge_point(e, rng.uniform(0.0, X.edges[e].length));
    }
    probes.push_back(detail::embedded_point(X, E, p));
  }
  net.probe_count = static_cast<int>(probes.size());

  const double tol = delta * 1e-12;
  for (const auto& q : probes) {
    int count = 0;
    double nearest = std::numeric_limits<double>::infinity();
    auto words = detail::lattice_in_ball(E, q, delta + span + 1);
    for (const auto& [w, wd] : words) {
      if (!E.orbit_coord.count(detail::lattice_word(E, w))) continue;
      Vec2 base = detail::lattice_pos(E, w);
      for (const auto& c : net.center_pos) {
        double d = norm(q - (base + c));
        nearest = std::min(nearest, d);
        if (d <= delta + tol) ++count;
      }
    }
    net.overlap = std::max(net.overlap, count);
    net.coverage_worst = std::max(net.coverage_worst, nearest);
  }
  return net;
}

// ---------------------------------------------------------------------------
// Transfer maps

namespace detail {

inline double bump_raw(double d, double c_sup) {
  double t = (c_sup - d) / (c_sup - 0.25);
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3 - 2 * t);
}

struct LatticeBump {
  std::array<long long, 2> g;
  double raw = 0;
};

inline std::vector<LatticeBump> bumps_at(const ZdEmbedding& E, Vec2 p,
                                         double c_sup) {
  std::vector<LatticeBump> out;
  for (const auto& [g, d] : lattice_in_ball(E, p, c_sup))
    if (d < c_sup) {
      double raw = bump_raw(d, c_sup);
      if (raw > 0) out.push_back({g, raw});
    }
  return out;
}

}  // namespace detail

// The two transfer directions between mesh functions on a flat Z^d cover and
// functions on its deck group, with every constant the comparisons need.
// chi rows exist only at nodes whose C_sup ball the truncated cover fully
// contains; consumers that would touch an incomplete row throw
// TruncationError.  All measured constants (C_g, C_over) are certified on a
// sample and reused verbatim by the audits.
struct TransferMaps {
  std::shared_ptr<Complex> X;
  GroupModel G{};
  DiscreteOperator D;
  detail::ZdEmbedding emb;
  std::vector<Vec2> node_pos;
  std::vector<char> node_safe;
  std::vector<std::vector<std::pair<int, double>>> chi;  // node -> (row, value)
  std::vector<std::string> chi_words;
  std::map<std::string, int> chi_index;

  int radius = 0;
  double h = 0;
  double p = 2;
  double diam_Y = 0;
  double delta = 0;
  Net net;
  DistanceConstants dc;
  GeometryBounds gb;

  double C_sup = 0;
  double mu_quarter = 0;  // measure of B(e, 1/4)
  double mu_sup = 0;      // measure of B(e, C_sup)
  int vol_2Csup = 0;      // lattice points within 2 C_sup of the identity
  double C_g = 0;         // measured bump gradient bound
  int C_over = 0;         // measured bump support overlap
  double chi_norm2 = 0;   // L2 norm of the identity bump over the cover
  double C1 = 0, C2 = 0;  // two-sided norm constants at p = 2
  double C_grad = 0;      // gradient comparison constant at p = 2
  double C1C2 = 0;        // eigenvalue comparison constant
  double C_ftg = 0;       // averaging comparison constant at p = 2
  double P0 = 0;
  double delta_star = 0;
  double C_delta_star = 0;  // averaged-gradient constant at delta_star
  double B_formula = 0;
  double N_delta_star = 0;  // analytic packing bound on a delta_star net
  double sum_check_worst = 0;

  int node_copy(int i) const {
    const PointRef& pt = D.nodes[i];
    return pt.kind == PointRef::Kind::vertex ? X->vertices[pt.cell].copy
           : pt.kind == PointRef::Kind::edge ? X->edges[pt.cell].copy
                                             : X->faces[pt.cell].copy;
  }
};

namespace detail {

// chi value of every bump alive at p.  Normalization divides by the raw sum,
// which the safe-node certificate guarantees is the complete one.
inline std::vector<LatticeBump> chi_at(const ZdEmbedding& E, Vec2 p,
                                       double c_sup) {
  auto bumps = bumps_at(E, p, c_sup);
  double sum = 0;
  for (const auto& b : bumps) sum += b.raw;
  if (sum <= 0) return {};
  for (auto& b : bumps) b.raw /= sum;
  return bumps;
}

inline double chi_p_norm(const ZdEmbedding& E, double c_sup, double p) {
  double acc = 0;
  if (E.rank == 1) {
    const double step = 1.0 / 512.0;
    int n = static_cast<int>(std::ceil(2 * c_sup / step));
    for (int i = 0; i < n; ++i) {
      double x = -c_sup + (i + 0.5) * (2 * c_sup / n);
      auto bumps = chi_at(E, Vec2{x, 0}, c_sup);
      for (const auto& b : bumps)
        if (b.g[0] == 0 && b.g[1] == 0)
          acc += std::pow(b.raw, p) * (2 * c_sup / n);
    }
  } else {
    const int n = static_cast<int>(std::ceil(2 * c_sup * 128));
    double cell = 2 * c_sup / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec2 q{-c_sup + (i + 0.5) * cell, -c_sup + (j + 0.5) * cell};
        auto bumps = chi_at(E, q, c_sup);
        for (const auto& b : bumps)
          if (b.g[0] == 0 && b.g[1] == 0)
            acc += std::pow(b.raw, p) * cell * cell;
      }
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace detail

inline TransferMaps build_transfer_maps(const ComplexData& base, int radius,
                                        double h, double delta = -1,
                                        std::uint64_t seed = 23) {
  TransferMaps M;
  ComplexData cd = build_truncated_cover(base, radius);
  M.X = std::make_shared<Complex>(build_complex(cd));
  if (M.X->deck.kind != GroupKind::zd)
    throw ConstructionError(
        "transfer maps need a Z^d cover; free covers have no complete "
        "partition of unity over their orbit");
  M.G = zd_group(M.X->deck.rank);
  M.radius = radius;
  M.h = h;
  M.gb = geometry_constants(*M.X);
  M.D = discretize(*M.X, h);
  M.emb = detail::zd_embedding(*M.X);

  Complex Y = build_complex(base);
  M.diam_Y = complex_diameter(Y, M.gb.ell / 8.0);
  M.delta = delta > 0 ? delta : M.diam_Y;
  M.dc = distance_constants(Y, *M.X);
  M.net = build_net(*M.X, M.delta, 1000, seed);
  M.C_sup = std::min(1.0, M.gb.ell / 2.0 + 0.25);

  M.node_pos.resize(M.D.node_count());
  for (int i = 0; i < M.D.node_count(); ++i)
    M.node_pos[i] = detail::embedded_point(*M.X, M.emb, M.D.nodes[i]);

  M.node_safe.assign(M.D.node_count(), 0);
  M.chi.assign(M.D.node_count(), {});
  for (int i = 0; i < M.D.node_count(); ++i) {
    if (!detail::ball_in_region(M.emb, M.node_pos[i], M.C_sup * (1 + 1e-12)))
      continue;
    auto bumps = detail::chi_at(M.emb, M.node_pos[i], M.C_sup);
    if (bumps.empty()) continue;
    M.node_safe[i] = 1;
    double sum = 0;
    for (const auto& b : bumps) {
      std::string w = detail::lattice_word(M.emb, b.g);
      auto it = M.chi_index.find(w);
      int row;
      if (it == M.chi_index.end()) {
        row = static_cast<int>(M.chi_words.size());
        M.chi_index[w] = row;
        M.chi_words.push_back(w);
      } else {
        row = it->second;
      }
      M.chi[i].push_back({row, b.raw});
      sum += b.raw;
    }
    M.sum_check_worst = std::max(M.sum_check_worst, std::abs(sum - 1));
  }

  PointRef e_point = vertex_point(
      M.X->vertex_index(M.X->deck.orbit.at(group_identity(M.G))));
  for (const auto& w : wedge_decomposition(*M.X, e_point, 0.25))
    M.mu_quarter += w.measure;
  for (const auto& w : wedge_decomposition(*M.X, e_point, M.C_sup))
    M.mu_sup += w.measure;
  M.vol_2Csup = static_cast<int>(
      detail::lattice_in_ball(M.emb, Vec2{0, 0}, 2 * M.C_sup).size());

  // Certify C_g and C_over on safe mesh nodes plus random interior points.
  Stream rng(seed + 1);
  std::vector<Vec2> samples;
  for (int i = 0; i < M.D.node_count(); ++i)
    if (detail::ball_in_region(M.emb, M.node_pos[i], M.C_sup + 1e-2))
      samples.push_back(M.node_pos[i]);
  double lo = -0.5 * M.emb.scale[0], hi = 1.5 * M.emb.scale[0];
  for (int k = 0; k < 2000; ++k) {
    Vec2 q{rng.uniform(lo, hi),
           M.emb.rank == 2 ? rng.uniform(-0.5 * M.emb.scale[1],
                                         1.5 * M.emb.scale[1])
                           : 0.0};
    if (detail::ball_in_region(M.emb, q, M.C_sup + 1e-2)) samples.push_back(q);
  }
  const double fd = 1e-5;
  for (const auto& q : samples) {
    auto here = detail::bumps_at(M.emb, q, M.C_sup);
    int live = 0;
    for (const auto& b : here)
      if (b.raw > 0) ++live;
    M.C_over = std::max(M.C_over, live);

    std::map<std::array<long long, 2>, std::array<double, 4>> table;
    auto scan = [&](Vec2 at, int slot) {
      for (const auto& b : detail::chi_at(M.emb, at, M.C_sup))
        table[b.g][slot] = b.raw;
    };
    scan(Vec2{q.x + fd, q.y}, 0);
    scan(Vec2{q.x - fd, q.y}, 1);
    if (M.emb.rank == 2) {
      scan(Vec2{q.x, q.y + fd}, 2);
      scan(Vec2{q.x, q.y - fd}, 3);
    }
    for (const auto& [g, v] : table) {
      double gx = (v[0] - v[1]) / (2 * fd);
      double gy = M.emb.rank == 2 ? (v[2] - v[3]) / (2 * fd) : 0.0;
      M.C_g = std::max(M.C_g, std::hypot(gx, gy));
    }
  }

  M.chi_norm2 = detail::chi_p_norm(M.emb, M.C_sup, 2);
  M.C1 = std::sqrt(M.mu_quarter);
  M.C2 = std::sqrt(static_cast<double>(M.C_over)) * M.chi_norm2;
  double S = M.G.generator_count();
  M.C_grad = M.C_g * M.C_g * M.mu_sup * double(M.vol_2Csup) * M.vol_2Csup * S * S;
  M.C1C2 = 2 * M.C_grad / M.mu_quarter;
  M.P0 = M.gb.P0;

  double C_P = std::pow(2 * M.p * M.P0, M.p);
  double mu_ball_delta = 0;
  for (const auto& c : M.net.center_pos) {
    if (!detail::ball_in_region(M.emb, c, M.delta * (1 + 1e-9)))
      throw TruncationError("averaging balls spill past the cover");
    double m = 0;
    for (int i = 0; i < M.D.node_count(); ++i)
      if (norm(M.node_pos[i] - c) <= M.delta * (1 + 1e-12)) m += M.D.mass[i];
    mu_ball_delta = std::max(mu_ball_delta, m);
  }
  M.C_ftg = std::max(std::pow(2, M.p) * C_P * M.net.overlap,
                     std::pow(2, M.p) * mu_ball_delta);

  M.delta_star = std::sqrt(1.0 / (2 * M.C_grad));
  {
    double R = 2 * M.diam_Y;
    double mu_R = 0;
    for (const auto& c : M.net.center_pos) {
      if (!detail::ball_in_region(M.emb, c, R * (1 + 1e-9)))
        throw TruncationError("gradient-average balls spill past the cover");
      double m = 0;
      for (int i = 0; i < M.D.node_count(); ++i)
        if (norm(M.node_pos[i] - c) <= R * (1 + 1e-12)) m += M.D.mass[i];
      mu_R = std::max(mu_R, m);
    }
    // At delta_star every point of the flat cover is interior, so the tiny
    // balls have exact Euclidean measure.
    double mu_ds = M.emb.rank == 1 ? 2 * M.delta_star
                                   : M_PI * M.delta_star * M.delta_star;
    int count_R = 0;
    for (const auto& q : samples)
      count_R = std::max(
          count_R,
          static_cast<int>(detail::lattice_in_ball(M.emb, q, R).size()));
    double N = static_cast<double>(M.net.centers.size());
    M.C_delta_star =
        (mu_R / (mu_ds * mu_ds)) * N * count_R * C_P * std::pow(R, M.p);
    M.B_formula = 4 * M.C_delta_star / (2 - std::sqrt(2.0));
    double c_min = M.emb.rank == 1
                       ? M.delta_star / 2
                       : (M.gb.alpha / 2) * std::pow(M.delta_star / 2, 2);
    double mu_Y = Y.total_measure();
    M.N_delta_star = std::ceil((mu_Y + 4 * M.delta_star) / c_min);
  }
  return M;
}

// ---------------------------------------------------------------------------
// Extension: group functions to mesh functions

// Extend a finitely supported group function to the mesh through the bump
// partition.  Every word carrying a nonzero value must have its 2 C_sup ball
// inside the cover; then each node its bump touches holds a complete row.
inline Eigen::VectorXd smooth_extend(const TransferMaps& M,
                                     const std::map<std::string, double>& f) {
  for (const auto& [w, val] : f) {
    if (val == 0) continue;
    auto v = grp::zd_parse(w, M.emb.rank);
    Vec2 pos = detail::lattice_pos(M.emb, {v[0], M.emb.rank == 2 ? v[1] : 0});
    if (!detail::ball_in_region(M.emb, pos, 2 * M.C_sup * (1 + 1e-9)))
      throw TruncationError("support word " + w + " reaches past the cover");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(M.D.node_count());
  for (int i = 0; i < M.D.node_count(); ++i)
    for (const auto& [row, weight] : M.chi[i]) {
      auto it = f.find(M.chi_words[row]);
      if (it != f.end()) out[i] += weight * it->second;
    }
  return out;
}

// Two-sided norm comparison and the gradient comparison for the extension,
// over random finitely supported group functions:
//   C1 ||f||_p <= ||ext f||_p <= C2 ||f||_p,
//   ||grad ext f||_p^p <= C_grad ||grad f||_p^p.
struct SmoothExtendAudit {
  int samples = 0;
  double p = 2;
  double worst_lower = 0;
  double worst_upper = 0;
  double worst_grad = 0;
  bool pass = false;
};

namespace detail {

inline double group_gradient_pp(const GroupModel& G,
                                const std::map<std::string, double>& f,
                                double p) {
  double S = G.generator_count();
  std::set<std::string> domain;
  for (const auto& [w, v] : f) {
    domain.insert(w);
    for (const auto& s : group_generators(G)) domain.insert(group_mul(G, w, s));
  }
  auto value = [&](const std::string& w) {
    auto it = f.find(w);
    return it == f.end() ? 0.0 : it->second;
  };
  double acc = 0;
  for (const auto& w : domain) {
    double g2 = 0;
    for (const auto& s : group_generators(G)) {
      double d = value(w) - value(group_mul(G, w, s));
      g2 += d * d;
    }
    acc += std::pow(std::sqrt(g2 / S), p);
  }
  return acc;
}

}  // namespace detail

inline SmoothExtendAudit audit_smooth_extend(const TransferMaps& M, int samples,
                                             double p = 2,
                                             std::uint64_t seed = 31) {
  if (samples < 1) throw RangeError("sample count must be positive");
  SmoothExtendAudit audit;
  audit.samples = samples;
  audit.p = p;

  double C1p = std::pow(M.mu_quarter, 1.0 / p);
  double C2p = std::pow(static_cast<double>(M.C_over), (p - 1) / p) *
               detail::chi_p_norm(M.emb, M.C_sup, p);
  double S = M.G.generator_count();
  double Cgradp = std::pow(M.C_g, p) * M.mu_sup *
                  std::pow(static_cast<double>(M.vol_2Csup), p) *
                  std::pow(S, p);

  std::vector<std::string> safe_words;
  for (const auto& w : M.chi_words) {
    auto v = grp::zd_parse(w, M.emb.rank);
    Vec2 pos = detail::lattice_pos(M.emb, {v[0], M.emb.rank == 2 ? v[1] : 0});
    if (detail::ball_in_region(M.emb, pos, 2 * M.C_sup * (1 + 1e-6)))
      safe_words.push_back(w);
  }
  if (safe_words.empty())
    throw TruncationError("no word has a fully contained extension bump");

  auto links = mesh_links(M.D);
  Stream rng(seed);
  for (int k = 0; k < samples; ++k) {
    std::map<std::string, double> f;
    if (k == 0) {
      f[group_identity(M.G)] = 1;
    } else if (k == 1) {
      for (const auto& w : safe_words) f[w] = 1;
    } else {
      for (const auto& w : safe_words)
        if (rng.uniform() < 0.6) f[w] = rng.uniform(-1.0, 1.0);
      if (f.empty()) f[safe_words[rng.below(safe_words.size())]] = 1;
    }
    Eigen::VectorXd F = smooth_extend(M, f);
    double norm_g = 0;
    for (const auto& [w, v] : f) norm_g += std::pow(std::abs(v), p);
    norm_g = std::pow(norm_g, 1.0 / p);
    double norm_x = lp_norm(M.D, F, p);
    double grad_x = gradient_lp(links, F, p);
    double grad_g_pp = detail::group_gradient_pp(M.G, f, p);

    audit.worst_lower = std::max(audit.worst_lower, C1p * norm_g / norm_x);
    audit.worst_upper = std::max(audit.worst_upper, norm_x / (C2p * norm_g));
    if (grad_g_pp > 0)
      audit.worst_grad = std::max(
          audit.worst_grad, std::pow(grad_x, p) / (Cgradp * grad_g_pp));
  }
  audit.pass = audit.worst_lower <= 1 + 1e-9 && audit.worst_upper <= 1 + 1e-9 &&
               audit.worst_grad <= 1 + 1e-9;
  return audit;
}

// ---------------------------------------------------------------------------
// Averaging: mesh functions to group functions

struct GroupAveraged {
  std::vector<std::string> words;
  Eigen::MatrixXd values;  // word rows by net centers
};

// Ball average of a mesh function over every translated net ball within the
// word-metric ball of the given radius.
inline GroupAveraged group_average(const TransferMaps& M,
                                   const Eigen::VectorXd& f, int word_radius) {
  if (f.size() != M.D.node_count())
    throw RangeError("function length does not match the mesh");
  if (word_radius < 0) throw RangeError("word radius must be nonnegative");
  GroupAveraged out;
  out.words = group_ball(M.G, word_radius);
  int N = static_cast<int>(M.net.centers.size());
  out.values.setZero(static_cast<int>(out.words.size()), N);
  for (size_t r = 0; r < out.words.size(); ++r) {
    auto v = grp::zd_parse(out.words[r], M.emb.rank);
    Vec2 base = detail::lattice_pos(M.emb, {v[0], M.emb.rank == 2 ? v[1] : 0});
    for (int i = 0; i < N; ++i) {
      Vec2 c = base + M.net.center_pos[i];
      if (!detail::ball_in_region(M.emb, c, M.delta * (1 + 1e-9)))
        throw TruncationError("averaging ball at " + out.words[r] +
                              " reaches past the cover");
      double mass = 0, acc = 0;
      for (int n = 0; n < M.D.node_count(); ++n) {
        Vec2 d = M.node_pos[n] - c;
        if (std::abs(d.x) > M.delta || std::abs(d.y) > M.delta) continue;
        if (norm(d) <= M.delta * (1 + 1e-12)) {
          mass += M.D.mass[n];
          acc += M.D.mass[n] * f[n];
        }
      }
      out.values(static_cast<int>(r), i) = acc / mass;
    }
  }
  return out;
}

// Audits of the averaging direction.  Both constants carry the uniform
// Poincare constant raised to p, so the bounds are astronomically slack;
// the checks exercise the definitions and the inequality direction, and the
// measured ratios are reported for the record.
struct GroupAverageAudit {
  int samples = 0;
  double r = 0;        // mesh ball radius for the left side
  double rg = 0;       // word radius actually used on the right side
  bool rg_truncated = false;
  double C = 0;        // averaging comparison constant
  double C_grad_avg = 0;  // averaged-gradient constant at the net radius
  double worst_norm = 0;
  double worst_grad = 0;
  bool pass = false;
};

namespace detail {

// Averaged-gradient comparison constant at radius delta:
//   max_i [mu(B(g_i, R)) / mu(B(g_i, delta))^2] N max_x #{B(g, R) owns x}
//   C_P R^p,  R = 2 diam Y.
// Ball measures at the net radius come from mesh quadrature; at delta_star
// they are the exact flat ones (every point of the cover is interior).
inline double averaged_gradient_constant(const TransferMaps& M, double delta) {
  double R = 2 * M.diam_Y;
  double C_P = std::pow(2 * M.p * M.P0, M.p);
  double worst_ratio = 0;
  for (const auto& c : M.net.center_pos) {
    if (!ball_in_region(M.emb, c, R * (1 + 1e-9)))
      throw TruncationError("gradient-average balls spill past the cover");
    double mu_R = 0, mu_d = 0;
    for (int i = 0; i < M.D.node_count(); ++i) {
      double d = norm(M.node_pos[i] - c);
      if (d <= R * (1 + 1e-12)) mu_R += M.D.mass[i];
      if (d <= delta * (1 + 1e-12)) mu_d += M.D.mass[i];
    }
    worst_ratio = std::max(worst_ratio, mu_R / (mu_d * mu_d));
  }
  int count_R = 0;
  for (const auto& c : M.node_pos)
    count_R = std::max(
        count_R, static_cast<int>(lattice_in_ball(M.emb, c, R).size()));
  double N = static_cast<double>(M.net.centers.size());
  return worst_ratio * N * count_R * C_P * std::pow(R, M.p);
}

}  // namespace detail

inline GroupAverageAudit audit_group_average(const TransferMaps& M, double r,
                                             int samples,
                                             std::uint64_t seed = 41) {
  if (samples < 1) throw RangeError("sample count must be positive");
  GroupAverageAudit audit;
  audit.samples = samples;
  audit.r = r;
  audit.C = M.C_ftg;
  audit.C_grad_avg = detail::averaged_gradient_constant(M, M.delta);

  // Word radius: C_XG (r + delta + diam Y) from the distance comparison,
  // shrunk to the largest radius whose averaging balls the truncation still
  // contains.  A smaller right-hand ball only strengthens the inequality.
  double rg_exact = M.dc.C_XG * (r + M.delta + M.diam_Y);
  int rg = static_cast<int>(std::floor(rg_exact));
  while (rg > 0) {
    bool ok = true;
    for (const auto& w : group_ball(M.G, rg)) {
      auto v = grp::zd_parse(w, M.emb.rank);
      Vec2 base =
          detail::lattice_pos(M.emb, {v[0], M.emb.rank == 2 ? v[1] : 0});
      for (const auto& c : M.net.center_pos)
        if (!detail::ball_in_region(M.emb, base + c, M.delta * (1 + 1e-9))) {
          ok = false;
          break;
        }
      if (!ok) break;
    }
    if (ok) break;
    --rg;
  }
  if (rg < 1)
    throw TruncationError("cover too shallow for any averaging word ball");
  audit.rg = rg;
  audit.rg_truncated = rg < static_cast<int>(std::floor(rg_exact));

  auto links = mesh_links(M.D);
  auto grad_ball_pp = [&](const Eigen::VectorXd& f, double rad) {
    double acc = 0;
    for (const auto& L : links) {
      if (norm(M.node_pos[L.a]) > rad || norm(M.node_pos[L.b]) > rad) continue;
      acc += L.measure * std::pow(std::abs(f[L.b] - f[L.a]) / L.h, M.p);
    }
    return acc;
  };

  Stream rng(seed);
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd f(M.D.node_count());
    if (k == 0) {
      for (int i = 0; i < M.D.node_count(); ++i) f[i] = M.node_pos[i].x;
    } else if (k == 1) {
      for (int i = 0; i < M.D.node_count(); ++i)
        f[i] = std::max(0.0, 1.0 - norm(M.node_pos[i]));
    } else {
      double a[3], kx[3], ky[3], ph[3];
      for (int j = 0; j < 3; ++j) {
        a[j] = rng.uniform(-1.0, 1.0);
        kx[j] = rng.uniform(-2.0, 2.0);
        ky[j] = rng.uniform(-2.0, 2.0);
        ph[j] = rng.uniform(0.0, 2 * M_PI);
      }
      for (int i = 0; i < M.D.node_count(); ++i) {
        Vec2 q = M.node_pos[i];
        f[i] = 0;
        for (int j = 0; j < 3; ++j)
          f[i] += a[j] * std::cos(kx[j] * q.x + ky[j] * q.y + ph[j]);
      }
    }

    auto avg = group_average(M, f, rg);

    double ball_mass = 0, ball_acc = 0;
    for (int i = 0; i < M.D.node_count(); ++i)
      if (norm(M.node_pos[i]) <= r) {
        ball_mass += M.D.mass[i];
        ball_acc += M.D.mass[i] * f[i];
      }
    if (ball_mass <= 0) throw EmptyDomainError("audit ball misses the mesh");
    for (double c : {ball_acc / ball_mass, 0.0}) {
      double lhs = 0;
      for (int i = 0; i < M.D.node_count(); ++i)
        if (norm(M.node_pos[i]) <= r)
          lhs += M.D.mass[i] * std::pow(std::abs(f[i] - c), M.p);
      double grad_pp = grad_ball_pp(f, r + 2 * M.delta);
      double gterm = 0;
      for (int w = 0; w < avg.values.rows(); ++w)
        for (int i = 0; i < avg.values.cols(); ++i)
          gterm += std::pow(std::abs(avg.values(w, i) - c), M.p);
      double rhs =
          audit.C * (std::pow(M.delta, M.p) * grad_pp + gterm);
      if (rhs > 0)
        audit.worst_norm = std::max(audit.worst_norm, lhs / rhs);
    }

    // Averaged-gradient side: group gradient of the averages against the
    // mesh gradient.
    std::map<std::string, int> row_of;
    for (size_t w = 0; w < avg.words.size(); ++w)
      row_of[avg.words[w]] = static_cast<int>(w);
    double lhs_grad = 0;
    double S = M.G.generator_count();
    for (const auto& w : group_ball(M.G, rg - 1)) {
      int row = row_of.at(w);
      double g2 = 0;
      for (const auto& s : group_generators(M.G)) {
        auto it = row_of.find(group_mul(M.G, w, s));
        if (it == row_of.end()) continue;
        for (int i = 0; i < avg.values.cols(); ++i) {
          double d = avg.values(row, i) - avg.values(it->second, i);
          g2 += d * d / S;
        }
      }
      lhs_grad += std::pow(std::sqrt(g2), M.p);
    }
    double rhs_grad =
        audit.C_grad_avg * std::pow(gradient_lp(links, f, M.p), M.p);
    if (rhs_grad > 0)
      audit.worst_grad = std::max(audit.worst_grad, lhs_grad / rhs_grad);
  }
  audit.pass = audit.worst_norm <= 1 + 1e-9 && audit.worst_grad <= 1 + 1e-9;
  return audit;
}

// ---------------------------------------------------------------------------
// Eigenvalue and trace comparison

// Dirichlet eigenvalues of the neighborhood A0 of a finite lattice set A
// against the spectrum of the walk operator restricted to A:
//   lambda_i(A0) <= C1C2 (1 - beta_i)  for every index,
//   Tr(K_A^{2n+2}) <= 2 Tr(H_{2n/C1C2}^{A0}),
// plus the trace split certificate at threshold B and the degenerate
// small-eigenvalue row at the formula's own B.
struct TraceRow {
  int n = 0;
  double lhs = 0;
  double rhs = 0;
  bool pass = false;
};

struct SplitRow {
  double B = 0;
  double t = 0;
  double lhs = 0;   // full trace at time t
  double rhs = 0;   // small-eigenvalue sum plus the tail certificate
  int small_count = 0;
  bool pass = false;
};

struct EigenComparison {
  std::vector<std::string> A;
  double radius_A0 = 0;
  int nodes_A0 = 0;
  double mu_A0 = 0;
  double C1C2 = 0;
  std::vector<double> lambda;  // ascending, one per element of A
  std::vector<double> beta;    // descending by value, one per element of A
  double worst_index_ratio = 0;
  bool index_pass = false;
  std::vector<TraceRow> trace;
  std::vector<SplitRow> splits;
  double sup_h_half = 0;
  double B_formula = 0;
  double kan_lhs = 0;
  double kan_rhs = 0;
  bool kan_pass = false;
  double sandwich_lo = 0, sandwich_mid = 0, sandwich_hi = 0;
  bool sandwich_pass = false;
  bool pass = false;
};

inline EigenComparison eigenvalue_comparison(const TransferMaps& M,
                                             const std::vector<std::string>& A) {
  if (A.empty()) throw EmptyDomainError("A is empty");
  if (A.size() > 3000) throw SizeError("restricted walk spectrum too large");
  EigenComparison out;
  out.A = A;
  out.C1C2 = M.C1C2;
  out.radius_A0 = std::max(M.gb.R0, M.C_sup);

  std::vector<Vec2> apos;
  for (const auto& w : A) {
    auto v = grp::zd_parse(w, M.emb.rank);
    Vec2 pos = detail::lattice_pos(M.emb, {v[0], M.emb.rank == 2 ? v[1] : 0});
    if (!detail::ball_in_region(M.emb, pos, out.radius_A0 + M.h))
      throw TruncationError("neighborhood of " + w + " reaches past the cover");
    apos.push_back(pos);
  }

  std::vector<char> keep(M.D.node_count(), 0);
  for (int i = 0; i < M.D.node_count(); ++i)
    for (const auto& a : apos)
      if (norm(M.node_pos[i] - a) < out.radius_A0) {
        keep[i] = 1;
        break;
      }
  DiscreteOperator W = dirichlet_subdomain(M.D, keep);
  out.nodes_A0 = W.node_count();
  out.mu_A0 = W.mass.sum();
  if (out.nodes_A0 > 3500)
    throw SizeError("neighborhood mesh too large for a dense solve");
  auto S = eigensolve(W, W.node_count(), 3500);

  auto beta = restricted_walk_spectrum(M.G, A);
  std::sort(beta.begin(), beta.end(), std::greater<double>());
  out.beta = beta;
  out.lambda.assign(S.eigenvalues.begin(),
                    S.eigenvalues.begin() +
                        std::min<size_t>(A.size(), S.eigenvalues.size()));

  out.index_pass = out.lambda.size() == A.size();
  for (size_t i = 0; i < out.lambda.size(); ++i) {
    double bound = out.C1C2 * (1 - beta[i]);
    double ratio = bound > 0 ? out.lambda[i] / bound
                             : (out.lambda[i] <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity());
    out.worst_index_ratio = std::max(out.worst_index_ratio, ratio);
    if (!(ratio <= 1 + 1e-9)) out.index_pass = false;
  }

  for (int n = 1; n <= 10; ++n) {
    TraceRow row;
    row.n = n;
    for (double b : beta) row.lhs += std::pow(b, 2 * n + 2);
    for (double l : S.eigenvalues)
      row.rhs += 2 * std::exp(-(2.0 * n / out.C1C2) * l);
    row.pass = row.lhs <= row.rhs * (1 + 1e-9);
    out.trace.push_back(row);
  }

  Eigen::VectorXd diag_half = Eigen::VectorXd::Zero(W.node_count());
  for (int c = 0; c < S.vectors.cols(); ++c)
    diag_half += std::exp(-S.eigenvalues[c] / 2) *
                 S.vectors.col(c).cwiseProduct(S.vectors.col(c));
  out.sup_h_half = diag_half.maxCoeff();

  double lambda1 = S.eigenvalues.front();
  double lambda_mid = S.eigenvalues[S.eigenvalues.size() / 2];
  out.B_formula = M.B_formula;
  for (double B : {1.0 / lambda1, 1.0 / lambda_mid, M.B_formula}) {
    for (double t : {1.0, 2.0, 5.0}) {
      SplitRow row;
      row.B = B;
      row.t = t;
      double small = 0;
      for (double l : S.eigenvalues) {
        row.lhs += std::exp(-t * l);
        if (l <= 1.0 / B) {
          small += std::exp(-t * l);
          ++row.small_count;
        }
      }
      row.rhs = small + out.sup_h_half * out.mu_A0 * std::exp(-t / (2 * B));
      row.pass = row.lhs <= row.rhs * (1 + 1e-9);
      out.splits.push_back(row);
    }
  }

  // The formula's own threshold sits below the spectral floor, so the
  // small-eigenvalue sum is empty and the walk side degenerates to a count.
  {
    int n = 5;
    for (double l : S.eigenvalues)
      if (l <= 1.0 / M.B_formula) out.kan_lhs += std::exp(-2.0 * n * l);
    int lag = static_cast<int>(
        std::floor(n / (M.B_formula * (2 - std::sqrt(2.0)))));
    double p_lag = group_return_probability(M.G, 2 * lag);
    out.kan_rhs = static_cast<double>(A.size()) * M.N_delta_star * p_lag;
    out.kan_pass = out.kan_lhs <= out.kan_rhs * (1 + 1e-9);
  }

  // Volume sandwich for the union of delta_star balls around the orbit of A:
  // at that radius the balls are disjoint and every point of the flat cover
  // is interior, so each ball has exact Euclidean measure and the lower side
  // is attained with equality.  The upper side multiplies by the measure of
  // the base complex, recovered as measure per deck copy.
  {
    double mu_ball = M.emb.rank == 1 ? 2 * M.delta_star
                                     : M_PI * M.delta_star * M.delta_star;
    double N = static_cast<double>(M.net.centers.size());
    out.sandwich_mid = static_cast<double>(A.size()) * N * mu_ball;
    out.sandwich_lo = out.sandwich_mid;
    double mu_Y = M.X->total_measure() /
                  static_cast<double>(std::max<size_t>(1, M.X->deck.words.size()));
    out.sandwich_hi = static_cast<double>(A.size()) * N * mu_Y;
    out.sandwich_pass = out.sandwich_lo <= out.sandwich_mid * (1 + 1e-9) &&
                        out.sandwich_mid <= out.sandwich_hi * (1 + 1e-9);
  }

  out.pass = out.index_pass && out.kan_pass && out.sandwich_pass;
  for (const auto& r : out.trace) out.pass = out.pass && r.pass;
  for (const auto& r : out.splits) out.pass = out.pass && r.pass;
  return out;
}

// ---------------------------------------------------------------------------
// Large-time comparison

struct LargeTimeRow {
  double t = 0;
  double walk = 0;   // return probability at lag 2 floor(t)
  double sup_h = 0;  // largest diagonal heat value over identity-copy nodes
  double ratio = 0;
};

struct LargeTimeReport {
  GroupModel G{};
  int radius = 0;
  double h = 0;
  bool dirichlet = false;
  double horizon = 0;
  std::vector<LargeTimeRow> rows;
  double ratio_min = 0, ratio_max = 0;
  double walk_rate = 0;  // least-squares log slope per unit time
  double heat_rate = 0;
};

namespace detail {

inline DiscreteOperator exposed_dirichlet(const Complex& X,
                                          const DiscreteOperator& D) {
  std::set<std::string> expo(X.deck.exposed.begin(), X.deck.exposed.end());
  std::vector<char> keep(D.node_count(), 1);
  for (size_t e = 0; e < X.edges.size(); ++e)
    if (expo.count(X.edges[e].id))
      for (int node : D.edge_mesh[e].node) keep[node] = 0;
  for (size_t v = 0; v < X.vertices.size(); ++v)
    if (expo.count(X.vertices[v].id) && D.vertex_node[v] >= 0)
      keep[D.vertex_node[v]] = 0;
  return dirichlet_subdomain(D, keep);
}

inline double log_slope(const std::vector<double>& t,
                        const std::vector<double>& v) {
  double n = static_cast<double>(t.size());
  double st = 0, sv = 0, stt = 0, stv = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    double lv = std::log(v[i]);
    st += t[i];
    sv += lv;
    stt += t[i] * t[i];
    stv += t[i] * lv;
  }
  return (n * stv - st * sv) / (n * stt - st * st);
}

// Iterated Aitken extrapolation of a convergent sequence.
inline double aitken_limit(std::vector<double> x) {
  while (x.size() >= 3) {
    std::vector<double> y;
    for (size_t i = 0; i + 2 < x.size(); ++i) {
      double d1 = x[i + 1] - x[i], d2 = x[i + 2] - x[i + 1];
      double den = d2 - d1;
      if (std::abs(den) < 1e-15 * (std::abs(d1) + std::abs(d2)) ||
          den == 0) {
        y.push_back(x[i + 2]);
      } else {
        y.push_back(x[i + 2] - d2 * d2 / den);
      }
    }
    x = std::move(y);
  }
  return x.back();
}

}  // namespace detail

// Heat diagonal on a truncated cover against the deck group's walk return
// probability.  Z^d covers use the plain (Neumann) mesh, valid while the
// heat cannot feel the truncation: every requested time must stay below the
// horizon (radius * ell)^2 / 4.  Free covers impose Dirichlet conditions
// along the exposed seams, which only lowers the diagonal, so those rows are
// one-sided for every time.
inline LargeTimeReport large_time_compare(const ComplexData& base, int radius,
                                          double h,
                                          const std::vector<double>& ts) {
  if (ts.empty()) throw RangeError("no sample times");
  ComplexData cd = build_truncated_cover(base, radius);
  Complex X = build_complex(cd);
  auto gb = geometry_constants(X);

  LargeTimeReport rep;
  rep.radius = radius;
  rep.h = h;
  rep.horizon = std::pow(radius * gb.ell, 2) / 4.0;
  rep.dirichlet = X.deck.kind == GroupKind::free_group;
  rep.G = X.deck.kind == GroupKind::zd ? zd_group(X.deck.rank)
                                       : free_group(X.deck.rank);
  if (!rep.dirichlet)
    for (double t : ts)
      if (t > rep.horizon)
        throw HorizonError("time " + csv::format_double(t) +
                           " exceeds the truncation horizon " +
                           csv::format_double(rep.horizon));

  DiscreteOperator D = discretize(X, h);
  DiscreteOperator W = rep.dirichlet ? detail::exposed_dirichlet(X, D) : std::move(D);
  if (W.node_count() > 3000)
    throw SizeError("cover mesh too large for a dense solve");
  auto S = eigensolve(W, W.node_count(), 3000);

  std::vector<int> watch;
  for (int i = 0; i < W.node_count(); ++i) {
    const PointRef& p = W.nodes[i];
    int copy = p.kind == PointRef::Kind::vertex ? X.vertices[p.cell].copy
               : p.kind == PointRef::Kind::edge ? X.edges[p.cell].copy
                                                : X.faces[p.cell].copy;
    if (detail::identity_cell(X, copy)) watch.push_back(i);
  }
  if (watch.empty()) throw EmptyDomainError("no identity-copy nodes survive");

  Eigen::MatrixXd sq = S.vectors.cwiseProduct(S.vectors);
  std::vector<double> tcol, wcol, hcol;
  for (double t : ts) {
    Eigen::VectorXd weights(S.eigenvalues.size());
    for (size_t c = 0; c < S.eigenvalues.size(); ++c)
      weights[static_cast<int>(c)] = std::exp(-S.eigenvalues[c] * t);
    LargeTimeRow row;
    row.t = t;
    for (int i : watch)
      row.sup_h = std::max(row.sup_h, sq.row(i).dot(weights));
    int n = static_cast<int>(std::floor(t));
    row.walk = group_return_probability(rep.G, 2 * n);
    row.ratio = row.walk / row.sup_h;
    rep.rows.push_back(row);
    tcol.push_back(t);
    wcol.push_back(row.walk);
    hcol.push_back(row.sup_h);
  }
  rep.ratio_min = rep.rows.front().ratio;
  rep.ratio_max = rep.rows.front().ratio;
  for (const auto& r : rep.rows) {
    rep.ratio_min = std::min(rep.ratio_min, r.ratio);
    rep.ratio_max = std::max(rep.ratio_max, r.ratio);
  }
  rep.walk_rate = detail::log_slope(tcol, wcol);
  rep.heat_rate = detail::log_slope(tcol, hcol);
  return rep;
}

// Smallest Dirichlet eigenvalue of a truncated free cover with its exposed
// seams grounded.
inline double dirichlet_gap(const ComplexData& base, int radius, double h) {
  ComplexData cd = build_truncated_cover(base, radius);
  Complex X = build_complex(cd);
  if (X.deck.kind != GroupKind::free_group)
    throw ConstructionError("seam gaps are a free-cover quantity");
  DiscreteOperator D = discretize(X, h);
  DiscreteOperator W = detail::exposed_dirichlet(X, D);
  auto S = eigensolve(W, 1, 400);
  return S.eigenvalues.front();
}

// Functional-inequality audit tying the best constant in
// ||f||_2 <= C ||grad f||_2 to the heat decay rate: the trace log-slope,
// measured where the trace has become single-mode, times C^2 must sit at 1,
// and the shifted diagonal bound h_t <= h_t' exp(-(t - t')/C^2) must hold.
struct HeatDecayAudit {
  double lambda1 = 0;
  double C_meas = 0;
  double rate = 0;
  double rate_time = 0;  // left end of the window the slope was read from
  double product = 0;    // rate * C_meas^2
  double worst_shift = 0;
  bool pass = false;
};

inline HeatDecayAudit heat_decay_audit(const DiscreteOperator& W,
                                       const SpectralDecomposition& S,
                                       int samples, std::uint64_t seed = 59) {
  HeatDecayAudit audit;
  audit.lambda1 = S.eigenvalues.front();
  if (!(audit.lambda1 > 0))
    throw DegenerateError("decay audit needs a positive spectral floor");

  int modes = std::min<int>(8, static_cast<int>(S.eigenvalues.size()));
  Stream rng(seed);
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd f;
    if (k == 0) {
      f = S.vectors.col(0);
    } else {
      f = Eigen::VectorXd::Zero(W.node_count());
      for (int m = 0; m < modes; ++m)
        f += rng.uniform(-1.0, 1.0) * S.vectors.col(m);
    }
    double n2 = lp_norm(W, f, 2);
    double e = energy(W, f);
    if (e > 0) audit.C_meas = std::max(audit.C_meas, n2 / std::sqrt(e));
  }

  auto trace_at = [&](double t) {
    double acc = 0;
    for (double l : S.eigenvalues) acc += std::exp(-l * t);
    return acc;
  };
  double base_t = 1.0 / audit.lambda1;
  for (double t1 : {3 * base_t, 6 * base_t, 12 * base_t, 24 * base_t}) {
    double t2 = t1 + 4 * base_t;
    audit.rate = (std::log(trace_at(t1)) - std::log(trace_at(t2))) / (t2 - t1);
    audit.rate_time = t1;
    if (audit.rate <= audit.lambda1 * 1.08) break;
  }
  audit.product = audit.rate * audit.C_meas * audit.C_meas;

  double C2 = audit.C_meas * audit.C_meas;
  double tp = 5 * base_t;
  Eigen::MatrixXd sq = S.vectors.cwiseProduct(S.vectors);
  auto diag_at = [&](int node, double t) {
    double acc = 0;
    for (size_t c = 0; c < S.eigenvalues.size(); ++c)
      acc += std::exp(-S.eigenvalues[c] * t) * sq(node, static_cast<int>(c));
    return acc;
  };
  Stream zrng(seed + 1);
  for (int k = 0; k < 20; ++k) {
    int node = static_cast<int>(zrng.below(W.node_count()));
    double ref = diag_at(node, tp);
    if (ref <= 0) continue;
    for (double t : {tp + 3 * base_t, tp + 7 * base_t}) {
      double bound = ref * std::exp(-(t - tp) / C2);
      audit.worst_shift =
          std::max(audit.worst_shift, diag_at(node, t) / bound);
    }
  }
  audit.pass = audit.product >= 0.9 && audit.product <= 1.1 &&
               audit.worst_shift <= 1 + 1e-6;
  return audit;
}

}  // namespace polyheat
