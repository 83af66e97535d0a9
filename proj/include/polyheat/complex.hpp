#pragma once

// Euclidean polyhedral complexes of dimension 1 and 2: cells glued isometrically
// along faces, with admissibility validation (dimensional homogeneity, local
// chainability) and canonical point references.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "polyheat/errors.hpp"

namespace polyheat {

struct Vec2 {
  double x = 0, y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Vertex {
  std::string id;
  std::vector<int> edges;  // incident edge indices
  std::vector<int> faces;  // incident face indices
  int copy = -1;           // deck-copy index, -1 when the complex has no deck
};

struct Edge {
  std::string id;
  int ends[2] = {-1, -1};
  double length = 0;
  std::vector<int> faces;
  int copy = -1;
};

struct Face {
  std::string id;
  std::vector<int> cycle;   // vertex indices in boundary order
  std::vector<int> edges;   // edges[i] joins cycle[i] and cycle[i+1]
  std::vector<Vec2> chart;  // planar coordinates of cycle vertices
  double area = 0;
  double min_angle = 0;  // smallest interior angle, radians
  int copy = -1;
};

enum class GroupKind { none, zd, free_group };

// Annotation carried by complexes built as truncated covers: which group acts,
// the truncation radius, and the word labelling each copy of the base complex.
struct DeckInfo {
  GroupKind kind = GroupKind::none;
  int rank = 0;
  int radius = -1;
  std::vector<std::string> words;  // copy index -> canonical word
  int identity_copy = -1;
  // cells whose deck-rule partner fell outside the truncation; meshes over
  // the cover impose Dirichlet conditions along them
  std::vector<std::string> exposed;
  // word -> final name of that copy's base vertex (the first declared one)
  std::map<std::string, std::string> orbit;
};

struct PointRef {
  enum class Kind : int { vertex = 0, edge = 1, face = 2 };
  Kind kind = Kind::vertex;
  int cell = 0;
  double s = 0;  // arclength offset from edge.ends[0], edge points only
  Vec2 uv{};     // chart coordinates, face points only
};

inline PointRef vertex_point(int v) { return {PointRef::Kind::vertex, v, 0, {}}; }
inline PointRef edge_point(int e, double s) { return {PointRef::Kind::edge, e, s, {}}; }
inline PointRef face_point(int f, Vec2 uv) { return {PointRef::Kind::face, f, 0, uv}; }

// Raw cell data prior to validation.  Ids are strings; edge/face references go
// by id.  FaceData::edges may be left empty when the edge between consecutive
// cycle vertices is unambiguous.
struct VertexData {
  std::string id;
  int copy = -1;
};
struct EdgeData {
  std::string id;
  std::string ends[2];
  double length = 0;
  int copy = -1;
};
struct FaceData {
  std::string id;
  std::vector<std::string> cycle;
  std::vector<std::string> edges;
  std::vector<Vec2> chart;
  int copy = -1;
};

struct GluingRule {
  std::string cell;    // cell id in the base complex
  std::string action;  // group element: "1,0" for zd, reduced word for free
  std::string target;  // cell id the acted copy is identified with
};

struct GroupSpec {
  GroupKind kind = GroupKind::none;
  int rank = 0;
  std::vector<GluingRule> rules;
};

struct ComplexData {
  int dimension = 1;
  std::vector<VertexData> vertices;
  std::vector<EdgeData> edges;
  std::vector<FaceData> faces;
  GroupSpec group;
  DeckInfo deck;
};

class Complex {
 public:
  int dimension = 1;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Face> faces;
  DeckInfo deck;

  int vertex_index(const std::string& id) const {
    auto it = vid_.find(id);
    if (it == vid_.end()) throw ParseError("unknown vertex id: " + id);
    return it->second;
  }
  int edge_index(const std::string& id) const {
    auto it = eid_.find(id);
    if (it == eid_.end()) throw ParseError("unknown edge id: " + id);
    return it->second;
  }
  int face_index(const std::string& id) const {
    auto it = fid_.find(id);
    if (it == fid_.end()) throw ParseError("unknown face id: " + id);
    return it->second;
  }

  // Position of vertex v in face f's cycle, -1 if absent.
  int cycle_position(int f, int v) const {
    const auto& c = faces[f].cycle;
    for (size_t i = 0; i < c.size(); ++i)
      if (c[i] == v) return static_cast<int>(i);
    return -1;
  }

  // Side of face f carrying edge e, -1 if absent.
  int side_of_edge(int f, int e) const {
    const auto& fe = faces[f].edges;
    for (size_t i = 0; i < fe.size(); ++i)
      if (fe[i] == e) return static_cast<int>(i);
    return -1;
  }

  double total_measure() const {
    double m = 0;
    if (dimension == 1) {
      for (const auto& e : edges) m += e.length;
    } else {
      for (const auto& f : faces) m += f.area;
    }
    return m;
  }

  friend Complex build_complex(const ComplexData& data);

 private:
  std::map<std::string, int> vid_, eid_, fid_;
};

namespace detail {

inline double polygon_area(const std::vector<Vec2>& p) {
  double a = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    size_t j = (i + 1) % p.size();
    a += cross(p[i], p[j]);
  }
  return 0.5 * a;
}

inline double corner_angle(Vec2 prev, Vec2 at, Vec2 next) {
  Vec2 u = prev - at, v = next - at;
  double c = dot(u, v) / (norm(u) * norm(v));
  c = std::max(-1.0, std::min(1.0, c));
  return std::acos(c);
}

}  // namespace detail

inline Complex build_complex(const ComplexData& data) {
  Complex X;
  if (data.dimension < 0 || data.dimension > 2)
    throw ParseError("dimension must be 0, 1, or 2");
  X.dimension = data.dimension;
  X.deck = data.deck;

  for (const auto& vd : data.vertices) {
    if (X.vid_.count(vd.id)) throw ParseError("duplicate vertex id: " + vd.id);
    X.vid_[vd.id] = static_cast<int>(X.vertices.size());
    Vertex v;
    v.id = vd.id;
    v.copy = vd.copy;
    X.vertices.push_back(std::move(v));
  }
  if (X.vertices.empty()) throw ParseError("complex has no vertices");

  std::set<std::pair<int, int>> edge_pairs;
  for (const auto& ed : data.edges) {
    if (X.eid_.count(ed.id)) throw ParseError("duplicate edge id: " + ed.id);
    Edge e;
    e.id = ed.id;
    e.copy = ed.copy;
    e.ends[0] = X.vertex_index(ed.ends[0]);
    e.ends[1] = X.vertex_index(ed.ends[1]);
    e.length = ed.length;
    if (!(e.length > 0) || !std::isfinite(e.length))
      throw DegenerateError("edge " + ed.id + " has nonpositive length");
    if (e.ends[0] == e.ends[1])
      throw AdmissibilityError("edge " + ed.id + " is a loop");
    auto key = std::minmax(e.ends[0], e.ends[1]);
    if (!edge_pairs.insert({key.first, key.second}).second)
      throw AdmissibilityError("two edges share both endpoints at edge " + ed.id);
    int idx = static_cast<int>(X.edges.size());
    X.eid_[ed.id] = idx;
    X.vertices[e.ends[0]].edges.push_back(idx);
    X.vertices[e.ends[1]].edges.push_back(idx);
    X.edges.push_back(std::move(e));
  }

  for (const auto& fd : data.faces) {
    if (X.fid_.count(fd.id)) throw ParseError("duplicate face id: " + fd.id);
    Face f;
    f.id = fd.id;
    f.copy = fd.copy;
    size_t m = fd.cycle.size();
    if (m < 3) throw DegenerateError("face " + fd.id + " has fewer than 3 vertices");
    if (fd.chart.size() != m)
      throw ParseError("face " + fd.id + ": chart size does not match cycle");
    std::set<std::string> seen(fd.cycle.begin(), fd.cycle.end());
    if (seen.size() != m)
      throw AdmissibilityError("face " + fd.id + " repeats a vertex");
    for (const auto& vidstr : fd.cycle) f.cycle.push_back(X.vertex_index(vidstr));
    f.chart = fd.chart;

    // Orient counterclockwise; charts are only defined up to planar isometry.
    double a = detail::polygon_area(f.chart);
    if (std::abs(a) < 1e-14)
      throw DegenerateError("face " + fd.id + " has zero area");
    if (a < 0) {
      std::reverse(f.cycle.begin(), f.cycle.end());
      std::reverse(f.chart.begin(), f.chart.end());
      std::rotate(f.cycle.begin(), f.cycle.end() - 1, f.cycle.end());
      std::rotate(f.chart.begin(), f.chart.end() - 1, f.chart.end());
      a = -a;
    }
    f.area = a;

    f.min_angle = 3.2;
    for (size_t i = 0; i < m; ++i) {
      Vec2 prev = f.chart[(i + m - 1) % m], at = f.chart[i], next = f.chart[(i + 1) % m];
      double ang = detail::corner_angle(prev, at, next);
      if (cross(at - prev, next - at) <= 1e-12 * norm(at - prev) * norm(next - at))
        throw DegenerateError("face " + fd.id + " is not strictly convex");
      f.min_angle = std::min(f.min_angle, ang);
    }

    // Resolve side edges and verify the gluing is isometric.
    for (size_t i = 0; i < m; ++i) {
      int a0 = f.cycle[i], a1 = f.cycle[(i + 1) % m];
      int eidx = -1;
      if (!fd.edges.empty()) {
        if (fd.edges.size() != m)
          throw ParseError("face " + fd.id + ": edge list size does not match cycle");
        // The explicit list may start at the reversal-adjusted cycle, so match
        // by endpoints rather than position.
        for (const auto& eidstr : fd.edges) {
          int cand = X.edge_index(eidstr);
          auto& ce = X.edges[cand];
          if ((ce.ends[0] == a0 && ce.ends[1] == a1) ||
              (ce.ends[0] == a1 && ce.ends[1] == a0)) {
            eidx = cand;
            break;
          }
        }
        if (eidx < 0)
          throw ParseError("face " + fd.id + ": no listed edge joins cycle side " +
                           std::to_string(i));
      } else {
        for (int cand : X.vertices[a0].edges) {
          auto& ce = X.edges[cand];
          if (ce.ends[0] + ce.ends[1] == a0 + a1 &&
              std::minmax(ce.ends[0], ce.ends[1]) == std::minmax(a0, a1)) {
            if (eidx >= 0)
              throw ParseError("face " + fd.id + ": ambiguous edge for cycle side " +
                               std::to_string(i));
            eidx = cand;
          }
        }
        if (eidx < 0)
          throw ParseError("face " + fd.id + ": no edge joins cycle side " +
                           std::to_string(i));
      }
      double side = norm(f.chart[(i + 1) % m] - f.chart[i]);
      double len = X.edges[eidx].length;
      if (std::abs(side - len) > 1e-9 * std::max(1.0, len))
        throw GluingError("face " + fd.id + " side " + std::to_string(i) +
                          " length " + std::to_string(side) +
                          " does not match edge length " + std::to_string(len));
      f.edges.push_back(eidx);
    }

    int idx = static_cast<int>(X.faces.size());
    X.fid_[fd.id] = idx;
    for (int v : f.cycle) X.vertices[v].faces.push_back(idx);
    for (int e : f.edges) X.edges[e].faces.push_back(idx);
    X.faces.push_back(std::move(f));
  }

  int top = !X.faces.empty() ? 2 : !X.edges.empty() ? 1 : 0;
  if (top != X.dimension)
    throw ParseError("declared dimension " + std::to_string(X.dimension) +
                     " does not match top cell dimension " + std::to_string(top));

  // Dimensional homogeneity: every cell lies in a top-dimensional cell.
  if (X.dimension >= 1)
    for (const auto& v : X.vertices)
      if (v.edges.empty())
        throw AdmissibilityError("isolated vertex " + v.id);
  if (X.dimension == 2) {
    for (const auto& e : X.edges)
      if (e.faces.empty())
        throw AdmissibilityError("edge " + e.id + " lies in no face");
  }

  // Two faces meet in at most one common face of both.
  for (size_t i = 0; i < X.faces.size(); ++i) {
    for (size_t j = i + 1; j < X.faces.size(); ++j) {
      std::vector<int> se;
      for (int e : X.faces[i].edges)
        if (X.side_of_edge(static_cast<int>(j), e) >= 0) se.push_back(e);
      int sv = 0;
      for (int v : X.faces[i].cycle)
        if (X.cycle_position(static_cast<int>(j), v) >= 0) ++sv;
      if (se.size() > 1)
        throw AdmissibilityError("faces " + X.faces[i].id + " and " + X.faces[j].id +
                                 " share more than one edge");
      if (se.size() == 1 && sv != 2)
        throw AdmissibilityError("faces " + X.faces[i].id + " and " + X.faces[j].id +
                                 " meet in an edge plus extra vertices");
      if (se.empty() && sv > 1)
        throw AdmissibilityError("faces " + X.faces[i].id + " and " + X.faces[j].id +
                                 " meet in more than one vertex");
    }
  }

  // Local chainability: at each vertex of a 2-complex the incident faces and
  // edges form a connected bipartite link, so any two wedges at the vertex are
  // joined by a chain of face corners crossing shared edges.
  if (X.dimension == 2) {
    for (size_t vi = 0; vi < X.vertices.size(); ++vi) {
      const auto& v = X.vertices[vi];
      if (v.faces.empty())
        throw AdmissibilityError("vertex " + v.id + " lies in no face");
      std::map<int, int> enode;
      for (int e : v.edges) enode[e] = -1;
      std::vector<int> fstack = {v.faces[0]};
      std::set<int> fseen = {v.faces[0]};
      std::set<int> eseen;
      while (!fstack.empty()) {
        int f = fstack.back();
        fstack.pop_back();
        int pos = X.cycle_position(f, static_cast<int>(vi));
        size_t m = X.faces[f].cycle.size();
        int einc[2] = {X.faces[f].edges[pos],
                       X.faces[f].edges[(pos + m - 1) % m]};
        for (int e : einc) {
          if (!eseen.insert(e).second) continue;
          for (int g : X.edges[e].faces) {
            if (X.cycle_position(g, static_cast<int>(vi)) < 0) continue;
            if (fseen.insert(g).second) fstack.push_back(g);
          }
        }
      }
      if (fseen.size() != v.faces.size() || eseen.size() != v.edges.size())
        throw AdmissibilityError("link of vertex " + v.id + " is not chainable");
    }
  }

  return X;
}

// k-skeleton.  k = dimension returns a copy; lower k drops higher cells.
inline Complex skeleton(const Complex& X, int k) {
  if (k < 0 || k > X.dimension)
    throw RangeError("skeleton order must be in [0, dimension]");
  if (k == X.dimension) return X;
  ComplexData d;
  d.dimension = k;
  d.deck = X.deck;
  for (const auto& v : X.vertices) d.vertices.push_back({v.id, v.copy});
  if (k == 0) return build_complex(d);
  for (const auto& e : X.edges) {
    EdgeData ed;
    ed.id = e.id;
    ed.ends[0] = X.vertices[e.ends[0]].id;
    ed.ends[1] = X.vertices[e.ends[1]].id;
    ed.length = e.length;
    ed.copy = e.copy;
    d.edges.push_back(std::move(ed));
  }
  return build_complex(d);
}

inline std::vector<int> connected_components(const Complex& X) {
  std::vector<int> comp(X.vertices.size(), -1);
  int nc = 0;
  for (size_t s = 0; s < X.vertices.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack = {static_cast<int>(s)};
    comp[s] = nc;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int e : X.vertices[v].edges) {
        int w = X.edges[e].ends[0] == v ? X.edges[e].ends[1] : X.edges[e].ends[0];
        if (comp[w] < 0) {
          comp[w] = nc;
          stack.push_back(w);
        }
      }
    }
    ++nc;
  }
  return comp;
}

inline int component_count(const Complex& X) {
  auto c = connected_components(X);
  return c.empty() ? 0 : 1 + *std::max_element(c.begin(), c.end());
}

namespace detail {

// Chart coordinates of a point known to lie on face f: a cycle vertex, a point
// on a boundary edge, or a face-interior point.
inline Vec2 chart_of(const Complex& X, int f, const PointRef& p) {
  const Face& F = X.faces[f];
  if (p.kind == PointRef::Kind::face) {
    if (p.cell != f) throw RangeError("point lies on a different face");
    return p.uv;
  }
  if (p.kind == PointRef::Kind::vertex) {
    int pos = X.cycle_position(f, p.cell);
    if (pos < 0) throw RangeError("vertex not on face");
    return F.chart[pos];
  }
  int side = X.side_of_edge(f, p.cell);
  if (side < 0) throw RangeError("edge not on face");
  const Edge& E = X.edges[p.cell];
  size_t m = F.cycle.size();
  Vec2 a = F.chart[side], b = F.chart[(side + 1) % m];
  double tpar = p.s / E.length;
  if (F.cycle[side] != E.ends[0]) tpar = 1 - tpar;
  return a + tpar * (b - a);
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p, double tol) {
  // Convex, counterclockwise: inside iff left of (or on) every side.
  for (size_t i = 0; i < poly.size(); ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    if (cross(b - a, p - a) < -tol * norm(b - a)) return false;
  }
  return true;
}

}  // namespace detail

// Canonical form: boundary points of higher cells resolve to the lowest-
// dimensional cell containing them.
inline PointRef canonicalize(const Complex& X, PointRef p) {
  const double tol = 1e-9;
  switch (p.kind) {
    case PointRef::Kind::vertex:
      if (p.cell < 0 || p.cell >= static_cast<int>(X.vertices.size()))
        throw RangeError("vertex index out of range");
      return vertex_point(p.cell);
    case PointRef::Kind::edge: {
      if (p.cell < 0 || p.cell >= static_cast<int>(X.edges.size()))
        throw RangeError("edge index out of range");
      const Edge& e = X.edges[p.cell];
      double atol = tol * std::max(1.0, e.length);
      if (p.s < -atol || p.s > e.length + atol)
        throw RangeError("edge offset out of range");
      if (p.s <= atol) return vertex_point(e.ends[0]);
      if (p.s >= e.length - atol) return vertex_point(e.ends[1]);
      return edge_point(p.cell, p.s);
    }
    case PointRef::Kind::face: {
      if (p.cell < 0 || p.cell >= static_cast<int>(X.faces.size()))
        throw RangeError("face index out of range");
      const Face& F = X.faces[p.cell];
      if (!detail::point_in_polygon(F.chart, p.uv, tol))
        throw RangeError("face point outside chart polygon");
      size_t m = F.cycle.size();
      for (size_t i = 0; i < m; ++i) {
        Vec2 a = F.chart[i], b = F.chart[(i + 1) % m];
        double len = norm(b - a);
        double perp = std::abs(cross(b - a, p.uv - a)) / len;
        if (perp > tol * std::max(1.0, len)) continue;
        double along = dot(p.uv - a, b - a) / len;
        if (along < -tol || along > len + tol) continue;
        int eidx = F.edges[i];
        const Edge& E = X.edges[eidx];
        double s = F.cycle[i] == E.ends[0] ? along : len - along;
        return canonicalize(X, edge_point(eidx, s));
      }
      return face_point(p.cell, p.uv);
    }
  }
  throw RangeError("invalid point kind");
}

inline bool same_point(const Complex& X, PointRef p, PointRef q, double tol = 1e-9) {
  PointRef a = canonicalize(X, p), b = canonicalize(X, q);
  if (a.kind != b.kind || a.cell != b.cell) return false;
  if (a.kind == PointRef::Kind::edge) return std::abs(a.s - b.s) <= tol;
  if (a.kind == PointRef::Kind::face) return norm(a.uv - b.uv) <= tol;
  return true;
}

inline std::string describe(const Complex& X, const PointRef& p) {
  PointRef c = canonicalize(X, p);
  switch (c.kind) {
    case PointRef::Kind::vertex:
      return "vertex " + X.vertices[c.cell].id;
    case PointRef::Kind::edge:
      return "edge " + X.edges[c.cell].id + " @ " + std::to_string(c.s);
    default:
      return "face " + X.faces[c.cell].id + " @ (" + std::to_string(c.uv.x) +
             ", " + std::to_string(c.uv.y) + ")";
  }
}

}  // namespace polyheat
