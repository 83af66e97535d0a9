#pragma once

// Intrinsic metric and measure on a complex: geodesic distances through a
// subdivision graph (exact on 1-complexes, upper approximation converging
// with the resolution on 2-complexes), ball volumes, wedge decompositions,
// and the explicit geometry constants.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "polyheat/complex.hpp"
#include "polyheat/rng.hpp"

namespace polyheat {

struct GeometryBounds {
  int n = 1;       // top dimension
  int N = 1;       // volume-doubling exponent (= n)
  int M = 1;       // most edges at any vertex
  double ell = 0;  // shortest edge
  double alpha = 0;  // smallest wedge angle; pi by convention when n = 1
  double kappa = 0;
  double R0 = 0;
  double C_X = 0;
  double C_Weak = 0;
  double C_vol = 0;
  double K_cover = 0;
  double P0 = 0;
};

inline double kappa_formula(int n, double alpha) {
  return 6.0 * std::pow(2.0 / std::sqrt(2.0 * (1.0 - std::cos(alpha))) + 1.0, n);
}
inline double poincare_ball_formula(int n, int M, double alpha) {
  return std::pow(2.0, 3 * n + 3) * M * M / (alpha * n);
}
inline double weak_poincare_formula(int n, int N, int M, double alpha,
                                    double kappa) {
  return std::pow(2.0, 3 * n + 3) * M * M * M * std::pow(kappa, N + 1) /
         (alpha * n);
}
inline double cover_overlap_formula(int N, int M, double kappa) {
  return M * std::pow(8.0 * (1.0 + 1e3 * kappa), N);
}
inline double uniform_poincare_formula(double C_vol, double kappa, double K,
                                       double C_Weak) {
  double expo = 1.0 + std::log2(1e3 * kappa + 9.0);
  return (1.0 + 3.0 * std::pow(C_vol, expo)) * K * C_Weak * 12.0 * kappa * 1e-3;
}

inline GeometryBounds geometry_constants(const Complex& X) {
  GeometryBounds g;
  g.n = X.dimension;
  g.N = X.dimension;
  if (X.dimension == 0 || X.edges.empty())
    throw DegenerateError("geometry constants need a complex with edges");
  g.M = 0;
  for (const auto& v : X.vertices)
    g.M = std::max(g.M, static_cast<int>(v.edges.size()));
  g.ell = std::numeric_limits<double>::infinity();
  for (const auto& e : X.edges) g.ell = std::min(g.ell, e.length);
  if (!(g.ell > 0)) throw DegenerateError("zero-length edge");
  if (X.dimension == 1) {
    g.alpha = 3.14159265358979323846;
  } else {
    g.alpha = std::numeric_limits<double>::infinity();
    for (const auto& f : X.faces) g.alpha = std::min(g.alpha, f.min_angle);
    if (!(g.alpha > 0)) throw DegenerateError("zero wedge angle");
  }
  g.kappa = kappa_formula(g.n, g.alpha);
  g.R0 = g.ell / g.kappa;
  g.C_X = poincare_ball_formula(g.n, g.M, g.alpha);
  g.C_Weak = weak_poincare_formula(g.n, g.N, g.M, g.alpha, g.kappa);
  g.C_vol = g.M * std::pow(2.0, g.n);
  g.K_cover = cover_overlap_formula(g.N, g.M, g.kappa);
  g.P0 = uniform_poincare_formula(g.C_vol, g.kappa, g.K_cover, g.C_Weak);
  return g;
}

// ---------------------------------------------------------------------------
// Subdivision graph.

class MetricGraph {
 public:
  MetricGraph(const Complex& X, double resolution) : X_(&X), res_(resolution) {
    if (!(resolution > 0)) throw RangeError("resolution must be positive");
    int n = static_cast<int>(X.vertices.size());
    for (const auto& e : X.edges) {
      EdgeChain ch;
      ch.segments = std::max<int>(1, static_cast<int>(std::ceil(e.length / res_)));
      ch.first_interior = n;
      n += ch.segments - 1;
      chains_.push_back(ch);
    }
    node_pos_.resize(n);
    for (size_t v = 0; v < X.vertices.size(); ++v)
      node_pos_[v] = vertex_point(static_cast<int>(v));
    adj_.assign(n, {});
    for (size_t e = 0; e < X.edges.size(); ++e) {
      const auto& ch = chains_[e];
      double seg = X.edges[e].length / ch.segments;
      for (int j = 1; j < ch.segments; ++j)
        node_pos_[ch.first_interior + j - 1] =
            edge_point(static_cast<int>(e), j * seg);
      for (int j = 0; j < ch.segments; ++j)
        link(edge_node(static_cast<int>(e), j),
             edge_node(static_cast<int>(e), j + 1), seg);
    }
    face_boundary_.resize(X.faces.size());
    for (size_t f = 0; f < X.faces.size(); ++f) {
      const Face& F = X.faces[f];
      std::set<int> bn;
      for (size_t side = 0; side < F.edges.size(); ++side) {
        int e = F.edges[side];
        for (int j = 0; j <= chains_[e].segments; ++j) bn.insert(edge_node(e, j));
      }
      auto& list = face_boundary_[f];
      for (int node : bn)
        list.push_back({node, detail::chart_of(X, static_cast<int>(f),
                                               node_pos_[node])});
      for (size_t i = 0; i < list.size(); ++i)
        for (size_t j = i + 1; j < list.size(); ++j)
          link(list[i].node, list[j].node, norm(list[i].uv - list[j].uv));
    }
  }

  const Complex& complex() const { return *X_; }
  double resolution() const { return res_; }
  int node_count() const { return static_cast<int>(node_pos_.size()); }
  const PointRef& node_point(int i) const { return node_pos_[i]; }

  // Graph node at subdivision position j of edge e (j = 0..segments).
  int edge_node(int e, int j) const {
    const auto& ch = chains_[e];
    if (j == 0) return X_->edges[e].ends[0];
    if (j == ch.segments) return X_->edges[e].ends[1];
    return ch.first_interior + j - 1;
  }
  int segments_of(int e) const { return chains_[e].segments; }

  // Arcs attaching an arbitrary point to the graph.
  std::vector<std::pair<int, double>> attach(PointRef p) const {
    PointRef c = canonicalize(*X_, p);
    std::vector<std::pair<int, double>> out;
    if (c.kind == PointRef::Kind::vertex) {
      out.push_back({c.cell, 0.0});
    } else if (c.kind == PointRef::Kind::edge) {
      const auto& ch = chains_[c.cell];
      double seg = X_->edges[c.cell].length / ch.segments;
      int j = std::min<int>(static_cast<int>(c.s / seg), ch.segments - 1);
      out.push_back({edge_node(c.cell, j), c.s - j * seg});
      out.push_back({edge_node(c.cell, j + 1), (j + 1) * seg - c.s});
    } else {
      for (const auto& b : face_boundary_[c.cell])
        out.push_back({b.node, norm(b.uv - c.uv)});
    }
    return out;
  }

  std::vector<double> distance_field(PointRef src) const {
    std::vector<double> dist(node_pos_.size(),
                             std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> q;
    for (auto [node, w] : attach(src)) {
      if (w < dist[node]) {
        dist[node] = w;
        q.push({w, node});
      }
    }
    while (!q.empty()) {
      auto [d, u] = q.top();
      q.pop();
      if (d > dist[u]) continue;
      for (auto [v, w] : adj_[u])
        if (d + w < dist[v]) {
          dist[v] = d + w;
          q.push({d + w, v});
        }
    }
    return dist;
  }

  double eval_field(const std::vector<double>& dist, PointRef q) const {
    double best = std::numeric_limits<double>::infinity();
    for (auto [node, w] : attach(q)) best = std::min(best, dist[node] + w);
    return best;
  }

  double distance(PointRef p, PointRef q) const {
    PointRef cp = canonicalize(*X_, p), cq = canonicalize(*X_, q);
    double direct = std::numeric_limits<double>::infinity();
    if (cp.kind == PointRef::Kind::edge && cq.kind == PointRef::Kind::edge &&
        cp.cell == cq.cell)
      direct = std::abs(cp.s - cq.s);
    for (size_t f = 0; f < X_->faces.size(); ++f) {
      Vec2 a, b;
      if (chart_if_on(static_cast<int>(f), cp, a) &&
          chart_if_on(static_cast<int>(f), cq, b))
        direct = std::min(direct, norm(a - b));
    }
    auto dist = distance_field(cp);
    double through = eval_field(dist, cq);
    double d = std::min(direct, through);
    if (!std::isfinite(d)) throw DisconnectedError("no path between the points");
    return d;
  }

  // Measure of the metric ball.  Exact on 1-complexes; O(resolution)
  // quadrature on faces.
  double ball_volume(PointRef center, double r) const {
    if (!(r > 0)) throw RangeError("ball radius must be positive");
    PointRef c = canonicalize(*X_, center);
    auto dist = distance_field(c);
    double vol = 0;
    if (X_->dimension == 1) {
      for (size_t e = 0; e < X_->edges.size(); ++e) {
        double seg = X_->edges[e].length / chains_[e].segments;
        for (int j = 0; j < chains_[e].segments; ++j) {
          double da = dist[edge_node(static_cast<int>(e), j)];
          double db = dist[edge_node(static_cast<int>(e), j + 1)];
          if (c.kind == PointRef::Kind::edge && c.cell == static_cast<int>(e)) {
            // split the segment containing the center
            double lo = j * seg, hi = lo + seg;
            if (c.s > lo && c.s < hi) {
              vol += covered_length(0.0, db, c.s - lo, r) +
                     covered_length(0.0, da, hi - c.s, r);
              continue;
            }
          }
          vol += covered_length(da, db, seg, r);
        }
      }
      return vol;
    }
    for (size_t f = 0; f < X_->faces.size(); ++f) {
      const auto& bnd = face_boundary_[f];
      double near = std::numeric_limits<double>::infinity();
      for (const auto& b : bnd) near = std::min(near, dist[b.node]);
      Vec2 cuv;
      bool inside = chart_if_on(static_cast<int>(f), c, cuv);
      if (!inside && near > r) continue;
      // chart bounding box, clipped to the reachable region
      double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
      for (auto p : X_->faces[f].chart) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
      }
      double rxlo = 1e300, rxhi = -1e300, rylo = 1e300, ryhi = -1e300;
      auto grow = [&](Vec2 at, double reach) {
        if (reach < 0) return;
        rxlo = std::min(rxlo, at.x - reach);
        rxhi = std::max(rxhi, at.x + reach);
        rylo = std::min(rylo, at.y - reach);
        ryhi = std::max(ryhi, at.y + reach);
      };
      if (inside) grow(cuv, r);
      for (const auto& b : bnd) grow(b.uv, r - dist[b.node]);
      xlo = std::max(xlo, rxlo);
      xhi = std::min(xhi, rxhi);
      ylo = std::max(ylo, rylo);
      yhi = std::min(yhi, ryhi);
      if (xlo >= xhi || ylo >= yhi) continue;
      double g = res_;
      int nx = std::max<int>(1, static_cast<int>(std::ceil((xhi - xlo) / g)));
      int ny = std::max<int>(1, static_cast<int>(std::ceil((yhi - ylo) / g)));
      double gx = (xhi - xlo) / nx, gy = (yhi - ylo) / ny;
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
          Vec2 p{xlo + (i + 0.5) * gx, ylo + (j + 0.5) * gy};
          if (!detail::point_in_polygon(X_->faces[f].chart, p, 1e-12)) continue;
          double d = inside ? norm(p - cuv)
                            : std::numeric_limits<double>::infinity();
          for (const auto& b : bnd)
            d = std::min(d, dist[b.node] + norm(p - b.uv));
          if (d <= r) vol += gx * gy;
        }
    }
    return vol;
  }

 private:
  struct EdgeChain {
    int segments = 1;
    int first_interior = 0;
  };
  struct BoundarySample {
    int node;
    Vec2 uv;
  };

  const Complex* X_;
  double res_;
  std::vector<EdgeChain> chains_;
  std::vector<PointRef> node_pos_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<std::vector<BoundarySample>> face_boundary_;

  void link(int a, int b, double w) {
    adj_[a].push_back({b, w});
    adj_[b].push_back({a, w});
  }

  bool chart_if_on(int f, const PointRef& c, Vec2& out) const {
    const Face& F = X_->faces[f];
    if (c.kind == PointRef::Kind::face) {
      if (c.cell != f) return false;
      out = c.uv;
      return true;
    }
    if (c.kind == PointRef::Kind::vertex) {
      int pos = X_->cycle_position(f, c.cell);
      if (pos < 0) return false;
      out = F.chart[pos];
      return true;
    }
    if (X_->side_of_edge(f, c.cell) < 0) return false;
    out = detail::chart_of(*X_, f, c);
    return true;
  }

  // length of {xi in [0, L] : min(da + xi, db + L - xi) <= r}
  static double covered_length(double da, double db, double L, double r) {
    double la = std::clamp(r - da, 0.0, L);
    double lb = std::clamp(r - db, 0.0, L);
    return std::min(L, la + lb);
  }
};

inline double geodesic_distance(const Complex& X, PointRef p, PointRef q,
                                double resolution) {
  return MetricGraph(X, resolution).distance(p, q);
}

inline double ball_volume(const Complex& X, PointRef center, double r,
                          double resolution) {
  return MetricGraph(X, resolution).ball_volume(center, r);
}

// ---------------------------------------------------------------------------
// Wedge decomposition of a small ball around a point.

struct Wedge {
  std::vector<std::string> cells;
  double measure = 0;
  double diameter = 0;
  double ratio = 0;  // measure relative to the full Euclidean n-ball
};

// Largest radius for which B(center, r) avoids every lower-dimensional cell
// not containing the center.
inline double wedge_radius_limit(const Complex& X, PointRef center) {
  PointRef c = canonicalize(X, center);
  double lim = std::numeric_limits<double>::infinity();
  auto seg_dist = [](Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    return norm(p - (a + t * ab));
  };
  if (c.kind == PointRef::Kind::vertex) {
    for (int e : X.vertices[c.cell].edges)
      lim = std::min(lim, X.edges[e].length);
    for (int f : X.vertices[c.cell].faces) {
      const Face& F = X.faces[f];
      Vec2 p = detail::chart_of(X, f, c);
      size_t m = F.cycle.size();
      for (size_t i = 0; i < m; ++i) {
        if (F.cycle[i] == c.cell || F.cycle[(i + 1) % m] == c.cell) continue;
        lim = std::min(lim, seg_dist(p, F.chart[i], F.chart[(i + 1) % m]));
      }
    }
  } else if (c.kind == PointRef::Kind::edge) {
    const Edge& E = X.edges[c.cell];
    lim = std::min(c.s, E.length - c.s);
    for (int f : E.faces) {
      const Face& F = X.faces[f];
      Vec2 p = detail::chart_of(X, f, c);
      int side = X.side_of_edge(f, c.cell);
      size_t m = F.cycle.size();
      for (size_t i = 0; i < m; ++i) {
        if (static_cast<int>(i) == side) continue;
        lim = std::min(lim, seg_dist(p, F.chart[i], F.chart[(i + 1) % m]));
      }
    }
  } else {
    const Face& F = X.faces[c.cell];
    size_t m = F.cycle.size();
    for (size_t i = 0; i < m; ++i)
      lim = std::min(lim, seg_dist(c.uv, F.chart[i], F.chart[(i + 1) % m]));
  }
  return lim;
}

inline std::vector<Wedge> wedge_decomposition(const Complex& X, PointRef center,
                                              double r) {
  PointRef c = canonicalize(X, center);
  double lim = wedge_radius_limit(X, c);
  if (!(r > 0) || r >= lim)
    throw RadiusError("wedge radius must lie in (0, " + std::to_string(lim) +
                      ") for this center");
  std::vector<Wedge> out;
  const double pi = 3.14159265358979323846;
  if (X.dimension == 1) {
    if (c.kind == PointRef::Kind::vertex) {
      for (int e : X.vertices[c.cell].edges)
        out.push_back({{X.edges[e].id}, r, r, 0.5});
    } else {
      out.push_back({{X.edges[c.cell].id}, 2 * r, 2 * r, 1.0});
    }
    return out;
  }
  if (c.kind == PointRef::Kind::face) {
    out.push_back({{X.faces[c.cell].id}, pi * r * r, 2 * r, 1.0});
  } else if (c.kind == PointRef::Kind::edge) {
    for (int f : X.edges[c.cell].faces)
      out.push_back({{X.faces[f].id, X.edges[c.cell].id}, pi * r * r / 2, 2 * r,
                     0.5});
  } else {
    for (int f : X.vertices[c.cell].faces) {
      const Face& F = X.faces[f];
      int pos = X.cycle_position(f, c.cell);
      size_t m = F.cycle.size();
      double theta = detail::corner_angle(F.chart[(pos + m - 1) % m],
                                          F.chart[pos], F.chart[(pos + 1) % m]);
      double chord = 2 * r * std::sin(std::min(theta, pi) / 2);
      out.push_back({{F.id}, theta / 2 * r * r, std::max(r, chord),
                     theta / (2 * pi)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Volume doubling.

struct DoublingReport {
  int checked = 0;
  int skipped = 0;  // samples with c*r > ell
  double worst_ratio = 0;  // max over samples of vol(cr) / (c^N vol(r))
  double bound = 0;        // M
  bool pass = false;
};

inline DoublingReport check_volume_doubling(const Complex& X, int sample_count,
                                            double c, unsigned long long seed) {
  if (!(c > 1)) throw RangeError("doubling factor must exceed 1");
  auto g = geometry_constants(X);
  DoublingReport rep;
  rep.bound = g.M;
  Stream rng(seed);
  for (int s = 0; s < sample_count; ++s) {
    PointRef center;
    if (X.dimension == 2 && rng.uniform() < 0.5) {
      int f = static_cast<int>(rng.below(X.faces.size()));
      // rejection-sample the chart polygon
      const Face& F = X.faces[f];
      double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
      for (auto p : F.chart) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
      }
      Vec2 p;
      do {
        p = {rng.uniform(xlo, xhi), rng.uniform(ylo, yhi)};
      } while (!detail::point_in_polygon(F.chart, p, -1e-9));
      center = face_point(f, p);
    } else if (rng.uniform() < 0.15) {
      center = vertex_point(static_cast<int>(rng.below(X.vertices.size())));
    } else {
      int e = static_cast<int>(rng.below(X.edges.size()));
      center = edge_point(e, rng.uniform(0.0, X.edges[e].length));
    }
    double r = rng.uniform(0.0, g.ell);
    if (c * r > g.ell) {
      ++rep.skipped;
      continue;
    }
    MetricGraph mg(X, std::max(r / 24, g.ell / 512));
    double v1 = mg.ball_volume(center, r);
    double v2 = mg.ball_volume(center, c * r);
    if (v1 <= 0) {
      ++rep.skipped;
      continue;
    }
    rep.worst_ratio =
        std::max(rep.worst_ratio, v2 / (std::pow(c, g.N) * v1));
    ++rep.checked;
  }
  // 2-complex volumes carry O(resolution) quadrature error, so allow 2%.
  rep.pass = rep.worst_ratio <= rep.bound * (X.dimension == 2 ? 1.02 : 1.0 + 1e-12);
  return rep;
}

// Diameter over graph nodes; within one resolution of the true diameter.
inline double complex_diameter(const Complex& X, double resolution) {
  MetricGraph mg(X, resolution);
  double d = 0;
  for (size_t v = 0; v < X.vertices.size(); ++v) {
    auto field = mg.distance_field(vertex_point(static_cast<int>(v)));
    for (int u = 0; u < mg.node_count(); ++u) {
      if (!std::isfinite(field[u]))
        throw DisconnectedError("diameter of a disconnected complex");
      d = std::max(d, field[u]);
    }
  }
  return d;
}

}  // namespace polyheat
