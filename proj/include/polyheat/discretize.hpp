#pragma once

// Lumped P1 discretization of the Laplacian on a 1- or 2-complex.  Edge
// interiors carry the three-point stencil, rectangle-chart face interiors the
// five-point stencil, and vertices the Kirchhoff sum of one-sided differences.
// Mass is the lumped cell measure, so the operator pair (K, M) is symmetric
// positive semidefinite against a positive diagonal.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "polyheat/complex.hpp"

namespace polyheat {

struct DiscreteOperator {
  const Complex* X = nullptr;
  double h = 0;         // requested mesh size
  double max_snap = 0;  // worst relative deviation of a cell step from h
  std::vector<PointRef> nodes;
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
  bool dirichlet = false;

  struct EdgeMesh {
    int segments = 0;
    double step = 0;
    std::vector<int> node;  // segments + 1 entries, endpoints are vertex nodes
  };
  struct FaceMesh {
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    Vec2 origin{};
    std::vector<int> node;  // (nx+1) * (ny+1), row-major over x then y
  };
  std::vector<int> vertex_node;
  std::vector<EdgeMesh> edge_mesh;
  std::vector<FaceMesh> face_mesh;

  // For operators produced by restriction: node index in the parent operator,
  // -1 entries in kept_of mark removed parent nodes.
  std::vector<int> parent_index;

  int node_count() const { return static_cast<int>(nodes.size()); }

  int face_grid_node(int f, int i, int j) const {
    const auto& fm = face_mesh[f];
    return fm.node[static_cast<size_t>(j) * (fm.nx + 1) + i];
  }

  // Nearest mesh node to a point on the complex.
  int nearest_node(PointRef p, double* snap_dist = nullptr) const {
    PointRef c = canonicalize(*X, p);
    int node = -1;
    double dist = 0;
    if (c.kind == PointRef::Kind::vertex) {
      node = vertex_node[c.cell];
    } else if (c.kind == PointRef::Kind::edge) {
      const auto& em = edge_mesh[c.cell];
      int j = std::clamp<int>(static_cast<int>(std::lround(c.s / em.step)), 0,
                              em.segments);
      node = em.node[j];
      dist = std::abs(c.s - j * em.step);
    } else {
      const auto& fm = face_mesh[c.cell];
      int i = std::clamp<int>(
          static_cast<int>(std::lround((c.uv.x - fm.origin.x) / fm.hx)), 0, fm.nx);
      int j = std::clamp<int>(
          static_cast<int>(std::lround((c.uv.y - fm.origin.y) / fm.hy)), 0, fm.ny);
      node = face_grid_node(c.cell, i, j);
      dist = norm(c.uv - Vec2{fm.origin.x + i * fm.hx, fm.origin.y + j * fm.hy});
    }
    if (node < 0)
      throw RangeError("point lies outside the restricted domain");
    if (snap_dist) *snap_dist = dist;
    return node;
  }
};

inline DiscreteOperator discretize(const Complex& X, double h) {
  if (!(h > 0)) throw RangeError("mesh size must be positive");
  if (X.dimension < 1 || X.dimension > 2)
    throw MeshError("discretization supports dimensions 1 and 2");
  DiscreteOperator D;
  D.X = &X;
  D.h = h;

  auto subdivide = [&](double length, const std::string& what) {
    int n = std::max<long long>(1, std::llround(length / h));
    if (n < 2)
      throw MeshError(what + " gets fewer than 3 nodes at h = " +
                      std::to_string(h));
    double snap = std::abs(length / n - h) / h;
    if (snap > 0.01)
      throw MeshError("mesh size does not divide " + what +
                      " within 1% (snap " + std::to_string(snap) + ")");
    D.max_snap = std::max(D.max_snap, snap);
    return n;
  };

  int next = 0;
  D.vertex_node.resize(X.vertices.size());
  for (size_t v = 0; v < X.vertices.size(); ++v) {
    D.vertex_node[v] = next++;
    D.nodes.push_back(vertex_point(static_cast<int>(v)));
  }
  D.edge_mesh.resize(X.edges.size());
  for (size_t e = 0; e < X.edges.size(); ++e) {
    auto& em = D.edge_mesh[e];
    em.segments = subdivide(X.edges[e].length, "edge " + X.edges[e].id);
    em.step = X.edges[e].length / em.segments;
    em.node.resize(em.segments + 1);
    em.node[0] = D.vertex_node[X.edges[e].ends[0]];
    em.node[em.segments] = D.vertex_node[X.edges[e].ends[1]];
    for (int j = 1; j < em.segments; ++j) {
      em.node[j] = next++;
      D.nodes.push_back(edge_point(static_cast<int>(e), j * em.step));
    }
  }

  D.face_mesh.resize(X.faces.size());
  for (size_t f = 0; f < X.faces.size(); ++f) {
    const Face& F = X.faces[f];
    if (F.cycle.size() != 4)
      throw MeshError("face " + F.id + " is not a rectangle; face meshing "
                      "needs axis-aligned rectangular charts");
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (auto p : F.chart) {
      xlo = std::min(xlo, p.x);
      xhi = std::max(xhi, p.x);
      ylo = std::min(ylo, p.y);
      yhi = std::max(yhi, p.y);
    }
    for (size_t i = 0; i < 4; ++i) {
      Vec2 d = F.chart[(i + 1) % 4] - F.chart[i];
      if (std::abs(d.x) > 1e-9 * std::abs(d.y) &&
          std::abs(d.y) > 1e-9 * std::abs(d.x))
        throw MeshError("face " + F.id + " chart is not axis-aligned");
    }
    auto& fm = D.face_mesh[f];
    fm.origin = {xlo, ylo};
    fm.nx = subdivide(xhi - xlo, "face " + F.id + " width");
    fm.ny = subdivide(yhi - ylo, "face " + F.id + " height");
    fm.hx = (xhi - xlo) / fm.nx;
    fm.hy = (yhi - ylo) / fm.ny;
    fm.node.assign(static_cast<size_t>(fm.nx + 1) * (fm.ny + 1), -1);

    // boundary grid points reuse the edge-chain nodes
    for (size_t side = 0; side < 4; ++side) {
      int e = F.edges[side];
      const auto& em = D.edge_mesh[e];
      Vec2 a = F.chart[side], b = F.chart[(side + 1) % 4];
      int nseg = em.segments;
      for (int k = 0; k <= nseg; ++k) {
        Vec2 p = a + (static_cast<double>(k) / nseg) * (b - a);
        int gi = static_cast<int>(std::lround((p.x - fm.origin.x) / fm.hx));
        int gj = static_cast<int>(std::lround((p.y - fm.origin.y) / fm.hy));
        int chain_k =
            F.cycle[side] == X.edges[e].ends[0] ? k : nseg - k;
        fm.node[static_cast<size_t>(gj) * (fm.nx + 1) + gi] = em.node[chain_k];
      }
    }
    for (int j = 0; j <= fm.ny; ++j)
      for (int i = 0; i <= fm.nx; ++i) {
        auto& slot = fm.node[static_cast<size_t>(j) * (fm.nx + 1) + i];
        if (slot >= 0) continue;
        slot = next++;
        D.nodes.push_back(face_point(
            static_cast<int>(f),
            {fm.origin.x + i * fm.hx, fm.origin.y + j * fm.hy}));
      }
  }

  int n = next;
  D.mass = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;

  if (X.dimension == 1) {
    for (size_t e = 0; e < X.edges.size(); ++e) {
      const auto& em = D.edge_mesh[e];
      double w = 1.0 / em.step;
      for (int j = 0; j < em.segments; ++j) {
        int a = em.node[j], b = em.node[j + 1];
        trip.push_back({a, a, w});
        trip.push_back({b, b, w});
        trip.push_back({a, b, -w});
        trip.push_back({b, a, -w});
        D.mass[a] += em.step / 2;
        D.mass[b] += em.step / 2;
      }
    }
  } else {
    // tensor stencil per face; edges and vertices carry no 2-D measure of
    // their own, their rows are the lumped sums of the adjacent faces
    for (size_t f = 0; f < X.faces.size(); ++f) {
      const auto& fm = D.face_mesh[f];
      auto wx = [&](int i) { return (i == 0 || i == fm.nx) ? fm.hx / 2 : fm.hx; };
      auto wy = [&](int j) { return (j == 0 || j == fm.ny) ? fm.hy / 2 : fm.hy; };
      for (int j = 0; j <= fm.ny; ++j)
        for (int i = 0; i <= fm.nx; ++i) {
          int a = D.face_grid_node(static_cast<int>(f), i, j);
          D.mass[a] += wx(i) * wy(j);
          if (i < fm.nx) {
            int b = D.face_grid_node(static_cast<int>(f), i + 1, j);
            double w = wy(j) / fm.hx;
            trip.push_back({a, a, w});
            trip.push_back({b, b, w});
            trip.push_back({a, b, -w});
            trip.push_back({b, a, -w});
          }
          if (j < fm.ny) {
            int b = D.face_grid_node(static_cast<int>(f), i, j + 1);
            double w = wx(i) / fm.hy;
            trip.push_back({a, a, w});
            trip.push_back({b, b, w});
            trip.push_back({a, b, -w});
            trip.push_back({b, a, -w});
          }
        }
    }
  }

  D.stiffness.resize(n, n);
  D.stiffness.setFromTriplets(trip.begin(), trip.end());
  for (int i = 0; i < n; ++i)
    if (!(D.mass[i] > 0))
      throw MeshError("node with zero mass; complex is not dimensionally "
                      "homogeneous for this mesh");
  return D;
}

// Kill-on-exit restriction: keep[i] selects the surviving parent nodes.
inline DiscreteOperator dirichlet_subdomain(const DiscreteOperator& D,
                                            const std::vector<char>& keep) {
  if (keep.size() != static_cast<size_t>(D.node_count()))
    throw RangeError("node predicate size mismatch");
  int kept = 0;
  std::vector<int> new_index(D.node_count(), -1);
  for (int i = 0; i < D.node_count(); ++i)
    if (keep[i]) new_index[i] = kept++;
  if (kept == 0) throw EmptyDomainError("Dirichlet restriction keeps no nodes");

  DiscreteOperator R;
  R.X = D.X;
  R.h = D.h;
  R.max_snap = D.max_snap;
  R.dirichlet = true;
  R.nodes.reserve(kept);
  R.mass = Eigen::VectorXd::Zero(kept);
  R.parent_index.reserve(kept);
  for (int i = 0; i < D.node_count(); ++i)
    if (keep[i]) {
      R.nodes.push_back(D.nodes[i]);
      R.mass[new_index[i]] = D.mass[i];
      R.parent_index.push_back(D.parent_index.empty() ? i : D.parent_index[i]);
    }
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < D.stiffness.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D.stiffness, col); it;
         ++it)
      if (keep[it.row()] && keep[it.col()])
        trip.push_back({new_index[it.row()], new_index[it.col()], it.value()});
  R.stiffness.resize(kept, kept);
  R.stiffness.setFromTriplets(trip.begin(), trip.end());

  R.vertex_node.assign(D.vertex_node.size(), -1);
  for (size_t v = 0; v < D.vertex_node.size(); ++v)
    if (D.vertex_node[v] >= 0 && keep[D.vertex_node[v]])
      R.vertex_node[v] = new_index[D.vertex_node[v]];
  R.edge_mesh = D.edge_mesh;
  for (auto& em : R.edge_mesh)
    for (auto& nd : em.node) nd = nd >= 0 && keep[nd] ? new_index[nd] : -1;
  R.face_mesh = D.face_mesh;
  for (auto& fm : R.face_mesh)
    for (auto& nd : fm.node) nd = nd >= 0 && keep[nd] ? new_index[nd] : -1;
  return R;
}

inline DiscreteOperator dirichlet_subdomain(
    const DiscreteOperator& D, const std::vector<PointRef>& removed) {
  std::vector<char> keep(D.node_count(), 1);
  for (const auto& p : removed) keep[D.nearest_node(p)] = 0;
  return dirichlet_subdomain(D, keep);
}

inline double energy(const DiscreteOperator& D, const Eigen::VectorXd& f) {
  if (f.size() != D.node_count())
    throw RangeError("energy argument must be defined on all nodes");
  return f.dot(D.stiffness * f);
}

}  // namespace polyheat
