#pragma once

// Poincaré inequality audits on complexes and on finitely generated groups.
//
// On a complex the checked inequalities are the mean-value form
//   ||f - f_E||_{1,E} <= P0 r ||grad f||_{1,E}
// and its p-version with constant 2 p P0 r, where P0 is the chained
// constant from the geometry bounds (astronomically loose by design, so
// these are direction checks), plus the p-extension trick: the measured
// p = 1 constant extends to p > 1 with factor p.  The optimal p = 2
// constant is 1/sqrt(lambda_1) of the Neumann spectrum and is compared
// against closed-form values on canonical domains.
//
// Discrete norms follow the lumped mesh: ||f||_p^p = sum_i mass_i |f_i|^p,
// and the gradient norm sums per-link axis differences
// ||grad f||_p^p = sum_links measure |df/h|^p (for p = 2 this reproduces
// f^T K f exactly).
//
// On a group the checked inequality is the volume form on balls
//   ||f - f_{B_r}||_{1,B_r} <= (|B_2r|/|B_r|) 2r sqrt(|S|) ||grad f||_{1,B_3r}
// with |grad f|(x) = sqrt( (1/|S|) sum_s |f(xs) - f(x)|^2 ).
//
// Test functions mix band-limited eigenvector combinations with adversarial
// tent functions; inequalities are audited, not proven, and reports carry
// the worst observed ratio.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polyheat/complex.hpp"
#include "polyheat/discretize.hpp"
#include "polyheat/eigensolve.hpp"
#include "polyheat/errors.hpp"
#include "polyheat/group.hpp"
#include "polyheat/metric.hpp"
#include "polyheat/rng.hpp"

namespace polyheat {

struct MeshLink {
  int a = -1, b = -1;
  double h = 0;        // link length
  double measure = 0;  // measure attributed to the difference quotient
};

inline std::vector<MeshLink> mesh_links(const DiscreteOperator& D) {
  const Complex& X = *D.X;
  std::vector<MeshLink> out;
  if (X.dimension == 1) {
    for (const auto& em : D.edge_mesh)
      for (int j = 0; j < em.segments; ++j) {
        int a = em.node[j], b = em.node[j + 1];
        if (a < 0 || b < 0) continue;
        out.push_back({a, b, em.step, em.step});
      }
    return out;
  }
  for (size_t f = 0; f < D.face_mesh.size(); ++f) {
    const auto& fm = D.face_mesh[f];
    auto wx = [&](int i) { return (i == 0 || i == fm.nx) ? fm.hx / 2 : fm.hx; };
    auto wy = [&](int j) { return (j == 0 || j == fm.ny) ? fm.hy / 2 : fm.hy; };
    auto node = [&](int i, int j) {
      return fm.node[static_cast<size_t>(j) * (fm.nx + 1) + i];
    };
    for (int j = 0; j <= fm.ny; ++j)
      for (int i = 0; i <= fm.nx; ++i) {
        if (i < fm.nx && node(i, j) >= 0 && node(i + 1, j) >= 0)
          out.push_back({node(i, j), node(i + 1, j), fm.hx, wy(j) * fm.hx});
        if (j < fm.ny && node(i, j) >= 0 && node(i, j + 1) >= 0)
          out.push_back({node(i, j), node(i, j + 1), fm.hy, wx(i) * fm.hy});
      }
  }
  return out;
}

inline double mesh_mean(const DiscreteOperator& D, const Eigen::VectorXd& f) {
  return D.mass.dot(f) / D.mass.sum();
}

inline double lp_norm(const DiscreteOperator& D, const Eigen::VectorXd& f,
                      double p) {
  if (!(p >= 1)) throw RangeError("norm index must be at least 1");
  double s = 0;
  for (int i = 0; i < f.size(); ++i)
    s += D.mass[i] * std::pow(std::abs(f[i]), p);
  return std::pow(s, 1.0 / p);
}

inline double gradient_lp(const std::vector<MeshLink>& links,
                          const Eigen::VectorXd& f, double p) {
  if (!(p >= 1)) throw RangeError("norm index must be at least 1");
  double s = 0;
  for (const auto& L : links)
    s += L.measure * std::pow(std::abs(f[L.b] - f[L.a]) / L.h, p);
  return std::pow(s, 1.0 / p);
}

// 1/sqrt(lambda_1) with lambda_1 the smallest eigenvalue above the
// zero-mode threshold.
inline double neumann_poincare_constant(const DiscreteOperator& D) {
  int count = std::min(8, D.node_count());
  auto S = eigensolve(D, count);
  double lmax = S.eigenvalues.back();
  for (double l : S.eigenvalues)
    if (l > 1e-6 * lmax) return 1.0 / std::sqrt(l);
  throw ConvergenceError("no eigenvalue above the zero-mode threshold");
}

namespace detail {

inline std::vector<double> mesh_distances(const DiscreteOperator& D,
                                          const std::vector<MeshLink>& links,
                                          int source) {
  std::vector<std::vector<std::pair<int, double>>> adj(D.node_count());
  for (const auto& L : links) {
    adj[L.a].push_back({L.b, L.h});
    adj[L.b].push_back({L.a, L.h});
  }
  std::vector<double> dist(D.node_count(),
                           std::numeric_limits<double>::infinity());
  std::priority_queue<std::pair<double, int>,
                      std::vector<std::pair<double, int>>,
                      std::greater<std::pair<double, int>>>
      pq;
  dist[source] = 0;
  pq.push({0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (auto [v, w] : adj[u])
      if (d + w < dist[v]) {
        dist[v] = d + w;
        pq.push({dist[v], v});
      }
  }
  return dist;
}

template <class F>
double golden_min(F fn, double a, double b) {
  if (b <= a) return fn(a);
  const double g = 0.6180339887498949;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < 200 && b - a > 1e-13 * (1 + std::abs(a)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = fn(x2);
    }
  }
  return std::min(f1, f2);
}

// Half band-limited eigenvector combinations, half tent functions around
// random mesh nodes; index 0 is the constant function.
inline std::vector<Eigen::VectorXd> sample_test_functions(
    const DiscreteOperator& D, const std::vector<MeshLink>& links,
    const SpectralDecomposition& S, double r, int count,
    unsigned long long seed) {
  Stream rng(seed);
  std::vector<Eigen::VectorXd> out;
  int n = D.node_count();
  int bands = std::min<int>(12, static_cast<int>(S.eigenvalues.size()) - 1);
  for (int k = 0; k < count; ++k) {
    if (k == 0) {
      out.push_back(Eigen::VectorXd::Ones(n));
    } else if (k % 2 == 0) {
      Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
      for (int j = 1; j <= bands; ++j)
        f += rng.uniform(-1.0, 1.0) * S.vectors.col(j);
      out.push_back(f);
    } else {
      int src = static_cast<int>(rng.below(n));
      double w = rng.uniform(r / 8, r);
      auto dist = mesh_distances(D, links, src);
      Eigen::VectorXd f(n);
      for (int i = 0; i < n; ++i)
        f[i] = std::max(0.0, 1.0 - dist[i] / w);
      out.push_back(f);
    }
  }
  return out;
}

}  // namespace detail

struct PoincareReport {
  int samples = 0;
  double p = 1;
  double radius = 0;        // half the intrinsic diameter of the domain
  double constant_p1 = 0;   // P0 * r
  double constant_p = 0;    // 2 p P0 r
  double worst_ratio_p1 = 0;
  double worst_ratio_p = 0;
  double c1_measured = 0;   // sup ||f - mean||_1 / (r ||grad f||_1)
  double worst_extension_ratio = 0;  // inf_c ||f-c||_p vs p c1 r ||grad f||_p
  double neumann_constant = 0;
  double neumann_bound = 0;  // 2 * 2 * P0 * r
  bool pass = false;
};

inline PoincareReport poincare_check(const Complex& X, double h, int f_samples,
                                     double p, unsigned long long seed) {
  if (!(p >= 1)) throw RangeError("norm index must be at least 1");
  if (f_samples < 1) throw RangeError("need at least one sample function");
  GeometryBounds gb = geometry_constants(X);
  PoincareReport R;
  R.samples = f_samples;
  R.p = p;
  R.radius = complex_diameter(X, h) / 2;
  R.constant_p1 = gb.P0 * R.radius;
  R.constant_p = 2 * p * gb.P0 * R.radius;
  R.neumann_bound = 4 * gb.P0 * R.radius;

  DiscreteOperator D = discretize(X, h);
  auto links = mesh_links(D);
  auto S = eigensolve(D, std::min(13, D.node_count()));
  auto fs = detail::sample_test_functions(D, links, S, R.radius, f_samples,
                                          seed);
  for (const auto& f : fs) {
    double mean = mesh_mean(D, f);
    Eigen::VectorXd g = f.array() - mean;
    double l1 = lp_norm(D, g, 1), g1 = gradient_lp(links, f, 1);
    double lp = lp_norm(D, g, p), gp = gradient_lp(links, f, p);
    if (g1 <= 0) continue;  // constant sample: both sides vanish
    R.worst_ratio_p1 =
        std::max(R.worst_ratio_p1, l1 / (R.constant_p1 * g1));
    R.worst_ratio_p = std::max(R.worst_ratio_p, lp / (R.constant_p * gp));
    R.c1_measured = std::max(R.c1_measured, l1 / (R.radius * g1));
  }
  for (const auto& f : fs) {
    double gp = gradient_lp(links, f, p);
    if (gp <= 0) continue;
    double infc = detail::golden_min(
        [&](double c) {
          return lp_norm(D, Eigen::VectorXd(f.array() - c), p);
        },
        f.minCoeff(), f.maxCoeff());
    R.worst_extension_ratio =
        std::max(R.worst_extension_ratio,
                 infc / (p * R.c1_measured * R.radius * gp));
  }
  R.neumann_constant = neumann_poincare_constant(D);
  R.pass = R.worst_ratio_p1 <= 1 && R.worst_ratio_p <= 1 &&
           R.worst_extension_ratio <= 1 &&
           R.neumann_constant <= R.neumann_bound;
  return R;
}

struct GroupPoincareReport {
  int r = 0;
  long long ball_r = 0, ball_2r = 0, ball_3r = 0;
  double constant = 0;  // (|B_2r|/|B_r|) 2r sqrt(|S|)
  double worst_ratio = 0;
  int samples = 0;
  bool pass = false;
};

inline GroupPoincareReport group_poincare_check(const GroupModel& G, int r,
                                                int f_samples,
                                                unsigned long long seed) {
  if (r < 1) throw RangeError("ball radius must be at least 1");
  if (f_samples < 1) throw RangeError("need at least one sample function");
  GroupPoincareReport R;
  R.r = r;
  R.samples = f_samples;
  auto elements = group_ball(G, 3 * r + 1);  // gradient needs one extra shell
  auto gens = group_generators(G);
  int ns = static_cast<int>(gens.size());
  std::vector<int> len(elements.size());
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < elements.size(); ++i) {
    len[i] = word_length(G, elements[i]);
    index[elements[i]] = static_cast<int>(i);
  }
  std::vector<int> in_r, in_3r;
  for (size_t i = 0; i < elements.size(); ++i) {
    if (len[i] <= r) in_r.push_back(static_cast<int>(i));
    if (len[i] <= 2 * r) ++R.ball_2r;
    if (len[i] <= 3 * r) in_3r.push_back(static_cast<int>(i));
  }
  R.ball_r = static_cast<long long>(in_r.size());
  R.ball_3r = static_cast<long long>(in_3r.size());
  R.constant = (static_cast<double>(R.ball_2r) / R.ball_r) * 2.0 * r *
               std::sqrt(static_cast<double>(ns));

  // neighbor table x -> xs over the full enumeration
  std::vector<std::vector<int>> nb(elements.size());
  for (size_t i = 0; i < elements.size(); ++i) {
    nb[i].reserve(ns);
    for (const auto& s : gens) {
      auto it = index.find(group_mul(G, elements[i], s));
      nb[i].push_back(it == index.end() ? -1 : it->second);
    }
  }

  Stream rng(seed);
  // word-coordinate features: exponent vector (zd) or letter counts (free)
  auto features = [&](const std::string& w) {
    std::vector<double> v;
    if (G.kind == GroupModel::Kind::zd) {
      for (long long c : grp::zd_parse(w, G.rank))
        v.push_back(static_cast<double>(c));
    } else {
      v.assign(static_cast<size_t>(2 * G.rank), 0.0);
      for (char c : w) {
        int k = (c >= 'a') ? (c - 'a') * 2 : (c - 'A') * 2 + 1;
        if (k >= 0 && k < 2 * G.rank) v[k] += 1;
      }
    }
    return v;
  };
  size_t dim = features(group_identity(G)).size();

  for (int k = 0; k < f_samples; ++k) {
    std::vector<double> f(elements.size(), 0.0);
    if (k == 0) {
      // constant: both sides vanish
    } else if (k % 2 == 0) {
      const int waves = 5;
      std::vector<std::vector<double>> th(waves, std::vector<double>(dim));
      std::vector<double> amp(waves), ph(waves);
      for (int u = 0; u < waves; ++u) {
        amp[u] = rng.uniform(-1.0, 1.0);
        ph[u] = rng.uniform(0.0, 6.283185307179586);
        for (auto& t : th[u]) t = rng.uniform(-3.0, 3.0);
      }
      for (size_t i = 0; i < elements.size(); ++i) {
        auto v = features(elements[i]);
        for (int u = 0; u < waves; ++u) {
          double dotv = ph[u];
          for (size_t j = 0; j < dim; ++j) dotv += th[u][j] * v[j];
          f[i] += amp[u] * std::cos(dotv);
        }
      }
    } else {
      int c = in_r[rng.below(in_r.size())];
      double w = 1.0 + static_cast<double>(rng.below(2 * r));
      std::string cinv = group_inverse(G, elements[c]);
      for (size_t i = 0; i < elements.size(); ++i) {
        int d = word_length(G, group_mul(G, cinv, elements[i]));
        f[i] = std::max(0.0, 1.0 - d / w);
      }
    }
    double mean = 0;
    for (int i : in_r) mean += f[i];
    mean /= static_cast<double>(in_r.size());
    double lhs = 0;
    for (int i : in_r) lhs += std::abs(f[i] - mean);
    double gnorm = 0;
    for (int i : in_3r) {
      double s2 = 0;
      for (int j : nb[i]) {
        if (j < 0)
          throw RangeError("gradient neighbor escaped the enumerated ball");
        s2 += (f[j] - f[i]) * (f[j] - f[i]);
      }
      gnorm += std::sqrt(s2 / ns);
    }
    double rhs = R.constant * gnorm;
    if (rhs <= 0) continue;
    R.worst_ratio = std::max(R.worst_ratio, lhs / rhs);
  }
  R.pass = R.worst_ratio <= 1;
  return R;
}

// ---------------------------------------------------------------------------
// Mean-difference inequality on convex chart subsets: for rectangles
// O1, O2 inside a convex rectangle O of dimension n,
//   int_{O1 x O2} |f(z) - f(y)| <= 2^(n-1) (diam O / n) (|O1| + |O2|)
//                                  int_O |grad f|,
// audited by midpoint quadrature over an analytic test family.

struct ConvexMeanReport {
  int n = 0;
  int samples = 0;
  double worst_ratio = 0;
  bool pass = false;
};

inline ConvexMeanReport convex_mean_inequality_check(
    Vec2 olo, Vec2 ohi, Vec2 lo1, Vec2 hi1, Vec2 lo2, Vec2 hi2, int f_samples,
    unsigned long long seed) {
  auto inside = [&](Vec2 lo, Vec2 hi) {
    return lo.x >= olo.x - 1e-12 && hi.x <= ohi.x + 1e-12 &&
           lo.y >= olo.y - 1e-12 && hi.y <= ohi.y + 1e-12 && hi.x > lo.x;
  };
  if (!(ohi.x > olo.x) || !inside(lo1, hi1) || !inside(lo2, hi2))
    throw RangeError("subsets must be nonempty rectangles inside the domain");
  ConvexMeanReport R;
  R.samples = f_samples;
  bool flat = ohi.y - olo.y < 1e-12;
  R.n = flat ? 1 : 2;
  if (flat && (hi1.y - lo1.y > 1e-12 || hi2.y - lo2.y > 1e-12))
    throw RangeError("flat domain needs flat subsets");
  double diam = norm(ohi - olo);
  double mu1 = (hi1.x - lo1.x) * (flat ? 1.0 : hi1.y - lo1.y);
  double mu2 = (hi2.x - lo2.x) * (flat ? 1.0 : hi2.y - lo2.y);
  double factor =
      std::pow(2.0, R.n - 1) * (diam / R.n) * (mu1 + mu2);

  Stream rng(seed);
  const int waves = 5;
  for (int k = 0; k < f_samples; ++k) {
    std::vector<double> ax(waves, 0), wx(waves, 0), wy(waves, 0), ph(waves, 0);
    double gx = 0, gy = 0;
    if (k == 0) {
      // constant: both sides vanish, counted as a pass
    } else if (k == 1) {
      gx = rng.uniform(-1.0, 1.0);
      gy = flat ? 0.0 : rng.uniform(-1.0, 1.0);
    } else {
      for (int u = 0; u < waves; ++u) {
        ax[u] = rng.uniform(-1.0, 1.0);
        wx[u] = rng.uniform(-12.0, 12.0) / diam;
        wy[u] = flat ? 0.0 : rng.uniform(-12.0, 12.0) / diam;
        ph[u] = rng.uniform(0.0, 6.283185307179586);
      }
    }
    auto fval = [&](double x, double y) {
      double v = gx * x + gy * y;
      for (int u = 0; u < waves; ++u)
        v += ax[u] * std::cos(wx[u] * x + wy[u] * y + ph[u]);
      return v;
    };
    auto gval = [&](double x, double y) {
      double dx = gx, dy = gy;
      for (int u = 0; u < waves; ++u) {
        double s = ax[u] * std::sin(wx[u] * x + wy[u] * y + ph[u]);
        dx -= s * wx[u];
        dy -= s * wy[u];
      }
      return std::sqrt(dx * dx + dy * dy);
    };

    const int mp = 16, mg = 64;
    auto pair_pts = [&](Vec2 lo, Vec2 hi, std::vector<Vec2>& pts,
                        double& cellw) {
      pts.clear();
      if (flat) {
        double hx = (hi.x - lo.x) / (mp * mp);
        cellw = hx;
        for (int i = 0; i < mp * mp; ++i)
          pts.push_back({lo.x + (i + 0.5) * hx, lo.y});
      } else {
        double hx = (hi.x - lo.x) / mp, hy = (hi.y - lo.y) / mp;
        cellw = hx * hy;
        for (int j = 0; j < mp; ++j)
          for (int i = 0; i < mp; ++i)
            pts.push_back({lo.x + (i + 0.5) * hx, lo.y + (j + 0.5) * hy});
      }
    };
    std::vector<Vec2> p1, p2;
    double w1, w2;
    pair_pts(lo1, hi1, p1, w1);
    pair_pts(lo2, hi2, p2, w2);
    double lhs = 0;
    for (const auto& a : p1)
      for (const auto& b : p2) lhs += std::abs(fval(a.x, a.y) - fval(b.x, b.y));
    lhs *= w1 * w2;

    double rhs_int = 0;
    if (flat) {
      double hx = (ohi.x - olo.x) / (mg * mg);
      for (int i = 0; i < mg * mg; ++i)
        rhs_int += hx * gval(olo.x + (i + 0.5) * hx, olo.y);
    } else {
      double hx = (ohi.x - olo.x) / mg, hy = (ohi.y - olo.y) / mg;
      for (int j = 0; j < mg; ++j)
        for (int i = 0; i < mg; ++i)
          rhs_int += hx * hy *
                     gval(olo.x + (i + 0.5) * hx, olo.y + (j + 0.5) * hy);
    }
    double rhs = factor * rhs_int;
    if (rhs <= 0) continue;
    R.worst_ratio = std::max(R.worst_ratio, lhs / rhs);
  }
  R.pass = R.worst_ratio <= 1;
  return R;
}

}  // namespace polyheat
