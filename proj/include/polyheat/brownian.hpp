#pragma once

// Brownian motion on metric graphs: on-edge Gaussian increments, uniform
// edge choice at vertices, and a box-kernel density estimator for h_t.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <queue>
#include <thread>
#include <vector>

#include "complex.hpp"
#include "errors.hpp"
#include "metric.hpp"
#include "rng.hpp"

namespace polyheat {

namespace detail {

// Walker state: an edge and an arclength position s in [0, length].
struct WalkerPos {
  int edge = -1;
  double s = 0.0;
};

inline WalkerPos walker_from_point(const Complex& X, const PointRef& p) {
  PointRef c = canonicalize(X, p);
  if (c.kind == PointRef::Kind::edge) return {c.cell, c.s};
  if (c.kind == PointRef::Kind::vertex) {
    const Vertex& v = X.vertices[c.cell];
    if (v.edges.empty()) throw DisconnectedError("isolated vertex has no diffusion");
    int e = v.edges.front();
    return {e, X.edges[e].ends[0] == c.cell ? 0.0 : X.edges[e].length};
  }
  throw RangeError("Brownian paths live on 1-complexes; face points not accepted");
}

// Advance one signed increment, looping the overshoot through vertices.
// At each vertex the exit edge is uniform among all incident edges (the
// entering edge included, which flips the direction of travel).
inline void walker_advance(const Complex& X, WalkerPos& w, double delta, Stream& rng) {
  double remaining = std::abs(delta);
  double dir = delta >= 0 ? 1.0 : -1.0;
  int guard = 0;
  while (remaining > 0.0) {
    if (++guard > 100000) throw StepError("walker failed to settle; step too large for mesh scale");
    const Edge& E = X.edges[w.edge];
    double room = dir > 0 ? E.length - w.s : w.s;
    if (remaining <= room) {
      w.s += dir * remaining;
      return;
    }
    remaining -= room;
    int vid = dir > 0 ? E.ends[1] : E.ends[0];
    const Vertex& v = X.vertices[vid];
    int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(v.edges.size())));
    int e2 = v.edges[static_cast<std::size_t>(pick)];
    w.edge = e2;
    if (X.edges[e2].ends[0] == vid) {
      w.s = 0.0;
      dir = 1.0;
    } else {
      w.s = X.edges[e2].length;
      dir = -1.0;
    }
    if (X.edges[e2].ends[0] == X.edges[e2].ends[1])
      throw AdmissibilityError("self-loop reached by walker");
  }
}

}  // namespace detail

// One Brownian path on the 1-skeleton: increments N(0, 2 dt) along edges,
// uniform exit edge at vertices with the overshoot carried through.
// Deterministic under a fixed seed.
inline PointRef simulate_path(const Complex& X, const PointRef& start, double t, double dt,
                              std::uint64_t seed, std::uint64_t stream = 0) {
  if (X.dimension != 1) throw RangeError("simulate_path requires a 1-complex");
  GeometryBounds gb = geometry_constants(X);
  double cap = (gb.ell / 10.0) * (gb.ell / 10.0);
  if (dt > cap * (1.0 + 1e-12)) throw StepError("dt exceeds (ell/10)^2");
  if (t < dt) throw StepError("t smaller than one step");
  detail::WalkerPos w = detail::walker_from_point(X, start);
  Stream rng(seed, stream);
  std::uint64_t nsteps = static_cast<std::uint64_t>(std::ceil(t / dt - 1e-12));
  double step_sd = std::sqrt(2.0 * dt);
  double last = t - static_cast<double>(nsteps - 1) * dt;
  for (std::uint64_t i = 0; i < nsteps; ++i) {
    double sd = (i + 1 == nsteps) ? std::sqrt(2.0 * last) : step_sd;
    detail::walker_advance(X, w, sd * rng.normal(), rng);
  }
  return edge_point(w.edge, w.s);
}

struct McEstimate {
  double value = 0.0;       // density estimate at q
  double std_error = 0.0;   // binomial standard error
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  double bandwidth = 0.0;
  double dt = 0.0;
};

namespace detail {

// Distances from a fixed target point q to arbitrary walker endpoints in
// O(1) per endpoint: one Dijkstra over vertices seeded at q, then combine
// with the endpoint offsets along its edge.
struct DistanceOracle {
  const Complex* X = nullptr;
  int q_edge = -1;
  double q_s = 0.0;          // arclength position of q on q_edge
  std::vector<double> dv;    // vertex -> d(vertex, q)

  explicit DistanceOracle(const Complex& X_, const PointRef& q) : X(&X_) {
    PointRef c = canonicalize(X_, q);
    std::size_t nv = X_.vertices.size();
    dv.assign(nv, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    auto seed = [&](int vid, double d) {
      if (d < dv[static_cast<std::size_t>(vid)]) {
        dv[static_cast<std::size_t>(vid)] = d;
        pq.push({d, vid});
      }
    };
    if (c.kind == PointRef::Kind::vertex) {
      const Vertex& v = X_.vertices[c.cell];
      if (!v.edges.empty()) {
        q_edge = v.edges.front();
        q_s = X_.edges[q_edge].ends[0] == c.cell ? 0.0
                                                 : X_.edges[q_edge].length;
      }
      seed(c.cell, 0.0);
    } else if (c.kind == PointRef::Kind::edge) {
      const Edge& E = X_.edges[c.cell];
      q_edge = c.cell;
      q_s = c.s;
      seed(E.ends[0], q_s);
      seed(E.ends[1], E.length - q_s);
    } else {
      throw RangeError("distance oracle requires a 1-complex point");
    }
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dv[static_cast<std::size_t>(u)] + 1e-15) continue;
      for (int e : X_.vertices[static_cast<std::size_t>(u)].edges) {
        const Edge& E = X_.edges[e];
        int w = E.ends[0] == u ? E.ends[1] : E.ends[0];
        seed(w, d + E.length);
      }
    }
  }

  double operator()(int edge, double s) const {
    const Edge& E = X->edges[static_cast<std::size_t>(edge)];
    double best = std::min(dv[static_cast<std::size_t>(E.ends[0])] + s,
                           dv[static_cast<std::size_t>(E.ends[1])] + (E.length - s));
    if (edge == q_edge) best = std::min(best, std::abs(s - q_s));
    return best;
  }
};

}  // namespace detail

inline unsigned mc_thread_count() {
  if (const char* env = std::getenv("POLYHEAT_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  return 1;
}

// Box-kernel density estimate of h_t(p, q) from N simulated endpoints.
// Each sample i draws from Stream(seed, i), so the estimate is independent
// of sharding; POLYHEAT_THREADS only changes wall time.
inline McEstimate mc_kernel_estimate(const Complex& X, const PointRef& p, const PointRef& q,
                                     double t, std::uint64_t N, double bandwidth,
                                     std::uint64_t seed) {
  if (X.dimension != 1) throw RangeError("mc_kernel_estimate requires a 1-complex");
  if (!(t > 0)) throw RangeError("time must be positive");
  if (N < 1000) throw RangeError("need at least 10^3 samples");
  GeometryBounds gb = geometry_constants(X);
  double dt = std::min((gb.ell / 10.0) * (gb.ell / 10.0), bandwidth * bandwidth / 4.0);
  dt = std::min(dt, t);
  if (bandwidth < 2.0 * std::sqrt(dt) * (1.0 - 1e-12))
    throw RangeError("bandwidth below 2*sqrt(dt)");

  detail::WalkerPos w0 = detail::walker_from_point(X, p);
  detail::DistanceOracle dist(X, q);
  // Measure of the bandwidth-ball around q, so the estimate integrates to 1.
  // Exact on 1-complexes at any subdivision.
  double window = ball_volume(X, q, bandwidth, gb.ell / 4.0);

  std::uint64_t nsteps = static_cast<std::uint64_t>(std::ceil(t / dt - 1e-12));
  double last = t - static_cast<double>(nsteps - 1) * dt;
  double step_sd = std::sqrt(2.0 * dt);
  double last_sd = std::sqrt(2.0 * last);

  auto run_one = [&](std::uint64_t i) -> bool {
    Stream rng(seed, i);
    detail::WalkerPos w = w0;
    for (std::uint64_t k = 0; k < nsteps; ++k) {
      double sd = (k + 1 == nsteps) ? last_sd : step_sd;
      detail::walker_advance(X, w, sd * rng.normal(), rng);
    }
    return dist(w.edge, w.s) <= bandwidth;
  };

  std::uint64_t hits = 0;
  unsigned threads = mc_thread_count();
  if (threads > 1) {
    std::vector<std::uint64_t> partial(threads, 0);
    std::vector<std::thread> pool;
    for (unsigned ti = 0; ti < threads; ++ti) {
      pool.emplace_back([&, ti] {
        std::uint64_t h = 0;
        for (std::uint64_t i = ti; i < N; i += threads)
          if (run_one(i)) ++h;
        partial[ti] = h;
      });
    }
    for (auto& th : pool) th.join();
    for (std::uint64_t h : partial) hits += h;
  } else {
    for (std::uint64_t i = 0; i < N; ++i)
      if (run_one(i)) ++hits;
  }

  McEstimate out;
  out.hits = hits;
  out.samples = N;
  out.bandwidth = bandwidth;
  out.dt = dt;
  double phat = static_cast<double>(hits) / static_cast<double>(N);
  out.value = phat / window;
  out.std_error = std::sqrt(phat * (1.0 - phat) / static_cast<double>(N)) / window;
  return out;
}

}  // namespace polyheat
