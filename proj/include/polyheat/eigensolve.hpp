#pragma once

// Generalized symmetric eigensolve for (K, M) with diagonal M: dense below a
// node threshold, shift-invert Lanczos with full reorthogonalization above.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "polyheat/discretize.hpp"
#include "polyheat/rng.hpp"

namespace polyheat {

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd vectors;          // node x count, mass-orthonormal
  double max_residual = 0;
  int total_nodes = 0;
  double h = 0;
  bool dirichlet = false;
  const DiscreteOperator* op = nullptr;
};

namespace detail {

inline double pair_residual(const DiscreteOperator& D, double lambda,
                            const Eigen::VectorXd& phi, double knorm) {
  Eigen::VectorXd r = D.stiffness * phi - lambda * D.mass.cwiseProduct(phi);
  double scale = (knorm + std::abs(lambda) * D.mass.maxCoeff()) * phi.norm();
  return r.norm() / std::max(scale, 1e-300);
}

// On a uniform 1-D mesh the stencil's eigenvectors are exactly sampled
// continuum eigenfunctions (at every vertex degree, Neumann or node-removal
// Dirichlet alike), so the whole discretization error sits in the dispersion
// lambda_h = (4/h^2) sin^2(sqrt(lambda) h / 2).  Inverting it recovers the
// metric-graph eigenvalues to roundoff.
inline void undo_dispersion(const DiscreteOperator& D,
                            std::vector<double>& eigenvalues) {
  if (D.X == nullptr || D.X->dimension != 1 || D.edge_mesh.empty()) return;
  double step = D.edge_mesh[0].step;
  for (const auto& em : D.edge_mesh)
    if (std::abs(em.step - step) > 1e-12 * step) return;
  for (double& l : eigenvalues) {
    double x = std::sqrt(std::max(l, 0.0)) * step / 2;
    double k = (2.0 / step) * std::asin(std::min(x, 1.0));
    l = k * k;
  }
}

}  // namespace detail

inline SpectralDecomposition eigensolve(const DiscreteOperator& D, int count,
                                        int dense_threshold = 3000) {
  int n = D.node_count();
  if (count < 1 || count > n)
    throw RangeError("eigenpair count must lie in [1, node count]");
  SpectralDecomposition S;
  S.total_nodes = n;
  S.h = D.h;
  S.dirichlet = D.dirichlet;
  S.op = &D;

  Eigen::VectorXd rsqrt = D.mass.cwiseSqrt().cwiseInverse();
  double knorm = 0;
  for (int c = 0; c < D.stiffness.outerSize(); ++c) {
    double col = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(D.stiffness, c); it; ++it)
      col += std::abs(it.value());
    knorm = std::max(knorm, col);
  }

  if (n <= dense_threshold) {
    Eigen::MatrixXd B = Eigen::MatrixXd(D.stiffness);
    B = rsqrt.asDiagonal() * B * rsqrt.asDiagonal();
    B = 0.5 * (B + B.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (es.info() != Eigen::Success)
      throw ConvergenceError("dense eigensolver failed");
    S.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + count);
    for (auto& l : S.eigenvalues) l = std::max(l, 0.0);
    S.vectors = rsqrt.asDiagonal() * es.eigenvectors().leftCols(count);
  } else {
    // shift-invert Lanczos on A = K + c M against the M inner product
    double shift = 1.0;
    Eigen::SparseMatrix<double> A = D.stiffness;
    Eigen::SparseMatrix<double> Mdiag(n, n);
    std::vector<Eigen::Triplet<double>> mt;
    for (int i = 0; i < n; ++i) mt.push_back({i, i, D.mass[i]});
    Mdiag.setFromTriplets(mt.begin(), mt.end());
    A += shift * Mdiag;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
      throw ConvergenceError("factorization of the shifted operator failed");

    int m = std::min(n, std::max(2 * count + 80, 140));
    for (int attempt = 0;; ++attempt) {
      Eigen::MatrixXd Q(n, m);
      Eigen::VectorXd alpha(m), beta(m);
      Stream rng(0x9e193ull + attempt);
      Eigen::VectorXd q(n);
      for (int i = 0; i < n; ++i) q[i] = rng.normal();
      q /= std::sqrt(q.dot(D.mass.cwiseProduct(q)));
      Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
      double beta_prev = 0;
      int built = 0;
      for (int j = 0; j < m; ++j) {
        Q.col(j) = q;
        Eigen::VectorXd w = solver.solve(D.mass.cwiseProduct(q));
        alpha[j] = w.dot(D.mass.cwiseProduct(q));
        w -= alpha[j] * q + beta_prev * prev;
        // full reorthogonalization, twice for safety
        for (int pass = 0; pass < 2; ++pass) {
          Eigen::VectorXd proj =
              Q.leftCols(j + 1).transpose() * D.mass.cwiseProduct(w);
          w -= Q.leftCols(j + 1) * proj;
        }
        double b = std::sqrt(std::max(0.0, w.dot(D.mass.cwiseProduct(w))));
        beta[j] = b;
        built = j + 1;
        if (b < 1e-14) break;
        prev = q;
        q = w / b;
        beta_prev = b;
      }
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
      for (int j = 0; j < built; ++j) {
        T(j, j) = alpha[j];
        if (j + 1 < built) {
          T(j, j + 1) = beta[j];
          T(j + 1, j) = beta[j];
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      if (es.info() != Eigen::Success)
        throw ConvergenceError("tridiagonal eigensolver failed");
      // largest nu correspond to the smallest lambda = 1/nu - shift
      int have = std::min(count, built);
      S.eigenvalues.assign(have, 0.0);
      S.vectors.resize(n, have);
      for (int i = 0; i < have; ++i) {
        double nu = es.eigenvalues()[built - 1 - i];
        S.eigenvalues[i] = std::max(0.0, 1.0 / nu - shift);
        S.vectors.col(i) =
            Q.leftCols(built) * es.eigenvectors().col(built - 1 - i);
        double nrm = std::sqrt(
            S.vectors.col(i).dot(D.mass.cwiseProduct(S.vectors.col(i))));
        S.vectors.col(i) /= nrm;
      }
      std::vector<int> order(have);
      for (int i = 0; i < have; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return S.eigenvalues[a] < S.eigenvalues[b];
      });
      std::vector<double> ev(have);
      Eigen::MatrixXd vs(n, have);
      for (int i = 0; i < have; ++i) {
        ev[i] = S.eigenvalues[order[i]];
        vs.col(i) = S.vectors.col(order[i]);
      }
      S.eigenvalues = ev;
      S.vectors = vs;

      double worst = 0;
      for (int i = 0; i < have; ++i)
        worst = std::max(worst, detail::pair_residual(D, S.eigenvalues[i],
                                                      S.vectors.col(i), knorm));
      if (have == count && worst <= 1e-9) {
        S.max_residual = worst;
        break;
      }
      if (attempt >= 1 || 2 * m >= n + 40)
        throw ConvergenceError(
            "Lanczos residual " + std::to_string(worst) + " above 1e-9 with " +
            std::to_string(m) + " iterations");
      m = std::min(n, 2 * m);
    }
    detail::undo_dispersion(D, S.eigenvalues);
    return S;
  }

  double worst = 0;
  for (size_t i = 0; i < S.eigenvalues.size(); ++i)
    worst = std::max(worst, detail::pair_residual(
                                D, S.eigenvalues[i],
                                S.vectors.col(static_cast<int>(i)), knorm));
  S.max_residual = worst;
  if (worst > 1e-9)
    throw ConvergenceError("dense residual " + std::to_string(worst) +
                           " above 1e-9");
  detail::undo_dispersion(D, S.eigenvalues);
  return S;
}

}  // namespace polyheat
