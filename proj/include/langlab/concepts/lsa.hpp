#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "langlab/error.hpp"

namespace langlab::concepts {

using Matrix = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct SvdResult {
  Matrix left;   // m x r, orthonormal columns
  Vec sigma;     // r, strictly positive, descending
  Matrix right;  // r x n, orthonormal rows

  Eigen::Index rank() const noexcept { return sigma.size(); }
};

struct SvdOptions {
  int max_sweeps = 60;
  double orth_eps = 1e-13;  // rotation threshold relative to column norms
};

// One-sided Jacobi (Hestenes): rotate column pairs of A V until they are
// mutually orthogonal; the column norms are then the singular values.
// Values below tol * sigma_max are dropped.
inline SvdResult svd(const Matrix& l, double tol, SvdOptions opt = {}) {
  require(tol > 0.0, Errc::InvalidArgument, "svd tolerance must be positive");
  require(l.allFinite(), Errc::InvalidArgument, "svd input has non-finite entries");
  const Eigen::Index m = l.rows(), n = l.cols();
  Matrix a = l;
  Matrix v = Matrix::Identity(n, n);

  // Columns that have collapsed to rounding noise are left alone; rotating
  // them against anything never settles.
  const double noise = std::numeric_limits<double>::epsilon() * l.norm();
  const double floor = noise * noise;
  bool converged = n < 2;
  for (int sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (alpha <= floor || beta <= floor) continue;
        if (std::abs(gamma) <= opt.orth_eps * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double x = a(k, p), y = a(k, q);
          a(k, p) = c * x - s * y;
          a(k, q) = s * x + c * y;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = v(k, p), y = v(k, q);
          v(k, p) = c * x - s * y;
          v(k, q) = s * x + c * y;
        }
      }
  }
  require(converged, Errc::NoConvergence, "Jacobi SVD did not converge in " + std::to_string(opt.max_sweeps) + " sweeps");

  std::vector<double> norms(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) norms[static_cast<std::size_t>(j)] = a.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return norms[static_cast<std::size_t>(x)] > norms[static_cast<std::size_t>(y)];
  });
  const double smax = n > 0 ? norms[static_cast<std::size_t>(order.front())] : 0.0;
  std::vector<Eigen::Index> keep;
  for (auto j : order) {
    const double s = norms[static_cast<std::size_t>(j)];
    if (s > 0.0 && s >= tol * smax) keep.push_back(j);
  }

  const auto r = static_cast<Eigen::Index>(keep.size());
  SvdResult out{Matrix(m, r), Vec(r), Matrix(r, n)};
  for (Eigen::Index k = 0; k < r; ++k) {
    const auto j = keep[static_cast<std::size_t>(k)];
    const double s = norms[static_cast<std::size_t>(j)];
    Vec u = a.col(j) / s;
    Vec w = v.col(j);
    Eigen::Index big = 0;
    u.cwiseAbs().maxCoeff(&big);
    if (u(big) < 0) {
      u = -u;
      w = -w;
    }
    out.left.col(k) = u;
    out.sigma(k) = s;
    out.right.row(k) = w.transpose();
  }
  return out;
}

inline SvdResult truncate(const SvdResult& s, Eigen::Index k) {
  require(k >= 1 && k <= s.rank(), Errc::BadRank,
          "rank " + std::to_string(k) + " outside 1.." + std::to_string(s.rank()));
  return {s.left.leftCols(k), s.sigma.head(k), s.right.topRows(k)};
}

inline Matrix reconstruct(const SvdResult& s) { return s.left * s.sigma.asDiagonal() * s.right; }

struct LatentConcept {
  double strength;
  Vec users;  // left singular vector
  Vec items;  // right singular vector
};

inline std::vector<LatentConcept> latent_concepts(const SvdResult& s) {
  std::vector<LatentConcept> out;
  for (Eigen::Index k = 0; k < s.rank(); ++k)
    out.push_back({s.sigma(k), s.left.col(k), s.right.row(k).transpose()});
  return out;
}

// L-dagger maps: items-to-users is L, users-to-items is L transposed.
inline Vec to_users(const Matrix& l, const Vec& items) { return l * items; }
inline Vec to_items(const Matrix& l, const Vec& users) { return l.transpose() * users; }

}  // namespace langlab::concepts
