#pragma once

// Cyclic Jacobi eigensolver for dense real symmetric matrices.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "bcycle/error.hpp"

namespace bcycle {

template <typename Scalar>
struct SymmetricEigenResult {
  /// Sorted descending.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;
  /// Column n is the unit eigenvector of eigenvalues(n). Empty when not requested.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;
  int sweeps = 0;
};

struct JacobiOptions {
  /// Convergence when the off-diagonal Frobenius norm drops below
  /// `tolerance * max(1, ||C||_F)`.
  double tolerance = 1e-12;
  int max_sweeps = 100;
  bool compute_vectors = true;
  /// Eigenvector signs are fixed so the mean over the leading `sign_block`
  /// components is positive; 0 means the whole vector. When that mean
  /// vanishes the first nonzero component is made positive.
  Eigen::Index sign_block = 0;
  double symmetry_tolerance = 1e-12;
};

namespace detail {

template <typename Vec>
void canonicalize_sign(Vec&& v, Eigen::Index block) {
  const Eigen::Index n = v.size();
  const Eigen::Index b = (block <= 0 || block > n) ? n : block;
  const auto mean = v.head(b).mean();
  bool flip = false;
  if (std::abs(mean) > 1e-12) {
    flip = mean < 0;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        flip = v(i) < 0;
        break;
      }
    }
  }
  if (flip) v = -v;
}

}  // namespace detail

template <typename Derived>
[[nodiscard]] SymmetricEigenResult<typename Derived::Scalar> eig_symmetric(
    const Eigen::MatrixBase<Derived>& input, const JacobiOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Index = Eigen::Index;

  const Index n = input.rows();
  if (n == 0 || input.cols() != n) {
    throw InputError("eig_symmetric requires a nonempty square matrix");
  }
  if (!input.allFinite()) throw InputError("eig_symmetric: non-finite entries");
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(input(i, j) - input(j, i)) > opts.symmetry_tolerance) {
        std::ostringstream os;
        os << "eig_symmetric: matrix not symmetric at (" << i << ", " << j
           << "), difference " << std::abs(input(i, j) - input(j, i));
        throw InputError(os.str());
      }
    }
  }

  Matrix a = input;
  Matrix v;
  if (opts.compute_vectors) v = Matrix::Identity(n, n);

  const Scalar scale = std::max(Scalar(1), a.norm());
  const Scalar threshold = Scalar(opts.tolerance) * scale;

  auto off_norm = [&] {
    Scalar s = 0;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  Scalar off = off_norm();
  while (off > threshold) {
    if (sweep >= opts.max_sweeps) {
      std::ostringstream os;
      os << "eig_symmetric: no convergence after " << sweep
         << " sweeps (off-diagonal norm " << off << ", threshold " << threshold
         << ", n = " << n << ")";
      throw NumericalError(os.str());
    }
    ++sweep;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        Scalar t = Scalar(1) / (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        if (theta < 0) t = -t;
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = Scalar(0);
        for (Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        if (opts.compute_vectors) {
          for (Index k = 0; k < n; ++k) {
            const Scalar vkp = v(k, p);
            const Scalar vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
    off = off_norm();
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) > a(j, j); });

  SymmetricEigenResult<Scalar> out;
  out.sweeps = sweep;
  out.eigenvalues.resize(n);
  if (opts.compute_vectors) out.eigenvectors.resize(n, n);
  for (Index r = 0; r < n; ++r) {
    const Index src = order[static_cast<std::size_t>(r)];
    out.eigenvalues(r) = a(src, src);
    if (opts.compute_vectors) {
      out.eigenvectors.col(r) = v.col(src);
      detail::canonicalize_sign(out.eigenvectors.col(r), opts.sign_block);
    }
  }
  return out;
}

}  // namespace bcycle
