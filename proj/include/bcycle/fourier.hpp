#pragma once

// Direct-summation discrete Fourier transform on the monthly grid.
//
// Convention: for a real series x(t_j), t_j = j (months), j = 1..L,
//
//   x~(w_k) = L^{-1/2} sum_j x(t_j) exp(+i w_k t_j),   w_k = 2 pi k / L,
//   x(t_j)  = L^{-1/2} sum_k x~(w_k) exp(-i w_k t_j).
//
// The transform is unitary, so Parseval holds without extra factors and
// x~*(w_k) = x~(w_{L-k}) for real input. L stays in the low hundreds for
// monthly panels, so O(L^2) summation with an exact twiddle table is used
// instead of an FFT; it also evaluates at arbitrary frequencies.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

#include "bcycle/error.hpp"

namespace bcycle {

template <typename Scalar>
using ComplexSeries = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealSeries = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Fourier frequency w_k in rad/month for a grid of length L.
template <typename Scalar = double>
[[nodiscard]] inline Scalar fourier_frequency(Eigen::Index k, Eigen::Index length) {
  return Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(length);
}

namespace detail {

// exp(+2 pi i m / L) for m = 0..L-1; index (k * j) mod L avoids phase drift.
template <typename Scalar>
ComplexSeries<Scalar> twiddle_table(Eigen::Index length) {
  ComplexSeries<Scalar> table(length);
  for (Eigen::Index m = 0; m < length; ++m) {
    table(m) = std::polar(Scalar(1), fourier_frequency<Scalar>(m, length));
  }
  return table;
}

inline void require_length(Eigen::Index length) {
  if (length < 2) {
    throw InputError("DFT requires at least 2 samples, got " + std::to_string(length));
  }
}

}  // namespace detail

/// Forward transform of each row of `x` (series along columns).
template <typename Derived>
[[nodiscard]] ComplexMatrix<typename Derived::Scalar> dft_rows(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index length = x.cols();
  detail::require_length(length);
  const auto table = detail::twiddle_table<Scalar>(length);
  const Scalar norm = Scalar(1) / std::sqrt(Scalar(length));

  ComplexMatrix<Scalar> out(x.rows(), length);
  ComplexSeries<Scalar> phasor(length);
  for (Eigen::Index k = 0; k < length; ++k) {
    for (Eigen::Index j = 0; j < length; ++j) {
      // t_j = j + 1
      phasor(j) = table((k * (j + 1)) % length);
    }
    out.col(k) = (x.template cast<std::complex<Scalar>>() * phasor) * norm;
  }
  return out;
}

/// Forward transform of a single real series.
template <typename Derived>
[[nodiscard]] ComplexSeries<typename Derived::Scalar> dft_forward(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const RealMatrix<Scalar> row = x.derived().reshaped().transpose();
  return dft_rows(row).row(0).transpose();
}

/// Inverse of dft_forward; returns the real part (imaginary residue is rounding).
template <typename Derived>
[[nodiscard]] RealSeries<typename Derived::Scalar::value_type> dft_inverse(
    const Eigen::MatrixBase<Derived>& coeffs) {
  using Scalar = typename Derived::Scalar::value_type;
  const Eigen::Index length = coeffs.size();
  detail::require_length(length);
  const auto table = detail::twiddle_table<Scalar>(length);
  const Scalar norm = Scalar(1) / std::sqrt(Scalar(length));
  RealSeries<Scalar> out(length);
  for (Eigen::Index j = 0; j < length; ++j) {
    std::complex<Scalar> acc(0);
    for (Eigen::Index k = 0; k < length; ++k) {
      acc += coeffs(k) * std::conj(table((k * (j + 1)) % length));
    }
    out(j) = acc.real() * norm;
  }
  return out;
}

/// Transform of each row evaluated at an arbitrary frequency (rad/month).
template <typename Derived>
[[nodiscard]] ComplexSeries<typename Derived::Scalar> dft_rows_at_frequency(
    const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar omega) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index length = x.cols();
  if (length < 1) throw InputError("DFT at frequency requires a nonempty series");
  if (!std::isfinite(omega)) throw InputError("DFT frequency must be finite");
  ComplexSeries<Scalar> phasor(length);
  for (Eigen::Index j = 0; j < length; ++j) {
    phasor(j) = std::polar(Scalar(1), omega * Scalar(j + 1));
  }
  const Scalar norm = Scalar(1) / std::sqrt(Scalar(length));
  return (x.template cast<std::complex<Scalar>>() * phasor) * norm;
}

template <typename Derived>
[[nodiscard]] std::complex<typename Derived::Scalar> dft_at_frequency(
    const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar omega) {
  using Scalar = typename Derived::Scalar;
  const RealMatrix<Scalar> row = x.derived().reshaped().transpose();
  return dft_rows_at_frequency(row, omega)(0);
}

/// Principal argument in (-pi, pi].
template <typename Scalar>
[[nodiscard]] Scalar principal_arg(const std::complex<Scalar>& z) {
  Scalar a = std::arg(z);
  if (a <= -std::numbers::pi_v<Scalar>) a += Scalar(2) * std::numbers::pi_v<Scalar>;
  return a;
}

}  // namespace bcycle
