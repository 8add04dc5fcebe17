#pragma once

#include <random>

#include "zeff/numkit.hpp"
#include "zeff/types.hpp"

namespace zeff {

using Rng = std::mt19937_64;

template <class Scalar>
Scalar random_uniform_scalar(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if constexpr (std::is_same_v<Scalar, double>) {
    return u(rng);
  } else {
    return Scalar(u(rng), u(rng));
  }
}

template <class Scalar>
Scalar random_gaussian_scalar(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  if constexpr (std::is_same_v<Scalar, double>) {
    return g(rng);
  } else {
    return Scalar(g(rng), g(rng));
  }
}

template <class Scalar>
Vec<Scalar> random_uniform_vec(Rng& rng, Index n) {
  Vec<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v(i) = random_uniform_scalar<Scalar>(rng);
  return v;
}

template <class Scalar>
Mat<Scalar> random_gaussian_mat(Rng& rng, Index m, Index n) {
  Mat<Scalar> a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = random_gaussian_scalar<Scalar>(rng);
  return a;
}

/// n x k matrix with orthonormal columns (Haar-ish, via QR of a Gaussian).
template <class Scalar>
Mat<Scalar> random_orthonormal(Rng& rng, Index n, Index k) {
  if (k > n) throw DimensionError("random_orthonormal: k > n");
  if (k == 0) return Mat<Scalar>::Zero(n, 0);
  const Mat<Scalar> g = random_gaussian_mat<Scalar>(rng, n, k);
  Eigen::HouseholderQR<Mat<Scalar>> qr(g);
  return qr.householderQ() * Mat<Scalar>::Identity(n, k);
}

template <class Scalar>
Mat<Scalar> random_selfadjoint(Rng& rng, Index n) {
  const Mat<Scalar> g = random_gaussian_mat<Scalar>(rng, n, n);
  return (g + Mat<Scalar>(g.adjoint())) / Scalar(2);
}

/// Self-adjoint PSD matrix with exact rank r and spectrum in [lo, hi].
template <class Scalar>
Mat<Scalar> random_psd(Rng& rng, Index n, Index r, double lo = 0.5, double hi = 2.0) {
  if (r > n) throw DimensionError("random_psd: rank > n");
  const Mat<Scalar> q = random_orthonormal<Scalar>(rng, n, r);
  std::uniform_real_distribution<double> u(lo, hi);
  Mat<Scalar> out = Mat<Scalar>::Zero(n, n);
  for (Index i = 0; i < r; ++i) out.noalias() += (Scalar(u(rng)) * q.col(i)) * q.col(i).adjoint();
  return (out + Mat<Scalar>(out.adjoint())) / Scalar(2);
}

template <class Scalar>
Mat<Scalar> random_psd_invertible(Rng& rng, Index n, double lo = 0.5, double hi = 2.0) {
  return random_psd<Scalar>(rng, n, n, lo, hi);
}

/// Rank-r matrix of a given shape, built from orthonormal factors.
template <class Scalar>
Mat<Scalar> random_rank(Rng& rng, Index m, Index n, Index r) {
  if (r > std::min(m, n)) throw DimensionError("random_rank: rank too large");
  const Mat<Scalar> u = random_orthonormal<Scalar>(rng, m, r);
  const Mat<Scalar> v = random_orthonormal<Scalar>(rng, n, r);
  std::uniform_real_distribution<double> s(0.5, 2.0);
  Mat<Scalar> out = Mat<Scalar>::Zero(m, n);
  for (Index i = 0; i < r; ++i) out.noalias() += (Scalar(s(rng)) * u.col(i)) * v.col(i).adjoint();
  return out;
}

}  // namespace zeff
