#pragma once

#include <utility>
#include <vector>

#include "zeff/blockop.hpp"
#include "zeff/network.hpp"
#include "zeff/random.hpp"
#include "zeff/types.hpp"

namespace zeff {

/// Random orthogonal triple splitting of K^n with the given part ranks.
template <class Scalar>
OrthoDecomp<Scalar> random_triple_decomp(Rng& rng, Index n, Index d0, Index d1, Index d2,
                                         const Tolerances& tol = {}) {
  if (d0 + d1 + d2 != n) throw DimensionError("random_triple_decomp: ranks must sum to n");
  const Mat<Scalar> q = random_orthonormal<Scalar>(rng, n, n);
  return OrthoDecomp<Scalar>(
      n,
      {Subspace<Scalar>::from_orthonormal(q.leftCols(d0)),
       Subspace<Scalar>::from_orthonormal(q.middleCols(d0, d1)),
       Subspace<Scalar>::from_orthonormal(q.rightCols(d2))},
      tol);
}

/// Random part sizes with U and E nonempty; J may be trivial.
template <class Scalar>
OrthoDecomp<Scalar> random_triple_decomp(Rng& rng, Index n, const Tolerances& tol = {}) {
  if (n < 2) throw DimensionError("random_triple_decomp: need dimension at least 2");
  const Index d0 = std::uniform_int_distribution<Index>(1, n - 1)(rng);
  const Index d1 = std::uniform_int_distribution<Index>(1, n - d0)(rng);
  const Index d2 = n - d0 - d1;
  return random_triple_decomp<Scalar>(rng, n, d0, d1, d2, tol);
}

/// Self-adjoint 2x2 block matrix with exact rank structure. When
/// `respect_inclusion` the off-diagonal block is composed with X11 so that
/// ker X11 lands inside ker X01; otherwise X01 is unconstrained.
template <class Scalar>
Mat<Scalar> random_two_block_selfadjoint(Rng& rng, Index d0, Index d1, Index rank11,
                                         bool respect_inclusion, bool make_psd) {
  if (make_psd) {
    const Mat<Scalar> g = random_gaussian_mat<Scalar>(rng, d0 + d1 + 2, d0 + d1);
    return Mat<Scalar>(g.adjoint() * g);
  }
  Mat<Scalar> x11 = random_psd<Scalar>(rng, d1, rank11);
  if (rank11 > 0 && random_uniform_scalar<double>(rng) > 0.0) x11 = -x11;  // indefinite too
  Mat<Scalar> x01 = random_gaussian_mat<Scalar>(rng, d0, d1);
  if (respect_inclusion) x01 = x01 * x11;
  const Mat<Scalar> x00 = random_selfadjoint<Scalar>(rng, d0);
  Mat<Scalar> x(d0 + d1, d0 + d1);
  x.topLeftCorner(d0, d0) = x00;
  x.topRightCorner(d0, d1) = x01;
  x.bottomLeftCorner(d1, d0) = x01.adjoint();
  x.bottomRightCorner(d1, d1) = x11;
  return x;
}

template <class Scalar>
OrthoDecomp<Scalar> axis_two_part(Index d0, Index d1) {
  const Index n = d0 + d1;
  const Mat<Scalar> id = Mat<Scalar>::Identity(n, n);
  return OrthoDecomp<Scalar>(n, {Subspace<Scalar>::from_orthonormal(id.leftCols(d0)),
                                 Subspace<Scalar>::from_orthonormal(id.rightCols(d1))});
}

template <class Scalar>
OrthoDecomp<Scalar> axis_three_part(Index d0, Index d1, Index d2) {
  const Index n = d0 + d1 + d2;
  const Mat<Scalar> id = Mat<Scalar>::Identity(n, n);
  return OrthoDecomp<Scalar>(n, {Subspace<Scalar>::from_orthonormal(id.leftCols(d0)),
                                 Subspace<Scalar>::from_orthonormal(id.middleCols(d0, d1)),
                                 Subspace<Scalar>::from_orthonormal(id.rightCols(d2))});
}

/// Connected digraph on n nodes: a random spanning tree plus extra edges,
/// with random edge orientations. Parallel edges are allowed.
inline Digraph random_connected_digraph(Rng& rng, Index n, Index extra_edges) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 1; i < n; ++i) {
    std::uniform_int_distribution<Index> pick(0, i - 1);
    const Index other = pick(rng);
    if (std::uniform_int_distribution<int>(0, 1)(rng)) {
      edges.emplace_back(other, i);
    } else {
      edges.emplace_back(i, other);
    }
  }
  std::uniform_int_distribution<Index> node(0, n - 1);
  Index added = 0;
  while (added < extra_edges) {
    const Index a = node(rng), b = node(rng);
    if (a == b) continue;
    edges.emplace_back(a, b);
    ++added;
  }
  return Digraph(n, std::move(edges));
}

inline RealVec random_positive_conductances(Rng& rng, Index count, double lo = 0.2,
                                            double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RealVec g(count);
  for (Index i = 0; i < count; ++i) g(i) = u(rng);
  return g;
}

/// Random pair (T, U) with T U = 0: U maps into the middle space and T is
/// supported on the orthogonal complement of ran U.
template <class Scalar>
std::pair<Mat<Scalar>, Mat<Scalar>> random_hodge_pair(Rng& rng, Index dim_a, Index dim_b,
                                                      Index dim_c, Index rank_u) {
  const Mat<Scalar> u = random_rank<Scalar>(rng, dim_b, dim_a, rank_u);
  const auto ran_u = range_of(u);
  const Mat<Scalar> away =
      Mat<Scalar>::Identity(dim_b, dim_b) - ran_u.projection();
  const Mat<Scalar> t = random_gaussian_mat<Scalar>(rng, dim_c, dim_b) * away;
  return {t, u};
}

}  // namespace zeff
