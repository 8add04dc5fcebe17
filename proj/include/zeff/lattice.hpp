#pragma once

#include <utility>
#include <vector>

#include "zeff/blockop.hpp"
#include "zeff/hodge.hpp"
#include "zeff/numkit.hpp"
#include "zeff/types.hpp"
#include "zeff/zproblem.hpp"

namespace zeff {

/// Periodic Cartesian lattice reduced to one unit cell. Nodes are the
/// integer points of the cell in lexicographic order (first coordinate most
/// significant); edges are (node, axis) pairs with the axis running fastest,
/// each pointing one step along its axis with wrap-around.
class Lattice {
 public:
  Lattice(Index dim, std::vector<Index> tau) : dim_(dim), tau_(std::move(tau)) {
    if (dim_ < 1 || dim_ > 3) throw DimensionError("Lattice: dimension must be 1, 2 or 3");
    if (static_cast<Index>(tau_.size()) != dim_)
      throw DimensionError("Lattice: one period per dimension expected");
    for (Index t : tau_)
      if (t < 1 || t > 16) throw DimensionError("Lattice: periods must lie in [1, 16]");
  }

  Index dim() const { return dim_; }
  const std::vector<Index>& tau() const { return tau_; }

  Index node_count() const {
    Index n = 1;
    for (Index t : tau_) n *= t;
    return n;
  }
  Index edge_count() const { return dim_ * node_count(); }

  Index node_index(const std::vector<Index>& coords) const {
    Index idx = 0;
    for (Index k = 0; k < dim_; ++k) idx = idx * tau_[k] + coords[k];
    return idx;
  }

  std::vector<Index> node_coords(Index idx) const {
    std::vector<Index> coords(static_cast<std::size_t>(dim_));
    for (Index k = dim_ - 1; k >= 0; --k) {
      coords[k] = idx % tau_[k];
      idx /= tau_[k];
    }
    return coords;
  }

  /// Node one step along `axis`, wrapped around the period.
  Index neighbor(Index node, Index axis) const {
    auto coords = node_coords(node);
    coords[axis] = (coords[axis] + 1) % tau_[axis];
    return node_index(coords);
  }

  Index edge_index(Index node, Index axis) const { return node * dim_ + axis; }
  Index edge_tail(Index e) const { return e / dim_; }
  Index edge_axis(Index e) const { return e % dim_; }

 private:
  Index dim_;
  std::vector<Index> tau_;
};

template <class Scalar = double>
struct PeriodicOperators {
  Mat<Scalar> d_sharp;        // edges x nodes periodic gradient
  Mat<Scalar> dbullet_sharp;  // nodes x edges periodic divergence, = -d_sharp^T
  Mat<Scalar> gamma0;         // rank-one projection onto constant edge fields
};

template <class Scalar = double>
PeriodicOperators<Scalar> build_periodic_ops(const Lattice& lat) {
  const Index np = lat.node_count();
  const Index ne = lat.edge_count();
  PeriodicOperators<Scalar> out;
  out.d_sharp = Mat<Scalar>::Zero(ne, np);
  for (Index e = 0; e < ne; ++e) {
    const Index tail = lat.edge_tail(e);
    const Index head = lat.neighbor(tail, lat.edge_axis(e));
    out.d_sharp(e, head) += Scalar(1);  // cancels exactly when the period is 1
    out.d_sharp(e, tail) -= Scalar(1);
  }
  out.dbullet_sharp = -out.d_sharp.transpose();
  out.gamma0 = Mat<Scalar>::Constant(ne, ne, Scalar(1.0 / double(ne)));
  return out;
}

/// Indicator of the edges parallel to `axis` (the gradient of the
/// coordinate function along that axis).
template <class Scalar = double>
Vec<Scalar> axis_indicator(const Lattice& lat, Index axis) {
  if (axis < 0 || axis >= lat.dim()) throw DimensionError("axis_indicator: axis out of range");
  Vec<Scalar> v = Vec<Scalar>::Zero(lat.edge_count());
  for (Index e = 0; e < lat.edge_count(); ++e)
    if (lat.edge_axis(e) == axis) v(e) = Scalar(1);
  return v;
}

/// Mean of an edge field over the edges of each axis. Diagnostic only; the
/// lattice mean-field space is the one-dimensional span of the constant
/// field, not a per-axis object.
template <class Scalar>
Vec<Scalar> axis_averages(const Lattice& lat, const Vec<Scalar>& field) {
  if (field.size() != lat.edge_count()) throw DimensionError("axis_averages: size mismatch");
  Vec<Scalar> out = Vec<Scalar>::Zero(lat.dim());
  for (Index e = 0; e < lat.edge_count(); ++e) out(lat.edge_axis(e)) += field(e);
  return out / Scalar(double(lat.node_count()));
}

/// Triple splitting of the periodic edge space: constants, periodic
/// gradients with zero mean, and mean-free divergence-free fields.
template <class Scalar = double>
OrthoDecomp<Scalar> lattice_hodge(const Lattice& lat, const Tolerances& tol = {}) {
  const auto ops = build_periodic_ops<Scalar>(lat);
  const Index ne = lat.edge_count();
  Mat<Scalar> constant = Mat<Scalar>::Constant(ne, 1, Scalar(1.0 / std::sqrt(double(ne))));
  const auto u = Subspace<Scalar>::from_orthonormal(std::move(constant));
  const auto e = range_of(ops.d_sharp, tol);
  const auto j = complement(span_union(u, e, tol), tol);
  return OrthoDecomp<Scalar>(ne, {u, e, j}, tol);
}

template <class Scalar = double>
class LatticeNetwork {
 public:
  LatticeNetwork(Lattice lattice, Mat<Scalar> sigma, Tolerances tol = {})
      : lattice_(std::move(lattice)), sigma_(std::move(sigma)), tol_(tol) {
    tol_.validate();
    if (sigma_.rows() != lattice_.edge_count() || sigma_.cols() != lattice_.edge_count())
      throw DimensionError("LatticeNetwork: sigma must be square on the periodic edge space");
    if (!is_psd(sigma_, tol_))
      throw HypothesisError("LatticeNetwork: sigma must be self-adjoint PSD");
  }

  static LatticeNetwork from_conductances(Lattice lattice, const RealVec& g,
                                          Tolerances tol = {}) {
    if (g.size() != lattice.edge_count())
      throw DimensionError("LatticeNetwork: one conductance per cell edge expected");
    Mat<Scalar> sigma = Mat<Scalar>::Zero(g.size(), g.size());
    for (Index i = 0; i < g.size(); ++i) sigma(i, i) = Scalar(g(i));
    return LatticeNetwork(std::move(lattice), std::move(sigma), tol);
  }

  const Lattice& lattice() const { return lattice_; }
  const Mat<Scalar>& sigma() const { return sigma_; }
  const Tolerances& tol() const { return tol_; }

 private:
  Lattice lattice_;
  Mat<Scalar> sigma_;
  Tolerances tol_;
};

template <class Scalar>
ZProblem<Scalar> lattice_zproblem(const LatticeNetwork<Scalar>& net) {
  return ZProblem<Scalar>(lattice_hodge<Scalar>(net.lattice(), net.tol()), net.sigma(),
                          net.tol());
}

/// Effective operator of the lattice Z-problem (one-dimensional U).
template <class Scalar>
EffectiveOperator<Scalar> lattice_effective_operator(const LatticeNetwork<Scalar>& net) {
  return effective_operator(lattice_zproblem(net));
}

template <class Scalar>
Scalar lattice_sigma_star(const LatticeNetwork<Scalar>& net) {
  return lattice_effective_operator(net).matrix(0, 0);
}

/// Periodic edge fields that are gradients of (not necessarily periodic)
/// potentials. A potential with periodic gradient splits into a periodic
/// part plus a linear part, so the space is ran D_sharp together with the
/// per-axis coordinate gradients.
template <class Scalar = double>
Subspace<Scalar> ranD_intersect_periodic(const Lattice& lat, const Tolerances& tol = {}) {
  const auto ops = build_periodic_ops<Scalar>(lat);
  Mat<Scalar> cols(lat.edge_count(), lat.node_count() + lat.dim());
  cols.leftCols(lat.node_count()) = ops.d_sharp;
  for (Index a = 0; a < lat.dim(); ++a)
    cols.col(lat.node_count() + a) = axis_indicator<Scalar>(lat, a);
  return orthonormalize(cols, tol);
}

/// The triple splitting adapted to gradients: all periodic gradient fields
/// (harmonic ones first), then the complement of the gradient space.
template <class Scalar = double>
OrthoDecomp<Scalar> periodic_dirichlet_decomp(const Lattice& lat, const Tolerances& tol = {}) {
  const auto ops = build_periodic_ops<Scalar>(lat);
  const auto grad_fields = ranD_intersect_periodic<Scalar>(lat, tol);
  const auto e_pound = range_of(ops.d_sharp, tol);
  const auto u_pound = subtract(grad_fields, e_pound, tol);
  const auto j_pound = complement(grad_fields, tol);
  return OrthoDecomp<Scalar>(lat.edge_count(), {u_pound, e_pound, j_pound}, tol);
}

template <class Scalar>
struct CompressionCheck {
  bool holds = false;
  Scalar lhs{};  // sigma_star from the mean-field triple
  Scalar rhs{};  // cell average of the gradient-triple effective operator
  double residual = 0.0;
};

/// The mean-field effective operator equals the compression (by the edge
/// cell average) of the effective operator of the gradient-adapted triple.
template <class Scalar>
CompressionCheck<Scalar> compression_check(const LatticeNetwork<Scalar>& net) {
  CompressionCheck<Scalar> out;
  out.lhs = lattice_sigma_star(net);

  const auto pound = periodic_dirichlet_decomp<Scalar>(net.lattice(), net.tol());
  const ZProblem<Scalar> zp(pound, net.sigma(), net.tol());
  const auto star_pound = effective_operator(zp).matrix;

  const auto mean_triple = lattice_hodge<Scalar>(net.lattice(), net.tol());
  const Mat<Scalar> overlap = mean_triple.part(0).basis().adjoint() * pound.part(0).basis();
  const Mat<Scalar> compressed = overlap * star_pound * overlap.adjoint();
  out.rhs = compressed(0, 0);
  out.residual = std::abs(out.lhs - out.rhs);
  out.holds = out.residual <= net.tol().eq_atol * std::max(1.0, std::abs(out.lhs));
  return out;
}

template <class Scalar>
struct EffcondExistence {
  bool exists = false;
  bool kernel_inclusion = false;  // ker(Gamma_E sigma Gamma_V) <= ker(Gamma_U sigma Gamma_V)
  Index v_dim = 0;                // dim of the test space V
  Scalar sigma_eff{};             // equals sigma_star when exists
};

/// Existence test for a single-valued average-to-average conductivity over
/// all periodic Ohm pairs. V is the complement of the constants inside the
/// periodic gradient fields.
template <class Scalar>
EffcondExistence<Scalar> effcond_exists(const LatticeNetwork<Scalar>& net) {
  const auto& lat = net.lattice();
  const auto mean_triple = lattice_hodge<Scalar>(lat, net.tol());
  const auto grad_fields = ranD_intersect_periodic<Scalar>(lat, net.tol());
  const auto v = subtract(grad_fields, mean_triple.part(0), net.tol());

  EffcondExistence<Scalar> out;
  out.v_dim = v.dim();
  const Mat<Scalar> me = mean_triple.part(1).basis().adjoint() * net.sigma() * v.basis();
  const Mat<Scalar> mu = mean_triple.part(0).basis().adjoint() * net.sigma() * v.basis();
  out.kernel_inclusion = kernel_included(me, mu, net.tol());
  out.exists = out.kernel_inclusion;
  out.sigma_eff = lattice_sigma_star(net);
  return out;
}

/// A self-adjoint PSD conductivity for which no average-to-average
/// conductivity exists: it couples the constant field to a circulating
/// gradient field in J inter ran D. Throws when the lattice has no such
/// field (for instance in one dimension).
template <class Scalar = double>
Mat<Scalar> sigma_without_effcond(const Lattice& lat, const Tolerances& tol = {}) {
  const auto mean_triple = lattice_hodge<Scalar>(lat, tol);
  const auto grad_fields = ranD_intersect_periodic<Scalar>(lat, tol);
  const auto circulating = intersection(mean_triple.part(2), grad_fields, tol);
  if (circulating.dim() == 0)
    throw HypothesisError("sigma_without_effcond: J inter ran D is trivial for this lattice");
  const Vec<Scalar> i0 = mean_triple.part(0).basis().col(0);
  const Vec<Scalar> i = circulating.basis().col(0);
  const Vec<Scalar> sum = i0 + i;
  return sum * sum.adjoint();
}

}  // namespace zeff
