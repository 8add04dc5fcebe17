#pragma once

#include <sstream>

#include "zeff/numkit.hpp"
#include "zeff/types.hpp"

namespace zeff {

/// Orthogonal triple splitting of the middle space B produced by a pair of
/// operators T: B -> C and U: A -> B with T U = 0.
template <class Scalar>
struct HodgeDecomposition {
  Subspace<Scalar> ran_Tstar;
  Subspace<Scalar> harmonic;  // ker(T^*T + UU^*) = ker T inter ker U^*
  Subspace<Scalar> ran_U;

  Mat<Scalar> projection_ran_Tstar;  // T^+ T
  Mat<Scalar> projection_ran_U;      // U U^+
  Mat<Scalar> projection_harmonic;   // identity minus the other two
};

template <class Scalar>
HodgeDecomposition<Scalar> hodge_decompose(const Mat<Scalar>& t, const Mat<Scalar>& u,
                                           const Tolerances& tol = {}) {
  if (t.cols() != u.rows())
    throw DimensionError("hodge_decompose: T and U do not share the middle space");
  const double coupling = (t * u).norm();
  const double scale = t.norm() * u.norm();
  if (coupling > 1e-10 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << "hodge_decompose: T U != 0 (||TU|| = " << coupling << ")";
    throw HypothesisError(msg.str());
  }

  const Index n = t.cols();
  HodgeDecomposition<Scalar> out;
  out.ran_Tstar = range_of(Mat<Scalar>(t.adjoint()), tol);
  out.ran_U = range_of(u, tol);
  const Mat<Scalar> laplacian = Mat<Scalar>(t.adjoint()) * t + u * Mat<Scalar>(u.adjoint());
  out.harmonic = kernel(laplacian, tol);

  out.projection_ran_Tstar = pinv(t, tol) * t;
  out.projection_ran_U = u * pinv(u, tol);
  out.projection_harmonic =
      Mat<Scalar>::Identity(n, n) - out.projection_ran_Tstar - out.projection_ran_U;
  return out;
}

}  // namespace zeff
