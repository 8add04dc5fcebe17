#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <utility>
#include <vector>

#include "zeff/types.hpp"

namespace zeff {

template <class Scalar>
class Subspace;

template <class Scalar>
Subspace<Scalar> orthonormalize(const Mat<Scalar>& spanning, const Tolerances& tol = {});
template <class Scalar>
Subspace<Scalar> kernel(const Mat<Scalar>& a, const Tolerances& tol = {});
template <class Scalar>
Subspace<Scalar> range_of(const Mat<Scalar>& a, const Tolerances& tol = {});

/// Full SVD with an explicit rank decision: singular values below
/// rank_rtol * sigma_max are treated as zero.
template <class Scalar>
struct Svd {
  Mat<Scalar> u;   // full left factor
  Mat<Scalar> v;   // full right factor
  RealVec sigma;   // singular values, descending
  Index rank = 0;
};

template <class Scalar>
Svd<Scalar> svd(const Mat<Scalar>& a, const Tolerances& tol = {}) {
  static_assert(is_supported_scalar_v<Scalar>);
  tol.validate();
  require_finite(a, "svd");
  Svd<Scalar> out;
  if (a.rows() == 0 || a.cols() == 0) {
    out.u = Mat<Scalar>::Identity(a.rows(), a.rows());
    out.v = Mat<Scalar>::Identity(a.cols(), a.cols());
    out.sigma = RealVec(0);
    out.rank = 0;
    return out;
  }
  Eigen::JacobiSVD<Mat<Scalar>> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success) throw NumericalError("svd: decomposition failed");
  out.u = dec.matrixU();
  out.v = dec.matrixV();
  out.sigma = dec.singularValues();
  require_finite<Scalar>(out.u, "svd");
  // The cutoff is floored at rank_rtol itself so that a matrix at noise
  // level has rank zero; a pure relative cutoff would keep all of it.
  const double sigma_max = out.sigma.size() ? out.sigma(0) : 0.0;
  const double cutoff = tol.rank_rtol * std::max(sigma_max, 1.0);
  out.rank = 0;
  for (Index i = 0; i < out.sigma.size(); ++i)
    if (out.sigma(i) > cutoff) ++out.rank;
  return out;
}

/// Moore-Penrose pseudoinverse via SVD truncation.
template <class Scalar>
Mat<Scalar> pinv(const Mat<Scalar>& a, const Tolerances& tol = {}) {
  const auto dec = svd(a, tol);
  Mat<Scalar> out = Mat<Scalar>::Zero(a.cols(), a.rows());
  for (Index i = 0; i < dec.rank; ++i)
    out.noalias() += (Scalar(1.0 / dec.sigma(i)) * dec.v.col(i)) * dec.u.col(i).adjoint();
  require_finite(out, "pinv");
  return out;
}

template <class Scalar>
Index rank_of(const Mat<Scalar>& a, const Tolerances& tol = {}) {
  return svd(a, tol).rank;
}

/// A subspace of K^n stored as an orthonormal column basis (possibly with
/// zero columns for the trivial subspace).
template <class Scalar>
class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(Index ambient_dim) {
    return Subspace(ambient_dim, Mat<Scalar>::Zero(ambient_dim, 0));
  }

  static Subspace full(Index ambient_dim) {
    return Subspace(ambient_dim, Mat<Scalar>::Identity(ambient_dim, ambient_dim));
  }

  /// Wraps an already-orthonormal basis; orthonormality is verified.
  static Subspace from_orthonormal(Mat<Scalar> basis, double atol = 1e-9) {
    const Index rows = basis.rows();
    Subspace s(rows, std::move(basis));
    const Mat<Scalar> gram = s.basis_.adjoint() * s.basis_;
    if (!approx_equal<Scalar>(gram, Mat<Scalar>::Identity(s.dim(), s.dim()), atol))
      throw NumericalError("Subspace: basis columns are not orthonormal");
    return s;
  }

  Index ambient_dim() const { return ambient_dim_; }
  Index dim() const { return basis_.cols(); }
  const Mat<Scalar>& basis() const { return basis_; }

  Mat<Scalar> projection() const { return basis_ * basis_.adjoint(); }

  /// Coordinates of an ambient vector in this basis.
  Vec<Scalar> coords(const Vec<Scalar>& ambient) const {
    if (ambient.size() != ambient_dim_) throw DimensionError("Subspace::coords: size mismatch");
    return basis_.adjoint() * ambient;
  }

  Vec<Scalar> embed(const Vec<Scalar>& coords) const {
    if (coords.size() != dim()) throw DimensionError("Subspace::embed: size mismatch");
    return basis_ * coords;
  }

  bool contains(const Vec<Scalar>& x, double atol = 1e-9) const {
    if (x.size() != ambient_dim_) throw DimensionError("Subspace::contains: size mismatch");
    return (x - basis_ * (basis_.adjoint() * x)).norm() <= atol * std::max(1.0, x.norm());
  }

  bool contains(const Subspace& other, double atol = 1e-9) const {
    if (other.ambient_dim_ != ambient_dim_)
      throw DimensionError("Subspace::contains: ambient mismatch");
    if (other.dim() == 0) return true;
    const Mat<Scalar> residual = other.basis_ - basis_ * (basis_.adjoint() * other.basis_);
    return residual.norm() <= atol * std::sqrt(double(other.dim()));
  }

  friend Subspace complement(const Subspace& s, const Tolerances& tol = {}) {
    // Orthogonal complement = kernel of basis^*.
    const auto dec = svd<Scalar>(Mat<Scalar>(s.basis_.adjoint()), tol);
    return Subspace(s.ambient_dim_, dec.v.rightCols(s.ambient_dim_ - dec.rank));
  }

 private:
  Subspace(Index ambient_dim, Mat<Scalar> basis)
      : ambient_dim_(ambient_dim), basis_(std::move(basis)) {}

  friend Subspace<Scalar> orthonormalize<Scalar>(const Mat<Scalar>&, const Tolerances&);
  friend Subspace<Scalar> kernel<Scalar>(const Mat<Scalar>&, const Tolerances&);
  friend Subspace<Scalar> range_of<Scalar>(const Mat<Scalar>&, const Tolerances&);

  Index ambient_dim_ = 0;
  Mat<Scalar> basis_;
};

/// Orthonormal basis for the column span, via column-pivoted QR.
template <class Scalar>
Subspace<Scalar> orthonormalize(const Mat<Scalar>& spanning, const Tolerances& tol) {
  tol.validate();
  require_finite(spanning, "orthonormalize");
  const Index n = spanning.rows();
  if (spanning.cols() == 0 || spanning.norm() == 0.0) return Subspace<Scalar>::zero(n);
  Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(spanning);
  const Mat<Scalar> r = qr.matrixR();
  const double cutoff = tol.rank_rtol * std::max(std::abs(r(0, 0)), 1.0);
  Index rank = 0;
  const Index diag = std::min(r.rows(), r.cols());
  for (Index i = 0; i < diag; ++i)
    if (std::abs(r(i, i)) > cutoff) ++rank;
  Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(n, rank);
  return Subspace<Scalar>(n, std::move(q));
}

template <class Scalar>
Subspace<Scalar> kernel(const Mat<Scalar>& a, const Tolerances& tol) {
  const auto dec = svd(a, tol);
  return Subspace<Scalar>(a.cols(), dec.v.rightCols(a.cols() - dec.rank));
}

template <class Scalar>
Subspace<Scalar> range_of(const Mat<Scalar>& a, const Tolerances& tol) {
  const auto dec = svd(a, tol);
  return Subspace<Scalar>(a.rows(), dec.u.leftCols(dec.rank));
}

/// Span of the union of two subspaces.
template <class Scalar>
Subspace<Scalar> span_union(const Subspace<Scalar>& a, const Subspace<Scalar>& b,
                            const Tolerances& tol = {}) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("span_union: ambient mismatch");
  Mat<Scalar> cols(a.ambient_dim(), a.dim() + b.dim());
  cols << a.basis(), b.basis();
  return orthonormalize(cols, tol);
}

/// Intersection of two subspaces, via the nullspace of [A, -B].
template <class Scalar>
Subspace<Scalar> intersection(const Subspace<Scalar>& a, const Subspace<Scalar>& b,
                              const Tolerances& tol = {}) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("intersection: ambient mismatch");
  if (a.dim() == 0 || b.dim() == 0) return Subspace<Scalar>::zero(a.ambient_dim());
  Mat<Scalar> stacked(a.ambient_dim(), a.dim() + b.dim());
  stacked << a.basis(), -b.basis();
  const auto null = kernel(stacked, tol);
  if (null.dim() == 0) return Subspace<Scalar>::zero(a.ambient_dim());
  const Mat<Scalar> in_a = a.basis() * null.basis().topRows(a.dim());
  return orthonormalize(in_a, tol);
}

/// Orthogonal complement of b inside a (expects b to lie in a).
template <class Scalar>
Subspace<Scalar> subtract(const Subspace<Scalar>& a, const Subspace<Scalar>& b,
                          const Tolerances& tol = {}) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("subtract: ambient mismatch");
  const Mat<Scalar> reduced = a.basis() - b.basis() * (b.basis().adjoint() * a.basis());
  return orthonormalize(reduced, tol);
}

/// ker A subseteq ker B, decided as ||B N|| <= eq_atol * max(1, ||B||) for an
/// orthonormal kernel basis N of A.
template <class Scalar>
bool kernel_included(const Mat<Scalar>& a, const Mat<Scalar>& b, const Tolerances& tol = {}) {
  if (a.cols() != b.cols()) throw DimensionError("kernel_included: column count mismatch");
  const auto n = kernel(a, tol);
  if (n.dim() == 0) return true;
  return (b * n.basis()).norm() <= tol.eq_atol * std::max(1.0, b.norm());
}

template <class Scalar>
bool is_selfadjoint(const Mat<Scalar>& a, const Tolerances& tol = {}) {
  if (a.rows() != a.cols()) throw DimensionError("is_selfadjoint: matrix not square");
  return approx_equal<Scalar>(a, a.adjoint(), tol.eq_atol);
}

template <class Scalar>
double min_eigenvalue(const Mat<Scalar>& a) {
  if (a.rows() != a.cols()) throw DimensionError("min_eigenvalue: matrix not square");
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("min_eigenvalue: solver failed");
  return es.eigenvalues().minCoeff();
}

template <class Scalar>
bool is_psd(const Mat<Scalar>& a, const Tolerances& tol = {}) {
  if (a.rows() != a.cols()) throw DimensionError("is_psd: matrix not square");
  if (!is_selfadjoint(a, tol)) return false;
  if (a.rows() == 0) return true;
  const Mat<Scalar> sym = ((a + Mat<Scalar>(a.adjoint())) / Scalar(2));
  return min_eigenvalue(sym) >= -tol.psd_atol;
}

/// A <= B in the positive-semidefinite order.
template <class Scalar>
bool psd_leq(const Mat<Scalar>& a, const Mat<Scalar>& b, const Tolerances& tol = {}) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) throw DimensionError("psd_leq: not square");
  if (a.rows() != b.rows()) throw DimensionError("psd_leq: size mismatch");
  return is_psd<Scalar>(b - a, tol);
}

/// Residuals of the four Penrose equations for a candidate pseudoinverse.
template <class Scalar>
std::vector<double> penrose_residuals(const Mat<Scalar>& a, const Mat<Scalar>& aplus) {
  const Mat<Scalar> ap = a * aplus;
  const Mat<Scalar> pa = aplus * a;
  return {
      max_abs_diff<Scalar>(aplus * ap, aplus),
      max_abs_diff<Scalar>(ap * a, a),
      max_abs_diff<Scalar>(Mat<Scalar>(pa.adjoint()), pa),
      max_abs_diff<Scalar>(Mat<Scalar>(ap.adjoint()), ap),
  };
}

}  // namespace zeff
