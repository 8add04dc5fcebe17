#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "zeff/blockop.hpp"
#include "zeff/numkit.hpp"
#include "zeff/types.hpp"

namespace zeff {

/// Facts about a Z-problem instance, computed once at construction.
/// h1..h3 are the graded solvability hypotheses; dual_a..dual_e are the
/// kernel inclusions controlling when the dual effective operator is the
/// pseudoinverse of the direct one.
struct HypothesisReport {
  bool sigma_selfadjoint = false;
  bool sigma_psd = false;
  bool sigma_invertible = false;
  bool compression_selfadjoint = false;  // compression of sigma to U + E
  bool sigma11_psd = false;
  bool sigma11_invertible = false;
  bool ker11_in_ker01 = false;

  bool h1 = false;  // sigma self-adjoint, PSD, invertible
  bool h2 = false;  // sigma self-adjoint, sigma11 PSD and invertible
  bool h3 = false;  // compression self-adjoint, sigma11 PSD, kernel inclusion
  bool h4 = true;   // finite dimension (always, here)

  bool dual_a = false;
  bool dual_b = false;
  bool dual_c = false;
  bool dual_d = false;
  bool dual_e = false;
  bool duality_all = false;
};

/// A Hilbert space with an orthogonal triple splitting (U, E, J) and an
/// operator sigma on it. Immutable; all block data, pseudoinverses and the
/// hypothesis report are computed at construction.
template <class Scalar>
class ZProblem {
 public:
  ZProblem(OrthoDecomp<Scalar> decomp, Mat<Scalar> sigma, Tolerances tol = {})
      : decomp_(std::move(decomp)), sigma_(std::move(sigma)), tol_(tol) {
    tol_.validate();
    if (decomp_.part_count() != 3)
      throw DimensionError("ZProblem: decomposition must have exactly three parts (U, E, J)");
    if (sigma_.rows() != sigma_.cols() || sigma_.rows() != decomp_.ambient_dim())
      throw DimensionError("ZProblem: sigma must be square of the ambient dimension");
    require_finite(sigma_, "ZProblem");

    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        s_[i][j] = decomp_.part(i).basis().adjoint() * sigma_ * decomp_.part(j).basis();
    pinv11_ = pinv(s_[1][1], tol_);
    gsc_ = s_[0][0] - s_[0][1] * pinv11_ * s_[1][0];

    sigma_pinv_ = pinv(sigma_, tol_);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t_[i][j] = decomp_.part(i).basis().adjoint() * sigma_pinv_ * decomp_.part(j).basis();
    dual_gsc_ = t_[0][0] - t_[0][2] * pinv(t_[2][2], tol_) * t_[2][0];

    compute_report();
  }

  const OrthoDecomp<Scalar>& decomp() const { return decomp_; }
  const Subspace<Scalar>& u_space() const { return decomp_.part(0); }
  const Subspace<Scalar>& e_space() const { return decomp_.part(1); }
  const Subspace<Scalar>& j_space() const { return decomp_.part(2); }
  const Mat<Scalar>& sigma() const { return sigma_; }
  const Mat<Scalar>& sigma_pinv() const { return sigma_pinv_; }
  const Tolerances& tol() const { return tol_; }
  const HypothesisReport& report() const { return report_; }

  /// Coordinate block of sigma between parts j -> i.
  const Mat<Scalar>& block(int i, int j) const { return s_[i][j]; }
  /// Coordinate block of pinv(sigma) between parts j -> i.
  const Mat<Scalar>& dual_block(int i, int j) const { return t_[i][j]; }
  const Mat<Scalar>& pinv11() const { return pinv11_; }
  /// Generalized Schur complement of the U+E compression, in U coordinates.
  const Mat<Scalar>& schur() const { return gsc_; }
  /// Dual Schur complement (sigma^+ over U+J), in U coordinates.
  const Mat<Scalar>& dual_schur() const { return dual_gsc_; }

 private:
  void compute_report() {
    const Index n = decomp_.ambient_dim();
    const Index d1 = e_space().dim();
    report_.sigma_selfadjoint = is_selfadjoint(sigma_, tol_);
    report_.sigma_psd = is_psd(sigma_, tol_);
    report_.sigma_invertible = rank_of(sigma_, tol_) == n;
    report_.compression_selfadjoint =
        is_selfadjoint(s_[0][0], tol_) && is_selfadjoint(s_[1][1], tol_) &&
        approx_equal<Scalar>(s_[0][1], s_[1][0].adjoint(), tol_.eq_atol);
    report_.sigma11_psd = is_psd(s_[1][1], tol_);
    report_.sigma11_invertible = rank_of(s_[1][1], tol_) == d1;
    report_.ker11_in_ker01 = kernel_included(s_[1][1], s_[0][1], tol_);

    report_.h1 = report_.sigma_selfadjoint && report_.sigma_psd && report_.sigma_invertible;
    report_.h2 =
        report_.sigma_selfadjoint && report_.sigma11_psd && report_.sigma11_invertible;
    report_.h3 =
        report_.compression_selfadjoint && report_.sigma11_psd && report_.ker11_in_ker01;

    report_.dual_a = report_.sigma_selfadjoint;
    report_.dual_b = kernel_included(s_[1][1], vstack(s_[0][1], s_[2][1]), tol_);
    report_.dual_c = kernel_included(schur_over_uj(), hstack(s_[1][0], s_[1][2]), tol_);
    report_.dual_d = kernel_included(t_[2][2], t_[0][2], tol_);
    report_.dual_e = kernel_included(dual_gsc_, t_[2][0], tol_);
    report_.duality_all = report_.dual_a && report_.dual_b && report_.dual_c &&
                          report_.dual_d && report_.dual_e;
  }

  /// Schur complement of sigma w.r.t. sigma11 over the split (U + J) + E,
  /// as one matrix in stacked (U, J) coordinates.
  Mat<Scalar> schur_over_uj() const {
    const Index d0 = u_space().dim(), d2 = j_space().dim();
    Mat<Scalar> head(d0 + d2, d0 + d2);
    head.topLeftCorner(d0, d0) = s_[0][0];
    head.topRightCorner(d0, d2) = s_[0][2];
    head.bottomLeftCorner(d2, d0) = s_[2][0];
    head.bottomRightCorner(d2, d2) = s_[2][2];
    const Mat<Scalar> left = vstack(s_[0][1], s_[2][1]);
    const Mat<Scalar> right = hstack(s_[1][0], s_[1][2]);
    return head - left * pinv11_ * right;
  }

  static Mat<Scalar> vstack(const Mat<Scalar>& a, const Mat<Scalar>& b) {
    Mat<Scalar> out(a.rows() + b.rows(), a.cols());
    out.topRows(a.rows()) = a;
    out.bottomRows(b.rows()) = b;
    return out;
  }
  static Mat<Scalar> hstack(const Mat<Scalar>& a, const Mat<Scalar>& b) {
    Mat<Scalar> out(a.rows(), a.cols() + b.cols());
    out.leftCols(a.cols()) = a;
    out.rightCols(b.cols()) = b;
    return out;
  }

  OrthoDecomp<Scalar> decomp_;
  Mat<Scalar> sigma_;
  Tolerances tol_;
  Mat<Scalar> s_[3][3];
  Mat<Scalar> t_[3][3];
  Mat<Scalar> pinv11_;
  Mat<Scalar> gsc_;
  Mat<Scalar> dual_gsc_;
  Mat<Scalar> sigma_pinv_;
  HypothesisReport report_;
};

template <class Scalar>
HypothesisReport check_hypotheses(const ZProblem<Scalar>& zp) {
  return zp.report();
}

/// One solution of the constrained equation sigma(e0 + e) = j0 + j, stored
/// as ambient vectors, with the kernel of sigma11 (embedded in E) spanning
/// the solution family.
template <class Scalar>
struct ZSolution {
  Vec<Scalar> e0;
  Vec<Scalar> j0;
  Vec<Scalar> e_particular;
  Subspace<Scalar> e_kernel;  // ambient-embedded subspace of E
  Vec<Scalar> j;

  double residual(const Mat<Scalar>& sigma) const {
    return (sigma * (e0 + e_particular) - (j0 + j)).norm();
  }
};

namespace detail {

template <class Scalar>
Vec<Scalar> project_onto(const Subspace<Scalar>& s, const Vec<Scalar>& x) {
  return s.basis() * (s.basis().adjoint() * x);
}

template <class Scalar>
void require_in_part(const ZProblem<Scalar>& zp, const Vec<Scalar>& x,
                     const Subspace<Scalar>& part, const char* who) {
  if (x.size() != zp.decomp().ambient_dim())
    throw DimensionError(std::string(who) + ": vector has wrong ambient dimension");
  if ((x - project_onto(part, x)).norm() > zp.tol().eq_atol * std::max(1.0, x.norm()))
    throw DimensionError(std::string(who) + ": vector does not lie in the stated part");
}

/// Solvability map whose kernel is the set of admissible e0, in U coords.
template <class Scalar>
Mat<Scalar> solvability_map(const ZProblem<Scalar>& zp) {
  const Mat<Scalar> gamma_ran11 = zp.block(1, 1) * zp.pinv11();
  const Index d1 = zp.e_space().dim();
  return (Mat<Scalar>::Identity(d1, d1) - gamma_ran11) * zp.block(1, 0);
}

}  // namespace detail

/// Subspace of U on which the Z-problem is solvable (preimage of
/// ran sigma11 under sigma10), embedded in the ambient space.
template <class Scalar>
Subspace<Scalar> solvable_domain(const ZProblem<Scalar>& zp) {
  const auto dom_coords = kernel(detail::solvability_map(zp), zp.tol());
  return orthonormalize(Mat<Scalar>(zp.u_space().basis() * dom_coords.basis()), zp.tol());
}

template <class Scalar>
ZSolution<Scalar> solve(const ZProblem<Scalar>& zp, const Vec<Scalar>& e0) {
  detail::require_in_part(zp, e0, zp.u_space(), "solve");
  if (!zp.report().compression_selfadjoint)
    throw HypothesisError("solve: the compression of sigma to U + E is not self-adjoint");

  const Vec<Scalar> e0c = zp.u_space().coords(e0);
  const Vec<Scalar> rhs = zp.block(1, 0) * e0c;
  const Vec<Scalar> mismatch = rhs - zp.block(1, 1) * (zp.pinv11() * rhs);
  const double scale = std::max(1.0, zp.sigma().norm() * e0.norm());
  if (mismatch.norm() > zp.tol().eq_atol * scale) {
    const auto dom = solvable_domain(zp);
    const Vec<Scalar> nearest = detail::project_onto(dom, e0);
    std::ostringstream msg;
    msg << "solve: e0 is not in the solvable domain (constraint residual "
        << mismatch.norm() << "); nearest solvable projection has norm " << nearest.norm()
        << " at distance " << (e0 - nearest).norm();
    throw UnsolvableError(msg.str());
  }

  const Vec<Scalar> ec = -(zp.pinv11() * rhs);
  ZSolution<Scalar> sol;
  sol.e0 = e0;
  sol.e_particular = zp.e_space().embed(ec);
  sol.j0 = zp.u_space().embed(zp.block(0, 0) * e0c + zp.block(0, 1) * ec);
  sol.j = zp.j_space().embed(zp.block(2, 0) * e0c + zp.block(2, 1) * ec);
  const auto k = kernel(zp.block(1, 1), zp.tol());
  sol.e_kernel = orthonormalize(Mat<Scalar>(zp.e_space().basis() * k.basis()), zp.tol());
  return sol;
}

/// The solution shifted by a kernel element of sigma11 (coefficients in the
/// kernel basis of `base`), with j0 and j recomputed.
template <class Scalar>
ZSolution<Scalar> apply_kernel_offset(const ZProblem<Scalar>& zp, const ZSolution<Scalar>& base,
                                      const Vec<Scalar>& coeffs) {
  if (coeffs.size() != base.e_kernel.dim())
    throw DimensionError("apply_kernel_offset: coefficient count mismatch");
  ZSolution<Scalar> out = base;
  out.e_particular = base.e_particular + base.e_kernel.basis() * coeffs;
  const Vec<Scalar> e0c = zp.u_space().coords(base.e0);
  const Vec<Scalar> ec = zp.e_space().coords(out.e_particular);
  out.j0 = zp.u_space().embed(zp.block(0, 0) * e0c + zp.block(0, 1) * ec);
  out.j = zp.j_space().embed(zp.block(2, 0) * e0c + zp.block(2, 1) * ec);
  return out;
}

/// The U -> U response of the Z-problem. When the kernel inclusion
/// ker sigma11 <= ker sigma01 holds the operator exists on all of U and is
/// the generalized Schur complement; otherwise `domain` is the strictly
/// smaller solvable subspace and `matrix` is the particular-solution
/// response, meaningful only there.
template <class Scalar>
struct EffectiveOperator {
  Mat<Scalar> matrix;        // in U coordinates
  Subspace<Scalar> domain;   // ambient-embedded subspace of U
  bool exists_on_all_U = false;
  HypothesisReport report;
};

template <class Scalar>
EffectiveOperator<Scalar> effective_operator(const ZProblem<Scalar>& zp) {
  if (!zp.report().compression_selfadjoint)
    throw HypothesisError(
        "effective_operator: the compression of sigma to U + E is not self-adjoint");
  EffectiveOperator<Scalar> out;
  out.matrix = zp.schur();
  out.report = zp.report();
  out.exists_on_all_U = zp.report().ker11_in_ker01;
  if (out.exists_on_all_U) {
    out.domain = zp.u_space();
  } else {
    out.domain = solvable_domain(zp);
  }
  return out;
}

template <class Scalar>
struct DirichletResult {
  double value = 0.0;          // (e0, sigma_star e0)
  Vec<Scalar> minimizer;       // ambient vector in E
  Subspace<Scalar> kernel;     // minimizers form minimizer + kernel
};

/// Energy minimization over E at fixed mean field e0.
template <class Scalar>
DirichletResult<Scalar> dirichlet_min(const ZProblem<Scalar>& zp, const Vec<Scalar>& e0) {
  if (!zp.report().compression_selfadjoint)
    throw HypothesisError(
        "dirichlet_min: the compression of sigma to U + E is not self-adjoint");
  if (!zp.report().sigma11_psd)
    throw HypothesisError("dirichlet_min: sigma11 is not positive semidefinite");
  if (!zp.report().ker11_in_ker01)
    throw HypothesisError("dirichlet_min: ker sigma11 is not included in ker sigma01");
  const auto sol = solve(zp, e0);
  DirichletResult<Scalar> out;
  const Vec<Scalar> e0c = zp.u_space().coords(e0);
  out.value = std::real(Scalar(e0c.dot(zp.schur() * e0c)));
  out.minimizer = sol.e_particular;
  out.kernel = sol.e_kernel;
  return out;
}

/// The Z-problem (H, U, J, E, pinv(sigma)).
template <class Scalar>
ZProblem<Scalar> dual_problem(const ZProblem<Scalar>& zp) {
  return ZProblem<Scalar>(zp.decomp().reordered({0, 2, 1}), zp.sigma_pinv(), zp.tol());
}

struct DualityHypotheses {
  bool a = false, b = false, c = false, d = false, e = false;
  bool all() const { return a && b && c && d && e; }
};

template <class Scalar>
struct DualityReport {
  DualityHypotheses hypotheses;
  bool holds = false;           // all five hypotheses hold
  bool identity_holds = false;  // dual effective operator equals pinv(sigma_star)
  double identity_residual = 0.0;
  Mat<Scalar> dual_effective;   // (sigma^+)_*' in U coordinates
  Mat<Scalar> pinv_effective;   // pinv(sigma_star) in U coordinates
};

/// Evaluates the pseudoinverse-duality identity and the kernel hypotheses
/// gating it; both sides are returned regardless of the verdict.
template <class Scalar>
DualityReport<Scalar> duality_identity_check(const ZProblem<Scalar>& zp) {
  if (!zp.report().sigma_selfadjoint)
    throw HypothesisError("duality_identity_check: sigma is not self-adjoint");
  DualityReport<Scalar> out;
  out.hypotheses = {zp.report().dual_a, zp.report().dual_b, zp.report().dual_c,
                    zp.report().dual_d, zp.report().dual_e};
  out.holds = out.hypotheses.all();
  out.dual_effective = zp.dual_schur();
  out.pinv_effective = pinv(zp.schur(), zp.tol());
  out.identity_residual = max_abs_diff<Scalar>(out.dual_effective, out.pinv_effective);
  const double scale = std::max(1.0, out.pinv_effective.norm());
  out.identity_holds = out.identity_residual <= zp.tol().eq_atol * scale;
  return out;
}

template <class Scalar>
struct ThomsonResult {
  double value = 0.0;       // (j0, pinv(sigma_star) j0)
  Vec<Scalar> minimizer;    // ambient vector in J
  Subspace<Scalar> kernel;  // minimizers form minimizer + kernel
};

/// Complementary energy minimization over J at fixed mean current j0.
template <class Scalar>
ThomsonResult<Scalar> thomson_min(const ZProblem<Scalar>& zp, const Vec<Scalar>& j0) {
  detail::require_in_part(zp, j0, zp.u_space(), "thomson_min");
  const auto& r = zp.report();
  if (!is_psd(zp.dual_block(2, 2), zp.tol()))
    throw HypothesisError("thomson_min: (sigma^+)_22 is not positive semidefinite");
  if (!r.dual_a) throw HypothesisError("thomson_min: hypothesis (a) fails, sigma not self-adjoint");
  if (!r.dual_b)
    throw HypothesisError("thomson_min: hypothesis (b) fails, ker sigma11 not in ker [sigma01; sigma21]");
  if (!r.dual_c)
    throw HypothesisError("thomson_min: hypothesis (c) fails, ker sigma/sigma11 not in ker [sigma10 sigma12]");
  if (!r.dual_d)
    throw HypothesisError("thomson_min: hypothesis (d) fails, ker (sigma^+)_22 not in ker (sigma^+)_02");
  if (!r.dual_e)
    throw HypothesisError("thomson_min: hypothesis (e) fails, ker (sigma^+)_*' not in ker (sigma^+)_20");

  ThomsonResult<Scalar> out;
  const Vec<Scalar> j0c = zp.u_space().coords(j0);
  const Mat<Scalar> star_pinv = pinv(zp.schur(), zp.tol());
  out.value = std::real(Scalar(j0c.dot(star_pinv * j0c)));
  const Mat<Scalar> t22p = pinv(zp.dual_block(2, 2), zp.tol());
  out.minimizer = zp.j_space().embed(Vec<Scalar>(-(t22p * zp.dual_block(2, 0) * j0c)));
  const auto k = kernel(zp.dual_block(2, 2), zp.tol());
  out.kernel = orthonormalize(Mat<Scalar>(zp.j_space().basis() * k.basis()), zp.tol());
  return out;
}

template <class Scalar>
struct BoundsResult {
  Mat<Scalar> upper;         // sigma00 in U coordinates
  std::optional<Mat<Scalar>> lower;
  std::string notice;        // set when the lower bound is skipped
};

/// PSD-order bounds on the effective operator: sigma_star <= sigma00 always
/// (under the energy-minimization hypotheses); the dual route adds
/// [Gamma (sigma^+)_00 Gamma]^+ <= sigma_star when its hypotheses hold.
template <class Scalar>
BoundsResult<Scalar> bounds(const ZProblem<Scalar>& zp) {
  const auto& r = zp.report();
  if (!r.compression_selfadjoint)
    throw HypothesisError("bounds: the compression of sigma to U + E is not self-adjoint");
  if (!r.sigma11_psd) throw HypothesisError("bounds: sigma11 is not positive semidefinite");
  if (!r.ker11_in_ker01)
    throw HypothesisError("bounds: ker sigma11 is not included in ker sigma01");

  BoundsResult<Scalar> out;
  out.upper = zp.block(0, 0);
  if (r.sigma_psd && r.duality_all) {
    const Mat<Scalar> star_pinv = pinv(zp.schur(), zp.tol());
    const Mat<Scalar> gamma = zp.schur() * star_pinv;  // projection onto ran sigma_star
    out.lower = pinv(Mat<Scalar>(gamma * zp.dual_block(0, 0) * gamma), zp.tol());
  } else if (!r.sigma_psd) {
    out.notice = "lower bound skipped: sigma is not self-adjoint PSD";
  } else {
    out.notice = "lower bound skipped: duality hypotheses (a)-(e) do not all hold";
  }
  return out;
}

}  // namespace zeff
