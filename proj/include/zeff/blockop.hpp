#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zeff/numkit.hpp"
#include "zeff/random.hpp"
#include "zeff/types.hpp"

namespace zeff {

/// An ordered list of mutually orthogonal subspaces spanning the ambient
/// space. Parts may be trivial (rank zero).
template <class Scalar>
class OrthoDecomp {
 public:
  OrthoDecomp(Index ambient_dim, std::vector<Subspace<Scalar>> parts, const Tolerances& tol = {})
      : ambient_dim_(ambient_dim), parts_(std::move(parts)) {
    tol.validate();
    Index total = 0;
    for (const auto& p : parts_) {
      if (p.ambient_dim() != ambient_dim_)
        throw DimensionError("OrthoDecomp: part has wrong ambient dimension");
      total += p.dim();
    }
    if (total != ambient_dim_)
      throw DimensionError("OrthoDecomp: part ranks do not sum to the ambient dimension");
    for (std::size_t i = 0; i < parts_.size(); ++i)
      for (std::size_t j = i + 1; j < parts_.size(); ++j) {
        const Mat<Scalar> overlap = parts_[i].basis().adjoint() * parts_[j].basis();
        if (overlap.size() != 0 && overlap.norm() > tol.eq_atol)
          throw DimensionError("OrthoDecomp: parts are not pairwise orthogonal");
      }
  }

  Index ambient_dim() const { return ambient_dim_; }
  std::size_t part_count() const { return parts_.size(); }
  const Subspace<Scalar>& part(std::size_t i) const { return parts_.at(i); }
  Mat<Scalar> projection(std::size_t i) const { return parts_.at(i).projection(); }

  /// Same parts listed in a different order.
  OrthoDecomp reordered(const std::vector<std::size_t>& order) const {
    std::vector<Subspace<Scalar>> p;
    p.reserve(order.size());
    for (auto i : order) p.push_back(parts_.at(i));
    return OrthoDecomp(ambient_dim_, std::move(p));
  }

 private:
  Index ambient_dim_ = 0;
  std::vector<Subspace<Scalar>> parts_;
};

/// An operator expressed blockwise in subspace coordinates: block (i,j) is
/// the rank(row_i) x rank(col_j) matrix R_i^* A C_j.
template <class Scalar>
class BlockView {
 public:
  BlockView(OrthoDecomp<Scalar> rows, OrthoDecomp<Scalar> cols,
            std::vector<std::vector<Mat<Scalar>>> blocks)
      : rows_(std::move(rows)), cols_(std::move(cols)), blocks_(std::move(blocks)) {}

  const OrthoDecomp<Scalar>& rows() const { return rows_; }
  const OrthoDecomp<Scalar>& cols() const { return cols_; }
  const Mat<Scalar>& block(std::size_t i, std::size_t j) const { return blocks_.at(i).at(j); }

  /// Rebuilds the ambient operator from its blocks.
  Mat<Scalar> reassemble() const {
    Mat<Scalar> a = Mat<Scalar>::Zero(rows_.ambient_dim(), cols_.ambient_dim());
    for (std::size_t i = 0; i < rows_.part_count(); ++i)
      for (std::size_t j = 0; j < cols_.part_count(); ++j)
        a.noalias() += rows_.part(i).basis() * blocks_[i][j] * cols_.part(j).basis().adjoint();
    return a;
  }

  /// Concatenates the block grid into one coordinate matrix.
  Mat<Scalar> assembled() const {
    Index m = 0, n = 0;
    for (std::size_t i = 0; i < rows_.part_count(); ++i) m += rows_.part(i).dim();
    for (std::size_t j = 0; j < cols_.part_count(); ++j) n += cols_.part(j).dim();
    Mat<Scalar> out(m, n);
    Index r0 = 0;
    for (std::size_t i = 0; i < rows_.part_count(); ++i) {
      Index c0 = 0;
      for (std::size_t j = 0; j < cols_.part_count(); ++j) {
        out.block(r0, c0, rows_.part(i).dim(), cols_.part(j).dim()) = blocks_[i][j];
        c0 += cols_.part(j).dim();
      }
      r0 += rows_.part(i).dim();
    }
    return out;
  }

 private:
  OrthoDecomp<Scalar> rows_;
  OrthoDecomp<Scalar> cols_;
  std::vector<std::vector<Mat<Scalar>>> blocks_;
};

template <class Scalar>
BlockView<Scalar> split(const Mat<Scalar>& a, const OrthoDecomp<Scalar>& rows,
                        const OrthoDecomp<Scalar>& cols) {
  if (a.rows() != rows.ambient_dim() || a.cols() != cols.ambient_dim())
    throw DimensionError("split: operator shape does not match the decompositions");
  std::vector<std::vector<Mat<Scalar>>> blocks(rows.part_count());
  for (std::size_t i = 0; i < rows.part_count(); ++i) {
    blocks[i].resize(cols.part_count());
    for (std::size_t j = 0; j < cols.part_count(); ++j)
      blocks[i][j] = rows.part(i).basis().adjoint() * a * cols.part(j).basis();
  }
  return BlockView<Scalar>(rows, cols, std::move(blocks));
}

namespace detail {

template <class Scalar>
void require_two_part_square(const BlockView<Scalar>& x, const char* who) {
  if (x.rows().part_count() != 2 || x.cols().part_count() != 2)
    throw DimensionError(std::string(who) + ": expected a 2x2 block view");
  if (x.block(0, 0).rows() != x.block(0, 0).cols() ||
      x.block(1, 1).rows() != x.block(1, 1).cols())
    throw DimensionError(std::string(who) + ": diagonal blocks must be square");
}

template <class Scalar>
bool two_part_selfadjoint(const BlockView<Scalar>& x, const Tolerances& tol) {
  return is_selfadjoint(x.block(0, 0), tol) && is_selfadjoint(x.block(1, 1), tol) &&
         approx_equal<Scalar>(x.block(0, 1), x.block(1, 0).adjoint(), tol.eq_atol);
}

}  // namespace detail

/// Generalized Schur complement X00 - X01 X11^+ X10 in H0 coordinates.
template <class Scalar>
Mat<Scalar> gsc(const BlockView<Scalar>& x, const Tolerances& tol = {}) {
  detail::require_two_part_square(x, "gsc");
  return x.block(0, 0) - x.block(0, 1) * pinv(x.block(1, 1), tol) * x.block(1, 0);
}

struct AitkenReport {
  bool valid = false;             // UDL reconstruction reproduces X
  bool kernel_inclusion = false;  // ker X11 subseteq ker X01
  double reconstruction_residual = 0.0;
  std::string note;
};

/// Tests whether the UDL factorization through the generalized Schur
/// complement reproduces a self-adjoint 2x2 block operator.
template <class Scalar>
AitkenReport aitken_valid(const BlockView<Scalar>& x, const Tolerances& tol = {}) {
  detail::require_two_part_square(x, "aitken_valid");
  if (!detail::two_part_selfadjoint(x, tol))
    throw HypothesisError("aitken_valid: block operator is not self-adjoint");

  const Mat<Scalar>& x00 = x.block(0, 0);
  const Mat<Scalar>& x01 = x.block(0, 1);
  const Mat<Scalar>& x10 = x.block(1, 0);
  const Mat<Scalar>& x11 = x.block(1, 1);
  const Mat<Scalar> x11p = pinv(x11, tol);
  const Mat<Scalar> s = x00 - x01 * x11p * x10;
  const Mat<Scalar> y = x11p * x10;  // lower factor coupling

  const Index d0 = x00.rows(), d1 = x11.rows();
  Mat<Scalar> rebuilt(d0 + d1, d0 + d1);
  rebuilt.topLeftCorner(d0, d0) = s + Mat<Scalar>(y.adjoint()) * x11 * y;
  rebuilt.topRightCorner(d0, d1) = Mat<Scalar>(y.adjoint()) * x11;
  rebuilt.bottomLeftCorner(d1, d0) = x11 * y;
  rebuilt.bottomRightCorner(d1, d1) = x11;

  Mat<Scalar> original(d0 + d1, d0 + d1);
  original.topLeftCorner(d0, d0) = x00;
  original.topRightCorner(d0, d1) = x01;
  original.bottomLeftCorner(d1, d0) = x10;
  original.bottomRightCorner(d1, d1) = x11;

  AitkenReport report;
  report.reconstruction_residual = max_abs_diff<Scalar>(rebuilt, original);
  const double scale = std::max(1.0, original.norm());
  report.valid = report.reconstruction_residual <= tol.eq_atol * scale;
  report.kernel_inclusion = kernel_included(x11, x01, tol);
  report.note = report.kernel_inclusion ? "ker X11 included in ker X01"
                                        : "ker X11 not included in ker X01";
  return report;
}

template <class Scalar>
struct BabachiewiczResult {
  Mat<Scalar> candidate;  // assembled 2x2 blockwise inverse formula
  bool valid = false;     // both kernel inclusions hold, so candidate = X^+
  bool ker11_in_ker01 = false;
  bool kergsc_in_ker10 = false;
  std::string note;
};

/// Blockwise pseudoinverse formula assembled from the generalized Schur
/// complement; valid exactly when both kernel inclusions hold.
template <class Scalar>
BabachiewiczResult<Scalar> gen_babachiewicz(const BlockView<Scalar>& x,
                                            const Tolerances& tol = {}) {
  detail::require_two_part_square(x, "gen_babachiewicz");
  if (!detail::two_part_selfadjoint(x, tol))
    throw HypothesisError("gen_babachiewicz: block operator is not self-adjoint");

  const Mat<Scalar>& x01 = x.block(0, 1);
  const Mat<Scalar>& x10 = x.block(1, 0);
  const Mat<Scalar>& x11 = x.block(1, 1);
  const Mat<Scalar> x11p = pinv(x11, tol);
  const Mat<Scalar> s = x.block(0, 0) - x01 * x11p * x10;
  const Mat<Scalar> sp = pinv(s, tol);

  const Index d0 = s.rows(), d1 = x11.rows();
  BabachiewiczResult<Scalar> out;
  out.candidate.resize(d0 + d1, d0 + d1);
  out.candidate.topLeftCorner(d0, d0) = sp;
  out.candidate.topRightCorner(d0, d1) = -sp * x01 * x11p;
  out.candidate.bottomLeftCorner(d1, d0) = -x11p * x10 * sp;
  out.candidate.bottomRightCorner(d1, d1) = x11p + x11p * x10 * sp * x01 * x11p;

  out.ker11_in_ker01 = kernel_included(x11, x01, tol);
  out.kergsc_in_ker10 = kernel_included(s, x10, tol);
  out.valid = out.ker11_in_ker01 && out.kergsc_in_ker10;
  if (!out.ker11_in_ker01)
    out.note = "ker X11 not included in ker X01";
  else if (!out.kergsc_in_ker10)
    out.note = "ker X/X11 not included in ker X10";
  else
    out.note = "both kernel inclusions hold";
  return out;
}

template <class Scalar>
struct SchurMinReport {
  Vec<Scalar> minimizer;        // H1 coordinates of the analytic minimizer
  double analytic_value = 0.0;  // objective at the analytic minimizer
  double gsc_value = 0.0;       // (u, (X/X11) u)
  double best_sampled = 0.0;    // minimum over the sampled perturbations
  Index samples = 0;
  std::uint64_t seed = 0;
  bool minimal = false;  // analytic value beaten by no sample
};

/// Falsification probe for the Schur-complement minimization identity:
/// the quadratic objective at v* = -X11^+ X10 u is compared against random
/// perturbations at three magnitudes.
template <class Scalar>
SchurMinReport<Scalar> schur_min_oracle(const BlockView<Scalar>& x, const Vec<Scalar>& u,
                                        Index samples = 1000, std::uint64_t seed = 0,
                                        const Tolerances& tol = {}) {
  detail::require_two_part_square(x, "schur_min_oracle");
  if (!detail::two_part_selfadjoint(x, tol))
    throw HypothesisError("schur_min_oracle: X is not self-adjoint");
  if (!is_psd(x.block(1, 1), tol))
    throw HypothesisError("schur_min_oracle: X11 is not positive semidefinite");
  if (!kernel_included(x.block(1, 1), x.block(0, 1), tol))
    throw HypothesisError("schur_min_oracle: ker X11 is not included in ker X01");
  if (u.size() != x.block(0, 0).cols())
    throw DimensionError("schur_min_oracle: u has wrong dimension");

  const Mat<Scalar> assembled = x.assembled();
  const Index d0 = x.block(0, 0).rows(), d1 = x.block(1, 1).rows();
  const auto objective = [&](const Vec<Scalar>& v) {
    Vec<Scalar> w(d0 + d1);
    w << u, v;
    return std::real(Scalar(w.dot(assembled * w)));
  };

  SchurMinReport<Scalar> report;
  report.samples = samples;
  report.seed = seed;
  report.minimizer = -(pinv(x.block(1, 1), tol) * x.block(1, 0) * u);
  report.analytic_value = objective(report.minimizer);
  const Mat<Scalar> s = gsc(x, tol);
  report.gsc_value = std::real(Scalar(u.dot(s * u)));

  Rng rng(seed);
  report.best_sampled = report.analytic_value;
  const double scales[] = {0.1, 1.0, 10.0};
  for (Index k = 0; k < samples; ++k) {
    const Vec<Scalar> dir = random_uniform_vec<Scalar>(rng, d1);
    for (double scale : scales) {
      const double val = objective(report.minimizer + Scalar(scale) * dir);
      report.best_sampled = std::min(report.best_sampled, val);
    }
  }
  const double slack = tol.eq_atol * std::max(1.0, std::abs(report.analytic_value));
  report.minimal = report.analytic_value <= report.best_sampled + slack &&
                   std::abs(report.analytic_value - report.gsc_value) <= slack;
  return report;
}

}  // namespace zeff
