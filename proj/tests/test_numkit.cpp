#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "zeff/numkit.hpp"
#include "zeff/random.hpp"

using namespace zeff;
using test_support::check_matrix_near;
using test_support::mat2;

TEST_CASE("pseudoinverse of the worked 2x2 matrices") {
  check_matrix_near<double>(pinv(mat2(1, 1, 1, 0)), mat2(0, 1, 1, -1), 1e-12);
  check_matrix_near<double>(pinv(mat2(1, 1, 1, 1)), mat2(0.25, 0.25, 0.25, 0.25), 1e-12);
}

TEST_CASE("pseudoinverse of identity and zero") {
  for (Index n : {1, 3, 6}) {
    check_matrix_near<double>(pinv(RealMat(RealMat::Identity(n, n))),
                              RealMat::Identity(n, n), 1e-14);
  }
  const RealMat z = RealMat::Zero(3, 5);
  const RealMat zp = pinv(z);
  CHECK(zp.rows() == 5);
  CHECK(zp.cols() == 3);
  CHECK(zp.norm() == 0.0);
}

TEST_CASE("penrose equations on random matrices, both fields") {
  Rng rng(11);
  Tolerances tol;
  for (int i = 0; i < 50; ++i) {
    const Index m = 1 + static_cast<Index>(rng() % 10);
    const Index n = 1 + static_cast<Index>(rng() % 10);
    const Index r = static_cast<Index>(rng() % (std::min(m, n) + 1));
    {
      const RealMat a = random_rank<double>(rng, m, n, r);
      for (double res : penrose_residuals(a, pinv(a, tol))) CHECK(res <= 1e-9);
    }
    {
      const ComplexMat a = random_rank<std::complex<double>>(rng, m, n, r);
      for (double res : penrose_residuals(a, pinv(a, tol))) CHECK(res <= 1e-9);
    }
  }
}

TEST_CASE("pseudoinverse involution and adjoint identities") {
  Rng rng(12);
  for (int i = 0; i < 25; ++i) {
    const Index n = 2 + static_cast<Index>(rng() % 6);
    const RealMat a = random_rank<double>(rng, n, n, 1 + static_cast<Index>(rng() % n));
    check_matrix_near<double>(pinv(pinv(a)), a, 1e-9);
    check_matrix_near<double>(pinv(RealMat(a.adjoint())), RealMat(pinv(a).adjoint()), 1e-9);
    const RealMat s = random_psd<double>(rng, n, 1 + static_cast<Index>(rng() % n));
    check_matrix_near<double>(RealMat(pinv(s) * s), RealMat(s * pinv(s)), 1e-9);
  }
}

TEST_CASE("kernel and range") {
  const auto k = kernel(mat2(1, 1, 1, 1));
  REQUIRE(k.dim() == 1);
  RealVec dir(2);
  dir << 1, -1;
  CHECK(k.contains(Vec<double>(dir / std::sqrt(2.0)), 1e-12));

  CHECK(kernel(RealMat(RealMat::Identity(4, 4))).dim() == 0);

  RealMat col(2, 1);
  col << 1, 0;
  const auto r = range_of(col);
  REQUIRE(r.dim() == 1);
  RealVec e1(2);
  e1 << 1, 0;
  CHECK(r.contains(e1, 1e-12));
}

TEST_CASE("kernel-range projections resolve the identity") {
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const Index m = 2 + static_cast<Index>(rng() % 5);
    const Index n = 2 + static_cast<Index>(rng() % 5);
    const RealMat a = random_rank<double>(rng, m, n, static_cast<Index>(rng() % std::min(m, n)));
    const RealMat sum =
        kernel(a).projection() + range_of(RealMat(a.adjoint())).projection();
    check_matrix_near<double>(sum, RealMat::Identity(n, n), 1e-9);
    // projections match the pseudoinverse formulas
    check_matrix_near<double>(RealMat(pinv(a) * a),
                              range_of(RealMat(a.adjoint())).projection(), 1e-9);
    check_matrix_near<double>(RealMat(RealMat::Identity(n, n) - pinv(a) * a),
                              kernel(a).projection(), 1e-9);
  }
}

TEST_CASE("kernel inclusion") {
  RealMat one(1, 1), zero(1, 1);
  one << 1;
  zero << 0;
  CHECK(kernel_included(one, one));           // trivial kernel
  CHECK_FALSE(kernel_included(zero, one));    // full kernel vs trivial
  CHECK(kernel_included(mat2(1, 1, 1, 1), mat2(1, 1, 1, 1)));
  CHECK_THROWS_AS(kernel_included(RealMat(RealMat::Zero(1, 2)), RealMat(RealMat::Zero(1, 3))),
                  DimensionError);
}

TEST_CASE("psd block kernels always included") {
  Rng rng(14);
  for (int i = 0; i < 30; ++i) {
    const Index d0 = 1 + static_cast<Index>(rng() % 4);
    const Index d1 = 1 + static_cast<Index>(rng() % 4);
    const RealMat a = random_psd<double>(rng, d0 + d1, static_cast<Index>(rng() % (d0 + d1 + 1)));
    CHECK(kernel_included(RealMat(a.bottomRightCorner(d1, d1)),
                          RealMat(a.topRightCorner(d0, d1))));
  }
}

TEST_CASE("definiteness predicates") {
  CHECK(is_psd(mat2(1, 1, 1, 1)));
  CHECK_FALSE(is_psd(mat2(1, 1, 1, 0)));
  CHECK(min_eigenvalue(mat2(1, 1, 1, 0)) ==
        doctest::Approx((1.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(psd_leq(RealMat(RealMat::Zero(3, 3)), RealMat(RealMat::Identity(3, 3))));
  CHECK_FALSE(psd_leq(RealMat(RealMat::Identity(2, 2)), mat2(1, 1, 1, 0)));
  CHECK_THROWS_AS(is_psd(RealMat(RealMat::Zero(2, 3))), DimensionError);
}

TEST_CASE("tolerances must be positive") {
  Tolerances bad;
  bad.eq_atol = 0.0;
  CHECK_THROWS(svd(RealMat(RealMat::Identity(2, 2)), bad));
}

TEST_CASE("subspace algebra") {
  Rng rng(15);
  const Index n = 6;
  const RealMat q = random_orthonormal<double>(rng, n, n);
  const auto a = Subspace<double>::from_orthonormal(q.leftCols(3));
  const auto b = Subspace<double>::from_orthonormal(q.middleCols(2, 3));  // overlaps a in 1 dim

  const auto meet = intersection(a, b);
  CHECK(meet.dim() == 1);
  CHECK(a.contains(meet, 1e-9));
  CHECK(b.contains(meet, 1e-9));

  const auto join = span_union(a, b);
  CHECK(join.dim() == 5);
  const auto rest = subtract(join, a);
  CHECK(rest.dim() == 2);
  const auto comp = complement(a);
  CHECK(comp.dim() == 3);
  check_matrix_near<double>(a.projection() + comp.projection(), RealMat::Identity(n, n), 1e-9);
}

TEST_CASE("orthonormalize keeps subspaces exact under rank deficiency") {
  Rng rng(16);
  const RealMat base = random_gaussian_mat<double>(rng, 5, 2);
  RealMat padded(5, 4);
  padded << base, base * mat2(1, 2, 3, 4).topRows(2);
  const auto s = orthonormalize(padded);
  CHECK(s.dim() == 2);
  check_matrix_near<double>(s.projection(), orthonormalize(base).projection(), 1e-9);
}

TEST_CASE("complex hermitian definiteness") {
  ComplexMat h(2, 2);
  h << std::complex<double>(2, 0), std::complex<double>(0, 1), std::complex<double>(0, -1),
      std::complex<double>(2, 0);
  CHECK(is_selfadjoint(h));
  CHECK(is_psd(h));
}
