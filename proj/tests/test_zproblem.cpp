#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "zeff/generators.hpp"
#include "zeff/network.hpp"
#include "zeff/zproblem.hpp"

using namespace zeff;
using test_support::check_matrix_near;
using test_support::mat2;

namespace {

/// 2x2 matrix as a Z-problem with U = e1, E = e2, J = {0}.
ZProblem<double> embed2(const RealMat& x) {
  const RealMat id = RealMat::Identity(2, 2);
  OrthoDecomp<double> decomp(2, {Subspace<double>::from_orthonormal(id.leftCols(1)),
                                 Subspace<double>::from_orthonormal(id.rightCols(1)),
                                 Subspace<double>::zero(2)});
  return ZProblem<double>(decomp, x);
}

/// The PSD 2x2 matrix of ones zero-padded to 3x3, with U = e1 and a
/// two-dimensional E carrying a kernel direction.
ZProblem<double> padded_ones() {
  RealMat sigma = RealMat::Zero(3, 3);
  sigma.topLeftCorner(2, 2) = mat2(1, 1, 1, 1);
  return ZProblem<double>(axis_three_part<double>(1, 2, 0), sigma);
}

}  // namespace

TEST_CASE("hypothesis report") {
  SUBCASE("identity satisfies everything") {
    const auto zp = ZProblem<double>(axis_three_part<double>(1, 1, 1),
                                     RealMat(RealMat::Identity(3, 3)));
    const auto r = check_hypotheses(zp);
    CHECK(r.h1);
    CHECK(r.h2);
    CHECK(r.h3);
    CHECK(r.h4);
    CHECK(r.duality_all);
  }

  SUBCASE("first worked matrix breaks the kernel inclusion") {
    const auto r = embed2(mat2(1, 1, 1, 0)).report();
    CHECK_FALSE(r.h3);
    CHECK_FALSE(r.ker11_in_ker01);
    CHECK(r.compression_selfadjoint);
  }

  SUBCASE("second worked matrix keeps h3 but loses invertibility") {
    const auto r = embed2(mat2(1, 1, 1, 1)).report();
    CHECK(r.h3);
    CHECK_FALSE(r.sigma_invertible);
    CHECK_FALSE(r.h1);
  }
}

TEST_CASE("solve") {
  SUBCASE("invertible diagonal gives the classical formulas") {
    RealMat sigma = RealMat::Zero(3, 3);
    sigma.diagonal() << 2.0, 5.0, 3.0;
    const auto zp = ZProblem<double>(axis_three_part<double>(1, 1, 1), sigma);
    RealVec e0 = RealVec::Zero(3);
    e0(0) = 2.0;
    const auto sol = solve(zp, e0);
    CHECK(sol.e_particular.norm() <= 1e-12);  // sigma10 = 0
    CHECK(sol.j0(0) == doctest::Approx(4.0));
    CHECK(sol.j.norm() <= 1e-12);
    CHECK(sol.e_kernel.dim() == 0);
    CHECK(sol.residual(sigma) <= 1e-12);
  }

  SUBCASE("padded ones matrix has a one-parameter solution family") {
    const auto zp = padded_ones();
    RealVec e0 = RealVec::Zero(3);
    e0(0) = 1.0;
    const auto sol = solve(zp, e0);
    CHECK(sol.j0.norm() <= 1e-9);                       // j0 = 0
    CHECK(sol.e_particular(1) == doctest::Approx(-1.0));  // e = -1 plus kernel
    CHECK(sol.e_kernel.dim() == 1);
    const auto shifted = apply_kernel_offset(zp, sol, RealVec(RealVec::Constant(1, 2.5)));
    CHECK(shifted.residual(zp.sigma()) <= 1e-9);
    CHECK((shifted.j0 - sol.j0).norm() <= 1e-9);  // kernel inclusion keeps j0
  }

  SUBCASE("random psd problems satisfy the residual bound") {
    Rng rng(41);
    for (int i = 0; i < 10; ++i) {
      const Index n = 3 + static_cast<Index>(rng() % 9);
      const auto decomp = random_triple_decomp<double>(rng, n);
      const RealMat sigma = random_psd<double>(rng, n, 1 + static_cast<Index>(rng() % n));
      const ZProblem<double> zp(decomp, sigma);
      for (int k = 0; k < 10; ++k) {
        const RealVec e0 =
            decomp.part(0).basis() * random_uniform_vec<double>(rng, decomp.part(0).dim());
        const auto sol = solve(zp, e0);
        CHECK(sol.residual(sigma) <= 1e-9 * std::max(1.0, sigma.norm() * e0.norm()));
      }
    }
  }

  SUBCASE("invertible sigma11 reproduces the explicit-inverse formulas") {
    Rng rng(52);
    for (int i = 0; i < 8; ++i) {
      const Index n = 3 + static_cast<Index>(rng() % 6);
      const auto decomp = random_triple_decomp<double>(rng, n);
      const RealMat sigma = random_psd_invertible<double>(rng, n);
      const ZProblem<double> zp(decomp, sigma);
      REQUIRE(zp.report().sigma11_invertible);
      const RealVec e0 =
          decomp.part(0).basis() * random_uniform_vec<double>(rng, decomp.part(0).dim());
      const auto sol = solve(zp, e0);
      const RealVec e0c = zp.u_space().coords(e0);
      const RealVec classical =
          zp.e_space().embed(Vec<double>(-(zp.block(1, 1).inverse() * zp.block(1, 0) * e0c)));
      CHECK((sol.e_particular - classical).norm() <= 1e-8 * std::max(1.0, classical.norm()));
      const RealMat star_classical =
          zp.block(0, 0) - zp.block(0, 1) * zp.block(1, 1).inverse() * zp.block(1, 0);
      check_matrix_near<double>(effective_operator(zp).matrix, star_classical, 1e-8);
    }
  }

  SUBCASE("e0 outside U is rejected") {
    const auto zp = padded_ones();
    RealVec not_in_u = RealVec::Zero(3);
    not_in_u(1) = 1.0;
    CHECK_THROWS_AS(solve(zp, not_in_u), DimensionError);
  }

  SUBCASE("unsolvable e0 raises with a diagnostic") {
    const auto zp = embed2(mat2(1, 1, 1, 0));
    RealVec e0 = RealVec::Zero(2);
    e0(0) = 1.0;
    CHECK_THROWS_WITH_AS(solve(zp, e0), doctest::Contains("nearest solvable"),
                         UnsolvableError);
  }

  SUBCASE("non-self-adjoint compression is refused") {
    RealMat skew(2, 2);
    skew << 1, 2, 3, 4;
    CHECK_THROWS_AS(solve(embed2(skew), RealVec(RealVec::Zero(2))), HypothesisError);
  }
}

TEST_CASE("effective operator") {
  SUBCASE("scalar multiple of the identity") {
    const auto zp = ZProblem<double>(axis_three_part<double>(2, 2, 1),
                                     RealMat(3.5 * RealMat::Identity(5, 5)));
    const auto eff = effective_operator(zp);
    CHECK(eff.exists_on_all_U);
    check_matrix_near<double>(eff.matrix, RealMat(3.5 * RealMat::Identity(2, 2)), 1e-12);
    CHECK(eff.domain.dim() == 2);
  }

  SUBCASE("first worked matrix: trivial solvable domain") {
    const auto eff = effective_operator(embed2(mat2(1, 1, 1, 0)));
    CHECK_FALSE(eff.exists_on_all_U);
    CHECK(eff.domain.dim() == 0);
  }

  SUBCASE("second worked matrix: zero operator on all of U") {
    const auto eff = effective_operator(embed2(mat2(1, 1, 1, 1)));
    CHECK(eff.exists_on_all_U);
    CHECK(std::abs(eff.matrix(0, 0)) <= 1e-12);
  }

  SUBCASE("self-adjoint whenever the compression is") {
    Rng rng(42);
    for (int i = 0; i < 10; ++i) {
      const Index n = 3 + static_cast<Index>(rng() % 6);
      const auto decomp = random_triple_decomp<double>(rng, n);
      const RealMat sigma = random_psd<double>(rng, n, 1 + static_cast<Index>(rng() % n));
      const ZProblem<double> zp(decomp, sigma);
      const auto eff = effective_operator(zp);
      CHECK(is_selfadjoint(eff.matrix));
      CHECK(is_psd(eff.matrix));
      CHECK(psd_leq(eff.matrix, zp.block(0, 0)));
    }
  }
}

TEST_CASE("solvable domain equals the least-squares-solvable set") {
  Rng rng(43);
  for (int i = 0; i < 8; ++i) {
    const Index d0 = 2;
    const Index d1 = 3;
    RealMat sigma(d0 + d1, d0 + d1);
    const RealMat coupling = random_gaussian_mat<double>(rng, d0, d1);
    sigma.topLeftCorner(d0, d0) = random_selfadjoint<double>(rng, d0);
    sigma.topRightCorner(d0, d1) = coupling;
    sigma.bottomLeftCorner(d1, d0) = coupling.adjoint();
    sigma.bottomRightCorner(d1, d1) = random_psd<double>(rng, d1, 1);
    const ZProblem<double> zp(axis_three_part<double>(d0, d1, 0), sigma);
    if (zp.report().ker11_in_ker01) continue;

    const auto dom = solvable_domain(zp);
    const RealMat s10 = zp.block(1, 0);
    const RealMat s11 = zp.block(1, 1);
    for (Index c = 0; c < dom.dim(); ++c) {
      const RealVec e0c = zp.u_space().coords(Vec<double>(dom.basis().col(c)));
      const RealVec rhs = -s10 * e0c;
      const RealVec best = pinv(s11) * rhs;
      CHECK((s11 * best - rhs).norm() <= 1e-9);
    }
    const auto outside = subtract(zp.u_space(), dom);
    for (Index c = 0; c < outside.dim(); ++c) {
      const RealVec e0c = zp.u_space().coords(Vec<double>(outside.basis().col(c)));
      const RealVec rhs = -s10 * e0c;
      const RealVec best = pinv(s11) * rhs;
      CHECK((s11 * best - rhs).norm() > 1e-6);
    }
  }
}

TEST_CASE("dirichlet minimization") {
  SUBCASE("psd diagonal sums over the mean part") {
    RealMat sigma = RealMat::Zero(4, 4);
    sigma.diagonal() << 2.0, 3.0, 1.0, 5.0;
    const auto zp = ZProblem<double>(axis_three_part<double>(2, 1, 1), sigma);
    RealVec e0 = RealVec::Zero(4);
    e0(0) = 1.0;
    e0(1) = 2.0;
    const auto res = dirichlet_min(zp, e0);
    CHECK(res.value == doctest::Approx(2.0 + 3.0 * 4.0));
  }

  SUBCASE("second worked matrix reaches zero at e = -e0") {
    const auto zp = embed2(mat2(1, 1, 1, 1));
    RealVec e0 = RealVec::Zero(2);
    e0(0) = 1.0;
    const auto res = dirichlet_min(zp, e0);
    CHECK(res.value == doctest::Approx(0.0));
    CHECK(res.minimizer(1) == doctest::Approx(-1.0));
  }

  SUBCASE("agrees with the sampling oracle") {
    Rng rng(44);
    for (int i = 0; i < 6; ++i) {
      const Index n = 3 + static_cast<Index>(rng() % 7);
      const auto decomp = random_triple_decomp<double>(rng, n);
      const RealMat sigma = random_psd<double>(rng, n, 1 + static_cast<Index>(rng() % n));
      const ZProblem<double> zp(decomp, sigma);
      const RealVec e0 =
          decomp.part(0).basis() * random_uniform_vec<double>(rng, decomp.part(0).dim());
      const auto res = dirichlet_min(zp, e0);
      for (int s = 0; s < 300; ++s) {
        const RealVec probe = res.minimizer + decomp.part(1).basis() *
                                                  random_uniform_vec<double>(
                                                      rng, decomp.part(1).dim());
        CHECK((e0 + probe).dot(sigma * (e0 + probe)) >= res.value - 1e-9);
      }
      if (res.kernel.dim() > 0) {
        const RealVec flat = res.minimizer + res.kernel.basis() *
                                                 random_uniform_vec<double>(rng, res.kernel.dim());
        CHECK((e0 + flat).dot(sigma * (e0 + flat)) ==
              doctest::Approx(res.value).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("dual problem") {
  Rng rng(45);
  const Index n = 6;
  const auto decomp = random_triple_decomp<double>(rng, n);
  const RealMat sigma = random_psd_invertible<double>(rng, n);
  const ZProblem<double> zp(decomp, sigma);

  const auto dual = dual_problem(zp);
  check_matrix_near<double>(dual.sigma(), RealMat(sigma.inverse()), 1e-8);
  CHECK(dual.u_space().dim() == zp.u_space().dim());
  CHECK(dual.e_space().dim() == zp.j_space().dim());
  CHECK(dual.j_space().dim() == zp.e_space().dim());

  // dual of dual restores sigma
  check_matrix_near<double>(dual_problem(dual).sigma(), sigma, 1e-8);

  // the worked degenerate example: dual operator is the quarters matrix
  const auto dual2 = dual_problem(embed2(mat2(1, 1, 1, 1)));
  check_matrix_near<double>(dual2.sigma(), mat2(0.25, 0.25, 0.25, 0.25), 1e-12);
}

TEST_CASE("duality identity") {
  SUBCASE("random invertible psd") {
    Rng rng(46);
    for (int i = 0; i < 10; ++i) {
      const Index n = 3 + static_cast<Index>(rng() % 8);
      const auto decomp = random_triple_decomp<double>(rng, n);
      const ZProblem<double> zp(decomp, random_psd_invertible<double>(rng, n));
      const auto rep = duality_identity_check(zp);
      CHECK(rep.holds);
      CHECK(rep.identity_holds);
      CHECK(rep.identity_residual <= 1e-8);
    }
  }

  SUBCASE("identity operator") {
    const auto zp = ZProblem<double>(axis_three_part<double>(1, 2, 1),
                                     RealMat(RealMat::Identity(4, 4)));
    const auto rep = duality_identity_check(zp);
    CHECK(rep.holds);
    check_matrix_near<double>(rep.dual_effective, RealMat::Identity(1, 1), 1e-12);
    check_matrix_near<double>(rep.pinv_effective, RealMat::Identity(1, 1), 1e-12);
  }

  SUBCASE("second worked matrix fails hypothesis (c) and the identity") {
    const auto rep = duality_identity_check(embed2(mat2(1, 1, 1, 1)));
    CHECK(rep.hypotheses.a);
    CHECK(rep.hypotheses.b);
    CHECK_FALSE(rep.hypotheses.c);
    CHECK(rep.hypotheses.d);
    CHECK(rep.hypotheses.e);
    CHECK_FALSE(rep.identity_holds);
    CHECK(rep.dual_effective(0, 0) == doctest::Approx(0.25));
    CHECK(rep.pinv_effective(0, 0) == doctest::Approx(0.0));
  }
}

TEST_CASE("thomson minimization") {
  SUBCASE("scalar conductivity") {
    const double c = 4.0;
    const auto zp = ZProblem<double>(axis_three_part<double>(1, 2, 1),
                                     RealMat(c * RealMat::Identity(4, 4)));
    RealVec j0 = RealVec::Zero(4);
    j0(0) = 3.0;
    const auto res = thomson_min(zp, j0);
    CHECK(res.value == doctest::Approx(9.0 / c));
    CHECK(res.minimizer.norm() <= 1e-12);
  }

  SUBCASE("series two-resistor network carries (r1 + r2) j0^2") {
    const double g1 = 2.0, g2 = 0.5;
    const auto net = ElectricalNetwork<double>::from_conductances(path_digraph(3),
                                                                  (RealVec(2) << g1, g2).finished());
    const BoundaryPartition bp(3, {0, 2});
    const auto zp = dirichlet_zproblem(net, bp);
    const double j0_scalar = 1.75;
    const RealVec j0 = j0_scalar * RealVec::Ones(2);  // uniform current field in U
    REQUIRE(zp.u_space().contains(j0, 1e-9));
    const auto res = thomson_min(zp, j0);
    const double r_total = 1.0 / g1 + 1.0 / g2;
    CHECK(res.value == doctest::Approx(r_total * j0_scalar * j0_scalar).epsilon(1e-9));
  }

  SUBCASE("sampling never beats the analytic value") {
    Rng rng(47);
    for (int i = 0; i < 5; ++i) {
      const Index n = 3 + static_cast<Index>(rng() % 7);
      const auto decomp = random_triple_decomp<double>(rng, n);
      const ZProblem<double> zp(decomp, random_psd_invertible<double>(rng, n));
      const RealVec j0 =
          decomp.part(0).basis() * random_uniform_vec<double>(rng, decomp.part(0).dim());
      const auto res = thomson_min(zp, j0);
      for (int s = 0; s < 200; ++s) {
        const RealVec probe = res.minimizer + decomp.part(2).basis() *
                                                  random_uniform_vec<double>(
                                                      rng, decomp.part(2).dim());
        CHECK((j0 + probe).dot(zp.sigma_pinv() * (j0 + probe)) >= res.value - 1e-9);
      }
    }
  }

  SUBCASE("failed hypotheses are named") {
    // The dipole problem of a path network fails hypothesis (c).
    const auto net =
        ElectricalNetwork<double>::from_conductances(path_digraph(3), RealVec::Ones(2));
    const RealMat k = kirchhoff(net);
    const ZProblem<double> zp(axis_three_part<double>(1, 1, 1), k);
    RealVec j0 = RealVec::Zero(3);
    j0(0) = 1.0;
    CHECK_THROWS_WITH_AS(thomson_min(zp, j0), doctest::Contains("hypothesis (c)"),
                         HypothesisError);
  }
}

TEST_CASE("bounds") {
  SUBCASE("scalar conductivity pins both bounds") {
    const auto zp = ZProblem<double>(axis_three_part<double>(2, 2, 1),
                                     RealMat(2.0 * RealMat::Identity(5, 5)));
    const auto b = bounds(zp);
    REQUIRE(b.lower.has_value());
    check_matrix_near<double>(b.upper, RealMat(2.0 * RealMat::Identity(2, 2)), 1e-9);
    check_matrix_near<double>(*b.lower, RealMat(2.0 * RealMat::Identity(2, 2)), 1e-9);
  }

  SUBCASE("random invertible psd sandwich") {
    Rng rng(48);
    for (int i = 0; i < 10; ++i) {
      const Index n = 3 + static_cast<Index>(rng() % 8);
      const auto decomp = random_triple_decomp<double>(rng, n);
      const ZProblem<double> zp(decomp, random_psd_invertible<double>(rng, n));
      const auto b = bounds(zp);
      REQUIRE(b.lower.has_value());
      CHECK(is_psd(*b.lower));
      CHECK(psd_leq(*b.lower, zp.schur()));
      CHECK(psd_leq(zp.schur(), b.upper));
    }
  }

  SUBCASE("zero coupling attains the upper bound") {
    Rng rng(49);
    RealMat sigma = RealMat::Zero(5, 5);
    sigma.topLeftCorner(2, 2) = random_psd_invertible<double>(rng, 2);
    sigma.block(2, 2, 2, 2) = random_psd_invertible<double>(rng, 2);
    sigma(4, 4) = 1.0;
    const ZProblem<double> zp(axis_three_part<double>(2, 2, 1), sigma);
    check_matrix_near<double>(effective_operator(zp).matrix, zp.block(0, 0), 1e-10);
  }

  SUBCASE("lower bound skipped with a notice when duality fails") {
    const auto zp = embed2(mat2(1, 1, 1, 1));
    const auto b = bounds(zp);
    CHECK_FALSE(b.lower.has_value());
    CHECK(b.notice.find("duality") != std::string::npos);
  }
}

TEST_CASE("complex hermitian problems work through the same interface") {
  using C = std::complex<double>;
  Rng rng(51);
  const Index n = 5;
  const auto decomp = random_triple_decomp<C>(rng, n, 2, 2, 1);
  const Mat<C> sigma = random_psd_invertible<C>(rng, n);
  const ZProblem<C> zp(decomp, sigma);
  CHECK(zp.report().h1);

  const Vec<C> e0 = decomp.part(0).basis() * random_uniform_vec<C>(rng, 2);
  const auto sol = solve(zp, e0);
  CHECK(sol.residual(sigma) <= 1e-9 * std::max(1.0, sigma.norm() * e0.norm()));

  const auto eff = effective_operator(zp);
  CHECK(is_selfadjoint(eff.matrix));
  CHECK(is_psd(eff.matrix));

  const auto duality = duality_identity_check(zp);
  CHECK(duality.holds);
  CHECK(duality.identity_residual <= 1e-8);

  const auto res = dirichlet_min(zp, e0);
  for (int s = 0; s < 100; ++s) {
    const Vec<C> probe =
        res.minimizer + decomp.part(1).basis() * random_uniform_vec<C>(rng, 2);
    const Vec<C> w = e0 + probe;
    CHECK(std::real(C(w.dot(sigma * w))) >= res.value - 1e-9);
  }
}

TEST_CASE("uniqueness iff injective sigma11") {
  Rng rng(50);
  for (int i = 0; i < 10; ++i) {
    const Index n = 4 + static_cast<Index>(rng() % 5);
    const auto decomp = random_triple_decomp<double>(rng, n);
    const bool full_rank = (i % 2) == 0;
    const Index rank = full_rank ? n : 1 + static_cast<Index>(rng() % (n - 2));
    const RealMat sigma = random_psd<double>(rng, n, rank);
    const ZProblem<double> zp(decomp, sigma);
    const auto sol =
        solve(zp, RealVec(decomp.part(0).basis() *
                          random_uniform_vec<double>(rng, decomp.part(0).dim())));
    CHECK((sol.e_kernel.dim() == 0) == zp.report().sigma11_invertible);
  }
}
