#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "zeff/generators.hpp"
#include "zeff/hodge.hpp"

using namespace zeff;
using test_support::check_matrix_near;

TEST_CASE("degenerate pairs") {
  Rng rng(31);

  SUBCASE("t = 0 splits off ker u^* and ran u") {
    const RealMat u = random_rank<double>(rng, 5, 3, 2);
    const RealMat t = RealMat::Zero(4, 5);
    const auto hd = hodge_decompose(t, u);
    CHECK(hd.ran_Tstar.dim() == 0);
    CHECK(hd.ran_U.dim() == 2);
    CHECK(hd.harmonic.dim() == 3);
    check_matrix_near<double>(hd.harmonic.projection(),
                              kernel(RealMat(u.adjoint())).projection(), 1e-9);
  }

  SUBCASE("u = 0 splits off ran t^* and ker t") {
    const RealMat t = random_rank<double>(rng, 4, 5, 3);
    const RealMat u = RealMat::Zero(5, 2);
    const auto hd = hodge_decompose(t, u);
    CHECK(hd.ran_U.dim() == 0);
    CHECK(hd.ran_Tstar.dim() == 3);
    CHECK(hd.harmonic.dim() == 2);
    check_matrix_near<double>(hd.harmonic.projection(), kernel(t).projection(), 1e-9);
  }
}

TEST_CASE("three nontrivial parts in dimension >= 3") {
  // u spans one direction; t annihilates it and one more, leaving a
  // one-dimensional harmonic middle.
  RealMat u(3, 1);
  u << 1, -1, 0;
  RealMat t(1, 3);
  t << 1, 1, 1;  // t u = 0
  const auto hd = hodge_decompose(t, u);
  CHECK(hd.ran_U.dim() == 1);
  CHECK(hd.ran_Tstar.dim() == 1);
  CHECK(hd.harmonic.dim() == 1);
  RealVec harmonic_dir(3);
  harmonic_dir << 1, 1, -2;
  CHECK(hd.harmonic.contains(Vec<double>(harmonic_dir.normalized()), 1e-9));
}

TEST_CASE("projection identities on random admissible pairs") {
  Rng rng(32);
  for (int i = 0; i < 30; ++i) {
    const Index na = 1 + static_cast<Index>(rng() % 5);
    const Index nb = 2 + static_cast<Index>(rng() % 6);
    const Index nc = 1 + static_cast<Index>(rng() % 5);
    const auto [t, u] =
        random_hodge_pair<double>(rng, na, nb, nc, static_cast<Index>(rng() % (std::min(na, nb) + 1)));
    const auto hd = hodge_decompose(t, u);

    check_matrix_near<double>(
        hd.projection_ran_Tstar + hd.projection_ran_U + hd.projection_harmonic,
        RealMat::Identity(nb, nb), 1e-9);
    CHECK(hd.ran_Tstar.dim() + hd.ran_U.dim() + hd.harmonic.dim() == nb);
    CHECK((hd.ran_Tstar.basis().adjoint() * hd.ran_U.basis()).norm() <= 1e-9);
    CHECK((hd.ran_Tstar.basis().adjoint() * hd.harmonic.basis()).norm() <= 1e-9);
    CHECK((hd.harmonic.basis().adjoint() * hd.ran_U.basis()).norm() <= 1e-9);

    // harmonic part = ker t inter ker u^*
    const auto direct = intersection(kernel(t), kernel(RealMat(u.adjoint())));
    check_matrix_near<double>(hd.harmonic.projection(), direct.projection(), 1e-9);

    // ran(t^* t + u u^*) = ran t^* + ran u
    const RealMat laplacian = t.adjoint() * t + u * u.adjoint();
    check_matrix_near<double>(range_of(laplacian).projection(),
                              span_union(hd.ran_Tstar, hd.ran_U).projection(), 1e-9);
  }
}

TEST_CASE("pairs that do not chain are rejected") {
  RealMat t(1, 2), u(2, 1);
  t << 1, 0;
  u << 1, 0;
  CHECK_THROWS_WITH_AS(hodge_decompose(t, u), doctest::Contains("T U != 0"), HypothesisError);

  RealMat wrong(3, 1);
  wrong << 1, 0, 0;
  CHECK_THROWS_AS(hodge_decompose(t, wrong), DimensionError);
}
