#pragma once

#include "doctest.h"

#include <string>

#include "zeff/types.hpp"

namespace test_support {

inline std::string fixture(const std::string& name) {
  return std::string(ZEFF_FIXTURE_DIR) + "/" + name;
}

template <class Scalar>
void check_matrix_near(const zeff::Mat<Scalar>& actual, const zeff::Mat<Scalar>& expected,
                       double atol) {
  REQUIRE(actual.rows() == expected.rows());
  REQUIRE(actual.cols() == expected.cols());
  CHECK(zeff::max_abs_diff<Scalar>(actual, expected) <= atol);
}

inline zeff::RealMat mat2(double a, double b, double c, double d) {
  zeff::RealMat m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace test_support
