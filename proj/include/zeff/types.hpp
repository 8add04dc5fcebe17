#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace zeff {

using Index = Eigen::Index;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMat = Mat<double>;
using RealVec = Vec<double>;
using ComplexMat = Mat<std::complex<double>>;
using ComplexVec = Vec<std::complex<double>>;

template <class Scalar>
inline constexpr bool is_supported_scalar_v =
    std::is_same_v<Scalar, double> || std::is_same_v<Scalar, std::complex<double>>;

/// Numerical knobs shared across the library. rank_rtol is the relative SVD
/// cutoff for rank decisions, eq_atol the absolute elementwise tolerance for
/// matrix equality, psd_atol the slack allowed on negative eigenvalues.
struct Tolerances {
  double rank_rtol = 1e-10;
  double eq_atol = 1e-9;
  double psd_atol = 1e-9;

  void validate() const {
    if (!(rank_rtol > 0.0) || !(eq_atol > 0.0) || !(psd_atol > 0.0))
      throw std::invalid_argument("Tolerances must be strictly positive");
  }
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

/// A stated hypothesis of an operation does not hold; the message names it.
class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& what) : Error(what) {}
};

class UnsolvableError : public Error {
 public:
  explicit UnsolvableError(const std::string& what) : Error(what) {}
};

class ConnectivityError : public Error {
 public:
  explicit ConnectivityError(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

template <class Scalar>
double max_abs_diff(const Mat<Scalar>& a, const Mat<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("max_abs_diff: shape mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

template <class Scalar>
bool approx_equal(const Mat<Scalar>& a, const Mat<Scalar>& b, double atol) {
  return max_abs_diff<Scalar>(a, b) <= atol;
}

template <class Scalar>
void require_finite(const Mat<Scalar>& a, const char* who) {
  if (!a.allFinite()) throw NumericalError(std::string(who) + ": non-finite entries");
}

}  // namespace zeff
