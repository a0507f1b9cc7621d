#ifndef QFIM_TYPES_HPP
#define QFIM_TYPES_HPP

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qfim {

// Estimated parameters, in matrix index order.
enum class Parameter : int { S = 0, XBar = 1, P = 2, ZBar = 3 };

inline constexpr std::array<Parameter, 4> kAllParameters = {
    Parameter::S, Parameter::XBar, Parameter::P, Parameter::ZBar};

constexpr int index(Parameter p) { return static_cast<int>(p); }

constexpr std::string_view name(Parameter p) {
  switch (p) {
    case Parameter::S: return "s";
    case Parameter::XBar: return "xbar";
    case Parameter::P: return "p";
    case Parameter::ZBar: return "zbar";
  }
  return "?";
}

// Six-vector basis: |Psi1>, |Psi2>, d_x1|Psi1>, d_z1|Psi1>, d_x2|Psi2>, d_z2|Psi2>.
inline constexpr int kBasisSize = 6;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using BasisMatrix = Eigen::Matrix<Complex<Scalar>, kBasisSize, kBasisSize>;

template <typename Scalar>
using BasisVector = Eigen::Matrix<Scalar, kBasisSize, 1>;

template <typename Scalar>
using ParamMatrix = Eigen::Matrix<Scalar, 4, 4>;

using ParamMatrix4d = ParamMatrix<double>;

// Errors. Everything derives from Error so callers can catch the family.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class NonFiniteSample : public Error {
 public:
  using Error::Error;
};

class DegenerateBasis : public Error {
 public:
  using Error::Error;
};

class DegenerateOverlap : public Error {
 public:
  using Error::Error;
};

class SmallSeparation : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

}  // namespace qfim

#endif  // QFIM_TYPES_HPP
