#ifndef QFIM_GRAM_HPP
#define QFIM_GRAM_HPP

#include <string>

#include "qfim/psf.hpp"
#include "qfim/types.hpp"

namespace qfim {

/// Overlaps S_ij = <Psi_i|Psi_j> of the six basis vectors
/// (|Psi1>, |Psi2>, d_x1|Psi1>, d_z1|Psi1>, d_x2|Psi2>, d_z2|Psi2>).
template <typename Scalar = double>
struct GramMatrix {
  BasisMatrix<Scalar> s_mat;
};

/// Operator O represented by its action on the basis:
/// O|Psi_j> = sum_i m(i, j) |Psi_i>.
///
/// In a non-orthogonal basis a Hermitian O satisfies S m = m^H S rather
/// than m = m^H.
template <typename Scalar = double>
struct ActionMatrix {
  BasisMatrix<Scalar> m;
};

enum class Coordinate { X1, Z1, X2, Z2 };

inline constexpr double kDefaultDegeneracyThreshold = 1e-12;

/// Fills S from the overlap jet and the PSF constants.
///
/// gamma depends on s = x2 - x1 and p = z2 - z1 only, so source-coordinate
/// partials follow from the chain rule: d_x1 = -d_s, d_x2 = +d_s and likewise
/// for z with p. Throws DegenerateBasis when the smallest eigenvalue of S is
/// below `relative_threshold` times the largest.
template <typename Scalar>
GramMatrix<Scalar> build_gram(
    const OverlapJet<Scalar>& jet, const PsfConstants<Scalar>& consts,
    Scalar relative_threshold = Scalar(kDefaultDegeneracyThreshold)) {
  using C = Complex<Scalar>;
  const C i(0, 1);
  const C zero(0, 0);
  const C g = jet.gamma;
  const C mig = -i * consts.mean_g;

  const C dx2 = jet.d_s;
  const C dz2 = jet.d_p;
  const C dx1 = -jet.d_s;
  const C dz1 = -jet.d_p;
  const C dx1dx2 = -jet.d_ss;
  const C dz1dz2 = -jet.d_pp;
  const C dx1dz2 = -jet.d_sp;
  const C dz1dx2 = -jet.d_sp;

  BasisMatrix<Scalar> s;
  // upper triangle, row by row
  s(0, 0) = 1;
  s(0, 1) = g;
  s(0, 2) = zero;
  s(0, 3) = mig;
  s(0, 4) = dx2;
  s(0, 5) = dz2;

  s(1, 1) = 1;
  s(1, 2) = std::conj(dx1);
  s(1, 3) = std::conj(dz1);
  s(1, 4) = zero;
  s(1, 5) = mig;

  s(2, 2) = consts.dpsi_norm_sq;
  s(2, 3) = zero;
  s(2, 4) = dx1dx2;
  s(2, 5) = dx1dz2;

  s(3, 3) = consts.mean_g2;
  s(3, 4) = dz1dx2;
  s(3, 5) = dz1dz2;

  s(4, 4) = consts.dpsi_norm_sq;
  s(4, 5) = zero;

  s(5, 5) = consts.mean_g2;

  for (int r = 0; r < kBasisSize; ++r) {
    for (int c = 0; c < r; ++c) s(r, c) = std::conj(s(c, r));
  }

  Eigen::SelfAdjointEigenSolver<BasisMatrix<Scalar>> eig(
      s, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const Scalar lo = ev.minCoeff();
  const Scalar hi = ev.maxCoeff();
  if (!(lo > relative_threshold * hi)) {
    throw DegenerateBasis(
        "Gram matrix is numerically singular (min/max eigenvalue " +
        std::to_string(static_cast<double>(lo / hi)) +
        "); the sources are too close for the basis expansion, use the "
        "small-separation limit");
  }
  return {s};
}

/// Action matrix of rho_1 = (|Psi1><Psi1| + |Psi2><Psi2|) / 2.
template <typename Scalar>
ActionMatrix<Scalar> build_rho_action(const GramMatrix<Scalar>& gram) {
  ActionMatrix<Scalar> rho{BasisMatrix<Scalar>::Zero()};
  rho.m.row(0) = gram.s_mat.row(0) / Scalar(2);
  rho.m.row(1) = gram.s_mat.row(1) / Scalar(2);
  return rho;
}

/// Action matrix of d rho_1 / d coord. Note: this is the derivative itself,
/// i.e. half of (|Psi_a><Psi_b| + H.c.).
///
/// For x1 the nonzero rows are {0, 2}, z1 {0, 3}, x2 {1, 4}, z2 {1, 5}.
template <typename Scalar>
ActionMatrix<Scalar> build_drho_action(const GramMatrix<Scalar>& gram,
                                       Coordinate coord) {
  int source = 0;
  int deriv = 2;
  switch (coord) {
    case Coordinate::X1: source = 0; deriv = 2; break;
    case Coordinate::Z1: source = 0; deriv = 3; break;
    case Coordinate::X2: source = 1; deriv = 4; break;
    case Coordinate::Z2: source = 1; deriv = 5; break;
  }
  ActionMatrix<Scalar> d{BasisMatrix<Scalar>::Zero()};
  d.m.row(source) = gram.s_mat.row(deriv) / Scalar(2);
  d.m.row(deriv) = gram.s_mat.row(source) / Scalar(2);
  return d;
}

// max |S m - m^H S|
template <typename Scalar>
Scalar hermiticity_residual(const ActionMatrix<Scalar>& op,
                            const GramMatrix<Scalar>& gram) {
  const BasisMatrix<Scalar> r =
      gram.s_mat * op.m - op.m.adjoint() * gram.s_mat;
  return r.cwiseAbs().maxCoeff();
}

}  // namespace qfim

#endif  // QFIM_GRAM_HPP
