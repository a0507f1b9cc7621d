#ifndef QFIM_SLD_HPP
#define QFIM_SLD_HPP

#include <algorithm>
#include <array>
#include <string>
#include <cmath>

#include "qfim/gram.hpp"
#include "qfim/psf.hpp"
#include "qfim/types.hpp"

namespace qfim {

inline constexpr double kDefaultSupportCutoff = 1e-12;
// Largest accepted pre-symmetrization residual, relative to the largest
// |H| or |Gamma| entry.
inline constexpr double kSymmetryTolerance = 1e-10;

/// Upper-triangular T with T^H T = S.
///
/// Coefficient vectors c in the Gram basis map to orthonormal coordinates
/// T c, so an action matrix M becomes A = T M T^-1 and operator
/// Hermiticity reads A = A^H.
template <typename Scalar = double>
class Orthonormalizer {
 public:
  using Matrix = BasisMatrix<Scalar>;

  explicit Orthonormalizer(const GramMatrix<Scalar>& gram) {
    Eigen::LLT<Matrix> llt(gram.s_mat);
    if (llt.info() != Eigen::Success) {
      throw DegenerateBasis("Gram matrix is not positive definite");
    }
    t_ = llt.matrixU();
    t_inv_ = t_.template triangularView<Eigen::Upper>().solve(
        Matrix::Identity());
  }

  const Matrix& transform() const { return t_; }
  const Matrix& inverse() const { return t_inv_; }

  Matrix to_orthonormal(const ActionMatrix<Scalar>& op) const {
    return t_ * op.m * t_inv_;
  }
  ActionMatrix<Scalar> to_action(const Matrix& a) const {
    return {t_inv_ * a * t_};
  }

 private:
  Matrix t_;
  Matrix t_inv_;
};

template <typename Scalar>
Orthonormalizer<Scalar> orthonormalize(const GramMatrix<Scalar>& gram) {
  return Orthonormalizer<Scalar>(gram);
}

template <typename Scalar = double>
struct SldSolution {
  ActionMatrix<Scalar> sld;
  // Some q_i + q_j fell within a factor 10 of the support cutoff.
  bool low_confidence = false;
};

/// Solves L rho + rho L = 2 d rho on the support of rho.
///
/// The eigendecomposition of rho (in orthonormal coordinates) is computed
/// once; each solve() is then a rescaling of d rho in the eigenbasis:
/// L_ij = 2 <e_i|d rho|e_j> / (q_i + q_j), zero where q_i + q_j <= cutoff.
template <typename Scalar = double>
class SldSolver {
 public:
  using Matrix = BasisMatrix<Scalar>;

  SldSolver(const ActionMatrix<Scalar>& rho, const GramMatrix<Scalar>& gram,
            Scalar cutoff = Scalar(kDefaultSupportCutoff))
      : basis_(gram), cutoff_(cutoff) {
    Matrix a = basis_.to_orthonormal(rho);
    a = (a + a.adjoint()).eval() / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    if (eig.info() != Eigen::Success) {
      throw Error("eigendecomposition of rho failed");
    }
    q_ = eig.eigenvalues();
    v_ = eig.eigenvectors();
    for (int i = 0; i < kBasisSize; ++i) {
      for (int j = 0; j < kBasisSize; ++j) {
        const Scalar sum = q_(i) + q_(j);
        if (sum > cutoff_) {
          weight_(i, j) = Scalar(2) / sum;
          if (sum <= 10 * cutoff_) low_confidence_ = true;
        } else {
          weight_(i, j) = 0;
          if (sum > cutoff_ / 10) low_confidence_ = true;
        }
      }
    }
  }

  SldSolution<Scalar> solve(const ActionMatrix<Scalar>& drho) const {
    return {basis_.to_action(solve_orthonormal(drho)), low_confidence_};
  }

  /// SLD in orthonormal coordinates (Hermitian up to roundoff).
  Matrix solve_orthonormal(const ActionMatrix<Scalar>& drho) const {
    Matrix d = basis_.to_orthonormal(drho);
    d = (d + d.adjoint()).eval() / Scalar(2);
    const Matrix in_eigenbasis = v_.adjoint() * d * v_;
    const Matrix l = in_eigenbasis.cwiseProduct(weight_.template cast<Complex<Scalar>>());
    return v_ * l * v_.adjoint();
  }

  /// Eigenvalues of rho in ascending order.
  const BasisVector<Scalar>& rho_eigenvalues() const { return q_; }
  const Orthonormalizer<Scalar>& basis() const { return basis_; }
  bool low_confidence() const { return low_confidence_; }

 private:
  Orthonormalizer<Scalar> basis_;
  Scalar cutoff_;
  BasisVector<Scalar> q_;
  Matrix v_;
  Eigen::Matrix<Scalar, kBasisSize, kBasisSize> weight_;
  bool low_confidence_ = false;
};

template <typename Scalar>
SldSolution<Scalar> solve_sld(const ActionMatrix<Scalar>& rho,
                              const ActionMatrix<Scalar>& drho,
                              const GramMatrix<Scalar>& gram,
                              Scalar cutoff = Scalar(kDefaultSupportCutoff)) {
  return SldSolver<Scalar>(rho, gram, cutoff).solve(drho);
}

/// SLDs for the estimation parameters, indexed by Parameter.
template <typename Scalar = double>
struct SldSet {
  std::array<ActionMatrix<Scalar>, 4> l;

  const ActionMatrix<Scalar>& operator[](Parameter p) const {
    return l[index(p)];
  }
};

/// (L_s, L_xbar, L_p, L_zbar) from the source-coordinate SLDs:
/// L_s = (L_x2 - L_x1) / 2, L_xbar = L_x1 + L_x2, and the same for p, zbar.
template <typename Scalar>
SldSet<Scalar> rotate_to_physical(const ActionMatrix<Scalar>& l_x1,
                                  const ActionMatrix<Scalar>& l_x2,
                                  const ActionMatrix<Scalar>& l_z1,
                                  const ActionMatrix<Scalar>& l_z2) {
  const Scalar half(0.5);
  SldSet<Scalar> out;
  out.l[index(Parameter::S)].m = half * (l_x2.m - l_x1.m);
  out.l[index(Parameter::XBar)].m = l_x1.m + l_x2.m;
  out.l[index(Parameter::P)].m = half * (l_z2.m - l_z1.m);
  out.l[index(Parameter::ZBar)].m = l_z1.m + l_z2.m;
  return out;
}

template <typename Scalar = double>
struct QfimResult {
  ParamMatrix<Scalar> h = ParamMatrix<Scalar>::Zero();
  ParamMatrix<Scalar> gamma_mat = ParamMatrix<Scalar>::Zero();
  // max(|H - H^T|, |Gamma + Gamma^T|) before (anti)symmetrization
  Scalar symmetry_residual{0};
};

/// H + i Gamma = Tr[rho L_mu L_nu], evaluated on action matrices (the trace
/// is invariant under the change of representation).
template <typename Scalar>
QfimResult<Scalar> compute_qfim(const ActionMatrix<Scalar>& rho,
                                const SldSet<Scalar>& slds,
                                const GramMatrix<Scalar>& /*gram*/) {
  QfimResult<Scalar> out;
  for (int mu = 0; mu < 4; ++mu) {
    const BasisMatrix<Scalar> rho_l = rho.m * slds.l[mu].m;
    for (int nu = 0; nu < 4; ++nu) {
      const Complex<Scalar> t = (rho_l * slds.l[nu].m).trace();
      out.h(mu, nu) = t.real();
      out.gamma_mat(mu, nu) = t.imag();
    }
  }
  const ParamMatrix<Scalar> h_t = out.h.transpose();
  const ParamMatrix<Scalar> g_t = out.gamma_mat.transpose();
  out.symmetry_residual = std::max((out.h - h_t).cwiseAbs().maxCoeff(),
                                   (out.gamma_mat + g_t).cwiseAbs().maxCoeff());
  out.h = (out.h + h_t) / Scalar(2);
  out.gamma_mat = (out.gamma_mat - g_t) / Scalar(2);
  return out;
}

template <typename Scalar = double>
struct PipelineOptions {
  Scalar degeneracy_threshold = Scalar(kDefaultDegeneracyThreshold);
  Scalar support_cutoff = Scalar(kDefaultSupportCutoff);
};

template <typename Scalar = double>
struct PipelineResult {
  QfimResult<Scalar> qfim;
  BasisVector<Scalar> rho_eigenvalues;  // ascending
  bool low_confidence = false;
};

/// Full numerical route: Gram matrix, action matrices of rho and its four
/// coordinate derivatives, SLD solves, rotation, trace.
template <typename Scalar>
PipelineResult<Scalar> pipeline_qfim(const OverlapJet<Scalar>& jet,
                                     const PsfConstants<Scalar>& consts,
                                     const PipelineOptions<Scalar>& opts = {}) {
  const GramMatrix<Scalar> gram =
      build_gram(jet, consts, opts.degeneracy_threshold);
  const ActionMatrix<Scalar> rho = build_rho_action(gram);
  const SldSolver<Scalar> solver(rho, gram, opts.support_cutoff);

  auto sld = [&](Coordinate c) {
    return solver.solve(build_drho_action(gram, c)).sld;
  };
  const SldSet<Scalar> slds =
      rotate_to_physical(sld(Coordinate::X1), sld(Coordinate::X2),
                         sld(Coordinate::Z1), sld(Coordinate::Z2));

  PipelineResult<Scalar> out;
  out.qfim = compute_qfim(rho, slds, gram);
  const Scalar size = std::max(out.qfim.h.cwiseAbs().maxCoeff(),
                               out.qfim.gamma_mat.cwiseAbs().maxCoeff());
  if (!(out.qfim.symmetry_residual <= Scalar(kSymmetryTolerance) * size)) {
    throw Error("SLD trace matrix failed its symmetry check (residual " +
                std::to_string(static_cast<double>(out.qfim.symmetry_residual)) +
                ")");
  }
  out.rho_eigenvalues = solver.rho_eigenvalues();
  out.low_confidence = solver.low_confidence();
  return out;
}

/// Minimum separation radius the pipeline accepts: 1e-6 * max(1/k, z_R).
template <typename Scalar>
Scalar pipeline_min_separation(const GaussianPsf<Scalar>& psf) {
  return Scalar(1e-6) * psf.length_scale();
}

/// Gaussian pipeline from a source geometry. Only (s, p) enter, so any two
/// geometries with equal separations give bit-identical output.
template <typename Scalar>
PipelineResult<Scalar> pipeline_qfim(const GaussianPsf<Scalar>& psf,
                                     const SourceGeometry<Scalar>& geom,
                                     const PipelineOptions<Scalar>& opts = {}) {
  const Scalar r = pipeline_min_separation(psf);
  if (geom.s * geom.s + geom.p * geom.p < r * r) {
    throw DegenerateBasis(
        "sources (nearly) coincide: the basis expansion is degenerate; use "
        "the small-separation limit (`limits`) instead");
  }
  return pipeline_qfim(gaussian_overlap_jet(psf, geom.s, geom.p),
                       gaussian_constants(psf), opts);
}

}  // namespace qfim

#endif  // QFIM_SLD_HPP
