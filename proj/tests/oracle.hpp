// Test-only reference computations. Nothing here calls into the library's
// jet, SLD or closed-form code paths.
#ifndef QFIM_TESTS_ORACLE_HPP
#define QFIM_TESTS_ORACLE_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using cd = std::complex<double>;
using Mat6 = Eigen::Matrix<cd, 6, 6>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

// Central differences with independently chosen steps.
struct FdJet {
  cd gamma, d_s, d_p, d_ss, d_pp, d_sp;
};

inline FdJet central_differences(const std::function<cd(double, double)>& f,
                                 double s, double p, double h1, double h2) {
  FdJet j;
  j.gamma = f(s, p);
  j.d_s = (f(s + h1, p) - f(s - h1, p)) / (2 * h1);
  j.d_p = (f(s, p + h1) - f(s, p - h1)) / (2 * h1);
  j.d_ss = (f(s + h2, p) - 2.0 * j.gamma + f(s - h2, p)) / (h2 * h2);
  j.d_pp = (f(s, p + h2) - 2.0 * j.gamma + f(s, p - h2)) / (h2 * h2);
  j.d_sp = (f(s + h2, p + h2) - f(s + h2, p - h2) - f(s - h2, p + h2) +
            f(s - h2, p - h2)) /
           (4 * h2 * h2);
  return j;
}

// Symmetric (Lowdin) orthonormalization: A = S^{1/2} M S^{-1/2}.
struct Lowdin {
  Mat6 half, inv_half;
  explicit Lowdin(const Mat6& s) {
    Eigen::SelfAdjointEigenSolver<Mat6> eig(s);
    const auto& w = eig.eigenvalues();
    const auto& v = eig.eigenvectors();
    half = v * w.cwiseSqrt().cast<cd>().asDiagonal() * v.adjoint();
    inv_half = v * w.cwiseSqrt().cwiseInverse().cast<cd>().asDiagonal() * v.adjoint();
  }
  Mat6 to_orthonormal(const Mat6& m) const { return half * m * inv_half; }
};

// Minimum-norm solution of L rho + rho L = 2 drho via the 36x36 Kronecker
// system, solved with a complete orthogonal decomposition. Inputs are
// hermitized first; the rank threshold sits well above the roundoff left in
// the null space of rho.
inline Mat6 sylvester_sld(const Mat6& rho_in, const Mat6& drho_in) {
  const Mat6 rho = (rho_in + rho_in.adjoint()) / 2.0;
  const Mat6 drho = (drho_in + drho_in.adjoint()) / 2.0;
  using Big = Eigen::Matrix<cd, 36, 36>;
  using Vec = Eigen::Matrix<cd, 36, 1>;
  const Mat6 id = Mat6::Identity();
  Big k;
  // vec(A X B) = (B^T kron A) vec(X), column-major vec
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      k.block<6, 6>(6 * i, 6 * j) = rho(j, i) * id + id(j, i) * rho;
    }
  }
  Vec rhs;
  for (int c = 0; c < 6; ++c) {
    for (int r = 0; r < 6; ++r) rhs(6 * c + r) = 2.0 * drho(r, c);
  }
  // the threshold shapes the factorization, so it is set before compute()
  Eigen::CompleteOrthogonalDecomposition<Big> cod;
  cod.setThreshold(1e-10);
  cod.compute(k);
  const Vec x = cod.solve(rhs);
  Mat6 l;
  for (int c = 0; c < 6; ++c) {
    for (int r = 0; r < 6; ++r) l(r, c) = x(6 * c + r);
  }
  return l;
}

// Full reference QFIM from a Gram matrix: Lowdin basis, Kronecker SLDs,
// coordinate rotation, trace.
inline std::pair<Mat4, Mat4> reference_qfim(const Mat6& s) {
  const Lowdin lw(s);
  Mat6 rho = Mat6::Zero();
  rho.row(0) = s.row(0) / 2.0;
  rho.row(1) = s.row(1) / 2.0;
  auto drho = [&](int a, int b) {
    Mat6 d = Mat6::Zero();
    d.row(a) = s.row(b) / 2.0;
    d.row(b) = s.row(a) / 2.0;
    return d;
  };
  const Mat6 r = lw.to_orthonormal(rho);
  const std::array<Mat6, 4> coord = {
      sylvester_sld(r, lw.to_orthonormal(drho(0, 2))),   // x1
      sylvester_sld(r, lw.to_orthonormal(drho(1, 4))),   // x2
      sylvester_sld(r, lw.to_orthonormal(drho(0, 3))),   // z1
      sylvester_sld(r, lw.to_orthonormal(drho(1, 5)))};  // z2
  const std::array<Mat6, 4> phys = {0.5 * (coord[1] - coord[0]), coord[0] + coord[1],
                                    0.5 * (coord[3] - coord[2]), coord[2] + coord[3]};
  Mat4 h, g;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const cd t = (r * phys[a] * phys[b]).trace();
      h(a, b) = t.real();
      g(a, b) = t.imag();
    }
  }
  return {h, g};
}

// Explicit Gaussian H_xbar,xbar at p = 0: (k / 2 z_R) 4 (1 - v e^-v).
inline double gaussian_hxx_p0(double k, double zr, double s) {
  const double v = k * s * s / (2 * zr);
  return k / (2 * zr) * 4 * (1 - v * std::exp(-v));
}

}  // namespace oracle

#endif  // QFIM_TESTS_ORACLE_HPP
