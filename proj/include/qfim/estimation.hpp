#ifndef QFIM_ESTIMATION_HPP
#define QFIM_ESTIMATION_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfim/types.hpp"

namespace qfim {

/// Experimental budget: nu runs of M coherence intervals with mean photon
/// number eps per interval. The bound scales as 1 / (nu M eps).
struct EstimationBudget {
  std::int64_t nu = 1;
  std::int64_t m = 1;
  double eps = 1.0;

  void validate() const {
    if (nu <= 0 || m <= 0) {
      throw InvalidParameter("budget: nu and M must be positive");
    }
    if (!(eps > 0) || !std::isfinite(eps)) {
      throw InvalidParameter("budget: eps must be positive and finite");
    }
  }

  // The single-photon expansion needs eps << 1.
  bool weak_source() const { return eps < 1.0; }

  double photons() const {
    return static_cast<double>(nu) * static_cast<double>(m) * eps;
  }
};

inline constexpr double kSingularThreshold = 1e-12;

template <typename Scalar = double>
struct QcrbReport {
  Scalar bound{0};                    // Tr[H^-1] / (nu M eps)
  Scalar trace_inverse{0};            // Tr[H^-1]
  Scalar condition_number{0};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> per_parameter;  // diag(H^-1) / (nu M eps)
};

namespace detail {

template <typename Derived>
auto checked_inverse(const Eigen::MatrixBase<Derived>& h,
                     typename Derived::Scalar& condition) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat sym = (h + h.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  const auto& ev = eig.eigenvalues();
  const Scalar lo = ev.minCoeff();
  const Scalar hi = ev.maxCoeff();
  if (!(hi > 0) || !(lo > Scalar(kSingularThreshold) * hi)) {
    throw SingularMatrix(
        "Fisher information matrix is singular or not positive definite "
        "(eigenvalues in [" +
        std::to_string(static_cast<double>(lo)) + ", " +
        std::to_string(static_cast<double>(hi)) + "])");
  }
  condition = hi / lo;
  const auto& v = eig.eigenvectors();
  const Mat inv = v * ev.cwiseInverse().asDiagonal() * v.transpose();
  return inv;
}

}  // namespace detail

template <typename Scalar>
QcrbReport<Scalar> qcrb_report(const ParamMatrix<Scalar>& h,
                               const EstimationBudget& budget) {
  budget.validate();
  QcrbReport<Scalar> out;
  const auto inv = detail::checked_inverse(h, out.condition_number);
  const Scalar n = static_cast<Scalar>(budget.photons());
  out.trace_inverse = inv.trace();
  out.bound = out.trace_inverse / n;
  out.per_parameter = inv.diagonal() / n;
  return out;
}

/// Lower bound on sum_mu Var(lambda_mu): Tr[H^-1] / (nu M eps).
template <typename Scalar>
Scalar qcrb_total(const ParamMatrix<Scalar>& h, const EstimationBudget& budget) {
  return qcrb_report(h, budget).bound;
}

/// Bound for a parameter subset with the remaining parameters known: the
/// inverse of the subset-indexed block of H.
template <typename Scalar>
Scalar qcrb_subset(const ParamMatrix<Scalar>& h,
                   std::span<const Parameter> subset,
                   const EstimationBudget& budget) {
  budget.validate();
  if (subset.empty()) {
    throw InvalidParameter("qcrb_subset: empty parameter subset");
  }
  const auto n = static_cast<Eigen::Index>(subset.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> block(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a != b && subset[a] == subset[b]) {
        throw InvalidParameter("qcrb_subset: repeated parameter");
      }
      block(a, b) = h(index(subset[a]), index(subset[b]));
    }
  }
  Scalar cond{};
  const auto inv = detail::checked_inverse(block, cond);
  return inv.trace() / static_cast<Scalar>(budget.photons());
}

struct PairCompatibility {
  Parameter first;
  Parameter second;
  bool measurement_compatible;    // |Gamma| <= tol * scale
  bool statistically_independent; // |H| <= tol * scale
  double scale;                   // sqrt(H_mu,mu * H_nu,nu)

  bool compatible() const {
    return measurement_compatible && statistically_independent;
  }
};

struct CompatibilityReport {
  std::array<PairCompatibility, 6> pairs;

  const PairCompatibility& pair(Parameter a, Parameter b) const {
    for (const auto& pc : pairs) {
      if ((pc.first == a && pc.second == b) ||
          (pc.first == b && pc.second == a)) {
        return pc;
      }
    }
    throw InvalidParameter("no such parameter pair");
  }

  bool separations_compatible() const {
    return pair(Parameter::S, Parameter::P).compatible();
  }

  bool all_compatible() const {
    for (const auto& pc : pairs) {
      if (!pc.compatible()) return false;
    }
    return true;
  }
};

inline constexpr double kDefaultCompatibilityTol = 1e-8;

inline CompatibilityReport compatibility_report(
    const ParamMatrix4d& h, const ParamMatrix4d& gamma_mat,
    double tol = kDefaultCompatibilityTol) {
  CompatibilityReport out{};
  std::size_t n = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const double scale = std::sqrt(std::abs(h(a, a) * h(b, b)));
      out.pairs[n++] = {kAllParameters[a], kAllParameters[b],
                        std::abs(gamma_mat(a, b)) <= tol * scale,
                        std::abs(h(a, b)) <= tol * scale, scale};
    }
  }
  return out;
}

}  // namespace qfim

#endif  // QFIM_ESTIMATION_HPP
