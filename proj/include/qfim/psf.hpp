#ifndef QFIM_PSF_HPP
#define QFIM_PSF_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>

#include "qfim/types.hpp"

namespace qfim {

/// Two-source geometry in estimation coordinates (s, xbar, p, zbar).
///
/// s and p are the transverse and axial separations, xbar and zbar the
/// corresponding centroids. Absolute source coordinates (x1, z1, x2, z2) are
/// accepted through from_coordinates().
template <typename Scalar = double>
struct SourceGeometry {
  Scalar s{0};
  Scalar xbar{0};
  Scalar p{0};
  Scalar zbar{0};

  static SourceGeometry from_coordinates(Scalar x1, Scalar z1, Scalar x2,
                                         Scalar z2) {
    return {x2 - x1, (x2 + x1) / 2, z2 - z1, (z2 + z1) / 2};
  }

  Scalar x1() const { return xbar - s / 2; }
  Scalar x2() const { return xbar + s / 2; }
  Scalar z1() const { return zbar - p / 2; }
  Scalar z2() const { return zbar + p / 2; }

  bool operator==(const SourceGeometry&) const = default;
};

/// Source-independent PSF scalars: <d_x psi|d_x psi>, <G> and <G^2>.
template <typename Scalar = double>
struct PsfConstants {
  Scalar dpsi_norm_sq{0};
  Scalar mean_g{0};
  Scalar mean_g2{0};

  // Delta G^2 = <G^2> - <G>^2
  Scalar variance() const { return mean_g2 - mean_g * mean_g; }

  void validate() const {
    if (!(dpsi_norm_sq > 0) || !std::isfinite(dpsi_norm_sq)) {
      throw InvalidParameter("PsfConstants: dpsi_norm_sq must be positive");
    }
    if (!std::isfinite(mean_g) || !std::isfinite(mean_g2)) {
      throw InvalidParameter("PsfConstants: non-finite <G> or <G^2>");
    }
    if (variance() < 0) {
      throw InvalidParameter("PsfConstants: <G^2> - <G>^2 is negative");
    }
  }
};

/// The overlap gamma(s, p) = <Psi1|Psi2> together with its partials up to
/// second order. Derived modulus/phase slopes are computed from the complex
/// partials directly, so no phase unwrapping is ever needed.
template <typename Scalar = double>
struct OverlapJet {
  using C = Complex<Scalar>;

  C gamma{1, 0};
  C d_s{0, 0};
  C d_p{0, 0};
  C d_ss{0, 0};
  C d_pp{0, 0};
  C d_sp{0, 0};

  Scalar modulus() const { return std::abs(gamma); }
  Scalar phase() const { return std::arg(gamma); }

  // d|gamma| = Re(d gamma * conj(gamma)) / |gamma|
  Scalar d_s_modulus() const {
    return std::real(d_s * std::conj(gamma)) / modulus();
  }
  Scalar d_p_modulus() const {
    return std::real(d_p * std::conj(gamma)) / modulus();
  }
  // d arg(gamma) = Im(d gamma / gamma)
  Scalar d_s_phase() const { return std::imag(d_s / gamma); }
  Scalar d_p_phase() const { return std::imag(d_p / gamma); }
};

/// Free-space Gaussian beam PSF with wavenumber k and Rayleigh-type length z_R.
template <typename Scalar = double>
class GaussianPsf {
 public:
  GaussianPsf(Scalar k, Scalar z_r) : k_(k), z_r_(z_r) {
    if (!(k > 0) || !std::isfinite(k)) {
      throw InvalidParameter("GaussianPsf: k must be positive and finite");
    }
    if (!(z_r > 0) || !std::isfinite(z_r)) {
      throw InvalidParameter("GaussianPsf: z_R must be positive and finite");
    }
  }

  Scalar k() const { return k_; }
  Scalar z_r() const { return z_r_; }

  // Length scale used for the near-coincidence thresholds.
  Scalar length_scale() const { return std::max(Scalar(1) / k_, z_r_); }

 private:
  Scalar k_;
  Scalar z_r_;
};

template <typename Scalar>
PsfConstants<Scalar> gaussian_constants(const GaussianPsf<Scalar>& psf) {
  const Scalar k = psf.k();
  const Scalar zr = psf.z_r();
  return {k / (2 * zr), k - 1 / (2 * zr), k * k - k / zr + 1 / (2 * zr * zr)};
}

/// gamma(s, p) = [2 i z_R / (p + 2 i z_R)] exp(-i k p - i k s^2 / (2 (p + 2 i z_R)))
template <typename Scalar>
Complex<Scalar> gaussian_overlap(const GaussianPsf<Scalar>& psf, Scalar s,
                                 Scalar p) {
  using C = Complex<Scalar>;
  const Scalar k = psf.k();
  const C two_i_zr(0, 2 * psf.z_r());
  const C q = p + two_i_zr;
  const C i(0, 1);
  return two_i_zr / q * std::exp(-i * k * p - i * k * s * s / (Scalar(2) * q));
}

/// Analytic jet of the Gaussian overlap.
///
/// Writing gamma = A(p) exp(E(s, p)) with A = 2 i z_R / q and q = p + 2 i z_R,
/// every partial is gamma times a polynomial in the partials of
/// log gamma = log A + E, which are rational in q.
template <typename Scalar>
OverlapJet<Scalar> gaussian_overlap_jet(const GaussianPsf<Scalar>& psf,
                                        Scalar s, Scalar p) {
  using C = Complex<Scalar>;
  const Scalar k = psf.k();
  const C i(0, 1);
  const C q(p, 2 * psf.z_r());
  const C q2 = q * q;

  // partials of log gamma
  const C ls = -i * k * s / q;
  const C lss = -i * k / q;
  const C lp = -Scalar(1) / q - i * k + i * k * s * s / (Scalar(2) * q2);
  const C lpp = Scalar(1) / q2 - i * k * s * s / (q2 * q);
  const C lsp = i * k * s / q2;

  OverlapJet<Scalar> jet;
  jet.gamma = gaussian_overlap(psf, s, p);
  jet.d_s = jet.gamma * ls;
  jet.d_p = jet.gamma * lp;
  jet.d_ss = jet.gamma * (ls * ls + lss);
  jet.d_pp = jet.gamma * (lp * lp + lpp);
  jet.d_sp = jet.gamma * (ls * lp + lsp);
  return jet;
}

/// Default central-difference step: 1e-5 * max(1, |s|, |p|).
template <typename Scalar>
Scalar default_fd_step(Scalar s, Scalar p) {
  return Scalar(1e-5) * std::max({Scalar(1), std::abs(s), std::abs(p)});
}

template <typename Scalar>
using OverlapFunction = std::function<Complex<Scalar>(Scalar, Scalar)>;

/// Central-difference jet of an arbitrary overlap function.
///
/// First partials use `step`; second partials use `second_step`, which
/// defaults to 10 * step (the three-point second difference loses
/// roughly eps / h^2 to rounding, so it wants a larger step).
template <typename Scalar>
OverlapJet<Scalar> fd_overlap_jet(const OverlapFunction<Scalar>& gamma_fn,
                                  Scalar s, Scalar p, Scalar step,
                                  std::optional<std::type_identity_t<Scalar>> second_step = {}) {
  if (!(step > 0)) {
    throw InvalidParameter("fd_overlap_jet: step must be positive");
  }
  const Scalar h1 = step;
  const Scalar h2 = second_step.value_or(10 * step);
  if (!(h2 > 0)) {
    throw InvalidParameter("fd_overlap_jet: second step must be positive");
  }

  auto sample = [&](Scalar ss, Scalar pp) {
    const Complex<Scalar> v = gamma_fn(ss, pp);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NonFiniteSample("fd_overlap_jet: non-finite overlap sample at s=" +
                            std::to_string(static_cast<double>(ss)) + ", p=" +
                            std::to_string(static_cast<double>(pp)));
    }
    return v;
  };

  OverlapJet<Scalar> jet;
  jet.gamma = sample(s, p);
  jet.d_s = (sample(s + h1, p) - sample(s - h1, p)) / (2 * h1);
  jet.d_p = (sample(s, p + h1) - sample(s, p - h1)) / (2 * h1);

  const Scalar hh = h2 * h2;
  jet.d_ss = (sample(s + h2, p) - Scalar(2) * jet.gamma + sample(s - h2, p)) / hh;
  jet.d_pp = (sample(s, p + h2) - Scalar(2) * jet.gamma + sample(s, p - h2)) / hh;
  jet.d_sp = (sample(s + h2, p + h2) - sample(s + h2, p - h2) -
              sample(s - h2, p + h2) + sample(s - h2, p - h2)) /
             (4 * hh);
  return jet;
}

template <typename Scalar>
OverlapJet<Scalar> fd_overlap_jet(const OverlapFunction<Scalar>& gamma_fn,
                                  Scalar s, Scalar p) {
  return fd_overlap_jet(gamma_fn, s, p, default_fd_step(s, p));
}

}  // namespace qfim

#endif  // QFIM_PSF_HPP
