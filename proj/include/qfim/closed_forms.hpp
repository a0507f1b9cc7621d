#ifndef QFIM_CLOSED_FORMS_HPP
#define QFIM_CLOSED_FORMS_HPP

#include <cmath>
#include <string>

#include "qfim/psf.hpp"
#include "qfim/sld.hpp"
#include "qfim/types.hpp"

namespace qfim {

inline constexpr double kDefaultOverlapThreshold = 1e-10;

namespace detail {

template <typename Scalar>
void require_distinguishable(const OverlapJet<Scalar>& jet, Scalar threshold) {
  const Scalar a = jet.modulus();
  if (!(1 - a * a > threshold)) {
    throw DegenerateOverlap(
        "1 - |gamma|^2 = " + std::to_string(static_cast<double>(1 - a * a)) +
        " is below threshold; use the small-separation limit");
  }
}

// Slopes of |gamma| and arg(gamma) shared by the general formulas.
template <typename Scalar>
struct OverlapSlopes {
  Scalar mod;     // |gamma|
  Scalar mod_s;   // d_s |gamma|
  Scalar mod_p;   // d_p |gamma|
  Scalar phi_s;   // d_s arg(gamma)
  Scalar phi_p;   // d_p arg(gamma)
  Scalar one_minus_mod2;

  explicit OverlapSlopes(const OverlapJet<Scalar>& jet)
      : mod(jet.modulus()),
        mod_s(jet.d_s_modulus()),
        mod_p(jet.d_p_modulus()),
        phi_s(jet.d_s_phase()),
        phi_p(jet.d_p_phase()),
        one_minus_mod2(1 - mod * mod) {}
};

}  // namespace detail

/// Quantum Fisher information for an arbitrary PSF from its overlap jet.
///
/// H_ss and H_pp are the constants <d_x psi|d_x psi> and Delta G^2; the only
/// nonzero off-diagonal pair is (xbar, zbar).
template <typename Scalar>
ParamMatrix<Scalar> general_qfim(
    const OverlapJet<Scalar>& jet, const PsfConstants<Scalar>& consts,
    Scalar threshold = Scalar(kDefaultOverlapThreshold)) {
  detail::require_distinguishable(jet, threshold);
  const detail::OverlapSlopes<Scalar> o(jet);
  const Scalar g2 = o.mod * o.mod;
  const Scalar d = o.one_minus_mod2;
  const Scalar mg = consts.mean_g;
  const Scalar var = consts.variance();

  ParamMatrix<Scalar> h = ParamMatrix<Scalar>::Zero();
  constexpr int s = index(Parameter::S);
  constexpr int x = index(Parameter::XBar);
  constexpr int p = index(Parameter::P);
  constexpr int z = index(Parameter::ZBar);

  h(s, s) = consts.dpsi_norm_sq;
  h(p, p) = var;
  h(x, x) = 4 * consts.dpsi_norm_sq - 4 * o.mod_s * o.mod_s -
            4 * g2 * o.phi_s * o.phi_s / d;
  h(z, z) = 4 / d *
            (var - o.mod_p * o.mod_p -
             g2 * (consts.mean_g2 - o.mod_p * o.mod_p + 2 * mg * o.phi_p +
                   o.phi_p * o.phi_p));
  h(x, z) = -4 * g2 * o.phi_s * (mg + o.phi_p) / d - 4 * o.mod_s * o.mod_p;
  h(z, x) = h(x, z);
  return h;
}

/// Gamma_{mu nu} = Im Tr[rho L_mu L_nu] for an arbitrary PSF. Nonzero only on
/// (s, xbar), (p, zbar), (s, zbar), (xbar, p) and their transposes.
template <typename Scalar>
ParamMatrix<Scalar> general_gamma_matrix(
    const OverlapJet<Scalar>& jet, const PsfConstants<Scalar>& consts,
    Scalar threshold = Scalar(kDefaultOverlapThreshold)) {
  detail::require_distinguishable(jet, threshold);
  const detail::OverlapSlopes<Scalar> o(jet);
  const Scalar g3 = o.mod * o.mod * o.mod;
  const Scalar d = o.one_minus_mod2;
  const Scalar mg = consts.mean_g;

  ParamMatrix<Scalar> g = ParamMatrix<Scalar>::Zero();
  constexpr int s = index(Parameter::S);
  constexpr int x = index(Parameter::XBar);
  constexpr int p = index(Parameter::P);
  constexpr int z = index(Parameter::ZBar);

  g(s, x) = -2 * g3 * o.mod_s * o.phi_s / d;
  g(p, z) = -2 * g3 * o.mod_p * (mg + o.phi_p) / d;
  // The second term carries the axial phase slope d_p arg(gamma); with
  // d_s arg(gamma) there instead, this entry disagrees with both the SLD
  // pipeline and the explicit Gaussian expressions.
  g(s, z) = 2 * o.mod * (o.mod_p * o.phi_s - o.mod_s * (o.phi_p + mg) / d);
  g(x, p) = 2 * o.mod * (-o.mod_s * (mg + o.phi_p) + o.mod_p * o.phi_s / d);

  g(x, s) = -g(s, x);
  g(z, p) = -g(p, z);
  g(z, s) = -g(s, z);
  g(p, x) = -g(x, p);
  return g;
}

/// varsigma = 2 k s^2 z_R / (p^2 + 4 z_R^2)
template <typename Scalar>
Scalar varsigma(Scalar k, Scalar z_r, Scalar s, Scalar p) {
  return 2 * k * s * s * z_r / (p * p + 4 * z_r * z_r);
}

template <typename Scalar = double>
struct GaussianClosedFormInput {
  GaussianPsf<Scalar> psf;
  Scalar s;
  Scalar p;

  Scalar varsigma() const { return qfim::varsigma(psf.k(), psf.z_r(), s, p); }
};

/// |s| below this makes the explicit Gaussian expressions 0/0.
template <typename Scalar>
Scalar closed_form_min_separation(const GaussianPsf<Scalar>& psf) {
  return Scalar(1e-6) * psf.length_scale();
}

namespace detail {

template <typename Scalar>
void require_resolvable_s(const GaussianClosedFormInput<Scalar>& in) {
  if (std::abs(in.s) < closed_form_min_separation(in.psf)) {
    throw SmallSeparation(
        "explicit Gaussian expressions are singular at s = 0; use the general "
        "formulas with the analytic jet or the small-separation limit");
  }
}

}  // namespace detail

/// Explicit Gaussian-beam quantum Fisher information.
template <typename Scalar>
ParamMatrix<Scalar> gaussian_qfim(const GaussianClosedFormInput<Scalar>& in) {
  detail::require_resolvable_s(in);
  using std::exp;
  using std::pow;
  const Scalar k = in.psf.k();
  const Scalar zr = in.psf.z_r();
  const Scalar s = in.s;
  const Scalar p = in.p;
  const Scalar v = in.varsigma();
  const Scalar ev = exp(v);
  const Scalar emv = exp(-v);
  const Scalar s2 = s * s;
  const Scalar s4 = s2 * s2;
  const Scalar p2 = p * p;
  const Scalar zr2 = zr * zr;
  const Scalar den = k * ev * s2 - 2 * v * zr;

  ParamMatrix<Scalar> h = ParamMatrix<Scalar>::Zero();
  constexpr int is = index(Parameter::S);
  constexpr int ix = index(Parameter::XBar);
  constexpr int ip = index(Parameter::P);
  constexpr int iz = index(Parameter::ZBar);

  h(is, is) = k / (2 * zr);
  h(ix, ix) = v / s2 *
              (p2 * (1 / zr2 - 2 * v * v / (k * ev * s2 * zr - 2 * v * zr2)) -
               8 * emv * v * v * zr / (k * s2) + 4);
  h(ip, ip) = 1 / (4 * zr2);
  h(iz, iz) =
      emv *
      (4 * pow(k, 4) * ev * ev * pow(s, 8) -
       k * k * ev * v * v * s4 *
           (p2 * (v * v - 4 * v + 8) + 4 * (v * v + 4) * zr2) +
       16 * p2 * (v - 1) * (v - 1) * pow(v, 4) * zr2) /
      (4 * pow(k, 3) * pow(s, 6) * zr2 * den);
  h(ix, iz) = p * emv * v * v *
              (k * k * ev * (v - 2) * s4 - 8 * (v - 1) * v * v * zr2) /
              (k * k * pow(s, 5) * zr * den);
  h(iz, ix) = h(ix, iz);
  return h;
}

template <typename Scalar>
ParamMatrix<Scalar> gaussian_gamma_matrix(
    const GaussianClosedFormInput<Scalar>& in) {
  detail::require_resolvable_s(in);
  using std::exp;
  using std::pow;
  const Scalar k = in.psf.k();
  const Scalar zr = in.psf.z_r();
  const Scalar s = in.s;
  const Scalar p = in.p;
  const Scalar v = in.varsigma();
  const Scalar ev = exp(v);
  const Scalar emv = exp(-v);
  const Scalar s4 = pow(s, 4);
  const Scalar s5 = pow(s, 5);
  const Scalar s6 = pow(s, 6);
  const Scalar p2 = p * p;
  const Scalar zr2 = zr * zr;
  const Scalar den = k * ev * s * s - 2 * v * zr;

  ParamMatrix<Scalar> g = ParamMatrix<Scalar>::Zero();
  constexpr int is = index(Parameter::S);
  constexpr int ix = index(Parameter::XBar);
  constexpr int ip = index(Parameter::P);
  constexpr int iz = index(Parameter::ZBar);

  g(is, ix) = -4 * p * emv * pow(v, 4) * zr /
              (k * k * ev * s6 - 2 * k * v * s4 * zr);
  g(ip, iz) = -p * emv * (v - 1) * pow(v, 4) * (p2 * (v - 2) - 4 * v * zr2) /
              (2 * pow(k, 3) * s6 * zr * den);
  g(is, iz) = emv * pow(v, 3) * (2 * p2 * (v - 1) * v - k * k * ev * s4) /
              (k * k * s5 * den);
  g(ix, ip) = -emv * pow(v, 3) *
              (k * k * ev * s4 + v * (p2 * (v - 2) - 4 * v * zr2)) /
              (k * k * s5 * den);

  g(ix, is) = -g(is, ix);
  g(iz, ip) = -g(ip, iz);
  g(iz, is) = -g(is, iz);
  g(ip, ix) = -g(ix, ip);
  return g;
}

/// (s, p) -> (0, 0) limit: H = diag(k/2z_R, 2k/z_R, 1/4z_R^2, 1/z_R^2), Gamma = 0.
template <typename Scalar>
QfimResult<Scalar> small_separation_limit(const GaussianPsf<Scalar>& psf) {
  const Scalar k = psf.k();
  const Scalar zr = psf.z_r();
  QfimResult<Scalar> out;
  out.h.diagonal() << k / (2 * zr), 2 * k / zr, 1 / (4 * zr * zr),
      1 / (zr * zr);
  return out;
}

enum class ClosedFormRoute { Gaussian, General, Limit };

constexpr std::string_view name(ClosedFormRoute r) {
  switch (r) {
    case ClosedFormRoute::Gaussian: return "gaussian-closed";
    case ClosedFormRoute::General: return "general";
    case ClosedFormRoute::Limit: return "limit";
  }
  return "?";
}

template <typename Scalar = double>
struct RoutedQfim {
  QfimResult<Scalar> qfim;
  ClosedFormRoute route = ClosedFormRoute::Gaussian;
};

/// Gaussian closed forms with removable singularities handled: the explicit
/// expressions when |s| is resolvable, otherwise the general formulas on the
/// analytic jet, and the limit values when the sources coincide.
template <typename Scalar>
RoutedQfim<Scalar> gaussian_closed_qfim(const GaussianPsf<Scalar>& psf,
                                        Scalar s, Scalar p,
                                        bool allow_limit = true) {
  const Scalar delta = closed_form_min_separation(psf);
  RoutedQfim<Scalar> out;
  if (std::abs(s) >= delta) {
    const GaussianClosedFormInput<Scalar> in{psf, s, p};
    out.qfim.h = gaussian_qfim(in);
    out.qfim.gamma_mat = gaussian_gamma_matrix(in);
    out.route = ClosedFormRoute::Gaussian;
    return out;
  }
  if (std::abs(p) >= delta) {
    const auto jet = gaussian_overlap_jet(psf, s, p);
    const auto consts = gaussian_constants(psf);
    out.qfim.h = general_qfim(jet, consts);
    out.qfim.gamma_mat = general_gamma_matrix(jet, consts);
    out.route = ClosedFormRoute::General;
    return out;
  }
  if (!allow_limit) {
    throw SmallSeparation(
        "sources coincide to within the closed-form threshold; use the "
        "small-separation limit (`limits`)");
  }
  out.qfim = small_separation_limit(psf);
  out.route = ClosedFormRoute::Limit;
  return out;
}

}  // namespace qfim

#endif  // QFIM_CLOSED_FORMS_HPP
