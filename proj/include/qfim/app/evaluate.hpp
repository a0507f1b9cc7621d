#ifndef QFIM_APP_EVALUATE_HPP
#define QFIM_APP_EVALUATE_HPP

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qfim/qfim.hpp"

namespace qfim::app {

enum class Method { Pipeline, General, GaussianClosed, All };

Method parse_method(std::string_view text);
std::string_view name(Method m);

// Geometric mean of |diag(H)|: the common scale for entrywise comparisons.
double qfim_scale(const ParamMatrix4d& h);

// max |a - b| over all H and Gamma entries, divided by qfim_scale(a.h).
double relative_deviation(const QfimResult<double>& a,
                          const QfimResult<double>& b);

/// Single-point evaluation record (the `eval` command's JSON object).
struct Evaluation {
  double k = 0;
  double z_r = 0;
  SourceGeometry<double> geometry;
  Method method = Method::Pipeline;
  std::string method_used;
  QfimResult<double> qfim;
  double overlap_modulus = 0;
  double overlap_phase = 0;
  double varsigma = 0;
  std::optional<BasisVector<double>> rho_eigenvalues;
  bool low_confidence = false;
  std::vector<std::string> routes_compared;
  std::optional<double> max_deviation;
  CompatibilityReport compatibility{};
};

/// Strict evaluation: coincident sources are refused with an error that
/// points at the small-separation limit instead of being rerouted.
Evaluation evaluate(const GaussianPsf<double>& psf,
                    const SourceGeometry<double>& geometry, Method method,
                    double compat_tol = kDefaultCompatibilityTol);

nlohmann::json to_json(const Evaluation& e);
nlohmann::json matrix_to_json(const ParamMatrix4d& m);

/// The three independent routes, each evaluated at (s, p). Any route may
/// throw qfim::Error when it does not apply at that point.
struct Routes {
  using Fn = std::function<QfimResult<double>(const GaussianPsf<double>&,
                                              double, double)>;
  Fn pipeline;
  Fn general;
  Fn gaussian;
};

Routes default_routes();

/// Routed evaluation for grids: points where the requested route does not
/// apply fall back to the next applicable one and report which was used.
struct RoutedPoint {
  QfimResult<double> qfim;
  std::string route;
  std::optional<double> max_deviation;
};

RoutedPoint evaluate_routed(const GaussianPsf<double>& psf, double s, double p,
                            Method method, const Routes& routes = default_routes());

}  // namespace qfim::app

#endif  // QFIM_APP_EVALUATE_HPP
