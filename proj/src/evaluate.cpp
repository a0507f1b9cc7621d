#include "qfim/app/evaluate.hpp"

#include <algorithm>
#include <cmath>

namespace qfim::app {

Method parse_method(std::string_view text) {
  if (text == "pipeline") return Method::Pipeline;
  if (text == "general") return Method::General;
  if (text == "gaussian-closed") return Method::GaussianClosed;
  if (text == "all") return Method::All;
  throw InvalidParameter("unknown method '" + std::string(text) +
                         "' (expected pipeline, general, gaussian-closed, all)");
}

std::string_view name(Method m) {
  switch (m) {
    case Method::Pipeline: return "pipeline";
    case Method::General: return "general";
    case Method::GaussianClosed: return "gaussian-closed";
    case Method::All: return "all";
  }
  return "?";
}

double qfim_scale(const ParamMatrix4d& h) {
  return std::pow(h.diagonal().cwiseAbs().prod(), 0.25);
}

double relative_deviation(const QfimResult<double>& a,
                          const QfimResult<double>& b) {
  const double dev = std::max((a.h - b.h).cwiseAbs().maxCoeff(),
                              (a.gamma_mat - b.gamma_mat).cwiseAbs().maxCoeff());
  return dev / qfim_scale(a.h);
}

namespace {

QfimResult<double> pipeline_route(const GaussianPsf<double>& psf, double s,
                                  double p) {
  return pipeline_qfim(psf, SourceGeometry<double>{s, 0, p, 0}).qfim;
}

QfimResult<double> general_route(const GaussianPsf<double>& psf, double s,
                                 double p) {
  const auto jet = gaussian_overlap_jet(psf, s, p);
  const auto consts = gaussian_constants(psf);
  QfimResult<double> out;
  out.h = general_qfim(jet, consts);
  out.gamma_mat = general_gamma_matrix(jet, consts);
  return out;
}

QfimResult<double> gaussian_route(const GaussianPsf<double>& psf, double s,
                                  double p) {
  const GaussianClosedFormInput<double> in{psf, s, p};
  QfimResult<double> out;
  out.h = gaussian_qfim(in);
  out.gamma_mat = gaussian_gamma_matrix(in);
  return out;
}

}  // namespace

Routes default_routes() { return {pipeline_route, general_route, gaussian_route}; }

Evaluation evaluate(const GaussianPsf<double>& psf,
                    const SourceGeometry<double>& geometry, Method method,
                    double compat_tol) {
  Evaluation e;
  e.k = psf.k();
  e.z_r = psf.z_r();
  e.geometry = geometry;
  e.method = method;
  const double s = geometry.s;
  const double p = geometry.p;
  const auto gamma = gaussian_overlap(psf, s, p);
  e.overlap_modulus = std::abs(gamma);
  e.overlap_phase = std::arg(gamma);
  e.varsigma = varsigma(psf.k(), psf.z_r(), s, p);

  switch (method) {
    case Method::Pipeline:
    case Method::All: {
      const auto r = pipeline_qfim(psf, geometry);
      e.qfim = r.qfim;
      e.rho_eigenvalues = r.rho_eigenvalues;
      e.low_confidence = r.low_confidence;
      e.method_used = "pipeline";
      break;
    }
    case Method::General: {
      e.qfim = general_route(psf, s, p);
      e.method_used = "general";
      break;
    }
    case Method::GaussianClosed: {
      const auto r = gaussian_closed_qfim(psf, s, p, /*allow_limit=*/false);
      e.qfim = r.qfim;
      e.method_used = std::string(name(r.route));
      break;
    }
  }

  if (method == Method::All) {
    e.routes_compared.push_back("pipeline");
    double dev = 0;
    const auto general = general_route(psf, s, p);
    e.routes_compared.push_back("general");
    dev = std::max(dev, relative_deviation(e.qfim, general));
    if (std::abs(s) >= closed_form_min_separation(psf)) {
      const auto closed = gaussian_route(psf, s, p);
      e.routes_compared.push_back("gaussian-closed");
      dev = std::max(dev, relative_deviation(e.qfim, closed));
      dev = std::max(dev, relative_deviation(general, closed));
    }
    e.max_deviation = dev;
  }

  e.compatibility = compatibility_report(e.qfim.h, e.qfim.gamma_mat, compat_tol);
  return e;
}

nlohmann::json matrix_to_json(const ParamMatrix4d& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::array();
    // adding +0.0 turns -0.0 into 0.0
    for (int c = 0; c < 4; ++c) row.push_back(m(r, c) + 0.0);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const Evaluation& e) {
  nlohmann::json j;
  j["psf"] = {{"model", "gaussian"}, {"k", e.k}, {"z_r", e.z_r}};
  j["geometry"] = {{"s", e.geometry.s},
                   {"xbar", e.geometry.xbar},
                   {"p", e.geometry.p},
                   {"zbar", e.geometry.zbar}};
  j["method"] = std::string(name(e.method));
  j["method_used"] = e.method_used;
  j["parameters"] = {"s", "xbar", "p", "zbar"};
  j["H"] = matrix_to_json(e.qfim.h);
  j["Gamma"] = matrix_to_json(e.qfim.gamma_mat);
  j["overlap"] = {{"modulus", e.overlap_modulus}, {"phase", e.overlap_phase}};
  j["varsigma"] = e.varsigma;
  if (e.rho_eigenvalues) {
    nlohmann::json ev = nlohmann::json::array();
    // descending: the two support eigenvalues first
    for (int i = kBasisSize - 1; i >= 0; --i) ev.push_back((*e.rho_eigenvalues)(i));
    j["rho_eigenvalues"] = ev;
    j["symmetry_residual"] = e.qfim.symmetry_residual;
    j["low_confidence"] = e.low_confidence;
  }
  if (e.max_deviation) {
    j["cross_check"] = {{"routes", e.routes_compared},
                        {"max_relative_deviation", *e.max_deviation}};
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& pc : e.compatibility.pairs) {
    pairs.push_back({{"pair", {std::string(name(pc.first)), std::string(name(pc.second))}},
                     {"measurement_compatible", pc.measurement_compatible},
                     {"statistically_independent", pc.statistically_independent}});
  }
  j["compatibility"] = {{"pairs", pairs},
                        {"s_p_compatible", e.compatibility.separations_compatible()},
                        {"all_compatible", e.compatibility.all_compatible()}};
  return j;
}

RoutedPoint evaluate_routed(const GaussianPsf<double>& psf, double s, double p,
                            Method method, const Routes& routes) {
  RoutedPoint out;
  auto limit = [&] {
    out.qfim = small_separation_limit(psf);
    out.route = "limit";
  };
  auto closed = [&] {
    const auto r = gaussian_closed_qfim(psf, s, p);
    if (r.route == ClosedFormRoute::Gaussian) {
      out.qfim = routes.gaussian(psf, s, p);
    } else if (r.route == ClosedFormRoute::General) {
      out.qfim = routes.general(psf, s, p);
    } else {
      out.qfim = r.qfim;
    }
    out.route = std::string(name(r.route));
  };

  switch (method) {
    case Method::Pipeline: {
      const double r = pipeline_min_separation(psf);
      if (s * s + p * p < r * r) {
        limit();
        break;
      }
      try {
        out.qfim = routes.pipeline(psf, s, p);
        out.route = "pipeline";
      } catch (const DegenerateBasis&) {
        closed();
      }
      break;
    }
    case Method::General:
      try {
        out.qfim = routes.general(psf, s, p);
        out.route = "general";
      } catch (const DegenerateOverlap&) {
        limit();
      }
      break;
    case Method::GaussianClosed:
      closed();
      break;
    case Method::All: {
      closed();
      double dev = 0;
      bool compared = false;
      for (const auto* fn : {&routes.pipeline, &routes.general}) {
        try {
          const auto other = (*fn)(psf, s, p);
          if (out.route == "limit") continue;
          dev = std::max(dev, relative_deviation(out.qfim, other));
          compared = true;
        } catch (const Error&) {
        }
      }
      if (compared) out.max_deviation = dev;
      break;
    }
  }
  return out;
}

}  // namespace qfim::app
