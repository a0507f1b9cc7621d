#include "qfim/app/crossval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <utility>

namespace qfim::app {

namespace {

constexpr std::array<const char*, 4> kNames = {"s", "x", "p", "z"};

std::string entry(const char* mat, int r, int c) {
  return std::string(mat) + "_" + kNames[r] + kNames[c];
}

bool gamma_may_be_nonzero(int r, int c) {
  auto is = [&](Parameter a, Parameter b) {
    return (r == index(a) && c == index(b)) || (r == index(b) && c == index(a));
  };
  return is(Parameter::S, Parameter::XBar) || is(Parameter::P, Parameter::ZBar) ||
         is(Parameter::S, Parameter::ZBar) || is(Parameter::XBar, Parameter::P);
}

bool h_may_be_nonzero(int r, int c) {
  return r == c || (r == index(Parameter::XBar) && c == index(Parameter::ZBar)) ||
         (r == index(Parameter::ZBar) && c == index(Parameter::XBar));
}

struct PointResult {
  bool compared = false;
  bool closed_skipped = false;
  ParamMatrix4d abs_h = ParamMatrix4d::Zero();
  ParamMatrix4d abs_gamma = ParamMatrix4d::Zero();
  double scale = 1;
  std::vector<std::string> failures;
};

PointResult check_point(const CrossvalSpec& spec, const Routes& routes,
                        const GaussianPsf<double>& psf, double s, double p) {
  PointResult out;
  std::vector<std::pair<const char*, QfimResult<double>>> results;
  auto attempt = [&](const char* label, const Routes::Fn& fn) {
    try {
      results.emplace_back(label, fn(psf, s, p));
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  const double r = pipeline_min_separation(psf);
  if (s * s + p * p >= r * r) attempt("pipeline", routes.pipeline);
  attempt("general", routes.general);
  if (std::abs(s) >= closed_form_min_separation(psf)) {
    attempt("gaussian-closed", routes.gaussian);
  } else {
    out.closed_skipped = true;
  }
  if (results.size() < 2) return out;
  out.compared = true;
  out.scale = qfim_scale(results.front().second.h);

  for (const auto& [label, q] : results) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        if (!h_may_be_nonzero(a, b) &&
            std::abs(q.h(a, b)) > spec.pattern_tol * out.scale) {
          out.failures.push_back(std::string(label) + ": " + entry("H", a, b) +
                                 " should vanish, got " + format_double(q.h(a, b)));
        }
        if (!gamma_may_be_nonzero(a, b) &&
            std::abs(q.gamma_mat(a, b)) > spec.pattern_tol * out.scale) {
          out.failures.push_back(std::string(label) + ": " + entry("G", a, b) +
                                 " should vanish, got " +
                                 format_double(q.gamma_mat(a, b)));
        }
        if (std::abs(q.gamma_mat(a, b) + q.gamma_mat(b, a)) >
            spec.antisymmetry_tol * out.scale) {
          out.failures.push_back(std::string(label) + ": Gamma not antisymmetric at " +
                                 entry("G", a, b));
        }
      }
    }
  }

  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      const auto& [la, qa] = results[i];
      const auto& [lb, qb] = results[j];
      const ParamMatrix4d dh = (qa.h - qb.h).cwiseAbs();
      const ParamMatrix4d dg = (qa.gamma_mat - qb.gamma_mat).cwiseAbs();
      out.abs_h = out.abs_h.cwiseMax(dh);
      out.abs_gamma = out.abs_gamma.cwiseMax(dg);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          if (dh(a, b) > spec.tol * out.scale) {
            out.failures.push_back(std::string(la) + " vs " + lb + ": " +
                                   entry("H", a, b) + " " + format_double(qa.h(a, b)) +
                                   " != " + format_double(qb.h(a, b)));
          }
          if (dg(a, b) > spec.tol * out.scale) {
            out.failures.push_back(std::string(la) + " vs " + lb + ": " +
                                   entry("G", a, b) + " " +
                                   format_double(qa.gamma_mat(a, b)) + " != " +
                                   format_double(qb.gamma_mat(a, b)));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

CrossvalReport run_crossval(const CrossvalSpec& spec, const Routes& routes,
                            unsigned threads) {
  const GaussianPsf<double> psf(spec.k, spec.z_r);
  const auto s_grid = spec.s_range.points();
  const auto p_grid = spec.p_range.points();
  const std::size_t n = s_grid.size() * p_grid.size();
  std::vector<PointResult> points(n);
  parallel_for(n, threads, [&](std::size_t i) {
    points[i] = check_point(spec, routes, psf, s_grid[i / p_grid.size()],
                            p_grid[i % p_grid.size()]);
  });

  CrossvalReport report;
  report.points = n;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pt = points[i];
    if (pt.closed_skipped) ++report.closed_skipped;
    if (!pt.compared) {
      ++report.skipped;
      continue;
    }
    ++report.compared;
    report.max_abs_h = report.max_abs_h.cwiseMax(pt.abs_h);
    report.max_abs_gamma = report.max_abs_gamma.cwiseMax(pt.abs_gamma);
    report.max_rel_h = report.max_rel_h.cwiseMax(pt.abs_h / pt.scale);
    report.max_rel_gamma = report.max_rel_gamma.cwiseMax(pt.abs_gamma / pt.scale);
    for (const auto& f : pt.failures) {
      report.failures.push_back({s_grid[i / p_grid.size()], p_grid[i % p_grid.size()], f});
    }
  }
  report.max_rel = std::max(report.max_rel_h.maxCoeff(), report.max_rel_gamma.maxCoeff());
  return report;
}

void print_report(std::ostream& out, const CrossvalReport& report) {
  out << "points: " << report.points << " compared: " << report.compared
      << " skipped: " << report.skipped
      << " explicit-Gaussian skipped: " << report.closed_skipped << '\n';
  auto dump = [&](const char* title, const ParamMatrix4d& m) {
    out << title << '\n';
    for (int r = 0; r < 4; ++r) {
      out << "  ";
      for (int c = 0; c < 4; ++c) out << (c ? " " : "") << format_double(m(r, c));
      out << '\n';
    }
  };
  dump("max |dH|:", report.max_abs_h);
  dump("max |dH| / scale:", report.max_rel_h);
  dump("max |dGamma|:", report.max_abs_gamma);
  dump("max |dGamma| / scale:", report.max_rel_gamma);
  out << "max relative deviation: " << format_double(report.max_rel) << '\n';
  for (const auto& f : report.failures) {
    out << "FAIL s=" << format_double(f.s) << " p=" << format_double(f.p) << ": "
        << f.what << '\n';
  }
  out << (report.passed() ? "PASS" : "FAIL") << '\n';
}

}  // namespace qfim::app
