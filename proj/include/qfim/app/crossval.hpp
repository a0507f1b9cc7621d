#ifndef QFIM_APP_CROSSVAL_HPP
#define QFIM_APP_CROSSVAL_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "qfim/app/evaluate.hpp"
#include "qfim/app/format.hpp"
#include "qfim/app/sweep.hpp"

namespace qfim::app {

/// Grid comparison of the numerical pipeline, the general formulas and the
/// explicit Gaussian expressions.
struct CrossvalSpec {
  double k = 1;
  double z_r = 2;
  Range s_range{0.1, 5.0, 0.25};
  Range p_range{0.1, 5.0, 0.25};
  double tol = 1e-8;           // route agreement, relative to qfim_scale
  double pattern_tol = 1e-10;  // structural zeros, relative to qfim_scale
  double antisymmetry_tol = 1e-12;
};

struct CrossvalFailure {
  double s = 0;
  double p = 0;
  std::string what;
};

struct CrossvalReport {
  std::size_t points = 0;
  std::size_t compared = 0;
  std::size_t skipped = 0;         // fewer than two routes applicable
  std::size_t closed_skipped = 0;  // explicit Gaussian route not applicable
  ParamMatrix4d max_abs_h = ParamMatrix4d::Zero();
  ParamMatrix4d max_abs_gamma = ParamMatrix4d::Zero();
  ParamMatrix4d max_rel_h = ParamMatrix4d::Zero();
  ParamMatrix4d max_rel_gamma = ParamMatrix4d::Zero();
  double max_rel = 0;
  std::vector<CrossvalFailure> failures;

  bool passed() const { return failures.empty() && compared > 0; }
};

CrossvalReport run_crossval(const CrossvalSpec& spec,
                            const Routes& routes = default_routes(),
                            unsigned threads = thread_budget());

void print_report(std::ostream& out, const CrossvalReport& report);

}  // namespace qfim::app

#endif  // QFIM_APP_CROSSVAL_HPP
