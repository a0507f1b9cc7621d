#ifndef QFIM_APP_SWEEP_HPP
#define QFIM_APP_SWEEP_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qfim/app/evaluate.hpp"
#include "qfim/app/format.hpp"

namespace qfim::app {

// Worker count: QFIM_NUM_THREADS when set (>= 1), else hardware concurrency.
unsigned thread_budget();

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are
// rethrown on the calling thread (the one with the lowest index wins).
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

/// One-dimensional sweep of s or p with the other separation held fixed.
struct SweepSpec {
  double k = 1;
  double z_r = 2;
  char swept = 's';  // 's' or 'p'
  Range range{0, 5, 0.01};
  double fixed = 0;
  Method method = Method::GaussianClosed;
  bool normalized = false;
  double tol = 1e-8;  // cross-check tolerance for Method::All

  void validate() const;
  // N = k / (2 z_R)
  double normalization() const { return k / (2 * z_r); }
};

struct SweepRow {
  double s = 0;
  double p = 0;
  RoutedPoint point;
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                unsigned threads = thread_budget());

inline constexpr const char* kSweepHeader =
    "swept_var,s,p,H_ss,H_xx,H_pp,H_zz,H_xz,G_sx,G_pz,G_sz,G_xp,norm_flag";

/// Header plus one LF-terminated row per grid point, in grid order.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                     const std::vector<SweepRow>& rows);

// Largest cross-route deviation in the sweep (Method::All only, else 0).
double max_sweep_deviation(const std::vector<SweepRow>& rows);

}  // namespace qfim::app

#endif  // QFIM_APP_SWEEP_HPP
