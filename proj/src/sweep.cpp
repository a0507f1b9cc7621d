#include "qfim/app/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace qfim::app {

unsigned thread_budget() {
  if (const char* env = std::getenv("QFIM_NUM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  std::size_t first_index = n;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (i < first_index) {
              first_index = i;
              first_error = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

void SweepSpec::validate() const {
  if (swept != 's' && swept != 'p') {
    throw InvalidParameter("sweep variable must be 's' or 'p'");
  }
  range.validate();
  if (!std::isfinite(fixed)) throw InvalidParameter("fixed value must be finite");
  if (!(tol > 0)) throw InvalidParameter("tolerance must be positive");
  static_cast<void>(GaussianPsf<double>(k, z_r));
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  const GaussianPsf<double> psf(spec.k, spec.z_r);
  const auto grid = spec.range.points();
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.s = spec.swept == 's' ? grid[i] : spec.fixed;
    row.p = spec.swept == 'p' ? grid[i] : spec.fixed;
    row.point = evaluate_routed(psf, row.s, row.p, spec.method);
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                     const std::vector<SweepRow>& rows) {
  const double norm = spec.normalized ? spec.normalization() : 1.0;
  constexpr int s = 0, x = 1, p = 2, z = 3;
  out << kSweepHeader << '\n';
  for (const auto& row : rows) {
    const auto& h = row.point.qfim.h;
    const auto& g = row.point.qfim.gamma_mat;
    const double cols[] = {h(s, s), h(x, x), h(p, p), h(z, z), h(x, z),
                           g(s, x), g(p, z), g(s, z), g(x, p)};
    out << spec.swept << ',' << format_double(row.s) << ','
        << format_double(row.p);
    for (double v : cols) out << ',' << format_double(v / norm);
    out << ',' << (spec.normalized ? '1' : '0');
    // Points evaluated by a different route than requested carry it here.
    const bool rerouted =
        spec.method == Method::All ? row.point.route != "gaussian-closed"
                                   : row.point.route != name(spec.method);
    if (rerouted) out << '|' << row.point.route;
    out << '\n';
  }
}

double max_sweep_deviation(const std::vector<SweepRow>& rows) {
  double dev = 0;
  for (const auto& row : rows) {
    if (row.point.max_deviation) dev = std::max(dev, *row.point.max_deviation);
  }
  return dev;
}

}  // namespace qfim::app
