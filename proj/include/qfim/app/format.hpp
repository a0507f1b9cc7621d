#ifndef QFIM_APP_FORMAT_HPP
#define QFIM_APP_FORMAT_HPP

#include <string>
#include <vector>

namespace qfim::app {

// 17 significant digits, '.' separator, independent of the global locale.
std::string format_double(double v);

/// start:stop:step grid. Points are start + i * step below stop, followed by
/// stop itself, so both endpoints are always present.
struct Range {
  double start = 0;
  double stop = 0;
  double step = 0;

  static Range parse(const std::string& text);
  void validate() const;
  std::vector<double> points() const;
};

}  // namespace qfim::app

#endif  // QFIM_APP_FORMAT_HPP
