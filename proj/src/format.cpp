#include "qfim/app/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "qfim/types.hpp"

namespace qfim::app {

std::string format_double(double v) {
  if (v == 0) return "0";  // drops the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

double parse_number(const std::string& text, const std::string& what) {
  double v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw InvalidParameter("range: cannot parse " + what + " '" + text + "'");
  }
  return v;
}

}  // namespace

Range Range::parse(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos ||
      text.find(':', b + 1) != std::string::npos) {
    throw InvalidParameter("range must look like start:stop:step, got '" +
                           text + "'");
  }
  Range r{parse_number(text.substr(0, a), "start"),
          parse_number(text.substr(a + 1, b - a - 1), "stop"),
          parse_number(text.substr(b + 1), "step")};
  r.validate();
  return r;
}

void Range::validate() const {
  if (!(start >= 0)) throw InvalidParameter("range: start must be >= 0");
  if (!(step > 0)) throw InvalidParameter("range: step must be > 0");
  if (!(stop > start)) throw InvalidParameter("range: stop must exceed start");
}

std::vector<double> Range::points() const {
  validate();
  std::vector<double> out;
  const double slack = 1e-9 * step;
  for (long i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v >= stop - slack) break;
    out.push_back(v);
  }
  out.push_back(stop);
  return out;
}

}  // namespace qfim::app
