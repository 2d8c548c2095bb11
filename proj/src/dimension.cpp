#include "isokernel/dimension.hpp"

#include <charconv>
#include <limits>
#include <stdexcept>

namespace isokernel {

Dimension Dimension::finite(int d) {
  if (d < 2) {
    throw std::invalid_argument("dimension must be >= 2 (got " + std::to_string(d) + ")");
  }
  return Dimension(d);
}

Dimension Dimension::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "∞") return infinite();
  int d = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, d);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("invalid dimension '" + std::string(text) + "' (expected integer >= 2 or 'inf')");
  }
  return finite(d);
}

int Dimension::value() const {
  if (!is_finite()) throw std::logic_error("Dimension::value() called on d = inf");
  return d_;
}

double Dimension::lambda() const {
  if (!is_finite()) return std::numeric_limits<double>::infinity();
  return 0.5 * (d_ - 2);
}

PolyFamily Dimension::family() const {
  if (!is_finite()) return PolyFamily::monomial;
  return d_ == 2 ? PolyFamily::chebyshev : PolyFamily::gegenbauer;
}

std::string Dimension::to_string() const { return is_finite() ? std::to_string(d_) : "inf"; }

}  // namespace isokernel
