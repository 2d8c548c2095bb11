#pragma once

#include <string>
#include <string_view>

namespace isokernel {

/// Which normalized polynomial family represents the spherical part.
enum class PolyFamily {
  chebyshev,   // d = 2, the lambda -> 0 limit
  gegenbauer,  // 2 < d < inf
  monomial,    // d = inf
};

/// Ambient dimension d in {2, 3, ..., inf}; carries lambda = (d - 2) / 2.
class Dimension {
 public:
  static Dimension finite(int d);
  static Dimension infinite() { return Dimension(0); }
  /// Accepts "inf", "infinity", "∞" or a decimal integer >= 2.
  static Dimension parse(std::string_view text);

  bool is_finite() const { return d_ != 0; }
  int value() const;
  /// (d - 2) / 2, or +inf for d = inf.
  double lambda() const;
  PolyFamily family() const;
  std::string to_string() const;

  friend bool operator==(const Dimension&, const Dimension&) = default;

 private:
  explicit Dimension(int d) : d_(d) {}
  int d_;  // 0 encodes infinity
};

}  // namespace isokernel
