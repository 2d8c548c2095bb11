#pragma once

#include "isokernel/diagnostics.hpp"
#include "isokernel/kernel.hpp"
#include "isokernel/nngp.hpp"
#include "isokernel/schoenberg.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace isokernel {

/// Malformed input document; the message starts with the offending field path.
class SpecError : public std::invalid_argument {
 public:
  SpecError(const std::string& path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// {"dim": "3" | "inf", "radii": [...], "n_max": N, "values": [n][i][j]}
nlohmann::ordered_json table_to_json(const CoefficientTable& table);
CoefficientTable table_from_json(const nlohmann::json& doc);

/// Long form with header n,r_i,r_j,alpha: one row per n and pair i >= j.
std::string table_to_csv(const CoefficientTable& table);
CoefficientTable table_from_csv(std::string_view text, Dimension dim);

nlohmann::ordered_json report_to_json(const StrictPDReport& report);

/// {"depth": L, "activation": "relu" | "erf", "bias": bool, "hermite_nodes": k,
///  "f_phi": "auto" | "quadrature"}; everything but depth is optional.
NetworkSpec network_spec_from_json(const nlohmann::json& doc, const std::string& path = "$");
nlohmann::ordered_json network_spec_to_json(const NetworkSpec& spec);

/// Kernel from a spec document {"variant": ..., parameters}, tagged with
/// `dim` ("type" is accepted for "variant"). Variants: gaussian (scale,
/// mass), gaussian_mixture (atoms), dot_product (coeffs), constant (value),
/// arccos, arcsin, nngp (network), from_table (table), sum / product
/// (terms), scale (factor, kernel).
IsotropicKernel kernel_from_json(const nlohmann::json& doc, Dimension dim, const std::string& path = "$");

/// Two-space indented dump with a trailing newline.
std::string dump(const nlohmann::ordered_json& doc);

}  // namespace isokernel
