#include "isokernel/serialization.hpp"

#include "isokernel/builtins.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace isokernel {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const json& field(const json& doc, const std::string& path, const char* key) {
  if (!doc.is_object()) throw SpecError(path, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) throw SpecError(path + "." + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SpecError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SpecError(path, "expected a finite number");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SpecError(path, "expected an integer");
  return v.get<int>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw SpecError(path, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw SpecError(path, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SpecError(path, "expected an array");
  return v;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Dimension dimension(const json& v, const std::string& path) {
  try {
    if (v.is_number_integer()) return Dimension::finite(v.get<int>());
    return Dimension::parse(text(v, path));
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    throw SpecError(path, e.what());
  }
}

template <typename F>
auto rethrow_at(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const SpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpecError(path, e.what());
  } catch (const std::domain_error& e) {
    throw SpecError(path, e.what());
  }
}

ordered_json finite_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

}  // namespace

ordered_json table_to_json(const CoefficientTable& table) {
  ordered_json doc;
  doc["dim"] = table.dim.to_string();
  doc["radii"] = table.radii;
  doc["n_max"] = table.n_max;
  ordered_json values = ordered_json::array();
  for (const auto& m : table.values) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    values.push_back(std::move(rows));
  }
  doc["values"] = std::move(values);
  return doc;
}

CoefficientTable table_from_json(const json& doc) {
  CoefficientTable t;
  t.dim = dimension(field(doc, "$", "dim"), "$.dim");
  t.radii = numbers(field(doc, "$", "radii"), "$.radii");
  t.n_max = integer(field(doc, "$", "n_max"), "$.n_max");
  const auto& values = array(field(doc, "$", "values"), "$.values");
  const auto m = t.num_radii();
  if (values.size() != static_cast<std::size_t>(t.n_max) + 1) {
    throw SpecError("$.values", "expected n_max + 1 degree matrices");
  }
  for (std::size_t n = 0; n < values.size(); ++n) {
    const std::string pn = "$.values[" + std::to_string(n) + "]";
    const auto& rows = array(values[n], pn);
    if (rows.size() != static_cast<std::size_t>(m)) throw SpecError(pn, "expected one row per radius");
    Eigen::MatrixXd a(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::string pi = pn + "[" + std::to_string(i) + "]";
      const auto row = numbers(rows[i], pi);
      if (row.size() != static_cast<std::size_t>(m)) throw SpecError(pi, "expected one entry per radius");
      for (Eigen::Index j = 0; j < m; ++j) a(i, j) = row[j];
    }
    t.values.push_back(std::move(a));
  }
  rethrow_at("$", [&] {
    t.validate();
    return 0;
  });
  return t;
}

std::string table_to_csv(const CoefficientTable& table) {
  std::string out = "n,r_i,r_j,alpha\n";
  char line[128];
  for (int n = 0; n <= table.n_max; ++n) {
    for (Eigen::Index i = 0; i < table.num_radii(); ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g\n", n, table.radii[i], table.radii[j],
                      table.values[n](i, j));
        out += line;
      }
    }
  }
  return out;
}

CoefficientTable table_from_csv(std::string_view content, Dimension dim) {
  std::istringstream in{std::string(content)};
  std::string line;
  if (!std::getline(in, line) || line != "n,r_i,r_j,alpha") throw SpecError("line 1", "expected header n,r_i,r_j,alpha");
  struct Row {
    int n;
    double ri, rj, alpha;
  };
  std::vector<Row> rows;
  std::vector<double> radii;
  for (int ln = 2; std::getline(in, line); ++ln) {
    if (line.empty()) continue;
    Row r{};
    char tail = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf%c", &r.n, &r.ri, &r.rj, &r.alpha, &tail) != 4) {
      throw SpecError("line " + std::to_string(ln), "expected n,r_i,r_j,alpha");
    }
    rows.push_back(r);
    if (std::find(radii.begin(), radii.end(), r.ri) == radii.end()) radii.push_back(r.ri);
  }
  if (rows.empty()) throw SpecError("line 2", "no data rows");
  std::sort(radii.begin(), radii.end());
  CoefficientTable t;
  t.dim = dim;
  t.radii = radii;
  t.n_max = 0;
  for (const auto& r : rows) t.n_max = std::max(t.n_max, r.n);
  const auto m = t.num_radii();
  std::vector<Eigen::MatrixXd> values(t.n_max + 1, Eigen::MatrixXd::Constant(m, m, std::nan("")));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const auto i = std::lower_bound(radii.begin(), radii.end(), r.ri) - radii.begin();
    const auto pj = std::lower_bound(radii.begin(), radii.end(), r.rj);
    if (r.n < 0 || pj == radii.end() || *pj != r.rj) throw SpecError("line " + std::to_string(k + 2), "unknown radius or degree");
    const auto j = pj - radii.begin();
    values[r.n](i, j) = values[r.n](j, i) = r.alpha;
  }
  for (int n = 0; n <= t.n_max; ++n) {
    if (!values[n].allFinite()) throw SpecError("degree " + std::to_string(n), "missing entries");
  }
  t.values = std::move(values);
  rethrow_at("$", [&] {
    t.validate();
    return 0;
  });
  return t;
}

ordered_json report_to_json(const StrictPDReport& r) {
  ordered_json doc;
  doc["dim"] = r.dim.to_string();
  doc["degree_cap"] = r.degree_cap;
  doc["positive_radii"] = r.positive_radii;
  doc["alpha0_at_origin"] = r.alpha0_at_origin;
  doc["origin_tolerance"] = r.origin_tolerance;
  ordered_json per = ordered_json::array();
  for (const auto& d : r.per_degree) {
    per.push_back({{"n", d.n}, {"min_eigenvalue", finite_or_null(d.min_eigenvalue)}, {"strictly_pd", d.strictly_pd}});
  }
  doc["per_degree"] = std::move(per);
  ordered_json tails = ordered_json::array();
  for (const auto& t : r.parity_tails) {
    tails.push_back({{"gamma", t.gamma},
                     {"even_min_eigenvalue", finite_or_null(t.even_min_eigenvalue)},
                     {"odd_min_eigenvalue", finite_or_null(t.odd_min_eigenvalue)}});
  }
  doc["parity_tails"] = std::move(tails);
  ordered_json probes = ordered_json::array();
  for (const auto& p : r.probes) {
    probes.push_back({{"radius_indices", p.radius_indices},
                      {"c", p.c},
                      {"hits", p.hits},
                      {"even_hits", p.even_hits},
                      {"odd_hits", p.odd_hits},
                      {"even_hits_upper", p.even_hits_upper},
                      {"odd_hits_upper", p.odd_hits_upper}});
  }
  doc["random_c_probe"] = std::move(probes);
  if (r.d2_progressions) {
    ordered_json progs = ordered_json::array();
    for (const auto& p : *r.d2_progressions) {
      progs.push_back({{"modulus", p.modulus},
                       {"residue", p.residue},
                       {"min_eigenvalue", finite_or_null(p.min_eigenvalue)},
                       {"trace", p.trace}});
    }
    doc["d2_progressions"] = std::move(progs);
  } else {
    doc["d2_progressions"] = nullptr;
  }
  doc["sufficient_condition_established"] = r.sufficient_condition_established;
  doc["verdict"] = to_string(r.verdict);
  ordered_json viol = ordered_json::array();
  for (const auto& v : r.violations) viol.push_back({{"condition", v.condition}, {"witness", v.witness}});
  doc["violations"] = std::move(viol);
  doc["notes"] = r.notes;
  return doc;
}

NetworkSpec network_spec_from_json(const json& doc, const std::string& path) {
  NetworkSpec spec;
  if (!doc.is_object()) throw SpecError(path, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string p = path + "." + key;
    if (key == "depth") {
      spec.depth = integer(value, p);
      if (spec.depth < 1) throw SpecError(p, "depth must be >= 1");
    } else if (key == "activation") {
      const auto a = text(value, p);
      if (a == "relu") {
        spec.activation = Activation::relu;
      } else if (a == "erf") {
        spec.activation = Activation::erf;
      } else {
        throw SpecError(p, "unknown activation '" + a + "' (expected relu or erf)");
      }
    } else if (key == "bias") {
      spec.bias = boolean(value, p);
    } else if (key == "hermite_nodes") {
      spec.hermite_nodes = integer(value, p);
      if (spec.hermite_nodes < 8) throw SpecError(p, "hermite_nodes must be >= 8");
    } else if (key == "f_phi") {
      const auto m = text(value, p);
      if (m == "auto") {
        spec.method = FPhiMethod::automatic;
      } else if (m == "quadrature") {
        spec.method = FPhiMethod::quadrature;
      } else {
        throw SpecError(p, "expected auto or quadrature");
      }
    } else if (key != "type" && key != "variant") {
      throw SpecError(p, "unknown field");
    }
  }
  field(doc, path, "depth");
  return spec;
}

ordered_json network_spec_to_json(const NetworkSpec& spec) {
  return {{"depth", spec.depth},
          {"activation", to_string(spec.activation)},
          {"bias", spec.bias},
          {"hermite_nodes", spec.hermite_nodes},
          {"f_phi", spec.method == FPhiMethod::automatic ? "auto" : "quadrature"}};
}

IsotropicKernel kernel_from_json(const json& doc, Dimension dim, const std::string& path) {
  if (!doc.is_object()) throw SpecError(path, "expected an object");
  const char* tag = doc.contains("variant") ? "variant" : "type";
  const auto type = text(field(doc, path, tag), path + "." + tag);
  auto at = [&](const char* key) { return path + "." + key; };
  auto atoms_of = [&](const json& list, const std::string& p) {
    SchoenbergMeasure mu;
    for (std::size_t i = 0; i < array(list, p).size(); ++i) {
      const std::string pi = p + "[" + std::to_string(i) + "]";
      SchoenbergAtom a;
      a.scale = number(field(list[i], pi, "scale"), pi + ".scale");
      if (list[i].contains("mass")) a.mass = number(list[i]["mass"], pi + ".mass");
      mu.atoms.push_back(a);
    }
    return mu;
  };

  if (type == "gaussian") {
    SchoenbergAtom a;
    if (doc.contains("scale")) a.scale = number(doc["scale"], at("scale"));
    if (doc.contains("mass")) a.mass = number(doc["mass"], at("mass"));
    return rethrow_at(path, [&] { return gaussian_mixture(SchoenbergMeasure{{a}}, dim); });
  }
  if (type == "gaussian_mixture") {
    const auto mu = atoms_of(field(doc, path, "atoms"), at("atoms"));
    return rethrow_at(at("atoms"), [&] { return gaussian_mixture(mu, dim); });
  }
  if (type == "dot_product") {
    const auto c = numbers(field(doc, path, "coeffs"), at("coeffs"));
    return rethrow_at(at("coeffs"), [&] { return dot_product(c, dim); });
  }
  if (type == "constant") {
    const double c = number(field(doc, path, "value"), at("value"));
    return rethrow_at(at("value"), [&] { return constant_kernel(c, dim); });
  }
  if (type == "arccos") return arccos_kernel(dim);
  if (type == "arcsin") return arcsin_kernel(dim);
  if (type == "nngp") {
    const auto spec = doc.contains("network") ? network_spec_from_json(doc["network"], at("network"))
                                              : network_spec_from_json(doc, path);
    return nngp_as_kernel(spec, dim);
  }
  if (type == "from_table" || type == "table") {
    CoefficientTable t;
    try {
      t = table_from_json(field(doc, path, "table"));
    } catch (const SpecError& e) {
      throw SpecError(at("table"), e.what());
    }
    if (!(t.dim == dim)) throw SpecError(at("table.dim"), "table dimension differs from --dim");
    return reconstruct(t);
  }
  if (type == "sum" || type == "product") {
    const auto& terms = array(field(doc, path, "terms"), at("terms"));
    if (terms.empty()) throw SpecError(at("terms"), "need at least one term");
    auto k = kernel_from_json(terms[0], dim, at("terms") + "[0]");
    for (std::size_t i = 1; i < terms.size(); ++i) {
      auto next = kernel_from_json(terms[i], dim, at("terms") + "[" + std::to_string(i) + "]");
      k = type == "sum" ? sum(k, next) : product(k, next);
    }
    return k;
  }
  if (type == "scale") {
    const double f = number(field(doc, path, "factor"), at("factor"));
    auto inner = kernel_from_json(field(doc, path, "kernel"), dim, at("kernel"));
    return rethrow_at(at("factor"), [&] { return scale(inner, f); });
  }
  throw SpecError(path + "." + tag, "unknown kernel variant '" + type + "'");
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace isokernel
