#include "isokernel/builtins.hpp"
#include "isokernel/serialization.hpp"

#include <doctest.h>

#include <cmath>

using namespace isokernel;
using nlohmann::json;

namespace {

CoefficientTable sample_table(Dimension dim) {
  return decompose(gaussian_mixture({{{1.0, 0.6}, {0.3, 0.4}}}, dim), std::vector<double>{0.0, 0.1, 0.7, 1.9}, 12);
}

std::string error_of(const json& doc, Dimension dim = Dimension::finite(3)) {
  try {
    kernel_from_json(doc, dim);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("table JSON round-trips bit-exactly") {
  for (auto dim : {Dimension::finite(2), Dimension::finite(3), Dimension::infinite()}) {
    const auto t = sample_table(dim);
    const auto text = dump(table_to_json(t));
    const auto back = table_from_json(json::parse(text));
    CHECK(back.dim == t.dim);
    CHECK(back.radii == t.radii);
    CHECK(back.n_max == t.n_max);
    for (int n = 0; n <= t.n_max; ++n) CHECK(back.values[n] == t.values[n]);
    CHECK(dump(table_to_json(back)) == text);
  }
  const auto doc = table_to_json(sample_table(Dimension::infinite()));
  CHECK(doc["dim"] == "inf");
  CHECK(doc.begin().key() == "dim");
  CHECK(table_to_json(sample_table(Dimension::finite(3)))["dim"] == "3");
}

TEST_CASE("table CSV long form") {
  const auto t = sample_table(Dimension::finite(3));
  const auto csv = table_to_csv(t);
  CHECK(csv.rfind("n,r_i,r_j,alpha\n", 0) == 0);
  const auto rows = std::count(csv.begin(), csv.end(), '\n') - 1;
  CHECK(rows == 13 * 10);
  CHECK(csv.find("\n0,0,0,") != std::string::npos);
  CHECK(csv.find("\n0,0.10000000000000001,0,") != std::string::npos);
  const auto back = table_from_csv(csv, Dimension::finite(3));
  for (int n = 0; n <= t.n_max; ++n) CHECK(back.values[n] == t.values[n]);
  CHECK(table_to_csv(back) == csv);
  CHECK_THROWS_AS(table_from_csv("n,r,alpha\n", Dimension::finite(3)), SpecError);
  CHECK_THROWS_AS(table_from_csv("n,r_i,r_j,alpha\n0,1,1,x\n", Dimension::finite(3)), SpecError);
  CHECK_THROWS_AS(table_from_csv("n,r_i,r_j,alpha\n0,1,1,1\n0,2,2,1\n", Dimension::finite(3)), SpecError);
}

TEST_CASE("malformed tables name the field") {
  auto doc = json::parse(dump(table_to_json(sample_table(Dimension::finite(3)))));
  auto missing = doc;
  missing.erase("radii");
  CHECK_THROWS_WITH_AS(table_from_json(missing), "$.radii: missing field", SpecError);
  auto wrong = doc;
  wrong["values"][3][1][2] = "x";
  CHECK_THROWS_WITH_AS(table_from_json(wrong), "$.values[3][1][2]: expected a number", SpecError);
  auto asym = doc;
  asym["values"][2][1][2] = 5.0;
  CHECK_THROWS_AS(table_from_json(asym), SpecError);
  auto badim = doc;
  badim["dim"] = "1";
  CHECK_THROWS_AS(table_from_json(badim), SpecError);
}

TEST_CASE("network spec JSON") {
  const auto s = network_spec_from_json(json::parse(R"({"depth": 3, "activation": "erf", "bias": false,
                                                        "hermite_nodes": 24, "f_phi": "quadrature"})"));
  CHECK(s.depth == 3);
  CHECK(s.activation == Activation::erf);
  CHECK_FALSE(s.bias);
  CHECK(s.hermite_nodes == 24);
  CHECK(s.method == FPhiMethod::quadrature);
  const auto back = network_spec_from_json(json::parse(network_spec_to_json(s).dump()));
  CHECK(network_spec_to_json(back) == network_spec_to_json(s));
  const auto dflt = network_spec_from_json(json::parse(R"({"depth": 1})"));
  CHECK(dflt.activation == Activation::relu);
  CHECK(dflt.bias);
  CHECK(dflt.hermite_nodes == 40);
  CHECK_THROWS_WITH_AS(network_spec_from_json(json::parse(R"({"depth": 0})")), "$.depth: depth must be >= 1",
                       SpecError);
  CHECK_THROWS_WITH_AS(network_spec_from_json(json::parse(R"({"depth": 2, "hermite_nodes": 4})")),
                       "$.hermite_nodes: hermite_nodes must be >= 8", SpecError);
  CHECK_THROWS_WITH_AS(network_spec_from_json(json::parse(R"({"depth": 2, "activation": "tanh"})")),
                       doctest::Contains("$.activation"), SpecError);
  CHECK_THROWS_WITH_AS(network_spec_from_json(json::parse(R"({"activation": "relu"})")), "$.depth: missing field",
                       SpecError);
  CHECK_THROWS_WITH_AS(network_spec_from_json(json::parse(R"({"depth": 2, "width": 3})")), "$.width: unknown field",
                       SpecError);
}

TEST_CASE("kernel specs") {
  const auto dim = Dimension::finite(3);
  const auto g = kernel_from_json(json::parse(R"({"variant": "gaussian_mixture",
                                                  "atoms": [{"scale": 1.0, "mass": 0.5}, {"scale": 2.0}]})"),
                                  dim);
  CHECK(g(1.0, 1.0, -1.0) == doctest::Approx(0.5 * std::exp(-2.0) + std::exp(-8.0)));
  CHECK(kernel_from_json(json::parse(R"({"type": "gaussian"})"), dim)(1.0, 1.0, 1.0) == doctest::Approx(1.0));
  const auto sum = kernel_from_json(
      json::parse(R"({"variant": "sum", "terms": [{"variant": "arccos"},
                     {"variant": "scale", "factor": 2, "kernel": {"variant": "constant", "value": 1.5}}]})"),
      dim);
  CHECK(sum(1.0, 1.0, 1.0) == doctest::Approx(4.0));
  const auto prod = kernel_from_json(
      json::parse(R"({"variant": "product", "terms": [{"variant": "dot_product", "coeffs": [0, 1]},
                     {"variant": "dot_product", "coeffs": [0, 1]}]})"),
      dim);
  CHECK(prod(1.0, 0.5, 0.5) == doctest::Approx(0.25));
  const auto net = kernel_from_json(json::parse(R"({"variant": "nngp", "network": {"depth": 2}})"), dim);
  CHECK(net(0.0, 0.0, 0.0) == doctest::Approx(1.5));
  const auto inline_net = kernel_from_json(json::parse(R"({"variant": "nngp", "depth": 2, "bias": false})"), dim);
  CHECK(inline_net(1.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(kernel_from_json(json::parse(R"({"variant": "arcsin"})"), dim).dim() == dim);

  const auto t = sample_table(dim);
  json tab{{"variant", "from_table"}, {"table", json::parse(dump(table_to_json(t)))}};
  const auto rec = kernel_from_json(tab, dim);
  CHECK(rec(0.7, 1.9, 0.2) == doctest::Approx(reconstruct(t)(0.7, 1.9, 0.2)));
  CHECK(error_of(tab, Dimension::finite(4)).find("$.table.dim") == 0);
}

TEST_CASE("kernel spec errors name the field") {
  CHECK(error_of(json::parse(R"({"variant": "gaussian_mixture", "atoms": [{"scale": 1}, {"mass": 1}]})")) ==
        "$.atoms[1].scale: missing field");
  CHECK(error_of(json::parse(R"({"variant": "dot_product", "coeffs": [1, -2]})")).find("$.coeffs") == 0);
  CHECK(error_of(json::parse(R"({"variant": "scale", "factor": -1, "kernel": {"variant": "arccos"}})"))
            .find("$.factor") == 0);
  CHECK(error_of(json::parse(R"({"variant": "sum", "terms": [{"variant": "arccos"}, {"variant": "foo"}]})")) ==
        "$.terms[1].variant: unknown kernel variant 'foo'");
  CHECK(error_of(json::parse(R"({"kind": "arccos"})")) == "$.type: missing field");
  CHECK(error_of(json::parse(R"([1, 2])")) == "$: expected an object");
  CHECK(error_of(json::parse(R"({"variant": "constant", "value": "3"})")) == "$.value: expected a number");
}

TEST_CASE("numbers survive dump and parse") {
  for (double x : {0.1, 1.0 / 3.0, 5e-324, 1.7976931348623157e308, -2.5e-17}) {
    nlohmann::ordered_json doc{{"x", x}};
    CHECK(json::parse(dump(doc))["x"].get<double>() == x);
  }
}
