#include "isokernel/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    char tmpl[] = "/tmp/isokernel-cli-XXXXXX";
    dir = mkdtemp(tmpl);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& content) const { std::ofstream(dir / name) << content; }
  std::string read(const std::string& name) const {
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = isokernel::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("decompose, report and nngp-eval examples") {
  Sandbox box;
  box.write("gaussian.json", R"({"variant": "gaussian", "scale": 1.0})");
  box.write("net.json", R"({"depth": 1, "activation": "relu", "bias": true, "hermite_nodes": 40})");

  auto d = run({"decompose", "--kernel", box.path("gaussian.json"), "--dim", "3", "--radii", "0,0.5,1,2", "--n-max",
                "40", "--out", box.path("table.json")});
  REQUIRE(d.code == 0);
  const auto table = json::parse(box.read("table.json"));
  CHECK(table["dim"] == "3");
  CHECK(table["radii"].size() == 4);
  CHECK(table["n_max"] == 40);
  CHECK(table["values"].size() == 41);
  CHECK(table["values"][0].size() == 4);
  CHECK(table["values"][0][0].size() == 4);

  auto r = run({"report", "--table", box.path("table.json"), "--probes", "32", "--seed", "7", "--out",
                box.path("report.json")});
  REQUIRE(r.code == 0);
  const auto report = json::parse(box.read("report.json"));
  CHECK(report.contains("verdict"));
  CHECK(report["verdict"] == "consistent");
  CHECK(r.out.find("verdict: consistent") != std::string::npos);

  auto n = run({"nngp-eval", "--spec", box.path("net.json"), "--x", "1,0", "--y", "0,1"});
  CHECK(n.code == 0);
  CHECK(n.out == "1\n");
}

TEST_CASE("csv tables feed the report") {
  Sandbox box;
  box.write("lin.json", R"({"variant": "dot_product", "coeffs": [0, 1]})");
  REQUIRE(run({"decompose", "--kernel", box.path("lin.json"), "--dim", "inf", "--radii", "0,0.5,1,2", "--n-max", "20",
               "--format", "csv", "--out", box.path("t.csv")})
              .code == 0);
  CHECK(box.read("t.csv").rfind("n,r_i,r_j,alpha\n", 0) == 0);
  CHECK(run({"report", "--table", box.path("t.csv")}).code == 2);
  auto r = run({"report", "--table", box.path("t.csv"), "--dim", "inf", "--out", box.path("r.json")});
  CHECK(r.code == 0);
  CHECK(json::parse(box.read("r.json"))["verdict"] == "inconsistent");
}

TEST_CASE("gram and sample commands") {
  Sandbox box;
  box.write("k.json", R"({"variant": "dot_product", "coeffs": [0, 1]})");
  auto g = run({"gram", "--kernel", box.path("k.json"), "--points", "1,2;2,4"});
  REQUIRE(g.code == 0);
  const auto doc = json::parse(g.out);
  CHECK(doc["entries"][1][1] == 20.0);
  CHECK(doc["psd"] == true);
  CHECK(doc["strictly_pd_witness"] == false);

  box.write("g.json", R"({"variant": "gaussian"})");
  auto s = run({"sample", "--kernel", box.path("g.json"), "--dim", "2", "--points", "0,0;1,0;0,1", "--samples",
                "20000", "--seed", "3"});
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out)["max_band_ratio"].get<double>() <= 5.0);
  auto csv = run({"sample", "--kernel", box.path("g.json"), "--dim", "2", "--points", "0,0;1,0", "--samples", "5",
                  "--format", "csv"});
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 5);
}

TEST_CASE("exit codes") {
  Sandbox box;
  box.write("bad.json", R"({"variant": "gaussian_mixture", "atoms": [{"mass": 1}]})");
  auto bad = run({"decompose", "--kernel", box.path("bad.json"), "--dim", "3", "--radii", "1", "--n-max", "4"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("$.atoms[0].scale") != std::string::npos);

  box.write("broken.json", "{not json");
  CHECK(run({"decompose", "--kernel", box.path("broken.json"), "--dim", "3", "--radii", "1", "--n-max", "4"}).code ==
        2);
  CHECK(run({"decompose", "--kernel", box.path("missing.json"), "--dim", "3", "--radii", "1", "--n-max", "4"}).code ==
        2);
  box.write("g.json", R"({"variant": "gaussian"})");
  CHECK(run({"decompose", "--kernel", box.path("g.json"), "--dim", "1", "--radii", "1", "--n-max", "4"}).code == 2);
  CHECK(run({"decompose", "--kernel", box.path("g.json"), "--dim", "3", "--radii", "1,x", "--n-max", "4"}).code == 2);
  CHECK(run({"decompose", "--kernel", box.path("g.json"), "--dim", "3", "--radii", "1", "--n-max", "4", "--format",
             "xml"})
            .code == 2);
  CHECK(run({"decompose", "--kernel", box.path("g.json"), "--dim", "inf", "--radii", "1", "--n-max", "80"}).code == 2);
  CHECK(run({"decompose", "--kernel", box.path("g.json"), "--dim", "3", "--n-max", "4"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);

  box.write("table.json", R"({"variant": "from_table", "table": {"dim": "3", "radii": [0.5, 1.0], "n_max": 0,
                              "values": [[[1, 2], [2, 1]]]}})");
  auto numeric = run({"sample", "--kernel", box.path("table.json"), "--dim", "3", "--points", "0.5,0,0;0,1,0"});
  CHECK(numeric.code == 1);

  auto table = run({"decompose", "--kernel", box.path("g.json"), "--dim", "3", "--radii", "0,1,2", "--n-max", "6",
                    "--out", box.path("t3.json")});
  REQUIRE(table.code == 0);
  CHECK(run({"report", "--table", box.path("t3.json"), "--dim", "4"}).code == 2);
}

TEST_CASE("outputs are byte-identical across runs") {
  Sandbox box;
  box.write("k.json", R"({"variant": "nngp", "network": {"depth": 3, "bias": false}})");
  for (const char* tag : {"a", "b"}) {
    const std::string t = tag;
    REQUIRE(run({"decompose", "--kernel", box.path("k.json"), "--dim", "inf", "--radii", "0,0.5,1,2", "--n-max",
                 "30", "--out", box.path("t" + t + ".json")})
                .code == 0);
    REQUIRE(run({"report", "--table", box.path("t" + t + ".json"), "--seed", "7", "--out",
                 box.path("r" + t + ".json")})
                .code == 0);
  }
  CHECK(box.read("ta.json") == box.read("tb.json"));
  CHECK(box.read("ra.json") == box.read("rb.json"));
  CHECK_FALSE(box.read("ta.json").empty());
}

#ifdef ISOKERNEL_TOOL
TEST_CASE("selftest runs twice in separate processes with identical artifacts") {
  Sandbox box;
  const std::string tool = ISOKERNEL_TOOL;
  const std::string a = box.path("a.json"), b = box.path("b.json");
  const int ca = std::system((tool + " selftest --out " + a + " > " + box.path("a.txt")).c_str());
  const int cb = std::system((tool + " selftest --out " + b + " > " + box.path("b.txt")).c_str());
  CHECK(ca == 0);
  CHECK(cb == 0);
  CHECK(box.read("a.json") == box.read("b.json"));
  CHECK(box.read("a.txt") == box.read("b.txt"));
  CHECK(json::parse(box.read("a.json")).size() == 11);
}
#endif
