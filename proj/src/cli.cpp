#include "isokernel/cli.hpp"

#include "isokernel/acceptance.hpp"
#include "isokernel/diagnostics.hpp"
#include "isokernel/nngp.hpp"
#include "isokernel/schoenberg.hpp"
#include "isokernel/serialization.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace isokernel::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v)) {
      throw std::invalid_argument(flag + ": cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

std::vector<Eigen::VectorXd> parse_points(const std::string& text) {
  std::vector<Eigen::VectorXd> pts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(';', pos), text.size());
    const auto v = parse_list(text.substr(pos, end - pos), "--points");
    pts.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    pos = end + 1;
  }
  return pts;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": malformed JSON (" + e.what() + ")");
  }
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << content) || !f.flush()) throw std::invalid_argument("cannot write '" + path + "'");
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string summary(const StrictPDReport& r) {
  std::ostringstream s;
  s << "dimension " << r.dim.to_string() << ", degrees 0.." << r.degree_cap << ", " << r.positive_radii.size()
    << " positive radii\n";
  s << "alpha_0(0,0) = " << g17(r.alpha0_at_origin) << " (tolerance " << g17(r.origin_tolerance) << ")\n";
  s << "  n  min_eig                  strict\n";
  for (const auto& d : r.per_degree) {
    char line[96];
    std::snprintf(line, sizeof line, "%3d  %-23.16g  %s\n", d.n, d.min_eigenvalue, d.strictly_pd ? "yes" : "no");
    s << line;
  }
  s << "parity tails (gamma: even, odd):\n";
  for (const auto& t : r.parity_tails) {
    s << "  " << t.gamma << ": " << g17(t.even_min_eigenvalue) << ", " << g17(t.odd_min_eigenvalue) << "\n";
  }
  if (r.d2_progressions) {
    s << "progressions (k, m: min_eig):\n";
    for (const auto& p : *r.d2_progressions) {
      s << "  " << p.modulus << ", " << p.residue << ": " << g17(p.min_eigenvalue) << "\n";
    }
  }
  s << "probes: " << r.probes.size() << "\n";
  s << "verdict: " << to_string(r.verdict) << "\n";
  for (const auto& v : r.violations) s << "  violated " << v.condition << ": " << v.witness << "\n";
  for (const auto& n : r.notes) s << "  note: " << n << "\n";
  return s.str();
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Isotropic positive definite kernels: expansions and diagnostics", "isokernel"};
  app.require_subcommand(1);

  std::string kernel_path, dim_text, radii_text, out_path, format = "json", table_path, points_text, spec_path,
      x_text, y_text;
  int n_max = 0, probes = 32, samples = 100000, k_max = 4;
  std::optional<int> quad_nodes, n_cap;
  std::uint64_t seed = 0;
  bool allow_high = false;

  auto* decompose_cmd = app.add_subcommand("decompose", "coefficient table of a kernel");
  decompose_cmd->add_option("--kernel", kernel_path, "kernel spec JSON")->required();
  decompose_cmd->add_option("--dim", dim_text, "dimension: integer >= 2 or inf")->required();
  decompose_cmd->add_option("--radii", radii_text, "comma-separated radii")->required();
  decompose_cmd->add_option("--n-max", n_max, "largest degree")->required();
  decompose_cmd->add_option("--out", out_path, "output file (default stdout)");
  decompose_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  decompose_cmd->add_option("--quad-nodes", quad_nodes, "Gauss-Gegenbauer nodes (finite d)");
  decompose_cmd->add_flag("--allow-high-degree", allow_high, "permit n-max above 60 for d = inf");

  auto* report_cmd = app.add_subcommand("report", "strict positive definiteness evidence from a table");
  report_cmd->add_option("--table", table_path, "table JSON or CSV")->required();
  report_cmd->add_option("--dim", dim_text, "dimension (needed for CSV tables)");
  report_cmd->add_option("--probes", probes, "probe vectors per subset size");
  report_cmd->add_option("--seed", seed, "probe seed");
  report_cmd->add_option("--n-cap", n_cap, "degree cap N");
  report_cmd->add_option("--k-max", k_max, "largest progression modulus (d = 2)");
  report_cmd->add_option("--out", out_path, "report JSON (summary goes to stdout)");

  auto* gram_cmd = app.add_subcommand("gram", "Gram matrix and positive definiteness check");
  gram_cmd->add_option("--kernel", kernel_path, "kernel spec JSON")->required();
  gram_cmd->add_option("--dim", dim_text, "dimension (default inf)");
  gram_cmd->add_option("--points", points_text, "points as x1,x2;y1,y2;...")->required();
  gram_cmd->add_option("--out", out_path, "output file (default stdout)");

  auto* sample_cmd = app.add_subcommand("sample", "Gaussian process draws at points");
  sample_cmd->add_option("--kernel", kernel_path, "kernel spec JSON")->required();
  sample_cmd->add_option("--dim", dim_text, "dimension (default inf)");
  sample_cmd->add_option("--points", points_text, "points as x1,x2;y1,y2;...")->required();
  sample_cmd->add_option("--samples", samples, "number of draws");
  sample_cmd->add_option("--seed", seed, "sampling seed");
  sample_cmd->add_option("--out", out_path, "output file (default stdout)");
  sample_cmd->add_option("--format", format, "json summary or csv draws")->check(CLI::IsMember({"json", "csv"}));

  auto* nngp_cmd = app.add_subcommand("nngp-eval", "evaluate an NNGP kernel");
  nngp_cmd->add_option("--spec", spec_path, "network spec JSON")->required();
  nngp_cmd->add_option("--x", x_text, "comma-separated x")->required();
  nngp_cmd->add_option("--y", y_text, "comma-separated y")->required();
  nngp_cmd->add_option("--out", out_path, "output file (default stdout)");

  auto* selftest_cmd = app.add_subcommand("selftest", "run the acceptance checks");
  selftest_cmd->add_option("--out", out_path, "results JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  auto dim_or = [&](Dimension fallback) { return dim_text.empty() ? fallback : Dimension::parse(dim_text); };

  try {
    if (*decompose_cmd) {
      const auto dim = Dimension::parse(dim_text);
      const auto kernel = kernel_from_json(read_json(kernel_path), dim);
      const auto radii = parse_list(radii_text, "--radii");
      DecomposeOptions opt;
      opt.quad_nodes = quad_nodes;
      opt.allow_high_degree = allow_high;
      const auto table = decompose(kernel, radii, n_max, opt);
      emit(format == "csv" ? table_to_csv(table) : dump(table_to_json(table)), out_path, out);
    } else if (*report_cmd) {
      const auto content = read_file(table_path);
      CoefficientTable table;
      if (content.rfind("n,r_i,r_j,alpha", 0) == 0) {
        if (dim_text.empty()) throw std::invalid_argument("--dim is required for CSV tables");
        table = table_from_csv(content, Dimension::parse(dim_text));
      } else {
        json doc;
        try {
          doc = json::parse(content);
        } catch (const json::parse_error& e) {
          throw std::invalid_argument(table_path + ": malformed JSON (" + e.what() + ")");
        }
        table = table_from_json(doc);
        if (!dim_text.empty() && !(Dimension::parse(dim_text) == table.dim)) {
          throw std::invalid_argument("--dim conflicts with the table's dim field");
        }
      }
      StrictPdOptions opt;
      opt.probes = probes;
      opt.degree_cap = n_cap;
      opt.k_max = k_max;
      opt.seed = seed;
      const auto report = strict_pd_evidence(table, opt);
      if (!out_path.empty()) emit(dump(report_to_json(report)), out_path, out);
      out << summary(report);
    } else if (*gram_cmd) {
      const auto kernel = kernel_from_json(read_json(kernel_path), dim_or(Dimension::infinite()));
      const auto g = gram(kernel, parse_points(points_text));
      const auto pd = check_pd(g);
      ordered_json doc;
      doc["kernel"] = kernel.name();
      doc["entries"] = matrix_json(g.entries);
      doc["min_eigenvalue"] = pd.min_eigenvalue;
      doc["psd"] = pd.psd;
      doc["strictly_pd_witness"] = pd.strictly_pd_witness;
      emit(dump(doc), out_path, out);
    } else if (*sample_cmd) {
      const auto kernel = kernel_from_json(read_json(kernel_path), dim_or(Dimension::infinite()));
      const auto res = sample_gp(kernel, parse_points(points_text), samples, seed);
      if (format == "csv") {
        std::string text;
        for (Eigen::Index i = 0; i < res.samples.rows(); ++i) {
          for (Eigen::Index j = 0; j < res.samples.cols(); ++j) text += (j ? "," : "") + g17(res.samples(i, j));
          text += "\n";
        }
        emit(text, out_path, out);
      } else {
        ordered_json doc;
        doc["kernel"] = kernel.name();
        doc["n_samples"] = samples;
        doc["seed"] = seed;
        doc["jitter"] = res.jitter;
        doc["gram"] = matrix_json(res.gram);
        doc["empirical_cov"] = matrix_json(res.empirical_cov);
        doc["max_deviation"] = res.max_deviation;
        doc["max_band_ratio"] = res.max_band_ratio;
        emit(dump(doc), out_path, out);
      }
    } else if (*nngp_cmd) {
      const auto spec = network_spec_from_json(read_json(spec_path));
      const auto x = parse_list(x_text, "--x"), y = parse_list(y_text, "--y");
      const double v = nngp_eval(spec, Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()),
                                 Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()));
      emit(g17(v) + "\n", out_path, out);
    } else if (*selftest_cmd) {
      const auto results = run_acceptance();
      ordered_json doc = ordered_json::array();
      bool ok = true;
      for (const auto& r : results) {
        out << format_result(r) << "\n";
        ok = ok && r.passed;
        doc.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
      }
      if (!out_path.empty()) emit(dump(doc), out_path, out);
      return ok ? 0 : 1;
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace isokernel::cli
