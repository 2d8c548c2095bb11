#include "isokernel/acceptance.hpp"

#include "isokernel/builtins.hpp"
#include "isokernel/cli.hpp"
#include "isokernel/diagnostics.hpp"
#include "isokernel/nngp.hpp"
#include "isokernel/orthopoly.hpp"
#include "isokernel/quadrature.hpp"
#include "isokernel/schoenberg.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace isokernel {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

struct Named {
  std::string label;
  IsotropicKernel kernel;
};

const SchoenbergMeasure kTwoAtoms{{{0.5, 0.3}, {1.5, 0.7}}};

NetworkSpec relu_net(int depth, bool bias) {
  NetworkSpec s;
  s.depth = depth;
  s.bias = bias;
  return s;
}

std::vector<Named> builtins(Dimension dim) {
  NetworkSpec erf2;
  erf2.depth = 2;
  erf2.activation = Activation::erf;
  return {
      {"gaussian", gaussian_mixture(SchoenbergMeasure::dirac(1.0), dim)},
      {"gaussian_two_atoms", gaussian_mixture(kTwoAtoms, dim)},
      {"dot_product", dot_product({1.0, 0.5, 0.25, 0.125}, dim)},
      {"constant", constant_kernel(2.0, dim)},
      {"arccos", arccos_kernel(dim)},
      {"arcsin", arcsin_kernel(dim)},
      {"nngp_relu_L2", nngp_as_kernel(relu_net(2, true), dim)},
      {"nngp_relu_L3", nngp_as_kernel(relu_net(3, true), dim)},
      {"nngp_relu_L2_nobias", nngp_as_kernel(relu_net(2, false), dim)},
      {"nngp_relu_L3_nobias", nngp_as_kernel(relu_net(3, false), dim)},
      {"nngp_erf_L2", nngp_as_kernel(erf2, dim)},
  };
}

CriterionResult orthogonality() {
  CriterionResult r{1, "Gegenbauer orthogonality and norms", true, ""};
  double worst = 0.0;
  for (int d : {2, 3, 6}) {
    const auto dim = Dimension::finite(d);
    const auto rule = gauss_gegenbauer(dim.lambda(), 32);
    std::vector<std::vector<double>> p;
    for (Eigen::Index k = 0; k < rule.size(); ++k) p.push_back(normalized_gegenbauer_all(dim, 30, rule.nodes[k]));
    for (int m = 0; m <= 30; ++m) {
      for (int n = 0; n < m; ++n) {
        double ip = 0.0;
        for (Eigen::Index k = 0; k < rule.size(); ++k) ip += rule.weights[k] * p[k][m] * p[k][n];
        worst = std::max(worst, std::abs(ip));
      }
    }
  }
  const double e0 = std::abs(weighted_norm_sq(Dimension::finite(3), 0) - 2.0);
  const double e1 = std::abs(weighted_norm_sq(Dimension::finite(3), 1) - 2.0 / 3.0);
  const double e2 = std::abs(weighted_norm_sq(Dimension::finite(2), 2) - std::numbers::pi / 2.0);
  const double norm_err = std::max({e0, e1, e2});
  r.passed = worst < 1e-10 && norm_err <= 1e-11;
  r.detail = "max |<P_m,P_n>| = " + sci(worst) + ", norm error = " + sci(norm_err);
  return r;
}

CriterionResult round_trip() {
  CriterionResult r{2, "representation round trip", false, ""};
  const auto k = gaussian_mixture(SchoenbergMeasure::dirac(1.0), Dimension::finite(3));
  const std::vector<double> radii{0.0, 0.5, 1.0, 2.0};
  const double res = residual(k, decompose(k, radii, 40), 101);
  r.passed = res <= 1e-8;
  r.detail = "residual = " + sci(res);
  return r;
}

CriterionResult closed_form() {
  CriterionResult r{3, "l2 coefficients vs closed form", false, ""};
  const std::vector<double> radii{0.0, 0.25, 0.5, 1.0, 1.5, 2.0};
  double worst = 0.0;
  for (const auto& mu : {SchoenbergMeasure::dirac(1.0), kTwoAtoms}) {
    const auto t = decompose(gaussian_mixture(mu), radii, 30);
    for (int n = 0; n <= 30; ++n) {
      for (std::size_t i = 0; i < radii.size(); ++i) {
        for (std::size_t j = 0; j < radii.size(); ++j) {
          worst = std::max(worst, std::abs(t(n, i, j) - gaussian_alpha_analytic(mu, n, radii[i], radii[j])));
        }
      }
    }
  }
  r.passed = worst <= 1e-10;
  r.detail = "max entry error = " + sci(worst);
  return r;
}

CriterionResult zero_at_origin() {
  CriterionResult r{4, "zero at the origin", false, ""};
  const std::vector<double> radii{0.0, 0.5, 1.0, 2.0};
  double worst = 0.0;
  int tables = 0;
  for (auto dim : {Dimension::finite(2), Dimension::finite(3), Dimension::infinite()}) {
    for (const auto& b : builtins(dim)) {
      const auto t = decompose(b.kernel, radii, 20);
      ++tables;
      for (int n = 1; n <= t.n_max; ++n) {
        for (Eigen::Index i = 0; i < t.num_radii(); ++i) worst = std::max(worst, std::abs(t(n, i, 0)));
      }
    }
  }
  r.passed = worst <= 1e-10;
  r.detail = std::to_string(tables) + " tables, max |alpha_n(r,0)| = " + sci(worst);
  return r;
}

CriterionResult coefficient_psd() {
  CriterionResult r{5, "coefficient positive definiteness", true, ""};
  const std::vector<double> radii{0.25, 0.5, 1.0, 1.5, 2.0};
  double worst = 0.0;
  for (auto dim : {Dimension::finite(3), Dimension::infinite()}) {
    for (const auto& b : builtins(dim)) {
      const auto t = decompose(b.kernel, radii, 20);
      const double trace = t.total_trace();
      for (int n = 0; n <= t.n_max; ++n) {
        const double lo = min_eigenvalue(t.values[n]);
        worst = std::max(worst, -lo / trace);
        if (lo < -1e-9 * trace) {
          r.passed = false;
          r.detail += b.label + "@d=" + dim.to_string() + " n=" + std::to_string(n) + "; ";
        }
      }
    }
  }
  r.detail += "worst -min_eig/trace = " + sci(worst);
  return r;
}

CriterionResult isotropy() {
  CriterionResult r{6, "isotropy", true, ""};
  double worst = 0.0;
  for (auto dim : {Dimension::finite(3), Dimension::infinite()}) {
    for (const auto& b : builtins(dim)) {
      const double dev = check_isotropy(b.kernel, 100, 11);
      worst = std::max(worst, dev);
      if (dev > 1e-12) {
        r.passed = false;
        r.detail += b.label + "@d=" + dim.to_string() + " " + sci(dev) + "; ";
      }
    }
  }
  const PointKernel broken = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return std::exp(-0.5 * (x - y).squaredNorm()) + x[0] * y[0];
  };
  const double control = check_isotropy(broken, 3, 100, 11);
  r.passed = r.passed && control > 0.01;
  r.detail += "builtins max = " + sci(worst) + ", broken control = " + sci(control);
  return r;
}

CriterionResult strict_pd_logic() {
  CriterionResult r{7, "strict positive definiteness logic", false, ""};
  const std::vector<double> radii{0.0, 0.5, 1.0, 2.0};
  StrictPdOptions opt;
  opt.degree_cap = 40;

  const auto linear = dot_product({0.0, 1.0}, Dimension::infinite());
  const auto lin = strict_pd_evidence(decompose(linear, radii, 40), opt);
  const bool even_witness = std::any_of(lin.violations.begin(), lin.violations.end(),
                                        [](const Violation& v) { return v.condition == "probe_even_degrees"; });
  const bool every_probe_empty = std::all_of(lin.probes.begin(), lin.probes.end(),
                                             [](const ProbeResult& p) { return p.even_hits == 0; });
  Eigen::VectorXd x(3);
  x << 0.3, -1.2, 0.7;
  const auto g = gram(linear, {x, 2.0 * x}).entries;
  const double sing = std::abs(min_eigenvalue(g)) / g.trace();
  const bool lin_ok = lin.verdict == Verdict::inconsistent && even_witness && every_probe_empty && sing <= 1e-12;

  const auto gauss = strict_pd_evidence(decompose(gaussian_mixture(SchoenbergMeasure::dirac(1.0)), radii, 40), opt);
  const bool all_hit = std::all_of(gauss.probes.begin(), gauss.probes.end(), [](const ProbeResult& p) {
    return p.even_hits_upper > 0 && p.odd_hits_upper > 0;
  });
  const bool gauss_ok = gauss.verdict == Verdict::consistent && all_hit && !gauss.probes.empty();

  CoefficientTable syn;
  syn.dim = Dimension::finite(2);
  syn.radii = radii;
  syn.n_max = 40;
  for (int n = 0; n <= 40; ++n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    if (n % 3 == 0) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const double ri = radii[i], rj = radii[j];
          a(i, j) = std::exp(-(ri - rj) * (ri - rj)) * std::pow(ri * rj, n) / std::tgamma(n + 1.0);
        }
      }
    }
    syn.values.push_back(a);
  }
  opt.k_max = 4;
  const auto prog = strict_pd_evidence(syn, opt);
  bool flagged_3z1 = false;
  for (const auto& v : prog.violations) {
    flagged_3z1 = flagged_3z1 || (v.condition == "progression_sum" && v.witness.find("3Z+1") != std::string::npos);
  }
  const bool prog_ok = prog.verdict == Verdict::inconsistent && flagged_3z1;

  r.passed = lin_ok && gauss_ok && prog_ok;
  r.detail = std::string("linear ") + to_string(lin.verdict) + (even_witness ? " (even witness)" : "") +
             ", gram |min eig|/trace = " + sci(sing) + "; gaussian " + to_string(gauss.verdict) +
             (all_hit ? " (all probes hit both parities)" : "") + "; 3Z table " + to_string(prog.verdict) +
             (flagged_3z1 ? " (3Z+1)" : "");
  return r;
}

CriterionResult nngp_closed() {
  CriterionResult r{8, "NNGP closed form", false, ""};
  const auto relu = [](double u) { return u > 0.0 ? u : 0.0; };
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double a = 0.1 + 3.9 * i / 9.0;
    for (int j = 0; j < 10; ++j) {
      const double b = 0.1 + 3.9 * j / 9.0;
      for (int k = 0; k < 10; ++k) {
        const double c = (-1.0 + 2.0 * k / 9.0) * std::sqrt(a * b);
        worst = std::max(worst, std::abs(f_phi_closed_relu(c, a, b) - f_phi_quadrature(relu, c, a, b, 40)));
      }
    }
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const double v = nngp_eval(relu_net(2, true), zero, zero);
  r.passed = worst <= 1e-6 && std::abs(v - 1.5) <= 1e-9;
  r.detail = "max |closed - quadrature| = " + sci(worst) + ", L=2 at 0 = " + std::to_string(v);
  return r;
}

CriterionResult dimension_limit() {
  CriterionResult r{9, "dimension limit convergence", true, ""};
  const std::vector<int> dims{4, 16, 64};
  const std::vector<double> radii{0.5, 1.0, 2.0};
  const auto rep = dim_limit_check(gaussian_mixture(SchoenbergMeasure::dirac(1.0)), dims, radii, 8);
  for (int n = 0; n <= 8; ++n) {
    for (int k = 0; k + 1 < 3; ++k) {
      if (!(rep.deviation(k + 1, n) < rep.deviation(k, n))) {
        r.passed = false;
        r.detail += "n=" + std::to_string(n) + " not decreasing; ";
      }
    }
  }
  r.detail += "n=8 deviations " + sci(rep.deviation(0, 8)) + " > " + sci(rep.deviation(1, 8)) + " > " +
              sci(rep.deviation(2, 8));
  return r;
}

CriterionResult gp_sampling() {
  CriterionResult r{10, "GP sampling sanity", false, ""};
  const auto k = gaussian_mixture(SchoenbergMeasure::dirac(1.0), Dimension::finite(3));
  std::vector<Eigen::VectorXd> pts(4, Eigen::VectorXd(3));
  pts[0] << 0.0, 0.0, 0.0;
  pts[1] << 0.5, 0.0, 0.0;
  pts[2] << 0.0, 1.0, 0.5;
  pts[3] << -1.0, 0.5, 1.0;
  const auto a = sample_gp(k, pts, 100000, 5);
  const auto b = sample_gp(k, pts, 100000, 5);
  const bool same = a.samples == b.samples;
  r.passed = a.max_band_ratio <= 5.0 && same;
  r.detail = "max deviation / band = " + sci(a.max_band_ratio) + (same ? ", seeds reproduce" : ", seeds differ");
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CriterionResult determinism(const std::vector<CriterionResult>& first) {
  CriterionResult r{11, "determinism", true, ""};
  AcceptanceOptions again;
  again.determinism = false;
  const auto second = run_acceptance(again);
  bool same = second.size() == first.size();
  for (std::size_t i = 0; same && i < second.size(); ++i) {
    same = format_result(first[i]) == format_result(second[i]);
  }
  if (!same) {
    r.passed = false;
    r.detail += "selftest results differ between runs; ";
  }

  char tmpl[] = "/tmp/isokernel-selftest-XXXXXX";
  if (!mkdtemp(tmpl)) {
    r.passed = false;
    r.detail += "no temporary directory";
    return r;
  }
  const std::filesystem::path dir(tmpl);
  std::ofstream(dir / "gaussian.json") << "{\"variant\": \"gaussian\", \"scale\": 1.0}\n";
  std::ofstream(dir / "net.json") << "{\"depth\": 1, \"activation\": \"relu\", \"bias\": true, \"hermite_nodes\": 40}\n";
  const auto p = [&](const char* name) { return (dir / name).string(); };
  int artifacts = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const std::string tag = std::to_string(pass);
    std::ostringstream out, err;
    const int c1 = cli::run({"decompose", "--kernel", p("gaussian.json"), "--dim", "3", "--radii", "0,0.5,1,2",
                             "--n-max", "40", "--out", p("table") + tag + ".json"},
                            out, err);
    const int c2 = cli::run({"report", "--table", p("table") + tag + ".json", "--probes", "32", "--seed", "7",
                             "--out", p("report") + tag + ".json"},
                            out, err);
    const int c3 = cli::run({"nngp-eval", "--spec", p("net.json"), "--x", "1,0", "--y", "0,1", "--out",
                             p("nngp") + tag + ".txt"},
                            out, err);
    if (c1 || c2 || c3) {
      r.passed = false;
      r.detail += "CLI example failed: " + err.str() + "; ";
    }
  }
  for (const char* stem : {"table", "report", "nngp"}) {
    const std::string ext = std::string(stem) == "nngp" ? ".txt" : ".json";
    const auto a = slurp(dir / (std::string(stem) + "0" + ext));
    const auto b = slurp(dir / (std::string(stem) + "1" + ext));
    ++artifacts;
    if (a.empty() || a != b) {
      r.passed = false;
      r.detail += std::string(stem) + " artifacts differ; ";
    }
  }
  if (slurp(dir / "nngp0.txt") != "1\n") {
    r.passed = false;
    r.detail += "nngp-eval example did not print 1; ";
  }
  std::filesystem::remove_all(dir);
  r.detail += "selftest rerun " + std::string(same ? "identical" : "different") + ", " + std::to_string(artifacts) +
              " CLI artifacts compared";
  return r;
}

template <typename F>
CriterionResult guarded(int id, const char* name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {id, name, false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> out;
  out.push_back(guarded(1, "Gegenbauer orthogonality and norms", orthogonality));
  out.push_back(guarded(2, "representation round trip", round_trip));
  out.push_back(guarded(3, "l2 coefficients vs closed form", closed_form));
  out.push_back(guarded(4, "zero at the origin", zero_at_origin));
  out.push_back(guarded(5, "coefficient positive definiteness", coefficient_psd));
  out.push_back(guarded(6, "isotropy", isotropy));
  out.push_back(guarded(7, "strict positive definiteness logic", strict_pd_logic));
  out.push_back(guarded(8, "NNGP closed form", nngp_closed));
  out.push_back(guarded(9, "dimension limit convergence", dimension_limit));
  out.push_back(guarded(10, "GP sampling sanity", gp_sampling));
  if (options.determinism) {
    const auto first = out;
    out.push_back(guarded(11, "determinism", [&] { return determinism(first); }));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[40];
  std::snprintf(head, sizeof head, "criterion %2d %s  ", r.id, r.passed ? "PASS" : "FAIL");
  return head + r.name + ": " + r.detail;
}

}  // namespace isokernel
