// tcf: command-line front end for fitting, convergence studies, the
// evaluation micro-benchmark and pole reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcf/tcf.hpp"

namespace fs = std::filesystem;

namespace {

struct FitFlags {
  double tol = 100.0 * std::numeric_limits<double>::epsilon();
  bool absolute_tol = false;
  int max_degree = 150;
  int m_initial = 15;
  int m_steady = 3;

  tcf::FitConfig config() const {
    tcf::FitConfig c;
    c.tol = tol;
    c.relative_tol = !absolute_tol;
    c.max_degree = max_degree;
    c.m_initial = m_initial;
    c.m_steady = m_steady;
    return c;
  }
};

void add_fit_flags(CLI::App* app, FitFlags& f) {
  app->add_option("--tol", f.tol, "tolerance, relative to max |f| unless --absolute-tol")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_flag("--absolute-tol", f.absolute_tol, "treat --tol as an absolute bound on |r - f|");
  app->add_option("--max-degree", f.max_degree, "cap on the denominator degree")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app->add_option("--m-initial", f.m_initial, "initial samples per gap")->capture_default_str();
  app->add_option("--m-steady", f.m_steady, "steady samples per gap")->capture_default_str();
}

std::optional<tcf::DomainKind> parse_domain(const std::string& s) {
  if (s.empty() || s == "all") return std::nullopt;
  if (s == "interval") return tcf::DomainKind::interval;
  return tcf::DomainKind::circle;
}

std::vector<const tcf::TestFunction*> select_functions(const std::string& name, const std::string& domain) {
  const auto dom = parse_domain(domain);
  std::vector<const tcf::TestFunction*> out;
  if (name == "all") {
    for (const auto& f : tcf::test_functions())
      if (!dom || f.domain == *dom) out.push_back(&f);
    return out;
  }
  const auto& f = tcf::find_test_function(name);
  if (dom && f.domain != *dom)
    throw std::invalid_argument("function '" + name + "' is not defined on the " + domain);
  out.push_back(&f);
  return out;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

int run_fit(const std::string& function, const std::string& input, const std::string& domain,
            const FitFlags& flags, const std::string& output) {
  const auto cfg = flags.config();
  tcf::ExportedFit res = input.empty()
                             ? [&] {
                                 select_functions(function, domain);
                                 return tcf::fit_and_export(function, cfg, output);
                               }()
                             : tcf::fit_samples_and_export(input, cfg, output);
  const auto& h = res.fit.history;
  std::cout << "nodes " << res.fit.interpolant.size() << ", type (" << res.fit.interpolant.type().num_degree
            << ", " << res.fit.interpolant.type().den_degree << "), termination "
            << tcf::to_string(h.termination) << ", error estimate "
            << (h.records.empty() ? 0.0 : h.records.back().error_estimate) << '\n'
            << "wrote " << res.interpolant_path.string() << " and " << res.history_path.string() << '\n';
  return 0;
}

int run_convergence(const std::string& function, const std::string& domain, const FitFlags& flags,
                    bool baseline, bool no_poles, int timing_runs, const std::string& output) {
  tcf::ConvergenceOptions opt;
  opt.fit = flags.config();
  opt.discrete_baseline = baseline;
  opt.flag_poles = !no_poles;
  opt.timing_runs = timing_runs;
  fs::create_directories(output);
  nlohmann::json all = nlohmann::json::array();
  for (const auto* fn : select_functions(function, domain)) {
    const auto rep = tcf::run_convergence(*fn, opt);
    const fs::path base = fs::path(output) / fn->name;
    tcf::write_degree_csv(rep.raw, base.string() + "_raw.csv");
    tcf::write_degree_csv(rep.rows, base.string() + "_degrees.csv");
    auto summary = tcf::summary_json(rep);
    write_json(summary, base.string() + "_summary.json");
    all.push_back(summary);
    std::cout << fn->name << ": best error " << rep.best_error << " at degree "
              << tcf::denominator_degree(rep.best_nodes) << ", " << rep.nodes.size() << " nodes, "
              << tcf::to_string(rep.termination) << ", " << rep.fit_ns_median * 1e-6 << " ms";
    if (rep.discrete_best_error) std::cout << ", discrete " << *rep.discrete_best_error;
    std::cout << '\n';
  }
  write_json(all, (fs::path(output) / "summary.json").string());
  return 0;
}

int run_microbench(const std::vector<int>& n_values, int trials, int points, std::uint64_t seed,
                   const std::string& output) {
  const auto rows = tcf::run_microbench(n_values, trials, seed, points);
  if (output.empty() || output == "-") {
    tcf::write_microbench_csv(rows, std::cout);
  } else {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot open '" + output + "' for writing");
    tcf::write_microbench_csv(rows, out);
  }
  for (const auto& r : rows) {
    if (!r.agree()) {
      std::cerr << "error: methods disagree at n = " << r.n << " (median difference "
                << r.median_difference << ")\n";
      return 1;
    }
  }
  return 0;
}

int run_poles(const std::string& interpolant, const std::string& domain, int grid, double fscale,
              const std::string& output) {
  const auto tcf_ = tcf::load_interpolant(interpolant);
  tcf::RootSearchOptions opt;
  opt.grid_density = grid;
  auto report = tcf::find_poles(tcf_, std::nullopt, opt);
  report.zeros = tcf::find_zeros(tcf_, std::nullopt, opt);
  if (const auto dom = parse_domain(domain)) {
    double scale = fscale;
    if (scale <= 0.0)
      for (const auto& y : tcf_.values()) scale = std::max(scale, std::abs(y));
    report = tcf::poles_in_domain(std::move(report), tcf::domain_of(*dom), scale);
  }
  write_json(tcf::to_json(report), output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy Thiele continued-fraction interpolation"};
  app.require_subcommand(1);

  FitFlags fit_flags;
  std::string function = "sqrt_x", input, domain, output;
  auto* fit = app.add_subcommand("fit", "fit a built-in function or CSV samples, save JSON + history");
  fit->add_option("--function", function, "built-in function name")->capture_default_str();
  fit->add_option("--input", input, "CSV with header re_z,im_z,re_y,im_y (discrete fit)")
      ->check(CLI::ExistingFile);
  fit->add_option("--domain", domain, "interval or circle (must match the function)")
      ->check(CLI::IsMember({"interval", "circle"}));
  fit->add_option("--output", output, "output directory")->required();
  add_fit_flags(fit, fit_flags);

  FitFlags conv_flags;
  conv_flags.max_degree = 120;
  std::string conv_function = "all", conv_domain = "all", conv_output;
  bool baseline = false, no_poles = false;
  int timing_runs = 5;
  auto* conv = app.add_subcommand("convergence", "validation error per degree for built-in functions");
  conv->add_option("--function", conv_function, "built-in function name or 'all'")->capture_default_str();
  conv->add_option("--domain", conv_domain, "interval, circle or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"interval", "circle", "all"}));
  conv->add_flag("--discrete-baseline", baseline, "also fit the validation points with the discrete fitter");
  conv->add_flag("--no-pole-flags", no_poles, "skip the in-domain pole search per degree");
  conv->add_option("--timing-runs", timing_runs, "fits timed per function (median reported)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  conv->add_option("--output", conv_output, "output directory")->required();
  add_fit_flags(conv, conv_flags);

  std::vector<int> n_values{25, 30, 35, 40, 45, 50};
  int trials = 11, points = 10000;
  std::uint64_t seed = 1;
  std::string bench_output;
  auto* bench = app.add_subcommand("microbench", "classic vs one-division evaluation timing");
  bench->add_option("--n", n_values, "continued-fraction lengths")->delimiter(',')->capture_default_str();
  bench->add_option("--trials", trials)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--points", points, "evaluations per trial")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed)->capture_default_str();
  bench->add_option("--output", bench_output, "CSV path (default stdout)");

  std::string poles_input, poles_domain, poles_output;
  int grid = 64;
  double fscale = 0.0;
  auto* poles = app.add_subcommand("poles", "poles, residues and zeros of a saved interpolant");
  poles->add_option("--input", poles_input, "interpolant JSON")->required()->check(CLI::ExistingFile);
  poles->add_option("--domain", poles_domain, "flag poles on this domain (interval or circle)")
      ->check(CLI::IsMember({"interval", "circle"}));
  poles->add_option("--grid", grid, "seed grid points per side")->capture_default_str()->check(CLI::NonNegativeNumber);
  poles->add_option("--scale", fscale, "function scale for the residue threshold (default max |y|)");
  poles->add_option("--output", poles_output, "JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      if (!input.empty() && fit->count("--function") > 0)
        throw std::invalid_argument("--function and --input are mutually exclusive");
      return run_fit(function, input, domain, fit_flags, output);
    }
    if (*conv)
      return run_convergence(conv_function, conv_domain, conv_flags, baseline, no_poles, timing_runs,
                             conv_output);
    if (*bench) return run_microbench(n_values, trials, points, seed, bench_output);
    if (*poles) return run_poles(poles_input, poles_domain, grid, fscale, poles_output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
