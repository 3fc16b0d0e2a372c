#pragma once

// Experiment drivers behind the command-line tool: convergence studies of
// the continuum fitter on the built-in test functions, and the evaluation
// micro-benchmark comparing the classic and one-division kernels.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "domains.hpp"
#include "greedy.hpp"
#include "interpolant.hpp"
#include "kernels.hpp"
#include "rootfind.hpp"
#include "test_functions.hpp"

namespace tcf {

struct DegreeRow {
  int denominator_degree = 0;
  std::size_t num_nodes = 0;
  double validation_error = 0.0;
  bool in_domain_pole = false;
  std::int64_t elapsed_ns = 0;  // fitter time when this prefix was completed
};

struct ConvergenceOptions {
  FitConfig fit = [] {
    FitConfig c;
    c.max_degree = 120;
    c.relative_tol = true;
    return c;
  }();
  bool flag_poles = true;
  bool discrete_baseline = false;
  int timing_runs = 5;
  RootSearchOptions pole_search = [] {
    RootSearchOptions o;
    o.grid_density = 0;
    o.max_newton = 40;
    return o;
  }();
};

struct ConvergenceReport {
  std::string function;
  DomainKind domain = DomainKind::interval;
  std::vector<DegreeRow> raw;   // one row per prefix r_1, r_2, ...
  std::vector<DegreeRow> rows;  // the better of the two prefixes at each degree
  double best_error = std::numeric_limits<double>::infinity();
  std::size_t best_nodes = 0;
  Termination termination = Termination::tolerance_met;
  std::int64_t fit_ns_median = 0;
  std::optional<double> discrete_best_error;
  std::size_t validation_points = 0;
  std::vector<cplx> nodes;  // selection order
};

/// Max |r(z) - f(z)| over precomputed validation data; NaN counts as inf.
inline double max_error(const TcfInterpolant& r, const std::vector<cplx>& pts,
                        const std::vector<cplx>& fvals) {
  double e = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double d = std::abs(eval(r, pts[j]) - fvals[j]);
    if (std::isnan(d)) return std::numeric_limits<double>::infinity();
    e = std::max(e, d);
  }
  return e;
}

inline std::vector<DegreeRow> best_per_degree(const std::vector<DegreeRow>& raw) {
  std::vector<DegreeRow> rows;
  for (const auto& r : raw) {
    if (!rows.empty() && rows.back().denominator_degree == r.denominator_degree) {
      if (r.validation_error < rows.back().validation_error) rows.back() = r;
    } else {
      rows.push_back(r);
    }
  }
  return rows;
}

namespace detail {

inline void fill_prefix_rows(const TcfInterpolant& tcf, const ConvergenceHistory* history,
                             const std::vector<cplx>& pts, const std::vector<cplx>& fvals,
                             const CurveDomain& curve, double fscale, const ConvergenceOptions& opt,
                             std::vector<DegreeRow>& raw) {
  for (std::size_t k = 1; k <= tcf.size(); ++k) {
    const auto r = tcf.prefix(k);
    DegreeRow row;
    row.num_nodes = k;
    row.denominator_degree = denominator_degree(k);
    row.validation_error = max_error(r, pts, fvals);
    if (history != nullptr && k <= history->records.size())
      row.elapsed_ns = history->records[k - 1].elapsed_ns;
    if (opt.flag_poles && k >= 3) {
      const auto rep = poles_in_domain(find_poles(r, std::nullopt, opt.pole_search), curve, fscale);
      row.in_domain_pole =
          std::any_of(rep.poles.begin(), rep.poles.end(), [](const Pole& p) { return p.in_domain; });
    }
    raw.push_back(row);
  }
}

}  // namespace detail

/// Fits a built-in function with fit_continuum and measures the validation
/// error of every prefix of the result.
inline ConvergenceReport run_convergence(const TestFunction& fn, const ConvergenceOptions& opt = {}) {
  const CurveDomain curve = domain_of(fn.domain);
  const auto pts = validation_set(curve);
  std::vector<cplx> fvals(pts.size());
  double fscale = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    fvals[j] = fn(pts[j]);
    fscale = std::max(fscale, std::abs(fvals[j]));
  }

  ConvergenceReport report;
  report.function = fn.name;
  report.domain = fn.domain;
  report.validation_points = pts.size();

  std::vector<std::int64_t> times;
  std::optional<FitResult> fit;
  for (int run = 0; run < std::max(1, opt.timing_runs); ++run) {
    const auto t0 = std::chrono::steady_clock::now();
    auto res = fit_continuum(fn.f, curve, opt.fit);
    times.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count());
    if (!fit) fit.emplace(std::move(res));
  }
  std::sort(times.begin(), times.end());
  report.fit_ns_median = times[times.size() / 2];
  report.termination = fit->history.termination;
  report.nodes.assign(fit->interpolant.nodes().begin(), fit->interpolant.nodes().end());

  detail::fill_prefix_rows(fit->interpolant, &fit->history, pts, fvals, curve, fscale, opt, report.raw);
  report.rows = best_per_degree(report.raw);
  for (const auto& r : report.raw) {
    if (r.validation_error < report.best_error) {
      report.best_error = r.validation_error;
      report.best_nodes = r.num_nodes;
    }
  }

  if (opt.discrete_baseline) {
    // The discrete fitter sees every validation point as a candidate.
    const auto disc = fit_discrete(pts, fvals, opt.fit);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= disc.interpolant.size(); ++k)
      best = std::min(best, max_error(disc.interpolant.prefix(k), pts, fvals));
    report.discrete_best_error = best;
  }
  return report;
}

inline void write_degree_csv(const std::vector<DegreeRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "denominator_degree,num_nodes,validation_error,in_domain_pole,elapsed_ns\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows)
    out << r.denominator_degree << ',' << r.num_nodes << ',' << r.validation_error << ','
        << (r.in_domain_pole ? 1 : 0) << ',' << r.elapsed_ns << '\n';
}

inline nlohmann::json summary_json(const ConvergenceReport& r) {
  nlohmann::json j = {{"function", r.function},
                      {"domain", r.domain == DomainKind::interval ? "interval" : "circle"},
                      {"best_error", r.best_error},
                      {"best_num_nodes", r.best_nodes},
                      {"best_denominator_degree", denominator_degree(r.best_nodes)},
                      {"num_nodes", r.nodes.size()},
                      {"termination", to_string(r.termination)},
                      {"fit_ns_median", r.fit_ns_median},
                      {"validation_points", r.validation_points}};
  if (r.discrete_best_error) j["discrete_best_error"] = *r.discrete_best_error;
  return j;
}

// ---------------------------------------------------------------------------
// Micro-benchmark

struct MicrobenchRow {
  int n = 0;
  bool complex_coefficients = false;
  double ns_classic = 0.0;
  double ns_onediv = 0.0;
  double ratio = 0.0;         // classic / one-division
  // |classic - onediv| / max(1, |classic|) over all evaluated fractions.  The
  // maximum is dominated by the rare ill-conditioned draw; the median is the
  // agreement check.
  double median_difference = 0.0;
  double max_difference = 0.0;

  bool agree(double tol = 1e-13) const { return median_difference <= tol; }
};

namespace detail {

inline volatile double bench_sink = 0.0;

// Fractions per trial.  The evaluation loop cycles through them so that the
// coefficients stay cache resident and the timing measures arithmetic, not
// memory bandwidth.
inline constexpr int kMicrobenchPool = 128;

template <class T>
T normal_sample(std::mt19937_64& rng, std::normal_distribution<double>& nd) {
  if constexpr (std::is_same_v<T, double>)
    return nd(rng);
  else
    return T(nd(rng), nd(rng));
}

template <class T>
MicrobenchRow microbench_one(int n, int trials, int points, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> t_classic, t_onediv;
  std::vector<double> diffs;
  const std::size_t nb = static_cast<std::size_t>(n) + 1;
  const int pool = std::min(points, kMicrobenchPool);
  std::vector<T> a(static_cast<std::size_t>(pool) * n), b(pool * nb), va(points), vb(points);
  for (int trial = 0; trial < trials; ++trial) {
    for (auto& x : a) x = normal_sample<T>(rng, nd);
    for (auto& x : b) x = normal_sample<T>(rng, nd);
    auto bs = [&](int i) { return std::span<const T>(b.data() + (i % pool) * nb, nb); };
    auto as = [&](int i) {
      return std::span<const T>(a.data() + static_cast<std::size_t>(i % pool) * n, n);
    };

    using clock = std::chrono::steady_clock;
    auto time_classic = [&] {
      const auto t0 = clock::now();
      for (int i = 0; i < points; ++i) va[i] = cfrac_eval_classic<T>(bs(i), as(i));
      return std::chrono::duration<double, std::nano>(clock::now() - t0).count() / points;
    };
    auto time_onediv = [&] {
      const auto t0 = clock::now();
      for (int i = 0; i < points; ++i) vb[i] = cfrac_eval_onediv<T>(bs(i), as(i)).value();
      return std::chrono::duration<double, std::nano>(clock::now() - t0).count() / points;
    };
    // alternate which method runs first so neither always sees a warm cache
    if (trial % 2 == 0) {
      t_classic.push_back(time_classic());
      t_onediv.push_back(time_onediv());
    } else {
      t_onediv.push_back(time_onediv());
      t_classic.push_back(time_classic());
    }

    double sink = 0.0;
    for (int i = 0; i < points; ++i) {
      sink += std::abs(va[i]) + std::abs(vb[i]);
      const double d = std::abs(va[i] - vb[i]) / std::max(1.0, std::abs(va[i]));
      diffs.push_back(std::isnan(d) ? std::numeric_limits<double>::infinity() : d);
    }
    bench_sink = bench_sink + sink;
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };
  MicrobenchRow row;
  row.n = n;
  row.complex_coefficients = !std::is_same_v<T, double>;
  row.ns_classic = median(t_classic);
  row.ns_onediv = median(t_onediv);
  row.ratio = row.ns_classic / row.ns_onediv;
  row.median_difference = median(diffs);
  row.max_difference = *std::max_element(diffs.begin(), diffs.end());
  return row;
}

}  // namespace detail

/// Times bottom-up evaluation of b_0 + a_1/(b_1 + ... + a_n/b_n) against the
/// one-division matrix product.  Each trial draws a fresh pool of fractions
/// with standard normal a_k, b_k and performs `points` evaluations cycling
/// through the pool with both methods; the reported time per evaluation is
/// the median over trials.
inline std::vector<MicrobenchRow> run_microbench(const std::vector<int>& n_values, int trials,
                                                 std::uint64_t seed = 1, int points = 10000) {
  if (trials < 1) throw std::invalid_argument("run_microbench: trials must be >= 1");
  if (points < 1) throw std::invalid_argument("run_microbench: points must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<MicrobenchRow> rows;
  for (int n : n_values) {
    if (n < 1) throw std::invalid_argument("run_microbench: n must be >= 1");
    rows.push_back(detail::microbench_one<double>(n, trials, points, rng));
    rows.push_back(detail::microbench_one<cplx>(n, trials, points, rng));
  }
  return rows;
}

inline void write_microbench_csv(const std::vector<MicrobenchRow>& rows, std::ostream& out) {
  out << "n,coefficients,ns_classic,ns_onediv,ratio,median_difference,max_difference\n";
  for (const auto& r : rows)
    out << r.n << ',' << (r.complex_coefficients ? "complex" : "real") << ',' << std::fixed
        << std::setprecision(2) << r.ns_classic << ',' << r.ns_onediv << ',' << r.ratio << ','
        << std::scientific << std::setprecision(3) << r.median_difference << ',' << r.max_difference
        << std::defaultfloat << '\n';
}

}  // namespace tcf
