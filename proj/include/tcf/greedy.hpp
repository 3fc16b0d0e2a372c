#pragma once

// Greedy node selection for Thiele continued fractions.
//
// fit_discrete picks nodes from a fixed sample set; fit_continuum picks them
// from samples of a curve that are refined between already selected
// parameters.  In both cases the next node is the candidate where the current
// interpolant has the largest residual |r_k - f|, and the residual of that
// candidate is the error estimate for r_k.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "domains.hpp"
#include "interpolant.hpp"
#include "kernels.hpp"

namespace tcf {

enum class TieBreak {
  lowest,   // lowest index (discrete) or lowest parameter (continuum) wins
  highest,  // highest index or parameter wins
};

enum class Termination {
  tolerance_met,
  degree_cap,
  samples_exhausted,        // discrete: every point used; continuum: gaps below resolution
  unattainable_exhaustion,  // too many consecutive candidates had no finite weight
  stagnation,               // no improvement over the window, or weight underflow
};

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::tolerance_met: return "tolerance_met";
    case Termination::degree_cap: return "degree_cap";
    case Termination::samples_exhausted: return "samples_exhausted";
    case Termination::unattainable_exhaustion: return "unattainable_exhaustion";
    case Termination::stagnation: return "stagnation";
  }
  return "unknown";
}

struct FitConfig {
  double tol = 100.0 * std::numeric_limits<double>::epsilon();
  bool relative_tol = false;  // multiply tol by the running max |f|
  int max_degree = 150;       // cap on the denominator degree
  int m_initial = 15;
  int m_steady = 3;
  TieBreak tie_break = TieBreak::lowest;
  int stagnation_window = 20;
  int max_exclusions = 50;  // consecutive unattainable candidates tolerated

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("FitConfig: tol must be positive");
    if (max_degree < 0) throw std::invalid_argument("FitConfig: max_degree must be >= 0");
    if (m_steady < 1 || m_initial < m_steady)
      throw std::invalid_argument("FitConfig: need m_initial >= m_steady >= 1");
    if (stagnation_window < 1) throw std::invalid_argument("FitConfig: stagnation_window must be >= 1");
    if (max_exclusions < 0) throw std::invalid_argument("FitConfig: max_exclusions must be >= 0");
  }

  /// Samples per gap while scanning for node k+1 (k = current node count):
  /// 15, 14, ... down to the steady level.
  int refinement_level(std::size_t k) const {
    const long long m = static_cast<long long>(m_initial) - static_cast<long long>(k) + 1;
    return static_cast<int>(std::max<long long>(m_steady, m));
  }
};

struct ConvergenceRecord {
  std::size_t iteration = 0;  // equals num_nodes
  int denominator_degree = 0;
  std::size_t num_nodes = 0;
  double error_estimate = 0.0;  // max scanned residual of r_k
  cplx node{};                  // z_k, the node that completed r_k
  double node_parameter = 0.0;  // centered curve parameter, or sample index for discrete fits
  double selected_parameter = std::numeric_limits<double>::quiet_NaN();  // next node chosen
  std::int64_t elapsed_ns = 0;
};

struct ConvergenceHistory {
  std::vector<ConvergenceRecord> records;
  Termination termination = Termination::tolerance_met;
  std::size_t excluded = 0;  // candidates rejected as unattainable
  std::size_t function_evaluations = 0;

  /// Node count of the prefix with the smallest error estimate.
  std::size_t best_size() const {
    std::size_t best = records.empty() ? 0 : records.front().num_nodes;
    double err = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
      if (r.error_estimate < err) {
        err = r.error_estimate;
        best = r.num_nodes;
      }
    }
    return best;
  }
};

struct FitResult {
  TcfInterpolant interpolant;
  ConvergenceHistory history;
  /// Parameter of each node in selection order: the centered curve parameter
  /// s = t - 1/2 for continuum fits (node = curve.at_offset(s)), the sample
  /// index for discrete fits.
  std::vector<double> parameters;
};

inline void write_history_csv(const ConvergenceHistory& h, std::ostream& out) {
  out << "iteration,denominator_degree,num_nodes,error_estimate,selected_parameter,elapsed_ns,"
         "termination_reason\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < h.records.size(); ++i) {
    const auto& r = h.records[i];
    out << r.iteration << ',' << r.denominator_degree << ',' << r.num_nodes << ','
        << r.error_estimate << ',' << r.selected_parameter << ',' << r.elapsed_ns << ',';
    if (i + 1 == h.records.size()) out << to_string(h.termination);
    out << '\n';
  }
}

inline void write_history_csv(const ConvergenceHistory& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_history_csv(h, out);
}

/// Selected curve parameters (sorted) and the equispaced samples strictly
/// inside each gap [t_j, t_{j+1}), where the last gap closes at the upper end
/// of the parameter range, [0, 1) unless given otherwise.
class CandidateSet {
 public:
  CandidateSet() : CandidateSet(std::vector<double>{0.0}) {}

  explicit CandidateSet(std::vector<double> sorted_selected, int m = 0, double lo = 0.0,
                        double hi = 1.0)
      : selected_(std::move(sorted_selected)), level_(m), lo_(lo), hi_(hi) {
    if (selected_.empty()) throw std::invalid_argument("CandidateSet: no selected parameters");
    if (m < 0) throw std::invalid_argument("CandidateSet: negative refinement level");
    if (!(lo < hi)) throw std::invalid_argument("CandidateSet: empty parameter range");
    for (std::size_t j = 0; j < selected_.size(); ++j) {
      const double t = selected_[j];
      if (!(t >= lo_ && t < hi_)) throw std::invalid_argument("CandidateSet: parameter outside range");
      if (j > 0 && !(selected_[j - 1] < t))
        throw std::invalid_argument("CandidateSet: parameters must be strictly increasing");
    }
    gaps_.resize(selected_.size());
    for (std::size_t j = 0; j < gaps_.size(); ++j) gaps_[j] = make_gap(j);
  }

  const std::vector<double>& selected() const noexcept { return selected_; }
  const std::vector<std::vector<double>>& gaps() const noexcept { return gaps_; }
  int level() const noexcept { return level_; }
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

  /// All samples in increasing order.
  std::vector<double> samples() const {
    std::vector<double> out;
    for (const auto& g : gaps_) out.insert(out.end(), g.begin(), g.end());
    return out;
  }

  friend CandidateSet refine_samples(CandidateSet c, int m) {
    if (m < 0) throw std::invalid_argument("refine_samples: negative refinement level");
    c.level_ = m;
    for (std::size_t j = 0; j < c.gaps_.size(); ++j) c.gaps_[j] = c.make_gap(j);
    return c;
  }

  /// Binary insertion of a new parameter; the gap it splits is resampled at
  /// the current level.
  friend CandidateSet insert_sorted(CandidateSet c, double sigma) {
    if (!(sigma >= c.lo_ && sigma < c.hi_))
      throw std::invalid_argument("insert_sorted: parameter outside range");
    auto pos = std::lower_bound(c.selected_.begin(), c.selected_.end(), sigma);
    if (pos != c.selected_.end() && *pos == sigma)
      throw std::invalid_argument("insert_sorted: duplicate parameter");
    const auto j = static_cast<std::size_t>(pos - c.selected_.begin());
    c.selected_.insert(pos, sigma);
    c.gaps_.insert(c.gaps_.begin() + static_cast<std::ptrdiff_t>(j), std::vector<double>{});
    c.gaps_[j] = c.make_gap(j);
    if (j > 0) c.gaps_[j - 1] = c.make_gap(j - 1);
    return c;
  }

 private:
  double gap_end(std::size_t j) const { return j + 1 < selected_.size() ? selected_[j + 1] : hi_; }

  // t_j + i (t_{j+1} - t_j) / (m + 1), i = 1..m.  Samples that round onto an
  // endpoint or onto each other are dropped.
  std::vector<double> make_gap(std::size_t j) const {
    const double lo = selected_[j];
    const double hi = gap_end(j);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(level_));
    const double h = (hi - lo) / (level_ + 1);
    for (int i = 1; i <= level_; ++i) {
      const double s = lo + i * h;
      if (s <= lo || s >= hi) continue;
      if (!out.empty() && s <= out.back()) continue;
      out.push_back(s);
    }
    return out;
  }

  std::vector<double> selected_;
  std::vector<std::vector<double>> gaps_;
  int level_ = 0;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline std::int64_t ns_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

struct NotRealValued {};

template <class T>
inline cplx to_cplx(const T& x) {
  return cplx(x);
}

template <class T>
struct GreedyNodes {
  std::vector<T> z;
  std::vector<T> y;
  std::vector<T> w;

  std::size_t size() const { return w.size(); }

  T eval(const T& zeta) const { return eval_onediv_pair<T>(z, w, zeta).value(); }

  /// Appends (zk, yk) and its weight; rolls back and reports the status when
  /// the weight cannot be formed.
  WeightStatus push(const T& zk, const T& yk) {
    z.push_back(zk);
    y.push_back(yk);
    const auto wr = next_weight<T>(z, y, w);
    if (!wr.ok()) {
      z.pop_back();
      y.pop_back();
      return wr.status;
    }
    w.push_back(wr.value);
    return WeightStatus::ok;
  }
};

inline double residual_of(const cplx& diff) {
  const double r = std::abs(diff);
  return std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
}
inline double residual_of(double diff) {
  const double r = std::fabs(diff);
  return std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
}

inline bool wins(double candidate, double best, TieBreak tb) {
  return tb == TieBreak::lowest ? candidate > best : candidate >= best;
}

// Reports when the best error estimate has not improved for `window`
// consecutive iterations.  Counting starts only once the estimate is within
// sqrt(threshold * scale), i.e. half of the digits are resolved: functions
// that are still unresolved (oscillatory ones in particular) legitimately
// stall for long stretches.
class StagnationMonitor {
 public:
  explicit StagnationMonitor(int window) : window_(window) {}
  bool update(double eps, double threshold, double scale) {
    if (eps < best_) {
      best_ = eps;
      since_ = 0;
      return false;
    }
    if (!(best_ <= std::sqrt(threshold * scale))) return false;
    return ++since_ >= window_;
  }

 private:
  int window_;
  long long since_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

template <class T>
struct GreedyOutcome {
  GreedyNodes<T> nodes;
  ConvergenceHistory history;
  std::vector<double> parameters;
};

template <class T>
FitResult widen(GreedyOutcome<T>&& out) {
  std::vector<cplx> z, y, w;
  z.reserve(out.nodes.size());
  y.reserve(out.nodes.size());
  w.reserve(out.nodes.size());
  for (std::size_t k = 0; k < out.nodes.size(); ++k) {
    z.push_back(to_cplx(out.nodes.z[k]));
    y.push_back(to_cplx(out.nodes.y[k]));
    w.push_back(to_cplx(out.nodes.w[k]));
  }
  return {TcfInterpolant(std::move(z), std::move(y), std::move(w)), std::move(out.history),
          std::move(out.parameters)};
}

template <class T>
GreedyOutcome<T> fit_discrete_impl(std::span<const T> pts, std::span<const T> vals,
                                   const FitConfig& cfg) {
  const auto start = Clock::now();
  const std::size_t N = pts.size();
  enum : char { kFree = 0, kUsed = 1, kExcluded = 2 };
  std::vector<char> state(N, kFree);
  std::vector<double> resid(N, 0.0);

  double fmax = -1.0;
  std::size_t first = 0;
  for (std::size_t j = 0; j < N; ++j) {
    const double a = std::abs(vals[j]);
    if (wins(a, fmax, cfg.tie_break)) {
      fmax = a;
      first = j;
    }
  }
  const double threshold = cfg.relative_tol ? cfg.tol * fmax : cfg.tol;

  GreedyOutcome<T> out;
  out.history.function_evaluations = N;
  if (out.nodes.push(pts[first], vals[first]) != WeightStatus::ok)
    throw std::invalid_argument("fit_discrete: first value is not finite");
  state[first] = kUsed;
  out.parameters.push_back(static_cast<double>(first));

  StagnationMonitor stagnation(cfg.stagnation_window);
  std::size_t consecutive_exclusions = 0;

  auto pick = [&]() -> long long {
    long long best = -1;
    double best_res = -1.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (state[j] != kFree) continue;
      if (wins(resid[j], best_res, cfg.tie_break)) {
        best_res = resid[j];
        best = static_cast<long long>(j);
      }
    }
    return best;
  };

  for (;;) {
    const std::size_t k = out.nodes.size();
    for (std::size_t j = 0; j < N; ++j) {
      if (state[j] != kFree) continue;
      resid[j] = residual_of(out.nodes.eval(pts[j]) - vals[j]);
    }
    long long best = pick();
    const double eps = best < 0 ? 0.0 : resid[static_cast<std::size_t>(best)];

    ConvergenceRecord rec;
    rec.iteration = k;
    rec.num_nodes = k;
    rec.denominator_degree = denominator_degree(k);
    rec.error_estimate = eps;
    rec.node = to_cplx(out.nodes.z.back());
    rec.node_parameter = out.parameters.back();
    rec.selected_parameter = best < 0 ? std::numeric_limits<double>::quiet_NaN()
                                      : static_cast<double>(best);
    rec.elapsed_ns = ns_since(start);
    out.history.records.push_back(rec);

    if (best < 0) {
      out.history.termination = Termination::samples_exhausted;
      break;
    }
    if (eps <= threshold) {
      out.history.termination = Termination::tolerance_met;
      break;
    }
    if (rec.denominator_degree >= cfg.max_degree) {
      out.history.termination = Termination::degree_cap;
      break;
    }
    if (stagnation.update(eps, threshold, fmax)) {
      out.history.termination = Termination::stagnation;
      break;
    }

    bool stop = false;
    for (;;) {
      const auto j = static_cast<std::size_t>(best);
      const WeightStatus st = out.nodes.push(pts[j], vals[j]);
      if (st == WeightStatus::ok) {
        state[j] = kUsed;
        out.parameters.push_back(static_cast<double>(j));
        out.history.records.back().selected_parameter = static_cast<double>(j);
        consecutive_exclusions = 0;
        break;
      }
      state[j] = kExcluded;
      ++out.history.excluded;
      if (st == WeightStatus::underflow) {
        out.history.termination = Termination::stagnation;
        stop = true;
        break;
      }
      if (++consecutive_exclusions > static_cast<std::size_t>(cfg.max_exclusions) ||
          (best = pick()) < 0) {
        out.history.termination = Termination::unattainable_exhaustion;
        stop = true;
        break;
      }
    }
    if (stop) break;
  }
  return out;
}

template <class T>
struct Sample {
  T z;
  T f;
};

// Memoized f(gamma(1/2 + s)), keyed by the exact centered parameter s.
template <class T>
class CurveSampler {
 public:
  CurveSampler(const std::function<cplx(cplx)>& f, const CurveDomain& curve)
      : f_(f), curve_(curve) {}

  const Sample<T>& operator()(double t) {
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    const cplx z = curve_.at_offset(t);
    const cplx fz = f_(z);
    if (!is_finite(fz))
      throw std::domain_error("fit_continuum: f is not finite at gamma(0.5 + " + std::to_string(t) + ")");
    fmax_ = std::max(fmax_, std::abs(fz));
    ++evaluations_;
    Sample<T> s;
    if constexpr (std::is_same_v<T, double>) {
      if (fz.imag() != 0.0) throw NotRealValued{};
      s = {z.real(), fz.real()};
    } else {
      s = {z, fz};
    }
    return cache_.emplace(t, s).first->second;
  }

  double fmax() const { return fmax_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  const std::function<cplx(cplx)>& f_;
  const CurveDomain& curve_;
  std::unordered_map<double, Sample<T>> cache_;
  double fmax_ = 0.0;
  std::size_t evaluations_ = 0;
};

template <class T>
GreedyOutcome<T> fit_continuum_impl(const std::function<cplx(cplx)>& f, const CurveDomain& curve,
                                    const FitConfig& cfg) {
  const auto start = Clock::now();
  CurveSampler<T> sample(f, curve);
  CandidateSet cands({-0.5}, cfg.refinement_level(1), -0.5, 0.5);
  std::unordered_set<double> excluded;

  GreedyOutcome<T> out;
  {
    const auto& s0 = sample(-0.5);
    if (out.nodes.push(s0.z, s0.f) != WeightStatus::ok)
      throw std::domain_error("fit_continuum: f is not finite at gamma(0)");
    out.parameters.push_back(-0.5);
  }

  StagnationMonitor stagnation(cfg.stagnation_window);
  std::vector<std::pair<double, double>> scanned;  // (parameter, residual), increasing parameter

  auto pick = [&]() -> long long {
    long long best = -1;
    double best_res = -1.0;
    for (std::size_t i = 0; i < scanned.size(); ++i) {
      if (excluded.count(scanned[i].first)) continue;
      if (wins(scanned[i].second, best_res, cfg.tie_break)) {
        best_res = scanned[i].second;
        best = static_cast<long long>(i);
      }
    }
    return best;
  };

  std::size_t consecutive_exclusions = 0;
  for (;;) {
    const std::size_t k = out.nodes.size();
    const int m = cfg.refinement_level(k);
    if (cands.level() != m) cands = refine_samples(std::move(cands), m);

    scanned.clear();
    for (const auto& gap : cands.gaps()) {
      for (double t : gap) {
        if (excluded.count(t)) continue;
        const auto& s = sample(t);
        scanned.emplace_back(t, residual_of(out.nodes.eval(s.z) - s.f));
      }
    }
    long long best = pick();
    const double eps = best < 0 ? 0.0 : scanned[static_cast<std::size_t>(best)].second;
    const double threshold = cfg.relative_tol ? cfg.tol * sample.fmax() : cfg.tol;

    ConvergenceRecord rec;
    rec.iteration = k;
    rec.num_nodes = k;
    rec.denominator_degree = denominator_degree(k);
    rec.error_estimate = eps;
    rec.node = to_cplx(out.nodes.z.back());
    rec.node_parameter = out.parameters.back();
    rec.selected_parameter =
        best < 0 ? std::numeric_limits<double>::quiet_NaN() : scanned[static_cast<std::size_t>(best)].first;
    rec.elapsed_ns = ns_since(start);
    out.history.records.push_back(rec);

    if (best < 0) {
      out.history.termination = Termination::samples_exhausted;
      break;
    }
    if (eps <= threshold) {
      out.history.termination = Termination::tolerance_met;
      break;
    }
    if (rec.denominator_degree >= cfg.max_degree) {
      out.history.termination = Termination::degree_cap;
      break;
    }
    if (stagnation.update(eps, threshold, sample.fmax())) {
      out.history.termination = Termination::stagnation;
      break;
    }

    bool stop = false;
    for (;;) {
      const double sigma = scanned[static_cast<std::size_t>(best)].first;
      const auto& s = sample(sigma);
      const WeightStatus st = out.nodes.push(s.z, s.f);
      if (st == WeightStatus::ok) {
        out.parameters.push_back(sigma);
        out.history.records.back().selected_parameter = sigma;
        cands = insert_sorted(std::move(cands), sigma);
        consecutive_exclusions = 0;
        break;
      }
      excluded.insert(sigma);
      ++out.history.excluded;
      if (st == WeightStatus::underflow) {
        out.history.termination = Termination::stagnation;
        stop = true;
        break;
      }
      if (++consecutive_exclusions > static_cast<std::size_t>(cfg.max_exclusions) ||
          (best = pick()) < 0) {
        out.history.termination = Termination::unattainable_exhaustion;
        stop = true;
        break;
      }
    }
    if (stop) break;
  }
  out.history.function_evaluations = sample.evaluations();
  return out;
}

}  // namespace detail

/// Greedy interpolation on a fixed sample set.  The first node is the sample
/// of largest |y|; each further node is the unused sample with the largest
/// residual.  Stops when that residual is within tolerance, all samples are
/// used, or the denominator degree reaches the cap.
inline FitResult fit_discrete(std::span<const cplx> points, std::span<const cplx> values,
                              const FitConfig& config = {}) {
  config.validate();
  if (points.empty()) throw std::invalid_argument("fit_discrete: no sample points");
  if (points.size() != values.size())
    throw std::invalid_argument("fit_discrete: points and values differ in length");
  bool real = true;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (!is_finite(points[j])) throw std::invalid_argument("fit_discrete: non-finite point at index " + std::to_string(j));
    if (!is_finite(values[j])) throw std::invalid_argument("fit_discrete: non-finite value at index " + std::to_string(j));
    real = real && points[j].imag() == 0.0 && values[j].imag() == 0.0;
  }
  {
    std::vector<cplx> sorted(points.begin(), points.end());
    detail::sort_unique(sorted);
    if (sorted.size() != points.size()) throw std::invalid_argument("fit_discrete: duplicate sample points");
  }
  if (real) {
    std::vector<double> p(points.size()), v(values.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
      p[j] = points[j].real();
      v[j] = values[j].real();
    }
    return detail::widen(detail::fit_discrete_impl<double>(p, v, config));
  }
  return detail::widen(detail::fit_discrete_impl<cplx>(points, values, config));
}

/// Greedy interpolation of f on a curve with adaptive sample refinement.
/// f is called once per distinct curve parameter, from the calling thread.
inline FitResult fit_continuum(const std::function<cplx(cplx)>& f, const CurveDomain& curve,
                               const FitConfig& config = {}) {
  config.validate();
  if (!curve.gamma) throw std::invalid_argument("fit_continuum: curve has no parameterization");
  if (curve.real_valued) {
    try {
      return detail::widen(detail::fit_continuum_impl<double>(f, curve, config));
    } catch (const detail::NotRealValued&) {
      // complex values somewhere on a real curve: redo in complex arithmetic
    }
  }
  return detail::widen(detail::fit_continuum_impl<cplx>(f, curve, config));
}

}  // namespace tcf
