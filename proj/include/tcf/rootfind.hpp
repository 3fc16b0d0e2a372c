#pragma once

// Poles, zeros and residues of a Thiele fraction.
//
// Roots of q (poles) and p (zeros) are located by Newton's method with
// implicit deflation (Maehly's correction), using the values and derivatives
// from the one-division evaluation.  Seeds are the midpoints between nodes
// followed by a regular grid over a search box.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "domains.hpp"
#include "interpolant.hpp"

namespace tcf {

struct SearchRegion {
  cplx lower_left;
  cplx upper_right;

  double diameter() const { return std::abs(upper_right - lower_left); }
};

struct RootSearchOptions {
  int grid_density = 64;  // grid_density x grid_density seeds over the region
  int max_newton = 80;
  double inflate = 0.5;  // default region: node bounding box grown by this fraction
  bool node_midpoints = true;
};

struct Pole {
  cplx location;
  cplx residue;
  bool in_domain = false;
};

struct PoleReport {
  std::vector<Pole> poles;
  std::vector<cplx> zeros;
  int grid_density = 0;
  std::size_t seeds = 0;
  std::size_t newton_iterations = 0;
  std::size_t failed_seeds = 0;
};

/// Bounding box of the nodes, grown by `inflate` times its half-width on
/// every side.  The box is square so that real node sets still search off
/// the axis.
inline SearchRegion default_search_region(const TcfInterpolant& tcf, double inflate = 0.5) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& z : tcf.nodes()) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  }
  const cplx c(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
  double h = 0.5 * std::max(xmax - xmin, ymax - ymin);
  if (!(h > 0.0)) h = std::max(1.0, std::abs(c));
  h *= 1.0 + inflate;
  return {c - cplx(h, h), c + cplx(h, h)};
}

namespace detail {

enum class RootTarget { denominator, numerator };

struct RootCandidate {
  cplx z;
  double log_size;  // log2 |target(z)| including the pair scaling
};

inline double log2_abs(const cplx& v, int exponent) {
  const double a = std::abs(v);
  return a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log2(a) + exponent;
}

inline std::vector<cplx> root_seeds(const TcfInterpolant& tcf, const SearchRegion& region,
                                    const RootSearchOptions& opt) {
  std::vector<cplx> seeds;
  const auto nodes = tcf.nodes();
  // Midpoints between neighbouring nodes, plus points pushed off the node
  // curve by half the gap in both normal directions.
  auto add_midpoints = [&](const cplx& a, const cplx& b) {
    const cplx mid = 0.5 * (a + b);
    const cplx normal = cplx(0.0, 0.5) * (b - a);
    seeds.push_back(mid);
    seeds.push_back(mid + normal);
    seeds.push_back(mid - normal);
  };
  if (opt.node_midpoints && nodes.size() > 1) {
    std::vector<cplx> sorted(nodes.begin(), nodes.end());
    sort_unique(sorted);
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) add_midpoints(sorted[k], sorted[k + 1]);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) add_midpoints(nodes[k], nodes[k + 1]);
  }
  const int g = opt.grid_density;
  if (g > 0) {
    const cplx d = region.upper_right - region.lower_left;
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const double u = g == 1 ? 0.5 : static_cast<double>(i) / (g - 1);
        const double v = g == 1 ? 0.5 : static_cast<double>(j) / (g - 1);
        seeds.push_back(region.lower_left + cplx(u * d.real(), v * d.imag()));
      }
    }
  }
  return seeds;
}

inline std::vector<RootCandidate> find_roots(const TcfInterpolant& tcf, RootTarget target,
                                             const SearchRegion& region, const RootSearchOptions& opt,
                                             std::size_t cap, PoleReport& meta) {
  std::vector<RootCandidate> roots;
  if (cap == 0) return roots;
  const auto seeds = root_seeds(tcf, region, opt);
  meta.seeds += seeds.size();

  auto value_of = [&](const EvalResult<cplx>& r) {
    return target == RootTarget::denominator ? std::pair{r.q, r.dq} : std::pair{r.p, r.dp};
  };

  // Size reference: the largest |target| over the seeds.
  double log_ref = -std::numeric_limits<double>::infinity();
  for (const auto& s : seeds) {
    const auto r = eval_onediv(tcf, s);
    log_ref = std::max(log_ref, log2_abs(value_of(r).first, r.scale_exponent));
  }
  const double accept = log_ref + std::log2(1e-8);
  const double diam = std::max(region.diameter(), 1e-300);
  const double escape = 1e3 * (diam + std::abs(region.lower_left) + std::abs(region.upper_right));

  for (const auto& seed : seeds) {
    if (roots.size() >= cap) break;
    cplx z = seed;
    bool converged = false;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_newton; ++it) {
      ++meta.newton_iterations;
      const auto r = eval_onediv(tcf, z);
      const auto [v, dv] = value_of(r);
      if (v == cplx(0.0)) {
        converged = true;
        break;
      }
      cplx s = dv / v;
      for (const auto& root : roots) s -= 1.0 / (z - root.z);
      const cplx step = 1.0 / s;
      if (!is_finite(step)) break;
      z -= step;
      if (!(std::abs(z) < escape)) break;
      const double h = std::abs(step);
      // Converged at full precision, or the steps have stopped shrinking at
      // rounding level; the residual test below decides which roots stay.
      if (h <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(z) || h < 1e-300 ||
          (h >= last_step && h <= 1e-8 * std::abs(z))) {
        converged = true;
        break;
      }
      last_step = h;
    }
    if (!converged) {
      ++meta.failed_seeds;
      continue;
    }
    // Polish without deflation.
    for (int it = 0; it < 3; ++it) {
      const auto r = eval_onediv(tcf, z);
      const auto [v, dv] = value_of(r);
      if (v == cplx(0.0) || dv == cplx(0.0)) break;
      const cplx step = v / dv;
      if (!is_finite(step) || std::abs(step) > 1e-6 * std::abs(z)) break;
      z -= step;
    }
    const auto r = eval_onediv(tcf, z);
    const double lsz = log2_abs(value_of(r).first, r.scale_exponent);
    if (!(lsz <= accept)) {
      ++meta.failed_seeds;
      continue;
    }
    bool duplicate = false;
    for (const auto& root : roots) {
      if (std::abs(root.z - z) <= 1e-10 * std::min(diam, std::max(std::abs(z), std::abs(root.z)))) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    roots.push_back({z, lsz});
    // Real fractions have conjugate-symmetric roots.
    if (tcf.real_symmetric() && std::abs(z.imag()) > 1e-10 * std::abs(z) && roots.size() < cap) {
      const cplx zc = std::conj(z);
      const auto rc = eval_onediv(tcf, zc);
      roots.push_back({zc, log2_abs(value_of(rc).first, rc.scale_exponent)});
    }
  }
  if (roots.size() > cap) {
    std::sort(roots.begin(), roots.end(),
              [](const RootCandidate& a, const RootCandidate& b) { return a.log_size < b.log_size; });
    roots.resize(cap);
  }
  return roots;
}

inline void check_region(const SearchRegion& region) {
  if (!is_finite(region.lower_left) || !is_finite(region.upper_right) ||
      !(region.lower_left.real() < region.upper_right.real()) ||
      !(region.lower_left.imag() < region.upper_right.imag()))
    throw std::invalid_argument("root search: invalid search region");
}

}  // namespace detail

/// Poles (roots of q) with their residues p / q'.  At most
/// denominator-degree poles are reported; seeds that do not converge are
/// counted in failed_seeds.
inline PoleReport find_poles(const TcfInterpolant& tcf, std::optional<SearchRegion> region = {},
                             const RootSearchOptions& opt = {}) {
  const SearchRegion box = region.value_or(default_search_region(tcf, opt.inflate));
  detail::check_region(box);
  PoleReport report;
  report.grid_density = opt.grid_density;
  if (tcf.size() < 2) return report;
  const auto cap = static_cast<std::size_t>(tcf.type().den_degree);
  for (const auto& root : detail::find_roots(tcf, detail::RootTarget::denominator, box, opt, cap, report)) {
    const auto r = eval_onediv(tcf, root.z);
    const cplx res = r.dq == cplx(0.0) ? cplx(std::numeric_limits<double>::quiet_NaN()) : r.p / r.dq;
    report.poles.push_back({root.z, res, false});
  }
  return report;
}

/// Zeros (roots of p), at most numerator-degree of them.
inline std::vector<cplx> find_zeros(const TcfInterpolant& tcf, std::optional<SearchRegion> region = {},
                                    const RootSearchOptions& opt = {}) {
  const SearchRegion box = region.value_or(default_search_region(tcf, opt.inflate));
  detail::check_region(box);
  PoleReport meta;
  std::vector<cplx> out;
  const auto cap = static_cast<std::size_t>(tcf.type().num_degree);
  for (const auto& root : detail::find_roots(tcf, detail::RootTarget::numerator, box, opt, cap, meta))
    out.push_back(root.z);
  return out;
}

struct InDomainThresholds {
  double distance = 1e-12;  // relative to the curve diameter
  double residue = 1e-13;   // relative to the function scale
};

/// Distance from z to the curve: dense parameter sampling, then a golden
/// section search around the closest sample.
inline double distance_to_curve(const CurveDomain& curve, cplx z, int samples = 2048) {
  auto dist = [&](double t) { return std::abs(curve(t) - z); };
  int best = 0;
  double dbest = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double d = dist(static_cast<double>(i) / samples);
    if (d < dbest) {
      dbest = d;
      best = i;
    }
  }
  double a = std::max(0, best - 1) / static_cast<double>(samples);
  double b = std::min(samples, best + 1) / static_cast<double>(samples);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = dist(c), fd = dist(d);
  for (int it = 0; it < 200 && b - a > 0.0; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = dist(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = dist(d);
    }
    if (c >= d) break;
  }
  return std::min({dbest, fc, fd});
}

inline double curve_diameter(const CurveDomain& curve, int samples = 256) {
  std::vector<cplx> pts;
  for (int i = 0; i <= samples; ++i) pts.push_back(curve(static_cast<double>(i) / samples));
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, std::abs(pts[i] - pts[j]));
  return d;
}

/// Flags poles lying on the curve (within thresholds.distance * diameter)
/// whose residue is not negligible (above thresholds.residue * fscale).
inline PoleReport poles_in_domain(PoleReport report, const CurveDomain& curve, double fscale = 1.0,
                                  const InDomainThresholds& thresholds = {}) {
  const double delta = thresholds.distance * curve_diameter(curve);
  const double rho = thresholds.residue * fscale;
  for (auto& p : report.poles) {
    p.in_domain = distance_to_curve(curve, p.location) <= delta && std::abs(p.residue) > rho;
  }
  return report;
}

inline nlohmann::json to_json(const PoleReport& report) {
  auto poles = nlohmann::json::array();
  for (const auto& p : report.poles) {
    poles.push_back({{"location", {p.location.real(), p.location.imag()}},
                     {"residue", {p.residue.real(), p.residue.imag()}},
                     {"in_domain", p.in_domain}});
  }
  auto zeros = nlohmann::json::array();
  for (const auto& z : report.zeros) zeros.push_back({z.real(), z.imag()});
  return {{"poles", poles},
          {"zeros", zeros},
          {"grid_density", report.grid_density},
          {"seeds", report.seeds},
          {"newton_iterations", report.newton_iterations},
          {"failed_seeds", report.failed_seeds}};
}

}  // namespace tcf
