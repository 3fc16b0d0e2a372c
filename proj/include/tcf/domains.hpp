#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kernels.hpp"

namespace tcf {

enum class DomainKind { interval, circle, custom };

/// A boundary curve gamma: [0, 1] -> C.
///
/// The fitter works with the centered parameter s = t - 1/2, where doubles
/// are densest around the curve midpoint.  `centered` evaluates gamma(1/2 + s)
/// without forming 1/2 + s; when absent, gamma(0.5 + s) is used.
struct CurveDomain {
  std::function<cplx(double)> gamma;
  bool closed = false;
  bool real_valued = false;
  DomainKind kind = DomainKind::custom;
  std::string name = "custom";
  std::function<cplx(double)> centered;

  cplx operator()(double t) const { return gamma(t); }
  cplx at_offset(double s) const { return centered ? centered(s) : gamma(0.5 + s); }
};

/// exp(2 pi i t), exact at multiples of 1/4 and accurate near t = 1/2.
inline cplx exp_2pi_i(double t) {
  const double quarter = std::nearbyint(4.0 * t);
  const double r = t - 0.25 * quarter;  // exact, |r| <= 1/8
  const double theta = 2.0 * std::numbers::pi * r;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  switch (static_cast<long long>(quarter) & 3) {
    case 0: return {c, s};
    case 1: return {-s, c};
    case 2: return {-c, -s};
    default: return {s, -c};
  }
}

/// [-1, 1] traversed as gamma(t) = -1 + 2t.
inline CurveDomain unit_interval() {
  return {[](double t) { return cplx(-1.0 + 2.0 * t, 0.0); }, false, true, DomainKind::interval,
          "interval", [](double s) { return cplx(2.0 * s, 0.0); }};
}

/// |z| = 1 traversed as gamma(t) = exp(2 pi i t).
inline CurveDomain unit_circle() {
  return {[](double t) { return exp_2pi_i(t); }, true, false, DomainKind::circle, "circle",
          [](double s) { return -exp_2pi_i(s); }};
}

enum class CircleValidation {
  angle,    // points exp(i pi s) on the circle, clustered at z = -1
  literal,  // the real numbers cos(pi T1) and -cos(pi T2)
};

namespace detail {

inline std::vector<double> grid_t1() {
  std::vector<double> t(10001);
  for (int k = 0; k <= 10000; ++k) t[k] = -1.0 + 2.0 * k / 10000.0;
  return t;
}

inline std::vector<double> grid_t2() {
  std::vector<double> t;
  t.reserve(991);
  for (int k = 10; k <= 1000; ++k) t.push_back(std::exp2(-0.1 * k));
  return t;
}

inline void sort_unique(std::vector<cplx>& pts) {
  auto lex = [](const cplx& a, const cplx& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  };
  std::sort(pts.begin(), pts.end(), lex);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

}  // namespace detail

/// Dense validation points for measuring the true error of an approximant,
/// clustered exponentially at the likely singularities.  Duplicates (as
/// doubles) are removed and the result is sorted lexicographically.
///
/// interval: T1 u T2 u -T2 u (T2 - 1) with T1 = {-1 + 2k/10000 : k = 0..10000}
///           and T2 = {2^(-k/10) : k = 10..1000}.
/// circle:   exp(i pi T1) together with gamma(1/2 +- t/2) = -exp(+-i pi t)
///           for t in T2, clustered at z = -1.
inline std::vector<cplx> validation_set(const CurveDomain& domain,
                                        CircleValidation mode = CircleValidation::angle) {
  const auto t1 = detail::grid_t1();
  const auto t2 = detail::grid_t2();
  std::vector<cplx> pts;
  switch (domain.kind) {
    case DomainKind::interval:
      pts.reserve(t1.size() + 3 * t2.size());
      for (double x : t1) pts.emplace_back(x, 0.0);
      for (double x : t2) {
        pts.emplace_back(x, 0.0);
        pts.emplace_back(-x, 0.0);
        pts.emplace_back(x - 1.0, 0.0);
      }
      break;
    case DomainKind::circle:
      if (mode == CircleValidation::literal) {
        for (double x : t1) pts.emplace_back(std::cos(std::numbers::pi * x), 0.0);
        for (double x : t2) pts.emplace_back(-std::cos(std::numbers::pi * x), 0.0);
      } else {
        for (double x : t1) pts.push_back(exp_2pi_i(0.5 * x));
        // gamma(1/2 +- t/2) in centered form, so the cluster reaches 2^-100
        for (double x : t2) {
          pts.push_back(-exp_2pi_i(0.5 * x));
          pts.push_back(-exp_2pi_i(-0.5 * x));
        }
      }
      break;
    case DomainKind::custom:
      throw std::invalid_argument("validation_set: only the unit interval and unit circle are supported");
  }
  detail::sort_unique(pts);
  return pts;
}

inline void write_points_csv(const std::vector<cplx>& pts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "re,im\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& z : pts) out << z.real() << ',' << z.imag() << '\n';
}

}  // namespace tcf
