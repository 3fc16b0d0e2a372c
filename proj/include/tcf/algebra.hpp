#pragma once

// Closed-form transforms of a Thiele fraction.  Anything more involved
// (sums or products of two fractions) is done by resampling.

#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "greedy.hpp"
#include "interpolant.hpp"

namespace tcf {

/// r(z) + c: only w_1 changes.
inline TcfInterpolant add_constant(const TcfInterpolant& tcf, cplx c) {
  if (!is_finite(c)) throw std::invalid_argument("add_constant: constant is not finite");
  std::vector<cplx> values(tcf.values().begin(), tcf.values().end());
  std::vector<cplx> weights(tcf.weights().begin(), tcf.weights().end());
  for (auto& y : values) y += c;
  weights[0] += c;
  return TcfInterpolant(std::vector<cplx>(tcf.nodes().begin(), tcf.nodes().end()), std::move(values),
                        std::move(weights));
}

/// c r(z): weights alternate c w_1, w_2 / c, c w_3, w_4 / c, ...
inline TcfInterpolant scale(const TcfInterpolant& tcf, cplx c) {
  if (c == cplx(0.0)) throw std::invalid_argument("scale: factor must be nonzero");
  if (!is_finite(c)) throw std::invalid_argument("scale: factor is not finite");
  std::vector<cplx> values(tcf.values().begin(), tcf.values().end());
  std::vector<cplx> weights(tcf.weights().begin(), tcf.weights().end());
  for (auto& y : values) y *= c;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (k % 2 == 0)
      weights[k] *= c;
    else
      weights[k] /= c;
  }
  return TcfInterpolant(std::vector<cplx>(tcf.nodes().begin(), tcf.nodes().end()), std::move(values),
                        std::move(weights));
}

/// (z - z0) / r(z) = 0 + (z - z0) / (w_1 + (z - z_1) / (w_2 + ...)).
///
/// If the fraction already leads with node z0 and weight 0 it is itself of
/// the form (z - z0) / s(z), and the result is s with the leading term
/// removed, so applying this twice with the same z0 is the identity.
inline TcfInterpolant reciprocal_shifted(const TcfInterpolant& tcf, cplx z0) {
  if (!is_finite(z0)) throw std::invalid_argument("reciprocal_shifted: shift is not finite");
  const auto nodes = tcf.nodes();
  const auto values = tcf.values();
  const auto weights = tcf.weights();
  if (nodes[0] == z0 && weights[0] == cplx(0.0) && tcf.size() > 1) {
    return TcfInterpolant(std::vector<cplx>(nodes.begin() + 1, nodes.end()),
                          std::vector<cplx>(values.begin() + 1, values.end()),
                          std::vector<cplx>(weights.begin() + 1, weights.end()));
  }
  for (const auto& z : nodes)
    if (z == z0) throw std::invalid_argument("reciprocal_shifted: shift point is already a node");

  std::vector<cplx> z, y, w;
  z.reserve(tcf.size() + 1);
  y.reserve(tcf.size() + 1);
  w.reserve(tcf.size() + 1);
  z.push_back(z0);
  y.push_back(0.0);
  w.push_back(0.0);
  for (std::size_t k = 0; k < tcf.size(); ++k) {
    z.push_back(nodes[k]);
    y.push_back((nodes[k] - z0) / values[k]);
    w.push_back(weights[k]);
  }
  return TcfInterpolant(std::move(z), std::move(y), std::move(w));
}

/// Binary operation between two fractions, carried out by refitting the
/// pointwise result on a curve.
inline FitResult resample(const TcfInterpolant& a, const TcfInterpolant& b,
                          const std::function<cplx(cplx, cplx)>& op, const CurveDomain& curve,
                          const FitConfig& config = {}) {
  return fit_continuum([&](cplx z) { return op(eval(a, z), eval(b, z)); }, curve, config);
}

}  // namespace tcf
