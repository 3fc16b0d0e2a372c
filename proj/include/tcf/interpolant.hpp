#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kernels.hpp"

namespace tcf {

/// Numerator/denominator degrees implied by the node count.
struct RationalType {
  int num_degree = 0;
  int den_degree = 0;

  friend bool operator==(const RationalType&, const RationalType&) = default;
};

/// n = 2m+1 gives type (m, m); n = 2m gives type (m, m-1).
inline constexpr RationalType rational_type(std::size_t n) {
  const int k = static_cast<int>(n);
  return {k / 2, (k - 1) / 2};
}

inline constexpr int denominator_degree(std::size_t n) {
  return n == 0 ? 0 : (static_cast<int>(n) - 1) / 2;
}

/// An immutable Thiele continued fraction: nodes z_k, interpolated values
/// y_k and weights w_k.  When every stored number is real the interpolant is
/// flagged real_symmetric and real arguments are evaluated in real
/// arithmetic.
class TcfInterpolant {
 public:
  TcfInterpolant(std::vector<cplx> nodes, std::vector<cplx> values, std::vector<cplx> weights)
      : nodes_(std::move(nodes)), values_(std::move(values)), weights_(std::move(weights)) {
    validate();
    real_symmetric_ = all_real(nodes_) && all_real(values_) && all_real(weights_);
    if (real_symmetric_) {
      nodes_re_.reserve(nodes_.size());
      weights_re_.reserve(weights_.size());
      for (const auto& z : nodes_) nodes_re_.push_back(z.real());
      for (const auto& w : weights_) weights_re_.push_back(w.real());
    }
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  bool real_symmetric() const noexcept { return real_symmetric_; }
  RationalType type() const noexcept { return rational_type(size()); }

  std::span<const cplx> nodes() const noexcept { return nodes_; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<const cplx> weights() const noexcept { return weights_; }

  /// Real views; empty unless real_symmetric().
  std::span<const double> real_nodes() const noexcept { return nodes_re_; }
  std::span<const double> real_weights() const noexcept { return weights_re_; }

  /// The interpolant on the first k nodes.  Every prefix of a Thiele
  /// fraction is itself the interpolant of its nodes.
  TcfInterpolant prefix(std::size_t k) const {
    if (k == 0 || k > size()) throw std::out_of_range("tcf: prefix length out of range");
    return TcfInterpolant(std::vector<cplx>(nodes_.begin(), nodes_.begin() + k),
                          std::vector<cplx>(values_.begin(), values_.begin() + k),
                          std::vector<cplx>(weights_.begin(), weights_.begin() + k));
  }

 private:
  static bool all_real(const std::vector<cplx>& v) {
    return std::all_of(v.begin(), v.end(), [](const cplx& z) { return z.imag() == 0.0; });
  }

  void validate() const {
    const std::size_t n = nodes_.size();
    if (n == 0) throw std::invalid_argument("tcf: interpolant needs at least one node");
    if (values_.size() != n || weights_.size() != n)
      throw std::invalid_argument("tcf: nodes, values and weights differ in length");
    for (std::size_t k = 0; k < n; ++k) {
      if (!is_finite(nodes_[k])) throw std::invalid_argument("tcf: non-finite node");
      if (!is_finite(weights_[k]))
        throw std::invalid_argument("tcf: non-finite weight at index " + std::to_string(k));
    }
    std::vector<cplx> sorted(nodes_);
    auto lex = [](const cplx& a, const cplx& b) {
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    };
    std::sort(sorted.begin(), sorted.end(), lex);
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("tcf: nodes are not pairwise distinct");
  }

  std::vector<cplx> nodes_;
  std::vector<cplx> values_;
  std::vector<cplx> weights_;
  std::vector<double> nodes_re_;
  std::vector<double> weights_re_;
  bool real_symmetric_ = false;
};

namespace detail {

inline EvalResult<cplx> widen(const EvalResult<double>& r) {
  return {r.p, r.q, r.dp, r.dq, r.scale_exponent, r.degenerate};
}

}  // namespace detail

inline cplx eval_classic(const TcfInterpolant& tcf, cplx zeta) {
  if (tcf.real_symmetric() && zeta.imag() == 0.0)
    return eval_classic<double>(tcf.real_nodes(), tcf.real_weights(), zeta.real());
  return eval_classic<cplx>(tcf.nodes(), tcf.weights(), zeta);
}

inline EvalResult<cplx> eval_onediv(const TcfInterpolant& tcf, cplx zeta) {
  if (tcf.real_symmetric() && zeta.imag() == 0.0)
    return detail::widen(eval_onediv<double>(tcf.real_nodes(), tcf.real_weights(), zeta.real()));
  return eval_onediv<cplx>(tcf.nodes(), tcf.weights(), zeta);
}

/// r(zeta) through the one-division route.
inline cplx eval(const TcfInterpolant& tcf, cplx zeta) {
  if (tcf.real_symmetric() && zeta.imag() == 0.0)
    return eval_onediv_pair<double>(tcf.real_nodes(), tcf.real_weights(), zeta.real()).value();
  return eval_onediv_pair<cplx>(tcf.nodes(), tcf.weights(), zeta).value();
}

/// (r(zeta), r'(zeta)).
inline std::pair<cplx, cplx> eval_derivative(const TcfInterpolant& tcf, cplx zeta) {
  const auto res = eval_onediv(tcf, zeta);
  return {res.value(), res.derivative()};
}

/// Residue p(pole) / q'(pole) at a simple pole.  Throws std::domain_error
/// when q' vanishes or is not finite there.
inline cplx residue(const TcfInterpolant& tcf, cplx pole) {
  const auto res = eval_onediv(tcf, pole);
  if (res.dq == cplx(0.0) || !is_finite(res.dq))
    throw std::domain_error("tcf: q' vanishes at the requested pole");
  const double qmag = std::abs(res.q);
  const double dqmag = std::abs(res.dq);
  // A point is only a pole if q is negligible next to q' times the local
  // length scale; otherwise p/q' is meaningless.
  const double scale = std::max(1.0, std::abs(pole));
  if (!(qmag <= 1e-6 * dqmag * scale))
    throw std::domain_error("tcf: denominator does not vanish at the requested pole");
  return res.p / res.dq;
}

}  // namespace tcf
