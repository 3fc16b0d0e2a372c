#pragma once

// Per-point kernels for Thiele continued fractions
//
//   r(z) = w_1 + (z - z_1) / (w_2 + (z - z_2) / (w_3 + ... + (z - z_{n-1}) / w_n))
//
// Two evaluation routes are provided: the classic tail-ordered recurrence,
// which divides once per level, and the one-division route, which carries a
// numerator/denominator pair (p, q) through a product of 2x2 coefficient
// matrices and leaves the single division to the caller.
//
// All kernels are templates over the scalar type.  Besides double and
// std::complex<double>, any type with field arithmetic, `*= double`, and an
// ADL-visible `magnitude(const T&) -> double` works; the tests use this to
// count divisions and to expand p and q symbolically.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>

namespace tcf {

using cplx = std::complex<double>;

/// Cheap size measure used by the rescaling guard (max-norm for complex).
inline double magnitude(double x) noexcept { return std::fabs(x); }
inline double magnitude(const cplx& z) noexcept {
  return std::max(std::fabs(z.real()), std::fabs(z.imag()));
}

inline bool is_finite(double x) noexcept { return std::isfinite(x); }
inline bool is_finite(const cplx& z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// The (p, q) pair is kept inside [2^-512, 2^512] by exact power-of-two
/// rescaling.  The true pair is (p, q) * 2^scale_exponent.
inline constexpr int kRescaleBits = 512;
inline constexpr double kRescaleUpper = 0x1p512;
inline constexpr double kRescaleLower = 0x1p-512;

/// Evaluation kernels test the band only every kRescaleStride levels.  Four
/// levels cannot leave the double range unless a coefficient exceeds about
/// 2^100 in size; if the strided pass still ends non-finite or at (0, 0),
/// the kernel reruns with the check at every level.
inline constexpr std::size_t kRescaleStride = 4;

template <class T>
struct Fraction {
  T p{};
  T q{};
  int scale_exponent = 0;
  bool degenerate = false;

  T value() const { return p / q; }
};

template <class T>
struct EvalResult {
  T p{};
  T q{};
  T dp{};
  T dq{};
  int scale_exponent = 0;
  bool degenerate = false;

  T value() const { return p / q; }
  /// Quotient rule, arranged so that only one division is performed.
  T derivative() const { return (dp * q - p * dq) / (q * q); }
};

namespace detail {

template <class T>
inline void rescale_pair(T& p, T& q, int& exponent) {
  using tcf::magnitude;
  const double m = std::max(magnitude(p), magnitude(q));
  if (m > kRescaleUpper) [[unlikely]] {
    p *= kRescaleLower;
    q *= kRescaleLower;
    exponent += kRescaleBits;
  } else if (m < kRescaleLower && m > 0.0) [[unlikely]] {
    p *= kRescaleUpper;
    q *= kRescaleUpper;
    exponent -= kRescaleBits;
  }
}

// Same guard for the value pair and the derivative pair together; scaling all
// four by one factor leaves p/q, p/q' and the quotient-rule derivative intact.
template <class T>
inline void rescale_quad(T& p, T& q, T& dp, T& dq, int& exponent) {
  using tcf::magnitude;
  const double m = std::max(magnitude(p), magnitude(q));
  const double md = std::max(magnitude(dp), magnitude(dq));
  if (m > kRescaleUpper || md > kRescaleUpper) [[unlikely]] {
    p *= kRescaleLower;
    q *= kRescaleLower;
    dp *= kRescaleLower;
    dq *= kRescaleLower;
    exponent += kRescaleBits;
  } else if (m < kRescaleLower && m > 0.0) [[unlikely]] {
    p *= kRescaleUpper;
    q *= kRescaleUpper;
    dp *= kRescaleUpper;
    dq *= kRescaleUpper;
    exponent -= kRescaleBits;
  }
}

template <class T>
inline bool is_zero(const T& x) {
  return x == T(0.0);
}

}  // namespace detail

/// Tail-ordered evaluation: v_n = w_n, v_k = w_k + (zeta - z_k) / v_{k+1}.
/// A zero intermediate produces inf/NaN per IEEE semantics; nothing traps.
template <class T>
T eval_classic(std::span<const T> nodes, std::span<const T> weights, const T& zeta) {
  const std::size_t n = weights.size();
  T v = weights[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    v = weights[k] + (zeta - nodes[k]) / v;
  }
  return v;
}

namespace detail {

template <class T>
inline bool needs_rerun(const T& p, const T& q) {
  return !is_finite(p) || !is_finite(q) || (is_zero(p) && is_zero(q));
}

template <class T, std::size_t Stride>
Fraction<T> onediv_pair(std::span<const T> nodes, std::span<const T> weights, const T& zeta) {
  const std::size_t n = weights.size();
  T p = weights[n - 1];
  T q = zeta - nodes[n - 2];
  int e = 0;
  for (std::size_t k = n - 2; k-- > 0;) {
    T np = weights[k + 1] * p + q;
    q = (zeta - nodes[k]) * p;
    p = np;
    if (k % Stride == 0) rescale_pair(p, q, e);
  }
  T np = weights[0] * p + q;
  q = p;
  p = np;
  rescale_pair(p, q, e);
  Fraction<T> out;
  out.p = p;
  out.q = q;
  out.scale_exponent = e;
  return out;
}

}  // namespace detail

/// One-division evaluation of (p, q) with r = p / q.  Division-free.
template <class T>
Fraction<T> eval_onediv_pair(std::span<const T> nodes, std::span<const T> weights,
                             const T& zeta) {
  if (weights.size() == 1) {
    Fraction<T> out;
    out.p = weights[0];
    out.q = T(1.0);
    return out;
  }
  auto out = detail::onediv_pair<T, kRescaleStride>(nodes, weights, zeta);
  if (detail::needs_rerun(out.p, out.q)) [[unlikely]]
    out = detail::onediv_pair<T, 1>(nodes, weights, zeta);
  out.degenerate = detail::is_zero(out.p) && detail::is_zero(out.q);
  return out;
}

namespace detail {

template <class T, std::size_t Stride>
EvalResult<T> onediv_quad(std::span<const T> nodes, std::span<const T> weights, const T& zeta) {
  const std::size_t n = weights.size();
  T p = weights[n - 1];
  T q = zeta - nodes[n - 2];
  T dp = T(0.0);
  T dq = T(1.0);
  int e = 0;
  for (std::size_t k = n - 2; k-- > 0;) {
    const T a = zeta - nodes[k];
    const T& b = weights[k + 1];
    T ndp = b * dp + dq;
    dq = p + a * dp;
    dp = ndp;
    T np = b * p + q;
    q = a * p;
    p = np;
    if (k % Stride == 0) rescale_quad(p, q, dp, dq, e);
  }
  T ndp = weights[0] * dp + dq;
  dq = dp;
  dp = ndp;
  T np = weights[0] * p + q;
  q = p;
  p = np;
  rescale_quad(p, q, dp, dq, e);
  EvalResult<T> out;
  out.p = p;
  out.q = q;
  out.dp = dp;
  out.dq = dq;
  out.scale_exponent = e;
  return out;
}

}  // namespace detail

/// One-division evaluation of (p, q, p', q'), derivatives with respect to zeta.
template <class T>
EvalResult<T> eval_onediv(std::span<const T> nodes, std::span<const T> weights,
                          const T& zeta) {
  if (weights.size() == 1) {
    EvalResult<T> out;
    out.p = weights[0];
    out.q = T(1.0);
    out.dp = T(0.0);
    out.dq = T(0.0);
    return out;
  }
  auto out = detail::onediv_quad<T, kRescaleStride>(nodes, weights, zeta);
  if (detail::needs_rerun(out.p, out.q) || !is_finite(out.dp) || !is_finite(out.dq)) [[unlikely]]
    out = detail::onediv_quad<T, 1>(nodes, weights, zeta);
  out.degenerate = detail::is_zero(out.p) && detail::is_zero(out.q);
  return out;
}

enum class WeightStatus {
  ok,
  unattainable,  // final denominator vanished or the weight is not finite
  underflow,     // numerator and denominator both collapsed to zero
};

template <class T>
struct WeightResult {
  T value{};
  WeightStatus status = WeightStatus::ok;
  int scale_exponent = 0;

  bool ok() const { return status == WeightStatus::ok; }
};

/// Weight w_k for the last of k nodes, given w_1..w_{k-1}.
///
/// Evaluates the complementary continued fraction
///   w_k = 0 + (z_k - z_{k-1}) / (-w_{k-1} + ... + (z_k - z_1) / (-w_1 + y_k / 1))
/// tail-first as a matrix product, with one division at the end.
template <class T>
WeightResult<T> next_weight(std::span<const T> nodes, std::span<const T> values,
                            std::span<const T> weights) {
  const std::size_t k = nodes.size();
  const T& zk = nodes[k - 1];
  const T& yk = values[k - 1];
  WeightResult<T> out;
  if (k == 1) {
    out.value = yk;
    out.status = is_finite(yk) ? WeightStatus::ok : WeightStatus::unattainable;
    return out;
  }
  // [P; Q] <- [b_i, 1; a_i, 0] [P; Q], starting from [b_k; a_k] = [1; y_k].
  T P = T(1.0);
  T Q = yk;
  int e = 0;
  for (std::size_t i = k - 1; i >= 1; --i) {
    T nP = Q - weights[k - i - 1] * P;
    Q = (zk - nodes[k - i - 1]) * P;
    P = nP;
    detail::rescale_pair(P, Q, e);
  }
  // The leading matrix has b_0 = 0, so the fraction is Q / P.
  out.scale_exponent = e;
  if (detail::is_zero(P) && detail::is_zero(Q)) {
    out.status = WeightStatus::underflow;
    return out;
  }
  if (detail::is_zero(P)) {
    out.status = WeightStatus::unattainable;
    return out;
  }
  out.value = Q / P;
  if (!is_finite(out.value)) out.status = WeightStatus::unattainable;
  return out;
}

/// Generic continued fraction b_0 + a_1/(b_1 + a_2/(b_2 + ... + a_n/b_n)),
/// evaluated bottom-up with one division per level.
template <class T>
T cfrac_eval_classic(std::span<const T> b, std::span<const T> a) {
  const std::size_t n = a.size();
  T v = b[n];
  for (std::size_t k = n; k >= 1; --k) {
    v = b[k - 1] + a[k - 1] / v;
  }
  return v;
}

namespace detail {

template <class T, std::size_t Stride>
Fraction<T> cfrac_pair(std::span<const T> b, std::span<const T> a) {
  const std::size_t n = a.size();
  T p = b[n];
  T q = a[n - 1];
  int e = 0;
  for (std::size_t k = n - 1; k >= 1; --k) {
    T np = b[k] * p + q;
    q = a[k - 1] * p;
    p = np;
    if (k % Stride == 0) rescale_pair(p, q, e);
  }
  Fraction<T> out;
  out.p = b[0] * p + q;
  out.q = p;
  out.scale_exponent = e;
  return out;
}

}  // namespace detail

/// Same fraction as a right-to-left product of 2x2 matrices.
template <class T>
Fraction<T> cfrac_eval_onediv(std::span<const T> b, std::span<const T> a) {
  auto out = detail::cfrac_pair<T, kRescaleStride>(b, a);
  if (detail::needs_rerun(out.p, out.q)) [[unlikely]]
    out = detail::cfrac_pair<T, 1>(b, a);
  out.degenerate = detail::is_zero(out.p) && detail::is_zero(out.q);
  return out;
}

}  // namespace tcf
