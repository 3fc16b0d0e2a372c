#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "tcf/kernels.hpp"

using tcf::cplx;

namespace {

// double that counts its divisions
struct Counted {
  double v = 0.0;
  static inline int divisions = 0;

  Counted() = default;
  Counted(double x) : v(x) {}  // NOLINT(google-explicit-constructor)

  friend Counted operator+(Counted a, Counted b) { return a.v + b.v; }
  friend Counted operator-(Counted a, Counted b) { return a.v - b.v; }
  friend Counted operator*(Counted a, Counted b) { return a.v * b.v; }
  friend Counted operator/(Counted a, Counted b) {
    ++divisions;
    return a.v / b.v;
  }
  Counted& operator*=(double s) {
    v *= s;
    return *this;
  }
  friend bool operator==(Counted a, Counted b) { return a.v == b.v; }
  friend double magnitude(const Counted& x) { return std::fabs(x.v); }
  friend bool is_finite(const Counted& x) { return std::isfinite(x.v); }
};

// polynomial in zeta with double coefficients, lowest degree first
struct Poly {
  std::vector<double> c;

  Poly() = default;
  Poly(double x) : c{x} {}  // NOLINT(google-explicit-constructor)
  explicit Poly(std::vector<double> coeffs) : c(std::move(coeffs)) {}

  int degree() const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
      if (c[k] != 0.0) return k;
    return -1;
  }
  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t k = 0; k < a.c.size(); ++k) r.c[k] += a.c[k];
    for (std::size_t k = 0; k < b.c.size(); ++k) r.c[k] += b.c[k];
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    Poly nb = b;
    for (auto& x : nb.c) x = -x;
    return a + nb;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }
  Poly& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.degree() == -1 && b.degree() == -1; }
  friend double magnitude(const Poly&) { return 1.0; }  // never rescale
  friend bool is_finite(const Poly&) { return true; }
};

template <class T>
std::span<const T> sp(const std::vector<T>& v) {
  return {v.data(), v.size()};
}

// v_n = w_n, v_k = w_k + a_k / v_{k+1}; derivative by the chain rule
std::pair<cplx, cplx> classic_with_derivative(const std::vector<cplx>& z, const std::vector<cplx>& w,
                                              cplx zeta) {
  const std::size_t n = w.size();
  cplx v = w[n - 1], dv = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) {
    const cplx a = zeta - z[k];
    const cplx nv = w[k] + a / v;
    dv = 1.0 / v - a * dv / (v * v);
    v = nv;
  }
  return {v, dv};
}

cplx rand_c(std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  return {nd(g), nd(g)};
}

}  // namespace

TEST(EvalClassic, ConstantFraction) {
  const std::vector<cplx> z{0.3}, w{5.0};
  EXPECT_EQ(tcf::eval_classic<cplx>(sp(z), sp(w), cplx(17.0, -2.0)), cplx(5.0));
}

TEST(EvalClassic, ReciprocalOfOnePlusZ) {
  const std::vector<double> z{0, 1, 2}, w{1, -2, -1};
  EXPECT_DOUBLE_EQ(tcf::eval_classic<double>(sp(z), sp(w), 3.0), 0.25);
  EXPECT_DOUBLE_EQ(tcf::eval_classic<double>(sp(z), sp(w), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(tcf::eval_classic<double>(sp(z), sp(w), 1.0), 0.5);
  EXPECT_DOUBLE_EQ(tcf::eval_classic<double>(sp(z), sp(w), 2.0), 1.0 / 3.0);
}

TEST(EvalOnediv, HandTraceThreeNodes) {
  const std::vector<double> z{0, 1, 2}, w{1, -2, -1};
  const auto r = tcf::eval_onediv<double>(sp(z), sp(w), 3.0);
  EXPECT_EQ(r.p, 1.0);
  EXPECT_EQ(r.q, 4.0);
  EXPECT_EQ(r.dp, 0.0);
  EXPECT_EQ(r.dq, 1.0);
  EXPECT_EQ(r.scale_exponent, 0);
  EXPECT_DOUBLE_EQ(r.value(), 0.25);
  EXPECT_DOUBLE_EQ(r.derivative(), -1.0 / 16.0);
}

TEST(EvalOnediv, HandTraceTwoNodes) {
  const std::vector<double> z{0, 123.0}, w{1, 2};
  const auto r = tcf::eval_onediv<double>(sp(z), sp(w), 4.0);
  EXPECT_EQ(r.p, 6.0);
  EXPECT_EQ(r.q, 2.0);
  EXPECT_EQ(r.dp, 1.0);
  EXPECT_EQ(r.dq, 0.0);
  EXPECT_DOUBLE_EQ(r.value(), 3.0);
  EXPECT_DOUBLE_EQ(r.derivative(), 0.5);
}

TEST(EvalOnediv, SingleNode) {
  const std::vector<cplx> z{1.0}, w{cplx(2.0, -3.0)};
  const auto r = tcf::eval_onediv<cplx>(sp(z), sp(w), cplx(9.0, 9.0));
  EXPECT_EQ(r.p, cplx(2.0, -3.0));
  EXPECT_EQ(r.q, cplx(1.0));
  EXPECT_EQ(r.dp, cplx(0.0));
  EXPECT_EQ(r.dq, cplx(0.0));
  EXPECT_EQ(r.derivative(), cplx(0.0));
}

TEST(EvalOnediv, PairMatchesFullKernel) {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 13;
    std::vector<cplx> z(n), w(n);
    for (auto& x : z) x = rand_c(g);
    for (auto& x : w) x = rand_c(g);
    const cplx zeta = rand_c(g);
    const auto full = tcf::eval_onediv<cplx>(sp(z), sp(w), zeta);
    const auto pair = tcf::eval_onediv_pair<cplx>(sp(z), sp(w), zeta);
    EXPECT_EQ(full.p, pair.p);
    EXPECT_EQ(full.q, pair.q);
  }
}

TEST(EvalOnediv, AgreesWithClassicOnRandomFractions) {
  std::mt19937_64 g(11);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 40;
    std::vector<cplx> z(n), w(n);
    for (auto& x : z) x = rand_c(g);
    for (auto& x : w) x = rand_c(g) + cplx(trial % 2 ? 2.0 : -2.0);
    const cplx zeta = rand_c(g);
    const auto r = tcf::eval_onediv<cplx>(sp(z), sp(w), zeta);
    const auto [v, dv] = classic_with_derivative(z, w, zeta);
    if (std::abs(r.q) < 1e-3 * std::abs(r.p)) continue;  // near a pole
    ++compared;
    EXPECT_LE(std::abs(r.value() - v), 1e-10 * std::abs(v)) << "n = " << n;
    EXPECT_EQ(tcf::eval_classic<cplx>(sp(z), sp(w), zeta), v);
  }
  EXPECT_GT(compared, 200);
}

TEST(EvalOnediv, DerivativeMatchesCentralDifference) {
  std::mt19937_64 g(5);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 12;
    std::vector<cplx> z(n), w(n);
    for (auto& x : z) x = rand_c(g);
    for (auto& x : w) x = rand_c(g) + cplx(3.0);
    const cplx zeta = rand_c(g);
    const auto r = tcf::eval_onediv<cplx>(sp(z), sp(w), zeta);
    const double h = 1e-6 * std::max(1.0, std::abs(zeta));
    const cplx fp = tcf::eval_onediv_pair<cplx>(sp(z), sp(w), zeta + h).value();
    const cplx fm = tcf::eval_onediv_pair<cplx>(sp(z), sp(w), zeta - h).value();
    const cplx fd = (fp - fm) / (2.0 * h);
    // away from poles: the second derivative must not swamp the difference
    const cplx d2 = (fp - 2.0 * r.value() + fm) / (h * h);
    if (std::abs(d2) * h > 1e-3 * std::abs(fd) || std::abs(r.derivative()) < 1e-3) continue;
    ++checked;
    EXPECT_LE(std::abs(r.derivative() - fd), 1e-6 * std::abs(r.derivative())) << "trial " << trial;
  }
  EXPECT_GT(checked, 100);
}

TEST(EvalOnediv, ExactlyOneDivisionPerValue) {
  for (int n : {1, 2, 3, 10, 57}) {
    std::vector<Counted> z, w;
    for (int k = 0; k < n; ++k) {
      z.emplace_back(0.1 * k);
      w.emplace_back(1.0 + 0.01 * k);
    }
    Counted::divisions = 0;
    const Counted v = tcf::eval_onediv_pair<Counted>(sp(z), sp(w), Counted(2.5)).value();
    EXPECT_EQ(Counted::divisions, 1) << "n = " << n;
    EXPECT_TRUE(std::isfinite(v.v));

    Counted::divisions = 0;
    tcf::eval_onediv<Counted>(sp(z), sp(w), Counted(2.5)).value();
    EXPECT_EQ(Counted::divisions, 1);

    Counted::divisions = 0;
    tcf::eval_classic<Counted>(sp(z), sp(w), Counted(2.5));
    EXPECT_EQ(Counted::divisions, n - 1);
  }
}

TEST(NextWeight, ExactlyOneDivision) {
  const std::vector<Counted> z{0.0, 1.0, 2.0, 3.5}, y{1.0, 0.5, 1.0 / 3.0, 0.1}, w{1.0, -2.0, -1.0};
  Counted::divisions = 0;
  const auto r = tcf::next_weight<Counted>(sp(z), sp(y), sp(w));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(Counted::divisions, 1);
}

TEST(EvalOnediv, SymbolicDegreesFollowParityRule) {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int n = 1; n <= 8; ++n) {
    std::vector<Poly> z, w;
    for (int k = 0; k < n; ++k) {
      z.emplace_back(static_cast<double>(k));
      w.emplace_back(u(g));
    }
    const Poly zeta(std::vector<double>{0.0, 1.0});
    const auto r = tcf::eval_onediv_pair<Poly>(sp(z), sp(w), zeta);
    // n = 2m + 1 -> (m, m); n = 2m -> (m, m - 1)
    const int num = n / 2;
    const int den = (n - 1) / 2;
    EXPECT_EQ(r.p.degree(), num) << "n = " << n;
    EXPECT_EQ(r.q.degree(), den) << "n = " << n;
  }
}

TEST(EvalOnediv, SymbolicExpansionOfReciprocal) {
  // 1 + z/(-2 + (z-1)/(-1)) expands to p = 1, q = 1 + z
  const std::vector<Poly> z{Poly(0.0), Poly(1.0), Poly(2.0)}, w{Poly(1.0), Poly(-2.0), Poly(-1.0)};
  const auto r = tcf::eval_onediv_pair<Poly>(sp(z), sp(w), Poly(std::vector<double>{0.0, 1.0}));
  ASSERT_EQ(r.p.degree(), 0);
  ASSERT_EQ(r.q.degree(), 1);
  EXPECT_DOUBLE_EQ(r.q.c[0] / r.p.c[0], 1.0);
  EXPECT_DOUBLE_EQ(r.q.c[1] / r.p.c[0], 1.0);
}

TEST(Rescaling, LargeWeightsStayTransparent) {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  const int n = 60;
  std::vector<cplx> z(n), w(n);
  for (int k = 0; k < n; ++k) {
    z[k] = 0.01 * k;
    w[k] = 1e30 * u(g);
  }
  const cplx zeta(0.37, 0.2);
  const auto r = tcf::eval_onediv<cplx>(sp(z), sp(w), zeta);
  EXPECT_GT(r.scale_exponent, 0);
  const auto [v, dv] = classic_with_derivative(z, w, zeta);
  EXPECT_LE(std::abs(r.value() - v), 1e-13 * std::abs(v));
  EXPECT_LE(std::abs(r.derivative() - dv), 1e-10 * std::abs(dv));
  const auto pair = tcf::eval_onediv_pair<cplx>(sp(z), sp(w), zeta);
  EXPECT_EQ(pair.scale_exponent, r.scale_exponent);
  EXPECT_LE(std::abs(pair.value() - v), 1e-13 * std::abs(v));
}

TEST(Rescaling, TinyWeightsStayTransparent) {
  const int n = 61;
  std::vector<double> z(n), w(n);
  // every partial numerator and denominator ~1e-20: the pair shrinks ~1e-20 per level
  for (int k = 0; k < n; ++k) {
    z[k] = 1e-20 * k;
    w[k] = 1e-20 * (1.0 + 0.1 * (k % 7));
  }
  const double zeta = 1e-20 * (n + 0.5);
  const auto r = tcf::eval_onediv<double>(sp(z), sp(w), zeta);
  EXPECT_NE(r.scale_exponent, 0);
  EXPECT_FALSE(r.degenerate);
  const double v = tcf::eval_classic<double>(sp(z), sp(w), zeta);
  EXPECT_LE(std::abs(r.value() - v), 1e-12 * std::abs(v));
}

TEST(Rescaling, StridedOverflowFallsBackToEveryLevel) {
  // coefficients ~1e120 overflow between strided checks, but not within one level
  std::vector<double> z{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
  std::vector<double> w(z.size(), 1e120);
  const auto r = tcf::eval_onediv_pair<double>(sp(z), sp(w), 0.5);
  EXPECT_TRUE(std::isfinite(r.p) && std::isfinite(r.q));
  const double v = tcf::eval_classic<double>(sp(z), sp(w), 0.5);
  EXPECT_LE(std::abs(r.value() - v), 1e-13 * std::abs(v));
}

TEST(Rescaling, PairAndQuadScaleIdentically) {
  // rescaling all four of p, q, p', q' by 2^k changes neither r nor r'
  tcf::EvalResult<double> r{3.0, 7.0, -2.0, 5.0, 0, false};
  auto s = r;
  s.p *= 0x1p-512;
  s.q *= 0x1p-512;
  s.dp *= 0x1p-512;
  s.dq *= 0x1p-512;
  EXPECT_EQ(r.value(), s.value());
  EXPECT_EQ(r.derivative(), s.derivative());
}

TEST(NextWeight, FirstWeightIsValue) {
  const std::vector<cplx> z{cplx(0.5, 0.5)}, y{cplx(-3.0, 1.0)}, w{};
  const auto r = tcf::next_weight<cplx>(sp(z), sp(y), sp(w));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value, cplx(-3.0, 1.0));
}

TEST(NextWeight, SecondWeight) {
  const std::vector<double> z{0, 1}, y{0, 2}, w{0};
  const auto r = tcf::next_weight<double>(sp(z), sp(y), sp(w));
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r.value, 0.5);
}

TEST(NextWeight, ThirdWeightOfReciprocal) {
  const std::vector<double> z{0, 1, 2}, y{1, 0.5, 1.0 / 3.0}, w{1, -2};
  const auto r = tcf::next_weight<double>(sp(z), sp(y), sp(w));
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.value, -1.0, 1e-15);
  const std::vector<double> wf{1, -2, r.value};
  for (int k = 0; k < 3; ++k)
    EXPECT_NEAR(tcf::eval_onediv_pair<double>(sp(z), sp(wf), z[k]).value(), y[k], 1e-15);
}

TEST(NextWeight, UnattainablePointIsFlagged) {
  // the constant 1 through (0,1), (1,1): w_2 = (1 - 0)/(1 - 1) is infinite
  const std::vector<double> z{0, 1}, y{1, 1}, w{1};
  const auto r = tcf::next_weight<double>(sp(z), sp(y), sp(w));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.status, tcf::WeightStatus::unattainable);
}

TEST(NextWeight, InterpolatesRandomData) {
  std::mt19937_64 g(29);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 15;
    std::vector<cplx> z(n), y(n), w;
    for (int k = 0; k < n; ++k) {
      z[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n + 0.1 * trial);
      y[k] = std::exp(z[k]);
    }
    for (int k = 1; k <= n; ++k) {
      const auto r = tcf::next_weight<cplx>(std::span<const cplx>(z.data(), k),
                                            std::span<const cplx>(y.data(), k), sp(w));
      ASSERT_TRUE(r.ok());
      w.push_back(r.value);
    }
    double ymax = 0;
    for (auto v : y) ymax = std::max(ymax, std::abs(v));
    for (int k = 0; k < n; ++k)
      EXPECT_LE(std::abs(tcf::eval_onediv_pair<cplx>(sp(z), sp(w), z[k]).value() - y[k]), 1e-10 * ymax);
  }
}

TEST(GenericFraction, BothRoutesAgree) {
  std::mt19937_64 g(31);
  std::normal_distribution<double> nd;
  for (int n : {1, 2, 5, 25, 50}) {
    std::vector<double> a(n), b(n + 1);
    for (auto& x : a) x = nd(g);
    for (auto& x : b) x = nd(g) + 4.0;  // keep partial denominators away from 0
    const double c = tcf::cfrac_eval_classic<double>(sp(b), sp(a));
    const double o = tcf::cfrac_eval_onediv<double>(sp(b), sp(a)).value();
    EXPECT_NEAR(c, o, 1e-14 * std::abs(c)) << "n = " << n;
  }
}

TEST(GenericFraction, SmallCaseByHand) {
  // 1 + 2/(3 + 4/5) = 1 + 10/19
  const std::vector<double> b{1, 3, 5}, a{2, 4};
  EXPECT_DOUBLE_EQ(tcf::cfrac_eval_classic<double>(sp(b), sp(a)), 29.0 / 19.0);
  const auto f = tcf::cfrac_eval_onediv<double>(sp(b), sp(a));
  EXPECT_EQ(f.p, 29.0);
  EXPECT_EQ(f.q, 19.0);
}

TEST(EvalClassic, ZeroIntermediatePropagatesWithoutTrapping) {
  // v_2 = 0 makes the next level divide by zero
  const std::vector<double> z{0, 1}, w{1, 0};
  const double v = tcf::eval_classic<double>(sp(z), sp(w), 2.0);
  EXPECT_TRUE(std::isinf(v));
}
