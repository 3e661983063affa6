#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace dirbreak::numerics {

/// Absolute tolerance for continuous-density integrals over a full turn.
inline constexpr double kQuadratureTol = 1e-9;

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
/// The interval is pre-split into `pieces` panels so narrow peaks are not missed
/// by the first coarse estimate.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = kQuadratureTol, int pieces = 16,
                        int max_depth = 48) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  const double h = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == pieces) ? b : lo + h;
    const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol / pieces, max_depth);
  }
  return total;
}

/// exp(-x) * I0(x) for x >= 0.
inline double bessel_i0_scaled(double x) {
  if (x < 0.0) throw std::domain_error("bessel_i0_scaled: negative argument");
  if (x <= 500.0) return std::exp(-x) * std::cyl_bessel_i(0.0, x);
  // Large-argument asymptotic expansion; relative error far below 1e-12 here.
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    const double c = 2.0 * k - 1.0;
    term *= c * c / (8.0 * k * x);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

/// Mean resultant length of the von Mises law, A(kappa) = I1(kappa) / I0(kappa).
/// Evaluated with the Gauss continued fraction for I_{n+1}/I_n, summed backwards.
inline double bessel_ratio_i1_i0(double kappa) {
  if (kappa < 0.0) throw std::domain_error("bessel ratio: negative kappa");
  if (kappa == 0.0) return 0.0;
  const int terms = 64 + static_cast<int>(2.0 * kappa);
  if (terms > 4'000'000) return 1.0 - 0.5 / kappa;
  // I1/I0 = 1 / (2/x + 1 / (4/x + 1 / (6/x + ...)))
  double tail = 0.0;
  for (int n = terms; n >= 1; --n) tail = 1.0 / (2.0 * n / kappa + tail);
  return tail;
}

/// Sum with Neumaier compensation; exact for short runs of equal terms.
inline double compensated_sum(std::span<const double> xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

}  // namespace dirbreak::numerics
