#pragma once
// Test-only generators and independent oracles. Nothing here calls into the
// library's quadrature, metric or breakdown code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "dirbreak/dirbreak.hpp"

namespace dirbreak::testkit {

inline constexpr std::uint64_t kSeed = 0x5EED;
inline constexpr double kPiT = std::numbers::pi;

// ---------------------------------------------------------------------------
// Generators

inline Measure random_discrete_circle(std::mt19937_64& rng, int max_atoms = 8) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPiT), w(0.05, 1.0);
  const int n = count(rng);
  std::vector<double> ws(n);
  double s = 0.0;
  for (auto& x : ws) s += (x = w(rng));
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) atoms.push_back({Direction::circle(angle(rng)), ws[i] / s});
  return Measure::discrete(atoms);
}

inline Measure random_discrete_sphere(std::mt19937_64& rng, int max_atoms = 6) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> w(0.05, 1.0);
  const int n = count(rng);
  std::vector<double> ws(n);
  double s = 0.0;
  for (auto& x : ws) s += (x = w(rng));
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) atoms.push_back({Direction::sphere({g(rng), g(rng), g(rng)}), ws[i] / s});
  return Measure::discrete(atoms);
}

/// Discrete, von Mises, or a mixture of a von Mises law with atoms or uniform.
inline Measure random_circle_measure(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPiT), kappa(0.1, 8.0), eps(0.05, 0.6);
  switch (pick(rng)) {
    case 0:
      return random_discrete_circle(rng);
    case 1:
      return Measure::von_mises(angle(rng), kappa(rng));
    case 2:
      return mix(Measure::von_mises(angle(rng), kappa(rng)), random_discrete_circle(rng, 3), eps(rng));
    default:
      return mix(Measure::von_mises(angle(rng), kappa(rng)), Measure::uniform(Space::Circle), eps(rng));
  }
}

inline GroupElement random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPiT);
  return GroupElement::rotation(angle(rng));
}

inline GroupElement random_sphere_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPiT);
  return GroupElement::sphere_rotation({g(rng), g(rng), g(rng)}, angle(rng));
}

/// Best-Fisher von Mises sampler.
inline double sample_von_mises(std::mt19937_64& rng, double mu, double kappa) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  while (true) {
    const double z = std::cos(kPiT * u(rng));
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    const double u2 = u(rng);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double sign = u(rng) > 0.5 ? 1.0 : -1.0;
      return mu + sign * std::acos(f);
    }
  }
}

// ---------------------------------------------------------------------------
// Quadrature oracles (periodic trapezoid rule; spectrally accurate for smooth
// periodic integrands, O(h^2) at the kinks of |f - g|).

inline double vm_density_oracle(double theta, double mu, double kappa) {
  return std::exp(kappa * std::cos(theta - mu)) / (2.0 * kPiT * std::cyl_bessel_i(0.0, kappa));
}

inline double trapezoid_periodic(const std::function<double(double)>& f, int n) {
  double s = 0.0;
  const double h = 2.0 * kPiT / n;
  for (int i = 0; i < n; ++i) s += f(i * h);
  return s * h;
}

/// Mean resultant length of vM(0, kappa) as the integral of cos(theta) f(theta).
inline double vm_resultant_oracle(double kappa) {
  return trapezoid_periodic([&](double t) { return std::cos(t) * vm_density_oracle(t, 0.0, kappa); }, 20000);
}

/// Half the L1 distance between two densities.
inline double tv_density_oracle(const std::function<double(double)>& f, const std::function<double(double)>& g) {
  return 0.5 * trapezoid_periodic([&](double t) { return std::abs(f(t) - g(t)); }, 2'000'000);
}

/// max - min of F - G on a fine midpoint grid for two densities.
inline double kuiper_density_oracle(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                    int n = 400'000) {
  const double h = 2.0 * kPiT / n;
  double acc = 0.0, hi = 0.0, lo = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) * h;
    acc += (f(t) - g(t)) * h;
    hi = std::max(hi, acc);
    lo = std::min(lo, acc);
  }
  return hi - lo;
}

/// Classical Kuiper statistic of a sample against a continuous cdf F (values in [0,1]).
inline double kuiper_sample_oracle(std::vector<double> angles, const std::function<double(double)>& cdf) {
  for (auto& a : angles) a = std::fmod(std::fmod(a, 2.0 * kPiT) + 2.0 * kPiT, 2.0 * kPiT);
  std::sort(angles.begin(), angles.end());
  const double n = static_cast<double>(angles.size());
  double dplus = 0.0, dminus = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double fi = cdf(angles[i]);
    dplus = std::max(dplus, (i + 1) / n - fi);
    dminus = std::max(dminus, fi - i / n);
  }
  return dplus + dminus;
}

/// cdf of vM(mu, kappa) from angle 0 by composite Simpson on a fine grid.
inline double vm_cdf_oracle(double theta, double mu, double kappa, int n = 20000) {
  if (theta <= 0.0) return 0.0;
  const double h = theta / n;
  double s = vm_density_oracle(0.0, mu, kappa) + vm_density_oracle(theta, mu, kappa);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * vm_density_oracle(i * h, mu, kappa);
  return s * h / 3.0;
}

// ---------------------------------------------------------------------------
// Finite-sample breakdown oracle: enumerate every kept subset by bitmask, then try to
// place the freed points explicitly (greedy on a 720-point grid, the last two in
// closed form) and check the modified sample's resultant directly.

inline bool place_and_check(std::vector<std::array<double, 2>> kept_points, int free_points, int n) {
  const int grid = 720;
  double rx = 0.0, ry = 0.0;
  for (const auto& p : kept_points) {
    rx += p[0];
    ry += p[1];
  }
  std::vector<std::array<double, 2>> placed;
  auto add = [&](double angle) {
    placed.push_back({std::cos(angle), std::sin(angle)});
    rx += placed.back()[0];
    ry += placed.back()[1];
  };
  int remaining = free_points;
  while (remaining > 2) {
    // Grid direction closest to -r.
    const double target = std::atan2(-ry, -rx);
    const double step = 2.0 * kPiT / grid;
    add(std::round(target / step) * step);
    --remaining;
  }
  const double len = std::hypot(rx, ry);
  if (remaining == 2) {
    if (len > 2.0) return false;
    const double base = std::atan2(-ry, -rx);
    const double spread = std::acos(std::min(1.0, len / 2.0));
    add(base + spread);
    add(base - spread);
  } else if (remaining == 1) {
    if (len == 0.0) return false;
    add(std::atan2(-ry, -rx));
  }
  // Resultant of the full modified sample, recomputed from scratch.
  double sx = 0.0, sy = 0.0;
  for (const auto& p : kept_points) {
    sx += p[0];
    sy += p[1];
  }
  for (const auto& p : placed) {
    sx += p[0];
    sy += p[1];
  }
  return std::hypot(sx, sy) / n < kTauDomain;
}

/// Smallest m found by the constructive oracle; n when nothing works.
inline int fsbp_oracle(const std::vector<double>& angles) {
  const int n = static_cast<int>(angles.size());
  int best = n + 1;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::array<double, 2>> kept;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) kept.push_back({std::cos(angles[i]), std::sin(angles[i])});
    const int m = n - static_cast<int>(kept.size());
    if (m >= best) continue;
    if (place_and_check(kept, m, n)) best = m;
  }
  return best;
}

}  // namespace dirbreak::testkit
