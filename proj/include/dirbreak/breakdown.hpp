#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirbreak/functional.hpp"
#include "dirbreak/group.hpp"
#include "dirbreak/measure.hpp"
#include "dirbreak/metric.hpp"

namespace dirbreak {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Resolution of the contamination search. Contaminations are point masses on a
/// `phi_points` grid anchored at T(P); masses run over j / eps_steps, j = 1..eps_steps.
struct SearchParams {
  int eps_steps = 2000;
  int phi_points = 720;
  /// A contaminated value counts as flipped when it is at least pi - angle_tol from T(P).
  double angle_tol = 1e-3;

  double eps_step() const { return 1.0 / eps_steps; }
};

struct BiasBreakdown {
  /// Smallest grid contamination mass producing a flip; empty when none up to 1 does.
  std::optional<double> epsilon;
  /// Location of the flipping point mass (first in grid order at `epsilon`).
  std::optional<Direction> contamination_at;
  /// d(P, Q) for the reported contamination; never exceeds `epsilon`.
  std::optional<double> achieved_distance;
};

namespace detail {

template <DirectionalFunctional T, class Evaluate>
BiasBreakdown bias_search(const T& functional, const Measure& p, MetricKind kind, const SearchParams& search,
                          const Evaluate& contaminated) {
  if (p.space() != Space::Circle) throw std::invalid_argument("bias_breakdown: circle measures only");
  if (search.eps_steps < 1 || search.phi_points < 1) throw std::invalid_argument("bias_breakdown: empty search grid");
  const Evaluation base = functional.evaluate(p);
  if (!is_defined(base)) throw std::domain_error("bias_breakdown: measure outside the functional's domain");
  const Direction center = std::get<Direction>(base);
  const double flip_at = kPi - search.angle_tol;

  std::vector<Direction> grid;
  grid.reserve(search.phi_points);
  for (int i = 0; i < search.phi_points; ++i)
    grid.push_back(Direction::circle(center.angle() + kTwoPi * i / search.phi_points));

  // Rows in increasing eps, cells in grid order: the first hit is the grid minimum.
  BiasBreakdown out;
  for (int j = 1; j <= search.eps_steps; ++j) {
    const double eps = static_cast<double>(j) / search.eps_steps;
    for (const auto& at : grid) {
      const Evaluation value = contaminated(at, eps);
      if (!is_defined(value) || angular_distance(center, std::get<Direction>(value)) < flip_at) continue;
      out.epsilon = eps;
      out.contamination_at = at;
      out.achieved_distance = distance(kind, p, mix(p, Measure::point_mass(at), eps));
      return out;
    }
  }
  return out;
}

}  // namespace detail

/// Gross-error search for the 180-degree breakdown of T at P:
///   inf { e : |T(P) - T(Q)| = pi for some Q with d(P, Q) < e },
/// restricted to Q = (1 - e) P + e delta_phi on the search grid. Circle only.
/// Uses the functional's contamination evaluator when it has one.
template <DirectionalFunctional T>
BiasBreakdown bias_breakdown(const T& functional, const Measure& p, MetricKind kind, const SearchParams& search = {}) {
  if constexpr (ContaminationAware<T>) {
    if (p.space() == Space::Circle)
      return detail::bias_search(functional, p, kind, search, functional.contamination_evaluator(p));
  }
  return detail::bias_search(functional, p, kind, search, [&](const Direction& at, double eps) {
    return functional.evaluate(mix(p, Measure::point_mass(at), eps));
  });
}

/// Same search, always materializing each contaminated mixture.
template <DirectionalFunctional T>
BiasBreakdown bias_breakdown_reference(const T& functional, const Measure& p, MetricKind kind,
                                       const SearchParams& search = {}) {
  return detail::bias_search(functional, p, kind, search, [&](const Direction& at, double eps) {
    return functional.evaluate(mix(p, Measure::point_mass(at), eps));
  });
}

/// Contamination mass at which mixing an antipodal point mass into P zeroes the
/// resultant: R / (1 + R).
inline double flip_threshold_circular_mean(const Measure& p) {
  if (p.space() != Space::Circle) throw std::invalid_argument("flip_threshold_circular_mean: circle measures only");
  const Resultant r = resultant(p);
  if (!r.direction) throw std::domain_error("flip_threshold_circular_mean: zero resultant");
  return r.length / (1.0 + r.length);
}

struct DefinabilityBounds {
  double uniform;       // d(P, U)
  double symmetrized;   // d(P, P_k)
  double group;         // (k - 1) / k
};

/// Upper bounds on the definability breakdown point of T at P. Requires that the
/// symmetrization of P leaves T undefined; throws std::logic_error otherwise.
template <DirectionalFunctional T>
DefinabilityBounds definability_bounds(const T& functional, const Measure& p, MetricKind kind,
                                       const FiniteSubgroup& group) {
  require_same_space(p.space(), functional.space(), "definability_bounds");
  const Measure pk = symmetrize(p, group);
  if (in_domain(functional, pk))
    throw std::logic_error("definability_bounds: symmetrized measure is inside the functional's domain");
  const int k = group.order();
  DefinabilityBounds b{distance(kind, p, Measure::uniform(p.space())), distance(kind, p, pk),
                       static_cast<double>(k - 1) / k};
  if (b.symmetrized > b.group + 1e-12)
    throw std::logic_error("definability_bounds: d(P, P_k) exceeds (k-1)/k; metric contract violated");
  return b;
}

/// Total-variation distance from P to the set of g-invariant measures for an
/// involution g. Equals tv(P, (P + P^g) / 2) = tv(P, P^g) / 2.
inline double invariant_set_distance_involution(const Measure& p, const GroupElement& g) {
  if (g.is_identity() || !g.power(2).is_identity())
    throw std::invalid_argument("invariant_set_distance_involution: g is not an involution");
  return tv(p, symmetrize(p, FiniteSubgroup(g, 2)));
}

struct FiniteSampleBreakdown {
  int m = 0;              // replacements needed
  int n = 0;              // sample size
  double fraction = 0.0;  // m / n
  bool exact = true;      // false: heuristic upper bound (large samples)
  bool attainable = true; // false only for n = 1, where no replacement zeroes the resultant
};

/// Largest sample size solved by exhaustive subset enumeration.
inline constexpr int kExactFsbpLimit = 20;

namespace detail {

/// Whether `free_points` unit vectors can cancel a kept-subset resultant of norm `kept_norm`
/// in a sample of size n (zero resultant up to n * kTauDomain).
inline bool can_cancel(double kept_norm, int free_points, int n) {
  const double slack = n * kTauDomain;
  if (free_points == 0) return kept_norm < slack;
  if (free_points == 1) return std::abs(kept_norm - 1.0) < slack;
  return kept_norm <= free_points + slack;
}

}  // namespace detail

/// Smallest number of sample points whose replacement makes the circular mean undefined.
/// Exact for n <= kExactFsbpLimit; above that a greedy removal gives an upper bound.
inline FiniteSampleBreakdown finite_sample_breakdown(std::span<const Direction> sample) {
  const int n = static_cast<int>(sample.size());
  if (n == 0) throw std::invalid_argument("finite_sample_breakdown: empty sample");
  std::vector<std::array<double, 2>> u;
  for (const auto& x : sample) {
    if (x.space() != Space::Circle) throw std::invalid_argument("finite_sample_breakdown: circle samples only");
    u.push_back({std::cos(x.angle()), std::sin(x.angle())});
  }

  FiniteSampleBreakdown out;
  out.n = n;
  auto finish = [&](int m) {
    out.m = m;
    out.fraction = static_cast<double>(m) / n;
    return out;
  };

  if (n <= kExactFsbpLimit) {
    const std::uint32_t full = (1u << n) - 1u;
    std::vector<std::array<double, 2>> sums(std::size_t{1} << n, {0.0, 0.0});
    std::vector<bool> feasible(n + 1, false);
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (mask != 0) {
        const int low = std::countr_zero(mask);
        const auto& prev = sums[mask & (mask - 1u)];
        sums[mask] = {prev[0] + u[low][0], prev[1] + u[low][1]};
      }
      const int m = n - std::popcount(mask);
      if (!feasible[m] && detail::can_cancel(std::hypot(sums[mask][0], sums[mask][1]), m, n)) feasible[m] = true;
    }
    for (int m = 0; m <= n; ++m)
      if (feasible[m]) return finish(m);
    out.attainable = false;
    return finish(n);
  }

  out.exact = false;
  std::vector<std::array<double, 2>> kept = u;
  double sx = 0.0, sy = 0.0;
  for (const auto& v : kept) {
    sx += v[0];
    sy += v[1];
  }
  for (int m = 0; m <= n; ++m) {
    if (detail::can_cancel(std::hypot(sx, sy), m, n)) return finish(m);
    // Drop the kept point most aligned with the current resultant.
    auto it = std::max_element(kept.begin(), kept.end(), [&](const auto& a, const auto& b) {
      return a[0] * sx + a[1] * sy < b[0] * sx + b[1] * sy;
    });
    sx -= (*it)[0];
    sy -= (*it)[1];
    kept.erase(it);
  }
  out.attainable = false;
  return finish(n);
}

struct FragilityDemo {
  double before;
  double after;
};

/// Distance to the antipodally invariant measures, in total variation, of an
/// antipodally paired sample of size n before and after moving one point by `delta`.
inline FragilityDemo tv_fragility_demo(int n, double delta) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("tv_fragility_demo: n must be even and >= 2");
  if (!(delta > 0.0)) throw std::invalid_argument("tv_fragility_demo: delta must be positive");
  std::vector<Direction> sample;
  const int pairs = n / 2;
  for (int i = 0; i < pairs; ++i) {
    const double theta = (i + 0.25) * kTwoPi / n;
    sample.push_back(Direction::circle(theta));
    sample.push_back(Direction::circle(theta + kPi));
  }
  const GroupElement g = GroupElement::antipodal(Space::Circle);
  const double before = invariant_set_distance_involution(Measure::empirical(sample), g);

  const Direction moved = Direction::circle(sample.front().angle() + delta);
  for (std::size_t i = 1; i < sample.size(); ++i)
    if (angular_distance(moved, sample[i]) < kAtomMergeTol ||
        angular_distance(antipode(moved), sample[i]) < kAtomMergeTol)
      throw std::invalid_argument("tv_fragility_demo: delta moves the point onto another pair");
  sample.front() = moved;
  const double after = invariant_set_distance_involution(Measure::empirical(sample), g);
  return {before, after};
}

/// Everything computed for one (functional, measure, metric, group) configuration.
struct BreakdownReport {
  std::string functional;
  MetricKind metric = MetricKind::TotalVariation;
  std::optional<double> bias_breakdown;
  std::optional<double> achieved_distance;
  double bound_uniform = 0.0;
  double bound_symmetrized = 0.0;
  double bound_group = 0.0;
  int group_order = 2;
  double eps_step = 0.0;
  int phi_points = 0;
  double angle_tol = 0.0;
  std::uint64_t seed = kDefaultSeed;
};

template <DirectionalFunctional T>
BreakdownReport breakdown_report(const T& functional, const Measure& p, MetricKind kind, const FiniteSubgroup& group,
                                 const SearchParams& search = {}, std::uint64_t seed = kDefaultSeed) {
  BreakdownReport r;
  r.functional = std::string(functional.name());
  r.metric = kind;
  const BiasBreakdown bias = bias_breakdown(functional, p, kind, search);
  r.bias_breakdown = bias.epsilon;
  r.achieved_distance = bias.achieved_distance;
  const DefinabilityBounds b = definability_bounds(functional, p, kind, group);
  r.bound_uniform = b.uniform;
  r.bound_symmetrized = b.symmetrized;
  r.bound_group = b.group;
  r.group_order = group.order();
  r.eps_step = search.eps_step();
  r.phi_points = search.phi_points;
  r.angle_tol = search.angle_tol;
  r.seed = seed;
  return r;
}

}  // namespace dirbreak
