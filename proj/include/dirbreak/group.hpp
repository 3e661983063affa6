#pragma once

#include <stdexcept>
#include <vector>

#include "dirbreak/geom.hpp"
#include "dirbreak/measure.hpp"
#include "dirbreak/metric.hpp"

namespace dirbreak {

/// Default tolerance for invariance checks on measures.
inline constexpr double kInvarianceTol = 1e-9;

/// The cyclic group {identity, g, ..., g^(k-1)} generated by an element of order k >= 2.
/// Elements are precomputed and checked for closure and distinctness.
class FiniteSubgroup {
 public:
  FiniteSubgroup(const GroupElement& generator, int k) : generator_(generator), k_(k) {
    if (k < 2) throw std::invalid_argument("finite subgroup order must be at least 2");
    elements_.reserve(k);
    for (int j = 0; j < k; ++j) elements_.push_back(generator.power(j));
    if (!generator.power(k).is_identity()) throw std::invalid_argument("generator^k is not the identity");
    for (int j = 1; j < k; ++j)
      if (elements_[j].is_identity()) throw std::invalid_argument("generator has order smaller than declared k");
  }

  /// Rotations by multiples of 2*pi/k (about the z axis on the sphere).
  static FiniteSubgroup cyclic(Space s, int k) {
    if (k < 2) throw std::invalid_argument("finite subgroup order must be at least 2");
    if (s == Space::Circle) return FiniteSubgroup(GroupElement::rotation(kTwoPi / k, k), k);
    return FiniteSubgroup(GroupElement::sphere_rotation({0.0, 0.0, 1.0}, kTwoPi / k, k), k);
  }

  /// {identity, antipodal map}.
  static FiniteSubgroup antipodal(Space s) { return FiniteSubgroup(GroupElement::antipodal(s), 2); }

  int order() const { return k_; }
  Space space() const { return generator_.space(); }
  const GroupElement& generator() const { return generator_; }
  /// elements()[j] = generator^j.
  const std::vector<GroupElement>& elements() const { return elements_; }

 private:
  GroupElement generator_;
  int k_;
  std::vector<GroupElement> elements_;
};

namespace detail {

inline Measure orbit_average(const Measure& p, const FiniteSubgroup& group, int first) {
  require_same_space(p.space(), group.space(), "symmetrize");
  const auto& els = group.elements();
  const double w = 1.0 / static_cast<double>(els.size() - first);
  std::vector<std::pair<Measure, double>> parts;
  for (std::size_t j = first; j < els.size(); ++j) parts.emplace_back(pushforward(p, els[j]), w);
  if (parts.size() == 1) return parts.front().first;
  // Equal weights of 1/3, 1/6, ... do not sum to 1 exactly; hand the decomposition over directly.
  Decomposition d;
  for (const auto& [m, wm] : parts) {
    const Decomposition dm = m.decompose();
    for (const auto& a : dm.atoms) d.atoms.push_back({a.at, a.weight * wm});
    for (const auto& [vm, wv] : dm.von_mises) d.von_mises.emplace_back(vm, wv * wm);
    d.uniform_mass += dm.uniform_mass * wm;
  }
  return Measure::from_decomposition(p.space(), std::move(d));
}

}  // namespace detail

/// P_k = (1/k) sum_{j=0}^{k-1} P^{g^j}; invariant under every element of the group.
inline Measure symmetrize(const Measure& p, const FiniteSubgroup& group) { return detail::orbit_average(p, group, 0); }

/// (1/(k-1)) sum_{j=1}^{k-1} P^{g^j}, so that P_k = (1/k) P + ((k-1)/k) of this.
inline Measure residual_symmetrize(const Measure& p, const FiniteSubgroup& group) {
  return detail::orbit_average(p, group, 1);
}

/// Whether P^g = P. Atomic parts are compared in total variation, parametric
/// parts by their parameters (each von Mises component must map onto one of
/// equal weight and kappa; uniform parts are always fixed).
inline bool is_invariant(const Measure& p, const GroupElement& g, double tol = kInvarianceTol) {
  require_same_space(p.space(), g.space(), "is_invariant");
  const Decomposition d = p.decompose();
  const Decomposition dg = pushforward(p, g).decompose();

  std::vector<double> diffs;
  for (const auto& [at, wp, wq] : detail::match_atoms(d.atoms, dg.atoms)) diffs.push_back(std::abs(wp - wq));
  if (0.5 * numerics::compensated_sum(diffs) > tol) return false;

  if (std::abs(d.uniform_mass - dg.uniform_mass) > tol) return false;
  for (const auto& [vm, w] : dg.von_mises) {
    if (vm.kappa == 0.0) continue;  // uniform in disguise
    bool found = false;
    for (const auto& [orig, wo] : d.von_mises)
      if (orig.kappa == vm.kappa && std::abs(wo - w) <= tol && angular_distance(orig.mu, vm.mu) <= tol) found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace dirbreak
