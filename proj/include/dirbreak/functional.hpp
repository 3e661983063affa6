#pragma once

#include <concepts>
#include <stdexcept>
#include <string_view>
#include <variant>

#include "dirbreak/geom.hpp"
#include "dirbreak/measure.hpp"

namespace dirbreak {

/// The functional has no value at this measure (the measure lies outside its domain).
struct Undefined {
  bool operator==(const Undefined&) const = default;
};

/// Result of evaluating a directional functional. Undefined is a regular outcome, not an error.
using Evaluation = std::variant<Undefined, Direction>;

inline bool is_defined(const Evaluation& e) { return std::holds_alternative<Direction>(e); }

/// An equivariant functional T: P_T -> Theta. Its domain P_T is the set of measures on
/// which evaluate() returns a Direction; implementations must satisfy
///   T(P^g) = g(T(P))            for P in P_T and every rotation g,
///   P in P_T  =>  P^g in P_T.
template <class T>
concept DirectionalFunctional = requires(const T& t, const Measure& p) {
  { t.name() } -> std::convertible_to<std::string_view>;
  { t.space() } -> std::same_as<Space>;
  { t.evaluate(p) } -> std::same_as<Evaluation>;
};

/// Functionals that can evaluate point-mass contaminations of a fixed P without
/// materializing the mixture: contamination_evaluator(P)(x, eps) = T((1 - eps) P + eps delta_x).
template <class T>
concept ContaminationAware = DirectionalFunctional<T> && requires(const T& t, const Measure& p, const Direction& x) {
  { t.contamination_evaluator(p)(x, 0.5) } -> std::same_as<Evaluation>;
};

template <DirectionalFunctional T>
bool in_domain(const T& functional, const Measure& p) {
  return is_defined(functional.evaluate(p));
}

namespace detail {

inline Evaluation direction_of(Space s, const Vec3& moment) {
  const Resultant r = resultant_from_vector(s, moment);
  if (!r.direction) return Undefined{};
  return *r.direction;
}

inline Evaluation mean_direction(const Measure& p, Space expected, const char* who) {
  if (p.space() != expected) throw std::invalid_argument(std::string(who) + ": measure lives on the wrong space");
  return direction_of(expected, first_moment(p));
}

/// T((1 - eps) P + eps delta_x) for a mean functional: the first moment is affine in eps.
inline auto mean_contamination(const Measure& p) {
  return [space = p.space(), v = first_moment(p)](const Direction& x, double eps) -> Evaluation {
    if (eps == 0.0) return direction_of(space, v);
    if (eps == 1.0) return direction_of(space, x.unit_vector());
    return direction_of(space, (1.0 - eps) * v + eps * x.unit_vector());
  };
}

}  // namespace detail

/// Direction of the mean resultant vector on S^1; undefined when R < kTauDomain.
struct CircularMean {
  std::string_view name() const { return "circular_mean"; }
  Space space() const { return Space::Circle; }
  Evaluation evaluate(const Measure& p) const { return detail::mean_direction(p, Space::Circle, "circular_mean"); }
  auto contamination_evaluator(const Measure& p) const { return detail::mean_contamination(p); }
};

/// Normalized first moment on S^2; undefined when its norm is below kTauDomain.
struct SphericalMean {
  std::string_view name() const { return "spherical_mean"; }
  Space space() const { return Space::Sphere; }
  Evaluation evaluate(const Measure& p) const { return detail::mean_direction(p, Space::Sphere, "spherical_mean"); }
  auto contamination_evaluator(const Measure& p) const { return detail::mean_contamination(p); }
};

inline Evaluation circular_mean(const Measure& p) { return CircularMean{}.evaluate(p); }
inline Evaluation spherical_mean(const Measure& p) { return SphericalMean{}.evaluate(p); }

/// Angular distance between T(P^g) and g(T(P)). Throws std::domain_error when P is outside the domain.
template <DirectionalFunctional T>
double check_equivariance(const T& functional, const Measure& p, const GroupElement& g) {
  const Evaluation before = functional.evaluate(p);
  if (!is_defined(before)) throw std::domain_error("check_equivariance: measure outside the functional's domain");
  const Evaluation after = functional.evaluate(pushforward(p, g));
  if (!is_defined(after)) throw std::logic_error("check_equivariance: domain not closed under the group action");
  return angular_distance(std::get<Direction>(after), apply(g, std::get<Direction>(before)));
}

}  // namespace dirbreak
