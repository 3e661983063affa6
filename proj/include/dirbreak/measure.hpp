#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "dirbreak/geom.hpp"
#include "dirbreak/numerics.hpp"

namespace dirbreak {

/// Resultant lengths below this are treated as zero; the mean direction is then undefined.
inline constexpr double kTauDomain = 1e-10;
/// Atoms closer than this (angular distance) are the same point.
inline constexpr double kAtomMergeTol = 1e-12;
/// Allowed deviation of a weight vector's sum from 1.
inline constexpr double kWeightSumTol = 1e-12;

struct Atom {
  Direction at;
  double weight;
};

struct Discrete {
  std::vector<Atom> atoms;  // merged, sorted, weights > 0 summing to 1
};

/// Circle only.
struct VonMises {
  Direction mu;
  double kappa;
};

struct Uniform {};

struct PointMass {
  Direction at;
};

using Part = std::variant<Discrete, VonMises, Uniform, PointMass>;

struct Component {
  Part part;
  double weight;
};

/// Always flat: no component is itself a mixture.
struct Mixture {
  std::vector<Component> components;
};

/// Singular and absolutely continuous parts of a measure with absolute masses.
struct Decomposition {
  std::vector<Atom> atoms;  // absolute masses, merged and sorted
  std::vector<std::pair<VonMises, double>> von_mises;
  double uniform_mass = 0.0;

  double atomic_mass() const {
    std::vector<double> w;
    w.reserve(atoms.size());
    for (const auto& a : atoms) w.push_back(a.weight);
    return numerics::compensated_sum(w);
  }
  double continuous_mass() const {
    double m = uniform_mass;
    for (const auto& [vm, w] : von_mises) m += w;
    return m;
  }
  bool purely_atomic() const { return von_mises.empty() && uniform_mass == 0.0; }
  bool purely_continuous() const { return atoms.empty(); }
};

namespace detail {

inline double weight_sum(std::span<const double> w) { return numerics::compensated_sum(w); }

inline void check_weight(double w) {
  if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("weights must be finite and nonnegative");
}

inline bool lex_less(const Vec3& a, const Vec3& b) { return a < b; }

/// Merge atoms within kAtomMergeTol and sort them canonically. Weights are summed.
inline std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) return atoms;
  const Space space = atoms.front().at.space();
  std::vector<Atom> out;
  if (space == Space::Circle) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.at.angle() < b.at.angle(); });
    for (const auto& a : atoms) {
      if (!out.empty() && angular_distance(out.back().at, a.at) < kAtomMergeTol)
        out.back().weight += a.weight;
      else
        out.push_back(a);
    }
    // 2*pi - tiny and 0 are the same point.
    if (out.size() > 1 && angular_distance(out.back().at, out.front().at) < kAtomMergeTol) {
      out.front().weight += out.back().weight;
      out.pop_back();
    }
    return out;
  }
  for (const auto& a : atoms) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Atom& b) { return angular_distance(a.at, b.at) < kAtomMergeTol; });
    if (it != out.end())
      it->weight += a.weight;
    else
      out.push_back(a);
  }
  std::sort(out.begin(), out.end(),
            [](const Atom& a, const Atom& b) { return lex_less(a.at.unit_vector(), b.at.unit_vector()); });
  return out;
}

}  // namespace detail

/// A probability measure on the circle or the sphere.
class Measure {
 public:
  using Variant = std::variant<Discrete, VonMises, Uniform, PointMass, Mixture>;

  /// Weighted atoms. Zero weights are dropped; the rest must sum to 1.
  static Measure discrete(std::vector<Atom> atoms) {
    std::erase_if(atoms, [](const Atom& a) {
      detail::check_weight(a.weight);
      return a.weight == 0.0;
    });
    if (atoms.empty()) throw std::invalid_argument("discrete measure needs at least one atom");
    const Space s = atoms.front().at.space();
    std::vector<double> w;
    for (const auto& a : atoms) {
      require_same_space(s, a.at.space(), "discrete");
      w.push_back(a.weight);
    }
    if (std::abs(detail::weight_sum(w) - 1.0) > kWeightSumTol)
      throw std::invalid_argument("discrete weights must sum to 1");
    return Measure(s, Discrete{detail::merge_atoms(std::move(atoms))});
  }

  /// Equal weights 1/n on the sample points (duplicates merge).
  static Measure empirical(std::span<const Direction> sample) {
    if (sample.empty()) throw std::invalid_argument("empirical measure of an empty sample");
    const double w = 1.0 / static_cast<double>(sample.size());
    std::vector<Atom> atoms;
    atoms.reserve(sample.size());
    for (const auto& x : sample) atoms.push_back({x, w});
    const Space s = sample.front().space();
    for (const auto& a : atoms) require_same_space(s, a.at.space(), "empirical");
    return Measure(s, Discrete{detail::merge_atoms(std::move(atoms))});
  }

  static Measure von_mises(double mu, double kappa) {
    if (!std::isfinite(kappa) || kappa < 0.0) throw std::invalid_argument("von Mises kappa must be >= 0");
    return Measure(Space::Circle, VonMises{Direction::circle(mu), kappa});
  }

  static Measure uniform(Space s) { return Measure(s, Uniform{}); }

  static Measure point_mass(const Direction& x) { return Measure(x.space(), PointMass{x}); }

  /// Weighted combination of measures, flattened to depth one. Atomic parts are
  /// pooled into a single Discrete component, uniform parts into one Uniform, and
  /// identical von Mises components are merged. A single surviving part is returned bare.
  static Measure mixture(const std::vector<std::pair<Measure, double>>& parts) {
    if (parts.empty()) throw std::invalid_argument("mixture needs at least one component");
    const Space s = parts.front().first.space();
    std::vector<double> ws;
    for (const auto& [m, w] : parts) {
      require_same_space(s, m.space(), "mixture");
      detail::check_weight(w);
      ws.push_back(w);
    }
    if (std::abs(detail::weight_sum(ws) - 1.0) > kWeightSumTol)
      throw std::invalid_argument("mixture weights must sum to 1");

    std::vector<std::pair<Measure, double>> nonzero;
    for (const auto& pw : parts)
      if (pw.second > 0.0) nonzero.push_back(pw);
    if (nonzero.size() == 1) return nonzero.front().first;

    Decomposition d;
    for (const auto& [m, w] : nonzero) m.accumulate(d, w);
    return from_decomposition(s, std::move(d));
  }

  Space space() const { return space_; }
  const Variant& variant() const { return v_; }

  template <class T>
  bool holds() const { return std::holds_alternative<T>(v_); }

  /// Singular/continuous split with absolute masses.
  Decomposition decompose() const {
    Decomposition d;
    accumulate(d, 1.0);
    d.atoms = detail::merge_atoms(std::move(d.atoms));
    return d;
  }

  /// True when the measure has no absolutely continuous part.
  bool is_atomic() const { return holds<Discrete>() || holds<PointMass>(); }

  const char* kind_name() const {
    static constexpr const char* names[] = {"discrete", "von_mises", "uniform", "point_mass", "mixture"};
    return names[v_.index()];
  }

  /// Rebuild a canonical measure from a decomposition (used by mixture and pushforward).
  static Measure from_decomposition(Space s, Decomposition d) {
    std::vector<Atom> atoms = detail::merge_atoms(std::move(d.atoms));
    std::vector<std::pair<VonMises, double>> vms;
    for (const auto& [vm, w] : d.von_mises) {
      auto it = std::find_if(vms.begin(), vms.end(), [&](const auto& e) {
        return e.first.kappa == vm.kappa && angular_distance(e.first.mu, vm.mu) < kAtomMergeTol;
      });
      if (it != vms.end())
        it->second += w;
      else
        vms.emplace_back(vm, w);
    }
    std::sort(vms.begin(), vms.end(), [](const auto& a, const auto& b) {
      return a.first.mu.angle() != b.first.mu.angle() ? a.first.mu.angle() < b.first.mu.angle()
                                                      : a.first.kappa < b.first.kappa;
    });

    std::vector<double> aw;
    for (const auto& a : atoms) aw.push_back(a.weight);
    const double atomic = detail::weight_sum(aw);
    const int n_parts = (atoms.empty() ? 0 : 1) + static_cast<int>(vms.size()) + (d.uniform_mass > 0.0 ? 1 : 0);
    if (n_parts == 0) throw std::invalid_argument("empty decomposition");

    if (n_parts == 1) {
      if (!atoms.empty()) return Measure(s, Discrete{std::move(atoms)});
      if (!vms.empty()) return Measure(s, vms.front().first);
      return Measure(s, Uniform{});
    }
    Mixture mix;
    if (!atoms.empty()) {
      for (auto& a : atoms) a.weight /= atomic;
      mix.components.push_back({Discrete{std::move(atoms)}, atomic});
    }
    for (const auto& [vm, w] : vms) mix.components.push_back({vm, w});
    if (d.uniform_mass > 0.0) mix.components.push_back({Uniform{}, d.uniform_mass});
    return Measure(s, std::move(mix));
  }

 /// Wrap an already-canonical part or flat mixture; no validation.
  static Measure from_parts(Space s, Part p) {
    return Measure(s, std::visit([](auto&& x) -> Variant { return std::forward<decltype(x)>(x); }, std::move(p)));
  }
  static Measure from_parts(Space s, Mixture m) { return Measure(s, std::move(m)); }

 private:
  Measure(Space s, Variant v) : space_(s), v_(std::move(v)) {}

  static void accumulate_part(const Part& p, Decomposition& d, double w) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Discrete>) {
            for (const auto& a : x.atoms) d.atoms.push_back({a.at, a.weight * w});
          } else if constexpr (std::is_same_v<T, VonMises>) {
            d.von_mises.emplace_back(x, w);
          } else if constexpr (std::is_same_v<T, Uniform>) {
            d.uniform_mass += w;
          } else {
            d.atoms.push_back({x.at, w});
          }
        },
        p);
  }

  void accumulate(Decomposition& d, double w) const {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Mixture>) {
            for (const auto& c : x.components) accumulate_part(c.part, d, w * c.weight);
          } else {
            accumulate_part(Part{x}, d, w);
          }
        },
        v_);
  }

  Space space_;
  Variant v_;
};

/// (1 - eps) P + eps Q.
inline Measure mix(const Measure& p, const Measure& q, double eps) {
  require_same_space(p.space(), q.space(), "mix");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("mix: eps must lie in [0, 1]");
  if (eps == 0.0) return p;
  if (eps == 1.0) return q;
  return Measure::mixture({{p, 1.0 - eps}, {q, eps}});
}

namespace detail {

inline Part push_part(const Part& p, const GroupElement& g) {
  return std::visit(
      [&](const auto& x) -> Part {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          std::vector<Atom> moved;
          moved.reserve(x.atoms.size());
          for (const auto& a : x.atoms) moved.push_back({apply(g, a.at), a.weight});
          return Discrete{merge_atoms(std::move(moved))};
        } else if constexpr (std::is_same_v<T, VonMises>) {
          return VonMises{apply(g, x.mu), x.kappa};
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return x;
        } else {
          return PointMass{apply(g, x.at)};
        }
      },
      p);
}

}  // namespace detail

/// The image measure P^g: atoms and von Mises means move, weights and kappa stay.
inline Measure pushforward(const Measure& p, const GroupElement& g) {
  require_same_space(p.space(), g.space(), "pushforward");
  if (const auto* mixed = std::get_if<Mixture>(&p.variant())) {
    Mixture out;
    for (const auto& c : mixed->components) out.components.push_back({detail::push_part(c.part, g), c.weight});
    return Measure::from_parts(p.space(), std::move(out));
  }
  return std::visit(
      [&](const auto& x) -> Measure {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Mixture>)
          throw std::logic_error("unreachable");
        else
          return Measure::from_parts(p.space(), detail::push_part(Part{x}, g));
      },
      p.variant());
}

struct Resultant {
  Vec3 vector;                         // first vector moment
  double length;                       // Euclidean norm of `vector`, in [0, 1]
  std::optional<Direction> direction;  // empty iff length < kTauDomain
};

/// First vector moment. The von Mises mean resultant length is I1(kappa)/I0(kappa).
inline Vec3 first_moment(const Measure& p) {
  Vec3 v{0.0, 0.0, 0.0};
  auto add_part = [&](const Part& part, double w) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Discrete>) {
            for (const auto& a : x.atoms) v = v + (w * a.weight) * a.at.unit_vector();
          } else if constexpr (std::is_same_v<T, VonMises>) {
            v = v + (w * numerics::bessel_ratio_i1_i0(x.kappa)) * x.mu.unit_vector();
          } else if constexpr (std::is_same_v<T, PointMass>) {
            v = v + w * x.at.unit_vector();
          }
        },
        part);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Mixture>) {
          for (const auto& c : x.components) add_part(c.part, c.weight);
        } else {
          add_part(Part{x}, 1.0);
        }
      },
      p.variant());
  return v;
}

inline Resultant resultant_from_vector(Space s, const Vec3& v) {
  const double len = std::min(1.0, norm(v));
  Resultant r{v, len, std::nullopt};
  if (len >= kTauDomain)
    r.direction = s == Space::Circle ? Direction::circle(std::atan2(v[1], v[0])) : Direction::sphere(v);
  return r;
}

inline Resultant resultant(const Measure& p) { return resultant_from_vector(p.space(), first_moment(p)); }

namespace detail {

inline double von_mises_density(const VonMises& vm, double theta) {
  return std::exp(vm.kappa * (std::cos(theta - vm.mu.angle()) - 1.0)) /
         (kTwoPi * numerics::bessel_i0_scaled(vm.kappa));
}

/// Sub-density of the absolutely continuous part at angle theta (circle).
inline double continuous_density(const Decomposition& d, double theta) {
  double f = d.uniform_mass / kTwoPi;
  for (const auto& [vm, w] : d.von_mises) f += w * von_mises_density(vm, theta);
  return f;
}

/// Continuous mass in the arc [a, b] (0 <= a <= b <= 2*pi).
inline double continuous_mass_between(const Decomposition& d, double a, double b,
                                      double tol = numerics::kQuadratureTol) {
  double m = d.uniform_mass * (b - a) / kTwoPi;
  for (const auto& [vm, w] : d.von_mises) {
    if (vm.kappa == 0.0) {
      m += w * (b - a) / kTwoPi;
      continue;
    }
    m += w * numerics::adaptive_simpson([&](double t) { return von_mises_density(vm, t); }, a, b, tol, 4);
  }
  return m;
}

}  // namespace detail

/// Density with respect to arc length (circle) or surface area (sphere).
/// Rejects measures with an atomic part.
inline double density(const Measure& p, const Direction& x) {
  require_same_space(p.space(), x.space(), "density");
  const Decomposition d = p.decompose();
  if (!d.atoms.empty()) throw std::invalid_argument("density requested for a measure with atoms");
  if (p.space() == Space::Sphere) return d.uniform_mass / (4.0 * kPi);
  return detail::continuous_density(d, x.angle());
}

/// P([0, theta]) measured counterclockwise from angle 0; circle only.
/// Atoms located at or before theta count (right-continuous).
inline double cdf(const Measure& p, double theta) {
  if (p.space() != Space::Circle) throw std::invalid_argument("cdf is defined for circle measures only");
  if (theta < 0.0) return 0.0;
  if (theta >= kTwoPi) return 1.0;
  const Decomposition d = p.decompose();
  double f = detail::continuous_mass_between(d, 0.0, theta);
  for (const auto& a : d.atoms)
    if (a.at.angle() <= theta) f += a.weight;
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace dirbreak
