#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string_view>
#include <tuple>
#include <vector>

#include "dirbreak/measure.hpp"
#include "dirbreak/numerics.hpp"

namespace dirbreak {

/// Bounded metrics on probability measures. Both are bounded by 1 and contract
/// under mixing: d((1 - e) P + e Q, P) = e * d(P, Q) <= e.
enum class MetricKind { TotalVariation, Kuiper };

inline const char* to_string(MetricKind k) { return k == MetricKind::TotalVariation ? "tv" : "kuiper"; }

inline MetricKind parse_metric_kind(std::string_view s) {
  if (s == "tv" || s == "total_variation") return MetricKind::TotalVariation;
  if (s == "kuiper") return MetricKind::Kuiper;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "' (expected tv or kuiper)");
}

/// Number of uniform knots at which the Kuiper cdf difference is evaluated.
inline constexpr int kKuiperKnots = 4096;

namespace detail {

/// The absolutely continuous part of a circle measure with precomputed normalizers.
class ContinuousPart {
 public:
  explicit ContinuousPart(const Decomposition& d) : uniform_(d.uniform_mass / kTwoPi) {
    for (const auto& [vm, w] : d.von_mises)
      terms_.push_back({vm.mu.angle(), vm.kappa, w / (kTwoPi * numerics::bessel_i0_scaled(vm.kappa))});
  }

  double operator()(double theta) const {
    double f = uniform_;
    for (const auto& t : terms_) f += t.scale * std::exp(t.kappa * (std::cos(theta - t.mu) - 1.0));
    return f;
  }

  double uniform_density() const { return uniform_; }
  bool only_uniform() const { return terms_.empty(); }

  /// Panel boundaries that resolve every von Mises peak.
  void add_breakpoints(std::vector<double>& out) const {
    for (const auto& t : terms_) {
      out.push_back(t.mu);
      out.push_back(wrap_angle(t.mu + kPi));
      if (t.kappa > 1.0) {
        const double sd = 1.0 / std::sqrt(t.kappa);
        for (double k : {0.5, 1.0, 2.0, 4.0, 8.0}) {
          if (k * sd >= kPi) continue;
          out.push_back(wrap_angle(t.mu + k * sd));
          out.push_back(wrap_angle(t.mu - k * sd));
        }
      }
    }
  }

 private:
  struct Term {
    double mu, kappa, scale;
  };
  double uniform_;
  std::vector<Term> terms_;
};

/// Sorted, deduplicated panel edges on [0, 2*pi] including both ends.
inline std::vector<double> panel_edges(std::vector<double> points, int uniform_panels) {
  for (int i = 0; i <= uniform_panels; ++i) points.push_back(kTwoPi * i / uniform_panels);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(), [](double a, double b) { return b - a < 1e-15; }),
               points.end());
  points.front() = 0.0;
  points.back() = kTwoPi;
  return points;
}

template <class F>
double integrate_panels(const F& f, const std::vector<double>& edges, double tol) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    if (b <= a) continue;
    total += numerics::adaptive_simpson(f, a, b, tol * (b - a) / kTwoPi, 1);
  }
  return total;
}

/// Atoms of P and Q matched by location: (location, mass under P, mass under Q).
inline std::vector<std::tuple<Direction, double, double>> match_atoms(const std::vector<Atom>& p,
                                                                      const std::vector<Atom>& q) {
  std::vector<std::tuple<Direction, double, double>> all;
  all.reserve(p.size() + q.size());
  for (const auto& a : p) all.emplace_back(a.at, a.weight, 0.0);
  for (const auto& a : q) all.emplace_back(a.at, 0.0, a.weight);
  if (all.empty()) return all;
  std::vector<std::tuple<Direction, double, double>> out;
  if (std::get<0>(all.front()).space() == Space::Circle) {
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a).angle() < std::get<0>(b).angle(); });
    for (const auto& e : all) {
      if (!out.empty() && angular_distance(std::get<0>(out.back()), std::get<0>(e)) < kAtomMergeTol) {
        std::get<1>(out.back()) += std::get<1>(e);
        std::get<2>(out.back()) += std::get<2>(e);
      } else {
        out.push_back(e);
      }
    }
    if (out.size() > 1 && angular_distance(std::get<0>(out.back()), std::get<0>(out.front())) < kAtomMergeTol) {
      std::get<1>(out.front()) += std::get<1>(out.back());
      std::get<2>(out.front()) += std::get<2>(out.back());
      out.pop_back();
    }
    return out;
  }
  for (const auto& e : all) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& o) {
      return angular_distance(std::get<0>(o), std::get<0>(e)) < kAtomMergeTol;
    });
    if (it != out.end()) {
      std::get<1>(*it) += std::get<1>(e);
      std::get<2>(*it) += std::get<2>(e);
    } else {
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace detail

/// Total variation distance sup_A |P(A) - Q(A)|, computed as half the L1 distance
/// of the atomic parts plus half the L1 distance of the densities.
inline double tv(const Measure& p, const Measure& q) {
  require_same_space(p.space(), q.space(), "tv");
  const Decomposition dp = p.decompose();
  const Decomposition dq = q.decompose();

  // Mutually singular: the atoms carry all of one measure and none of the other.
  if ((dp.purely_atomic() && dq.purely_continuous()) || (dp.purely_continuous() && dq.purely_atomic())) return 1.0;

  std::vector<double> diffs;
  for (const auto& [at, wp, wq] : detail::match_atoms(dp.atoms, dq.atoms)) diffs.push_back(std::abs(wp - wq));
  const double atomic = numerics::compensated_sum(diffs);

  const double cp = dp.continuous_mass(), cq = dq.continuous_mass();
  double continuous = 0.0;
  if (cp == 0.0 || cq == 0.0) {
    continuous = cp + cq;
  } else if (p.space() == Space::Sphere) {
    continuous = std::abs(dp.uniform_mass - dq.uniform_mass);
  } else {
    const detail::ContinuousPart fp(dp), fq(dq);
    if (fp.only_uniform() && fq.only_uniform()) {
      continuous = std::abs(dp.uniform_mass - dq.uniform_mass);
    } else {
      std::vector<double> bps;
      fp.add_breakpoints(bps);
      fq.add_breakpoints(bps);
      const auto edges = detail::panel_edges(std::move(bps), 64);
      continuous = detail::integrate_panels([&](double t) { return std::abs(fp(t) - fq(t)); }, edges,
                                            numerics::kQuadratureTol);
    }
  }
  return std::clamp(0.5 * (atomic + continuous), 0.0, 1.0);
}

/// Kuiper distance sup over arcs A of |P(A) - Q(A)| = max h - min h, h = F_P - F_Q.
/// Circle only. h is evaluated on both sides of every atom, on kKuiperKnots uniform
/// knots, and at the interior extrema where the two densities cross.
inline double kuiper(const Measure& p, const Measure& q) {
  if (p.space() != Space::Circle || q.space() != Space::Circle)
    throw std::invalid_argument("kuiper distance is defined for circle measures only");
  const Decomposition dp = p.decompose();
  const Decomposition dq = q.decompose();
  const detail::ContinuousPart fp(dp), fq(dq);
  const bool has_continuous = dp.continuous_mass() > 0.0 || dq.continuous_mass() > 0.0;
  const auto atoms = detail::match_atoms(dp.atoms, dq.atoms);

  auto g = [&](double t) { return fp(t) - fq(t); };
  const double udiff = fp.uniform_density() - fq.uniform_density();
  const bool only_uniform = fp.only_uniform() && fq.only_uniform();
  auto cont_mass = [&](double a, double b) {
    if (!has_continuous || b <= a) return 0.0;
    if (only_uniform) return udiff * (b - a);
    return numerics::adaptive_simpson(g, a, b, numerics::kQuadratureTol * (b - a) / kTwoPi, 1);
  };

  std::vector<double> edges;
  if (has_continuous) {
    std::vector<double> bps;
    fp.add_breakpoints(bps);
    fq.add_breakpoints(bps);
    edges = detail::panel_edges(std::move(bps), kKuiperKnots);
  }
  for (const auto& a : atoms) edges.push_back(std::get<0>(a).angle());
  edges.push_back(0.0);
  edges.push_back(kTwoPi);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  double h = 0.0, hmax = 0.0, hmin = 0.0;
  auto record = [&](double v) {
    hmax = std::max(hmax, v);
    hmin = std::min(hmin, v);
  };
  std::size_t next_atom = 0;
  double prev = 0.0;
  for (double x : edges) {
    if (x > prev) {
      // The density difference changes sign inside the panel: h has an interior extremum.
      if (has_continuous && !only_uniform) {
        const double ga = g(prev), gb = g(x);
        if ((ga > 0.0 && gb < 0.0) || (ga < 0.0 && gb > 0.0)) {
          double lo = prev, hi = x;
          for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((g(mid) > 0.0) == (ga > 0.0))
              lo = mid;
            else
              hi = mid;
          }
          record(h + cont_mass(prev, lo));
        }
      }
      h += cont_mass(prev, x);
      prev = x;
    }
    record(h);  // left limit at x
    while (next_atom < atoms.size() && std::get<0>(atoms[next_atom]).angle() <= x) {
      h += std::get<1>(atoms[next_atom]) - std::get<2>(atoms[next_atom]);
      ++next_atom;
    }
    record(h);
  }
  return std::clamp(hmax - hmin, 0.0, 1.0);
}

/// Dispatch on the metric kind. Kuiper is circle-only.
inline double distance(MetricKind kind, const Measure& p, const Measure& q) {
  require_same_space(p.space(), q.space(), "distance");
  if (kind == MetricKind::Kuiper) {
    if (p.space() != Space::Circle) throw std::invalid_argument("metric kuiper is not supported on the sphere");
    return kuiper(p, q);
  }
  return tv(p, q);
}

}  // namespace dirbreak
