#include <gtest/gtest.h>

#include <random>

#include "dirbreak/functional.hpp"
#include "dirbreak/group.hpp"
#include "support.hpp"

using namespace dirbreak;

namespace {

Direction c(double t) { return Direction::circle(t); }

std::vector<Atom> atoms_of(const Measure& m) { return m.decompose().atoms; }

}  // namespace

TEST(FiniteSubgroup, ElementsAreDistinctPowers) {
  const FiniteSubgroup g = FiniteSubgroup::cyclic(Space::Circle, 6);
  ASSERT_EQ(g.elements().size(), 6u);
  EXPECT_TRUE(g.elements()[0].is_identity());
  for (int j = 1; j < 6; ++j) EXPECT_FALSE(g.elements()[j].is_identity());
  EXPECT_TRUE(g.generator().power(6).is_identity());

  EXPECT_THROW(FiniteSubgroup(GroupElement::rotation(kPi), 4), std::invalid_argument);     // order is 2
  EXPECT_THROW(FiniteSubgroup(GroupElement::rotation(1.0), 3), std::invalid_argument);     // not of order 3
  EXPECT_THROW(FiniteSubgroup(GroupElement::rotation(kPi), 1), std::invalid_argument);
  EXPECT_NO_THROW(FiniteSubgroup::cyclic(Space::Sphere, 5));
}

TEST(Symmetrize, Examples) {
  const FiniteSubgroup anti = FiniteSubgroup::antipodal(Space::Circle);
  const auto a = atoms_of(symmetrize(Measure::point_mass(c(0.0)), anti));
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].at.angle(), 0.0);
  EXPECT_EQ(a[0].weight, 0.5);
  EXPECT_NEAR(a[1].at.angle(), kPi, 1e-15);
  EXPECT_EQ(a[1].weight, 0.5);

  EXPECT_TRUE(symmetrize(Measure::uniform(Space::Circle), FiniteSubgroup::cyclic(Space::Circle, 5)).holds<Uniform>());

  const Measure vm = symmetrize(Measure::von_mises(0.0, 1.0), anti);
  ASSERT_TRUE(vm.holds<Mixture>());
  const Decomposition d = vm.decompose();
  ASSERT_EQ(d.von_mises.size(), 2u);
  EXPECT_EQ(d.von_mises[0].second, 0.5);
  EXPECT_NEAR(angular_distance(d.von_mises[0].first.mu, d.von_mises[1].first.mu), kPi, 1e-15);
  EXPECT_LT(resultant(vm).length, 1e-15);
  EXPECT_FALSE(resultant(vm).direction);

  EXPECT_THROW(symmetrize(Measure::uniform(Space::Sphere), anti), std::invalid_argument);
}

TEST(ResidualSymmetrize, Examples) {
  const FiniteSubgroup anti = FiniteSubgroup::antipodal(Space::Circle);
  const Measure r = residual_symmetrize(Measure::point_mass(c(0.0)), anti);
  ASSERT_TRUE(r.holds<PointMass>());
  EXPECT_NEAR(std::get<PointMass>(r.variant()).at.angle(), kPi, 1e-15);

  EXPECT_TRUE(residual_symmetrize(Measure::uniform(Space::Circle), anti).holds<Uniform>());

  const auto a = atoms_of(residual_symmetrize(Measure::point_mass(c(0.0)), FiniteSubgroup::cyclic(Space::Circle, 4)));
  ASSERT_EQ(a.size(), 3u);
  const double expected[] = {kPi / 2, kPi, 3 * kPi / 2};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(a[i].at.angle(), expected[i], 1e-15);
    EXPECT_NEAR(a[i].weight, 1.0 / 3.0, 1e-16);
  }
}

TEST(IsInvariant, Examples) {
  EXPECT_TRUE(is_invariant(Measure::uniform(Space::Circle), GroupElement::rotation(1.0)));
  const GroupElement anti = GroupElement::antipodal(Space::Circle);
  EXPECT_FALSE(is_invariant(Measure::point_mass(c(0.0)), anti));
  EXPECT_TRUE(is_invariant(Measure::discrete({{c(0.0), 0.5}, {c(kPi), 0.5}}), anti));

  EXPECT_FALSE(is_invariant(Measure::von_mises(0.3, 2.0), GroupElement::rotation(0.1)));
  EXPECT_TRUE(is_invariant(Measure::von_mises(0.3, 2.0), GroupElement::identity(Space::Circle)));
  EXPECT_TRUE(is_invariant(Measure::von_mises(0.3, 0.0), GroupElement::rotation(0.1)));
  // Mirror symmetry of a von Mises law about its mean.
  EXPECT_TRUE(is_invariant(Measure::von_mises(0.3, 2.0), GroupElement::reflection(0.3)));

  // Slightly unbalanced antipodal pair: the regime where a loose tolerance would misclassify.
  EXPECT_FALSE(is_invariant(Measure::discrete({{c(0.0), 0.5 + 1e-7}, {c(kPi), 0.5 - 1e-7}}), anti));
}

TEST(Symmetrize, PropertiesOnRandomMeasures) {
  std::mt19937_64 rng(testkit::kSeed);
  for (int k : {2, 3, 4, 6}) {
    const FiniteSubgroup group = FiniteSubgroup::cyclic(Space::Circle, k);
    for (int i = 0; i < 100; ++i) {
      const Measure p = testkit::random_discrete_circle(rng);
      const Measure pk = symmetrize(p, group);
      for (const auto& g : group.elements()) EXPECT_TRUE(is_invariant(pk, g, 1e-12));
      EXPECT_LT(tv(symmetrize(pk, group), pk), 1e-12);
      const Measure identity = mix(p, residual_symmetrize(p, group), (k - 1.0) / k);
      EXPECT_LT(tv(pk, identity), 1e-12);
      EXPECT_LE(tv(p, pk), (k - 1.0) / k + 1e-12);
    }
  }
}

TEST(Symmetrize, ParametricComponentsStayInvariant) {
  std::mt19937_64 rng(testkit::kSeed);
  for (int k : {2, 3, 5}) {
    const FiniteSubgroup group = FiniteSubgroup::cyclic(Space::Circle, k);
    for (int i = 0; i < 30; ++i) {
      const Measure pk = symmetrize(testkit::random_circle_measure(rng), group);
      for (const auto& g : group.elements()) EXPECT_TRUE(is_invariant(pk, g));
    }
  }
}

TEST(Symmetrize, InvariantMeasuresHaveNoMeanDirection) {
  std::mt19937_64 rng(testkit::kSeed);
  const FiniteSubgroup anti = FiniteSubgroup::antipodal(Space::Circle);
  for (int i = 0; i < 1000; ++i) {
    const Measure pk = symmetrize(testkit::random_circle_measure(rng), anti);
    ASSERT_TRUE(is_invariant(pk, anti.generator()));
    EXPECT_FALSE(is_defined(circular_mean(pk))) << i;
  }
  const FiniteSubgroup sphere = FiniteSubgroup::antipodal(Space::Sphere);
  for (int i = 0; i < 200; ++i) {
    const Measure pk = symmetrize(testkit::random_discrete_sphere(rng), sphere);
    EXPECT_TRUE(is_invariant(pk, sphere.generator()));
    EXPECT_FALSE(is_defined(spherical_mean(pk)));
  }
}
