#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace dirbreak {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance used for group identities (g^k = identity, orthogonality).
inline constexpr double kGroupTol = 1e-12;

enum class Space { Circle, Sphere };

inline const char* to_string(Space s) { return s == Space::Circle ? "circle" : "sphere"; }

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline Vec3 operator*(const Mat3& m, const Vec3& v) { return {dot(m[0], v), dot(m[1], v), dot(m[2], v)}; }
inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return r;
}
inline Mat3 transpose(const Mat3& m) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[j][i];
  return r;
}
inline Mat3 identity_matrix() { return {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}; }

/// Largest absolute entry of a - b.
inline double max_abs_diff(const Mat3& a, const Mat3& b) {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(a[i][j] - b[i][j]));
  return r;
}

/// Reduce an angle in radians to [0, 2*pi).
inline double wrap_angle(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("angle must be finite");
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value plus 2*pi can round up to 2*pi itself.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline void require_same_space(Space a, Space b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": mixed circle/sphere inputs");
}

/// A point on S^1 (stored as an angle in [0, 2*pi)) or on S^2 (a unit 3-vector).
class Direction {
 public:
  static Direction circle(double theta) { return Direction(Space::Circle, wrap_angle(theta), {}); }

  /// Normalizes `v`; rejects the zero vector.
  static Direction sphere(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("sphere direction needs a finite nonzero vector");
    return Direction(Space::Sphere, 0.0, (1.0 / n) * v);
  }

  Space space() const { return space_; }

  /// Angle in [0, 2*pi); circle only.
  double angle() const {
    if (space_ != Space::Circle) throw std::logic_error("angle() requested for a sphere direction");
    return theta_;
  }

  /// Embedding as a unit vector: (cos, sin, 0) on the circle.
  Vec3 unit_vector() const {
    if (space_ == Space::Circle) return {std::cos(theta_), std::sin(theta_), 0.0};
    return v_;
  }

 private:
  Direction(Space s, double theta, const Vec3& v) : space_(s), theta_(theta), v_(v) {}

  Space space_;
  double theta_;
  Vec3 v_;
};

/// Geodesic distance in [0, pi].
inline double angular_distance(const Direction& a, const Direction& b) {
  require_same_space(a.space(), b.space(), "angular_distance");
  if (a.space() == Space::Circle) {
    const double d = std::abs(a.angle() - b.angle());
    return std::min(d, kTwoPi - d);
  }
  const Vec3 u = a.unit_vector();
  const Vec3 v = b.unit_vector();
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

inline Direction antipode(const Direction& x) {
  if (x.space() == Space::Circle) return Direction::circle(x.angle() + kPi);
  return Direction::sphere(-1.0 * x.unit_vector());
}

/// An isometry of the sample space. On the circle: theta -> (reflect ? -theta : theta) + angle.
/// On the sphere: an orthogonal matrix. `order`, when present, is a declared k with g^k = identity.
class GroupElement {
 public:
  static GroupElement identity(Space s) { return s == Space::Circle ? rotation(0.0) : GroupElement(identity_matrix(), 1); }

  static GroupElement rotation(double angle, std::optional<int> order = std::nullopt) {
    GroupElement g(Space::Circle, wrap_angle(angle), false, identity_matrix(), order);
    g.validate_order();
    return g;
  }

  /// Reflection theta -> axis_angle*2 - theta, i.e. mirror across the line at `axis_angle`. Order 2.
  static GroupElement reflection(double axis_angle) {
    GroupElement g(Space::Circle, wrap_angle(2.0 * axis_angle), true, identity_matrix(), 2);
    g.validate_order();
    return g;
  }

  /// Rotation of S^2 by `angle` about `axis` (Rodrigues).
  static GroupElement sphere_rotation(const Vec3& axis, double angle, std::optional<int> order = std::nullopt) {
    const double n = norm(axis);
    if (!(n > 0.0)) throw std::invalid_argument("rotation axis must be nonzero");
    const Vec3 k = (1.0 / n) * axis;
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    Mat3 m{Vec3{c + t * k[0] * k[0], t * k[0] * k[1] - s * k[2], t * k[0] * k[2] + s * k[1]},
           Vec3{t * k[1] * k[0] + s * k[2], c + t * k[1] * k[1], t * k[1] * k[2] - s * k[0]},
           Vec3{t * k[2] * k[0] - s * k[1], t * k[2] * k[1] + s * k[0], c + t * k[2] * k[2]}};
    return from_matrix(m, order);
  }

  /// Any orthogonal 3x3 matrix; rejects non-orthogonal input.
  static GroupElement from_matrix(const Mat3& m, std::optional<int> order = std::nullopt) {
    if (max_abs_diff(transpose(m) * m, identity_matrix()) > kGroupTol)
      throw std::invalid_argument("sphere group element must be an orthogonal matrix");
    GroupElement g(m, order);
    g.validate_order();
    return g;
  }

  /// The order-2 antipodal map: rotation by pi on the circle, x -> -x on the sphere.
  static GroupElement antipodal(Space s) {
    if (s == Space::Circle) return rotation(kPi, 2);
    Mat3 m{Vec3{-1, 0, 0}, Vec3{0, -1, 0}, Vec3{0, 0, -1}};
    return from_matrix(m, 2);
  }

  Space space() const { return space_; }
  std::optional<int> order() const { return order_; }
  bool is_reflection() const { return space_ == Space::Circle && reflect_; }
  /// Circle only: the additive part of the action.
  double rotation_angle() const { return angle_; }
  const Mat3& matrix() const { return matrix_; }

  /// True when the element acts as the identity (within kGroupTol).
  bool is_identity(double tol = kGroupTol) const {
    if (space_ == Space::Circle) return !reflect_ && std::min(angle_, kTwoPi - angle_) <= tol;
    return max_abs_diff(matrix_, identity_matrix()) <= tol;
  }

  /// (this * other)(x) = this(other(x)). The declared order is dropped.
  GroupElement compose(const GroupElement& other) const {
    require_same_space(space_, other.space_, "compose");
    if (space_ == Space::Sphere) return GroupElement(matrix_ * other.matrix_, std::nullopt);
    // this(other(x)) = s1*(s2*x + a2) + a1 with s = -1 for reflections.
    const double a = (reflect_ ? -other.angle_ : other.angle_) + angle_;
    return GroupElement(Space::Circle, wrap_angle(a), reflect_ != other.reflect_, identity_matrix(), std::nullopt);
  }

  GroupElement inverse() const {
    if (space_ == Space::Sphere) return GroupElement(transpose(matrix_), order_);
    if (reflect_) return *this;
    return GroupElement(Space::Circle, wrap_angle(-angle_), false, identity_matrix(), order_);
  }

  /// g^n for n >= 0. Circle rotations use a single multiplication to avoid drift.
  GroupElement power(int n) const {
    if (n < 0) return inverse().power(-n);
    if (space_ == Space::Circle && !reflect_)
      return GroupElement(Space::Circle, wrap_angle(angle_ * n), false, identity_matrix(), std::nullopt);
    GroupElement r = identity(space_);
    for (int i = 0; i < n; ++i) r = compose(r);
    return r;
  }

 private:
  GroupElement(Space s, double angle, bool reflect, const Mat3& m, std::optional<int> order)
      : space_(s), angle_(angle), reflect_(reflect), matrix_(m), order_(order) {}
  GroupElement(const Mat3& m, std::optional<int> order)
      : space_(Space::Sphere), angle_(0.0), reflect_(false), matrix_(m), order_(order) {}

  void validate_order() const {
    if (!order_) return;
    if (*order_ < 1) throw std::invalid_argument("group element order must be positive");
    if (!power(*order_).is_identity()) throw std::invalid_argument("declared order k does not satisfy g^k = identity");
  }

  Space space_;
  double angle_;
  bool reflect_;
  Mat3 matrix_;
  std::optional<int> order_;
};

inline Direction apply(const GroupElement& g, const Direction& x) {
  require_same_space(g.space(), x.space(), "apply");
  if (x.space() == Space::Circle) {
    const double t = g.is_reflection() ? -x.angle() : x.angle();
    return Direction::circle(t + g.rotation_angle());
  }
  return Direction::sphere(g.matrix() * x.unit_vector());
}

}  // namespace dirbreak
