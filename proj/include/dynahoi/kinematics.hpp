#pragma once

// Kinematic 18-DoF hand: 3-DoF palm translation plus 15 flexion joints
// (5 fingers x 3 joints, thumb first, proximal to distal). Pure geometry, no
// dynamics.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "dynahoi/core.hpp"

namespace dynahoi {

inline constexpr int kFingers = 5;
inline constexpr int kJointsPerFinger = 3;
inline constexpr int kJoints = kFingers * kJointsPerFinger;
/// Closing limit of every joint (90 degrees).
inline constexpr double kMaxGrabRotation = kPi / 2.0;

using JointArray = std::array<double, kJoints>;
using FingertipPoses = std::array<Pose, kFingers>;

inline constexpr std::array<std::string_view, kFingers> kFingerNames = {"thumb", "index", "middle",
                                                                       "ring", "pinky"};

struct FingerGeometry {
  Vec3 base_offset;     // palm-relative
  Vec3 forward;         // direction of the straight (open) finger
  Vec3 flexion_normal;  // rotation axis of all three joints
  std::array<double, kJointsPerFinger> segments{};
};

struct HandModel {
  std::array<FingerGeometry, kFingers> fingers{};
  double contact_radius = 0.01;
  /// Where an attached object is held, relative to the palm center.
  Vec3 grasp_offset{0.0, 0.0, 0.06};

  /// Palm facing +z; four fingers above the palm extending +y and curling
  /// toward +z; the thumb below the palm, opposed, curling toward +z as well.
  static HandModel standard() {
    HandModel m;
    constexpr std::array<double, 3> seg{0.04, 0.03, 0.02};
    m.fingers[0] = {{-0.02, -0.045, 0.0}, {0.0, -1.0, 0.0}, {-1.0, 0.0, 0.0}, seg};
    const std::array<double, 4> xs{-0.03, -0.01, 0.01, 0.03};
    for (int i = 0; i < 4; ++i) {
      m.fingers[i + 1] = {{xs[i], 0.045, 0.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, seg};
    }
    return m;
  }

  void validate() const {
    if (!(contact_radius > 0.0)) throw Error("invalid_hand", "contact radius must be positive");
    for (const auto& f : fingers) {
      for (double s : f.segments) {
        if (!(s > 0.0)) throw Error("invalid_hand", "segment lengths must be positive");
      }
      if (std::abs(norm(f.flexion_normal) - 1.0) > 1e-9 || std::abs(norm(f.forward) - 1.0) > 1e-9) {
        throw Error("invalid_hand", "finger axes must be unit length");
      }
      if (std::abs(dot(f.flexion_normal, f.forward)) > 1e-9) {
        throw Error("invalid_hand", "flexion normal must be orthogonal to the finger axis");
      }
    }
  }

  /// Upper bound on |fingertip - palm| over all joint configurations.
  double reach() const {
    double r = 0.0;
    for (const auto& f : fingers) {
      r = std::max(r, norm(f.base_offset) + f.segments[0] + f.segments[1] + f.segments[2]);
    }
    return r;
  }
};

/// Poses of every joint frame and fingertip for one configuration.
struct HandChain {
  std::array<Pose, kJoints> joints{};
  FingertipPoses fingertips{};
};

namespace detail {
// Rotating a vector orthogonal to `normal` about `normal` by `angle`.
inline Vec3 flex(const Vec3& forward, const Vec3& normal, double angle) {
  return std::cos(angle) * forward + std::sin(angle) * cross(normal, forward);
}
}  // namespace detail

inline HandChain fk_chain(const HandModel& model, const Vec3& palm, const JointArray& joints) {
  HandChain out;
  for (int f = 0; f < kFingers; ++f) {
    const FingerGeometry& g = model.fingers[f];
    Vec3 p = palm + g.base_offset;
    double phi = 0.0;
    for (int j = 0; j < kJointsPerFinger; ++j) {
      const double q = joints[f * kJointsPerFinger + j];
      expects(q >= 0.0 && q <= kMaxGrabRotation, "joint angle outside [0, pi/2]");
      phi += q;
      out.joints[f * kJointsPerFinger + j] = {p, Quat::from_axis_angle(g.flexion_normal, phi)};
      p += g.segments[j] * detail::flex(g.forward, g.flexion_normal, phi);
    }
    out.fingertips[f] = {p, Quat::from_axis_angle(g.flexion_normal, phi)};
  }
  return out;
}

inline FingertipPoses fk_fingertips(const HandModel& model, const Vec3& palm, const JointArray& joints) {
  return fk_chain(model, palm, joints).fingertips;
}

inline double clamp_joint(double q) { return std::clamp(q, 0.0, kMaxGrabRotation); }

struct HandState {
  Vec3 palm;
  JointArray joints{};
  FingertipPoses fingertips{};

  static HandState make(const HandModel& model, const Vec3& palm, const JointArray& joints = {}) {
    return {palm, joints, fk_fingertips(model, palm, joints)};
  }

  /// The 18-vector exchanged with policies: palm xyz then the 15 joints.
  std::array<double, 18> as_vector() const {
    std::array<double, 18> v{palm.x, palm.y, palm.z};
    std::copy(joints.begin(), joints.end(), v.begin() + 3);
    return v;
  }

  friend bool operator==(const HandState&, const HandState&) = default;
};

// ---------------------------------------------------------------------------
// Target objects.

enum class ShapeKind { Sphere, Box, Cylinder };

inline std::string_view to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Box: return "box";
    case ShapeKind::Cylinder: return "cylinder";
  }
  return "?";
}

inline ShapeKind shape_kind_from_string(std::string_view s) {
  if (s == "sphere") return ShapeKind::Sphere;
  if (s == "box") return ShapeKind::Box;
  if (s == "cylinder") return ShapeKind::Cylinder;
  throw Error("invalid_object", "unknown shape kind: " + std::string(s));
}

/// Sphere uses `radius`; box uses `half_extents`; cylinder uses `radius` and
/// `half_height` with its axis along the local y axis.
struct ObjectShape {
  ShapeKind kind = ShapeKind::Sphere;
  double radius = 0.05;
  Vec3 half_extents{0.05, 0.05, 0.05};
  double half_height = 0.05;
  Pose pose;

  static ObjectShape sphere(double r, const Vec3& center = {}) {
    ObjectShape s;
    s.kind = ShapeKind::Sphere;
    s.radius = r;
    s.pose.position = center;
    return s;
  }
  static ObjectShape box(const Vec3& half, const Vec3& center = {}, const Quat& q = {}) {
    ObjectShape s;
    s.kind = ShapeKind::Box;
    s.half_extents = half;
    s.pose = {center, q};
    return s;
  }
  static ObjectShape cylinder(double r, double half_h, const Vec3& center = {}, const Quat& q = {}) {
    ObjectShape s;
    s.kind = ShapeKind::Cylinder;
    s.radius = r;
    s.half_height = half_h;
    s.pose = {center, q};
    return s;
  }

  void validate() const {
    bool ok = true;
    switch (kind) {
      case ShapeKind::Sphere: ok = radius > 0.0; break;
      case ShapeKind::Box: ok = half_extents.x > 0.0 && half_extents.y > 0.0 && half_extents.z > 0.0; break;
      case ShapeKind::Cylinder: ok = radius > 0.0 && half_height > 0.0; break;
    }
    if (!ok) throw Error("invalid_object", "object extents must be positive");
    if (std::abs(pose.orientation.norm() - 1.0) > 1e-9) {
      throw Error("invalid_object", "object orientation must be a unit quaternion");
    }
  }

  /// Exact signed distance from `p` to the surface (negative inside).
  double signed_distance(const Vec3& p) const {
    const Vec3 q = pose.orientation.conjugate().rotate(p - pose.position);
    switch (kind) {
      case ShapeKind::Sphere:
        return norm(q) - radius;
      case ShapeKind::Box: {
        const Vec3 d{std::abs(q.x) - half_extents.x, std::abs(q.y) - half_extents.y,
                     std::abs(q.z) - half_extents.z};
        const Vec3 outside{std::max(d.x, 0.0), std::max(d.y, 0.0), std::max(d.z, 0.0)};
        return norm(outside) + std::min(std::max({d.x, d.y, d.z}), 0.0);
      }
      case ShapeKind::Cylinder: {
        const double dr = std::hypot(q.x, q.z) - radius;
        const double dh = std::abs(q.y) - half_height;
        return std::hypot(std::max(dr, 0.0), std::max(dh, 0.0)) + std::min(std::max(dr, dh), 0.0);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  ObjectShape at(const Vec3& center) const {
    ObjectShape s = *this;
    s.pose.position = center;
    return s;
  }
};

inline std::array<bool, kFingers> contact_test(const HandModel& model, const HandState& state,
                                               const ObjectShape& obj) {
  std::array<bool, kFingers> out{};
  for (int i = 0; i < kFingers; ++i) {
    out[i] = obj.signed_distance(state.fingertips[i].position) <= model.contact_radius;
  }
  return out;
}

inline double palm_object_distance(const HandState& state, const ObjectShape& obj) {
  return distance(state.palm, obj.pose.position);
}

/// Closest fingertip-to-surface distance, zero when a fingertip is inside.
inline double fingertip_surface_distance(const HandState& state, const ObjectShape& obj) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& tip : state.fingertips) {
    best = std::min(best, std::max(0.0, obj.signed_distance(tip.position)));
  }
  return best;
}

}  // namespace dynahoi
