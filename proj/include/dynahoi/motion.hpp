#pragma once

// Parametric target motion. Every family evaluates position and velocity in
// closed form except the pendulum, which integrates the nonlinear ODE with
// fixed-substep RK4 into an eagerly built checkpoint table. A built
// Trajectory is immutable and safe to share between threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dynahoi/core.hpp"
#include "dynahoi/fourier.hpp"

namespace dynahoi {

enum class MotionFamily {
  StraightLine,
  SimpleHarmonic,
  CircularArc,
  Projectile,
  Pendulum,
  InclinedRolling,
  ImpactResponse,
  Hybrid,
};

inline constexpr std::array<std::string_view, 8> kFamilyNames = {
    "StraightLine", "SimpleHarmonic", "CircularArc", "Projectile",
    "Pendulum",     "InclinedRolling", "ImpactResponse", "Hybrid"};

inline std::string_view to_string(MotionFamily f) { return kFamilyNames[static_cast<int>(f)]; }

inline MotionFamily motion_family_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (kFamilyNames[i] == s) return static_cast<MotionFamily>(i);
  }
  throw Error("invalid_motion", "unknown motion family: " + std::string(s));
}

struct LineParams {
  Vec3 start;
  Vec3 velocity;
};

struct HarmonicParams {
  Vec3 center;
  Vec3 axis{1.0, 0.0, 0.0};
  double amplitude = 0.2;
  double omega = 2.0;
  double phase = 0.0;
};

struct CircularParams {
  Vec3 center;
  double radius = 0.3;
  Vec3 u1{1.0, 0.0, 0.0};
  Vec3 u2{0.0, 0.0, 1.0};
  double omega = 1.0;
  double start_angle = 0.0;
};

struct ProjectileParams {
  Vec3 start;
  double speed = 3.0;
  double launch_angle = kPi / 4.0;
  double azimuth = 0.0;  // heading in the ground plane, measured from +x toward +z
  double gravity = kGravity;

  Vec3 initial_velocity() const {
    const double h = speed * std::cos(launch_angle);
    return {h * std::cos(azimuth), speed * std::sin(launch_angle), h * std::sin(azimuth)};
  }
};

struct PendulumParams {
  Vec3 pivot;
  double length = 0.5;
  double initial_angle = 0.5;
  double initial_rate = 0.0;
  double swing_azimuth = 0.0;
  double gravity = kGravity;
};

struct InclineParams {
  Vec3 origin;
  Vec3 downhill{1.0, 0.0, 0.0};  // projected onto the ground plane for the heading
  double incline_angle = 0.3;
  double initial_speed = 0.0;
  double gravity = kGravity;
};

struct ImpactParams {
  ProjectileParams ballistic;
  double ground_height = 0.0;
  double restitution = 0.7;
};

/// Smooth micro-oscillation superimposed on a composed trajectory.
struct OscillationParams {
  FourierSpec spec;
  Vec3 axis{0.0, 1.0, 0.0};
};

using PrimitiveParams = std::variant<LineParams, HarmonicParams, CircularParams, ProjectileParams,
                                     PendulumParams, InclineParams, ImpactParams>;

struct HybridSegment {
  PrimitiveParams params;
  double duration = 1.0;
};

struct HybridParams {
  std::vector<HybridSegment> segments;
  std::optional<OscillationParams> oscillation;
};

/// Alternative order matches MotionFamily.
using FamilyParams = std::variant<LineParams, HarmonicParams, CircularParams, ProjectileParams,
                                  PendulumParams, InclineParams, ImpactParams, HybridParams>;

struct MotionConfig {
  std::string subcategory;
  FamilyParams params;
  std::uint64_t seed = 0;
  double duration = 1.0;

  MotionFamily family() const { return static_cast<MotionFamily>(params.index()); }
};

/// Orthonormal basis of a circle plane: the ground plane tilted by `tilt` about
/// the horizontal axis pointing at `azimuth`.
inline std::pair<Vec3, Vec3> circle_plane(double azimuth, double tilt) {
  const Vec3 a{std::cos(azimuth), 0.0, std::sin(azimuth)};
  const Vec3 b{-std::sin(azimuth), 0.0, std::cos(azimuth)};
  const Vec3 u2 = std::cos(tilt) * b + std::sin(tilt) * kUp;
  return {a, u2};
}

inline Vec3 direction_from_angles(double azimuth, double elevation) {
  return {std::cos(elevation) * std::cos(azimuth), std::sin(elevation),
          std::cos(elevation) * std::sin(azimuth)};
}

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error("invalid_motion", what);
}

inline bool unit(const Vec3& v) { return std::abs(norm(v) - 1.0) <= 1e-9; }

inline void validate_primitive(const PrimitiveParams& params) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineParams>) {
          require(is_finite(p.start) && is_finite(p.velocity), "line parameters must be finite");
        } else if constexpr (std::is_same_v<T, HarmonicParams>) {
          require(is_finite(p.center) && unit(p.axis), "harmonic axis must be a unit vector");
          require(std::isfinite(p.amplitude) && p.amplitude >= 0.0, "harmonic amplitude must be >= 0");
          require(std::isfinite(p.omega) && std::isfinite(p.phase), "harmonic frequency must be finite");
        } else if constexpr (std::is_same_v<T, CircularParams>) {
          require(is_finite(p.center) && std::isfinite(p.radius) && p.radius > 0.0,
                  "circle radius must be positive");
          require(unit(p.u1) && unit(p.u2) && std::abs(dot(p.u1, p.u2)) <= 1e-9,
                  "circle plane basis must be orthonormal");
          require(std::isfinite(p.omega) && std::isfinite(p.start_angle), "circle rates must be finite");
        } else if constexpr (std::is_same_v<T, ProjectileParams>) {
          require(is_finite(p.start) && std::isfinite(p.speed) && p.speed >= 0.0,
                  "projectile speed must be >= 0");
          require(std::isfinite(p.launch_angle) && std::isfinite(p.azimuth), "projectile angles must be finite");
          require(std::isfinite(p.gravity) && p.gravity > 0.0, "gravity must be positive");
        } else if constexpr (std::is_same_v<T, PendulumParams>) {
          require(is_finite(p.pivot) && std::isfinite(p.length) && p.length > 0.0,
                  "pendulum length must be positive");
          require(std::isfinite(p.initial_angle) && std::isfinite(p.initial_rate) &&
                      std::isfinite(p.swing_azimuth),
                  "pendulum state must be finite");
          require(std::isfinite(p.gravity) && p.gravity > 0.0, "gravity must be positive");
        } else if constexpr (std::is_same_v<T, InclineParams>) {
          require(is_finite(p.origin) && unit(p.downhill), "incline direction must be a unit vector");
          require(std::hypot(p.downhill.x, p.downhill.z) > 1e-9, "incline direction must not be vertical");
          require(p.incline_angle > 0.0 && p.incline_angle < kPi / 2.0, "incline angle must lie in (0, pi/2)");
          require(std::isfinite(p.initial_speed), "incline speed must be finite");
          require(std::isfinite(p.gravity) && p.gravity > 0.0, "gravity must be positive");
        } else if constexpr (std::is_same_v<T, ImpactParams>) {
          validate_primitive(PrimitiveParams{p.ballistic});
          require(p.restitution > 0.0 && p.restitution <= 1.0, "restitution must lie in (0, 1]");
          require(std::isfinite(p.ground_height) && p.ballistic.start.y >= p.ground_height,
                  "impact motion must start on or above the ground plane");
        }
      },
      params);
}

}  // namespace detail

inline void validate(const MotionConfig& config) {
  detail::require(std::isfinite(config.duration) && config.duration > 0.0, "duration must be positive");
  if (const auto* h = std::get_if<HybridParams>(&config.params)) {
    detail::require(!h->segments.empty(), "hybrid motion needs at least one segment");
    double total = 0.0;
    for (const auto& s : h->segments) {
      detail::require(std::isfinite(s.duration) && s.duration > 0.0, "segment durations must be positive");
      detail::validate_primitive(s.params);
      total += s.duration;
    }
    detail::require(std::abs(total - config.duration) <= 1e-9 * std::max(1.0, total),
                    "hybrid duration must equal the sum of its segments");
    if (h->oscillation) {
      h->oscillation->spec.validate();
      detail::require(detail::unit(h->oscillation->axis), "oscillation axis must be a unit vector");
    }
    return;
  }
  std::visit(
      [](const auto& p) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(p)>, HybridParams>) {
          detail::validate_primitive(PrimitiveParams{p});
        }
      },
      config.params);
}

/// Ground contact event of an impact-response trajectory.
struct Bounce {
  double time = 0.0;
  double vertical_speed_before = 0.0;  // negative (falling)
  double vertical_speed_after = 0.0;   // positive, or 0 once the object comes to rest
};

namespace detail {

struct LineEval {
  LineParams p;
  Vec3 position(double t) const { return p.start + t * p.velocity; }
  Vec3 velocity(double) const { return p.velocity; }
};

struct HarmonicEval {
  HarmonicParams p;
  Vec3 position(double t) const { return p.center + (p.amplitude * std::sin(p.omega * t + p.phase)) * p.axis; }
  Vec3 velocity(double t) const {
    return (p.amplitude * p.omega * std::cos(p.omega * t + p.phase)) * p.axis;
  }
};

struct CircularEval {
  CircularParams p;
  Vec3 position(double t) const {
    const double a = p.start_angle + p.omega * t;
    return p.center + p.radius * (std::cos(a) * p.u1 + std::sin(a) * p.u2);
  }
  Vec3 velocity(double t) const {
    const double a = p.start_angle + p.omega * t;
    return (p.radius * p.omega) * (-std::sin(a) * p.u1 + std::cos(a) * p.u2);
  }
};

struct ProjectileEval {
  ProjectileParams p;
  Vec3 v0 = p.initial_velocity();
  Vec3 position(double t) const {
    return p.start + t * v0 + Vec3{0.0, -0.5 * p.gravity * t * t, 0.0};
  }
  Vec3 velocity(double t) const { return v0 + Vec3{0.0, -p.gravity * t, 0.0}; }
};

class PendulumEval {
 public:
  static constexpr double kSubstep = 1e-3;

  PendulumEval(const PendulumParams& p, double horizon)
      : p_(p), heading_{std::cos(p.swing_azimuth), 0.0, std::sin(p.swing_azimuth)} {
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / kSubstep)) + 1;
    states_.reserve(steps + 1);
    State s{p.initial_angle, p.initial_rate};
    states_.push_back(s);
    for (std::size_t k = 0; k < steps; ++k) {
      s = rk4(s, kSubstep);
      states_.push_back(s);
    }
  }

  Vec3 position(double t) const {
    const State s = state(t);
    return p_.pivot + p_.length * (std::sin(s.theta) * heading_ - std::cos(s.theta) * kUp);
  }
  Vec3 velocity(double t) const {
    const State s = state(t);
    return (p_.length * s.rate) * (std::cos(s.theta) * heading_ + std::sin(s.theta) * kUp);
  }

 private:
  struct State {
    double theta;
    double rate;
  };

  State derivative(const State& s) const { return {s.rate, -(p_.gravity / p_.length) * std::sin(s.theta)}; }

  State rk4(const State& s, double h) const {
    const State k1 = derivative(s);
    const State k2 = derivative({s.theta + 0.5 * h * k1.theta, s.rate + 0.5 * h * k1.rate});
    const State k3 = derivative({s.theta + 0.5 * h * k2.theta, s.rate + 0.5 * h * k2.rate});
    const State k4 = derivative({s.theta + h * k3.theta, s.rate + h * k3.rate});
    return {s.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
            s.rate + h / 6.0 * (k1.rate + 2.0 * k2.rate + 2.0 * k3.rate + k4.rate)};
  }

  State state(double t) const {
    auto k = static_cast<std::size_t>(std::floor(t / kSubstep));
    k = std::min(k, states_.size() - 1);
    const double rest = t - static_cast<double>(k) * kSubstep;
    return rest > 0.0 ? rk4(states_[k], rest) : states_[k];
  }

  PendulumParams p_;
  Vec3 heading_;
  std::vector<State> states_;
};

struct InclineEval {
  InclineParams p;
  Vec3 dir = [this] {
    const Vec3 h = normalized(Vec3{p.downhill.x, 0.0, p.downhill.z});
    return std::cos(p.incline_angle) * h - std::sin(p.incline_angle) * kUp;
  }();
  double accel = p.gravity * std::sin(p.incline_angle);

  Vec3 position(double t) const { return p.origin + (p.initial_speed * t + 0.5 * accel * t * t) * dir; }
  Vec3 velocity(double t) const { return (p.initial_speed + accel * t) * dir; }
};

/// Ballistic arcs joined by analytic ground impacts.
class ImpactEval {
 public:
  static constexpr double kRestSpeed = 1e-3;
  static constexpr int kMaxBounces = 256;

  ImpactEval(const ImpactParams& p, double horizon) : g_(p.ballistic.gravity) {
    double t = 0.0;
    Vec3 pos = p.ballistic.start;
    Vec3 vel = p.ballistic.initial_velocity();
    while (true) {
      const double height = pos.y - p.ground_height;
      if (height <= 0.0 && vel.y <= kRestSpeed && vel.y >= -kRestSpeed) {
        arcs_.push_back({t, {pos.x, p.ground_height, pos.z}, {vel.x, 0.0, vel.z}, true});
        break;
      }
      arcs_.push_back({t, pos, vel, false});
      if (t > horizon || static_cast<int>(bounces_.size()) >= kMaxBounces) break;
      const double tau = (vel.y + std::sqrt(vel.y * vel.y + 2.0 * g_ * std::max(height, 0.0))) / g_;
      const double before = vel.y - g_ * tau;
      const double after = -p.restitution * before;
      t += tau;
      pos = {pos.x + vel.x * tau, p.ground_height, pos.z + vel.z * tau};
      if (after < kRestSpeed) {
        bounces_.push_back({t, before, 0.0});
        vel = {vel.x, 0.0, vel.z};
      } else {
        bounces_.push_back({t, before, after});
        vel = {vel.x, after, vel.z};
      }
    }
  }

  Vec3 position(double t) const {
    const Arc& a = arc_at(t);
    const double s = t - a.start;
    if (a.resting) return a.p0 + s * a.v0;
    return a.p0 + s * a.v0 + Vec3{0.0, -0.5 * g_ * s * s, 0.0};
  }
  Vec3 velocity(double t) const {
    const Arc& a = arc_at(t);
    if (a.resting) return a.v0;
    return a.v0 + Vec3{0.0, -g_ * (t - a.start), 0.0};
  }

  const std::vector<Bounce>& bounces() const { return bounces_; }

 private:
  struct Arc {
    double start;
    Vec3 p0;
    Vec3 v0;
    bool resting;
  };

  const Arc& arc_at(double t) const {
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), t,
                               [](double v, const Arc& a) { return v < a.start; });
    return it == arcs_.begin() ? arcs_.front() : *(it - 1);
  }

  double g_;
  std::vector<Arc> arcs_;
  std::vector<Bounce> bounces_;
};

using PrimitiveEval =
    std::variant<LineEval, HarmonicEval, CircularEval, ProjectileEval, PendulumEval, InclineEval, ImpactEval>;

inline PrimitiveEval make_eval(const PrimitiveParams& params, double horizon) {
  return std::visit(
      [horizon](const auto& p) -> PrimitiveEval {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineParams>) return LineEval{p};
        else if constexpr (std::is_same_v<T, HarmonicParams>) return HarmonicEval{p};
        else if constexpr (std::is_same_v<T, CircularParams>) return CircularEval{p};
        else if constexpr (std::is_same_v<T, ProjectileParams>) return ProjectileEval{p};
        else if constexpr (std::is_same_v<T, PendulumParams>) return PendulumEval(p, horizon);
        else if constexpr (std::is_same_v<T, InclineParams>) return InclineEval{p};
        else return ImpactEval(p, horizon);
      },
      params);
}

}  // namespace detail

class Trajectory {
 public:
  explicit Trajectory(MotionConfig config) : config_(std::move(config)) {
    validate(config_);
    if (const auto* h = std::get_if<HybridParams>(&config_.params)) {
      double start = 0.0;
      for (const auto& seg : h->segments) {
        Piece piece{detail::make_eval(seg.params, seg.duration), start, {}};
        if (!pieces_.empty()) {
          const Piece& prev = pieces_.back();
          const Vec3 prev_end = eval_position(prev, start);
          piece.offset = prev_end - eval_position(piece, start);
        }
        pieces_.push_back(std::move(piece));
        start += seg.duration;
      }
      oscillation_ = h->oscillation;
    } else {
      std::visit(
          [this](const auto& p) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(p)>, HybridParams>) {
              pieces_.push_back({detail::make_eval(PrimitiveParams{p}, config_.duration), 0.0, {}});
            }
          },
          config_.params);
    }
  }

  const MotionConfig& config() const { return config_; }
  double duration() const { return config_.duration; }

  Vec3 position_at(double t) const {
    const Piece& piece = piece_at(check_time(t));
    Vec3 p = eval_position(piece, t);
    if (oscillation_) {
      p += (oscillation_->spec.eval(t) - oscillation_->spec.eval(0.0)) * oscillation_->axis;
    }
    return p;
  }

  Vec3 velocity_at(double t) const {
    const Piece& piece = piece_at(check_time(t));
    Vec3 v = std::visit([&](const auto& e) { return e.velocity(t - piece.start); }, piece.eval);
    if (oscillation_) v += oscillation_->spec.derivative(t) * oscillation_->axis;
    return v;
  }

  /// Start times of the composed segments (a single 0 for non-hybrid motion).
  std::vector<double> segment_starts() const {
    std::vector<double> out;
    for (const auto& p : pieces_) out.push_back(p.start);
    return out;
  }

  /// Ground impacts of an impact-response motion (empty for other families).
  std::vector<Bounce> bounces() const {
    std::vector<Bounce> out;
    for (const auto& p : pieces_) {
      if (const auto* e = std::get_if<detail::ImpactEval>(&p.eval)) {
        for (Bounce b : e->bounces()) {
          b.time += p.start;
          out.push_back(b);
        }
      }
    }
    return out;
  }

 private:
  struct Piece {
    detail::PrimitiveEval eval;
    double start;
    Vec3 offset;
  };

  double check_time(double t) const {
    if (!(t >= 0.0 && t <= config_.duration * (1.0 + 1e-12) + 1e-12)) {
      throw std::out_of_range("trajectory time " + std::to_string(t) + " outside [0, " +
                              std::to_string(config_.duration) + "]");
    }
    return t;
  }

  static Vec3 eval_position(const Piece& piece, double t) {
    return std::visit([&](const auto& e) { return e.position(t - piece.start); }, piece.eval) + piece.offset;
  }

  const Piece& piece_at(double t) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](double v, const Piece& p) { return v < p.start; });
    return it == pieces_.begin() ? pieces_.front() : *(it - 1);
  }

  MotionConfig config_;
  std::vector<Piece> pieces_;
  std::optional<OscillationParams> oscillation_;
};

/// One-shot evaluation. Prefer building a Trajectory when sampling repeatedly.
inline Vec3 position_at(const MotionConfig& config, double t) { return Trajectory(config).position_at(t); }
inline Vec3 velocity_at(const MotionConfig& config, double t) { return Trajectory(config).velocity_at(t); }

/// Chains segments into a position-continuous hybrid motion; each segment's
/// own start position is discarded in favour of the previous segment's end.
inline MotionConfig compose_hybrid(std::vector<HybridSegment> segments,
                                   std::optional<OscillationParams> oscillation = std::nullopt) {
  if (segments.empty()) throw Error("invalid_motion", "hybrid motion needs at least one segment");
  double total = 0.0;
  for (const auto& s : segments) {
    if (!(s.duration > 0.0)) throw Error("invalid_motion", "segment durations must be positive");
    total += s.duration;
  }
  MotionConfig config;
  config.subcategory = "hybrid";
  config.params = HybridParams{std::move(segments), std::move(oscillation)};
  config.duration = total;
  validate(config);
  return config;
}

}  // namespace dynahoi
