#pragma once

// Scripted intercept controller. It reads the motion model once to choose an
// intercept point, then runs observe -> move -> wait -> close -> done without
// replanning. The palm travels at constant speed and arrives lead_time early.

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "dynahoi/core.hpp"
#include "dynahoi/engine.hpp"
#include "dynahoi/kinematics.hpp"
#include "dynahoi/motion.hpp"

namespace dynahoi {

/// Fraction of the post-observation window after which the default intercept happens.
inline constexpr double kDefaultInterceptFraction = 0.6;

struct InterceptPlan {
  double observation_time = 0.0;
  double intercept_time = 0.0;
  double lead_time = 0.0;
  Vec3 hand_start;
  Vec3 target_position;
  double move_speed = 0.0;
  double planar_tolerance = 0.05;
  bool wait_only = false;

  double travel_time() const { return intercept_time - observation_time - lead_time; }
};

/// Default T_i: frame-aligned, kDefaultInterceptFraction into the acting window.
inline int default_intercept_frame(int frames, int observe_frames) {
  const int k = observe_frames + static_cast<int>(std::floor(kDefaultInterceptFraction * (frames - observe_frames)));
  return std::min(k, frames - 1);
}

inline double intercept_time(const EpisodeConfig& cfg) {
  return cfg.oracle.intercept_time > 0.0 ? cfg.oracle.intercept_time
                                         : default_intercept_frame(cfg.frames, cfg.observe_frames) * cfg.dt;
}

inline InterceptPlan plan_intercept(const Trajectory& motion, const Vec3& hand_start, double t_obs,
                                    double lead_time, double t_intercept, double dt = kFrameDt,
                                    double planar_tolerance = 0.05) {
  if (!(t_obs >= 0.0) || !(lead_time >= 0.0) || !(t_intercept > t_obs + lead_time)) {
    throw Error("infeasible_plan", "intercept time must exceed observation time plus lead time");
  }
  if (t_intercept > motion.duration() + 1e-9) {
    throw Error("infeasible_plan", "intercept time lies beyond the motion duration");
  }
  InterceptPlan plan;
  plan.observation_time = t_obs;
  plan.intercept_time = t_intercept;
  plan.lead_time = lead_time;
  plan.hand_start = hand_start;
  plan.target_position = motion.position_at(t_intercept);
  plan.planar_tolerance = planar_tolerance;
  const double dist = distance(plan.target_position, hand_start);
  if (dist == 0.0) {
    plan.wait_only = true;
    return plan;
  }
  plan.move_speed = dist / plan.travel_time();
  if (plan.move_speed * dt > kLocCap * (1.0 + 1e-12)) {
    throw Error("infeasible_plan", "required palm speed " + std::to_string(plan.move_speed) +
                                       " m/s exceeds the action cap");
  }
  return plan;
}

inline InterceptPlan plan_intercept(const EpisodeConfig& cfg, const Trajectory& motion) {
  return plan_intercept(motion, cfg.hand_start.palm, cfg.observe_time(), cfg.oracle.lead_time,
                        intercept_time(cfg), cfg.dt, cfg.oracle.planar_tolerance);
}

/// Reference joint increments of the oracle grasp (one closing step).
inline JointArray oracle_grasp_reference(const OracleSettings& s, double dt = kFrameDt) {
  JointArray g;
  g.fill(s.closing_rate * dt);
  return g;
}

/// Inputs of one oracle decision. `object` must sit at the current target pose.
struct OracleInput {
  const InterceptPlan& plan;
  const OracleSettings& settings;
  const HandModel& hand_model;
  const HandState& hand;
  const ObjectShape& object;
  int frame = 0;
  int observe_frames = 0;
  bool localized = false;
  double dt = kFrameDt;
};

/// One step of the state machine. Returns the action for this frame and the
/// phase it was decided in; the phase never moves backwards.
inline std::pair<Action, Phase> oracle_step(Phase phase, const OracleInput& in) {
  if (in.frame < in.observe_frames) return {Action::zero(), Phase::Observe};
  if (phase == Phase::Observe) phase = in.plan.wait_only ? Phase::Wait : Phase::Move;
  if (in.localized && (phase == Phase::Move || phase == Phase::Wait)) phase = Phase::Close;

  if (phase == Phase::Move) {
    const Vec3 rem = in.plan.target_position - in.hand.palm;
    const double left = norm(rem);
    if (left <= 1e-9) {
      phase = Phase::Wait;
    } else {
      const double step = std::min(in.plan.move_speed * in.dt, left);
      Action a;
      a.loc = rem * (step / left);
      return {a, Phase::Move};
    }
  }
  if (phase == Phase::Wait) {
    if (horizontal_distance(in.object.pose.position, in.hand.palm) > in.plan.planar_tolerance) {
      return {Action::zero(), Phase::Wait};
    }
    phase = Phase::Close;
  }
  if (phase == Phase::Close) {
    const auto contacts = contact_test(in.hand_model, in.hand, in.object);
    const bool all_contact = std::all_of(contacts.begin(), contacts.end(), [](bool c) { return c; });
    const bool all_closed = std::all_of(in.hand.joints.begin(), in.hand.joints.end(),
                                        [](double q) { return q >= kMaxGrabRotation; });
    if (all_contact || all_closed) return {Action::zero(), Phase::Done};
    Action a;
    a.gras = oracle_grasp_reference(in.settings, in.dt);
    return {a, Phase::Close};
  }
  return {Action::zero(), Phase::Done};
}

/// Oracle as a Controller. It tracks attachment with the engine's own
/// arithmetic, so its view of the target always matches the engine's.
class OracleController final : public Controller {
 public:
  explicit OracleController(const EpisodeConfig& cfg)
      : cfg_(cfg), motion_(cfg.motion), plan_(plan_intercept(cfg, motion_)) {}

  const InterceptPlan& plan() const { return plan_; }

  Action act(const Observation& obs) override {
    const double t = std::min(obs.frame * cfg_.dt, motion_.duration());
    const Vec3 target = attached_ ? obs.hand.palm + cfg_.hand.grasp_offset : motion_.position_at(t);
    const ObjectShape object = cfg_.object.at(target);
    if (!attached_ && palm_object_distance(obs.hand, object) <= cfg_.thresholds.loc) attached_ = true;
    const OracleInput in{plan_,  cfg_.oracle, cfg_.hand, obs.hand, object,
                         obs.frame, cfg_.observe_frames, attached_, cfg_.dt};
    auto [action, phase] = oracle_step(phase_, in);
    phase_ = phase;
    return action;
  }

  Phase phase() const override { return phase_; }

 private:
  const EpisodeConfig& cfg_;
  Trajectory motion_;
  InterceptPlan plan_;
  Phase phase_ = Phase::Observe;
  bool attached_ = false;
};

inline EpisodeRecord run_gt_episode(const EpisodeConfig& cfg) {
  OracleController oracle(cfg);
  return run_rollout(cfg, oracle);
}

}  // namespace dynahoi
