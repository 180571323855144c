#pragma once

// Scripted comparison agents. They see only observations; the target position
// comes from back-projecting the palm camera measurement.

#include <memory>
#include <optional>
#include <string>

#include "dynahoi/engine.hpp"
#include "dynahoi/oracle.hpp"

namespace dynahoi {

/// What a policy may know about an episode before it starts.
struct EpisodeInfo {
  int frames = 60;
  int observe_frames = 10;
  double dt = kFrameDt;
  double loc_threshold = kLocThreshold;
  double lead_time = 0.1;
  double closing_rate = kMaxGrabRotation;
  Camera camera;

  static EpisodeInfo from(const EpisodeConfig& c) {
    return {c.frames, c.observe_frames, c.dt, c.thresholds.loc, c.oracle.lead_time, c.oracle.closing_rate, c.camera};
  }
};

inline std::optional<Vec3> observed_target(const Camera& cam, const Observation& obs) {
  if (!obs.camera.visible || !obs.camera.u || !obs.camera.v || !obs.camera.depth) return std::nullopt;
  return back_project(cam, obs.hand.palm, *obs.camera.u, *obs.camera.v, *obs.camera.depth);
}

/// Moves straight at the target's current position at full speed.
class ChaserAgent final : public Controller {
 public:
  explicit ChaserAgent(EpisodeInfo info) : info_(std::move(info)) {}

  Action act(const Observation& obs) override {
    if (obs.frame < info_.observe_frames) return Action::zero();
    if (const auto seen = observed_target(info_.camera, obs)) last_ = *seen;
    Action a;
    if (!last_) return a;
    const Vec3 d = *last_ - obs.hand.palm;
    if (closing_ || norm(d) <= info_.loc_threshold) {
      closing_ = true;
      a.gras.fill(info_.closing_rate * info_.dt);
      return a;
    }
    a.loc = d * (std::min(kLocCap, norm(d)) / norm(d));
    return a;
  }

 private:
  EpisodeInfo info_;
  std::optional<Vec3> last_;
  bool closing_ = false;
};

/// Estimates a constant velocity from the last two visible observe frames,
/// commits to one intercept point at the default intercept time and closes
/// once the target is within the localization threshold.
class ExtrapolatorAgent final : public Controller {
 public:
  explicit ExtrapolatorAgent(EpisodeInfo info) : info_(std::move(info)) {}

  Action act(const Observation& obs) override {
    const auto seen = observed_target(info_.camera, obs);
    if (obs.frame < info_.observe_frames) {
      if (seen) {
        prev_ = last_;
        last_ = {obs.frame, *seen};
      }
      return Action::zero();
    }
    if (!planned_) plan(obs);
    Action a;
    const Vec3 estimate = seen ? *seen : predict(obs.frame * info_.dt);
    if (closing_ || distance(estimate, obs.hand.palm) <= info_.loc_threshold) {
      closing_ = true;
      a.gras.fill(info_.closing_rate * info_.dt);
      return a;
    }
    if (!goal_) return a;
    const Vec3 rem = *goal_ - obs.hand.palm;
    const double left = norm(rem);
    if (left > 1e-9) a.loc = rem * (std::min(step_, left) / left);
    return a;
  }

 private:
  struct Sample {
    int frame;
    Vec3 pos;
  };

  Vec3 predict(double t) const {
    if (!last_) return Vec3{};
    return last_->pos + (t - last_->frame * info_.dt) * velocity_;
  }

  void plan(const Observation& obs) {
    planned_ = true;
    if (!last_) return;
    if (prev_) velocity_ = (last_->pos - prev_->pos) / ((last_->frame - prev_->frame) * info_.dt);
    const double t_i = default_intercept_frame(info_.frames, info_.observe_frames) * info_.dt;
    goal_ = predict(t_i);
    const double window = t_i - info_.observe_frames * info_.dt - info_.lead_time;
    const double speed = window > 0.0 ? distance(*goal_, obs.hand.palm) / window : 1e9;
    step_ = std::min(speed * info_.dt, kLocCap);
  }

  EpisodeInfo info_;
  std::optional<Sample> prev_;
  std::optional<Sample> last_;
  Vec3 velocity_;
  std::optional<Vec3> goal_;
  double step_ = 0.0;
  bool planned_ = false;
  bool closing_ = false;
};

inline std::unique_ptr<Controller> make_agent(const std::string& name, const EpisodeInfo& info) {
  if (name == "zero") return std::make_unique<ZeroController>();
  if (name == "chaser") return std::make_unique<ChaserAgent>(info);
  if (name == "extrapolator") return std::make_unique<ExtrapolatorAgent>(info);
  throw Error("unknown_agent", "unknown agent: " + name + " (expected zero, chaser or extrapolator)");
}

}  // namespace dynahoi
