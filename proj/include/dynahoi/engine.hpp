#pragma once

// Fixed-step episode loop. Frame t holds the state at time t * dt, the
// observation built from it and the action applied from it; exactly N actions
// are executed per episode. Once the palm comes within the localization
// threshold the object is attached: it is moved to the hand's grasp point and
// then carried rigidly by the palm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dynahoi/core.hpp"
#include "dynahoi/kinematics.hpp"
#include "dynahoi/motion.hpp"

namespace dynahoi {

inline constexpr double kLocCap = 0.1;   // m per frame
inline constexpr double kGrasCap = 0.2;  // rad per frame
inline constexpr double kLocThreshold = 0.3;
inline constexpr double kLenientThreshold = 1.0;

enum class Phase { Observe, Move, Wait, Close, Done };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Observe: return "observe";
    case Phase::Move: return "move";
    case Phase::Wait: return "wait";
    case Phase::Close: return "close";
    case Phase::Done: return "done";
  }
  return "?";
}

inline Phase phase_from_string(std::string_view s) {
  for (Phase p : {Phase::Observe, Phase::Move, Phase::Wait, Phase::Close, Phase::Done}) {
    if (to_string(p) == s) return p;
  }
  throw Error("invalid_phase", "unknown phase: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Camera. Rigidly attached to the palm, looking along +z. Camera axes are
// right = -x, down = -y, forward = +z in world terms.

struct Camera {
  Vec3 offset{0.0, 0.0, 0.0};
  double focal = 200.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;
  std::string intrinsics_id = "pinhole640x480f200";

  void validate() const {
    if (!(focal > 0.0) || width <= 0 || height <= 0) throw Error("invalid_camera", "bad camera intrinsics");
  }
  Vec3 to_camera(const Vec3& palm, const Vec3& world) const {
    const Vec3 d = world - (palm + offset);
    return {-d.x, -d.y, d.z};
  }
  Vec3 to_world(const Vec3& palm, const Vec3& cam) const { return palm + offset + Vec3{-cam.x, -cam.y, cam.z}; }
};

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  bool visible = false;
};

/// Pinhole projection of a point given in camera coordinates.
inline Projection project_camera_point(const Camera& cam, const Vec3& p) {
  Projection out;
  out.depth = p.z;
  if (!(p.z > 0.0)) return out;
  out.u = cam.cx + cam.focal * p.x / p.z;
  out.v = cam.cy + cam.focal * p.y / p.z;
  out.visible = out.u >= 0.0 && out.u < cam.width && out.v >= 0.0 && out.v < cam.height;
  return out;
}

inline Projection project(const Camera& cam, const Vec3& palm, const Vec3& world) {
  return project_camera_point(cam, cam.to_camera(palm, world));
}

/// Inverse of project for a visible point.
inline Vec3 back_project(const Camera& cam, const Vec3& palm, double u, double v, double depth) {
  const Vec3 c{(u - cam.cx) * depth / cam.focal, (v - cam.cy) * depth / cam.focal, depth};
  return cam.to_world(palm, c);
}

// ---------------------------------------------------------------------------

struct CameraObservation {
  std::optional<double> u;
  std::optional<double> v;
  std::optional<double> depth;
  bool visible = false;
  std::string intrinsics_id;
  friend bool operator==(const CameraObservation&, const CameraObservation&) = default;
};

struct Observation {
  int frame = 0;
  CameraObservation camera;
  HandState hand;
  std::string instruction;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Action {
  Vec3 loc;
  JointArray gras{};

  static Action zero() { return {}; }

  static Action from_vector(const std::array<double, 18>& v) {
    Action a;
    a.loc = {v[0], v[1], v[2]};
    std::copy(v.begin() + 3, v.end(), a.gras.begin());
    return a;
  }
  std::array<double, 18> as_vector() const {
    std::array<double, 18> v{loc.x, loc.y, loc.z};
    std::copy(gras.begin(), gras.end(), v.begin() + 3);
    return v;
  }
  bool is_zero() const {
    return loc == Vec3{} && std::all_of(gras.begin(), gras.end(), [](double g) { return g == 0.0; });
  }
  /// Palm step scaled onto the loc cap, joint steps clamped to the gras cap.
  Action capped() const {
    Action a = *this;
    const double n = norm(loc);
    if (n > kLocCap) a.loc = loc * (kLocCap / n);
    for (double& g : a.gras) g = std::clamp(g, -kGrasCap, kGrasCap);
    return a;
  }
  friend bool operator==(const Action&, const Action&) = default;
};

struct Thresholds {
  double loc = kLocThreshold;
  double lenient = kLenientThreshold;
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// Logging-time jitter: perturbs recorded sample times of the palm track only.
struct JitterConfig {
  bool enabled = false;
  double sigma = 0.05;              // relative std-dev of each logged interval
  double stall_probability = 0.02;  // chance a sample repeats the previous one
  std::uint64_t seed = 0;
  friend bool operator==(const JitterConfig&, const JitterConfig&) = default;
};

/// Parameters consumed by the scripted intercept controller.
struct OracleSettings {
  double intercept_time = 0.0;  // T_i; 0 selects the default
  double lead_time = 0.1;
  double planar_tolerance = 0.05;
  double closing_rate = kMaxGrabRotation / 1.0;  // rad/s
  friend bool operator==(const OracleSettings&, const OracleSettings&) = default;
};

struct EpisodeConfig {
  std::uint64_t episode_id = 0;
  MotionConfig motion;
  std::string object_category = "custom";
  ObjectShape object;
  HandState hand_start;
  std::string instruction = "Catch the moving object.";
  int frames = 60;
  int observe_frames = 10;
  double dt = kFrameDt;
  Thresholds thresholds;
  JitterConfig jitter;
  Camera camera;
  OracleSettings oracle;
  HandModel hand = HandModel::standard();

  double observe_time() const { return observe_frames * dt; }

  void validate() const {
    if (frames < 1) throw Error("invalid_episode", "episode needs at least one frame");
    if (observe_frames < 0 || observe_frames >= frames) {
      throw Error("invalid_episode", "observe frames must lie in [0, N)");
    }
    if (!(dt > 0.0)) throw Error("invalid_episode", "dt must be positive");
    if (!(thresholds.loc > 0.0) || thresholds.lenient < thresholds.loc) {
      throw Error("invalid_episode", "thresholds must satisfy 0 < loc <= lenient");
    }
    if (motion.duration + 1e-9 < frames * dt) {
      throw Error("invalid_episode", "motion is shorter than the episode");
    }
    if (jitter.enabled && (!(jitter.sigma >= 0.0) || !(jitter.stall_probability >= 0.0) ||
                           !(jitter.stall_probability < 1.0))) {
      throw Error("invalid_episode", "bad jitter parameters");
    }
    dynahoi::validate(motion);
    object.validate();
    camera.validate();
    hand.validate();
    for (double q : hand_start.joints) {
      if (!(q >= 0.0 && q <= kMaxGrabRotation)) throw Error("invalid_episode", "start joints outside [0, pi/2]");
    }
    if (!is_finite(hand_start.palm)) throw Error("invalid_episode", "start palm must be finite");
  }
};

struct FrameRecord {
  Observation obs;
  Action action;  // as applied: capped, and zero during the observe window
  Vec3 target;
  Phase phase = Phase::Observe;
  bool attached = false;
  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct EpisodeRecord {
  EpisodeConfig config;
  std::vector<FrameRecord> frames;
  std::optional<int> attach_frame;
  /// Jittered logging times and the palm positions logged at them; empty
  /// unless jitter mode is on.
  std::vector<double> logged_times;
  std::vector<Vec3> logged_palm;

  std::vector<Vec3> palm_track() const {
    std::vector<Vec3> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(f.obs.hand.palm);
    return out;
  }
  /// The track metrics see: the logged one under jitter, the true one otherwise.
  const std::vector<Vec3>& metric_track(std::vector<Vec3>& scratch) const {
    if (!logged_palm.empty()) return logged_palm;
    scratch = palm_track();
    return scratch;
  }
};

class Engine {
 public:
  explicit Engine(EpisodeConfig config) : config_(std::move(config)), trajectory_((config_.validate(), config_.motion)) {
    reset();
  }

  void reset() {
    frame_ = 0;
    done_ = false;
    hand_ = HandState::make(config_.hand, config_.hand_start.palm, config_.hand_start.joints);
    attach_frame_.reset();
    target_ = trajectory_.position_at(0.0);
    frames_.clear();
    frames_.reserve(config_.frames);
    check_attach();
    obs_ = make_observation();
  }

  const EpisodeConfig& config() const { return config_; }
  const Trajectory& trajectory() const { return trajectory_; }
  const Observation& observation() const { return obs_; }
  const HandState& hand() const { return hand_; }
  const Vec3& target() const { return target_; }
  int frame() const { return frame_; }
  bool done() const { return done_; }
  bool attached() const { return attach_frame_.has_value(); }
  bool observing() const { return frame_ < config_.observe_frames; }

  /// Applies `action` from the current frame; returns the next observation.
  const Observation& step(const Action& action, Phase phase = Phase::Move) {
    if (done_) throw Error("episode_done", "step called after the episode finished");
    const bool observe = observing();
    const Action applied = observe ? Action::zero() : action.capped();
    frames_.push_back({obs_, applied, target_, observe ? Phase::Observe : phase, attached()});

    Vec3 palm = hand_.palm + applied.loc;
    JointArray joints = hand_.joints;
    for (int i = 0; i < kJoints; ++i) joints[i] = clamp_joint(joints[i] + applied.gras[i]);
    hand_ = HandState::make(config_.hand, palm, joints);
    ++frame_;
    target_ = attached() ? hand_.palm + config_.hand.grasp_offset
                         : trajectory_.position_at(std::min(frame_ * config_.dt, trajectory_.duration()));
    if (frame_ >= config_.frames) {
      done_ = true;
    } else {
      check_attach();
    }
    obs_ = make_observation();
    return obs_;
  }

  EpisodeRecord finish() const {
    if (!done_) throw Error("episode_running", "record requested before the episode finished");
    EpisodeRecord rec{config_, frames_, attach_frame_, {}, {}};
    if (config_.jitter.enabled) apply_jitter(rec);
    return rec;
  }

  /// Resamples the palm track at jittered logging times (piecewise linear).
  static void apply_jitter(EpisodeRecord& rec) {
    const auto& cfg = rec.config;
    Rng rng(derive_seed(cfg.jitter.seed, "jitter", cfg.episode_id));
    const std::vector<Vec3> palm = rec.palm_track();
    const double t_end = (static_cast<double>(palm.size()) - 1.0) * cfg.dt;
    double t = 0.0;
    rec.logged_times.clear();
    rec.logged_palm.clear();
    for (std::size_t k = 0; k < palm.size(); ++k) {
      if (k > 0) {
        const double n = rng.normal();
        const bool stall = rng.bernoulli(cfg.jitter.stall_probability);
        t += stall ? 0.0 : cfg.dt * std::max(0.0, 1.0 + cfg.jitter.sigma * n);
      }
      const double tc = std::min(t, t_end);
      rec.logged_times.push_back(tc);
      const double s = tc / cfg.dt;
      const auto i = std::min(static_cast<std::size_t>(std::floor(s)), palm.size() - 1);
      const double w = s - static_cast<double>(i);
      rec.logged_palm.push_back(i + 1 < palm.size() ? palm[i] + w * (palm[i + 1] - palm[i]) : palm[i]);
    }
  }

 private:
  void check_attach() {
    if (!attached() && palm_object_distance(hand_, config_.object.at(target_)) <= config_.thresholds.loc) {
      attach_frame_ = frame_;
    }
  }

  Observation make_observation() const {
    Observation o;
    o.frame = frame_;
    o.hand = hand_;
    o.instruction = config_.instruction;
    o.camera.intrinsics_id = config_.camera.intrinsics_id;
    const Projection p = project(config_.camera, hand_.palm, target_);
    o.camera.visible = p.visible;
    if (p.visible) {
      o.camera.u = p.u;
      o.camera.v = p.v;
      o.camera.depth = p.depth;
    }
    return o;
  }

  EpisodeConfig config_;
  Trajectory trajectory_;
  int frame_ = 0;
  bool done_ = false;
  HandState hand_;
  Vec3 target_;
  std::optional<int> attach_frame_;
  Observation obs_;
  std::vector<FrameRecord> frames_;
};

/// Any step-wise action source.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual Action act(const Observation& obs) = 0;
  /// Phase label recorded for the frame just acted on.
  virtual Phase phase() const { return Phase::Move; }
};

inline EpisodeRecord run_rollout(const EpisodeConfig& config, Controller& controller) {
  Engine engine(config);
  while (!engine.done()) {
    Action a;
    try {
      a = controller.act(engine.observation());
    } catch (const std::exception& e) {
      throw Error("controller_failure", "frame " + std::to_string(engine.frame()) + ": " + e.what());
    }
    engine.step(a, controller.phase());
  }
  return engine.finish();
}

class ZeroController final : public Controller {
 public:
  Action act(const Observation&) override { return Action::zero(); }
};

/// Schematic grayscale raster (binary PGM) of what the palm camera sees.
inline std::string render_pgm(const Camera& cam, const Observation& obs, double object_radius) {
  std::string img = "P5\n" + std::to_string(cam.width) + " " + std::to_string(cam.height) + "\n255\n";
  const std::size_t header = img.size();
  img.resize(header + static_cast<std::size_t>(cam.width) * cam.height, static_cast<char>(32));
  if (obs.camera.visible) {
    const double r = std::max(1.0, cam.focal * object_radius / *obs.camera.depth);
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        if (std::hypot(x - *obs.camera.u, y - *obs.camera.v) <= r) {
          img[header + static_cast<std::size_t>(y) * cam.width + x] = static_cast<char>(230);
        }
      }
    }
  }
  return img;
}

}  // namespace dynahoi
