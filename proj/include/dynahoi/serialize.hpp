#pragma once

// JSON mapping for every public value type. Objects are emitted with sorted
// keys and shortest round-trip floats, so equal values always serialize to
// identical bytes.

#include <optional>
#include <string>

#include <json.hpp>

#include "dynahoi/engine.hpp"
#include "dynahoi/fourier.hpp"
#include "dynahoi/kinematics.hpp"
#include "dynahoi/metrics.hpp"
#include "dynahoi/motion.hpp"

namespace dynahoi {

using nlohmann::json;

inline void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }
inline void from_json(const json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) throw Error("schema", "expected a 3-vector");
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline void to_json(json& j, const Quat& q) { j = json::array({q.w, q.x, q.y, q.z}); }
inline void from_json(const json& j, Quat& q) {
  if (!j.is_array() || j.size() != 4) throw Error("schema", "expected a quaternion [w, x, y, z]");
  q = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline void to_json(json& j, const Pose& p) { j = {{"position", p.position}, {"orientation", p.orientation}}; }
inline void from_json(const json& j, Pose& p) {
  p.position = j.at("position").get<Vec3>();
  p.orientation = j.at("orientation").get<Quat>();
}

inline void to_json(json& j, const FourierSpec& f) {
  j = {{"omega", f.omega}, {"a0", f.a0}, {"a", f.a}, {"b", f.b}};
}
inline void from_json(const json& j, FourierSpec& f) {
  f.omega = j.at("omega").get<double>();
  f.a0 = j.at("a0").get<double>();
  f.a = j.at("a").get<std::vector<double>>();
  f.b = j.at("b").get<std::vector<double>>();
}

// --- motion ---------------------------------------------------------------

inline void to_json(json& j, const LineParams& p) { j = {{"start", p.start}, {"velocity", p.velocity}}; }
inline void from_json(const json& j, LineParams& p) {
  p.start = j.at("start").get<Vec3>();
  p.velocity = j.at("velocity").get<Vec3>();
}
inline void to_json(json& j, const HarmonicParams& p) {
  j = {{"center", p.center}, {"axis", p.axis}, {"amplitude", p.amplitude}, {"omega", p.omega}, {"phase", p.phase}};
}
inline void from_json(const json& j, HarmonicParams& p) {
  p.center = j.at("center").get<Vec3>();
  p.axis = j.at("axis").get<Vec3>();
  p.amplitude = j.at("amplitude").get<double>();
  p.omega = j.at("omega").get<double>();
  p.phase = j.at("phase").get<double>();
}
inline void to_json(json& j, const CircularParams& p) {
  j = {{"center", p.center}, {"radius", p.radius}, {"u1", p.u1},
       {"u2", p.u2},         {"omega", p.omega},   {"start_angle", p.start_angle}};
}
inline void from_json(const json& j, CircularParams& p) {
  p.center = j.at("center").get<Vec3>();
  p.radius = j.at("radius").get<double>();
  p.u1 = j.at("u1").get<Vec3>();
  p.u2 = j.at("u2").get<Vec3>();
  p.omega = j.at("omega").get<double>();
  p.start_angle = j.at("start_angle").get<double>();
}
inline void to_json(json& j, const ProjectileParams& p) {
  j = {{"start", p.start}, {"speed", p.speed}, {"launch_angle", p.launch_angle},
       {"azimuth", p.azimuth}, {"gravity", p.gravity}};
}
inline void from_json(const json& j, ProjectileParams& p) {
  p.start = j.at("start").get<Vec3>();
  p.speed = j.at("speed").get<double>();
  p.launch_angle = j.at("launch_angle").get<double>();
  p.azimuth = j.at("azimuth").get<double>();
  p.gravity = j.at("gravity").get<double>();
}
inline void to_json(json& j, const PendulumParams& p) {
  j = {{"pivot", p.pivot},          {"length", p.length},   {"initial_angle", p.initial_angle},
       {"initial_rate", p.initial_rate}, {"swing_azimuth", p.swing_azimuth}, {"gravity", p.gravity}};
}
inline void from_json(const json& j, PendulumParams& p) {
  p.pivot = j.at("pivot").get<Vec3>();
  p.length = j.at("length").get<double>();
  p.initial_angle = j.at("initial_angle").get<double>();
  p.initial_rate = j.at("initial_rate").get<double>();
  p.swing_azimuth = j.at("swing_azimuth").get<double>();
  p.gravity = j.at("gravity").get<double>();
}
inline void to_json(json& j, const InclineParams& p) {
  j = {{"origin", p.origin}, {"downhill", p.downhill}, {"incline_angle", p.incline_angle},
       {"initial_speed", p.initial_speed}, {"gravity", p.gravity}};
}
inline void from_json(const json& j, InclineParams& p) {
  p.origin = j.at("origin").get<Vec3>();
  p.downhill = j.at("downhill").get<Vec3>();
  p.incline_angle = j.at("incline_angle").get<double>();
  p.initial_speed = j.at("initial_speed").get<double>();
  p.gravity = j.at("gravity").get<double>();
}
inline void to_json(json& j, const ImpactParams& p) {
  j = {{"ballistic", p.ballistic}, {"ground_height", p.ground_height}, {"restitution", p.restitution}};
}
inline void from_json(const json& j, ImpactParams& p) {
  p.ballistic = j.at("ballistic").get<ProjectileParams>();
  p.ground_height = j.at("ground_height").get<double>();
  p.restitution = j.at("restitution").get<double>();
}

namespace detail {

template <class Variant>
json tagged(const Variant& v) {
  json j;
  j["family"] = std::string(kFamilyNames[v.index()]);
  std::visit([&](const auto& p) { j["params"] = p; }, v);
  return j;
}

inline PrimitiveParams primitive_from_json(const json& j) {
  switch (motion_family_from_string(j.at("family").get<std::string>())) {
    case MotionFamily::StraightLine: return j.at("params").get<LineParams>();
    case MotionFamily::SimpleHarmonic: return j.at("params").get<HarmonicParams>();
    case MotionFamily::CircularArc: return j.at("params").get<CircularParams>();
    case MotionFamily::Projectile: return j.at("params").get<ProjectileParams>();
    case MotionFamily::Pendulum: return j.at("params").get<PendulumParams>();
    case MotionFamily::InclinedRolling: return j.at("params").get<InclineParams>();
    case MotionFamily::ImpactResponse: return j.at("params").get<ImpactParams>();
    case MotionFamily::Hybrid: break;
  }
  throw Error("schema", "hybrid segments cannot nest");
}

}  // namespace detail

inline void to_json(json& j, const HybridParams& h) {
  json segs = json::array();
  for (const auto& s : h.segments) {
    json e = detail::tagged(s.params);
    e["duration"] = s.duration;
    segs.push_back(e);
  }
  j = {{"segments", segs}, {"oscillation", nullptr}};
  if (h.oscillation) j["oscillation"] = {{"spec", h.oscillation->spec}, {"axis", h.oscillation->axis}};
}
inline void from_json(const json& j, HybridParams& h) {
  h.segments.clear();
  for (const auto& e : j.at("segments")) {
    h.segments.push_back({detail::primitive_from_json(e), e.at("duration").get<double>()});
  }
  h.oscillation.reset();
  if (j.contains("oscillation") && !j["oscillation"].is_null()) {
    h.oscillation = OscillationParams{j["oscillation"].at("spec").get<FourierSpec>(),
                                      j["oscillation"].at("axis").get<Vec3>()};
  }
}

inline void to_json(json& j, const MotionConfig& c) {
  j = detail::tagged(c.params);
  j["subcategory"] = c.subcategory;
  j["seed"] = c.seed;
  j["duration"] = c.duration;
}
inline void from_json(const json& j, MotionConfig& c) {
  const MotionFamily f = motion_family_from_string(j.at("family").get<std::string>());
  if (f == MotionFamily::Hybrid) {
    c.params = j.at("params").get<HybridParams>();
  } else {
    std::visit([&](const auto& p) { c.params = p; }, detail::primitive_from_json(j));
  }
  c.subcategory = j.at("subcategory").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.duration = j.at("duration").get<double>();
}

// --- hand and objects -------------------------------------------------------

inline void to_json(json& j, const ObjectShape& s) {
  j = {{"kind", std::string(to_string(s.kind))}, {"pose", s.pose}};
  switch (s.kind) {
    case ShapeKind::Sphere: j["radius"] = s.radius; break;
    case ShapeKind::Box: j["half_extents"] = s.half_extents; break;
    case ShapeKind::Cylinder:
      j["radius"] = s.radius;
      j["half_height"] = s.half_height;
      break;
  }
}
inline void from_json(const json& j, ObjectShape& s) {
  s = ObjectShape{};
  s.kind = shape_kind_from_string(j.at("kind").get<std::string>());
  s.pose = j.at("pose").get<Pose>();
  if (s.kind == ShapeKind::Box) {
    s.half_extents = j.at("half_extents").get<Vec3>();
  } else {
    s.radius = j.at("radius").get<double>();
    if (s.kind == ShapeKind::Cylinder) s.half_height = j.at("half_height").get<double>();
  }
}

inline void to_json(json& j, const HandState& h) {
  json tips = json::array();
  for (const auto& t : h.fingertips) tips.push_back(t);
  j = {{"palm", h.palm}, {"joints", h.joints}, {"fingertips", tips}};
}
/// Fingertips are re-derived from the standard hand; stored values are ignored.
inline HandState hand_state_from_json(const json& j, const HandModel& model = HandModel::standard()) {
  const auto joints = j.at("joints").get<std::vector<double>>();
  if (joints.size() != kJoints) throw Error("schema", "expected 15 joint angles");
  JointArray q{};
  std::copy(joints.begin(), joints.end(), q.begin());
  for (double v : q) {
    if (!(v >= 0.0 && v <= kMaxGrabRotation)) throw Error("schema", "joint angle outside [0, pi/2]");
  }
  return HandState::make(model, j.at("palm").get<Vec3>(), q);
}
inline void from_json(const json& j, HandState& h) { h = hand_state_from_json(j); }

// --- engine -----------------------------------------------------------------

inline void to_json(json& j, const Action& a) { j = a.as_vector(); }
inline void from_json(const json& j, Action& a) {
  if (!j.is_array() || j.size() != 18) throw Error("schema", "an action has 18 components");
  std::array<double, 18> v{};
  for (std::size_t i = 0; i < 18; ++i) v[i] = j[i].get<double>();
  a = Action::from_vector(v);
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
inline std::optional<double> optional_double(const json& j) {
  return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

inline void to_json(json& j, const CameraObservation& c) {
  j = {{"u", optional_json(c.u)},
       {"v", optional_json(c.v)},
       {"depth", optional_json(c.depth)},
       {"visible", c.visible},
       {"intrinsics_id", c.intrinsics_id}};
}
inline void from_json(const json& j, CameraObservation& c) {
  c.u = optional_double(j.at("u"));
  c.v = optional_double(j.at("v"));
  c.depth = optional_double(j.at("depth"));
  c.visible = j.at("visible").get<bool>();
  c.intrinsics_id = j.at("intrinsics_id").get<std::string>();
}

inline void to_json(json& j, const Observation& o) {
  j = {{"frame", o.frame}, {"camera", o.camera}, {"hand", o.hand}, {"instruction", o.instruction}};
}
inline void from_json(const json& j, Observation& o) {
  o.frame = j.at("frame").get<int>();
  o.camera = j.at("camera").get<CameraObservation>();
  o.hand = j.at("hand").get<HandState>();
  o.instruction = j.at("instruction").get<std::string>();
}

inline void to_json(json& j, const Camera& c) {
  j = {{"offset", c.offset}, {"focal", c.focal}, {"cx", c.cx}, {"cy", c.cy},
       {"width", c.width},   {"height", c.height}, {"intrinsics_id", c.intrinsics_id}};
}
inline void from_json(const json& j, Camera& c) {
  c.offset = j.at("offset").get<Vec3>();
  c.focal = j.at("focal").get<double>();
  c.cx = j.at("cx").get<double>();
  c.cy = j.at("cy").get<double>();
  c.width = j.at("width").get<int>();
  c.height = j.at("height").get<int>();
  c.intrinsics_id = j.at("intrinsics_id").get<std::string>();
}

inline void to_json(json& j, const EpisodeConfig& c) {
  j = {{"episode_id", c.episode_id},
       {"motion", c.motion},
       {"object_category", c.object_category},
       {"object", c.object},
       {"hand_start", c.hand_start},
       {"instruction", c.instruction},
       {"frames", c.frames},
       {"observe_frames", c.observe_frames},
       {"dt", c.dt},
       {"thresholds", {{"loc", c.thresholds.loc}, {"lenient", c.thresholds.lenient}}},
       {"jitter",
        {{"enabled", c.jitter.enabled},
         {"sigma", c.jitter.sigma},
         {"stall_probability", c.jitter.stall_probability},
         {"seed", c.jitter.seed}}},
       {"camera", c.camera},
       {"oracle",
        {{"intercept_time", c.oracle.intercept_time},
         {"lead_time", c.oracle.lead_time},
         {"planar_tolerance", c.oracle.planar_tolerance},
         {"closing_rate", c.oracle.closing_rate}}}};
}
inline void from_json(const json& j, EpisodeConfig& c) {
  c = EpisodeConfig{};
  c.episode_id = j.at("episode_id").get<std::uint64_t>();
  c.motion = j.at("motion").get<MotionConfig>();
  c.object_category = j.at("object_category").get<std::string>();
  c.object = j.at("object").get<ObjectShape>();
  c.hand_start = j.at("hand_start").get<HandState>();
  c.instruction = j.at("instruction").get<std::string>();
  c.frames = j.at("frames").get<int>();
  c.observe_frames = j.at("observe_frames").get<int>();
  c.dt = j.at("dt").get<double>();
  c.thresholds = {j.at("thresholds").at("loc").get<double>(), j.at("thresholds").at("lenient").get<double>()};
  const json& jt = j.at("jitter");
  c.jitter = {jt.at("enabled").get<bool>(), jt.at("sigma").get<double>(), jt.at("stall_probability").get<double>(),
              jt.at("seed").get<std::uint64_t>()};
  c.camera = j.at("camera").get<Camera>();
  const json& o = j.at("oracle");
  c.oracle = {o.at("intercept_time").get<double>(), o.at("lead_time").get<double>(),
              o.at("planar_tolerance").get<double>(), o.at("closing_rate").get<double>()};
}

inline void to_json(json& j, const FrameRecord& f) {
  j = {{"obs", f.obs},
       {"action", f.action},
       {"target", f.target},
       {"phase", std::string(to_string(f.phase))},
       {"attached", f.attached}};
}
inline void from_json(const json& j, FrameRecord& f) {
  f.obs = j.at("obs").get<Observation>();
  f.action = j.at("action").get<Action>();
  f.target = j.at("target").get<Vec3>();
  f.phase = phase_from_string(j.at("phase").get<std::string>());
  f.attached = j.at("attached").get<bool>();
}

inline void to_json(json& j, const EpisodeRecord& r) {
  j = {{"config", r.config},
       {"frames", r.frames},
       {"attach_frame", r.attach_frame ? json(*r.attach_frame) : json(nullptr)},
       {"logged_times", r.logged_times},
       {"logged_palm", r.logged_palm}};
}
inline void from_json(const json& j, EpisodeRecord& r) {
  r.config = j.at("config").get<EpisodeConfig>();
  r.frames = j.at("frames").get<std::vector<FrameRecord>>();
  r.attach_frame = j.at("attach_frame").is_null() ? std::nullopt : std::optional<int>(j["attach_frame"].get<int>());
  r.logged_times = j.at("logged_times").get<std::vector<double>>();
  r.logged_palm = j.at("logged_palm").get<std::vector<Vec3>>();
}

// --- metrics ----------------------------------------------------------------

inline void to_json(json& j, const GraspRates& g) {
  j = {{"loose", g.loose}, {"medium", g.medium}, {"strict", g.strict}};
}
inline void from_json(const json& j, GraspRates& g) {
  g = {j.at("loose").get<double>(), j.at("medium").get<double>(), j.at("strict").get<double>()};
}

inline void to_json(json& j, const MetricsReport& r) {
  j = {{"episode_id", r.episode_id},
       {"subcategory", r.subcategory},
       {"family", r.family},
       {"periodicity", r.periodicity},
       {"duration_bucket", r.duration_bucket},
       {"length_bucket", r.length_bucket},
       {"frames", r.frames},
       {"path_length", r.path_length},
       {"s_loc", r.s_loc},
       {"s_loc_lenient", r.s_loc_lenient},
       {"e_loc", r.e_loc},
       {"first_loc_frame", r.first_loc_frame ? json(*r.first_loc_frame) : json(nullptr)},
       {"s_gra", r.s_gra},
       {"e_gra", r.e_gra},
       {"q_smooth", r.q_smooth},
       {"q_line", r.q_line},
       {"r_time", r.r_time},
       {"grasp_rates", r.grasp_rates},
       {"contact_grasp_rates", r.contact_grasp_rates}};
}
inline void from_json(const json& j, MetricsReport& r) {
  r.episode_id = j.at("episode_id").get<std::uint64_t>();
  r.subcategory = j.at("subcategory").get<std::string>();
  r.family = j.at("family").get<std::string>();
  r.periodicity = j.at("periodicity").get<std::string>();
  r.duration_bucket = j.at("duration_bucket").get<std::string>();
  r.length_bucket = j.at("length_bucket").get<std::string>();
  r.frames = j.at("frames").get<int>();
  r.path_length = j.at("path_length").get<double>();
  r.s_loc = j.at("s_loc").get<bool>();
  r.s_loc_lenient = j.at("s_loc_lenient").get<bool>();
  r.e_loc = j.at("e_loc").get<double>();
  r.first_loc_frame =
      j.at("first_loc_frame").is_null() ? std::nullopt : std::optional<int>(j["first_loc_frame"].get<int>());
  r.s_gra = j.at("s_gra").get<bool>();
  r.e_gra = j.at("e_gra").get<double>();
  r.q_smooth = j.at("q_smooth").get<double>();
  r.q_line = j.at("q_line").get<double>();
  r.r_time = j.at("r_time").get<double>();
  r.grasp_rates = j.at("grasp_rates").get<GraspRates>();
  r.contact_grasp_rates = j.at("contact_grasp_rates").get<GraspRates>();
}

inline void to_json(json& j, const CorpusSummary& s) {
  j = {{"episodes", s.episodes},   {"s_loc", s.s_loc},       {"s_loc_lenient", s.s_loc_lenient},
       {"s_gra", s.s_gra},         {"s_gra_given_loc", s.s_gra_given_loc},
       {"e_loc", s.e_loc},         {"e_gra", s.e_gra},       {"q_smooth", s.q_smooth},
       {"q_line", s.q_line},       {"r_time", s.r_time},     {"grasp_rates", s.grasp_rates},
       {"contact_grasp_rates", s.contact_grasp_rates}};
}

}  // namespace dynahoi
