#pragma once

// Evaluation wire protocol: JSON messages in length-prefixed frames, plus the
// skill-program response format and its expansion into per-frame actions.
//
// Every message is one JSON object with a "type" tag. Encoding is canonical:
// compact, keys sorted, shortest round-trip floats. Decoding never throws;
// failures come back as a machine-readable code.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dynahoi/core.hpp"
#include "dynahoi/engine.hpp"
#include "dynahoi/metrics.hpp"
#include "dynahoi/serialize.hpp"

namespace dynahoi {

inline constexpr int kDefaultHorizon = 10;
inline constexpr int kMaxHorizon = 1000;
inline constexpr std::size_t kMaxFrameBytes = std::size_t{4} << 20;
inline constexpr int kMaxJsonDepth = 64;

using Row18 = std::array<double, 18>;

struct StartEpisode {
  std::uint64_t episode_id = 0;
  std::string task_type;
  int length = 0;
  int horizon = kDefaultHorizon;
  friend bool operator==(const StartEpisode&, const StartEpisode&) = default;
};

/// Observation for the current frame. The image slot is reserved and always null.
struct ImageAndState {
  int frame = 0;
  Observation observation;
  Row18 state{};
  friend bool operator==(const ImageAndState&, const ImageAndState&) = default;
};

/// Either raw per-frame action rows (palm delta + 15 joint deltas) or a
/// skill-program text expanded by the server.
struct ActionData {
  std::vector<Row18> actions;
  std::optional<std::string> program;
  friend bool operator==(const ActionData&, const ActionData&) = default;
};

struct MetricsMessage {
  MetricsReport report;
  friend bool operator==(const MetricsMessage&, const MetricsMessage&) = default;
};

struct ErrorMessage {
  std::string code;
  std::string detail;
  friend bool operator==(const ErrorMessage&, const ErrorMessage&) = default;
};

using WireMessage = std::variant<StartEpisode, ImageAndState, ActionData, MetricsMessage, ErrorMessage>;

inline constexpr std::array<std::string_view, 5> kMessageTypes = {"start_episode", "image_and_state", "action_data",
                                                                 "metrics", "error"};

inline std::string_view message_type(const WireMessage& m) { return kMessageTypes[m.index()]; }

struct WireError {
  std::string code;
  std::string detail;
};

struct Decoded {
  std::optional<WireMessage> message;
  WireError error;
  bool ok() const { return message.has_value(); }
};

namespace detail {

/// Bracket nesting depth outside string literals; bails out early past `limit`.
inline int json_depth(std::string_view text, int limit) {
  int depth = 0;
  int max_depth = 0;
  bool in_string = false;
  bool escape = false;
  for (char c : text) {
    if (in_string) {
      if (escape) {
        escape = false;
      } else if (c == '\\') {
        escape = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      max_depth = std::max(max_depth, ++depth);
      if (max_depth > limit) return max_depth;
    } else if (c == ']' || c == '}') {
      --depth;
    }
  }
  return max_depth;
}

/// Parses untrusted JSON; throws Error with a wire code on failure.
inline json parse_untrusted(std::string_view text) {
  if (json_depth(text, kMaxJsonDepth) > kMaxJsonDepth) throw Error("bad_json", "nesting deeper than 64 levels");
  try {
    return json::parse(text);
  } catch (const json::out_of_range& e) {
    throw Error("non_finite", e.what());
  } catch (const json::parse_error& e) {
    throw Error("bad_json", e.what());
  }
}

inline void require_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || k == a;
    if (!known) throw Error("schema", std::string(what) + ": unexpected field \"" + k + "\"");
  }
}

inline const json& field(const json& j, const char* key, std::string_view what) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error("schema", std::string(what) + ": missing field \"" + key + "\"");
  return *it;
}

inline double finite_number(const json& j, std::string_view what) {
  if (!j.is_number()) throw Error("schema", std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error("non_finite", std::string(what) + " is not finite");
  return v;
}

inline std::int64_t integer(const json& j, std::string_view what) {
  if (!j.is_number_integer()) throw Error("schema", std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

inline Row18 row18(const json& j, std::string_view what) {
  if (!j.is_array()) throw Error("schema", std::string(what) + " must be an array");
  if (j.size() != 18) {
    throw Error("schema", std::string(what) + " has " + std::to_string(j.size()) + " values, expected 18");
  }
  Row18 r{};
  for (std::size_t i = 0; i < 18; ++i) r[i] = finite_number(j[i], what);
  return r;
}

inline void check_finite_tree(const json& root) {
  std::vector<const json*> stack{&root};
  while (!stack.empty()) {
    const json* j = stack.back();
    stack.pop_back();
    if (j->is_number_float() && !std::isfinite(j->get<double>())) throw Error("non_finite", "non-finite number");
    if (j->is_structured()) {
      for (const auto& c : *j) stack.push_back(&c);
    }
  }
}

inline json message_json(const WireMessage& m) {
  json j;
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StartEpisode>) {
          j = {{"episode_id", v.episode_id}, {"task_type", v.task_type}, {"length", v.length}, {"horizon", v.horizon}};
        } else if constexpr (std::is_same_v<T, ImageAndState>) {
          j = {{"frame", v.frame}, {"observation", v.observation}, {"state", v.state}, {"image", nullptr}};
        } else if constexpr (std::is_same_v<T, ActionData>) {
          j = json::object();
          if (v.program) {
            j["program"] = *v.program;
          } else {
            j["actions"] = v.actions;
          }
        } else if constexpr (std::is_same_v<T, MetricsMessage>) {
          j = {{"report", v.report}};
        } else {
          j = {{"code", v.code}, {"detail", v.detail}};
        }
      },
      m);
  j["type"] = std::string(message_type(m));
  return j;
}

inline WireMessage message_from_json(const json& j) {
  if (!j.is_object()) throw Error("schema", "a message must be a JSON object");
  const json& tag = field(j, "type", "message");
  if (!tag.is_string()) throw Error("schema", "\"type\" must be a string");
  const std::string type = tag.get<std::string>();

  if (type == "start_episode") {
    require_keys(j, {"type", "episode_id", "task_type", "length", "horizon"}, type);
    StartEpisode s;
    const json& id = field(j, "episode_id", type);
    if (!id.is_number_unsigned()) throw Error("schema", "episode_id must be a non-negative integer");
    s.episode_id = id.get<std::uint64_t>();
    const json& task = field(j, "task_type", type);
    if (!task.is_string()) throw Error("schema", "task_type must be a string");
    s.task_type = task.get<std::string>();
    const auto length = integer(field(j, "length", type), "length");
    const auto horizon = integer(field(j, "horizon", type), "horizon");
    if (length < 1 || length > 1'000'000) throw Error("schema", "length must lie in [1, 1000000]");
    if (horizon < 1 || horizon > kMaxHorizon) throw Error("schema", "horizon must lie in [1, 1000]");
    s.length = static_cast<int>(length);
    s.horizon = static_cast<int>(horizon);
    return s;
  }
  if (type == "image_and_state") {
    require_keys(j, {"type", "frame", "observation", "state", "image"}, type);
    ImageAndState m;
    const auto frame = integer(field(j, "frame", type), "frame");
    if (frame < 0 || frame > 1'000'000) throw Error("schema", "frame out of range");
    m.frame = static_cast<int>(frame);
    check_finite_tree(field(j, "observation", type));
    m.observation = field(j, "observation", type).get<Observation>();
    m.state = row18(field(j, "state", type), "state");
    if (!field(j, "image", type).is_null()) throw Error("schema", "the image slot is reserved and must be null");
    return m;
  }
  if (type == "action_data") {
    require_keys(j, {"type", "actions", "program"}, type);
    ActionData a;
    const bool has_rows = j.contains("actions");
    const bool has_program = j.contains("program");
    if (has_rows == has_program) throw Error("schema", "action_data needs exactly one of \"actions\" or \"program\"");
    if (has_program) {
      if (!j["program"].is_string()) throw Error("schema", "program must be a string");
      a.program = j["program"].get<std::string>();
      return a;
    }
    const json& rows = j["actions"];
    if (!rows.is_array() || rows.empty()) throw Error("schema", "actions must be a non-empty array of rows");
    for (std::size_t i = 0; i < rows.size(); ++i) a.actions.push_back(row18(rows[i], "actions[" + std::to_string(i) + "]"));
    return a;
  }
  if (type == "metrics") {
    require_keys(j, {"type", "report"}, type);
    check_finite_tree(field(j, "report", type));
    return MetricsMessage{field(j, "report", type).get<MetricsReport>()};
  }
  if (type == "error") {
    require_keys(j, {"type", "code", "detail"}, type);
    const json& code = field(j, "code", type);
    const json& det = field(j, "detail", type);
    if (!code.is_string() || !det.is_string()) throw Error("schema", "error code and detail must be strings");
    return ErrorMessage{code.get<std::string>(), det.get<std::string>()};
  }
  throw Error("unknown_type", "unknown message type \"" + type + "\"");
}

}  // namespace detail

/// Canonical payload text. Throws Error("non_finite") rather than emitting null.
inline std::string encode(const WireMessage& m) {
  const json j = detail::message_json(m);
  detail::check_finite_tree(j);
  return j.dump();
}

inline Decoded decode(std::string_view payload) noexcept {
  Decoded d;
  try {
    const json j = detail::parse_untrusted(payload);
    d.message = detail::message_from_json(j);
  } catch (const Error& e) {
    d.error = {e.code(), e.what()};
  } catch (const json::exception& e) {
    d.error = {"schema", e.what()};
  } catch (const std::exception& e) {
    d.error = {"schema", e.what()};
  } catch (...) {
    d.error = {"internal", "unknown failure"};
  }
  return d;
}

/// 4-byte big-endian length prefix followed by the payload.
inline std::string frame_payload(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw Error("malformed_frame", "payload exceeds the frame size limit");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((n >> shift) & 0xFFu));
  out.append(payload);
  return out;
}

inline std::uint32_t read_frame_length(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

/// Decodes exactly one complete frame.
inline Decoded decode_frame(std::string_view bytes) noexcept {
  if (bytes.size() < 4) return {std::nullopt, {"malformed_frame", "frame shorter than its length prefix"}};
  const std::uint32_t n = read_frame_length(reinterpret_cast<const unsigned char*>(bytes.data()));
  if (n > kMaxFrameBytes) return {std::nullopt, {"malformed_frame", "declared length exceeds the frame size limit"}};
  if (n != bytes.size() - 4) {
    return {std::nullopt, {"malformed_frame", "declared length " + std::to_string(n) + " but " +
                                                  std::to_string(bytes.size() - 4) + " payload bytes"}};
  }
  return decode(bytes.substr(4));
}

inline std::string encode_frame(const WireMessage& m) { return frame_payload(encode(m)); }

inline ImageAndState make_image_and_state(const Observation& obs) { return {obs.frame, obs, obs.hand.as_vector()}; }

// ---------------------------------------------------------------------------
// Skill programs

enum class Skill { Wait, Approach, Intercept, Grasp, Lift, Adjust };

inline constexpr std::array<std::string_view, 6> kSkillNames = {"WAIT", "APPROACH", "INTERCEPT",
                                                               "GRASP", "LIFT",     "ADJUST"};

inline std::string_view to_string(Skill s) { return kSkillNames[static_cast<std::size_t>(s)]; }

struct SkillStep {
  Skill skill = Skill::Wait;
  int duration = 1;
  std::optional<std::string> target;  // free-form label, e.g. "object"
  std::optional<Vec3> target_point;
  std::optional<double> speed;  // m/s
  std::optional<JointArray> joint_targets;
  std::optional<double> height;  // m, along +y
  std::optional<Vec3> delta_palm;
  std::optional<JointArray> delta_joints;
  std::optional<std::string> terminate_if;  // stored verbatim, never evaluated
  friend bool operator==(const SkillStep&, const SkillStep&) = default;
};

struct PredictedFrame {
  int frame_index = 1;
  Row18 hand_params{};
  friend bool operator==(const PredictedFrame&, const PredictedFrame&) = default;
};

struct SkillProgram {
  std::vector<SkillStep> steps;
  std::vector<PredictedFrame> predicted_motion;  // empty when absent

  int horizon() const {
    int t = 0;
    for (const auto& s : steps) t += s.duration;
    return t;
  }
  friend bool operator==(const SkillProgram&, const SkillProgram&) = default;
};

/// `kind` is "syntax" (with a byte offset) or "semantic" (with a JSON pointer).
struct SkillDiagnostic {
  std::string kind;
  std::string code;
  std::string path;
  std::size_t offset = 0;
  std::string message;

  std::string str() const {
    if (kind == "syntax") return "syntax error at byte " + std::to_string(offset) + ": " + message;
    return code + " at " + (path.empty() ? "/" : path) + ": " + message;
  }
};

struct SkillParse {
  std::optional<SkillProgram> program;
  SkillDiagnostic diagnostic;
  bool ok() const { return program.has_value(); }
};

namespace detail {

struct SkillFailure {
  std::string code;
  std::string path;
  std::string message;
};

[[noreturn]] inline void fail(std::string code, std::string path, std::string message) {
  throw SkillFailure{std::move(code), std::move(path), std::move(message)};
}

inline double skill_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail("type", path, "expected a number");
  return j.get<double>();
}

inline Vec3 skill_vec3(const json& j, const std::string& path) {
  if (!j.is_array()) fail("type", path, "expected an array of 3 numbers");
  if (j.size() != 3) fail("arity", path, "expected 3 values, got " + std::to_string(j.size()));
  return {skill_number(j[0], path + "/0"), skill_number(j[1], path + "/1"), skill_number(j[2], path + "/2")};
}

inline JointArray skill_joints(const json& j, const std::string& path) {
  if (!j.is_array()) fail("type", path, "expected an array of 15 numbers");
  if (j.size() != kJoints) fail("arity", path, "expected 15 values, got " + std::to_string(j.size()));
  JointArray q{};
  for (int i = 0; i < kJoints; ++i) q[i] = skill_number(j[i], path + "/" + std::to_string(i));
  return q;
}

inline void require_param(const SkillStep& s, bool present, const std::string& path, std::string_view name) {
  if (!present) {
    fail("missing_param", path, std::string(to_string(s.skill)) + " requires params." + std::string(name));
  }
}

inline SkillStep parse_step(const json& e, const std::string& path) {
  if (!e.is_object()) fail("type", path, "each action_sequence entry must be an object");
  for (const auto& [k, v] : e.items()) {
    if (k != "skill" && k != "params" && k != "duration" && k != "terminate_if") {
      fail("unknown_field", path + "/" + k, "unexpected field \"" + k + "\"");
    }
  }
  SkillStep s;
  if (!e.contains("skill")) fail("missing_field", path + "/skill", "missing \"skill\"");
  if (!e["skill"].is_string()) fail("type", path + "/skill", "skill must be a string");
  const std::string name = e["skill"].get<std::string>();
  const auto it = std::find(kSkillNames.begin(), kSkillNames.end(), name);
  if (it == kSkillNames.end()) {
    fail("unknown_skill", path + "/skill",
         "unknown skill \"" + name + "\" (expected WAIT, APPROACH, INTERCEPT, GRASP, LIFT or ADJUST)");
  }
  s.skill = static_cast<Skill>(it - kSkillNames.begin());

  if (!e.contains("duration")) fail("missing_field", path + "/duration", "missing \"duration\"");
  if (!e["duration"].is_number_integer()) fail("type", path + "/duration", "duration must be an integer frame count");
  const auto d = e["duration"].get<std::int64_t>();
  if (d < 1 || d > kMaxHorizon) fail("bad_duration", path + "/duration", "duration must be at least 1 frame");
  s.duration = static_cast<int>(d);

  if (e.contains("terminate_if")) {
    const json& t = e["terminate_if"];
    s.terminate_if = t.is_string() ? t.get<std::string>() : t.dump();
  }

  const json params = e.contains("params") ? e["params"] : json::object();
  const std::string pp = path + "/params";
  if (!params.is_object()) fail("type", pp, "params must be an object");
  for (const auto& [k, v] : params.items()) {
    const std::string kp = pp + "/" + k;
    if (k == "target") {
      if (!v.is_string()) fail("type", kp, "target must be a string label");
      s.target = v.get<std::string>();
    } else if (k == "target_point") {
      s.target_point = skill_vec3(v, kp);
    } else if (k == "speed") {
      s.speed = skill_number(v, kp);
      if (!(*s.speed > 0.0)) fail("bad_param", kp, "speed must be positive");
    } else if (k == "joint_targets") {
      s.joint_targets = skill_joints(v, kp);
      for (double q : *s.joint_targets) {
        if (!(q >= 0.0 && q <= kMaxGrabRotation)) fail("bad_param", kp, "joint targets must lie in [0, pi/2]");
      }
    } else if (k == "height") {
      s.height = skill_number(v, kp);
    } else if (k == "delta_palm") {
      s.delta_palm = skill_vec3(v, kp);
    } else if (k == "delta_joints") {
      s.delta_joints = skill_joints(v, kp);
    } else {
      fail("unknown_param", kp, "unexpected parameter \"" + k + "\" for " + name);
    }
  }

  switch (s.skill) {
    case Skill::Wait:
      break;
    case Skill::Approach:
    case Skill::Intercept:
      require_param(s, s.target_point.has_value(), pp + "/target_point", "target_point");
      require_param(s, s.speed.has_value(), pp + "/speed", "speed");
      break;
    case Skill::Grasp:
      require_param(s, s.joint_targets.has_value(), pp + "/joint_targets", "joint_targets");
      break;
    case Skill::Lift:
      require_param(s, s.height.has_value(), pp + "/height", "height");
      break;
    case Skill::Adjust:
      require_param(s, s.delta_palm || s.delta_joints, pp, "delta_palm or params.delta_joints");
      break;
  }
  return s;
}

inline SkillProgram parse_program_json(const json& j, int horizon) {
  if (!j.is_object()) fail("type", "", "a skill program must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (k != "action_sequence" && k != "predicted_motion") fail("unknown_field", "/" + k, "unexpected field \"" + k + "\"");
  }
  if (!j.contains("action_sequence")) fail("missing_field", "/action_sequence", "missing \"action_sequence\"");
  const json& seq = j["action_sequence"];
  if (!seq.is_array()) fail("type", "/action_sequence", "action_sequence must be an array");
  if (seq.empty()) fail("empty_sequence", "/action_sequence", "action_sequence must not be empty");

  SkillProgram p;
  for (std::size_t i = 0; i < seq.size(); ++i) p.steps.push_back(parse_step(seq[i], "/action_sequence/" + std::to_string(i)));
  if (p.horizon() != horizon) {
    fail("duration_sum", "/action_sequence",
         "durations must sum to horizon (" + std::to_string(p.horizon()) + " != " + std::to_string(horizon) + ")");
  }

  if (j.contains("predicted_motion")) {
    const json& pm = j["predicted_motion"];
    if (!pm.is_array()) fail("type", "/predicted_motion", "predicted_motion must be an array");
    if (static_cast<int>(pm.size()) != horizon) {
      fail("motion_length", "/predicted_motion",
           "predicted_motion has " + std::to_string(pm.size()) + " frames, horizon is " + std::to_string(horizon));
    }
    for (std::size_t i = 0; i < pm.size(); ++i) {
      const std::string ep = "/predicted_motion/" + std::to_string(i);
      const json& e = pm[i];
      if (!e.is_object()) fail("type", ep, "each predicted_motion entry must be an object");
      for (const auto& [k, v] : e.items()) {
        if (k != "frame_index" && k != "hand_params") fail("unknown_field", ep + "/" + k, "unexpected field \"" + k + "\"");
      }
      if (!e.contains("frame_index")) fail("missing_field", ep + "/frame_index", "missing \"frame_index\"");
      if (!e["frame_index"].is_number_integer()) fail("type", ep + "/frame_index", "frame_index must be an integer");
      const auto idx = e["frame_index"].get<std::int64_t>();
      if (idx != static_cast<std::int64_t>(i) + 1) {
        fail("frame_index", ep + "/frame_index",
             "frame_index must run 1..T consecutively (expected " + std::to_string(i + 1) + ", got " +
                 std::to_string(idx) + ")");
      }
      if (!e.contains("hand_params")) fail("missing_field", ep + "/hand_params", "missing \"hand_params\"");
      const json& hp = e["hand_params"];
      if (!hp.is_array()) fail("type", ep + "/hand_params", "hand_params must be an array");
      if (hp.size() != 18) {
        fail("arity", ep + "/hand_params", "hand_params has " + std::to_string(hp.size()) + " values, expected 18");
      }
      PredictedFrame f;
      f.frame_index = static_cast<int>(idx);
      for (std::size_t k = 0; k < 18; ++k) f.hand_params[k] = skill_number(hp[k], ep + "/hand_params/" + std::to_string(k));
      p.predicted_motion.push_back(f);
    }
  }
  return p;
}

}  // namespace detail

/// Strict parse of a skill-program response for horizon T. Never throws.
inline SkillParse parse_skill_program(std::string_view text, int horizon = kDefaultHorizon) noexcept {
  SkillParse r;
  try {
    if (detail::json_depth(text, kMaxJsonDepth) > kMaxJsonDepth) {
      r.diagnostic = {"syntax", "too_deep", "", 0, "nesting deeper than 64 levels"};
      return r;
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      r.diagnostic = {"syntax", "syntax", "", e.byte, e.what()};
      return r;
    } catch (const json::out_of_range& e) {
      r.diagnostic = {"semantic", "non_finite", "", 0, e.what()};
      return r;
    }
    r.program = detail::parse_program_json(j, horizon);
  } catch (const detail::SkillFailure& f) {
    r.diagnostic = {"semantic", f.code, f.path, 0, f.message};
  } catch (const std::exception& e) {
    r.diagnostic = {"semantic", "internal", "", 0, e.what()};
  } catch (...) {
    r.diagnostic = {"semantic", "internal", "", 0, "unknown failure"};
  }
  return r;
}

/// Turns a program into T actions using only the program and the current hand
/// state. predicted_motion, when present, wins: each row becomes the delta from
/// the previous commanded state. Otherwise skills run in order against a
/// running state that mirrors the engine's joint clamping.
inline std::vector<Action> expand_skill_program(const SkillProgram& prog, const HandState& state,
                                                double dt = kFrameDt) {
  std::vector<Action> out;
  if (!prog.predicted_motion.empty()) {
    if (static_cast<int>(prog.predicted_motion.size()) != prog.horizon()) {
      throw Error("skill_program", "predicted_motion length differs from the summed durations");
    }
    Row18 prev = state.as_vector();
    for (const auto& f : prog.predicted_motion) {
      Row18 d{};
      for (std::size_t k = 0; k < 18; ++k) d[k] = f.hand_params[k] - prev[k];
      prev = f.hand_params;
      out.push_back(Action::from_vector(d));
    }
    return out;
  }

  Vec3 palm = state.palm;
  JointArray joints = state.joints;
  const auto emit = [&](const Action& a) {
    palm += a.loc;
    for (int i = 0; i < kJoints; ++i) joints[i] = clamp_joint(joints[i] + a.gras[i]);
    out.push_back(a);
  };
  const auto cap_loc = [](Vec3 v) {
    const double n = norm(v);
    return n > kLocCap ? v * (kLocCap / n) : v;
  };
  const auto cap_gras = [](double g) { return std::clamp(g, -kGrasCap, kGrasCap); };

  for (const auto& s : prog.steps) {
    const auto missing = [&s](std::string_view p) {
      return Error("skill_program", std::string(to_string(s.skill)) + " is missing params." + std::string(p));
    };
    switch (s.skill) {
      case Skill::Wait:
        for (int k = 0; k < s.duration; ++k) emit(Action::zero());
        break;
      case Skill::Approach:
      case Skill::Intercept: {
        if (!s.target_point) throw missing("target_point");
        if (!s.speed) throw missing("speed");
        const double step = std::min(*s.speed * dt, kLocCap);
        for (int k = 0; k < s.duration; ++k) {
          const Vec3 rem = *s.target_point - palm;
          const double left = norm(rem);
          Action a;
          if (left > 1e-12) a.loc = rem * (std::min(step, left) / left);
          emit(a);
        }
        break;
      }
      case Skill::Grasp: {
        if (!s.joint_targets) throw missing("joint_targets");
        Action a;
        for (int i = 0; i < kJoints; ++i) a.gras[i] = cap_gras(((*s.joint_targets)[i] - joints[i]) / s.duration);
        for (int k = 0; k < s.duration; ++k) emit(a);
        break;
      }
      case Skill::Lift: {
        if (!s.height) throw missing("height");
        Action a;
        a.loc = cap_loc(kUp * (*s.height / s.duration));
        for (int k = 0; k < s.duration; ++k) emit(a);
        break;
      }
      case Skill::Adjust: {
        if (!s.delta_palm && !s.delta_joints) throw missing("delta_palm");
        Action a;
        if (s.delta_palm) a.loc = cap_loc(*s.delta_palm / s.duration);
        if (s.delta_joints) {
          for (int i = 0; i < kJoints; ++i) a.gras[i] = cap_gras((*s.delta_joints)[i] / s.duration);
        }
        for (int k = 0; k < s.duration; ++k) emit(a);
        break;
      }
    }
  }
  return out;
}

}  // namespace dynahoi
