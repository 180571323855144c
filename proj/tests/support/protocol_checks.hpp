#pragma once

// Skill-program fixtures and decoder fuzzing shared by the unit tests and the
// acceptance runner.

#include <functional>
#include <string>
#include <vector>

#include "dynahoi/protocol.hpp"

namespace dynahoi::checks {

/// Row k of a predicted rollout: palm drifting along +z, joints closing.
inline Row18 predicted_row(int k) {
  Row18 r{};
  r[0] = 0.01;
  r[1] = 1.0;
  r[2] = 0.02 * k;
  for (int i = 3; i < 18; ++i) r[i] = 0.05 * k;
  return r;
}

/// The two-skill template (APPROACH for 4 frames, GRASP for 6) with its
/// placeholders filled in, horizon 10.
inline std::string template_program(bool with_motion = true) {
  json seq = json::array();
  seq.push_back({{"skill", "APPROACH"},
                 {"params", {{"target", "object"}, {"target_point", {0.0, 1.0, 0.5}}, {"speed", 0.5}}},
                 {"duration", 4},
                 {"terminate_if", "palm within 0.3 m of object"}});
  seq.push_back({{"skill", "GRASP"}, {"params", {{"joint_targets", std::vector<double>(15, 1.2)}}}, {"duration", 6}});
  json j = {{"action_sequence", seq}};
  if (with_motion) {
    json pm = json::array();
    for (int k = 1; k <= 10; ++k) pm.push_back({{"frame_index", k}, {"hand_params", predicted_row(k)}});
    j["predicted_motion"] = pm;
  }
  return j.dump(2);
}

struct MalformedCase {
  std::string name;
  std::string text;
  std::string code;  // expected diagnostic code
  std::string path;  // expected JSON pointer ("" when not checked)
};

inline std::string program_with(const std::function<void(json&)>& edit) {
  json j = json::parse(template_program());
  edit(j);
  return j.dump();
}

inline std::vector<MalformedCase> malformed_programs() {
  std::vector<MalformedCase> v;
  const std::string good = template_program();
  v.push_back({"truncated text", good.substr(0, good.size() / 2), "syntax", ""});
  v.push_back({"trailing comma", R"({"action_sequence":[{"skill":"WAIT","duration":10,}]})", "syntax", ""});
  v.push_back({"template placeholders", R"({"action_sequence":[{"skill":"APPROACH","params":{...},"duration":4}]})",
               "syntax", ""});
  v.push_back({"not an object", "[1,2,3]", "type", ""});
  v.push_back({"unknown skill", program_with([](json& j) { j["action_sequence"][0]["skill"] = "FLY"; }),
               "unknown_skill", "/action_sequence/0/skill"});
  v.push_back({"lowercase skill", program_with([](json& j) { j["action_sequence"][1]["skill"] = "grasp"; }),
               "unknown_skill", "/action_sequence/1/skill"});
  v.push_back({"durations 4+5", program_with([](json& j) { j["action_sequence"][1]["duration"] = 5; }),
               "duration_sum", "/action_sequence"});
  v.push_back({"zero duration", program_with([](json& j) { j["action_sequence"][0]["duration"] = 0; }),
               "bad_duration", "/action_sequence/0/duration"});
  v.push_back({"fractional duration", program_with([](json& j) { j["action_sequence"][0]["duration"] = 4.5; }),
               "type", "/action_sequence/0/duration"});
  v.push_back({"missing duration", program_with([](json& j) { j["action_sequence"][1].erase("duration"); }),
               "missing_field", "/action_sequence/1/duration"});
  v.push_back({"missing skill", program_with([](json& j) { j["action_sequence"][0].erase("skill"); }),
               "missing_field", "/action_sequence/0/skill"});
  v.push_back({"missing action_sequence", program_with([](json& j) { j.erase("action_sequence"); }), "missing_field",
               "/action_sequence"});
  v.push_back({"empty action_sequence", program_with([](json& j) { j["action_sequence"] = json::array(); }),
               "empty_sequence", "/action_sequence"});
  v.push_back({"unknown top-level field", program_with([](json& j) { j["comment"] = "hi"; }), "unknown_field",
               "/comment"});
  v.push_back({"unknown step field", program_with([](json& j) { j["action_sequence"][0]["priority"] = 1; }),
               "unknown_field", "/action_sequence/0/priority"});
  v.push_back({"unknown param", program_with([](json& j) { j["action_sequence"][0]["params"]["accel"] = 1.0; }),
               "unknown_param", "/action_sequence/0/params/accel"});
  v.push_back({"missing speed", program_with([](json& j) { j["action_sequence"][0]["params"].erase("speed"); }),
               "missing_param", "/action_sequence/0/params/speed"});
  v.push_back({"negative speed", program_with([](json& j) { j["action_sequence"][0]["params"]["speed"] = -1.0; }),
               "bad_param", "/action_sequence/0/params/speed"});
  v.push_back({"target_point arity",
               program_with([](json& j) { j["action_sequence"][0]["params"]["target_point"] = {1.0, 2.0}; }), "arity",
               "/action_sequence/0/params/target_point"});
  v.push_back({"joint target out of range",
               program_with([](json& j) { j["action_sequence"][1]["params"]["joint_targets"][3] = 2.0; }),
               "bad_param", "/action_sequence/1/params/joint_targets"});
  v.push_back({"joint_targets arity",
               program_with([](json& j) { j["action_sequence"][1]["params"]["joint_targets"].erase(0); }), "arity",
               "/action_sequence/1/params/joint_targets"});
  v.push_back({"string speed", program_with([](json& j) { j["action_sequence"][0]["params"]["speed"] = "fast"; }),
               "type", "/action_sequence/0/params/speed"});
  v.push_back({"predicted_motion too short", program_with([](json& j) { j["predicted_motion"].erase(9); }),
               "motion_length", "/predicted_motion"});
  v.push_back({"frame_index gap", program_with([](json& j) { j["predicted_motion"][4]["frame_index"] = 7; }),
               "frame_index", "/predicted_motion/4/frame_index"});
  v.push_back({"frame_index from zero",
               program_with([](json& j) {
                 for (int k = 0; k < 10; ++k) j["predicted_motion"][k]["frame_index"] = k;
               }),
               "frame_index", "/predicted_motion/0/frame_index"});
  v.push_back({"hand_params with 17 values", program_with([](json& j) { j["predicted_motion"][2]["hand_params"].erase(17); }),
               "arity", "/predicted_motion/2/hand_params"});
  v.push_back({"hand_params with a string",
               program_with([](json& j) { j["predicted_motion"][2]["hand_params"][5] = "x"; }), "type",
               "/predicted_motion/2/hand_params/5"});
  v.push_back({"overflowing number", R"({"action_sequence":[{"skill":"LIFT","params":{"height":1e999},"duration":10}]})",
               "non_finite", ""});
  v.push_back({"nesting too deep", std::string(100, '[') + std::string(100, ']'), "too_deep", ""});
  v.push_back({"params not an object", program_with([](json& j) { j["action_sequence"][1]["params"] = 3; }), "type",
               "/action_sequence/1/params"});
  v.push_back({"adjust without deltas",
               R"({"action_sequence":[{"skill":"ADJUST","params":{},"duration":10}]})", "missing_param",
               "/action_sequence/0/params"});
  return v;
}

struct FuzzResult {
  long cases = 0;
  long random_accepted = 0;     // random byte strings that decoded (should be 0)
  long mutated_accepted = 0;    // mutated valid messages that still decoded
  long reencode_mismatch = 0;   // accepted inputs whose canonical form does not re-decode equal
  long unparseable_errors = 0;  // inputs rejected without a code
};

inline void check_accepted(const Decoded& d, FuzzResult& r) {
  const std::string canon = encode(*d.message);
  const Decoded again = decode(canon);
  if (!again.ok() || encode(*again.message) != canon) ++r.reencode_mismatch;
}

/// Random 0..1024-byte inputs plus byte-level mutations of valid frames, run
/// through decode, decode_frame and parse_skill_program.
inline FuzzResult fuzz_decoders(long cases, std::uint64_t seed, const std::vector<std::string>& valid_payloads) {
  Rng rng(seed);
  FuzzResult r;
  const std::string alphabet = "{}[]\":,0123456789.eE+-truefalsnl \\/abcxyz_\n\t";
  for (; r.cases < cases; ++r.cases) {
    std::string input;
    const int mode = static_cast<int>(r.cases % 4);
    if (mode == 0) {
      const int n = rng.uniform_int(0, 1024);
      input.resize(static_cast<std::size_t>(n));
      for (char& c : input) c = static_cast<char>(rng.uniform_int(0, 255));
    } else if (mode == 1) {
      const int n = rng.uniform_int(0, 1024);
      for (int i = 0; i < n; ++i) input.push_back(alphabet[rng.uniform_int(0, static_cast<int>(alphabet.size()) - 1)]);
    } else {
      input = valid_payloads[rng.uniform_int(0, static_cast<int>(valid_payloads.size()) - 1)];
      const int edits = rng.uniform_int(1, 4);
      for (int e = 0; e < edits && !input.empty(); ++e) {
        const auto at = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(input.size()) - 1));
        switch (rng.uniform_int(0, 3)) {
          case 0: input[at] = static_cast<char>(rng.uniform_int(0, 255)); break;
          case 1: input.erase(at, 1); break;
          case 2: input.insert(at, 1, alphabet[rng.uniform_int(0, static_cast<int>(alphabet.size()) - 1)]); break;
          default: input.resize(at); break;
        }
      }
    }

    const Decoded d = decode(input);
    if (d.ok()) {
      if (mode <= 1) ++r.random_accepted;
      else ++r.mutated_accepted;
      check_accepted(d, r);
    } else if (d.error.code.empty()) {
      ++r.unparseable_errors;
    }

    std::string framed = input;
    if (mode == 3 && framed.size() >= 4) {
      framed = frame_payload(input);
      framed[rng.uniform_int(0, 3)] = static_cast<char>(rng.uniform_int(0, 255));
    }
    const Decoded f = decode_frame(framed);
    if (f.ok()) check_accepted(f, r);
    else if (f.error.code.empty()) ++r.unparseable_errors;

    const SkillParse p = parse_skill_program(input, 10);
    if (!p.ok() && p.diagnostic.code.empty()) ++r.unparseable_errors;
  }
  return r;
}

}  // namespace dynahoi::checks
