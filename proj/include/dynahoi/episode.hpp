#pragma once

// Episode factory: draws motion, object and hand placement for one catalog
// subcategory. The hand starts behind (toward -z) both the intercept point and
// everything the target does while the hand is frozen, so the palm camera
// faces the action. Draws that violate a placement constraint are redrawn
// from a derived seed.

#include <cstdint>
#include <string>
#include <string_view>

#include "dynahoi/catalog.hpp"
#include "dynahoi/engine.hpp"
#include "dynahoi/oracle.hpp"

namespace dynahoi {

struct EpisodeOptions {
  int observe_frames = 10;
  int frames = 0;  // 0 draws from the subcategory's range
  Thresholds thresholds;
  JitterConfig jitter;
  int max_attempts = 256;
  /// Required clearance beyond the localization threshold while observing.
  double observe_clearance = 0.15;
  /// Fraction of the action cap the planned palm speed may use.
  double speed_margin = 0.9;
};

namespace detail {

inline bool placement_ok(const EpisodeConfig& cfg, const Trajectory& motion, double clearance,
                         double speed_margin) {
  int visible = 0;
  bool tail_visible = true;
  for (int k = 0; k < cfg.observe_frames; ++k) {
    const Vec3 p = motion.position_at(k * cfg.dt);
    if (distance(p, cfg.hand_start.palm) <= cfg.thresholds.loc + clearance) return false;
    const bool v = project(cfg.camera, cfg.hand_start.palm, p).visible;
    visible += v ? 1 : 0;
    if (k >= cfg.observe_frames - 2) tail_visible = tail_visible && v;
  }
  // Half the observe window in view, and always its last two frames.
  if (2 * visible < cfg.observe_frames || !tail_visible) return false;
  try {
    const InterceptPlan plan = plan_intercept(cfg, motion);
    return plan.move_speed * cfg.dt <= speed_margin * kLocCap;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace detail

inline EpisodeConfig make_episode(const MotionCatalog& catalog, std::string_view subcategory,
                                  std::uint64_t episode_id, std::uint64_t seed, const EpisodeOptions& opt = {}) {
  const SubcategorySpec& spec = catalog.find(subcategory);
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, "redraw", attempt);
    EpisodeConfig cfg;
    cfg.episode_id = episode_id;
    cfg.frames = opt.frames > 0 ? opt.frames : sample_frames(spec, s);
    cfg.observe_frames = opt.observe_frames;
    cfg.thresholds = opt.thresholds;
    cfg.jitter = opt.jitter;
    if (cfg.observe_frames >= cfg.frames) throw Error("invalid_episode", "observe frames must be fewer than frames");
    cfg.motion = sample_config(catalog, spec.id, s, cfg.frames);
    auto [category, object] = sample_object(catalog, s);
    cfg.object_category = category;
    cfg.object = object;
    cfg.instruction = "Catch the " + category + ".";

    const Trajectory motion(cfg.motion);
    const double t_i = intercept_time(cfg);
    cfg.oracle.intercept_time = t_i;
    const Vec3 anchor = motion.position_at(t_i);
    Vec3 mean;
    double nearest_z = anchor.z;
    for (int k = 0; k < cfg.observe_frames; ++k) {
      const Vec3 p = motion.position_at(k * cfg.dt);
      mean += p;
      nearest_z = std::min(nearest_z, p.z);
    }
    mean = cfg.observe_frames > 0 ? mean / cfg.observe_frames : anchor;

    const double window = t_i - cfg.observe_time() - cfg.oracle.lead_time;
    const double lo = cfg.thresholds.loc + 0.1;
    const double hi = std::min(cfg.thresholds.loc + 0.9, 1.5 * window);
    if (!(hi > lo)) continue;
    Rng rng(derive_seed(s, "hand"));
    const double depth = rng.uniform(lo, hi);
    Vec3 palm = 0.5 * (anchor + mean);
    palm.z = nearest_z - depth;
    cfg.hand_start = HandState::make(cfg.hand, palm);

    if (detail::placement_ok(cfg, motion, opt.observe_clearance, opt.speed_margin)) {
      cfg.validate();
      return cfg;
    }
  }
  throw Error("infeasible_episode", "no valid placement for " + spec.id + " after " +
                                        std::to_string(opt.max_attempts) + " draws");
}

inline EpisodeConfig make_episode(std::string_view subcategory, std::uint64_t episode_id, std::uint64_t seed,
                                  const EpisodeOptions& opt = {}) {
  return make_episode(default_catalog(), subcategory, episode_id, seed, opt);
}

}  // namespace dynahoi
