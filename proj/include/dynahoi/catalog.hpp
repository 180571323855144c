#pragma once

// Motion catalog: the 22 subcategories with their uniform parameter ranges,
// frame-count ranges and sampling weights, plus the object categories. The
// catalog is plain JSON, versioned and guarded by an FNV-1a checksum of its
// canonical serialization.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dynahoi/catalog_data.hpp"
#include "dynahoi/core.hpp"
#include "dynahoi/kinematics.hpp"
#include "dynahoi/motion.hpp"

namespace dynahoi {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double mid() const { return 0.5 * (lo + hi); }
};

using RangeMap = std::map<std::string, ParamRange>;

struct SubcategorySpec {
  std::string id;
  MotionFamily family = MotionFamily::StraightLine;
  double weight = 1.0;
  int frames_min = 40;
  int frames_max = 80;
  std::string pattern;  // hybrid only: LA, AL, LAL or stochastic
  RangeMap ranges;

  const ParamRange& range(const std::string& name) const {
    auto it = ranges.find(name);
    if (it == ranges.end()) throw Error("invalid_catalog", id + ": missing range '" + name + "'");
    return it->second;
  }
};

struct ObjectCategory {
  std::string name;
  ShapeKind kind = ShapeKind::Sphere;
  RangeMap dims;
};

struct MotionCatalog {
  int version = 1;
  std::vector<SubcategorySpec> subcategories;
  std::vector<ObjectCategory> objects;
  std::string checksum;

  const SubcategorySpec& find(std::string_view id) const {
    for (const auto& s : subcategories) {
      if (s.id == id) return s;
    }
    throw Error("unknown_subcategory", "unknown subcategory: " + std::string(id));
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& s : subcategories) out.push_back(s.id);
    return out;
  }
};

/// FNV-1a 64 of the compact, key-sorted dump with any "checksum" field removed.
inline std::string catalog_checksum(nlohmann::json j) {
  j.erase("checksum");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

namespace detail {

inline RangeMap parse_ranges(const nlohmann::json& j, const std::string& where) {
  RangeMap out;
  for (const auto& [key, v] : j.items()) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw Error("invalid_catalog", where + "." + key + ": expected [lo, hi]");
    }
    ParamRange r{v[0].get<double>(), v[1].get<double>()};
    if (!(r.lo <= r.hi)) throw Error("invalid_catalog", where + "." + key + ": lo > hi");
    out.emplace(key, r);
  }
  return out;
}

}  // namespace detail

inline MotionCatalog parse_catalog(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid_catalog", std::string("catalog is not valid JSON: ") + e.what());
  }
  MotionCatalog cat;
  try {
    cat.version = j.at("version").get<int>();
    const std::string sum = catalog_checksum(j);
    if (j.contains("checksum") && j["checksum"].get<std::string>() != sum) {
      throw Error("catalog_checksum", "catalog checksum mismatch: expected " + sum);
    }
    cat.checksum = sum;
    for (const auto& s : j.at("subcategories")) {
      SubcategorySpec spec;
      spec.id = s.at("id").get<std::string>();
      spec.family = motion_family_from_string(s.at("family").get<std::string>());
      spec.weight = s.at("weight").get<double>();
      spec.frames_min = s.at("frames").at(0).get<int>();
      spec.frames_max = s.at("frames").at(1).get<int>();
      spec.pattern = s.value("pattern", "");
      spec.ranges = detail::parse_ranges(s.at("ranges"), spec.id);
      if (spec.frames_min < 2 || spec.frames_max < spec.frames_min || !(spec.weight > 0.0)) {
        throw Error("invalid_catalog", spec.id + ": bad frames or weight");
      }
      cat.subcategories.push_back(std::move(spec));
    }
    for (const auto& o : j.at("objects")) {
      cat.objects.push_back({o.at("name").get<std::string>(),
                             shape_kind_from_string(o.at("kind").get<std::string>()),
                             detail::parse_ranges(o.at("dims"), o.at("name").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid_catalog", std::string("malformed catalog: ") + e.what());
  }
  if (cat.subcategories.empty() || cat.objects.empty()) {
    throw Error("invalid_catalog", "catalog needs subcategories and objects");
  }
  return cat;
}

inline MotionCatalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open catalog: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_catalog(ss.str());
}

inline const MotionCatalog& default_catalog() {
  static const MotionCatalog cat = parse_catalog(kDefaultCatalogJson);
  return cat;
}

namespace detail {

using Draws = std::map<std::string, double>;

// One draw per range, in key order, so results never depend on code order.
inline Draws draw_all(const RangeMap& ranges, Rng& rng) {
  Draws out;
  for (const auto& [k, r] : ranges) out[k] = rng.uniform(r.lo, r.hi);
  return out;
}

inline Vec3 draw_point(const Draws& d) { return {d.at("x"), d.at("y"), d.at("z")}; }

inline Vec3 horizontal(double azimuth) { return {std::cos(azimuth), 0.0, std::sin(azimuth)}; }

// Arc whose tangent at angle 0 is `dir`; turning left or right by `clockwise`.
inline CircularParams tangent_arc(const Vec3& dir, double speed, double radius, bool clockwise) {
  CircularParams c;
  c.radius = radius;
  c.u2 = dir;
  c.u1 = clockwise ? cross(kUp, dir) : cross(dir, kUp);
  c.omega = speed / radius;
  c.start_angle = 0.0;
  return c;
}

inline Vec3 arc_tangent(const CircularParams& c, double t) {
  const double a = c.start_angle + c.omega * t;
  return -std::sin(a) * c.u1 + std::cos(a) * c.u2;
}

inline MotionConfig hybrid_from_draws(const SubcategorySpec& spec, const Draws& d, double duration,
                                      Rng& rng) {
  std::string pattern = spec.pattern;
  std::optional<OscillationParams> osc;
  if (pattern == "stochastic") {
    const double pick = d.at("pattern_pick");
    pattern = pick < 1.0 / 3.0 ? "LA" : (pick < 2.0 / 3.0 ? "AL" : "LAL");
    FourierSpec f;
    f.omega = d.at("osc_omega");
    f.a.resize(3);
    f.b.resize(3);
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
      f.a[k] = rng.uniform(-1.0, 1.0) / (k + 1);
      f.b[k] = rng.uniform(-1.0, 1.0) / (k + 1);
      total += std::abs(f.a[k]) + std::abs(f.b[k]);
    }
    const double scale = d.at("osc_amplitude") / total;
    for (int k = 0; k < 3; ++k) {
      f.a[k] *= scale;
      f.b[k] *= scale;
    }
    osc = OscillationParams{f, kUp};
  }

  const double speed = d.at("speed");
  const double radius = d.at("radius");
  const bool clockwise = d.at("clockwise") >= 0.5;
  Vec3 dir = horizontal(d.at("azimuth"));
  std::vector<double> shares;
  if (pattern == "LAL") {
    shares = {d.at("split"), d.at("arc_share")};
  } else {
    shares = {d.at("split")};
  }
  std::vector<double> durations;
  double used = 0.0;
  for (double s : shares) {
    durations.push_back(s * duration);
    used += s * duration;
  }
  durations.push_back(duration - used);

  std::vector<HybridSegment> segs;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == 'L') {
      segs.push_back({LineParams{{}, speed * dir}, durations[i]});
    } else {
      CircularParams arc = tangent_arc(dir, speed, radius, clockwise);
      dir = arc_tangent(arc, durations[i]);
      segs.push_back({arc, durations[i]});
    }
  }
  // The first segment fixes the absolute placement.
  const Vec3 start = draw_point(d);
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineParams>) p.start = start;
        else if constexpr (std::is_same_v<T, CircularParams>) p.center = start - p.radius * p.u1;
      },
      segs.front().params);
  MotionConfig cfg = compose_hybrid(std::move(segs), osc);
  cfg.duration = duration;
  return cfg;
}

}  // namespace detail

/// Number of frames of an episode drawn for `spec` with this seed.
inline int sample_frames(const SubcategorySpec& spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "frames:" + spec.id));
  return rng.uniform_int(spec.frames_min, spec.frames_max);
}

/// Deterministic parameter draw; the motion lasts `frames` control steps.
inline MotionConfig sample_config(const MotionCatalog& catalog, std::string_view subcategory,
                                  std::uint64_t seed, int frames = 0) {
  const SubcategorySpec& spec = catalog.find(subcategory);
  if (frames <= 0) frames = sample_frames(spec, seed);
  const double duration = frames * kFrameDt;
  Rng rng(derive_seed(seed, "motion:" + spec.id));
  const detail::Draws d = detail::draw_all(spec.ranges, rng);

  MotionConfig cfg;
  switch (spec.family) {
    case MotionFamily::StraightLine:
      cfg.params = LineParams{detail::draw_point(d),
                              d.at("speed") * direction_from_angles(d.at("azimuth"), d.at("elevation"))};
      break;
    case MotionFamily::SimpleHarmonic:
      cfg.params = HarmonicParams{detail::draw_point(d),
                                  direction_from_angles(d.at("axis_azimuth"), d.at("axis_elevation")),
                                  d.at("amplitude"), d.at("omega"), d.at("phase")};
      break;
    case MotionFamily::CircularArc: {
      const auto [u1, u2] = circle_plane(d.at("plane_azimuth"), d.at("plane_tilt"));
      const double w = d.at("clockwise") >= 0.5 ? -d.at("omega") : d.at("omega");
      cfg.params = CircularParams{detail::draw_point(d), d.at("radius"), u1, u2, w, d.at("start_angle")};
      break;
    }
    case MotionFamily::Projectile:
      cfg.params = ProjectileParams{detail::draw_point(d), d.at("speed"), d.at("launch_angle"),
                                    d.at("azimuth"), kGravity};
      break;
    case MotionFamily::Pendulum:
      cfg.params = PendulumParams{detail::draw_point(d), d.at("length"), d.at("initial_angle"),
                                  d.at("initial_rate"), d.at("swing_azimuth"), kGravity};
      break;
    case MotionFamily::InclinedRolling:
      cfg.params = InclineParams{detail::draw_point(d), detail::horizontal(d.at("downhill_azimuth")),
                                 d.at("incline_angle"), d.at("initial_speed"), kGravity};
      break;
    case MotionFamily::ImpactResponse:
      cfg.params = ImpactParams{ProjectileParams{detail::draw_point(d), d.at("speed"), d.at("launch_angle"),
                                                 d.at("azimuth"), kGravity},
                                d.at("ground_height"), d.at("restitution")};
      break;
    case MotionFamily::Hybrid:
      cfg = detail::hybrid_from_draws(spec, d, duration, rng);
      break;
  }
  cfg.subcategory = spec.id;
  cfg.seed = seed;
  cfg.duration = duration;
  validate(cfg);
  return cfg;
}

inline MotionConfig sample_config(std::string_view subcategory, std::uint64_t seed, int frames = 0) {
  return sample_config(default_catalog(), subcategory, seed, frames);
}

/// Object category name plus a shape drawn from its dimension ranges.
inline std::pair<std::string, ObjectShape> sample_object(const MotionCatalog& catalog, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "object"));
  const ObjectCategory& cat = catalog.objects[rng.uniform_int(0, static_cast<int>(catalog.objects.size()) - 1)];
  const detail::Draws d = detail::draw_all(cat.dims, rng);
  ObjectShape s;
  switch (cat.kind) {
    case ShapeKind::Sphere: s = ObjectShape::sphere(d.at("radius")); break;
    case ShapeKind::Box: s = ObjectShape::box({d.at("half_x"), d.at("half_y"), d.at("half_z")}); break;
    case ShapeKind::Cylinder: s = ObjectShape::cylinder(d.at("radius"), d.at("half_height")); break;
  }
  s.validate();
  return {cat.name, s};
}

/// Subcategory drawn in proportion to the catalog weights.
inline const SubcategorySpec& sample_subcategory(const MotionCatalog& catalog, Rng& rng) {
  double total = 0.0;
  for (const auto& s : catalog.subcategories) total += s.weight;
  double u = rng.uniform() * total;
  for (const auto& s : catalog.subcategories) {
    if (u < s.weight) return s;
    u -= s.weight;
  }
  return catalog.subcategories.back();
}

}  // namespace dynahoi
