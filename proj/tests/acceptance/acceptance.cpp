// Acceptance runner: one PASS/FAIL line per primary criterion. Exits nonzero
// if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dynahoi/datapipe.hpp"
#include "dynahoi/report.hpp"
#include "support/cli_run.hpp"
#include "support/metric_checks.hpp"
#include "support/motion_checks.hpp"
#include "support/protocol_checks.hpp"
#include "support/server_checks.hpp"

using namespace dynahoi;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 2026;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail << " [" << why << "]";
    }
  }
};

int failures = 0;

void report(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

/// 200 episodes: 25 per family, cycling through each family's subcategories.
std::vector<EpisodeConfig> oracle_configs(const EpisodeOptions& opt = {}) {
  std::map<MotionFamily, std::vector<std::string>> by_family;
  for (const auto& s : default_catalog().subcategories) by_family[s.family].push_back(s.id);
  std::vector<EpisodeConfig> out;
  std::uint64_t id = 0;
  for (const auto& [family, subs] : by_family) {
    for (int k = 0; k < 25; ++k, ++id) {
      out.push_back(make_episode(subs[static_cast<std::size_t>(k) % subs.size()], id,
                                 derive_seed(kSeed, "acceptance", id), opt));
    }
  }
  return out;
}

bool ordered(const GraspRates& g) { return g.loose >= g.medium && g.medium >= g.strict; }

}  // namespace

int main() {
  std::vector<EpisodeRecord> oracle_records;

  report("oracle reproduces the GT row (200 episodes)", [&](Outcome& o) {
    const auto configs = oracle_configs();
    std::map<std::string, int> per_family;
    for (const auto& c : configs) ++per_family[std::string(to_string(c.motion.family()))];
    for (const auto& [f, n] : per_family) o.require(n >= 20, f + " has only " + std::to_string(n) + " episodes");

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<MetricsReport> reports;
    for (const auto& c : configs) {
      oracle_records.push_back(run_gt_episode(c));
      reports.push_back(evaluate(oracle_records.back()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    double worst_loc = 0, worst_gra = 0;
    for (const auto& r : reports) {
      o.require(r.s_loc, "episode " + std::to_string(r.episode_id) + " " + r.subcategory + " not localized");
      o.require(r.s_gra, "episode " + std::to_string(r.episode_id) + " " + r.subcategory + " not grasped");
      worst_loc = std::max(worst_loc, r.e_loc);
      worst_gra = std::max(worst_gra, r.e_gra);
    }
    const CorpusSummary s = summarize(reports);
    o.require(worst_loc <= 0.30, "max E_loc " + num(worst_loc) + " > 0.30");
    o.require(worst_gra <= 0.15, "max E_gra " + num(worst_gra) + " > 0.15");
    o.require(secs < 60.0, "runtime " + num(secs, 1) + " s");
    o.detail << " episodes=" << reports.size() << " families=" << per_family.size() << " S_loc=" << num(100 * s.s_loc, 2)
             << "% S_gra=" << num(100 * s.s_gra, 2) << "% mean E_loc=" << num(s.e_loc) << " mean E_gra=" << num(s.e_gra)
             << " max E_loc=" << num(worst_loc) << " max E_gra=" << num(worst_gra) << " runtime=" << num(secs, 2) << "s";
  });

  std::vector<MetricsReport> jitter_reports;
  report("GT trajectory quality (deterministic and jitter modes)", [&](Outcome& o) {
    double worst_smooth = 1.0, worst_line = 1.0;
    int segments = 0;
    for (const auto& rec : oracle_records) {
      const auto move = phase_track(rec, Phase::Move);
      if (move.size() < 2) continue;
      ++segments;
      worst_smooth = std::min(worst_smooth, q_smooth(move));
      worst_line = std::min(worst_line, q_line(move));
    }
    o.require(segments == static_cast<int>(oracle_records.size()), "missing Move segments");
    o.require(worst_smooth >= 0.99, "Move Q_smooth " + num(worst_smooth));
    o.require(worst_line >= 0.99, "Move Q_line " + num(worst_line));

    EpisodeOptions jit;
    jit.jitter.enabled = true;
    jit.jitter.seed = kSeed;
    for (const auto& c : oracle_configs(jit)) jitter_reports.push_back(evaluate(run_gt_episode(c)));
    const CorpusSummary s = summarize(jitter_reports);
    o.require(s.q_smooth >= 0.85 && s.q_smooth <= 0.95, "jitter Q_smooth " + num(s.q_smooth) + " outside [0.85, 0.95]");
    o.require(s.q_line >= 0.92 && s.q_line <= 0.99, "jitter Q_line " + num(s.q_line) + " outside [0.92, 0.99]");
    o.detail << " move segments=" << segments << " min Q_smooth=" << num(worst_smooth, 6)
             << " min Q_line=" << num(worst_line, 6) << " jitter(sigma=" << jit.jitter.sigma
             << ", stall=" << jit.jitter.stall_probability << ") Q_smooth=" << num(s.q_smooth)
             << " Q_line=" << num(s.q_line);
  });

  report("metric goldens and randomized properties", [&](Outcome& o) {
    int goldens = 0;
    for (const auto& g : checks::metric_goldens()) {
      ++goldens;
      o.require(std::abs(g.got - g.want) <= 1e-9, g.name + ": got " + num(g.got, 12));
    }
    const std::vector<Vec3> corner{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
    o.require(std::abs(q_line(corner) - 0.70711) <= 5e-6, "right-angle Q_line");
    const auto s = checks::metric_properties(10000, kSeed);
    o.require(s.violation_count == 0, std::to_string(s.violation_count) + " property violations" +
                                          (s.violations.empty() ? "" : ", first: " + s.violations.front()));
    o.detail << " goldens=" << goldens << " records=" << s.records << " localized=" << s.localized
             << " lenient=" << s.lenient << " violations=" << s.violation_count;
  });

  report("motion physics invariants", [&](Outcome& o) {
    const auto circ = checks::circular_radius(200, kSeed + 1);
    const auto per = checks::periodicity(200, kSeed + 2);
    const auto bal = checks::ballistic_second_difference(200, kSeed + 3);
    const auto pen = checks::pendulum_energy(120, kSeed + 4);
    const auto imp = checks::impact_restitution(200, kSeed + 5);
    const auto fou = checks::fourier_monotone(150, kSeed + 6);
    o.require(circ.configs >= 100 && circ.worst <= 1e-9, "circular radius " + std::to_string(circ.worst));
    o.require(per.configs >= 100 && per.worst <= 1e-9, "periodicity " + std::to_string(per.worst));
    o.require(bal.configs >= 100 && bal.worst <= 1e-8, "projectile second difference " + std::to_string(bal.worst));
    o.require(pen.configs >= 100 && pen.worst < 1e-6, "pendulum energy drift " + std::to_string(pen.worst));
    o.require(imp.configs >= 100 && imp.worst_restitution <= 1e-8, "restitution " + std::to_string(imp.worst_restitution));
    o.require(fou.configs >= 100 && fou.violations == 0, std::to_string(fou.violations) + " Fourier increases");
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  " radius=%.1e(%d) period=%.1e(%d) ballistic=%.1e(%d) energy=%.1e(%d) restitution=%.1e(%d, %d "
                  "bounces) fourier=%d/%d",
                  circ.worst, circ.configs, per.worst, per.configs, bal.worst, bal.configs, pen.worst, pen.configs,
                  imp.worst_restitution, imp.configs, imp.bounces, fou.violations, fou.configs);
    o.detail << buf;
  });

  report("generate determinism across processes", [&](Outcome& o) {
    const fs::path base = fs::temp_directory_path() / ("dynahoi_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(base);
    const std::vector<std::string> args{"generate", "--episodes", "50", "--seed", "3", "--out"};
    auto a = args, b = args;
    a.push_back((base / "a").string());
    b.push_back((base / "b").string());
    const auto ra = checks::run_cli(DYNAHOI_CLI_PATH, a);
    const auto rb = checks::run_cli(DYNAHOI_CLI_PATH, b);
    o.require(ra.exit_code == 0 && rb.exit_code == 0, "generate failed: " + ra.err + rb.err);
    const auto ta = checks::tree_contents(base / "a");
    const auto tb = checks::tree_contents(base / "b");
    std::size_t bytes = 0;
    for (const auto& [p, text] : ta) bytes += text.size();
    o.require(!ta.empty() && ta == tb, "archives differ");
    const Manifest m = read_manifest(base / "a" / "manifest.json");
    o.require(m.successes() == 50, std::to_string(m.failures()) + " episodes failed");
    o.detail << " files=" << ta.size() << " bytes=" << bytes << " episodes=" << m.successes();
    fs::remove_all(base);
  });

  report("protocol: loopback, skill programs, fuzz, concurrency", [&](Outcome& o) {
    const auto loop = checks::oracle_over_loopback(checks::mixed_starts(24), kSeed);
    o.require(loop.mismatches == 0, std::to_string(loop.mismatches) + " loopback reports differ");

    const SkillParse tmpl = parse_skill_program(checks::template_program(), 10);
    o.require(tmpl.ok(), "template rejected: " + tmpl.diagnostic.str());
    const SkillParse tmpl_plain = parse_skill_program(checks::template_program(false), 10);
    o.require(tmpl_plain.ok(), "template without predicted_motion rejected");

    int malformed = 0, correct = 0;
    for (const auto& c : checks::malformed_programs()) {
      ++malformed;
      const SkillParse p = parse_skill_program(c.text, 10);
      const bool ok = !p.ok() && p.diagnostic.code == c.code && (c.path.empty() || p.diagnostic.path == c.path);
      correct += ok;
      o.require(ok, c.name + " gave " + (p.ok() ? std::string("ok") : p.diagnostic.str()));
    }
    o.require(malformed >= 20, "fewer than 20 malformed variants");

    std::vector<std::string> payloads{encode(StartEpisode{7, "circular_slow", 80, 10}),
                                      encode(ActionData{{Row18{}, Row18{}}, std::nullopt}),
                                      encode(ActionData{{}, checks::template_program()}),
                                      encode(ErrorMessage{"deadline_exceeded", "late"}),
                                      encode(MetricsMessage{evaluate(oracle_records.front())})};
    {
      const EpisodeConfig c = make_episode("pendulum_small", 0, 1);
      Engine e(c);
      payloads.push_back(encode(make_image_and_state(e.observation())));
    }
    const auto fz = checks::fuzz_decoders(100000, kSeed, payloads);
    o.require(fz.random_accepted == 0, std::to_string(fz.random_accepted) + " random inputs accepted");
    o.require(fz.reencode_mismatch == 0, std::to_string(fz.reencode_mismatch) + " accepted inputs did not re-encode");
    o.require(fz.unparseable_errors == 0, std::to_string(fz.unparseable_errors) + " rejections without a code");

    const auto conc = checks::concurrent_matches_serial(checks::mixed_starts(8), kSeed);
    o.require(conc.mismatches == 0, std::to_string(conc.mismatches) + " concurrent sessions differ from serial");
    o.detail << " loopback=" << loop.episodes - loop.mismatches << "/" << loop.episodes << " malformed=" << correct << "/"
             << malformed << " fuzz=" << fz.cases << " (mutants accepted " << fz.mutated_accepted << ")"
             << " concurrent=" << conc.episodes - conc.mismatches << "/" << conc.episodes;
  });

  report("per-frame grasp ordering loose >= medium >= strict", [&](Outcome& o) {
    std::vector<std::pair<std::string, std::vector<MetricsReport>>> corpora;
    std::vector<MetricsReport> oracle;
    for (const auto& rec : oracle_records) oracle.push_back(evaluate(rec));
    corpora.emplace_back("oracle", oracle);
    corpora.emplace_back("oracle+jitter", jitter_reports);
    for (const char* agent : {"zero", "chaser", "extrapolator"}) {
      EvalOptions opt;
      opt.episodes = 200;
      opt.seed = kSeed;
      corpora.emplace_back(agent, evaluate_policy(default_catalog(), opt, agent).reports);
    }
    for (const auto& [name, reports] : corpora) {
      int bad = 0;
      for (const auto& r : reports) bad += !ordered(r.grasp_rates) || !ordered(r.contact_grasp_rates);
      const CorpusSummary s = summarize(reports);
      o.require(bad == 0, name + ": " + std::to_string(bad) + " episodes out of order");
      o.require(ordered(s.grasp_rates) && ordered(s.contact_grasp_rates), name + ": corpus rates out of order");
      o.detail << " " << name << "=" << num(100 * s.grasp_rates.loose, 1) << "/" << num(100 * s.grasp_rates.medium, 1)
               << "/" << num(100 * s.grasp_rates.strict, 1);
    }
  });

  report("extrapolator separates straight lines from periodic motion", [&](Outcome& o) {
    std::map<std::string, std::vector<MetricsReport>> strata;
    for (const auto& spec : default_catalog().subcategories) {
      const MotionFamily f = spec.family;
      if (f != MotionFamily::StraightLine && f != MotionFamily::CircularArc && f != MotionFamily::SimpleHarmonic &&
          f != MotionFamily::Pendulum) {
        continue;
      }
      for (std::uint64_t i = 0; i < 20; ++i) {
        const EpisodeConfig c = make_episode(spec.id, i, derive_seed(kSeed, spec.id, i));
        const MetricsReport r = evaluate(run_policy("extrapolator", c));
        strata[f == MotionFamily::StraightLine ? "StraightLine" : std::string(periodicity_tag(f))].push_back(r);
      }
    }
    const double line = summarize(strata["StraightLine"]).s_loc;
    o.require(line == 1.0, "StraightLine S_loc " + num(100 * line, 2) + "%");
    for (const char* tag : {"Circular", "Periodic"}) {
      const double s = summarize(strata[tag]).s_loc;
      o.require(s < line, std::string(tag) + " S_loc " + num(100 * s, 2) + "% not below StraightLine");
      o.detail << " " << tag << "=" << num(100 * s, 2) << "% (" << strata[tag].size() << ")";
    }
    o.detail << " StraightLine=" << num(100 * line, 2) << "% (" << strata["StraightLine"].size() << ")";
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
