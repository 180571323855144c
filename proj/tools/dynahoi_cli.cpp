// dynahoi: generate corpora, serve evaluation sessions, score the oracle and
// scripted agents, replay archives, and print statistics and strata tables.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynahoi/datapipe.hpp"
#include "dynahoi/report.hpp"
#include "dynahoi/server.hpp"

namespace {

using namespace dynahoi;

struct CommonFlags {
  std::string catalog;
  std::vector<std::string> subcategories;
  int episodes = 20;
  std::uint64_t seed = 0;
  int obs_frames = 10;
  double threshold = kLocThreshold;
  double lenient = kLenientThreshold;
  bool jitter = false;
  double jitter_sigma = JitterConfig{}.sigma;
  double jitter_stall = JitterConfig{}.stall_probability;
  int workers = 1;
};

void add_catalog(CLI::App* c, CommonFlags& f) {
  c->add_option("--catalog", f.catalog, "Motion catalog JSON (default: built-in)")->envname("DYNAHOI_CATALOG");
}

void add_episode_flags(CLI::App* c, CommonFlags& f, bool with_count) {
  add_catalog(c, f);
  c->add_option("--subcategory", f.subcategories, "Restrict to these subcategories (repeatable)")
      ->envname("DYNAHOI_SUBCATEGORY")
      ->delimiter(',');
  if (with_count) {
    c->add_option("--episodes", f.episodes, "Number of episodes")->envname("DYNAHOI_EPISODES")->check(CLI::NonNegativeNumber);
  }
  c->add_option("--seed", f.seed, "Corpus seed")->envname("DYNAHOI_SEED");
  c->add_option("--obs-frames", f.obs_frames, "Observe-only frames at episode start")
      ->envname("DYNAHOI_OBS_FRAMES")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--threshold", f.threshold, "Localization threshold (m)")->envname("DYNAHOI_THRESHOLD")->check(CLI::PositiveNumber);
  c->add_option("--lenient", f.lenient, "Lenient localization threshold (m)")->envname("DYNAHOI_LENIENT")->check(CLI::PositiveNumber);
  c->add_flag("--jitter", f.jitter, "Log the palm track with timing jitter")->envname("DYNAHOI_JITTER");
  c->add_option("--jitter-sigma", f.jitter_sigma, "Relative std-dev of logged intervals")
      ->envname("DYNAHOI_JITTER_SIGMA")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--jitter-stall", f.jitter_stall, "Probability that a logged sample stalls")
      ->envname("DYNAHOI_JITTER_STALL")
      ->check(CLI::Range(0.0, 0.999));
  c->add_option("--workers", f.workers, "Worker threads")->envname("DYNAHOI_WORKERS")->check(CLI::Range(1, 256));
}

MotionCatalog load(const CommonFlags& f) { return f.catalog.empty() ? default_catalog() : load_catalog(f.catalog); }

EpisodeOptions episode_options(const CommonFlags& f) {
  EpisodeOptions o;
  o.observe_frames = f.obs_frames;
  o.thresholds = {f.threshold, f.lenient};
  o.jitter.enabled = f.jitter;
  o.jitter.sigma = f.jitter_sigma;
  o.jitter.stall_probability = f.jitter_stall;
  o.jitter.seed = f.seed;
  return o;
}

EvalOptions eval_options(const CommonFlags& f) {
  EvalOptions o;
  o.subcategories = f.subcategories;
  o.episodes = f.episodes;
  o.seed = f.seed;
  o.workers = f.workers;
  o.episode = episode_options(f);
  return o;
}

json flags_json(const CommonFlags& f, const MotionCatalog& cat) {
  return {{"catalog", f.catalog.empty() ? "<built-in>" : f.catalog},
          {"catalog_checksum", cat.checksum},
          {"subcategories", f.subcategories},
          {"episodes", f.episodes},
          {"seed", f.seed},
          {"obs_frames", f.obs_frames},
          {"threshold", f.threshold},
          {"lenient", f.lenient},
          {"jitter", f.jitter},
          {"jitter_sigma", f.jitter_sigma},
          {"jitter_stall", f.jitter_stall},
          {"workers", f.workers}};
}

void print_config(std::string_view command, json cfg) {
  cfg["command"] = std::string(command);
  std::cout << "config: " << cfg.dump() << "\n";
}

std::vector<std::pair<std::string, CorpusSummary>> one_row(const std::string& label,
                                                           const std::vector<MetricsReport>& reports) {
  return {{label, summarize(reports)}};
}

int cmd_generate(const CommonFlags& f, const std::string& out, int retries) {
  const MotionCatalog cat = load(f);
  json cfg = flags_json(f, cat);
  cfg["out"] = out;
  cfg["retries"] = retries;
  print_config("generate", cfg);
  CollectOptions o;
  o.subcategories = f.subcategories;
  o.episodes = f.episodes;
  o.seed = f.seed;
  o.retries = retries;
  o.workers = f.workers;
  o.episode = episode_options(f);
  o.out = out;
  const CollectResult r = collect_dataset(cat, o);
  std::cout << "episodes: " << r.manifest.entries.size() << " ok: " << r.manifest.successes()
            << " failed: " << r.manifest.failures() << " retries: " << r.manifest.retried() << "\n";
  std::cout << "manifest: " << (fs::path(out) / "manifest.json").string() << "\n";
  if (r.manifest.failures() > 0) {
    std::cerr << "error: code=collection_failures message=" << r.manifest.failures() << " episodes failed after "
              << retries << " retries\n";
    return 1;
  }
  return 0;
}

int print_eval(const std::string& label, const EvalRun& run, bool per_episode, bool as_json) {
  if (as_json) {
    std::cout << json(run.reports).dump() << "\n";
    return 0;
  }
  if (per_episode) {
    for (const auto& r : run.reports) {
      std::cout << "episode " << r.episode_id << " " << r.subcategory << " frames=" << r.frames
                << " s_loc=" << r.s_loc << " e_loc=" << fixed(r.e_loc, 3) << " s_gra=" << r.s_gra
                << " e_gra=" << fixed(r.e_gra, 3) << " r_time=" << fixed(r.r_time, 3) << "\n";
    }
  }
  std::cout << metrics_table(one_row(label, run.reports));
  std::cout << grasp_level_table(one_row(label, run.reports));
  return 0;
}

int cmd_eval(const CommonFlags& f, const std::string& policy, bool per_episode, bool as_json) {
  const MotionCatalog cat = load(f);
  json cfg = flags_json(f, cat);
  cfg["policy"] = policy;
  print_config(policy == "oracle" ? "eval-oracle" : "eval-scripted", cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const EvalRun run = evaluate_policy(cat, eval_options(f), policy);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_eval(policy == "oracle" ? "GT" : policy, run, per_episode, as_json);
  if (!as_json) std::cout << "runtime_s: " << fixed(secs, 3) << "\n";
  return 0;
}

int cmd_serve(const CommonFlags& f, const std::string& bind, double deadline_s, int max_sessions) {
  const MotionCatalog cat = load(f);
  json cfg = flags_json(f, cat);
  cfg.erase("episodes");
  cfg.erase("subcategories");
  cfg.erase("workers");
  cfg["bind"] = bind;
  cfg["deadline_s"] = deadline_s;
  cfg["max_sessions"] = max_sessions;
  print_config("serve", cfg);
  CatalogEpisodeFactory factory{cat, f.seed, episode_options(f)};
  SessionOptions so;
  so.deadline = std::chrono::milliseconds(static_cast<long long>(deadline_s * 1000.0));
  Server server(factory, so);
  server.on_session([](const SessionResult& r) {
    std::cout << "session";
    if (r.start) std::cout << " episode=" << r.start->episode_id << " task=" << r.start->task_type;
    std::cout << " frames=" << r.executed_frames << " chunks=" << r.chunks;
    if (r.report) std::cout << " s_loc=" << r.report->s_loc << " s_gra=" << r.report->s_gra;
    if (r.error) std::cout << " error=" << r.error->code;
    std::cout << std::endl;
  });
  const std::uint16_t port = server.listen(parse_endpoint(bind));
  std::cout << "listening: " << parse_endpoint(bind).host << ":" << port << std::endl;
  server.serve(max_sessions);
  server.wait();
  return 0;
}

int cmd_replay(const std::string& input) {
  print_config("replay", {{"input", input}});
  const EpisodeRecord rec = read_archive(input);
  const EpisodeConfig& c = rec.config;
  std::cout << "episode " << c.episode_id << " task=" << c.motion.subcategory << " family=" << to_string(c.motion.family())
            << " frames=" << rec.frames.size() << " observe=" << c.observe_frames
            << " attach=" << (rec.attach_frame ? std::to_string(*rec.attach_frame) : "none") << "\n";
  std::cout << "t phase palm_x palm_y palm_z target_x target_y target_z dist visible attached |loc| mean_gras\n";
  for (std::size_t t = 0; t < rec.frames.size(); ++t) {
    const FrameRecord& fr = rec.frames[t];
    const Vec3& p = fr.obs.hand.palm;
    double g = 0.0;
    for (double x : fr.action.gras) g += x;
    std::printf("%zu %s %.4f %.4f %.4f %.4f %.4f %.4f %.4f %d %d %.4f %.4f\n", t, std::string(to_string(fr.phase)).c_str(),
                p.x, p.y, p.z, fr.target.x, fr.target.y, fr.target.z, distance(p, fr.target), fr.obs.camera.visible ? 1 : 0,
                fr.attached ? 1 : 0, norm(fr.action.loc), g / kJoints);
  }
  const MetricsReport r = evaluate(rec);
  std::cout << metrics_table(one_row("archive", {r}));
  return 0;
}

int cmd_stats(const std::string& input, const std::string& out, double margin) {
  print_config("stats", {{"input", input}, {"out", out}, {"margin", margin}});
  const std::vector<EpisodeRecord> corpus = read_corpus(input);
  const ActionStats s = compute_action_stats(corpus);
  std::printf("%-18s %12s %12s %12s %12s\n", "dim", "min", "q01", "q99", "max");
  for (int d = 0; d < kActionDims; ++d) {
    const DimStats& ds = s.dims[d];
    std::printf("%-18s %12.6f %12.6f %12.6f %12.6f\n", action_dim_name(d).c_str(), ds.min, ds.q01, ds.q99, ds.max);
  }
  const FilterResult fr = filter_outliers(corpus, s, {margin});
  std::cout << "episodes: " << corpus.size() << " samples: " << s.samples << " clipped: " << fr.clipped
            << " rejected: " << fr.rejected.size() << "\n";
  for (const auto& r : fr.rejected) std::cout << "reject episode=" << r.episode_id << " rule=" << r.rule << " " << r.detail << "\n";
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream(fs::path(out) / "stats.json") << json(s).dump(2) << "\n";
    std::ofstream(fs::path(out) / "histograms.csv") << histogram_csv(s);
    json rej = json::array();
    for (const auto& r : fr.rejected) rej.push_back({{"episode_id", r.episode_id}, {"rule", r.rule}, {"detail", r.detail}});
    std::ofstream(fs::path(out) / "rejections.json") << rej.dump(2) << "\n";
    std::cout << "wrote: " << out << "\n";
  }
  return 0;
}

int cmd_report(const std::string& input, const std::string& policy, int workers) {
  print_config("report", {{"input", input}, {"policy", policy}, {"workers", workers}});
  const std::vector<EpisodeRecord> corpus = read_corpus(input);
  std::vector<MetricsReport> reports(corpus.size());
  parallel_for(static_cast<int>(corpus.size()), workers, [&](int i) {
    reports[i] = policy == "archive" ? evaluate(corpus[i]) : evaluate(run_policy(policy, corpus[i].config));
  });
  for (Stratum s : {Stratum::Periodicity, Stratum::Duration, Stratum::Length, Stratum::Family}) {
    std::cout << strata_table(reports, s) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic hand-object capture gym"};
  app.require_subcommand(1);
  CommonFlags f;

  auto* gen = app.add_subcommand("generate", "Collect an oracle corpus into episode archives");
  std::string out;
  int retries = 3;
  add_episode_flags(gen, f, true);
  gen->add_option("--out", out, "Output directory")->required()->envname("DYNAHOI_OUT");
  gen->add_option("--retries", retries, "Retries per failed episode")->envname("DYNAHOI_RETRIES")->check(CLI::Range(0, 100));

  auto* serve = app.add_subcommand("serve", "Serve evaluation sessions over TCP");
  std::string bind = "127.0.0.1:7878";
  double deadline = 30.0;
  int max_sessions = 0;
  add_episode_flags(serve, f, false);
  serve->add_option("--bind", bind, "host:port to listen on")->envname("DYNAHOI_BIND");
  serve->add_option("--deadline", deadline, "Seconds to wait for each client message")
      ->envname("DYNAHOI_DEADLINE")
      ->check(CLI::PositiveNumber);
  serve->add_option("--max-sessions", max_sessions, "Exit after this many sessions (0: run forever)")
      ->envname("DYNAHOI_MAX_SESSIONS")
      ->check(CLI::NonNegativeNumber);

  bool per_episode = false;
  bool as_json = false;
  auto* eo = app.add_subcommand("eval-oracle", "Score the scripted oracle");
  add_episode_flags(eo, f, true);
  eo->add_flag("--per-episode", per_episode, "Print one line per episode");
  eo->add_flag("--json", as_json, "Print the reports as JSON instead of tables");

  auto* es = app.add_subcommand("eval-scripted", "Score a scripted comparison agent");
  std::string agent = "extrapolator";
  add_episode_flags(es, f, true);
  es->add_option("--agent", agent, "zero, chaser or extrapolator")
      ->envname("DYNAHOI_AGENT")
      ->check(CLI::IsMember({"zero", "chaser", "extrapolator"}));
  es->add_flag("--per-episode", per_episode, "Print one line per episode");
  es->add_flag("--json", as_json, "Print the reports as JSON instead of tables");

  auto* rp = app.add_subcommand("replay", "Print an episode archive frame by frame");
  std::string input;
  rp->add_option("--input,--archive", input, "Archive directory episode_{id}")->required()->envname("DYNAHOI_INPUT");

  auto* st = app.add_subcommand("stats", "Action statistics and outlier filtering over a corpus");
  double margin = kDefaultOutlierMargin;
  std::string stats_out;
  st->add_option("--input", input, "Corpus directory (with manifest.json)")->required()->envname("DYNAHOI_INPUT");
  st->add_option("--out", stats_out, "Write stats.json, histograms.csv and rejections.json here")->envname("DYNAHOI_OUT");
  st->add_option("--margin", margin, "Clip margin as a fraction of q99 - q01")
      ->envname("DYNAHOI_MARGIN")
      ->check(CLI::NonNegativeNumber);

  auto* rep = app.add_subcommand("report", "Stratified metric tables over a corpus");
  std::string policy = "archive";
  rep->add_option("--input", input, "Corpus directory (with manifest.json)")->required()->envname("DYNAHOI_INPUT");
  rep->add_option("--agent", policy, "archive (recorded oracle), oracle, zero, chaser or extrapolator")
      ->envname("DYNAHOI_AGENT")
      ->check(CLI::IsMember({"archive", "oracle", "zero", "chaser", "extrapolator"}));
  rep->add_option("--workers", f.workers, "Worker threads")->envname("DYNAHOI_WORKERS")->check(CLI::Range(1, 256));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "error: code=usage message=" << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen) return cmd_generate(f, out, retries);
    if (*serve) return cmd_serve(f, bind, deadline, max_sessions);
    if (*eo) return cmd_eval(f, "oracle", per_episode, as_json);
    if (*es) return cmd_eval(f, agent, per_episode, as_json);
    if (*rp) return cmd_replay(input);
    if (*st) return cmd_stats(input, stats_out, margin);
    if (*rep) return cmd_report(input, policy, f.workers);
  } catch (const Error& e) {
    std::cerr << "error: code=" << e.code() << " message=" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: code=internal message=" << e.what() << "\n";
    return 1;
  }
  return 2;
}
