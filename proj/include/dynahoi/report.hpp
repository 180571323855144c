#pragma once

// Corpus-level evaluation runs and the text tables printed by the CLI.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "dynahoi/agents.hpp"
#include "dynahoi/datapipe.hpp"
#include "dynahoi/episode.hpp"
#include "dynahoi/metrics.hpp"
#include "dynahoi/oracle.hpp"

namespace dynahoi {

/// Calls fn(i) for i in [0, n) on up to `workers` threads.
template <class Fn>
void parallel_for(int n, int workers, Fn fn) {
  workers = std::clamp(workers, 1, 256);
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct EvalOptions {
  std::vector<std::string> subcategories;  // empty: the whole catalog, weighted
  int episodes = 20;
  std::uint64_t seed = 0;
  int workers = 1;
  EpisodeOptions episode;
};

/// Episode `id` of an evaluation corpus; the same config a collection run
/// produces on its first attempt.
inline EpisodeConfig corpus_episode(const MotionCatalog& catalog, const EvalOptions& opt, std::uint64_t id) {
  const SubcategorySpec& spec = pick_subcategory(catalog, opt.subcategories, opt.seed, id);
  return make_episode(catalog, spec.id, id, derive_seed(opt.seed, "episode", id), opt.episode);
}

/// Rollout of one named policy: "oracle" or any scripted agent.
inline EpisodeRecord run_policy(const std::string& policy, const EpisodeConfig& cfg) {
  if (policy == "oracle") return run_gt_episode(cfg);
  const auto agent = make_agent(policy, EpisodeInfo::from(cfg));
  return run_rollout(cfg, *agent);
}

struct EvalRun {
  std::vector<MetricsReport> reports;  // by episode id
  std::vector<EpisodeRecord> records;  // filled when requested
};

inline EvalRun evaluate_policy(const MotionCatalog& catalog, const EvalOptions& opt, const std::string& policy,
                               bool keep_records = false) {
  if (policy != "oracle") make_agent(policy, EpisodeInfo{});  // reject unknown names up front
  for (const auto& s : opt.subcategories) catalog.find(s);
  EvalRun run;
  run.reports.resize(static_cast<std::size_t>(opt.episodes));
  if (keep_records) run.records.resize(static_cast<std::size_t>(opt.episodes));
  std::vector<std::string> errors(static_cast<std::size_t>(opt.episodes));
  parallel_for(opt.episodes, opt.workers, [&](int i) {
    try {
      const EpisodeConfig cfg = corpus_episode(catalog, opt, static_cast<std::uint64_t>(i));
      EpisodeRecord rec = run_policy(policy, cfg);
      run.reports[i] = evaluate(rec);
      if (keep_records) run.records[i] = std::move(rec);
    } catch (const Error& e) {
      errors[i] = e.code() + "|" + e.what();
    }
  });
  for (int i = 0; i < opt.episodes; ++i) {
    if (!errors[i].empty()) {
      const auto bar = errors[i].find('|');
      throw Error(errors[i].substr(0, bar), "episode " + std::to_string(i) + ": " + errors[i].substr(bar + 1));
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Tables

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

/// One row per label in the column layout of the GT row:
/// S_loc(%) E_loc S_gra(%) E_gra Q_smooth Q_line R_time.
inline std::string metrics_table(const std::vector<std::pair<std::string, CorpusSummary>>& rows) {
  std::size_t w = 12;
  for (const auto& [label, s] : rows) w = std::max(w, label.size() + 2);
  std::string out = pad("Model", w) + pad("N", 6) + pad("S_loc(%)", 10) + pad("E_loc", 8) + pad("S_gra(%)", 10) +
                    pad("E_gra", 8) + pad("Q_smooth", 10) + pad("Q_line", 8) + pad("R_time", 8) + "S_loc*(%)\n";
  for (const auto& [label, s] : rows) {
    out += pad(label, w) + pad(std::to_string(s.episodes), 6) + pad(fixed(100.0 * s.s_loc), 10) + pad(fixed(s.e_loc), 8) +
           pad(fixed(100.0 * s.s_gra), 10) + pad(fixed(s.e_gra), 8) + pad(fixed(s.q_smooth), 10) +
           pad(fixed(s.q_line), 8) + pad(fixed(s.r_time), 8) + fixed(100.0 * s.s_loc_lenient) + "\n";
  }
  return out;
}

inline std::string grasp_level_table(const std::vector<std::pair<std::string, CorpusSummary>>& rows) {
  std::size_t w = 12;
  for (const auto& [label, s] : rows) w = std::max(w, label.size() + 2);
  std::string out = pad("Model", w) + pad("rule", 9) + pad("loose(%)", 10) + pad("medium(%)", 11) + "strict(%)\n";
  for (const auto& [label, s] : rows) {
    for (const auto& [rule, g] : {std::pair{"joint", s.grasp_rates}, std::pair{"contact", s.contact_grasp_rates}}) {
      out += pad(label, w) + pad(rule, 9) + pad(fixed(100.0 * g.loose), 10) + pad(fixed(100.0 * g.medium), 11) +
             fixed(100.0 * g.strict) + "\n";
    }
  }
  return out;
}

inline std::string_view stratum_name(Stratum s) {
  switch (s) {
    case Stratum::Periodicity: return "periodicity";
    case Stratum::Duration: return "duration";
    case Stratum::Length: return "length";
    case Stratum::Family: return "family";
    case Stratum::Subcategory: return "subcategory";
  }
  return "?";
}

/// Per-stratum rows plus a total row; the total's N is the sum of the strata.
inline std::string strata_table(std::span<const MetricsReport> reports, Stratum by) {
  std::vector<std::pair<std::string, CorpusSummary>> rows;
  for (const auto& [key, s] : stratify(reports, by)) rows.emplace_back(key, s);
  rows.emplace_back("total", summarize(reports));
  return "[" + std::string(stratum_name(by)) + "]\n" + metrics_table(rows);
}

}  // namespace dynahoi
