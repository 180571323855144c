#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "dynahoi/datapipe.hpp"
#include "dynahoi/serialize.hpp"
#include "support/metric_checks.hpp"

using namespace dynahoi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("dynahoi_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void expect_same_record(const EpisodeRecord& a, const EpisodeRecord& b) {
  EXPECT_EQ(nlohmann::json(a.config).dump(), nlohmann::json(b.config).dump());
  EXPECT_EQ(a.attach_frame, b.attach_frame);
  EXPECT_EQ(a.logged_times, b.logged_times);
  EXPECT_EQ(a.logged_palm, b.logged_palm);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t t = 0; t < a.frames.size(); ++t) EXPECT_EQ(a.frames[t], b.frames[t]) << t;
}

/// A record whose frame t applies loc.x = values[t] with a still hand.
EpisodeRecord record_with_actions(const std::vector<double>& values, std::uint64_t id = 0) {
  EpisodeRecord rec = checks::record_with_distances(std::vector<double>(values.size(), 1.0));
  rec.config.episode_id = id;
  for (std::size_t t = 0; t < values.size(); ++t) rec.frames[t].action.loc.x = values[t];
  return rec;
}

std::vector<EpisodeRecord> oracle_corpus(int n) {
  std::vector<EpisodeRecord> out;
  const std::vector<std::string> subs{"line_slow", "circular_slow", "pendulum_small", "projectile_low"};
  for (int i = 0; i < n; ++i) {
    out.push_back(run_gt_episode(make_episode(subs[i % subs.size()], static_cast<std::uint64_t>(i), 100 + i)));
  }
  return out;
}

}  // namespace

TEST(Archive, RoundTrip) {
  TempDir dir("roundtrip");
  EpisodeConfig c = make_episode("circular_slow", 12, 3);
  c.jitter.enabled = true;
  const EpisodeRecord rec = run_gt_episode(c);
  const fs::path p = write_archive(rec, dir.path);
  EXPECT_EQ(p.filename(), "episode_12");
  EXPECT_TRUE(fs::exists(p / "meta_data.json"));
  EXPECT_TRUE(fs::exists(p / "joints_0000.json"));
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(p)) ++files;
  EXPECT_EQ(files, rec.frames.size() + 1);
  expect_same_record(read_archive(p), rec);

  const auto meta = nlohmann::json::parse(detail::read_text(p / "meta_data.json"));
  EXPECT_TRUE(meta.at("img").is_null());
  const auto frame = nlohmann::json::parse(detail::read_text(p / "joints_0005.json"));
  EXPECT_EQ(frame.at("frame"), 5);
  EXPECT_EQ(frame.at("tracked").at("joints").size(), 15u);
}

TEST(Archive, FailedWriteLeavesNoDirectory) {
  TempDir dir("atomic");
  const EpisodeRecord rec = run_gt_episode(make_episode("line_slow", 4, 1));
  for (int after : {0, 1, 7}) {
    WriteFaults f;
    f.fail_after_files = after;
    try {
      write_archive(rec, dir.path, f);
      FAIL() << "expected an injected failure";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), "io_failure");
    }
    EXPECT_FALSE(fs::exists(dir.path / "episode_4"));
    EXPECT_TRUE(fs::is_empty(dir.path));
  }
}

TEST(Archive, FailedRewriteKeepsThePreviousArchive) {
  TempDir dir("rewrite");
  const EpisodeRecord rec = run_gt_episode(make_episode("line_slow", 4, 1));
  write_archive(rec, dir.path);
  WriteFaults f;
  f.fail_after_files = 3;
  EXPECT_THROW(write_archive(run_gt_episode(make_episode("line_slow", 4, 2)), dir.path, f), Error);
  expect_same_record(read_archive(dir.path / "episode_4"), rec);
}

TEST(Archive, DamagedArchivesAreReported) {
  TempDir dir("damaged");
  const EpisodeRecord rec = run_gt_episode(make_episode("line_slow", 1, 1));
  const fs::path p = write_archive(rec, dir.path);
  try {
    read_archive(dir.path / "episode_99");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "missing_archive");
  }
  fs::remove(p / "joints_0003.json");
  try {
    read_archive(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "bad_archive");
  }
  write_archive(rec, dir.path);
  detail::write_text(p / "joints_0002.json", "{oops");
  EXPECT_THROW(read_archive(p), Error);
}

TEST(Archive, HundredEpisodeCorpus) {
  TempDir dir("corpus");
  CollectOptions opt;
  opt.episodes = 100;
  opt.seed = 8;
  opt.workers = 4;
  opt.out = dir.path;
  opt.keep_records = true;
  const CollectResult res = collect_dataset(default_catalog(), opt);
  EXPECT_EQ(res.manifest.entries.size(), 100u);
  const auto corpus = read_corpus(dir.path);
  ASSERT_EQ(corpus.size(), static_cast<std::size_t>(res.manifest.successes()));
  ASSERT_EQ(corpus.size(), res.records.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) expect_same_record(corpus[i], res.records[i]);
  EXPECT_GE(res.manifest.successes(), 95);
}

// ---------------------------------------------------------------------------

TEST(ActionStats, ConstantSample) {
  const std::vector<EpisodeRecord> corpus{record_with_actions(std::vector<double>(50, 0.03))};
  const ActionStats s = compute_action_stats(corpus);
  EXPECT_EQ(s.samples, 50u);
  const DimStats& x = s.dims[0];
  EXPECT_EQ(x.min, 0.03);
  EXPECT_EQ(x.max, 0.03);
  EXPECT_EQ(x.q01, 0.03);
  EXPECT_EQ(x.q99, 0.03);
  EXPECT_EQ(x.histogram[0], 50u);
}

TEST(ActionStats, NearestRankOnZeroToNinetyNine) {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(i);
  const ActionStats s = compute_action_stats(std::vector<EpisodeRecord>{record_with_actions(v)});
  EXPECT_EQ(s.dims[0].q01, 1.0);
  EXPECT_EQ(s.dims[0].q99, 99.0);
  EXPECT_EQ(s.dims[0].min, 0.0);
  EXPECT_EQ(s.dims[0].max, 99.0);
  for (std::size_t b = 0; b < s.dims[0].histogram.size(); ++b) EXPECT_EQ(s.dims[0].histogram[b], 5u) << b;
}

TEST(ActionStats, QuantileMatchesCountingDefinition) {
  // v = q_p iff #{x < v} <= floor(p n / 100) < #{x <= v}.
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(1, 300);
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(std::round(rng.uniform(-5, 5) * 4) / 4);
    std::sort(v.begin(), v.end());
    for (int p : {1, 50, 99}) {
      const double q = nearest_rank(v, p);
      const long below = std::count_if(v.begin(), v.end(), [q](double x) { return x < q; });
      const long upto = std::count_if(v.begin(), v.end(), [q](double x) { return x <= q; });
      const long k = static_cast<long>(p) * n / 100;
      EXPECT_LE(below, k);
      EXPECT_LT(k, upto);
    }
  }
}

TEST(ActionStats, PermutationInvariant) {
  const auto corpus = oracle_corpus(6);
  const ActionStats s = compute_action_stats(corpus);
  std::vector<EpisodeRecord> shuffled(corpus.rbegin(), corpus.rend());
  for (auto& r : shuffled) std::reverse(r.frames.begin(), r.frames.end());
  EXPECT_EQ(compute_action_stats(shuffled), s);
  EXPECT_THROW(compute_action_stats(std::vector<EpisodeRecord>{}), Error);
}

TEST(Filter, ClipsToMarginBeyondQuantiles) {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(i * 1e-3);
  const ActionStats s = compute_action_stats(std::vector<EpisodeRecord>{record_with_actions(v)});
  const double m = 0.05 * (s.dims[0].q99 - s.dims[0].q01);
  std::vector<double> probe(20, 0.05);
  probe[3] = s.dims[0].q99 + 2 * m;
  probe[4] = s.dims[0].q01 - 2 * m;
  const FilterResult r = filter_outliers(std::vector<EpisodeRecord>{record_with_actions(probe)}, s);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.clipped, 2u);
  EXPECT_NEAR(r.kept[0].frames[3].action.loc.x, s.dims[0].q99 + m, 1e-15);
  EXPECT_NEAR(r.kept[0].frames[4].action.loc.x, s.dims[0].q01 - m, 1e-15);
  EXPECT_EQ(r.kept[0].frames[5].action.loc.x, 0.05);
}

TEST(Filter, IdempotentForFixedStats) {
  const auto corpus = oracle_corpus(8);
  const ActionStats s = compute_action_stats(corpus);
  const FilterResult once = filter_outliers(corpus, s);
  const FilterResult twice = filter_outliers(once.kept, s);
  EXPECT_EQ(twice.clipped, 0u);
  EXPECT_TRUE(twice.rejected.empty());
  ASSERT_EQ(twice.kept.size(), once.kept.size());
  for (std::size_t i = 0; i < once.kept.size(); ++i) expect_same_record(twice.kept[i], once.kept[i]);
}

TEST(Filter, TeleportIsAJump) {
  auto corpus = oracle_corpus(4);
  const ActionStats s = compute_action_stats(corpus);
  EpisodeRecord& r = corpus[1];
  for (std::size_t t = 12; t < r.frames.size(); ++t) r.frames[t].obs.hand.palm.x += 5.0;
  const FilterResult f = filter_outliers(corpus, s);
  ASSERT_EQ(f.rejected.size(), 1u);
  EXPECT_EQ(f.rejected[0].episode_id, corpus[1].config.episode_id);
  EXPECT_EQ(f.rejected[0].rule, "jump");
  EXPECT_NE(f.rejected[0].detail.find("11 and 12"), std::string::npos);
  EXPECT_EQ(f.kept.size(), 3u);
}

TEST(Filter, InvalidBeforeJump) {
  auto corpus = oracle_corpus(2);
  const ActionStats s = compute_action_stats(corpus);
  corpus[0].frames[4].obs.hand.palm.x += 5.0;
  corpus[0].frames[9].obs.hand.joints[2] = 2.0;
  corpus[1].frames.pop_back();
  const FilterResult f = filter_outliers(corpus, s);
  ASSERT_EQ(f.rejected.size(), 2u);
  EXPECT_EQ(f.rejected[0].rule, "invalid");
  EXPECT_EQ(f.rejected[1].rule, "invalid");
}

TEST(Filter, SaturationRun) {
  std::vector<double> v(30, 0.01);
  std::vector<double> spread;
  for (int i = 0; i <= 100; ++i) spread.push_back(kLocCap * i / 100.0);
  const ActionStats s = compute_action_stats(std::vector<EpisodeRecord>{record_with_actions(spread)});
  for (int run : {9, 10}) {
    std::vector<double> a = v;
    for (int t = 5; t < 5 + run; ++t) a[t] = kLocCap;
    const FilterResult f = filter_outliers(std::vector<EpisodeRecord>{record_with_actions(a)}, s);
    if (run < 10) {
      EXPECT_EQ(f.kept.size(), 1u);
    } else {
      ASSERT_EQ(f.rejected.size(), 1u);
      EXPECT_EQ(f.rejected[0].rule, "saturation");
    }
  }
}

// ---------------------------------------------------------------------------

TEST(Collect, ManifestIndependentOfWorkerCount) {
  TempDir a("manifest_a"), b("manifest_b");
  CollectOptions opt;
  opt.episodes = 24;
  opt.seed = 5;
  opt.out = a.path;
  const CollectResult one = collect_dataset(default_catalog(), opt);
  opt.workers = 6;
  opt.out = b.path;
  const CollectResult six = collect_dataset(default_catalog(), opt);
  EXPECT_EQ(one.manifest, six.manifest);
  EXPECT_EQ(detail::read_text(a.path / "manifest.json"), detail::read_text(b.path / "manifest.json"));
  EXPECT_EQ(read_manifest(a.path / "manifest.json"), one.manifest);
  for (const auto& e : one.manifest.entries) {
    if (!e.ok) continue;
    EXPECT_EQ(detail::read_text(a.path / e.archive / "meta_data.json"),
              detail::read_text(b.path / e.archive / "meta_data.json"));
  }
}

TEST(Collect, FailuresAreRetriedWithDerivedSeeds) {
  CollectOptions opt;
  opt.subcategories = {"line_slow"};
  opt.episodes = 3;
  opt.seed = 2;
  opt.intercept_time = 0.2;  // before the end of observation: never plannable
  const CollectResult res = collect_dataset(default_catalog(), opt);
  EXPECT_EQ(res.manifest.failures(), 3);
  EXPECT_EQ(res.manifest.retried(), 9);
  for (const auto& e : res.manifest.entries) {
    EXPECT_EQ(e.attempts, 4);
    EXPECT_EQ(e.seed, derive_seed(derive_seed(2, "episode", e.episode_id), "retry", 3));
    EXPECT_FALSE(e.error.empty());
  }
  EXPECT_TRUE(res.reports.empty());
}

TEST(Collect, UnknownSubcategoryRejectedUpFront) {
  CollectOptions opt;
  opt.subcategories = {"nope"};
  EXPECT_THROW(collect_dataset(default_catalog(), opt), Error);
}

TEST(Collect, StrataFollowCatalogWeights) {
  const MotionCatalog& cat = default_catalog();
  const int n = 20000;
  double total = 0.0;
  std::map<std::string, double> weight;
  for (const auto& s : cat.subcategories) {
    total += s.weight;
    weight[std::string(to_string(s.family))] += s.weight;
  }
  std::map<std::string, int> seen;
  for (int i = 0; i < n; ++i) ++seen[std::string(to_string(pick_subcategory(cat, {}, 17, i).family))];
  for (const auto& [family, w] : weight) {
    const double p = w / total;
    const double sigma = std::sqrt(n * p * (1 - p));
    EXPECT_NEAR(seen[family], n * p, 3 * sigma) << family;
  }
}
