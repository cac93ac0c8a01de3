#include <benchmark/benchmark.h>

#include <fstream>

#include "support/generators.hpp"
#include "support/temp_dir.hpp"
#include "tiltkit/archive/analyzer.hpp"
#include "tiltkit/hub/filter.hpp"
#include "tiltkit/hub/store.hpp"
#include "tiltkit/score/score.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/tilt/completeness.hpp"
#include "tiltkit/tilt/diff.hpp"
#include "tiltkit/util/fs.hpp"

namespace {

using namespace tiltkit;

std::vector<tilt::TiltDocument> corpus(std::size_t n, std::uint64_t seed = 7) {
  testing::Gen g(seed);
  std::vector<tilt::TiltDocument> docs;
  for (std::size_t i = 0; i < n; ++i) docs.push_back(testing::random_document(g, "doc-" + std::to_string(i)));
  return docs;
}

void BM_Parse(benchmark::State& state) {
  const auto text = util::read_file(testing::fixture("documents/complete.tilt"));
  for (auto _ : state) benchmark::DoNotOptimize(tilt::parse(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse);

void BM_CanonicalHash(benchmark::State& state) {
  const auto docs = corpus(64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tilt::compute_hash(docs[i++ % docs.size()]));
}
BENCHMARK(BM_CanonicalHash);

void BM_Completeness(benchmark::State& state) {
  const auto docs = corpus(64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tilt::check_completeness(docs[i++ % docs.size()]));
}
BENCHMARK(BM_Completeness);

void BM_DiffApply(benchmark::State& state) {
  testing::Gen g(11);
  const auto old_doc = testing::random_document(g);
  const auto new_doc = testing::mutate(g, old_doc);
  for (auto _ : state) benchmark::DoNotOptimize(tilt::apply_diff(old_doc, tilt::diff(old_doc, new_doc)));
}
BENCHMARK(BM_DiffApply);

void BM_FilterEvaluate(benchmark::State& state) {
  const auto docs = corpus(static_cast<std::size_t>(state.range(0)));
  std::vector<nlohmann::json> views;
  for (const auto& d : docs) views.push_back(hub::query_view(d));
  const auto filter = hub::parse_filter(R"(thirdCountryTransfers/*/country eq "US")");
  for (auto _ : state) {
    std::size_t hits = 0;
    for (const auto& v : views) hits += hub::evaluate_filter(filter, v).has_value();
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterEvaluate)->Arg(100)->Arg(1000);

void BM_StoreQuery(benchmark::State& state) {
  testing::TempDir dir;
  hub::DocumentStore store(dir.path());
  for (const auto& d : corpus(static_cast<std::size_t>(state.range(0)))) store.put(d);
  const auto filter = hub::parse_filter("automatedDecisionMaking/inUse eq true");
  for (auto _ : state) benchmark::DoNotOptimize(store.query(filter));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StoreQuery)->Arg(100);

void BM_Score(benchmark::State& state) {
  const auto docs = corpus(64);
  testing::Gen g(5);
  const auto signals = testing::random_signals(g);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(score::compute_score(docs[i++ % docs.size()], signals));
}
BENCHMARK(BM_Score);

void BM_ArchiveProfile(benchmark::State& state) {
  testing::TempDir dir;
  for (int f = 0; f < 8; ++f) {
    std::ofstream out(dir.path() / ("messages_" + std::to_string(f) + ".jsonl"));
    for (int r = 0; r < 2000; ++r) out << R"({"created_utc":)" << 1262304000 + r * 3600 << R"(,"body":"x"})" << "\n";
  }
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(archive::profile(archive::ingest(dir.path(), "bench", threads), threads));
}
BENCHMARK(BM_ArchiveProfile)->Arg(1)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
