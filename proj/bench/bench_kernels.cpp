// Times the OpenMP kernels against their serial references on a synthetic corpus.
//   tdel_bench [n_tweets] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "tdel/corpus.hpp"
#include "tdel/eval.hpp"
#include "tdel/features.hpp"
#include "tdel/learn.hpp"
#include "tdel/synthetic.hpp"

namespace {

template <typename Fn>
double best_of(int repeats, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-18s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  if (n == 0 || repeats <= 0) {
    std::fprintf(stderr, "usage: %s [n_tweets > 0] [repeats > 0]\n", argv[0]);
    return 1;
  }

  tdel::SyntheticConfig cfg;
  cfg.n_tweets = n;
  auto corpus = tdel::generate_synthetic(cfg);
  std::vector<std::string> lines;
  lines.reserve(corpus.tweets.size());
  for (const auto& t : corpus.tweets) lines.push_back(tdel::to_stream_line(t));
  auto labeled = tdel::join_labels(corpus.tweets, corpus.notices, cfg.window_end() + std::chrono::days{29});
  auto space = tdel::fit_feature_space(std::span<const tdel::LabeledTweet>(labeled));
  const auto mask = tdel::FeatureMask::all();

  std::printf("%zu tweets, %d OpenMP threads, best of %d\n", n, omp_get_max_threads(), repeats);
  std::printf("%-18s %10s %10s %9s\n", "kernel", "serial s", "openmp s", "speedup");

  std::vector<tdel::StreamItem> ps, pp;
  const double parse_s = best_of(repeats, [&] { ps = tdel::parse_stream_lines_serial(lines); });
  const double parse_p = best_of(repeats, [&] { pp = tdel::parse_stream_lines(lines); });
  row("parse", parse_s, parse_p, ps.size() == pp.size());

  tdel::Dataset ds, dp;
  const double ext_s = best_of(repeats, [&] { ds = tdel::extract_dataset_serial(labeled, space, mask); });
  const double ext_p = best_of(repeats, [&] { dp = tdel::extract_dataset(labeled, space, mask); });
  row("extract", ext_s, ext_p, ds == dp);

  tdel::PAConfig pa;
  auto model = tdel::pa_train(dp, space.dimension(), pa, mask);
  std::vector<double> ss, sp;
  const double score_s = best_of(repeats, [&] { ss = tdel::score_batch_serial(model, dp); });
  const double score_p = best_of(repeats, [&] { sp = tdel::score_batch(model, dp); });
  row("score", score_s, score_p, ss == sp);

  const auto preds = tdel::predict_batch(model, dp);
  const auto baseline = tdel::all_positive_baseline(preds.size());
  std::vector<int> gold(dp.labels().begin(), dp.labels().end());
  double cs = 0, cp = 0;
  const double cmp_s = best_of(repeats, [&] { cs = tdel::compare_models_serial(preds, baseline, gold, 2000, 7); });
  const double cmp_p = best_of(repeats, [&] { cp = tdel::compare_models(preds, baseline, gold, 2000, 7); });
  row("randomization", cmp_s, cmp_p, cs == cp);
  return 0;
}
