#include <benchmark/benchmark.h>

#include "desirev/augment.hpp"
#include "desirev/bilstm.hpp"
#include "desirev/context.hpp"
#include "desirev/eval.hpp"
#include "desirev/random.hpp"
#include "desirev/revisions.hpp"

using namespace desirev;

namespace {

Eigen::MatrixXf random_sequence(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXf x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(rng.normal());
  return x;
}

void BM_BiLstmForward(benchmark::State& state) {
  const auto tokens = static_cast<std::size_t>(state.range(0));
  BiLstmClassifier<float> net({768, 64, 64});
  net.initialize(1);
  const auto x = random_sequence(tokens, 768, 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tokens));
}
BENCHMARK(BM_BiLstmForward)->Arg(32)->Arg(128)->Arg(512);

void BM_BiLstmGradient(benchmark::State& state) {
  const auto tokens = static_cast<std::size_t>(state.range(0));
  BiLstmClassifier<float> net({768, 64, 64});
  net.initialize(1);
  const auto x = random_sequence(tokens, 768, 3);
  Eigen::VectorXf grad = Eigen::VectorXf::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(net.accumulate_gradient(x, 1, grad, &rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tokens));
}
BENCHMARK(BM_BiLstmGradient)->Arg(32)->Arg(128);

EssayPair long_essay(std::size_t rows) {
  EssayPair pair;
  pair.student_id = "bench";
  Rng rng(5);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto kind = rng.below(4);
    AlignmentRow row;
    if (kind != 1) {
      row.index_a = pair.draft_a.size();
      pair.draft_a.push_back("Sentence a " + std::to_string(r) + ".");
    }
    if (kind != 2) {
      row.index_b = pair.draft_b.size();
      pair.draft_b.push_back(kind == 0 ? pair.draft_a.back() : "Sentence b " + std::to_string(r) + ".");
    }
    pair.alignment.rows.push_back(row);
  }
  return pair;
}

void BM_LongerContextAllRows(benchmark::State& state) {
  const auto pair = long_essay(static_cast<std::size_t>(state.range(0)));
  const auto units = derive_operations(pair.alignment, pair.draft_a, pair.draft_b);
  const Drafts drafts{pair.draft_a, pair.draft_b};
  for (auto _ : state) {
    for (std::size_t r = 0; r < units.size(); ++r) {
      if (units[r].operation != Operation::no_change) benchmark::DoNotOptimize(longer_context(r, units, drafts));
    }
  }
}
BENCHMARK(BM_LongerContextAllRows)->Arg(40)->Arg(400);

void BM_AugmentEveryWord(benchmark::State& state) {
  SynonymLexicon lexicon;
  lexicon.add("poverty", {"want", "penury", "privation", "indigence", "need"});
  lexicon.add("families", {"households", "kin"});
  lexicon.add("achieved", {"accomplished", "attained", "reached"});
  AugmentationPolicy policy;
  policy.pick = WordPick::every_word;
  std::vector<TrainingInstance> instances(200);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    instances[i].id = "b#" + std::to_string(i);
    instances[i].operation = Operation::added;
    instances[i].revised = "Poverty hurt the families until the village achieved clean water for everyone.";
  }
  for (auto _ : state) benchmark::DoNotOptimize(augment_training_fold(instances, lexicon, policy, 1));
}
BENCHMARK(BM_AugmentEveryWord);

void BM_Pearson(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = x[i] + rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(pearson_r(x, y));
}
BENCHMARK(BM_Pearson)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
