#include "desirev/eval.hpp"

#include <algorithm>
#include <set>

#include "desirev/error.hpp"
#include "desirev/random.hpp"

namespace desirev {

Learner neural_learner(ModelVariant variant, HyperParams hyper, std::shared_ptr<EncodingCache> cache) {
  return [variant, hyper, cache](std::span<const TrainingInstance> train_set, std::uint64_t seed) -> Predictor {
    auto model = std::make_shared<NeuralModel>(build_model(variant, cache->encoder().dim(), hyper));
    train(*model, train_set, *cache, seed);
    return [model, cache](const TrainingInstance& inst) { return predict(*model, inst, *cache); };
  };
}

Learner logreg_learner(std::shared_ptr<const VectorTable> table, double c) {
  return [table, c](std::span<const TrainingInstance> train_set, std::uint64_t seed) -> Predictor {
    auto model = std::make_shared<LogRegBaseline>(train_logreg_baseline(train_set, table, seed, c));
    return [model](const TrainingInstance& inst) { return model->predict(inst); };
  };
}

CrossValidationResult cross_validate(std::span<const TrainingInstance> instances, const std::string& model_name,
                                     const Learner& learner, const CrossValidationOptions& options) {
  const FoldPlan plan = make_folds(instances, options.k, options.seed, options.grouping);
  CrossValidationResult result;
  result.model = model_name;
  result.predictions.resize(instances.size());

  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    std::vector<TrainingInstance> train_set, test_set;
    std::vector<std::size_t> test_index;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (plan.fold_of[i] == fold) {
        test_set.push_back(instances[i]);
        test_index.push_back(i);
      } else {
        train_set.push_back(instances[i]);
      }
    }
    FoldResult fr;
    fr.fold = fold;
    fr.train_originals = train_set.size();
    fr.test_size = test_set.size();
    if (options.lexicon) {
      train_set = augment_training_fold(train_set, *options.lexicon, options.policy, derive_seed(options.seed, 200 + fold));
    }
    fr.train_total = train_set.size();
    check_no_leakage(train_set, test_set);

    const Predictor predictor = learner(train_set, derive_seed(options.seed, 100 + fold));
    std::vector<Desirability> gold, pred;
    for (std::size_t j = 0; j < test_set.size(); ++j) {
      const auto& inst = test_set[j];
      const Prediction p = predictor(inst);
      gold.push_back(inst.label);
      pred.push_back(p.label);
      result.predictions[test_index[j]] = {inst.id, inst.student_id, inst.row, fold, inst.label, p.label, p.probability};
    }
    fr.scores = score(gold, pred);
    result.folds.push_back(fr);
    if (options.on_fold) options.on_fold(fold, plan.k);
  }

  for (const auto& f : result.folds) {
    result.mean_macro_f1 += f.scores.macro_f1;
    result.mean_precision += f.scores.macro_precision;
    result.mean_recall += f.scores.macro_recall;
  }
  const auto k = static_cast<double>(result.folds.size());
  result.mean_macro_f1 /= k;
  result.mean_precision /= k;
  result.mean_recall /= k;
  return result;
}

CrossValidationResult cross_validate(std::span<const TrainingInstance> instances, Profile profile,
                                     ModelVariant variant, const HyperParams& hyper,
                                     std::shared_ptr<EncodingCache> cache, const CrossValidationOptions& options) {
  check_variant_for_profile(variant, profile);
  return cross_validate(instances, std::string(display_name(variant)), neural_learner(variant, hyper, std::move(cache)),
                        options);
}

std::map<std::string, RevisionCounts> per_student_counts(std::span<const InstancePrediction> predictions,
                                                         LabelSource source, std::span<const std::string> students) {
  std::map<std::string, RevisionCounts> counts;
  for (const auto& s : students) counts[s];
  for (const auto& p : predictions) {
    const Desirability label = source == LabelSource::gold ? p.gold : p.predicted;
    auto& c = counts[p.student_id];
    (label == Desirability::desirable ? c.desirable : c.undesirable) += 1.0;
  }
  return counts;
}

std::vector<InstancePrediction> gold_predictions(std::span<const TrainingInstance> instances) {
  std::vector<InstancePrediction> out;
  for (const auto& inst : instances) {
    if (inst.is_augmented()) continue;
    out.push_back({inst.id, inst.student_id, inst.row, 0, inst.label, inst.label,
                   inst.label == Desirability::desirable ? 1.0 : 0.0});
  }
  return out;
}

namespace {

CorrelationCell correlate(const std::vector<double>& counts, const std::vector<double>& improvement) {
  CorrelationCell cell;
  try {
    cell.result = pearson_r(counts, improvement);
  } catch (const DataError& e) {
    cell.error = e.what();
  }
  return cell;
}

ExtrinsicRow correlate_row(const std::string& name, std::span<const InstancePrediction> predictions, LabelSource source,
                           const std::vector<std::string>& students, const std::vector<double>& improvement,
                           bool normalize) {
  const auto counts = per_student_counts(predictions, source, students);
  std::vector<double> d, u;
  for (const auto& s : students) {
    const auto& c = counts.at(s);
    const double total = c.desirable + c.undesirable;
    d.push_back(normalize ? (total > 0 ? c.desirable / total : 0.0) : c.desirable);
    u.push_back(normalize ? (total > 0 ? c.undesirable / total : 0.0) : c.undesirable);
  }
  ExtrinsicRow row;
  row.model = name;
  row.desirable = correlate(d, improvement);
  row.undesirable = correlate(u, improvement);
  return row;
}

}  // namespace

ExtrinsicReport extrinsic_eval(const std::vector<EssayPair>& corpus, std::span<const InstancePrediction> gold,
                               const std::vector<std::pair<std::string, std::vector<InstancePrediction>>>& models,
                               bool normalize) {
  ExtrinsicReport report;
  report.normalized = normalize;
  std::vector<std::string> students;
  std::vector<double> improvement;
  for (const auto& pair : corpus) {
    try {
      improvement.push_back(static_cast<double>(compute_improvement(pair)));
      students.push_back(pair.student_id);
    } catch (const DataError&) {
      report.excluded.push_back(pair.student_id);
    }
  }
  report.students = students.size();
  if (students.size() >= 3 &&
      std::all_of(improvement.begin(), improvement.end(), [&](double v) { return v == improvement.front(); })) {
    throw DataError("extrinsic evaluation: improvement scores have zero variance (all equal to " +
                    std::to_string(improvement.front()) + ")");
  }
  const std::set<std::string> included(students.begin(), students.end());
  auto keep_included = [&](std::span<const InstancePrediction> preds) {
    std::vector<InstancePrediction> out;
    for (const auto& p : preds) {
      if (included.count(p.student_id)) out.push_back(p);
    }
    return out;
  };

  const auto gold_kept = keep_included(gold);
  report.rows.push_back(correlate_row("Gold", gold_kept, LabelSource::gold, students, improvement, normalize));
  const bool gold_positive = report.rows.front().desirable.significant_positive();
  for (const auto& [name, preds] : models) {
    auto row = correlate_row(name, keep_included(preds), LabelSource::predicted, students, improvement, normalize);
    row.consistent_with_gold = row.desirable.significant_positive() == gold_positive;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace desirev
