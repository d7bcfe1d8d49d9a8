#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "desirev/augment.hpp"
#include "desirev/corpus.hpp"
#include "desirev/instance.hpp"
#include "desirev/models.hpp"

namespace desirev {

// ---------------------------------------------------------------- folds

enum class FoldGrouping {
  revision,  ///< stratified by label at revision level
  student,   ///< all revisions of a student share a fold
};

std::string_view to_string(FoldGrouping g);
FoldGrouping parse_fold_grouping(std::string_view s);

struct FoldPlan {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  FoldGrouping grouping = FoldGrouping::revision;
  std::vector<std::size_t> fold_of;  ///< parallel to the instances passed in

  [[nodiscard]] std::vector<std::size_t> fold_sizes() const;
};

/// Random partition of original instances into k folds, deterministic under
/// `seed`. Revision-level plans are label-stratified and fold sizes differ by
/// at most one.
FoldPlan make_folds(std::span<const TrainingInstance> instances, std::size_t k, std::uint64_t seed,
                    FoldGrouping grouping = FoldGrouping::revision);

// -------------------------------------------------------------- metrics

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct BinaryScores {
  ClassScores desirable;
  ClassScores undesirable;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

/// Per-class and macro-averaged scores. A class with no predictions has
/// precision 0, a class with no gold instances recall 0, and F1 is 0 whenever
/// precision + recall is 0.
BinaryScores score(std::span<const Desirability> gold, std::span<const Desirability> predicted);

/// Unweighted mean of the two per-class F1 scores.
double macro_f1(std::span<const Desirability> gold, std::span<const Desirability> predicted);

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;  ///< two-tailed, t distribution with n - 2 degrees of freedom
  std::size_t n = 0;
  [[nodiscard]] bool significant(double alpha = 0.05) const { return p < alpha; }
};

/// Sample Pearson correlation with its two-tailed p-value. Needs n >= 3 and
/// non-constant inputs; throws DataError otherwise.
PearsonResult pearson_r(std::span<const double> x, std::span<const double> y);

// ------------------------------------------------------ cross-validation

using Predictor = std::function<Prediction(const TrainingInstance&)>;
/// Fits a model on one training split and returns its predictor.
using Learner = std::function<Predictor(std::span<const TrainingInstance> train, std::uint64_t seed)>;

Learner neural_learner(ModelVariant variant, HyperParams hyper, std::shared_ptr<EncodingCache> cache);
Learner logreg_learner(std::shared_ptr<const VectorTable> table, double c = 1.0);

struct InstancePrediction {
  std::string id;
  std::string student_id;
  std::size_t row = 0;
  std::size_t fold = 0;
  Desirability gold = Desirability::undesirable;
  Desirability predicted = Desirability::undesirable;
  double probability = 0.0;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_originals = 0;
  std::size_t train_total = 0;  ///< after augmentation
  std::size_t test_size = 0;
  BinaryScores scores;
};

struct CrossValidationResult {
  std::string model;
  std::vector<FoldResult> folds;
  double mean_macro_f1 = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  std::vector<InstancePrediction> predictions;  ///< out-of-fold, in instance order
};

struct CrossValidationOptions {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  FoldGrouping grouping = FoldGrouping::revision;
  /// Training folds are augmented when a lexicon is supplied.
  const SynonymLexicon* lexicon = nullptr;
  AugmentationPolicy policy{};
  /// Called after each fold with (fold index, k).
  std::function<void(std::size_t, std::size_t)> on_fold;
};

/// For each fold: augment the training split, fit, predict the untouched test
/// split and score it.
CrossValidationResult cross_validate(std::span<const TrainingInstance> instances, const std::string& model_name,
                                     const Learner& learner, const CrossValidationOptions& options);

/// Neural variant on one (profile, purpose) slice; rejects variants the
/// profile cannot support.
CrossValidationResult cross_validate(std::span<const TrainingInstance> instances, Profile profile,
                                     ModelVariant variant, const HyperParams& hyper,
                                     std::shared_ptr<EncodingCache> cache, const CrossValidationOptions& options);

// ------------------------------------------------------------ extrinsic

enum class LabelSource { gold, predicted };

struct RevisionCounts {
  double desirable = 0.0;
  double undesirable = 0.0;
  friend bool operator==(const RevisionCounts&, const RevisionCounts&) = default;
};

/// Per-student label counts. Every id in `students` appears, with zeros when
/// the student has no revision in the slice.
std::map<std::string, RevisionCounts> per_student_counts(std::span<const InstancePrediction> predictions,
                                                         LabelSource source,
                                                         std::span<const std::string> students = {});

struct CorrelationCell {
  std::optional<PearsonResult> result;
  std::string error;  ///< set when the correlation is undefined
  [[nodiscard]] bool significant_positive() const { return result && result->significant() && result->r > 0; }
};

struct ExtrinsicRow {
  std::string model;
  CorrelationCell desirable;
  CorrelationCell undesirable;
  /// Desirable-count correlation is significant-positive exactly when gold's is.
  bool consistent_with_gold = true;
};

struct ExtrinsicReport {
  std::size_t students = 0;
  std::vector<std::string> excluded;  ///< students without an improvement score
  bool normalized = false;
  std::vector<ExtrinsicRow> rows;     ///< gold first
};

/// Correlates per-student desirable and undesirable counts with essay
/// improvement, for gold labels and for each model's predictions.
ExtrinsicReport extrinsic_eval(const std::vector<EssayPair>& corpus, std::span<const InstancePrediction> gold,
                               const std::vector<std::pair<std::string, std::vector<InstancePrediction>>>& models,
                               bool normalize = false);

/// Gold-label view of instances as predictions (probability 1 or 0).
std::vector<InstancePrediction> gold_predictions(std::span<const TrainingInstance> instances);

}  // namespace desirev
