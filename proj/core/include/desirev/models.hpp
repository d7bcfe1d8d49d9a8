#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "desirev/bilstm.hpp"
#include "desirev/context.hpp"
#include "desirev/encode.hpp"
#include "desirev/instance.hpp"

namespace desirev {

enum class ModelVariant { M, M_SC, M_LC, M_F, M_LC_F };

inline constexpr ModelVariant kAllVariants[] = {ModelVariant::M, ModelVariant::M_SC, ModelVariant::M_LC,
                                                ModelVariant::M_F, ModelVariant::M_LC_F};

/// Display names: "M", "+SC", "+LC", "+F", "+LC&F".
std::string_view display_name(ModelVariant v);
/// Stable identifiers used in files and on the command line: M, M_SC, ...
std::string_view to_string(ModelVariant v);
/// Accepts identifiers and display names (also SC, LC, F, LC_F).
ModelVariant parse_variant(std::string_view s);

std::optional<ContextMode> variant_context(ModelVariant v);
bool variant_uses_feedback(ModelVariant v);

/// Throws ConfigError for feedback variants on a corpus without feedback.
void check_variant_for_profile(ModelVariant v, Profile profile);

struct HyperParams {
  double learning_rate = 1e-3;
  std::size_t batch_size = 16;
  std::size_t epochs = 10;
  std::size_t hidden_size = 64;
  std::size_t dense_size = 64;
  double lstm_dropout = 0.1;
  double recurrent_dropout = 0.1;
  double dense_dropout = 0.2;
  /// Scale the loss of each class by n / (2 n_class). Off by default.
  bool class_weights = false;
};

/// The separately encoded segments in input order: pair, then context1 and
/// context2 for context variants, then feedback for feedback variants.
std::vector<std::shared_ptr<const EmbeddingSequence>> encode_segments(const TrainingInstance& instance,
                                                                      ModelVariant variant, EncodingCache& cache);

/// Time-axis concatenation of encode_segments().
EmbeddingSequence assemble_input(const TrainingInstance& instance, ModelVariant variant, EncodingCache& cache);

struct Prediction {
  double probability = 0.0;
  Desirability label = Desirability::undesirable;
};

/// Desirable iff probability >= 0.5.
Desirability binarize(double probability);

struct TrainingLog {
  std::vector<double> epoch_loss;
};

/// BiLSTM classifier over frozen encoder embeddings for one variant.
class NeuralModel {
 public:
  NeuralModel(ModelVariant variant, NetworkDims dims, HyperParams hyper);

  [[nodiscard]] ModelVariant variant() const { return variant_; }
  [[nodiscard]] const HyperParams& hyper() const { return hyper_; }
  [[nodiscard]] std::size_t parameter_count() const { return net_.parameter_count(); }
  [[nodiscard]] BiLstmClassifier<float>& network() { return net_; }
  [[nodiscard]] const BiLstmClassifier<float>& network() const { return net_; }

  [[nodiscard]] Prediction predict(const EmbeddingSequence& input) const;

  // Run metadata carried into the saved manifest.
  std::uint64_t seed = 0;
  std::string encoder_id;
  std::string data_fingerprint;

 private:
  ModelVariant variant_;
  HyperParams hyper_;
  BiLstmClassifier<float> net_;
};

/// Architecture for a variant: recurrent layer sized from `hidden`, input
/// width from the encoder dimension.
NeuralModel build_model(ModelVariant variant, std::size_t input_dim, const HyperParams& hyper = {});

/// Mini-batch Adam on binary cross-entropy. Weights are initialized from
/// `seed`; zero epochs leaves the initialization untouched.
TrainingLog train(NeuralModel& model, std::span<const TrainingInstance> instances, EncodingCache& cache,
                  std::uint64_t seed);

Prediction predict(const NeuralModel& model, const TrainingInstance& instance, EncodingCache& cache);

void save_model(const NeuralModel& model, const std::filesystem::path& dir);
NeuralModel load_model(const std::filesystem::path& dir);

/// L2-regularized logistic regression fitted by Newton's method. The
/// intercept is not penalized. Objective: sum log-loss + ||w||^2 / (2C).
class LogisticRegression {
 public:
  void fit(const Eigen::MatrixXd& features, const std::vector<int>& labels, double c = 1.0,
           std::size_t max_iterations = 100, double tolerance = 1e-10);
  [[nodiscard]] double probability(const Eigen::VectorXd& x) const;
  [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }
  [[nodiscard]] double intercept() const { return intercept_; }
  void set(Eigen::VectorXd weights, double intercept);

 private:
  Eigen::VectorXd weights_;
  double intercept_ = 0.0;
};

/// Averaged-word-vector features + logistic regression.
class LogRegBaseline {
 public:
  LogRegBaseline(std::shared_ptr<const VectorTable> table, LogisticRegression model)
      : table_(std::move(table)), model_(std::move(model)) {}

  [[nodiscard]] Prediction predict(const TrainingInstance& instance) const;
  [[nodiscard]] const LogisticRegression& model() const { return model_; }

 private:
  std::shared_ptr<const VectorTable> table_;
  LogisticRegression model_;
};

Eigen::VectorXd baseline_features(const TrainingInstance& instance, const VectorTable& table);

/// The seed is accepted for interface symmetry; Newton's method is
/// deterministic.
LogRegBaseline train_logreg_baseline(std::span<const TrainingInstance> instances,
                                     std::shared_ptr<const VectorTable> table, std::uint64_t seed, double c = 1.0);

/// Counts per class; throws TrainingError unless both classes are present.
void require_both_classes(std::span<const TrainingInstance> instances);

}  // namespace desirev
