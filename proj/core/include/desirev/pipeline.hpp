#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "desirev/augment.hpp"
#include "desirev/corpus.hpp"
#include "desirev/eval.hpp"
#include "desirev/models.hpp"
#include "desirev/report.hpp"

namespace desirev {

/// Declarative description of one experiment, read from a JSON file. Relative
/// paths are resolved against the directory holding the file.
struct ExperimentConfig {
  std::filesystem::path corpus;
  Profile profile = Profile::elementary;
  std::vector<Purpose> purposes{Purpose::evidence, Purpose::reasoning};
  std::vector<ModelVariant> variants{ModelVariant::M};
  bool logreg_baseline = false;
  std::optional<std::filesystem::path> vectors;
  double logreg_c = 1.0;
  HyperParams hyper;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> lexicon;
  bool augment = true;
  WordPick augment_pick = WordPick::random_word;
  std::string encoder = "bert-base-uncased";
  std::size_t folds = 10;
  FoldGrouping grouping = FoldGrouping::revision;
  bool normalize_counts = false;
  std::filesystem::path out = "out";
};

/// Parses a config document. Unknown keys and malformed values raise
/// ConfigError.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (sorted keys, resolved paths).
std::string config_to_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

/// Paths exist, variants are valid for the profile, numeric fields are in
/// range. Throws ConfigError.
void validate_config(const ExperimentConfig& config);

std::string_view to_string(WordPick pick);
WordPick parse_word_pick(std::string_view s);

/// The lexicon when augmentation is enabled and configured, else null.
std::shared_ptr<const SynonymLexicon> load_lexicon(const ExperimentConfig& config);
AugmentationPolicy make_policy(const ExperimentConfig& config);

/// Empty when the slice supports k-fold training, otherwise the reason.
std::string slice_problem(std::span<const TrainingInstance> instances, std::size_t k);

struct RunSummary {
  std::filesystem::path out;
  std::vector<IntrinsicCell> intrinsic;
  std::vector<ExtrinsicCell> extrinsic;
  std::vector<std::string> artifacts;  ///< relative to `out`
};

enum class RunScope { full, intrinsic_only };

/// Full pipeline: ingest, extract, contexts, folds, augment, train,
/// intrinsic and extrinsic evaluation. Progress lines go to `log` when given.
/// Errors carry a `[stage]` prefix and keep their type.
RunSummary run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr,
                          RunScope scope = RunScope::full);

/// Extrinsic evaluation from the prediction files a previous run left under
/// `config.out/predictions`. Writes extrinsic.json and the correlation table.
std::vector<ExtrinsicCell> evaluate_extrinsic(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Library version string.
std::string_view version();

}  // namespace desirev
