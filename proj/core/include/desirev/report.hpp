#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "desirev/corpus.hpp"
#include "desirev/eval.hpp"
#include "desirev/revisions.hpp"

namespace desirev {

/// Cross-validation results for one (profile, purpose) slice.
struct IntrinsicCell {
  Profile profile = Profile::elementary;
  Purpose purpose = Purpose::evidence;
  std::vector<CrossValidationResult> results;  ///< one per model
};

struct ExtrinsicCell {
  Profile profile = Profile::elementary;
  Purpose purpose = Purpose::evidence;
  ExtrinsicReport report;
};

// Report rows are 1-based; everything else in the library is 0-based.

std::string intrinsic_json(const std::vector<IntrinsicCell>& cells, FoldGrouping grouping);
/// Mean macro-F1, one row per model and one column per slice.
std::string macro_f1_table_csv(const std::vector<IntrinsicCell>& cells);
/// Mean macro precision, recall and F1 per model and slice.
std::string detail_table_csv(const std::vector<IntrinsicCell>& cells);
std::string folds_csv(const std::vector<IntrinsicCell>& cells);

std::string extrinsic_json(const std::vector<ExtrinsicCell>& cells);
/// r with a `*` suffix when p < .05, one row per (model, label).
std::string correlation_table_csv(const std::vector<ExtrinsicCell>& cells);

std::string predictions_jsonl(const std::vector<InstancePrediction>& predictions);
std::vector<InstancePrediction> parse_predictions_jsonl(const std::string& text);

/// One line per revision: {student_id, row, context1, context2}.
std::string contexts_jsonl(const std::vector<EssayPair>& corpus, ContextMode mode,
                           std::optional<Purpose> purpose = std::nullopt);

/// Writes `content` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace desirev
