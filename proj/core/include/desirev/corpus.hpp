#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace desirev {

enum class Profile { elementary, high_school, college };
enum class FeedbackSource { awe, peer, none };
enum class FeedbackDimension { evidence, reasoning, other };
enum class FeedbackOrigin { awe_catalog, peer_freeform };

struct IntRange {
  int lo = 0;
  int hi = 0;
  [[nodiscard]] bool contains(int v) const { return v >= lo && v <= hi; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Static description of one corpus: which drafts are paired, where feedback
/// comes from and the valid score and improvement ranges.
struct CorpusProfile {
  Profile name;
  std::pair<int, int> draft_pair;
  FeedbackSource feedback_source;
  IntRange score_range;
  IntRange improvement_range;
  /// College improvement is a sign, so only -1 and +1 are legal.
  bool binary_improvement = false;

  [[nodiscard]] bool improvement_valid(int v) const {
    return binary_improvement ? (v == -1 || v == 1) : improvement_range.contains(v);
  }
};

const CorpusProfile& profile_info(Profile p);

std::string_view to_string(Profile p);
Profile parse_profile(std::string_view s);
std::string_view to_string(FeedbackDimension d);
FeedbackDimension parse_feedback_dimension(std::string_view s);
std::string_view to_string(FeedbackOrigin o);
FeedbackOrigin parse_feedback_origin(std::string_view s);

struct FeedbackMessage {
  std::string text;
  FeedbackDimension dimension = FeedbackDimension::other;
  FeedbackOrigin origin = FeedbackOrigin::awe_catalog;
  friend bool operator==(const FeedbackMessage&, const FeedbackMessage&) = default;
};

/// One row of the manual sentence alignment. At least one side is present.
struct AlignmentRow {
  std::optional<std::size_t> index_a;
  std::optional<std::size_t> index_b;
  friend bool operator==(const AlignmentRow&, const AlignmentRow&) = default;
};

struct AlignmentMap {
  std::vector<AlignmentRow> rows;
  friend bool operator==(const AlignmentMap&, const AlignmentMap&) = default;
};

/// Gold purpose annotation for an alignment row, as stored in the corpus file.
/// `purpose` is free text; only "evidence" and "reasoning" are modeled.
struct RowAnnotation {
  std::size_t row = 0;
  std::string purpose;
  std::string code;
  friend bool operator==(const RowAnnotation&, const RowAnnotation&) = default;
};

struct EssayPair {
  std::string student_id;
  Profile profile = Profile::elementary;
  std::vector<std::string> draft_a;
  std::vector<std::string> draft_b;
  AlignmentMap alignment;
  std::vector<FeedbackMessage> feedback;
  std::optional<int> score_a;
  std::optional<int> score_b;
  std::optional<int> improvement;
  std::vector<RowAnnotation> annotations;

  /// Feedback texts concatenated in file order, empty when there is none.
  [[nodiscard]] std::string feedback_text() const;

  friend bool operator==(const EssayPair&, const EssayPair&) = default;
};

/// Checks index ranges, coverage of both drafts, row ordering, feedback rules
/// and score ranges. Throws DataError describing the first violation.
void validate_pair(const EssayPair& pair);

/// Parses one JSONL record. Applies the profile feedback filter and validates.
EssayPair parse_pair(std::string_view json_line);

/// Serializes one record as a single JSON line (no trailing newline), with a
/// fixed field order.
std::string serialize_pair(const EssayPair& pair);

/// Loads a JSONL corpus. When `profile` is given every record must carry it.
/// Errors name the 1-based line number.
std::vector<EssayPair> load_corpus(const std::filesystem::path& path,
                                   std::optional<Profile> profile = std::nullopt);

void save_corpus(const std::filesystem::path& path, const std::vector<EssayPair>& pairs);

/// Improvement score for a pair according to its profile: given directly for
/// elementary, score difference for high school, sign of the change for college.
int compute_improvement(const EssayPair& pair);

}  // namespace desirev
