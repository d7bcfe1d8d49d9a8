#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "desirev/corpus.hpp"

namespace desirev {

enum class Operation { no_change, modify, added, deleted };
enum class Purpose { evidence, reasoning };

/// Fine-grained revision codes. Evidence and reasoning each have their own
/// "minimal" code.
enum class RevisionCode {
  relevant,
  irrelevant,
  repeat,
  non_text_based,
  minimal_ev,
  lce,
  not_lce,
  paraphrase,
  generic,
  commentary,
  minimal_re,
};

enum class Desirability { desirable, undesirable };

inline constexpr RevisionCode kAllCodes[] = {
    RevisionCode::relevant,   RevisionCode::irrelevant, RevisionCode::repeat,  RevisionCode::non_text_based,
    RevisionCode::minimal_ev, RevisionCode::lce,        RevisionCode::not_lce, RevisionCode::paraphrase,
    RevisionCode::generic,    RevisionCode::commentary, RevisionCode::minimal_re,
};

std::string_view to_string(Operation op);
Operation parse_operation(std::string_view s);
std::string_view to_string(Purpose p);
Purpose parse_purpose(std::string_view s);
/// Returns nullopt for purposes that are not modeled (claim, grammar, ...).
std::optional<Purpose> try_parse_purpose(std::string_view s);
std::string_view to_string(RevisionCode c);
/// Accepts the canonical names plus a plain "minimal" when the purpose
/// disambiguates it.
RevisionCode parse_code(std::string_view s, std::optional<Purpose> purpose = std::nullopt);
Purpose purpose_of(RevisionCode c);
std::string_view to_string(Desirability d);
Desirability parse_desirability(std::string_view s);

struct AlignedUnit {
  std::size_t row_index = 0;
  std::optional<std::size_t> index_a;
  std::optional<std::size_t> index_b;
  Operation operation = Operation::no_change;

  [[nodiscard]] bool changed() const { return operation != Operation::no_change; }
};

struct Revision {
  AlignedUnit unit;
  Purpose purpose = Purpose::evidence;
  RevisionCode code = RevisionCode::relevant;
  Desirability label = Desirability::undesirable;
};

/// One unit per alignment row. Texts are compared after whitespace
/// normalization.
std::vector<AlignedUnit> derive_operations(const AlignmentMap& alignment, std::span<const std::string> draft_a,
                                           std::span<const std::string> draft_b);

/// Keeps changed rows annotated as evidence or reasoning and attaches their
/// desirability label. Rows with other purposes are dropped.
std::vector<Revision> extract_revisions(std::span<const AlignedUnit> units, std::span<const RowAnnotation> annotations,
                                        Profile profile);

/// Convenience wrapper over derive_operations + extract_revisions.
std::vector<Revision> extract_revisions(const EssayPair& pair);

/// Corpus-specific binary mapping of fine-grained codes. Paraphrased evidence
/// counts as desirable reasoning only for the elementary corpus.
Desirability map_desirability(RevisionCode code, Profile profile);

}  // namespace desirev
