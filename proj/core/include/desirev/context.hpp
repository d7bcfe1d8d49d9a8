#pragma once

#include <span>
#include <string>
#include <vector>

#include "desirev/corpus.hpp"
#include "desirev/revisions.hpp"

namespace desirev {

enum class ContextMode { simple, longer };

std::string_view to_string(ContextMode m);
ContextMode parse_context_mode(std::string_view s);

/// Sentences around a target revision, realized separately in each draft.
struct ContextPair {
  std::vector<std::string> context1;  ///< from draft_a, in document order
  std::vector<std::string> context2;  ///< from draft_b, in document order
  std::vector<std::size_t> rows1;     ///< alignment rows contributing to context1
  std::vector<std::size_t> rows2;     ///< alignment rows contributing to context2
  std::size_t first_row = 0;          ///< window_rows, inclusive
  std::size_t last_row = 0;

  [[nodiscard]] std::string text1() const;
  [[nodiscard]] std::string text2() const;
};

struct Drafts {
  std::span<const std::string> a;
  std::span<const std::string> b;
};

/// The rows immediately before and after the target. Each neighbor is realized
/// only on the sides where the target sentence itself exists, so an added
/// sentence gets revised-draft context only.
ContextPair simple_context(std::size_t target_row, std::span<const AlignedUnit> units, Drafts drafts);

/// Expands over the run of changed rows around the target and includes the
/// first unchanged row on each side (or stops at the document boundary). The
/// target is part of its own window.
ContextPair longer_context(std::size_t target_row, std::span<const AlignedUnit> units, Drafts drafts);

ContextPair extract_context(ContextMode mode, std::size_t target_row, std::span<const AlignedUnit> units,
                            Drafts drafts);

}  // namespace desirev
