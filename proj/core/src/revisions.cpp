#include "desirev/revisions.hpp"

#include <map>

#include "desirev/error.hpp"
#include "desirev/text.hpp"

namespace desirev {

std::string_view to_string(Operation op) {
  switch (op) {
    case Operation::no_change: return "no_change";
    case Operation::modify: return "modify";
    case Operation::added: return "added";
    case Operation::deleted: return "deleted";
  }
  return "?";
}

Operation parse_operation(std::string_view s) {
  if (s == "no_change") return Operation::no_change;
  if (s == "modify") return Operation::modify;
  if (s == "added") return Operation::added;
  if (s == "deleted") return Operation::deleted;
  throw DataError("unknown operation '" + std::string(s) + "'");
}

std::string_view to_string(Purpose p) { return p == Purpose::evidence ? "evidence" : "reasoning"; }

std::optional<Purpose> try_parse_purpose(std::string_view s) {
  if (s == "evidence") return Purpose::evidence;
  if (s == "reasoning") return Purpose::reasoning;
  return std::nullopt;
}

Purpose parse_purpose(std::string_view s) {
  if (auto p = try_parse_purpose(s)) return *p;
  throw DataError("unknown purpose '" + std::string(s) + "' (expected evidence or reasoning)");
}

std::string_view to_string(RevisionCode c) {
  switch (c) {
    case RevisionCode::relevant: return "relevant";
    case RevisionCode::irrelevant: return "irrelevant";
    case RevisionCode::repeat: return "repeat";
    case RevisionCode::non_text_based: return "non_text_based";
    case RevisionCode::minimal_ev: return "minimal_ev";
    case RevisionCode::lce: return "lce";
    case RevisionCode::not_lce: return "not_lce";
    case RevisionCode::paraphrase: return "paraphrase";
    case RevisionCode::generic: return "generic";
    case RevisionCode::commentary: return "commentary";
    case RevisionCode::minimal_re: return "minimal_re";
  }
  return "?";
}

RevisionCode parse_code(std::string_view s, std::optional<Purpose> purpose) {
  for (auto c : kAllCodes) {
    if (to_string(c) == s) return c;
  }
  if (s == "minimal" && purpose) {
    return *purpose == Purpose::evidence ? RevisionCode::minimal_ev : RevisionCode::minimal_re;
  }
  throw DataError("unknown revision code '" + std::string(s) + "'");
}

Purpose purpose_of(RevisionCode c) {
  switch (c) {
    case RevisionCode::relevant:
    case RevisionCode::irrelevant:
    case RevisionCode::repeat:
    case RevisionCode::non_text_based:
    case RevisionCode::minimal_ev:
      return Purpose::evidence;
    default:
      return Purpose::reasoning;
  }
}

std::string_view to_string(Desirability d) { return d == Desirability::desirable ? "desirable" : "undesirable"; }

Desirability parse_desirability(std::string_view s) {
  if (s == "desirable") return Desirability::desirable;
  if (s == "undesirable") return Desirability::undesirable;
  throw DataError("unknown desirability label '" + std::string(s) + "'");
}

std::vector<AlignedUnit> derive_operations(const AlignmentMap& alignment, std::span<const std::string> draft_a,
                                           std::span<const std::string> draft_b) {
  std::vector<AlignedUnit> units;
  units.reserve(alignment.rows.size());
  for (std::size_t r = 0; r < alignment.rows.size(); ++r) {
    const auto& row = alignment.rows[r];
    AlignedUnit u{r, row.index_a, row.index_b, Operation::no_change};
    if (!row.index_a) {
      u.operation = Operation::added;
    } else if (!row.index_b) {
      u.operation = Operation::deleted;
    } else {
      const bool same =
          normalize_whitespace(draft_a[*row.index_a]) == normalize_whitespace(draft_b[*row.index_b]);
      u.operation = same ? Operation::no_change : Operation::modify;
    }
    units.push_back(u);
  }
  return units;
}

Desirability map_desirability(RevisionCode code, Profile profile) {
  switch (code) {
    case RevisionCode::relevant:
    case RevisionCode::lce:
      return Desirability::desirable;
    case RevisionCode::paraphrase:
      return profile == Profile::elementary ? Desirability::desirable : Desirability::undesirable;
    case RevisionCode::irrelevant:
    case RevisionCode::repeat:
    case RevisionCode::non_text_based:
    case RevisionCode::minimal_ev:
    case RevisionCode::not_lce:
    case RevisionCode::generic:
    case RevisionCode::commentary:
    case RevisionCode::minimal_re:
      return Desirability::undesirable;
  }
  throw DataError("unknown revision code");
}

std::vector<Revision> extract_revisions(std::span<const AlignedUnit> units, std::span<const RowAnnotation> annotations,
                                        Profile profile) {
  std::map<std::size_t, const RowAnnotation*> by_row;
  for (const auto& a : annotations) by_row[a.row] = &a;

  std::vector<Revision> out;
  for (const auto& u : units) {
    auto it = by_row.find(u.row_index);
    if (it == by_row.end()) continue;
    const auto purpose = try_parse_purpose(it->second->purpose);
    if (!purpose) continue;
    if (!u.changed()) {
      throw DataError("alignment row " + std::to_string(u.row_index) + " is unchanged but annotated as " +
                      std::string(to_string(*purpose)));
    }
    if (it->second->code.empty()) {
      throw DataError("alignment row " + std::to_string(u.row_index) + " has purpose " +
                      std::string(to_string(*purpose)) + " but no code");
    }
    const auto code = parse_code(it->second->code, purpose);
    if (purpose_of(code) != *purpose) {
      throw DataError("code '" + std::string(to_string(code)) + "' is not a " + std::string(to_string(*purpose)) +
                      " code (row " + std::to_string(u.row_index) + ")");
    }
    out.push_back({u, *purpose, code, map_desirability(code, profile)});
  }
  return out;
}

std::vector<Revision> extract_revisions(const EssayPair& pair) {
  const auto units = derive_operations(pair.alignment, pair.draft_a, pair.draft_b);
  try {
    return extract_revisions(units, pair.annotations, pair.profile);
  } catch (const DataError& e) {
    throw DataError("student '" + pair.student_id + "': " + e.what());
  }
}

}  // namespace desirev
