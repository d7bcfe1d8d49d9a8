#include "desirev/context.hpp"

#include "desirev/error.hpp"
#include "desirev/text.hpp"

namespace desirev {

namespace {

void check_target(std::size_t target_row, std::span<const AlignedUnit> units) {
  if (target_row >= units.size()) {
    throw DataError("context target row " + std::to_string(target_row) + " outside alignment of " +
                    std::to_string(units.size()) + " rows");
  }
}

void realize(ContextPair& ctx, const AlignedUnit& u, Drafts drafts, bool side_a, bool side_b) {
  if (side_a && u.index_a) {
    ctx.context1.push_back(drafts.a[*u.index_a]);
    ctx.rows1.push_back(u.row_index);
  }
  if (side_b && u.index_b) {
    ctx.context2.push_back(drafts.b[*u.index_b]);
    ctx.rows2.push_back(u.row_index);
  }
}

}  // namespace

std::string_view to_string(ContextMode m) { return m == ContextMode::simple ? "sc" : "lc"; }

ContextMode parse_context_mode(std::string_view s) {
  if (s == "sc" || s == "simple") return ContextMode::simple;
  if (s == "lc" || s == "longer") return ContextMode::longer;
  throw ConfigError("unknown context mode '" + std::string(s) + "' (expected sc or lc)");
}

std::string ContextPair::text1() const { return join(context1); }
std::string ContextPair::text2() const { return join(context2); }

ContextPair simple_context(std::size_t target_row, std::span<const AlignedUnit> units, Drafts drafts) {
  check_target(target_row, units);
  const auto& target = units[target_row];
  const bool side_a = target.index_a.has_value();
  const bool side_b = target.index_b.has_value();

  ContextPair ctx;
  ctx.first_row = target_row > 0 ? target_row - 1 : target_row;
  ctx.last_row = target_row + 1 < units.size() ? target_row + 1 : target_row;
  if (target_row > 0) realize(ctx, units[target_row - 1], drafts, side_a, side_b);
  if (target_row + 1 < units.size()) realize(ctx, units[target_row + 1], drafts, side_a, side_b);
  return ctx;
}

ContextPair longer_context(std::size_t target_row, std::span<const AlignedUnit> units, Drafts drafts) {
  check_target(target_row, units);
  std::size_t first = target_row;
  while (first > 0) {
    --first;
    if (!units[first].changed()) break;
  }
  std::size_t last = target_row;
  while (last + 1 < units.size()) {
    ++last;
    if (!units[last].changed()) break;
  }

  ContextPair ctx;
  ctx.first_row = first;
  ctx.last_row = last;
  for (std::size_t r = first; r <= last; ++r) realize(ctx, units[r], drafts, true, true);
  return ctx;
}

ContextPair extract_context(ContextMode mode, std::size_t target_row, std::span<const AlignedUnit> units,
                            Drafts drafts) {
  return mode == ContextMode::simple ? simple_context(target_row, units, drafts)
                                     : longer_context(target_row, units, drafts);
}

}  // namespace desirev
