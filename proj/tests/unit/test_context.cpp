#include <gtest/gtest.h>

#include "desirev/context.hpp"
#include "desirev/corpus.hpp"
#include "support.hpp"

using namespace desirev;
using desirev::testing::fixture;

namespace {

struct Fixture {
  EssayPair pair = load_corpus(fixture("table1.jsonl")).at(0);
  std::vector<AlignedUnit> units = derive_operations(pair.alignment, pair.draft_a, pair.draft_b);
  Drafts drafts{pair.draft_a, pair.draft_b};
};

using Rows = std::vector<std::size_t>;

}  // namespace

// Worked examples use 1-based rows; the library is 0-based.
TEST(Context, LongerContextForAddedReasoningRow) {
  Fixture f;
  const auto ctx = longer_context(2, f.units, f.drafts);
  EXPECT_EQ(ctx.rows1, (Rows{0, 3}));
  EXPECT_EQ(ctx.rows2, (Rows{0, 1, 2, 3}));
  EXPECT_EQ(ctx.context1, (std::vector<std::string>{f.pair.draft_a[0], f.pair.draft_a[1]}));
  EXPECT_EQ(ctx.context2, (std::vector<std::string>{f.pair.draft_b.begin(), f.pair.draft_b.begin() + 4}));
  EXPECT_EQ(ctx.first_row, 0u);
  EXPECT_EQ(ctx.last_row, 3u);
}

TEST(Context, LongerContextForAddedEvidenceRow) {
  Fixture f;
  const auto ctx = longer_context(4, f.units, f.drafts);
  EXPECT_EQ(ctx.rows1, (Rows{3, 5, 6}));
  EXPECT_EQ(ctx.context1.size(), 3u);
  EXPECT_EQ(ctx.rows2, (Rows{3, 4, 5, 6}));
}

TEST(Context, LongerContextStopsAtDocumentEnd) {
  Fixture f;
  const auto ctx = longer_context(8, f.units, f.drafts);
  EXPECT_EQ(ctx.first_row, 6u);
  EXPECT_EQ(ctx.last_row, 8u);
  EXPECT_EQ(ctx.rows1, (Rows{6, 7}));
  EXPECT_EQ(ctx.rows2, (Rows{6, 7, 8}));
}

TEST(Context, SimpleContextForAddedRowUsesRevisedDraftOnly) {
  Fixture f;
  const auto ctx = simple_context(2, f.units, f.drafts);
  EXPECT_EQ(ctx.rows2, (Rows{1, 3}));
  EXPECT_EQ(ctx.context2, (std::vector<std::string>{f.pair.draft_b[1], f.pair.draft_b[3]}));
  EXPECT_TRUE(ctx.context1.empty());
  EXPECT_EQ(ctx.text2(), f.pair.draft_b[1] + " " + f.pair.draft_b[3]);
}

TEST(Context, SimpleContextAtDocumentEdges) {
  Fixture f;
  const auto last = simple_context(8, f.units, f.drafts);
  EXPECT_EQ(last.rows2, (Rows{7}));
  // Row 1 was added, so it has nothing to contribute on the original side.
  const auto first = simple_context(0, f.units, f.drafts);
  EXPECT_TRUE(first.rows1.empty());
  EXPECT_EQ(first.rows2, (Rows{1}));
}

TEST(Context, SimpleContextForModifiedAndDeletedRows) {
  // rows: 0 same, 1 deleted, 2 modified, 3 same
  EssayPair p;
  p.draft_a = {"A.", "Gone.", "Old.", "D."};
  p.draft_b = {"A.", "New.", "D."};
  p.alignment.rows = {{0, 0}, {1, std::nullopt}, {2, 1}, {3, 2}};
  const auto units = derive_operations(p.alignment, p.draft_a, p.draft_b);
  const Drafts drafts{p.draft_a, p.draft_b};

  const auto del = simple_context(1, units, drafts);
  EXPECT_EQ(del.rows1, (Rows{0, 2}));
  EXPECT_TRUE(del.rows2.empty());
  EXPECT_EQ(del.context1, (std::vector<std::string>{"A.", "Old."}));

  // Deleted row before, unchanged row after: context1 gets both neighbors,
  // context2 only the following one.
  const auto mod = simple_context(2, units, drafts);
  EXPECT_EQ(mod.rows1, (Rows{1, 3}));
  EXPECT_EQ(mod.context1, (std::vector<std::string>{"Gone.", "D."}));
  EXPECT_EQ(mod.rows2, (Rows{3}));
  EXPECT_EQ(mod.context2, (std::vector<std::string>{"D."}));

  const auto lc = longer_context(1, units, drafts);
  EXPECT_EQ(lc.rows1, (Rows{0, 1, 2, 3}));
  EXPECT_EQ(lc.rows2, (Rows{0, 2, 3}));
}

TEST(Context, DispatchMatchesDirectCalls) {
  Fixture f;
  for (std::size_t row : {2u, 4u, 8u}) {
    EXPECT_EQ(extract_context(ContextMode::longer, row, f.units, f.drafts).rows1,
              longer_context(row, f.units, f.drafts).rows1);
    EXPECT_EQ(extract_context(ContextMode::simple, row, f.units, f.drafts).rows2,
              simple_context(row, f.units, f.drafts).rows2);
  }
  EXPECT_EQ(parse_context_mode("sc"), ContextMode::simple);
  EXPECT_EQ(parse_context_mode("lc"), ContextMode::longer);
}
