#include <map>

#include <gtest/gtest.h>

#include "desirev/corpus.hpp"
#include "desirev/error.hpp"
#include "desirev/revisions.hpp"
#include "support.hpp"

using namespace desirev;
using desirev::testing::fixture;

namespace {

// Desirable/undesirable mapping transcribed from the published mapping table,
// keyed by code name so it does not depend on the library's enum helpers.
const std::map<std::string, std::array<char, 3>> kMappingTable = {
    // elementary, high_school, college
    {"relevant", {'D', 'D', 'D'}},       {"irrelevant", {'U', 'U', 'U'}}, {"repeat", {'U', 'U', 'U'}},
    {"non_text_based", {'U', 'U', 'U'}}, {"minimal_ev", {'U', 'U', 'U'}}, {"lce", {'D', 'D', 'D'}},
    {"paraphrase", {'D', 'U', 'U'}},     {"not_lce", {'U', 'U', 'U'}},    {"generic", {'U', 'U', 'U'}},
    {"commentary", {'U', 'U', 'U'}},     {"minimal_re", {'U', 'U', 'U'}},
};

EssayPair table1() { return load_corpus(fixture("table1.jsonl")).at(0); }

}  // namespace

TEST(Revisions, DesirabilityMappingIsExhaustive) {
  ASSERT_EQ(std::size(kAllCodes), 11u);
  const Profile profiles[] = {Profile::elementary, Profile::high_school, Profile::college};
  int checked = 0;
  for (auto code : kAllCodes) {
    const auto& row = kMappingTable.at(std::string(to_string(code)));
    for (int p = 0; p < 3; ++p) {
      const auto expected = row[p] == 'D' ? Desirability::desirable : Desirability::undesirable;
      EXPECT_EQ(map_desirability(code, profiles[p]), expected) << to_string(code) << " / " << to_string(profiles[p]);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 33);
}

TEST(Revisions, CodeParsing) {
  EXPECT_EQ(parse_code("minimal", Purpose::evidence), RevisionCode::minimal_ev);
  EXPECT_EQ(parse_code("minimal", Purpose::reasoning), RevisionCode::minimal_re);
  EXPECT_THROW(parse_code("minimal"), DataError);
  EXPECT_THROW(parse_code("bogus"), DataError);
  for (auto c : kAllCodes) EXPECT_EQ(parse_code(to_string(c)), c);
  EXPECT_EQ(purpose_of(RevisionCode::repeat), Purpose::evidence);
  EXPECT_EQ(purpose_of(RevisionCode::commentary), Purpose::reasoning);
}

TEST(Revisions, OperationsOnTableOne) {
  const auto pair = table1();
  const auto units = derive_operations(pair.alignment, pair.draft_a, pair.draft_b);
  const std::vector<Operation> expected{Operation::no_change, Operation::added,     Operation::added,
                                        Operation::no_change, Operation::added,     Operation::modify,
                                        Operation::no_change, Operation::modify,    Operation::added};
  ASSERT_EQ(units.size(), expected.size());
  for (std::size_t r = 0; r < units.size(); ++r) {
    EXPECT_EQ(units[r].operation, expected[r]) << "row " << r;
    EXPECT_EQ(units[r].row_index, r);
  }
}

TEST(Revisions, WhitespaceOnlyEditsAreNoChange) {
  const std::vector<std::string> a{"The  plan works."}, b{"The plan works. "};
  AlignmentMap m;
  m.rows = {{0, 0}};
  EXPECT_EQ(derive_operations(m, a, b)[0].operation, Operation::no_change);
}

TEST(Revisions, ExtractsOnlyEvidenceAndReasoning) {
  const auto revisions = extract_revisions(table1());
  ASSERT_EQ(revisions.size(), 3u);
  EXPECT_EQ(revisions[0].unit.row_index, 2u);
  EXPECT_EQ(revisions[0].purpose, Purpose::reasoning);
  EXPECT_EQ(revisions[0].code, RevisionCode::lce);
  EXPECT_EQ(revisions[0].label, Desirability::desirable);
  EXPECT_EQ(revisions[1].unit.row_index, 4u);
  EXPECT_EQ(revisions[1].purpose, Purpose::evidence);
  EXPECT_EQ(revisions[1].label, Desirability::desirable);
  EXPECT_EQ(revisions[2].unit.row_index, 8u);
  EXPECT_EQ(revisions[2].code, RevisionCode::not_lce);
  EXPECT_EQ(revisions[2].label, Desirability::undesirable);
}

TEST(Revisions, AnnotationErrors) {
  auto pair = table1();
  auto unchanged = pair;
  unchanged.annotations = {{0, "evidence", "relevant"}};
  EXPECT_THROW(extract_revisions(unchanged), DataError);

  auto wrong_purpose = pair;
  wrong_purpose.annotations = {{2, "evidence", "lce"}};
  EXPECT_THROW(extract_revisions(wrong_purpose), DataError);

  auto missing_code = pair;
  missing_code.annotations = {{2, "reasoning", ""}};
  EXPECT_THROW(extract_revisions(missing_code), DataError);
}
