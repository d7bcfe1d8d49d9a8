#include <gtest/gtest.h>

#include "desirev/corpus.hpp"
#include "desirev/error.hpp"
#include "desirev/instance.hpp"
#include "support.hpp"

using namespace desirev;
using desirev::testing::fixture;
using desirev::testing::scratch_dir;

TEST(Instance, BuildsTableOneRevisions) {
  const auto corpus = load_corpus(fixture("table1.jsonl"));
  const auto all = build_instances(corpus);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].id, "table1#2");
  EXPECT_EQ(all[0].original, "");
  EXPECT_EQ(all[0].revised, corpus[0].draft_b[2]);
  ASSERT_TRUE(all[0].longer_context.has_value());
  EXPECT_EQ(all[0].longer_context->context1, corpus[0].draft_a[0] + " " + corpus[0].draft_a[1]);
  ASSERT_TRUE(all[0].simple_context.has_value());
  EXPECT_EQ(all[0].simple_context->context1, "");
  ASSERT_TRUE(all[0].feedback.has_value());
  EXPECT_EQ(*all[0].feedback, corpus[0].feedback_text());

  const auto reasoning = build_instances(corpus, {Purpose::reasoning, true});
  ASSERT_EQ(reasoning.size(), 2u);
  EXPECT_EQ(reasoning[0].label, Desirability::desirable);
  EXPECT_EQ(reasoning[1].label, Desirability::undesirable);

  const auto bare = build_instances(corpus, {std::nullopt, false});
  EXPECT_FALSE(bare[0].longer_context.has_value());
}

TEST(Instance, CollegeInstancesCarryNoFeedback) {
  const auto corpus = desirev::testing::synthetic_corpus({5, 2, Profile::college, 3});
  for (const auto& inst : build_instances(corpus)) EXPECT_FALSE(inst.feedback.has_value());
}

TEST(Instance, JsonlRoundTrip) {
  auto instances = build_instances(desirev::testing::synthetic_corpus({10, 3, Profile::elementary, 9}));
  instances[0].source_id = "other#1";
  const auto path = scratch_dir("instances") / "i.jsonl";
  save_instances(path, instances);
  EXPECT_EQ(load_instances(path), instances);
  EXPECT_EQ(parse_instance(serialize_instance(instances[1])), instances[1]);
  EXPECT_THROW(parse_instance("{}"), DataError);
}

TEST(Instance, FingerprintTracksContent) {
  auto instances = build_instances(load_corpus(fixture("table1.jsonl")));
  const auto a = fingerprint(instances);
  EXPECT_EQ(a, fingerprint(instances));
  instances[1].label = Desirability::undesirable;
  EXPECT_NE(a, fingerprint(instances));
}
