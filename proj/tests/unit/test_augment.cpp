#include <cstdio>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "desirev/augment.hpp"
#include "desirev/error.hpp"
#include "support.hpp"

using namespace desirev;
using namespace desirev::testing;

namespace {

TrainingInstance added(const std::string& id, const std::string& revised,
                       Desirability label = Desirability::desirable) {
  TrainingInstance inst;
  inst.id = id;
  inst.student_id = id;
  inst.operation = Operation::added;
  inst.revised = revised;
  inst.label = label;
  inst.feedback = "Explain the evidence.";
  inst.longer_context = ContextTexts{"before", "after"};
  return inst;
}

SynonymLexicon toy_lexicon() { return SynonymLexicon::from_tsv(fixture("lexicon.tsv")); }

// Positions at which two token sequences differ.
std::vector<std::size_t> diff_positions(const std::string& a, const std::string& b) {
  const auto ta = oracle_tokens(a), tb = oracle_tokens(b);
  if (ta.size() != tb.size()) return {static_cast<std::size_t>(-1)};
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] != tb[i]) out.push_back(i);
  }
  return out;
}

/// Writes a small WordNet-format database, computing each synset's byte
/// offset the way the real data files store them.
void write_wordnet(const std::filesystem::path& dir) {
  struct Synset {
    std::vector<std::string> words;
    long offset = 0;
  };
  auto write_pos = [&](const std::string& pos, char tag, std::vector<Synset> synsets,
                       const std::vector<std::pair<std::string, std::vector<int>>>& index) {
    std::string data = "  1 This software and database is being provided to you under a license.\n";
    for (auto& s : synsets) {
      s.offset = static_cast<long>(data.size());
      char head[64];
      std::snprintf(head, sizeof head, "%08ld 29 %c %02zx", s.offset, tag, s.words.size());
      std::string line = head;
      for (const auto& w : s.words) line += " " + w + " 0";
      line += " 000 | a gloss\n";
      data += line;
    }
    std::ofstream(dir / ("data." + pos), std::ios::binary) << data;
    std::string idx = "  1 This software and database is being provided to you under a license.\n";
    for (const auto& [lemma, ids] : index) {
      idx += lemma + " " + tag + " " + std::to_string(ids.size()) + " 1 @ " + std::to_string(ids.size()) + " 0";
      for (int id : ids) {
        char off[16];
        std::snprintf(off, sizeof off, " %08ld", synsets[static_cast<std::size_t>(id)].offset);
        idx += off;
      }
      idx += "\n";
    }
    std::ofstream(dir / ("index." + pos)) << idx;
  };
  write_pos("noun", 'n',
            {{{"people", "citizenry", "populace", "public"}}, {{"school", "schooling"}}, {{"school", "shoal"}},
             {{"care", "attention", "take_care"}}},
            {{"care", {3}}, {"people", {0}}, {"school", {1, 2}}});
  write_pos("verb", 'v', {{{"achieve", "accomplish", "attain", "reach"}}, {{"teach", "instruct", "Learn"}}},
            {{"achieve", {0}}, {"teach", {1}}});
  std::ofstream(dir / "verb.exc") << "taught teach\n";
}

}  // namespace

TEST(Augment, EligibleWords) {
  const AugmentationPolicy policy;
  const auto words = eligible_words(
      "If the plans are going to be achieved in 2025 than their plans will be achieved in only 7 more years", policy);
  std::vector<std::string> found;
  for (const auto& w : words) found.push_back(w.word);
  EXPECT_NE(std::find(found.begin(), found.end(), "achieved"), found.end());
  EXPECT_EQ(std::find(found.begin(), found.end(), "2025"), found.end());
  EXPECT_TRUE(eligible_words("so it is to be", policy).empty());

  const auto one = eligible_words("it is in the school", policy);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].word, "school");
  EXPECT_EQ(one[0].position, 4u);
}

TEST(Augment, StopwordListMatchesShippedFile) {
  const auto file = load_stopwords(stopwords_file());
  EXPECT_EQ(file, default_stopwords());
  EXPECT_EQ(file.size(), 179u);
  EXPECT_TRUE(file.count("themselves"));
}

TEST(Augment, SynonymReplacementExample) {
  SynonymLexicon lex;
  lex.add("achieve", {"accomplish"});
  const auto variants = augment_instance(added("a#1", "They will achieve it."), lex, {}, 1);
  ASSERT_EQ(variants.size(), 1u);
  EXPECT_EQ(variants[0].revised, "They will accomplish it.");
}

TEST(Augment, CapsAtFiveSynonymsInLexiconOrder) {
  SynonymLexicon lex;
  lex.add("poverty", {"want", "penury", "privation", "impoverishment", "indigence", "need", "poorness"});
  EXPECT_EQ(lex.synonyms("POVERTY").size(), 7u);
  const auto variants = augment_instance(added("a#1", "Poverty hurts."), lex, {}, 3);
  ASSERT_EQ(variants.size(), 5u);
  const std::vector<std::string> expected{"Want hurts.", "Penury hurts.", "Privation hurts.", "Impoverishment hurts.",
                                          "Indigence hurts."};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(variants[i].revised, expected[i]);
}

TEST(Augment, NoEligibleWordsGivesNothing) {
  EXPECT_TRUE(augment_instance(added("a#1", "so it is to be"), toy_lexicon(), {}, 1).empty());
  EXPECT_TRUE(augment_training_fold({}, toy_lexicon(), {}, 1).empty());
}

TEST(Augment, SkipsMultiWordAndSelfSynonyms) {
  SynonymLexicon lex;
  lex.add("treated", {"cared for", "handled", "treated"});
  EXPECT_EQ(replacement_candidates("treated", lex, {}), (std::vector<std::string>{"handled"}));
}

TEST(Augment, VariantsCopyEverythingButOneToken) {
  const auto lex = toy_lexicon();
  const auto corpus = synthetic_corpus({30, 3, Profile::elementary, 11});
  const auto instances = build_instances(corpus);
  std::size_t produced = 0;
  for (const auto& inst : instances) {
    for (const auto& v : augment_instance(inst, lex, {}, 5)) {
      ++produced;
      EXPECT_EQ(v.label, inst.label);
      EXPECT_EQ(v.purpose, inst.purpose);
      EXPECT_EQ(v.simple_context, inst.simple_context);
      EXPECT_EQ(v.longer_context, inst.longer_context);
      EXPECT_EQ(v.feedback, inst.feedback);
      EXPECT_EQ(v.source_id, inst.id);
      const bool original_side = augments_original_side(inst);
      EXPECT_EQ(original_side ? v.revised : v.original, original_side ? inst.revised : inst.original);
      const auto diffs = original_side ? diff_positions(inst.original, v.original)
                                       : diff_positions(inst.revised, v.revised);
      EXPECT_EQ(diffs.size(), 1u) << inst.revised << " | " << v.revised;
    }
  }
  EXPECT_GT(produced, 0u);
}

TEST(Augment, RandomPickUsesOneWordPerInstance) {
  const auto lex = toy_lexicon();
  const auto instances = build_instances(synthetic_corpus({30, 3, Profile::elementary, 12}));
  for (const auto& inst : instances) {
    const auto variants = augment_instance(inst, lex, {}, 9);
    EXPECT_LE(variants.size(), 5u);
    std::set<std::size_t> positions;
    for (const auto& v : variants) {
      const auto d = augments_original_side(inst) ? diff_positions(inst.original, v.original)
                                                  : diff_positions(inst.revised, v.revised);
      positions.insert(d.at(0));
    }
    EXPECT_LE(positions.size(), 1u);
    EXPECT_EQ(augment_instance(inst, lex, {}, 9), variants);
  }
}

TEST(Augment, EveryWordCountMatchesEnumerationOracle) {
  const auto instances = build_instances(synthetic_corpus({40, 3, Profile::elementary, 13}));
  AugmentationPolicy policy;
  policy.pick = WordPick::every_word;
  const auto out = augment_training_fold(instances, toy_lexicon(), policy, 4);
  const std::size_t oracle = enumerate_variants_oracle(instances, fixture("lexicon.tsv"), stopwords_file());
  EXPECT_GT(oracle, 0u);
  EXPECT_EQ(out.size(), instances.size() + oracle);
  for (std::size_t i = 0; i < instances.size(); ++i) EXPECT_EQ(out[i], instances[i]);
}

TEST(Augment, DeletedRevisionsRewriteTheOriginalSide) {
  TrainingInstance inst = added("d#1", "");
  inst.operation = Operation::deleted;
  inst.original = "The hospital closed.";
  EXPECT_TRUE(augments_original_side(inst));
  const auto variants = augment_instance(inst, toy_lexicon(), {}, 1);
  ASSERT_EQ(variants.size(), 2u);
  EXPECT_EQ(variants[0].original, "The infirmary closed.");
  EXPECT_EQ(variants[1].original, "The clinic closed.");
}

TEST(Augment, LeakageGuard) {
  const auto a = added("s1#1", "The people need school."), b = added("s2#1", "Poverty matters.");
  const auto train = augment_training_fold(std::vector{a}, toy_lexicon(), {}, 1);
  ASSERT_GT(train.size(), 1u);
  EXPECT_NO_THROW(check_no_leakage(train, std::vector{b}));
  EXPECT_THROW(check_no_leakage(train, std::vector{a}), DataError);
  auto leaked = train;
  leaked.back().source_id = "s2#1";
  EXPECT_THROW(check_no_leakage(leaked, std::vector{b}), DataError);
}

TEST(Augment, WordNetDatabase) {
  const auto dir = scratch_dir("wordnet");
  write_wordnet(dir);
  const auto lex = SynonymLexicon::load(dir);
  EXPECT_EQ(lex.synonyms("achieved"), (std::vector<std::string>{"accomplish", "attain", "reach"}));
  EXPECT_EQ(lex.synonyms("People"), (std::vector<std::string>{"citizenry", "populace", "public"}));
  EXPECT_EQ(lex.synonyms("schools"), (std::vector<std::string>{"schooling", "shoal"}));
  EXPECT_EQ(lex.synonyms("taught"), (std::vector<std::string>{"instruct", "learn"}));
  EXPECT_TRUE(lex.synonyms("unknown").empty());
  EXPECT_EQ(replacement_candidates("care", lex, {}), (std::vector<std::string>{"attention"}));
  EXPECT_THROW(SynonymLexicon::from_wordnet(scratch_dir("wordnet_empty")), DataError);
}
