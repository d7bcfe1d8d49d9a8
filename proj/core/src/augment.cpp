#include "desirev/augment.hpp"

#include <cctype>
#include <random>
#include <unordered_set>

#include "desirev/error.hpp"
#include "desirev/text.hpp"

namespace desirev {

namespace {

std::string match_case(const std::string& replacement, std::string_view original) {
  std::string out = replacement;
  if (!original.empty() && std::isupper(static_cast<unsigned char>(original.front())) && !out.empty()) {
    out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
  }
  return out;
}

std::uint64_t instance_seed(std::uint64_t seed, const std::string& id) {
  return fnv1a64(id, seed ^ 0x9e3779b97f4a7c15ULL);
}

}  // namespace

std::vector<EligibleWord> eligible_words(std::string_view sentence, const AugmentationPolicy& policy) {
  std::vector<EligibleWord> out;
  const auto tokens = tokenize_words(sentence);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens[i].text;
    if (tok.size() < policy.min_word_length || !is_alpha_word(tok)) continue;
    if (policy.stopwords.count(to_lower_ascii(tok))) continue;
    out.push_back({i, tok});
  }
  return out;
}

std::vector<std::string> replacement_candidates(std::string_view word, const SynonymLexicon& lexicon,
                                                const AugmentationPolicy& policy) {
  std::vector<std::string> out;
  const std::string lower = to_lower_ascii(word);
  for (const auto& syn : lexicon.synonyms(word)) {
    if (out.size() >= policy.max_synonyms_per_word) break;
    // Multi-word and punctuated synonyms would change the token count.
    if (!is_alpha_word(syn) || to_lower_ascii(syn) == lower) continue;
    out.push_back(syn);
  }
  return out;
}

bool augments_original_side(const TrainingInstance& instance) {
  return instance.operation == Operation::deleted || instance.revised.empty();
}

std::vector<TrainingInstance> augment_instance(const TrainingInstance& instance, const SynonymLexicon& lexicon,
                                               const AugmentationPolicy& policy, std::uint64_t seed) {
  const bool original_side = augments_original_side(instance);
  const std::string& text = original_side ? instance.original : instance.revised;
  const auto tokens = tokenize_words(text);

  struct Choice {
    std::size_t position;
    std::vector<std::string> synonyms;
  };
  std::vector<Choice> choices;
  for (const auto& w : eligible_words(text, policy)) {
    auto syns = replacement_candidates(w.word, lexicon, policy);
    if (!syns.empty()) choices.push_back({w.position, std::move(syns)});
  }
  if (choices.empty()) return {};

  if (policy.pick == WordPick::random_word) {
    std::mt19937_64 rng(instance_seed(seed, instance.id));
    std::uniform_int_distribution<std::size_t> dist(0, choices.size() - 1);
    Choice picked = std::move(choices[dist(rng)]);
    choices.clear();
    choices.push_back(std::move(picked));
  }

  std::vector<TrainingInstance> out;
  for (const auto& choice : choices) {
    const auto& tok = tokens[choice.position];
    for (const auto& syn : choice.synonyms) {
      TrainingInstance variant = instance;
      std::string rewritten = text.substr(0, tok.begin) + match_case(syn, tok.text) + text.substr(tok.end);
      (original_side ? variant.original : variant.revised) = std::move(rewritten);
      variant.source_id = instance.id;
      variant.id = instance.id + "~aug" + std::to_string(out.size());
      out.push_back(std::move(variant));
    }
  }
  return out;
}

std::vector<TrainingInstance> augment_training_fold(std::span<const TrainingInstance> instances,
                                                    const SynonymLexicon& lexicon, const AugmentationPolicy& policy,
                                                    std::uint64_t seed) {
  std::vector<TrainingInstance> out(instances.begin(), instances.end());
  for (const auto& inst : instances) {
    if (inst.is_augmented()) continue;
    auto variants = augment_instance(inst, lexicon, policy, seed);
    out.insert(out.end(), std::make_move_iterator(variants.begin()), std::make_move_iterator(variants.end()));
  }
  return out;
}

void check_no_leakage(std::span<const TrainingInstance> train, std::span<const TrainingInstance> test) {
  std::unordered_set<std::string> test_ids;
  for (const auto& t : test) test_ids.insert(t.origin_id());
  for (const auto& t : train) {
    if (test_ids.count(t.origin_id())) {
      throw DataError("fold leakage: training instance '" + t.id + "' derives from test instance '" +
                      t.origin_id() + "'");
    }
  }
}

}  // namespace desirev
