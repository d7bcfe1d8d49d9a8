#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "desirev/instance.hpp"

namespace desirev {

/// Maps a word to its ordered synonyms. Lookups are case-insensitive. A
/// lexicon loaded from a WordNet database also reduces inflected forms to
/// their base lemmas before lookup.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  /// Flat fixture format: `word<TAB>syn1,syn2,...` per line.
  static SynonymLexicon from_tsv(const std::filesystem::path& path);
  /// Princeton WordNet database directory (index.* / data.* / *.exc).
  static SynonymLexicon from_wordnet(const std::filesystem::path& dir);
  /// Directory means WordNet, file means TSV.
  static SynonymLexicon load(const std::filesystem::path& path);

  /// Appends synonyms for `word`, dropping the word itself and duplicates.
  void add(std::string_view word, const std::vector<std::string>& synonyms);

  /// Ordered synonyms for the word (empty when unknown).
  [[nodiscard]] std::vector<std::string> synonyms(std::string_view word) const;
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

 private:
  struct WordNetData;

  std::unordered_map<std::string, std::vector<std::string>> entries_;
  std::shared_ptr<const WordNetData> wordnet_;
};

/// The built-in English stopword list (also shipped as data/stopwords_en.txt).
const std::unordered_set<std::string>& default_stopwords();
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

enum class WordPick {
  random_word,  ///< one random eligible word per instance
  every_word,   ///< every eligible word, one at a time
};

struct AugmentationPolicy {
  std::size_t min_word_length = 6;
  std::size_t max_synonyms_per_word = 5;
  std::unordered_set<std::string> stopwords = default_stopwords();
  WordPick pick = WordPick::random_word;
};

struct EligibleWord {
  std::size_t position = 0;  ///< token index
  std::string word;
  friend bool operator==(const EligibleWord&, const EligibleWord&) = default;
};

/// Alphabetic tokens of at least `min_word_length` characters that are not
/// stopwords.
std::vector<EligibleWord> eligible_words(std::string_view sentence, const AugmentationPolicy& policy);

/// Synonyms usable as one-token replacements for `word`, capped by the policy.
std::vector<std::string> replacement_candidates(std::string_view word, const SynonymLexicon& lexicon,
                                                const AugmentationPolicy& policy);

/// Which side of the revision pair gets rewritten: the revised sentence unless
/// the revision is a deletion.
bool augments_original_side(const TrainingInstance& instance);

/// Synonym-replacement variants of one instance. Each variant differs from the
/// source in exactly one token; everything else is copied.
std::vector<TrainingInstance> augment_instance(const TrainingInstance& instance, const SynonymLexicon& lexicon,
                                               const AugmentationPolicy& policy, std::uint64_t seed);

/// Originals followed by all variants. Variants carry `source_id`.
std::vector<TrainingInstance> augment_training_fold(std::span<const TrainingInstance> instances,
                                                    const SynonymLexicon& lexicon, const AugmentationPolicy& policy,
                                                    std::uint64_t seed);

/// Throws DataError if any training instance is, or derives from, a test id.
void check_no_leakage(std::span<const TrainingInstance> train, std::span<const TrainingInstance> test);

}  // namespace desirev
