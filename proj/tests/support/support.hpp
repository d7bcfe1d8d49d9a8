#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "desirev/corpus.hpp"
#include "desirev/instance.hpp"

namespace desirev::testing {

std::filesystem::path fixture(const std::string& name);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

struct SyntheticOptions {
  std::size_t students = 50;
  std::size_t revisions_per_student = 3;
  Profile profile = Profile::elementary;
  std::uint64_t seed = 7;
};

/// Essay pairs whose revision labels are recoverable from the revised text:
/// desirable sentences draw on one vocabulary and undesirable ones on
/// another. Purposes alternate evidence/reasoning within each essay and the
/// improvement score tracks the number of desirable revisions.
std::vector<EssayPair> synthetic_corpus(const SyntheticOptions& options);

/// Writes a corpus to `path` and returns the path.
std::filesystem::path write_corpus(const std::filesystem::path& path, const std::vector<EssayPair>& corpus);

/// Same-shape instances with no context, built directly (no corpus).
std::vector<TrainingInstance> separable_instances(std::size_t n, std::uint64_t seed);

/// Independent count of synonym-replacement variants when every eligible word
/// is used: for each instance, over the tokens of the rewritten side that are
/// alphabetic, at least six letters long and not stopwords, the number of
/// single-word synonyms in the TSV lexicon, capped at five per word.
/// Reads the lexicon and stopword files itself.
std::size_t enumerate_variants_oracle(const std::vector<TrainingInstance>& instances,
                                      const std::filesystem::path& lexicon_tsv,
                                      const std::filesystem::path& stopwords_txt);

std::filesystem::path stopwords_file();

/// Whitespace/punctuation token split used by the test oracles.
std::vector<std::string> oracle_tokens(const std::string& text);

}  // namespace desirev::testing
