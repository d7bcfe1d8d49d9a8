#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "desirev/augment.hpp"
#include "desirev/error.hpp"
#include "desirev/text.hpp"

namespace desirev {

namespace detail {
extern const std::string_view kStopwordsEn;
}

namespace {

// Lookup order for parts of speech: noun, verb, adjective, adverb.
constexpr std::array<const char*, 4> kPosFiles = {"noun", "verb", "adj", "adv"};

struct Suffix {
  const char* from;
  const char* to;
};

// Inflectional detachment rules, per part of speech.
const std::vector<Suffix> kNounRules = {{"s", ""},     {"ses", "s"},  {"xes", "x"},   {"zes", "z"},
                                        {"ches", "ch"}, {"shes", "sh"}, {"men", "man"}, {"ies", "y"}};
const std::vector<Suffix> kVerbRules = {{"s", ""},   {"ies", "y"}, {"es", "e"},  {"es", ""},
                                        {"ed", "e"}, {"ed", ""},   {"ing", "e"}, {"ing", ""}};
const std::vector<Suffix> kAdjRules = {{"er", ""}, {"est", ""}, {"er", "e"}, {"est", "e"}};
const std::vector<Suffix> kAdvRules = {};

const std::vector<Suffix>& rules_for(std::size_t pos) {
  switch (pos) {
    case 0: return kNounRules;
    case 1: return kVerbRules;
    case 2: return kAdjRules;
    default: return kAdvRules;
  }
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string strip_marker(std::string word) {
  // Adjective entries in data.adj may carry a syntactic marker such as "(a)".
  if (auto p = word.find('('); p != std::string::npos) word.erase(p);
  return word;
}

}  // namespace

struct SynonymLexicon::WordNetData {
  // Per part of speech: lemma -> synset ids in sense order.
  std::array<std::unordered_map<std::string, std::vector<std::size_t>>, 4> index;
  std::array<std::unordered_map<std::string, std::vector<std::string>>, 4> exceptions;
  std::vector<std::vector<std::string>> synsets;

  std::vector<std::string> morphy(const std::string& form, std::size_t pos) const {
    std::vector<std::string> candidates{form};
    if (auto it = exceptions[pos].find(form); it != exceptions[pos].end()) {
      candidates.insert(candidates.end(), it->second.begin(), it->second.end());
    } else {
      for (const auto& rule : rules_for(pos)) {
        if (ends_with(form, rule.from)) {
          candidates.push_back(form.substr(0, form.size() - std::string_view(rule.from).size()) + rule.to);
        }
      }
    }
    std::vector<std::string> out;
    for (auto& c : candidates) {
      if (c.empty() || !index[pos].count(c)) continue;
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
    }
    return out;
  }
};

void SynonymLexicon::add(std::string_view word, const std::vector<std::string>& synonyms) {
  const std::string key = to_lower_ascii(word);
  auto& list = entries_[key];
  for (const auto& s : synonyms) {
    const std::string syn = to_lower_ascii(normalize_whitespace(s));
    if (syn.empty() || syn == key) continue;
    if (std::find(list.begin(), list.end(), syn) == list.end()) list.push_back(syn);
  }
}

std::vector<std::string> SynonymLexicon::synonyms(std::string_view word) const {
  const std::string key = to_lower_ascii(word);
  if (!wordnet_) {
    auto it = entries_.find(key);
    return it == entries_.end() ? std::vector<std::string>{} : it->second;
  }
  std::vector<std::string> out;
  std::vector<std::size_t> seen_synsets;
  for (std::size_t pos = 0; pos < kPosFiles.size(); ++pos) {
    for (const auto& lemma : wordnet_->morphy(key, pos)) {
      for (std::size_t sid : wordnet_->index[pos].at(lemma)) {
        if (std::find(seen_synsets.begin(), seen_synsets.end(), sid) != seen_synsets.end()) continue;
        seen_synsets.push_back(sid);
        for (const auto& w : wordnet_->synsets[sid]) {
          if (w == key || w == lemma) continue;
          if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
        }
      }
    }
  }
  return out;
}

SynonymLexicon SynonymLexicon::from_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path.string());
  SynonymLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected word<TAB>syn1,syn2,...");
    }
    std::vector<std::string> syns;
    std::stringstream ss(line.substr(tab + 1));
    std::string item;
    while (std::getline(ss, item, ',')) syns.push_back(item);
    lex.add(line.substr(0, tab), syns);
  }
  return lex;
}

SynonymLexicon SynonymLexicon::from_wordnet(const std::filesystem::path& dir) {
  auto data = std::make_shared<WordNetData>();
  bool any = false;
  for (std::size_t pos = 0; pos < kPosFiles.size(); ++pos) {
    const auto index_path = dir / (std::string("index.") + kPosFiles[pos]);
    const auto data_path = dir / (std::string("data.") + kPosFiles[pos]);
    std::ifstream index_in(index_path);
    if (!index_in) continue;
    std::ifstream data_in(data_path, std::ios::binary);
    if (!data_in) throw DataError("missing " + data_path.string());
    any = true;

    std::unordered_map<long, std::size_t> offset_to_id;
    std::string line;
    while (std::getline(index_in, line)) {
      if (line.empty() || line[0] == ' ') continue;  // license header
      std::istringstream fields(line);
      std::string lemma, pos_tag;
      std::size_t synset_cnt = 0, p_cnt = 0;
      fields >> lemma >> pos_tag >> synset_cnt >> p_cnt;
      std::string skip;
      for (std::size_t i = 0; i < p_cnt; ++i) fields >> skip;
      fields >> skip >> skip;  // sense_cnt, tagsense_cnt
      std::vector<std::size_t> ids;
      for (std::size_t i = 0; i < synset_cnt; ++i) {
        long offset = 0;
        if (!(fields >> offset)) throw DataError(index_path.string() + ": truncated entry for '" + lemma + "'");
        auto [it, inserted] = offset_to_id.try_emplace(offset, data->synsets.size());
        if (inserted) {
          data_in.clear();
          data_in.seekg(offset);
          std::string record;
          if (!std::getline(data_in, record)) throw DataError(data_path.string() + ": bad offset");
          std::istringstream rec(record);
          long got = 0;
          std::string lex_filenum, ss_type, w_cnt_hex;
          rec >> got >> lex_filenum >> ss_type >> w_cnt_hex;
          if (got != offset) throw DataError(data_path.string() + ": offset mismatch at " + std::to_string(offset));
          const std::size_t w_cnt = std::stoul(w_cnt_hex, nullptr, 16);
          std::vector<std::string> words;
          for (std::size_t w = 0; w < w_cnt; ++w) {
            std::string word, lex_id;
            rec >> word >> lex_id;
            words.push_back(to_lower_ascii(strip_marker(word)));
          }
          data->synsets.push_back(std::move(words));
        }
        ids.push_back(it->second);
      }
      data->index[pos][lemma] = std::move(ids);
    }

    std::ifstream exc_in(dir / (std::string(kPosFiles[pos]) + ".exc"));
    while (exc_in && std::getline(exc_in, line)) {
      std::istringstream fields(line);
      std::string inflected, base;
      fields >> inflected;
      while (fields >> base) data->exceptions[pos][inflected].push_back(base);
    }
  }
  if (!any) throw DataError("no WordNet index files found in " + dir.string());
  SynonymLexicon lex;
  lex.wordnet_ = std::move(data);
  return lex;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return from_wordnet(path);
  return from_tsv(path);
}

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> out;
    std::istringstream in{std::string(detail::kStopwordsEn)};
    std::string w;
    while (in >> w) out.insert(w);
    return out;
  }();
  return words;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword list " + path.string());
  std::unordered_set<std::string> out;
  std::string w;
  while (in >> w) out.insert(to_lower_ascii(w));
  return out;
}

}  // namespace desirev
