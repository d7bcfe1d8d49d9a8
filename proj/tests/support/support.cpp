#include "support.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "desirev/random.hpp"

namespace desirev::testing {

namespace fs = std::filesystem;

fs::path fixture(const std::string& name) { return fs::path(DESIREV_FIXTURES_DIR) / name; }

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("desirev_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

namespace {

constexpr std::array kGoodWords{"because", "evidence", "explains", "connects", "supports", "argument",
                                "poverty", "people",   "families", "achieved", "school",   "assuring"};
constexpr std::array kBadWords{"weather", "football", "pizza",  "holiday", "music",  "purple",
                               "dragon",  "bicycle",  "cookie", "planet",  "guitar", "hospital"};
constexpr std::array kFillerWords{"the", "village", "needed", "water", "and", "food", "for", "many", "years"};

std::string sentence(Rng& rng, const auto& pool, std::size_t words) {
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (!out.empty()) out += ' ';
    out += pool[rng.below(pool.size())];
  }
  out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out + ".";
}

std::string mixed(Rng& rng, const auto& pool, std::size_t words) {
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (!out.empty()) out += ' ';
    out += i % 2 == 0 ? pool[rng.below(pool.size())] : kFillerWords[rng.below(kFillerWords.size())];
  }
  out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out + ".";
}

RevisionCode pick_code(Rng& rng, Purpose purpose, bool desirable) {
  if (purpose == Purpose::evidence) {
    if (desirable) return RevisionCode::relevant;
    constexpr std::array bad{RevisionCode::irrelevant, RevisionCode::repeat, RevisionCode::non_text_based,
                             RevisionCode::minimal_ev};
    return bad[rng.below(bad.size())];
  }
  if (desirable) return RevisionCode::lce;
  constexpr std::array bad{RevisionCode::not_lce, RevisionCode::generic, RevisionCode::commentary,
                           RevisionCode::minimal_re};
  return bad[rng.below(bad.size())];
}

}  // namespace

std::vector<EssayPair> synthetic_corpus(const SyntheticOptions& options) {
  Rng rng(options.seed);
  std::vector<EssayPair> corpus;
  for (std::size_t s = 0; s < options.students; ++s) {
    EssayPair pair;
    pair.student_id = "s" + std::to_string(1000 + s);
    pair.profile = options.profile;
    std::size_t desirable_count = 0;

    auto add_row = [&](const std::string* a, const std::string* b) {
      AlignmentRow row;
      if (a) {
        row.index_a = pair.draft_a.size();
        pair.draft_a.push_back(*a);
      }
      if (b) {
        row.index_b = pair.draft_b.size();
        pair.draft_b.push_back(*b);
      }
      pair.alignment.rows.push_back(row);
      return pair.alignment.rows.size() - 1;
    };

    const std::string first = sentence(rng, kFillerWords, 7);
    add_row(&first, &first);
    for (std::size_t r = 0; r < options.revisions_per_student; ++r) {
      const Purpose purpose = (s + r) % 2 == 0 ? Purpose::evidence : Purpose::reasoning;
      const bool desirable = rng.uniform() < 0.5;
      desirable_count += desirable ? 1 : 0;
      const std::string text = desirable ? mixed(rng, kGoodWords, 8) : mixed(rng, kBadWords, 8);
      const double op = rng.uniform();
      std::size_t row;
      if (op < 0.6) {
        row = add_row(nullptr, &text);
      } else if (op < 0.9) {
        const std::string before = sentence(rng, kFillerWords, 6);
        row = add_row(&before, &text);
      } else {
        row = add_row(&text, nullptr);
      }
      pair.annotations.push_back({row, std::string(to_string(purpose)),
                                  std::string(to_string(pick_code(rng, purpose, desirable)))});
      const std::string filler = sentence(rng, kFillerWords, 6);
      add_row(&filler, &filler);
    }

    switch (options.profile) {
      case Profile::elementary:
        pair.feedback.push_back({"Explain how the evidence helps to make your point.", FeedbackDimension::reasoning,
                                 FeedbackOrigin::awe_catalog});
        pair.improvement = static_cast<int>(std::min<std::size_t>(3, desirable_count + rng.below(2)));
        pair.score_a = 1 + static_cast<int>(rng.below(3));
        pair.score_b = std::min(4, *pair.score_a + 1);
        break;
      case Profile::high_school:
        pair.feedback.push_back({"Add more evidence from the article.", FeedbackDimension::evidence,
                                 FeedbackOrigin::peer_freeform});
        pair.score_a = 1 + static_cast<int>(rng.below(2));
        pair.score_b = std::min<int>(5, *pair.score_a + static_cast<int>(std::min<std::size_t>(3, desirable_count)) -
                                            static_cast<int>(rng.below(2)));
        break;
      case Profile::college:
        pair.score_a = 20 + static_cast<int>(rng.below(5));
        pair.score_b = *pair.score_a + (desirable_count >= 2 ? 2 : -1) + static_cast<int>(rng.below(2));
        break;
    }
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

fs::path write_corpus(const fs::path& path, const std::vector<EssayPair>& corpus) {
  save_corpus(path, corpus);
  return path;
}

std::vector<TrainingInstance> separable_instances(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainingInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    TrainingInstance inst;
    inst.student_id = "p" + std::to_string(i);
    inst.row = 1;
    inst.id = instance_id(inst.student_id, inst.row);
    inst.operation = Operation::added;
    const bool desirable = i % 2 == 0;
    inst.label = desirable ? Desirability::desirable : Desirability::undesirable;
    inst.code = desirable ? RevisionCode::relevant : RevisionCode::irrelevant;
    inst.revised = desirable ? mixed(rng, kGoodWords, 8) : mixed(rng, kBadWords, 8);
    out.push_back(std::move(inst));
  }
  return out;
}

fs::path stopwords_file() { return fs::path(DESIREV_FIXTURES_DIR) / ".." / ".." / "core" / "data" / "stopwords_en.txt"; }

std::vector<std::string> oracle_tokens(const std::string& text) {
  static const std::regex token(R"([^\s!-/:-@\[-`{-~]+|[!-/:-@\[-`{-~])");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), token); it != std::sregex_iterator(); ++it) {
    out.push_back(it->str());
  }
  return out;
}

std::size_t enumerate_variants_oracle(const std::vector<TrainingInstance>& instances, const fs::path& lexicon_tsv,
                                      const fs::path& stopwords_txt) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  std::set<std::string> stop;
  {
    std::ifstream in(stopwords_txt);
    for (std::string w; in >> w;) stop.insert(lower(w));
  }
  std::map<std::string, std::vector<std::string>> lex;
  {
    std::ifstream in(lexicon_tsv);
    for (std::string line; std::getline(in, line);) {
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      std::stringstream ss(line.substr(tab + 1));
      const std::string head = lower(line.substr(0, tab));
      for (std::string syn; std::getline(ss, syn, ',');) {
        syn = lower(syn);
        const bool single = !syn.empty() && std::all_of(syn.begin(), syn.end(), [](unsigned char c) {
          return std::isalpha(c) != 0;
        });
        auto& list = lex[head];
        if (single && syn != head && std::find(list.begin(), list.end(), syn) == list.end()) list.push_back(syn);
      }
    }
  }
  std::size_t total = 0;
  for (const auto& inst : instances) {
    const bool original_side = inst.operation == Operation::deleted || inst.revised.empty();
    for (const auto& tok : oracle_tokens(original_side ? inst.original : inst.revised)) {
      const bool alpha = std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isalpha(c) != 0; });
      if (!alpha || tok.size() < 6 || stop.count(lower(tok))) continue;
      auto it = lex.find(lower(tok));
      if (it != lex.end()) total += std::min<std::size_t>(5, it->second.size());
    }
  }
  return total;
}

}  // namespace desirev::testing
