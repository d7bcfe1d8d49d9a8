#include "desirev/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "desirev/error.hpp"

namespace desirev {

using nlohmann::json;

namespace {

const CorpusProfile kElementary{Profile::elementary, {1, 2}, FeedbackSource::awe, {1, 4}, {0, 3}, false};
const CorpusProfile kHighSchool{Profile::high_school, {1, 2}, FeedbackSource::peer, {0, 5}, {-2, 3}, false};
const CorpusProfile kCollege{Profile::college, {2, 3}, FeedbackSource::none, {15, 33}, {-1, 1}, true};

std::optional<int> opt_int(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw DataError(std::string("field '") + key + "' must be an integer or null");
  return it->get<int>();
}

std::optional<std::size_t> opt_index(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw DataError("alignment index must be a non-negative integer or null");
  return static_cast<std::size_t>(j.get<long long>());
}

json index_json(const std::optional<std::size_t>& i) { return i ? json(*i) : json(nullptr); }

json opt_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

void check_ordered(const AlignmentMap& map, bool side_a, std::size_t n_sentences, const std::string& who) {
  std::vector<int> seen(n_sentences, 0);
  std::optional<std::size_t> prev;
  for (std::size_t r = 0; r < map.rows.size(); ++r) {
    const auto& idx = side_a ? map.rows[r].index_a : map.rows[r].index_b;
    if (!idx) continue;
    const char* draft = side_a ? "draft_a" : "draft_b";
    if (*idx >= n_sentences) {
      throw DataError(who + ": alignment row " + std::to_string(r) + " references " + draft + " sentence " +
                      std::to_string(*idx) + " but " + draft + " has " + std::to_string(n_sentences) +
                      " sentences");
    }
    if (seen[*idx]++) {
      throw DataError(who + ": " + draft + " sentence " + std::to_string(*idx) +
                      " appears in more than one alignment row");
    }
    if (prev && *idx <= *prev) {
      throw DataError(who + ": alignment rows are not in " + draft + " document order at row " +
                      std::to_string(r));
    }
    prev = idx;
  }
  for (std::size_t i = 0; i < n_sentences; ++i) {
    if (!seen[i]) {
      throw DataError(who + ": " + std::string(side_a ? "draft_a" : "draft_b") + " sentence " +
                      std::to_string(i) + " is not covered by the alignment");
    }
  }
}

}  // namespace

const CorpusProfile& profile_info(Profile p) {
  switch (p) {
    case Profile::elementary: return kElementary;
    case Profile::high_school: return kHighSchool;
    case Profile::college: return kCollege;
  }
  throw DataError("unknown profile");
}

std::string_view to_string(Profile p) {
  switch (p) {
    case Profile::elementary: return "elementary";
    case Profile::high_school: return "high_school";
    case Profile::college: return "college";
  }
  return "?";
}

Profile parse_profile(std::string_view s) {
  if (s == "elementary") return Profile::elementary;
  if (s == "high_school" || s == "high-school" || s == "highschool") return Profile::high_school;
  if (s == "college") return Profile::college;
  throw DataError("unknown profile '" + std::string(s) + "'");
}

std::string_view to_string(FeedbackDimension d) {
  switch (d) {
    case FeedbackDimension::evidence: return "evidence";
    case FeedbackDimension::reasoning: return "reasoning";
    case FeedbackDimension::other: return "other";
  }
  return "?";
}

FeedbackDimension parse_feedback_dimension(std::string_view s) {
  if (s == "evidence") return FeedbackDimension::evidence;
  if (s == "reasoning") return FeedbackDimension::reasoning;
  if (s == "other") return FeedbackDimension::other;
  throw DataError("unknown feedback dimension '" + std::string(s) + "'");
}

std::string_view to_string(FeedbackOrigin o) {
  return o == FeedbackOrigin::awe_catalog ? "awe_catalog" : "peer_freeform";
}

FeedbackOrigin parse_feedback_origin(std::string_view s) {
  if (s == "awe_catalog") return FeedbackOrigin::awe_catalog;
  if (s == "peer_freeform") return FeedbackOrigin::peer_freeform;
  throw DataError("unknown feedback origin '" + std::string(s) + "'");
}

std::string EssayPair::feedback_text() const {
  std::string out;
  for (const auto& m : feedback) {
    if (!out.empty()) out.push_back(' ');
    out += m.text;
  }
  return out;
}

void validate_pair(const EssayPair& pair) {
  const std::string who = "student '" + pair.student_id + "'";
  if (pair.student_id.empty()) throw DataError("student_id must be non-empty");
  const auto& info = profile_info(pair.profile);

  for (std::size_t r = 0; r < pair.alignment.rows.size(); ++r) {
    const auto& row = pair.alignment.rows[r];
    if (!row.index_a && !row.index_b)
      throw DataError(who + ": alignment row " + std::to_string(r) + " has neither side");
  }
  check_ordered(pair.alignment, true, pair.draft_a.size(), who);
  check_ordered(pair.alignment, false, pair.draft_b.size(), who);

  for (const auto& m : pair.feedback) {
    if (m.text.empty()) throw DataError(who + ": empty feedback message");
  }
  switch (info.feedback_source) {
    case FeedbackSource::none:
      if (!pair.feedback.empty()) throw DataError(who + ": college pairs carry no feedback");
      break;
    case FeedbackSource::awe:
      for (const auto& m : pair.feedback)
        if (m.origin != FeedbackOrigin::awe_catalog)
          throw DataError(who + ": elementary feedback must originate from the AWE catalog");
      break;
    case FeedbackSource::peer:
      for (const auto& m : pair.feedback) {
        if (m.origin != FeedbackOrigin::peer_freeform)
          throw DataError(who + ": high-school feedback must be peer free-form text");
        if (m.dimension != FeedbackDimension::evidence)
          throw DataError(who + ": only evidence feedback is retained for high-school pairs");
      }
      break;
  }

  for (const auto& [name, score] : {std::pair{"score_a", pair.score_a}, std::pair{"score_b", pair.score_b}}) {
    if (score && !info.score_range.contains(*score)) {
      throw DataError(who + ": " + name + "=" + std::to_string(*score) + " outside profile score range [" +
                      std::to_string(info.score_range.lo) + ", " + std::to_string(info.score_range.hi) + "]");
    }
  }
  if (pair.improvement && !info.improvement_valid(*pair.improvement)) {
    throw DataError(who + ": improvement " + std::to_string(*pair.improvement) + " outside profile range");
  }

  std::set<std::size_t> rows;
  for (const auto& a : pair.annotations) {
    if (a.row >= pair.alignment.rows.size())
      throw DataError(who + ": annotation references missing alignment row " + std::to_string(a.row));
    if (!rows.insert(a.row).second)
      throw DataError(who + ": alignment row " + std::to_string(a.row) + " annotated twice");
    if (a.purpose.empty()) throw DataError(who + ": annotation without purpose at row " + std::to_string(a.row));
  }
}

EssayPair parse_pair(std::string_view json_line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record is not a JSON object");

  EssayPair pair;
  try {
    pair.student_id = j.at("student_id").get<std::string>();
    pair.profile = parse_profile(j.at("profile").get<std::string>());
    pair.draft_a = j.at("draft_a").get<std::vector<std::string>>();
    pair.draft_b = j.at("draft_b").get<std::vector<std::string>>();
    for (const auto& row : j.at("alignment")) {
      if (!row.is_array() || row.size() != 2) throw DataError("alignment rows must be [index_a, index_b]");
      pair.alignment.rows.push_back({opt_index(row[0]), opt_index(row[1])});
    }
    if (auto it = j.find("feedback"); it != j.end() && !it->is_null()) {
      for (const auto& f : *it) {
        FeedbackMessage m;
        m.text = f.at("text").get<std::string>();
        m.dimension = parse_feedback_dimension(f.at("dimension").get<std::string>());
        m.origin = parse_feedback_origin(f.at("origin").get<std::string>());
        // High-school models only see evidence feedback.
        if (pair.profile == Profile::high_school && m.dimension != FeedbackDimension::evidence) continue;
        pair.feedback.push_back(std::move(m));
      }
    }
    pair.score_a = opt_int(j, "score_a");
    pair.score_b = opt_int(j, "score_b");
    pair.improvement = opt_int(j, "improvement");
    if (auto it = j.find("revisions"); it != j.end() && !it->is_null()) {
      for (const auto& r : *it) {
        RowAnnotation a;
        const auto& row = r.at("row");
        if (!row.is_number_integer() || row.get<long long>() < 0)
          throw DataError("revision row must be a non-negative integer");
        a.row = row.get<std::size_t>();
        a.purpose = r.at("purpose").get<std::string>();
        a.code = r.value("code", std::string{});
        pair.annotations.push_back(std::move(a));
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("schema violation: ") + e.what());
  }
  validate_pair(pair);
  return pair;
}

std::string serialize_pair(const EssayPair& pair) {
  json j = json::object();
  // nlohmann::json sorts object keys, which gives the fixed field order.
  j["student_id"] = pair.student_id;
  j["profile"] = to_string(pair.profile);
  j["draft_a"] = pair.draft_a;
  j["draft_b"] = pair.draft_b;
  json rows = json::array();
  for (const auto& r : pair.alignment.rows) rows.push_back(json::array({index_json(r.index_a), index_json(r.index_b)}));
  j["alignment"] = std::move(rows);
  json fb = json::array();
  for (const auto& m : pair.feedback)
    fb.push_back({{"text", m.text}, {"dimension", to_string(m.dimension)}, {"origin", to_string(m.origin)}});
  j["feedback"] = std::move(fb);
  j["score_a"] = opt_json(pair.score_a);
  j["score_b"] = opt_json(pair.score_b);
  j["improvement"] = opt_json(pair.improvement);
  json revs = json::array();
  for (const auto& a : pair.annotations) revs.push_back({{"row", a.row}, {"purpose", a.purpose}, {"code", a.code}});
  j["revisions"] = std::move(revs);
  return j.dump();
}

std::vector<EssayPair> load_corpus(const std::filesystem::path& path, std::optional<Profile> profile) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  std::vector<EssayPair> pairs;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    EssayPair pair;
    try {
      pair = parse_pair(line);
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (profile && pair.profile != *profile) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": record profile '" +
                      std::string(to_string(pair.profile)) + "' does not match requested profile '" +
                      std::string(to_string(*profile)) + "'");
    }
    if (!ids.insert(pair.student_id).second) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": duplicate student_id '" +
                      pair.student_id + "'");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void save_corpus(const std::filesystem::path& path, const std::vector<EssayPair>& pairs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  for (const auto& p : pairs) out << serialize_pair(p) << '\n';
}

int compute_improvement(const EssayPair& pair) {
  const auto& info = profile_info(pair.profile);
  const std::string who = "student '" + pair.student_id + "'";
  int value = 0;
  switch (pair.profile) {
    case Profile::elementary:
      if (!pair.improvement) throw DataError(who + ": elementary pairs need an annotated improvement score");
      value = *pair.improvement;
      break;
    case Profile::high_school:
      if (!pair.score_a || !pair.score_b) throw DataError(who + ": high-school improvement needs both draft scores");
      value = *pair.score_b - *pair.score_a;
      break;
    case Profile::college:
      if (!pair.score_a || !pair.score_b) throw DataError(who + ": college improvement needs both draft scores");
      value = *pair.score_b > *pair.score_a ? 1 : -1;
      break;
  }
  if (!info.improvement_valid(value)) {
    throw DataError(who + ": improvement " + std::to_string(value) + " outside the " +
                    std::string(to_string(pair.profile)) + " range");
  }
  return value;
}

}  // namespace desirev
