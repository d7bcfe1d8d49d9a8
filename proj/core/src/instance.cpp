#include "desirev/instance.hpp"

#include <fstream>

#include <json.hpp>

#include "desirev/error.hpp"
#include "desirev/text.hpp"

namespace desirev {

using nlohmann::json;

namespace {

json context_json(const std::optional<ContextTexts>& c) {
  if (!c) return nullptr;
  return {{"context1", c->context1}, {"context2", c->context2}};
}

std::optional<ContextTexts> parse_context(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return ContextTexts{it->at("context1").get<std::string>(), it->at("context2").get<std::string>()};
}

}  // namespace

std::string instance_id(const std::string& student_id, std::size_t row) {
  return student_id + "#" + std::to_string(row);
}

std::vector<TrainingInstance> build_instances(const std::vector<EssayPair>& pairs, const InstanceOptions& options) {
  std::vector<TrainingInstance> out;
  for (const auto& pair : pairs) {
    const auto units = derive_operations(pair.alignment, pair.draft_a, pair.draft_b);
    std::vector<Revision> revisions;
    try {
      revisions = extract_revisions(units, pair.annotations, pair.profile);
    } catch (const DataError& e) {
      throw DataError("student '" + pair.student_id + "': " + e.what());
    }
    const Drafts drafts{pair.draft_a, pair.draft_b};
    const std::string feedback = pair.feedback_text();
    for (const auto& rev : revisions) {
      if (options.purpose && rev.purpose != *options.purpose) continue;
      TrainingInstance inst;
      inst.id = instance_id(pair.student_id, rev.unit.row_index);
      inst.student_id = pair.student_id;
      inst.row = rev.unit.row_index;
      inst.purpose = rev.purpose;
      inst.operation = rev.unit.operation;
      inst.code = rev.code;
      if (rev.unit.index_a) inst.original = pair.draft_a[*rev.unit.index_a];
      if (rev.unit.index_b) inst.revised = pair.draft_b[*rev.unit.index_b];
      if (options.with_contexts) {
        const auto sc = simple_context(rev.unit.row_index, units, drafts);
        const auto lc = longer_context(rev.unit.row_index, units, drafts);
        inst.simple_context = ContextTexts{sc.text1(), sc.text2()};
        inst.longer_context = ContextTexts{lc.text1(), lc.text2()};
      }
      if (!feedback.empty()) inst.feedback = feedback;
      inst.label = rev.label;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::string serialize_instance(const TrainingInstance& inst) {
  json j;
  j["id"] = inst.id;
  j["student_id"] = inst.student_id;
  j["row"] = inst.row;
  j["purpose"] = to_string(inst.purpose);
  j["operation"] = to_string(inst.operation);
  j["code"] = to_string(inst.code);
  j["original"] = inst.original;
  j["revised"] = inst.revised;
  j["simple_context"] = context_json(inst.simple_context);
  j["longer_context"] = context_json(inst.longer_context);
  j["feedback"] = inst.feedback ? json(*inst.feedback) : json(nullptr);
  j["label"] = to_string(inst.label);
  j["source_id"] = inst.source_id ? json(*inst.source_id) : json(nullptr);
  return j.dump();
}

TrainingInstance parse_instance(std::string_view json_line) {
  try {
    const json j = json::parse(json_line);
    TrainingInstance inst;
    inst.id = j.at("id").get<std::string>();
    inst.student_id = j.at("student_id").get<std::string>();
    inst.row = j.at("row").get<std::size_t>();
    inst.purpose = parse_purpose(j.at("purpose").get<std::string>());
    inst.operation = parse_operation(j.at("operation").get<std::string>());
    inst.code = parse_code(j.at("code").get<std::string>(), inst.purpose);
    inst.original = j.at("original").get<std::string>();
    inst.revised = j.at("revised").get<std::string>();
    inst.simple_context = parse_context(j, "simple_context");
    inst.longer_context = parse_context(j, "longer_context");
    if (auto it = j.find("feedback"); it != j.end() && !it->is_null()) inst.feedback = it->get<std::string>();
    inst.label = parse_desirability(j.at("label").get<std::string>());
    if (auto it = j.find("source_id"); it != j.end() && !it->is_null()) inst.source_id = it->get<std::string>();
    return inst;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed instance record: ") + e.what());
  }
}

void save_instances(const std::filesystem::path& path, const std::vector<TrainingInstance>& instances) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& inst : instances) out << serialize_instance(inst) << '\n';
}

std::vector<TrainingInstance> load_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<TrainingInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      out.push_back(parse_instance(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string fingerprint(const std::vector<TrainingInstance>& instances) {
  std::uint64_t h = fnv1a64("");
  for (const auto& inst : instances) {
    h = fnv1a64(inst.id, h);
    h = fnv1a64(to_string(inst.label), h);
    h = fnv1a64(inst.original, h);
    h = fnv1a64(inst.revised, h);
  }
  return hex64(h);
}

}  // namespace desirev
