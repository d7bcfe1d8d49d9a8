#include "desirev/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "desirev/context.hpp"
#include "desirev/error.hpp"

namespace desirev {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string slice_name(Profile profile, Purpose purpose) {
  return std::string(to_string(profile)) + "/" + std::string(to_string(purpose));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json class_json(const ClassScores& c) {
  return {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
}

json cell_json(const CorrelationCell& cell) {
  if (!cell.result) return {{"error", cell.error}};
  return {{"r", cell.result->r},
          {"p", cell.result->p},
          {"n", cell.result->n},
          {"significant", cell.result->significant()}};
}

std::string cell_text(const CorrelationCell& cell) {
  if (!cell.result) return "NA";
  return fixed(cell.result->r, 3) + (cell.result->significant() ? "*" : "");
}

std::vector<std::string> model_order(const std::vector<IntrinsicCell>& cells) {
  std::vector<std::string> names;
  for (const auto& cell : cells) {
    for (const auto& r : cell.results) {
      if (std::find(names.begin(), names.end(), r.model) == names.end()) names.push_back(r.model);
    }
  }
  return names;
}

const CrossValidationResult* find_result(const IntrinsicCell& cell, const std::string& model) {
  for (const auto& r : cell.results) {
    if (r.model == model) return &r;
  }
  return nullptr;
}

}  // namespace

std::string intrinsic_json(const std::vector<IntrinsicCell>& cells, FoldGrouping grouping) {
  json out;
  out["fold_grouping"] = std::string(to_string(grouping));
  if (grouping == FoldGrouping::revision) {
    out["protocol_note"] = "folds are stratified at revision level; revisions of one essay may fall in different folds";
  }
  out["cells"] = json::array();
  for (const auto& cell : cells) {
    json jc{{"profile", to_string(cell.profile)}, {"purpose", to_string(cell.purpose)}, {"models", json::array()}};
    for (const auto& r : cell.results) {
      json jm{{"model", r.model},
              {"mean_macro_f1", r.mean_macro_f1},
              {"mean_precision", r.mean_precision},
              {"mean_recall", r.mean_recall},
              {"folds", json::array()}};
      for (const auto& f : r.folds) {
        jm["folds"].push_back({{"fold", f.fold},
                               {"train_originals", f.train_originals},
                               {"train_total", f.train_total},
                               {"test_size", f.test_size},
                               {"macro_precision", f.scores.macro_precision},
                               {"macro_recall", f.scores.macro_recall},
                               {"macro_f1", f.scores.macro_f1},
                               {"accuracy", f.scores.accuracy},
                               {"desirable", class_json(f.scores.desirable)},
                               {"undesirable", class_json(f.scores.undesirable)}});
      }
      jc["models"].push_back(std::move(jm));
    }
    out["cells"].push_back(std::move(jc));
  }
  return out.dump(2) + "\n";
}

std::string macro_f1_table_csv(const std::vector<IntrinsicCell>& cells) {
  std::string out = "model";
  for (const auto& cell : cells) out += "," + slice_name(cell.profile, cell.purpose);
  out += "\n";
  for (const auto& model : model_order(cells)) {
    out += csv_field(model);
    for (const auto& cell : cells) {
      const auto* r = find_result(cell, model);
      out += "," + (r ? fixed(r->mean_macro_f1, 3) : std::string("--"));
    }
    out += "\n";
  }
  return out;
}

std::string detail_table_csv(const std::vector<IntrinsicCell>& cells) {
  std::string out = "model,profile,purpose,precision,recall,f1\n";
  for (const auto& cell : cells) {
    for (const auto& r : cell.results) {
      out += csv_field(r.model) + "," + std::string(to_string(cell.profile)) + "," +
             std::string(to_string(cell.purpose)) + "," + fixed(r.mean_precision, 3) + "," +
             fixed(r.mean_recall, 3) + "," + fixed(r.mean_macro_f1, 3) + "\n";
    }
  }
  return out;
}

std::string folds_csv(const std::vector<IntrinsicCell>& cells) {
  std::string out = "model,profile,purpose,fold,train_originals,train_total,test_size,precision,recall,macro_f1\n";
  for (const auto& cell : cells) {
    for (const auto& r : cell.results) {
      for (const auto& f : r.folds) {
        out += csv_field(r.model) + "," + std::string(to_string(cell.profile)) + "," +
               std::string(to_string(cell.purpose)) + "," + std::to_string(f.fold + 1) + "," +
               std::to_string(f.train_originals) + "," + std::to_string(f.train_total) + "," +
               std::to_string(f.test_size) + "," + fixed(f.scores.macro_precision) + "," +
               fixed(f.scores.macro_recall) + "," + fixed(f.scores.macro_f1) + "\n";
      }
    }
  }
  return out;
}

std::string extrinsic_json(const std::vector<ExtrinsicCell>& cells) {
  json out = json::array();
  for (const auto& cell : cells) {
    json jc{{"profile", to_string(cell.profile)},
            {"purpose", to_string(cell.purpose)},
            {"students", cell.report.students},
            {"excluded", cell.report.excluded},
            {"normalized_counts", cell.report.normalized},
            {"rows", json::array()}};
    for (const auto& row : cell.report.rows) {
      jc["rows"].push_back({{"model", row.model},
                            {"desirable", cell_json(row.desirable)},
                            {"undesirable", cell_json(row.undesirable)},
                            {"consistent_with_gold", row.consistent_with_gold}});
    }
    out.push_back(std::move(jc));
  }
  return out.dump(2) + "\n";
}

std::string correlation_table_csv(const std::vector<ExtrinsicCell>& cells) {
  std::string out = "model,label";
  for (const auto& cell : cells) out += "," + slice_name(cell.profile, cell.purpose);
  out += "\n";
  std::vector<std::string> models;
  for (const auto& cell : cells) {
    for (const auto& row : cell.report.rows) {
      if (std::find(models.begin(), models.end(), row.model) == models.end()) models.push_back(row.model);
    }
  }
  for (const auto& model : models) {
    for (const bool desirable : {true, false}) {
      out += csv_field(model) + (desirable ? ",desirable" : ",undesirable");
      for (const auto& cell : cells) {
        const ExtrinsicRow* found = nullptr;
        for (const auto& row : cell.report.rows) {
          if (row.model == model) found = &row;
        }
        out += ",";
        if (found) out += cell_text(desirable ? found->desirable : found->undesirable);
        else out += "--";
      }
      out += "\n";
    }
  }
  return out;
}

std::string predictions_jsonl(const std::vector<InstancePrediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    json j{{"id", p.id},
           {"student_id", p.student_id},
           {"row", p.row + 1},
           {"fold", p.fold + 1},
           {"gold", to_string(p.gold)},
           {"predicted", to_string(p.predicted)},
           {"probability", p.probability}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<InstancePrediction> parse_predictions_jsonl(const std::string& text) {
  std::vector<InstancePrediction> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      InstancePrediction p;
      p.id = j.at("id").get<std::string>();
      p.student_id = j.at("student_id").get<std::string>();
      const auto row = j.at("row").get<std::size_t>();
      const auto fold = j.at("fold").get<std::size_t>();
      if (row == 0 || fold == 0) throw DataError("row and fold are 1-based");
      p.row = row - 1;
      p.fold = fold - 1;
      p.gold = parse_desirability(j.at("gold").get<std::string>());
      p.predicted = parse_desirability(j.at("predicted").get<std::string>());
      p.probability = j.at("probability").get<double>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw DataError("predictions line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string contexts_jsonl(const std::vector<EssayPair>& corpus, ContextMode mode, std::optional<Purpose> purpose) {
  std::string out;
  for (const auto& pair : corpus) {
    const auto units = derive_operations(pair.alignment, pair.draft_a, pair.draft_b);
    for (const auto& rev : extract_revisions(pair)) {
      if (purpose && rev.purpose != *purpose) continue;
      const auto ctx = extract_context(mode, rev.unit.row_index, units, Drafts{pair.draft_a, pair.draft_b});
      json j{{"student_id", pair.student_id},
             {"row", rev.unit.row_index + 1},
             {"context1", ctx.text1()},
             {"context2", ctx.text2()}};
      out += j.dump() + "\n";
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace desirev
