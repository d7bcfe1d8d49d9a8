#include "desirev/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <json.hpp>

#include "desirev/encode.hpp"
#include "desirev/error.hpp"
#include "desirev/random.hpp"
#include "desirev/text.hpp"

#ifndef DESIREV_VERSION
#define DESIREV_VERSION "0.0.0"
#endif

namespace desirev {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view version() { return DESIREV_VERSION; }

std::string_view to_string(WordPick pick) { return pick == WordPick::random_word ? "random_word" : "every_word"; }

WordPick parse_word_pick(std::string_view s) {
  if (s == "random_word") return WordPick::random_word;
  if (s == "every_word") return WordPick::every_word;
  throw ConfigError("unknown augment_pick '" + std::string(s) + "' (expected random_word or every_word)");
}

namespace {

const std::set<std::string> kConfigKeys{
    "corpus", "profile",  "purpose", "variants", "logreg_baseline", "vectors", "logreg_c", "hyper",
    "seed",   "lexicon",  "augment", "augment_pick", "encoder", "folds", "fold_grouping", "normalize_counts", "out"};

const std::set<std::string> kHyperKeys{"learning_rate", "batch_size",        "epochs",        "hidden_size",
                                       "dense_size",    "lstm_dropout",      "recurrent_dropout",
                                       "dense_dropout", "class_weights"};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

template <typename F>
auto with_config_errors(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

/// Runs `f`, prefixing any library error with the stage name.
template <typename F>
auto stage(const char* name, F&& f) {
  const std::string tag = std::string("[") + name + "] ";
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(tag + e.what());
  } catch (const DataError& e) {
    throw DataError(tag + e.what());
  } catch (const TrainingError& e) {
    throw TrainingError(tag + e.what());
  }
}

json hyper_json(const HyperParams& h) {
  return {{"learning_rate", h.learning_rate}, {"batch_size", h.batch_size},
          {"epochs", h.epochs},               {"hidden_size", h.hidden_size},
          {"dense_size", h.dense_size},       {"lstm_dropout", h.lstm_dropout},
          {"recurrent_dropout", h.recurrent_dropout}, {"dense_dropout", h.dense_dropout},
          {"class_weights", h.class_weights}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.count(key)) throw ConfigError("unknown config field '" + key + "'");
  }

  ExperimentConfig c;
  if (!j.contains("corpus")) throw ConfigError("config field 'corpus' is required");
  if (!j.contains("profile")) throw ConfigError("config field 'profile' is required");
  c.corpus = resolve(base_dir, get<std::string>(j, "corpus"));
  with_config_errors([&] {
    c.profile = parse_profile(get<std::string>(j, "profile"));
    if (j.contains("purpose")) {
      c.purposes.clear();
      if (j["purpose"].is_string()) {
        c.purposes.push_back(parse_purpose(get<std::string>(j, "purpose")));
      } else {
        for (const auto& p : get<std::vector<std::string>>(j, "purpose")) c.purposes.push_back(parse_purpose(p));
      }
    }
    if (j.contains("variants")) {
      c.variants.clear();
      for (const auto& v : get<std::vector<std::string>>(j, "variants")) c.variants.push_back(parse_variant(v));
    }
    if (j.contains("fold_grouping")) c.grouping = parse_fold_grouping(get<std::string>(j, "fold_grouping"));
    if (j.contains("augment_pick")) c.augment_pick = parse_word_pick(get<std::string>(j, "augment_pick"));
    return 0;
  });
  if (j.contains("logreg_baseline")) c.logreg_baseline = get<bool>(j, "logreg_baseline");
  if (j.contains("vectors")) c.vectors = resolve(base_dir, get<std::string>(j, "vectors"));
  if (j.contains("logreg_c")) c.logreg_c = get<double>(j, "logreg_c");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("lexicon")) c.lexicon = resolve(base_dir, get<std::string>(j, "lexicon"));
  if (j.contains("augment")) c.augment = get<bool>(j, "augment");
  if (j.contains("encoder")) c.encoder = get<std::string>(j, "encoder");
  if (j.contains("folds")) c.folds = get<std::size_t>(j, "folds");
  if (j.contains("normalize_counts")) c.normalize_counts = get<bool>(j, "normalize_counts");
  if (j.contains("out")) c.out = resolve(base_dir, get<std::string>(j, "out"));
  else c.out = resolve(base_dir, "out");

  if (j.contains("hyper")) {
    const json& h = j["hyper"];
    if (!h.is_object()) throw ConfigError("config field 'hyper' must be an object");
    for (const auto& [key, value] : h.items()) {
      if (!kHyperKeys.count(key)) throw ConfigError("unknown hyper field '" + key + "'");
    }
    auto& hp = c.hyper;
    if (h.contains("learning_rate")) hp.learning_rate = get<double>(h, "learning_rate");
    if (h.contains("batch_size")) hp.batch_size = get<std::size_t>(h, "batch_size");
    if (h.contains("epochs")) hp.epochs = get<std::size_t>(h, "epochs");
    if (h.contains("hidden_size")) hp.hidden_size = get<std::size_t>(h, "hidden_size");
    if (h.contains("dense_size")) hp.dense_size = get<std::size_t>(h, "dense_size");
    if (h.contains("lstm_dropout")) hp.lstm_dropout = get<double>(h, "lstm_dropout");
    if (h.contains("recurrent_dropout")) hp.recurrent_dropout = get<double>(h, "recurrent_dropout");
    if (h.contains("dense_dropout")) hp.dense_dropout = get<double>(h, "dense_dropout");
    if (h.contains("class_weights")) hp.class_weights = get<bool>(h, "class_weights");
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["corpus"] = c.corpus.generic_string();
  j["profile"] = to_string(c.profile);
  j["purpose"] = json::array();
  for (auto p : c.purposes) j["purpose"].push_back(to_string(p));
  j["variants"] = json::array();
  for (auto v : c.variants) j["variants"].push_back(to_string(v));
  j["logreg_baseline"] = c.logreg_baseline;
  if (c.vectors) j["vectors"] = c.vectors->generic_string();
  j["logreg_c"] = c.logreg_c;
  j["hyper"] = hyper_json(c.hyper);
  j["seed"] = c.seed;
  if (c.lexicon) j["lexicon"] = c.lexicon->generic_string();
  j["augment"] = c.augment;
  j["augment_pick"] = to_string(c.augment_pick);
  j["encoder"] = c.encoder;
  j["folds"] = c.folds;
  j["fold_grouping"] = to_string(c.grouping);
  j["normalize_counts"] = c.normalize_counts;
  j["out"] = c.out.generic_string();
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& config) { return hex64(fnv1a64(config_to_json(config))); }

void validate_config(const ExperimentConfig& c) {
  if (!fs::is_regular_file(c.corpus)) throw ConfigError("corpus file not found: " + c.corpus.string());
  if (c.lexicon && !fs::exists(*c.lexicon)) throw ConfigError("lexicon not found: " + c.lexicon->string());
  if (c.vectors && !fs::is_regular_file(*c.vectors)) throw ConfigError("vector table not found: " + c.vectors->string());
  if (c.logreg_baseline && !c.vectors) throw ConfigError("logreg_baseline requires 'vectors'");
  if (c.purposes.empty()) throw ConfigError("at least one purpose is required");
  if (c.variants.empty() && !c.logreg_baseline) throw ConfigError("no model requested");
  if (c.folds < 2) throw ConfigError("folds must be at least 2");
  if (c.encoder.empty()) throw ConfigError("encoder id is empty");
  const auto& h = c.hyper;
  if (!(h.learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (h.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (h.hidden_size == 0 || h.dense_size == 0) throw ConfigError("layer sizes must be positive");
  for (double d : {h.lstm_dropout, h.recurrent_dropout, h.dense_dropout}) {
    if (!(d >= 0 && d < 1)) throw ConfigError("dropout rates must lie in [0, 1)");
  }
  if (!(c.logreg_c > 0)) throw ConfigError("logreg_c must be positive");
  std::set<ModelVariant> seen;
  for (auto v : c.variants) {
    if (!seen.insert(v).second) throw ConfigError("variant listed twice: " + std::string(to_string(v)));
    with_config_errors([&] {
      check_variant_for_profile(v, c.profile);
      return 0;
    });
  }
}

std::shared_ptr<const SynonymLexicon> load_lexicon(const ExperimentConfig& config) {
  if (!config.augment || !config.lexicon) return nullptr;
  return std::make_shared<const SynonymLexicon>(SynonymLexicon::load(*config.lexicon));
}

AugmentationPolicy make_policy(const ExperimentConfig& config) {
  AugmentationPolicy policy;
  policy.pick = config.augment_pick;
  return policy;
}

std::string slice_problem(std::span<const TrainingInstance> instances, std::size_t k) {
  std::size_t desirable = 0;
  for (const auto& inst : instances) desirable += inst.label == Desirability::desirable ? 1 : 0;
  if (instances.size() < k) {
    return std::to_string(instances.size()) + " instances for " + std::to_string(k) + " folds";
  }
  if (desirable == 0 || desirable == instances.size()) return "only one class present";
  return {};
}

RunSummary run_experiment(const ExperimentConfig& config, std::ostream* log, RunScope scope) {
  auto say = [&](const std::string& line) {
    if (log) *log << line << std::endl;
  };
  RunSummary summary;
  summary.out = config.out;
  auto emit = [&](const std::string& rel, const std::string& content) {
    write_text(config.out / rel, content);
    summary.artifacts.push_back(rel);
  };

  stage("validate", [&] {
    validate_config(config);
    return 0;
  });

  const auto corpus = stage("ingest", [&] { return load_corpus(config.corpus, config.profile); });
  say("ingest: " + std::to_string(corpus.size()) + " essay pairs");

  std::vector<std::vector<TrainingInstance>> slices;
  stage("extract", [&] {
    std::vector<TrainingInstance> all;
    for (auto purpose : config.purposes) {
      InstanceOptions opts;
      opts.purpose = purpose;
      slices.push_back(build_instances(corpus, opts));
      all.insert(all.end(), slices.back().begin(), slices.back().end());
      say("extract: " + std::string(to_string(purpose)) + " " + std::to_string(slices.back().size()) + " revisions");
    }
    save_instances(config.out / "instances.jsonl", all);
    summary.artifacts.push_back("instances.jsonl");
    return 0;
  });

  stage("context", [&] {
    for (auto mode : {ContextMode::simple, ContextMode::longer}) {
      std::string text;
      for (auto purpose : config.purposes) text += contexts_jsonl(corpus, mode, purpose);
      emit("contexts_" + std::string(to_string(mode)) + ".jsonl", text);
    }
    return 0;
  });

  const auto lexicon = stage("augment", [&] { return load_lexicon(config); });
  const AugmentationPolicy policy = make_policy(config);
  std::shared_ptr<EncodingCache> cache;
  if (!config.variants.empty()) {
    cache = stage("encode", [&] { return std::make_shared<EncodingCache>(make_encoder(config.encoder)); });
  }
  std::shared_ptr<const VectorTable> table;
  if (config.logreg_baseline) {
    table = stage("encode", [&] { return std::make_shared<const VectorTable>(VectorTable::load(*config.vectors)); });
  }

  json slices_meta = json::array();
  for (std::size_t s = 0; s < config.purposes.size(); ++s) {
    const Purpose purpose = config.purposes[s];
    const auto& instances = slices[s];
    const std::string slice_tag = std::string(to_string(purpose));
    IntrinsicCell cell{config.profile, purpose, {}};
    json meta{{"purpose", slice_tag}, {"instances", instances.size()}, {"fingerprint", fingerprint(instances)}};

    const std::string problem = slice_problem(instances, config.folds);
    if (!problem.empty()) {
      say("train: skipping " + slice_tag + " slice (" + problem + ")");
      meta["skipped"] = problem;
    } else {
      CrossValidationOptions opts;
      opts.k = config.folds;
      opts.seed = config.seed;
      opts.grouping = config.grouping;
      opts.lexicon = lexicon.get();
      opts.policy = policy;
      const std::string* current = nullptr;
      opts.on_fold = [&](std::size_t fold, std::size_t k) {
        say("train: " + slice_tag + " " + *current + " fold " + std::to_string(fold + 1) + "/" + std::to_string(k));
      };
      struct Entry {
        std::string name;
        std::string stem;
        Learner learner;
      };
      std::vector<Entry> learners;
      for (auto v : config.variants) {
        learners.push_back({std::string(display_name(v)), std::string(to_string(v)),
                            neural_learner(v, config.hyper, cache)});
      }
      if (table) learners.push_back({"LogR", "LogR", logreg_learner(table, config.logreg_c)});
      for (const auto& [name, stem, learner] : learners) {
        current = &name;
        auto result = stage("train", [&] { return cross_validate(instances, name, learner, opts); });
        emit("predictions/" + slice_tag + "/" + stem + ".jsonl",
             predictions_jsonl(result.predictions));
        say("eval-intrinsic: " + slice_tag + " " + name + " mean macro-F1 " + std::to_string(result.mean_macro_f1));
        cell.results.push_back(std::move(result));
      }
    }
    slices_meta.push_back(std::move(meta));
    if (scope == RunScope::intrinsic_only) {
      summary.intrinsic.push_back(std::move(cell));
      continue;
    }

    ExtrinsicCell ecell{config.profile, purpose, {}};
    std::vector<std::pair<std::string, std::vector<InstancePrediction>>> model_preds;
    for (const auto& r : cell.results) model_preds.emplace_back(r.model, r.predictions);
    ecell.report = stage("eval-extrinsic", [&] {
      return extrinsic_eval(corpus, gold_predictions(instances), model_preds, config.normalize_counts);
    });
    summary.intrinsic.push_back(std::move(cell));
    summary.extrinsic.push_back(std::move(ecell));
  }

  stage("report", [&] {
    emit("intrinsic.json", intrinsic_json(summary.intrinsic, config.grouping));
    emit("table_macro_f1.csv", macro_f1_table_csv(summary.intrinsic));
    emit("table_detail.csv", detail_table_csv(summary.intrinsic));
    emit("folds.csv", folds_csv(summary.intrinsic));
    if (scope == RunScope::full) {
      emit("extrinsic.json", extrinsic_json(summary.extrinsic));
      emit("table_correlation.csv", correlation_table_csv(summary.extrinsic));
    }

    json manifest;
    manifest["tool"] = "desirev";
    manifest["version"] = std::string(version());
    manifest["config"] = json::parse(config_to_json(config));
    manifest["scope"] = scope == RunScope::full ? "full" : "intrinsic_only";
    manifest["config_hash"] = config_hash(config);
    manifest["seed"] = config.seed;
    json fold_seeds = json::array();
    for (std::size_t f = 0; f < config.folds; ++f) {
      fold_seeds.push_back({{"fold", f + 1},
                            {"train_seed", derive_seed(config.seed, 100 + f)},
                            {"augment_seed", derive_seed(config.seed, 200 + f)}});
    }
    manifest["fold_seeds"] = fold_seeds;
    manifest["encoder"] = config.encoder;
    if (cache) manifest["encoder_dim"] = cache->encoder().dim();
    json params = json::object();
    for (auto v : config.variants) {
      params[std::string(to_string(v))] = build_model(v, cache->encoder().dim(), config.hyper).parameter_count();
    }
    manifest["parameter_count"] = params;
    manifest["corpus_fingerprint"] = fingerprint(build_instances(corpus, InstanceOptions{std::nullopt, false}));
    manifest["slices"] = slices_meta;
    std::vector<std::string> artifacts = summary.artifacts;
    std::sort(artifacts.begin(), artifacts.end());
    manifest["artifacts"] = artifacts;
    write_text(config.out / "manifest.json", manifest.dump(2) + "\n");
    summary.artifacts.push_back("manifest.json");
    return 0;
  });
  return summary;
}

std::vector<ExtrinsicCell> evaluate_extrinsic(const ExperimentConfig& config, std::ostream* log) {
  stage("validate", [&] {
    validate_config(config);
    return 0;
  });
  const auto corpus = stage("ingest", [&] { return load_corpus(config.corpus, config.profile); });
  std::vector<ExtrinsicCell> cells;
  for (auto purpose : config.purposes) {
    const std::string tag(to_string(purpose));
    InstanceOptions opts{purpose, false};
    const auto instances = stage("extract", [&] { return build_instances(corpus, opts); });

    std::vector<std::pair<std::string, std::vector<InstancePrediction>>> model_preds;
    const fs::path dir = config.out / "predictions" / tag;
    stage("eval-extrinsic", [&] {
      std::vector<fs::path> files;
      if (fs::is_directory(dir)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
          if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      // Variants first in declaration order, then anything else by name.
      std::stable_sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        auto rank = [](const fs::path& p) {
          try {
            return static_cast<int>(parse_variant(p.stem().string()));
          } catch (const Error&) {
            return 100;
          }
        };
        return rank(a) < rank(b);
      });
      for (const auto& file : files) {
        const std::string stem = file.stem().string();
        std::string name = stem;
        try {
          name = std::string(display_name(parse_variant(stem)));
        } catch (const Error&) {
        }
        model_preds.emplace_back(name, parse_predictions_jsonl(read_text(file)));
        if (log) *log << "eval-extrinsic: " << tag << " " << name << " from " << file.string() << std::endl;
      }
      return 0;
    });
    ExtrinsicCell cell{config.profile, purpose, {}};
    cell.report = stage("eval-extrinsic", [&] {
      return extrinsic_eval(corpus, gold_predictions(instances), model_preds, config.normalize_counts);
    });
    cells.push_back(std::move(cell));
  }
  stage("report", [&] {
    write_text(config.out / "extrinsic.json", extrinsic_json(cells));
    write_text(config.out / "table_correlation.csv", correlation_table_csv(cells));
    return 0;
  });
  return cells;
}

}  // namespace desirev
