// desirev command-line tool.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "desirev/augment.hpp"
#include "desirev/context.hpp"
#include "desirev/corpus.hpp"
#include "desirev/encode.hpp"
#include "desirev/error.hpp"
#include "desirev/instance.hpp"
#include "desirev/models.hpp"
#include "desirev/pipeline.hpp"
#include "desirev/random.hpp"
#include "desirev/report.hpp"

namespace fs = std::filesystem;
using namespace desirev;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kTraining = 4 };

/// Flags shared by every subcommand. Each one overrides the matching config
/// field when given.
struct CommonFlags {
  std::string config;
  std::string corpus;
  std::string profile;
  std::string purpose;
  std::vector<std::string> variants;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> folds;
  bool no_augment = false;
  std::string encoder;
  bool quiet = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "Experiment config (JSON)");
  app->add_option("--corpus", f.corpus, "Corpus JSONL, when no config is given");
  app->add_option("--profile", f.profile, "elementary | high_school | college");
  app->add_option("--purpose", f.purpose, "evidence | reasoning");
  app->add_option("--variant", f.variants, "Model variant (repeatable): M, M_SC, M_LC, M_F, M_LC_F");
  app->add_option("--seed", f.seed, "Random seed");
  app->add_option("--out", f.out, "Output directory or file");
  app->add_option("--folds", f.folds, "Number of cross-validation folds");
  app->add_flag("--no-augment", f.no_augment, "Disable training-fold augmentation");
  app->add_option("--encoder", f.encoder, "Encoder id (model directory name or hash:<dim>)");
  app->add_flag("-q,--quiet", f.quiet, "Suppress progress output");
}

ExperimentConfig resolve_config(const CommonFlags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
  } else {
    if (f.corpus.empty()) throw ConfigError("either --config or --corpus is required");
    if (f.profile.empty()) throw ConfigError("--profile is required without --config");
  }
  if (!f.corpus.empty()) c.corpus = f.corpus;
  try {
    if (!f.profile.empty()) c.profile = parse_profile(f.profile);
    if (!f.purpose.empty()) c.purposes = {parse_purpose(f.purpose)};
    if (!f.variants.empty()) {
      c.variants.clear();
      for (const auto& v : f.variants) c.variants.push_back(parse_variant(v));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out = f.out;
  if (f.folds) c.folds = *f.folds;
  if (f.no_augment) c.augment = false;
  if (!f.encoder.empty()) c.encoder = f.encoder;
  return c;
}

std::ostream* progress(const CommonFlags& f) { return f.quiet ? nullptr : &std::cerr; }

/// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_text(path, content);
  }
}

std::vector<TrainingInstance> slice_instances(const ExperimentConfig& c, bool with_contexts) {
  const auto corpus = load_corpus(c.corpus, c.profile);
  std::vector<TrainingInstance> out;
  for (auto purpose : c.purposes) {
    auto part = build_instances(corpus, InstanceOptions{purpose, with_contexts});
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

int cmd_validate(const CommonFlags& f) {
  ExperimentConfig c = resolve_config(f);
  if (f.config.empty() && c.variants.empty()) c.variants = {ModelVariant::M};
  validate_config(c);
  const auto corpus = load_corpus(c.corpus, c.profile);
  std::size_t revisions = 0;
  for (const auto& pair : corpus) revisions += extract_revisions(pair).size();
  std::printf("ok: %zu essay pairs, %zu evidence/reasoning revisions, profile %s\n", corpus.size(), revisions,
              std::string(to_string(c.profile)).c_str());
  return kOk;
}

int cmd_extract_revisions(const CommonFlags& f) {
  const auto c = resolve_config(f);
  const auto instances = slice_instances(c, true);
  std::string text;
  for (const auto& inst : instances) text += serialize_instance(inst) + "\n";
  emit(f.out, text);
  if (!f.quiet) std::fprintf(stderr, "extract-revisions: %zu instances\n", instances.size());
  return kOk;
}

int cmd_extract_context(const CommonFlags& f, const std::string& mode) {
  const auto c = resolve_config(f);
  ContextMode m;
  try {
    m = parse_context_mode(mode);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const auto corpus = load_corpus(c.corpus, c.profile);
  std::string text;
  for (auto purpose : c.purposes) text += contexts_jsonl(corpus, m, purpose);
  emit(f.out, text);
  return kOk;
}

int cmd_augment(const CommonFlags& f, const std::string& input) {
  const auto c = resolve_config(f);
  if (!c.lexicon) throw ConfigError("augment needs a lexicon in the config");
  const auto lexicon = SynonymLexicon::load(*c.lexicon);
  const auto instances = input.empty() ? slice_instances(c, true) : load_instances(input);
  const auto augmented = augment_training_fold(instances, lexicon, make_policy(c), c.seed);
  std::string text;
  for (const auto& inst : augmented) text += serialize_instance(inst) + "\n";
  emit(f.out, text);
  if (!f.quiet) {
    std::fprintf(stderr, "augment: %zu originals, %zu total\n", instances.size(), augmented.size());
  }
  return kOk;
}

int cmd_train(const CommonFlags& f) {
  const auto c = resolve_config(f);
  validate_config(c);
  const auto instances = slice_instances(c, true);
  auto cache = std::make_shared<EncodingCache>(make_encoder(c.encoder));
  const auto lexicon = load_lexicon(c);
  const auto train_set = lexicon ? augment_training_fold(instances, *lexicon, make_policy(c), derive_seed(c.seed, 200))
                                 : instances;
  for (auto v : c.variants) {
    auto model = build_model(v, cache->encoder().dim(), c.hyper);
    model.encoder_id = c.encoder;
    model.data_fingerprint = fingerprint(instances);
    const auto log = train(model, train_set, *cache, derive_seed(c.seed, 100));
    std::string slice;
    for (auto p : c.purposes) slice += std::string(slice.empty() ? "" : "+") + std::string(to_string(p));
    const fs::path dir = c.out / "models" / (slice + "_" + std::string(to_string(v)));
    save_model(model, dir);
    if (!f.quiet) {
      std::fprintf(stderr, "train: %s on %zu instances, %zu parameters, final loss %.4f -> %s\n",
                   std::string(display_name(v)).c_str(), train_set.size(), model.parameter_count(),
                   log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back(), dir.string().c_str());
    }
  }
  return kOk;
}

void print_intrinsic(const RunSummary& s) {
  for (const auto& cell : s.intrinsic) {
    for (const auto& r : cell.results) {
      std::printf("%s %s %-6s macro-F1 %.3f  P %.3f  R %.3f\n", std::string(to_string(cell.profile)).c_str(),
                  std::string(to_string(cell.purpose)).c_str(), r.model.c_str(), r.mean_macro_f1, r.mean_precision,
                  r.mean_recall);
    }
  }
}

void print_extrinsic(const std::vector<ExtrinsicCell>& cells) {
  for (const auto& cell : cells) {
    std::printf("%s %s (%zu students)\n", std::string(to_string(cell.profile)).c_str(),
                std::string(to_string(cell.purpose)).c_str(), cell.report.students);
    for (const auto& row : cell.report.rows) {
      auto text = [](const CorrelationCell& c) {
        if (!c.result) return std::string("n/a");
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.3f%s", c.result->r, c.result->significant() ? "*" : "");
        return std::string(buf);
      };
      std::printf("  %-6s desirable %-8s undesirable %-8s%s\n", row.model.c_str(), text(row.desirable).c_str(),
                  text(row.undesirable).c_str(), row.consistent_with_gold ? "" : "  (inconsistent with gold)");
    }
  }
}

int cmd_eval_intrinsic(const CommonFlags& f) {
  const auto summary = run_experiment(resolve_config(f), progress(f), RunScope::intrinsic_only);
  print_intrinsic(summary);
  return kOk;
}

int cmd_eval_extrinsic(const CommonFlags& f) {
  print_extrinsic(evaluate_extrinsic(resolve_config(f), progress(f)));
  return kOk;
}

int cmd_run(const CommonFlags& f) {
  const auto summary = run_experiment(resolve_config(f), progress(f));
  print_intrinsic(summary);
  print_extrinsic(summary.extrinsic);
  std::printf("artifacts written to %s\n", summary.out.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desirable revision classification pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  CommonFlags flags;
  std::string mode = "lc";
  std::string input;

  auto* validate = app.add_subcommand("validate", "Check a config and its corpus");
  auto* extract = app.add_subcommand("extract-revisions", "Write evidence/reasoning revisions as JSONL");
  auto* context = app.add_subcommand("extract-context", "Write revision contexts as JSONL");
  context->add_option("--mode", mode, "sc | lc")->check(CLI::IsMember({"sc", "lc"}));
  auto* augment = app.add_subcommand("augment", "Synonym-replacement variants of training instances");
  augment->add_option("--in", input, "Instances JSONL (defaults to the config corpus)");
  auto* train_cmd = app.add_subcommand("train", "Train each variant on the full slice and save it");
  auto* intrinsic = app.add_subcommand("eval-intrinsic", "Cross-validated macro-F1");
  auto* extrinsic = app.add_subcommand("eval-extrinsic", "Correlation of revision counts with improvement");
  auto* run = app.add_subcommand("run", "Full pipeline");
  for (auto* sub : {validate, extract, context, augment, train_cmd, intrinsic, extrinsic, run}) add_common(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*validate) return cmd_validate(flags);
    if (*extract) return cmd_extract_revisions(flags);
    if (*context) return cmd_extract_context(flags, mode);
    if (*augment) return cmd_augment(flags, input);
    if (*train_cmd) return cmd_train(flags);
    if (*intrinsic) return cmd_eval_intrinsic(flags);
    if (*extrinsic) return cmd_eval_extrinsic(flags);
    if (*run) return cmd_run(flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const TrainingError& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return kTraining;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
