#include "desirev/models.hpp"

#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "desirev/error.hpp"

namespace desirev {

using nlohmann::json;

namespace {

constexpr char kWeightsMagic[8] = {'D', 'R', 'V', 'W', '0', '0', '0', '1'};

json hyper_json(const HyperParams& h) {
  return {{"learning_rate", h.learning_rate}, {"batch_size", h.batch_size},
          {"epochs", h.epochs},               {"hidden_size", h.hidden_size},
          {"dense_size", h.dense_size},       {"lstm_dropout", h.lstm_dropout},
          {"recurrent_dropout", h.recurrent_dropout}, {"dense_dropout", h.dense_dropout},
          {"class_weights", h.class_weights}, {"optimizer", "adam"},
          {"loss", "binary_crossentropy"}};
}

HyperParams hyper_from_json(const json& j) {
  HyperParams h;
  h.learning_rate = j.value("learning_rate", h.learning_rate);
  h.batch_size = j.value("batch_size", h.batch_size);
  h.epochs = j.value("epochs", h.epochs);
  h.hidden_size = j.value("hidden_size", h.hidden_size);
  h.dense_size = j.value("dense_size", h.dense_size);
  h.lstm_dropout = j.value("lstm_dropout", h.lstm_dropout);
  h.recurrent_dropout = j.value("recurrent_dropout", h.recurrent_dropout);
  h.dense_dropout = j.value("dense_dropout", h.dense_dropout);
  h.class_weights = j.value("class_weights", h.class_weights);
  return h;
}

}  // namespace

std::string_view display_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::M: return "M";
    case ModelVariant::M_SC: return "+SC";
    case ModelVariant::M_LC: return "+LC";
    case ModelVariant::M_F: return "+F";
    case ModelVariant::M_LC_F: return "+LC&F";
  }
  return "?";
}

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::M: return "M";
    case ModelVariant::M_SC: return "M_SC";
    case ModelVariant::M_LC: return "M_LC";
    case ModelVariant::M_F: return "M_F";
    case ModelVariant::M_LC_F: return "M_LC_F";
  }
  return "?";
}

ModelVariant parse_variant(std::string_view s) {
  for (auto v : kAllVariants) {
    if (s == to_string(v) || s == display_name(v)) return v;
  }
  if (s == "SC") return ModelVariant::M_SC;
  if (s == "LC") return ModelVariant::M_LC;
  if (s == "F") return ModelVariant::M_F;
  if (s == "LC_F" || s == "LC&F") return ModelVariant::M_LC_F;
  throw ConfigError("unknown model variant '" + std::string(s) + "'");
}

std::optional<ContextMode> variant_context(ModelVariant v) {
  switch (v) {
    case ModelVariant::M_SC: return ContextMode::simple;
    case ModelVariant::M_LC:
    case ModelVariant::M_LC_F: return ContextMode::longer;
    default: return std::nullopt;
  }
}

bool variant_uses_feedback(ModelVariant v) { return v == ModelVariant::M_F || v == ModelVariant::M_LC_F; }

void check_variant_for_profile(ModelVariant v, Profile profile) {
  if (variant_uses_feedback(v) && profile_info(profile).feedback_source == FeedbackSource::none) {
    throw ConfigError("variant " + std::string(display_name(v)) + " needs feedback, which the " +
                      std::string(to_string(profile)) + " corpus does not have");
  }
}

std::vector<std::shared_ptr<const EmbeddingSequence>> encode_segments(const TrainingInstance& instance,
                                                                      ModelVariant variant, EncodingCache& cache) {
  std::vector<std::shared_ptr<const EmbeddingSequence>> segments;
  segments.push_back(cache.pair(instance.original, instance.revised));
  if (const auto mode = variant_context(variant)) {
    const auto& ctx = *mode == ContextMode::simple ? instance.simple_context : instance.longer_context;
    if (!ctx) {
      throw DataError("instance '" + instance.id + "' has no " + std::string(to_string(*mode)) +
                      " context, required by variant " + std::string(display_name(variant)));
    }
    segments.push_back(cache.text(ctx->context1));
    segments.push_back(cache.text(ctx->context2));
  }
  if (variant_uses_feedback(variant)) {
    if (!instance.feedback || instance.feedback->empty()) {
      throw DataError("instance '" + instance.id + "' has no feedback, required by variant " +
                      std::string(display_name(variant)));
    }
    segments.push_back(cache.text(*instance.feedback));
  }
  return segments;
}

EmbeddingSequence assemble_input(const TrainingInstance& instance, ModelVariant variant, EncodingCache& cache) {
  const auto segments = encode_segments(instance, variant, cache);
  Eigen::Index rows = 0;
  for (const auto& s : segments) rows += s->rows();
  EmbeddingSequence out(rows, static_cast<Eigen::Index>(cache.encoder().dim()));
  Eigen::Index at = 0;
  for (const auto& s : segments) {
    out.middleRows(at, s->rows()) = *s;
    at += s->rows();
  }
  return out;
}

Desirability binarize(double probability) {
  return probability >= 0.5 ? Desirability::desirable : Desirability::undesirable;
}

NeuralModel::NeuralModel(ModelVariant variant, NetworkDims dims, HyperParams hyper)
    : variant_(variant),
      hyper_(hyper),
      net_(dims, DropoutRates{hyper.lstm_dropout, hyper.recurrent_dropout, hyper.dense_dropout}) {}

Prediction NeuralModel::predict(const EmbeddingSequence& input) const {
  const double p = net_.predict(input);
  return {p, binarize(p)};
}

NeuralModel build_model(ModelVariant variant, std::size_t input_dim, const HyperParams& hyper) {
  return NeuralModel(variant, NetworkDims{input_dim, hyper.hidden_size, hyper.dense_size}, hyper);
}

void require_both_classes(std::span<const TrainingInstance> instances) {
  std::size_t pos = 0;
  for (const auto& inst : instances) pos += inst.label == Desirability::desirable;
  if (pos == 0 || pos == instances.size()) {
    throw TrainingError("training set needs both desirable and undesirable instances (got " +
                        std::to_string(pos) + " desirable of " + std::to_string(instances.size()) + ")");
  }
}

TrainingLog train(NeuralModel& model, std::span<const TrainingInstance> instances, EncodingCache& cache,
                  std::uint64_t seed) {
  require_both_classes(instances);
  if (cache.encoder().dim() != model.network().dims().input) {
    throw TrainingError("encoder dimension does not match the model input dimension");
  }
  const auto& hyper = model.hyper();
  if (hyper.batch_size == 0) throw ConfigError("batch size must be positive");
  auto& net = model.network();
  net.initialize(seed);
  model.seed = seed;
  model.encoder_id = cache.encoder().id();
  model.data_fingerprint = fingerprint(std::vector<TrainingInstance>(instances.begin(), instances.end()));

  TrainingLog log;
  if (hyper.epochs == 0) return log;

  std::vector<std::shared_ptr<const EmbeddingSequence>> inputs;
  std::vector<int> labels;
  inputs.reserve(instances.size());
  for (const auto& inst : instances) {
    if (model.variant() == ModelVariant::M) {
      inputs.push_back(cache.pair(inst.original, inst.revised));
    } else {
      inputs.push_back(std::make_shared<const EmbeddingSequence>(assemble_input(inst, model.variant(), cache)));
    }
    labels.push_back(inst.label == Desirability::desirable ? 1 : 0);
  }

  float class_weight[2] = {1.0f, 1.0f};
  if (hyper.class_weights) {
    const double n = static_cast<double>(labels.size());
    const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    class_weight[1] = static_cast<float>(n / (2.0 * pos));
    class_weight[0] = static_cast<float>(n / (2.0 * (n - pos)));
  }

  Rng rng(derive_seed(seed, 1));
  AdamOptimizer<float> adam(net.parameter_count(), hyper.learning_rate);
  Eigen::VectorXf grad = Eigen::VectorXf::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      grad.setZero();
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        epoch_loss += net.accumulate_gradient(*inputs[idx], labels[idx], grad, &rng, class_weight[labels[idx]]);
      }
      grad /= static_cast<float>(end - start);
      adam.step(net.parameters(), grad);
    }
    if (!std::isfinite(epoch_loss)) throw TrainingError("training diverged (non-finite loss)");
    log.epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return log;
}

Prediction predict(const NeuralModel& model, const TrainingInstance& instance, EncodingCache& cache) {
  if (model.variant() == ModelVariant::M) return model.predict(*cache.pair(instance.original, instance.revised));
  return model.predict(assemble_input(instance, model.variant(), cache));
}

void save_model(const NeuralModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& dims = model.network().dims();
  json manifest = {{"format", "desirev-model/1"},
                   {"kind", "bilstm"},
                   {"variant", to_string(model.variant())},
                   {"dims", {{"input", dims.input}, {"hidden", dims.hidden}, {"dense", dims.dense}}},
                   {"hyper", hyper_json(model.hyper())},
                   {"seed", model.seed},
                   {"encoder", model.encoder_id},
                   {"data_fingerprint", model.data_fingerprint},
                   {"parameter_count", model.parameter_count()}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';

  std::ofstream out(dir / "weights.bin", std::ios::binary);
  if (!out) throw DataError("cannot write " + (dir / "weights.bin").string());
  const auto& params = model.network().parameters();
  const std::uint64_t count = static_cast<std::uint64_t>(params.size());
  out.write(kWeightsMagic, sizeof kWeightsMagic);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(params.data()), static_cast<std::streamsize>(count * sizeof(float)));
}

NeuralModel load_model(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw DataError("no model manifest in " + dir.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("malformed model manifest: " + std::string(e.what()));
  }
  if (m.value("kind", "") != "bilstm") throw DataError(dir.string() + " does not hold a BiLSTM model");
  const NetworkDims dims{m.at("dims").at("input").get<std::size_t>(), m.at("dims").at("hidden").get<std::size_t>(),
                         m.at("dims").at("dense").get<std::size_t>()};
  NeuralModel model(parse_variant(m.at("variant").get<std::string>()), dims, hyper_from_json(m.at("hyper")));
  model.seed = m.value("seed", std::uint64_t{0});
  model.encoder_id = m.value("encoder", std::string{});
  model.data_fingerprint = m.value("data_fingerprint", std::string{});

  std::ifstream w(dir / "weights.bin", std::ios::binary);
  char magic[8];
  std::uint64_t count = 0;
  w.read(magic, sizeof magic);
  w.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!w || std::memcmp(magic, kWeightsMagic, sizeof magic) != 0 || count != model.parameter_count()) {
    throw DataError(dir.string() + ": weights file does not match the manifest");
  }
  auto& params = model.network().parameters();
  w.read(reinterpret_cast<char*>(params.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (!w) throw DataError(dir.string() + ": truncated weights file");
  return model;
}

}  // namespace desirev
