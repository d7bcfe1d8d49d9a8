#include <cmath>
#include <fstream>

#include <json.hpp>

#include "desirev/encode.hpp"
#include "desirev/error.hpp"
#include "desirev/safetensors.hpp"

namespace desirev {

namespace {

using Matrix = Eigen::MatrixXf;
using Vector = Eigen::VectorXf;

class TensorStore {
 public:
  TensorStore(std::map<std::string, Tensor> tensors, std::string origin)
      : tensors_(std::move(tensors)), origin_(std::move(origin)) {}

  const Tensor& get(const std::string& name) const {
    for (const char* prefix : {"", "bert."}) {
      for (const auto& alias : aliases(name)) {
        if (auto it = tensors_.find(prefix + alias); it != tensors_.end()) return it->second;
      }
    }
    throw DataError(origin_ + ": missing tensor '" + name + "'");
  }

  Matrix matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols) const {
    const Tensor& t = get(name);
    if (t.shape.size() != 2 || t.shape[0] != rows || t.shape[1] != cols) {
      throw DataError(origin_ + ": tensor '" + name + "' has unexpected shape");
    }
    return Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(t.values.data(),
                                                                                                    rows, cols);
  }

  Vector vector(const std::string& name, Eigen::Index size) const {
    const Tensor& t = get(name);
    if (t.numel() != size) throw DataError(origin_ + ": tensor '" + name + "' has unexpected size");
    return Eigen::Map<const Vector>(t.values.data(), size);
  }

 private:
  static std::vector<std::string> aliases(const std::string& name) {
    std::vector<std::string> out{name};
    // Older checkpoints name LayerNorm parameters gamma/beta.
    if (name.size() > 16 && name.ends_with("LayerNorm.weight"))
      out.push_back(name.substr(0, name.size() - 6) + "gamma");
    if (name.size() > 14 && name.ends_with("LayerNorm.bias")) out.push_back(name.substr(0, name.size() - 4) + "beta");
    return out;
  }

  std::map<std::string, Tensor> tensors_;
  std::string origin_;
};

struct Linear {
  Matrix weight;  // out x in
  Vector bias;
  [[nodiscard]] Matrix apply(const Matrix& x) const {
    Matrix y = x * weight.transpose();
    y.rowwise() += bias.transpose();
    return y;
  }
};

struct LayerNorm {
  Vector gamma;
  Vector beta;
  float eps = 1e-12f;
  void apply(Matrix& x) const {
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      auto row = x.row(t);
      const float mean = row.mean();
      const float var = (row.array() - mean).square().mean();
      row = ((row.array() - mean) / std::sqrt(var + eps)).matrix();
      row = (row.array() * gamma.transpose().array() + beta.transpose().array()).matrix();
    }
  }
};

float gelu(float x) { return 0.5f * x * (1.0f + std::erf(x / std::sqrt(2.0f))); }

}  // namespace

struct BertEncoder::Weights {
  Eigen::Index hidden = 0;
  Eigen::Index heads = 0;
  Eigen::Index max_positions = 0;
  std::string activation = "gelu";
  Matrix word_embeddings;
  Matrix position_embeddings;
  Matrix token_type_embeddings;
  LayerNorm embedding_norm;
  struct Layer {
    Linear query, key, value, attention_out, intermediate, output;
    LayerNorm attention_norm, output_norm;
  };
  std::vector<Layer> layers;
};

BertEncoder::BertEncoder(const std::filesystem::path& model_dir, std::string id)
    : id_(id.empty() ? model_dir.filename().string() : std::move(id)) {
  std::ifstream cfg_in(model_dir / "config.json");
  if (!cfg_in) throw DataError("missing " + (model_dir / "config.json").string());
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(cfg_in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed encoder config: " + std::string(e.what()));
  }
  const bool lower_case = cfg.value("do_lower_case", true);
  tokenizer_ = std::make_unique<WordPieceTokenizer>(WordPieceTokenizer::from_file(model_dir / "vocab.txt", lower_case));

  auto w = std::make_unique<Weights>();
  w->hidden = cfg.at("hidden_size").get<Eigen::Index>();
  w->heads = cfg.at("num_attention_heads").get<Eigen::Index>();
  w->max_positions = cfg.value("max_position_embeddings", Eigen::Index{512});
  w->activation = cfg.value("hidden_act", std::string("gelu"));
  if (w->activation != "gelu") throw DataError("unsupported encoder activation '" + w->activation + "'");
  const auto layers = cfg.at("num_hidden_layers").get<int>();
  const auto inter = cfg.at("intermediate_size").get<Eigen::Index>();
  const auto vocab = cfg.at("vocab_size").get<Eigen::Index>();
  const auto types = cfg.value("type_vocab_size", Eigen::Index{2});
  const auto eps = cfg.value("layer_norm_eps", 1e-12);
  if (w->hidden % w->heads != 0) throw DataError("hidden size must be divisible by the head count");

  const TensorStore store(read_safetensors(model_dir / "model.safetensors"), model_dir.string());
  const auto H = w->hidden;
  w->word_embeddings = store.matrix("embeddings.word_embeddings.weight", vocab, H);
  w->position_embeddings = store.matrix("embeddings.position_embeddings.weight", w->max_positions, H);
  w->token_type_embeddings = store.matrix("embeddings.token_type_embeddings.weight", types, H);
  w->embedding_norm = {store.vector("embeddings.LayerNorm.weight", H), store.vector("embeddings.LayerNorm.bias", H),
                       static_cast<float>(eps)};
  for (int l = 0; l < layers; ++l) {
    const std::string p = "encoder.layer." + std::to_string(l) + ".";
    auto linear = [&](const std::string& name, Eigen::Index out, Eigen::Index in) {
      return Linear{store.matrix(p + name + ".weight", out, in), store.vector(p + name + ".bias", out)};
    };
    auto norm = [&](const std::string& name) {
      return LayerNorm{store.vector(p + name + ".weight", H), store.vector(p + name + ".bias", H),
                       static_cast<float>(eps)};
    };
    w->layers.push_back({linear("attention.self.query", H, H), linear("attention.self.key", H, H),
                         linear("attention.self.value", H, H), linear("attention.output.dense", H, H),
                         linear("intermediate.dense", inter, H), linear("output.dense", H, inter),
                         norm("attention.output.LayerNorm"), norm("output.LayerNorm")});
  }
  weights_ = std::move(w);
}

BertEncoder::~BertEncoder() = default;

std::size_t BertEncoder::dim() const { return static_cast<std::size_t>(weights_->hidden); }

std::size_t BertEncoder::max_tokens() const {
  return std::min<std::size_t>(kMaxTokens, static_cast<std::size_t>(weights_->max_positions));
}

TokenSequence BertEncoder::tokenize(std::string_view text) const { return tokenizer_->tokenize(text); }

SentenceEncoder::SpecialIds BertEncoder::special_ids() const {
  return {tokenizer_->token_id("[CLS]"), tokenizer_->token_id("[SEP]")};
}

EmbeddingSequence BertEncoder::run(const std::vector<std::int32_t>& ids,
                                   const std::vector<std::int32_t>& segments) const {
  const Weights& w = *weights_;
  const auto T = static_cast<Eigen::Index>(ids.size());
  if (T > w.max_positions) throw DataError("encoder input longer than the position table");
  Matrix x(T, w.hidden);
  for (Eigen::Index t = 0; t < T; ++t) {
    x.row(t) = w.word_embeddings.row(ids[static_cast<std::size_t>(t)]) + w.position_embeddings.row(t) +
               w.token_type_embeddings.row(segments[static_cast<std::size_t>(t)]);
  }
  w.embedding_norm.apply(x);

  const Eigen::Index head_dim = w.hidden / w.heads;
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  for (const auto& layer : w.layers) {
    const Matrix q = layer.query.apply(x);
    const Matrix k = layer.key.apply(x);
    const Matrix v = layer.value.apply(x);
    Matrix context(T, w.hidden);
    for (Eigen::Index h = 0; h < w.heads; ++h) {
      const auto cols = Eigen::seqN(h * head_dim, head_dim);
      Matrix scores = (q(Eigen::all, cols) * k(Eigen::all, cols).transpose()) * scale;
      for (Eigen::Index r = 0; r < T; ++r) {
        auto row = scores.row(r);
        row.array() -= row.maxCoeff();
        row = row.array().exp().matrix();
        row /= row.sum();
      }
      context(Eigen::all, cols) = scores * v(Eigen::all, cols);
    }
    Matrix attended = layer.attention_out.apply(context) + x;
    layer.attention_norm.apply(attended);
    Matrix inter = layer.intermediate.apply(attended).unaryExpr(&gelu);
    x = layer.output.apply(inter) + attended;
    layer.output_norm.apply(x);
  }
  return x;
}

}  // namespace desirev
