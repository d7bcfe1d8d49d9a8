#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace desirev {

/// Token-level embeddings, one row per time step.
using EmbeddingSequence = Eigen::MatrixXf;

inline constexpr std::size_t kMaxTokens = 512;

struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<std::int32_t> ids;  ///< vocabulary ids, parallel to tokens
  bool truncated = false;

  [[nodiscard]] std::size_t size() const { return tokens.size(); }
};

/// Frozen text encoder producing token-level embeddings. Implementations are
/// read-only after construction and safe to call from several threads.
class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;

  [[nodiscard]] virtual std::string id() const = 0;
  [[nodiscard]] virtual std::size_t dim() const = 0;
  [[nodiscard]] virtual std::size_t max_tokens() const { return kMaxTokens; }

  /// Subword tokens of `text` without special tokens or truncation.
  [[nodiscard]] virtual TokenSequence tokenize(std::string_view text) const = 0;

  /// Tokenizes and keeps at most `max_tokens` tokens, dropping the suffix.
  [[nodiscard]] TokenSequence tokenize_and_truncate(std::string_view text, std::size_t max_tokens = kMaxTokens) const;

  /// `[CLS] original [SEP] revised [SEP]` with segment ids 0/1. One side may be
  /// empty; both empty is an error. Overlong input is cut from the end.
  [[nodiscard]] EmbeddingSequence encode_pair(std::string_view original, std::string_view revised) const;

  /// `[CLS] text [SEP]`; an empty text encodes to the single `[CLS]` step.
  [[nodiscard]] EmbeddingSequence encode_text(std::string_view text) const;

  /// True when encode_text(text) would drop tokens.
  [[nodiscard]] bool would_truncate(std::string_view text) const;

 protected:
  struct SpecialIds {
    std::int32_t cls = 0;
    std::int32_t sep = 0;
  };
  [[nodiscard]] virtual SpecialIds special_ids() const = 0;
  /// Runs the network over a full input (special tokens included).
  [[nodiscard]] virtual EmbeddingSequence run(const std::vector<std::int32_t>& ids,
                                              const std::vector<std::int32_t>& segments) const = 0;
};

/// Lowercasing basic tokenizer + greedy longest-match WordPiece.
class WordPieceTokenizer {
 public:
  explicit WordPieceTokenizer(std::vector<std::string> vocab, bool lower_case = true);
  static WordPieceTokenizer from_file(const std::filesystem::path& vocab_txt, bool lower_case = true);

  [[nodiscard]] TokenSequence tokenize(std::string_view text) const;
  [[nodiscard]] std::int32_t token_id(std::string_view token) const;
  [[nodiscard]] std::size_t vocab_size() const { return vocab_.size(); }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::int32_t> ids_;
  bool lower_case_;
  std::int32_t unk_id_;
};

/// Text normalization + punctuation split used before WordPiece.
std::vector<std::string> basic_tokenize(std::string_view text, bool lower_case = true);

/// Transformer encoder loaded from a model directory holding config.json,
/// vocab.txt and model.safetensors (standard BERT tensor names).
class BertEncoder final : public SentenceEncoder {
 public:
  explicit BertEncoder(const std::filesystem::path& model_dir, std::string id = {});
  ~BertEncoder() override;

  [[nodiscard]] std::string id() const override { return id_; }
  [[nodiscard]] std::size_t dim() const override;
  [[nodiscard]] std::size_t max_tokens() const override;
  [[nodiscard]] TokenSequence tokenize(std::string_view text) const override;

 protected:
  [[nodiscard]] SpecialIds special_ids() const override;
  [[nodiscard]] EmbeddingSequence run(const std::vector<std::int32_t>& ids,
                                      const std::vector<std::int32_t>& segments) const override;

 private:
  struct Weights;
  std::string id_;
  std::unique_ptr<WordPieceTokenizer> tokenizer_;
  std::unique_ptr<const Weights> weights_;
};

/// Deterministic stand-in encoder that needs no pretrained weights. Each word
/// maps to a fixed pseudo-random vector; segment and position signals are
/// added and neighbouring steps are mixed so outputs depend on context and
/// segment order. Identifier format: `hash:<dim>` or `hash:<dim>:<seed>`.
class HashEncoder final : public SentenceEncoder {
 public:
  explicit HashEncoder(std::size_t dim = 768, std::uint64_t seed = 0);

  [[nodiscard]] std::string id() const override;
  [[nodiscard]] std::size_t dim() const override { return dim_; }
  [[nodiscard]] TokenSequence tokenize(std::string_view text) const override;

 protected:
  [[nodiscard]] SpecialIds special_ids() const override { return {-1, -2}; }
  [[nodiscard]] EmbeddingSequence run(const std::vector<std::int32_t>& ids,
                                      const std::vector<std::int32_t>& segments) const override;

 private:
  [[nodiscard]] Eigen::VectorXf token_vector(std::int32_t id) const;

  std::size_t dim_;
  std::uint64_t seed_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::int32_t, Eigen::VectorXf> cache_;
};

/// Resolves an encoder identifier. `hash:...` builds a HashEncoder; anything
/// else is a model directory, looked up directly and then under
/// `$DESIREV_MODEL_DIR/<id>`. Throws ConfigError when nothing is found.
std::shared_ptr<const SentenceEncoder> make_encoder(const std::string& id);

/// Memoizes encodings by input text. Thread-safe.
class EncodingCache {
 public:
  explicit EncodingCache(std::shared_ptr<const SentenceEncoder> encoder);

  std::shared_ptr<const EmbeddingSequence> pair(const std::string& original, const std::string& revised);
  std::shared_ptr<const EmbeddingSequence> text(const std::string& text);
  [[nodiscard]] const SentenceEncoder& encoder() const { return *encoder_; }
  [[nodiscard]] std::size_t size() const;

 private:
  std::shared_ptr<const SentenceEncoder> encoder_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const EmbeddingSequence>> entries_;
};

/// Static word vectors in the whitespace-separated text format.
class VectorTable {
 public:
  static VectorTable load(const std::filesystem::path& path);
  VectorTable(std::vector<std::string> words, Eigen::MatrixXf vectors);

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(vectors_.cols()); }
  [[nodiscard]] std::size_t size() const { return words_.size(); }
  /// Row for the lowercased word, or nullptr when out of vocabulary.
  [[nodiscard]] const float* find(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> vectors_;
};

/// Mean in-vocabulary vector of one text (zero when nothing matches).
Eigen::VectorXf average_vector(std::string_view text, const VectorTable& table);

/// Per-side averages concatenated: [avg(original), avg(revised)], length 2d.
Eigen::VectorXf avg_word_vectors(std::string_view original, std::string_view revised, const VectorTable* table);

}  // namespace desirev
