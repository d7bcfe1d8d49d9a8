#include <cmath>
#include <cstdlib>

#include "desirev/encode.hpp"
#include "desirev/error.hpp"
#include "desirev/text.hpp"

namespace desirev {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_uniform(std::uint64_t& state) {
  return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace

TokenSequence SentenceEncoder::tokenize_and_truncate(std::string_view text, std::size_t max_tokens) const {
  TokenSequence seq = tokenize(text);
  if (seq.size() > max_tokens) {
    seq.tokens.resize(max_tokens);
    seq.ids.resize(max_tokens);
    seq.truncated = true;
  }
  return seq;
}

EmbeddingSequence SentenceEncoder::encode_pair(std::string_view original, std::string_view revised) const {
  TokenSequence a = tokenize(original);
  TokenSequence b = tokenize(revised);
  if (a.size() == 0 && b.size() == 0) throw DataError("encode_pair: both sides of the revision are empty");

  const std::size_t budget = max_tokens() - 3;
  if (a.size() + b.size() > budget) {
    const std::size_t keep_a = std::min(a.size(), budget);
    a.ids.resize(keep_a);
    b.ids.resize(budget - keep_a);
  }
  const auto special = special_ids();
  std::vector<std::int32_t> ids{special.cls};
  std::vector<std::int32_t> segments{0};
  for (auto id : a.ids) {
    ids.push_back(id);
    segments.push_back(0);
  }
  ids.push_back(special.sep);
  segments.push_back(0);
  for (auto id : b.ids) {
    ids.push_back(id);
    segments.push_back(1);
  }
  ids.push_back(special.sep);
  segments.push_back(1);
  return run(ids, segments);
}

EmbeddingSequence SentenceEncoder::encode_text(std::string_view text) const {
  const auto special = special_ids();
  TokenSequence seq = tokenize_and_truncate(text, max_tokens() - 2);
  std::vector<std::int32_t> ids{special.cls};
  if (seq.size() > 0) {
    ids.insert(ids.end(), seq.ids.begin(), seq.ids.end());
    ids.push_back(special.sep);
  }
  return run(ids, std::vector<std::int32_t>(ids.size(), 0));
}

bool SentenceEncoder::would_truncate(std::string_view text) const {
  return tokenize(text).size() + 2 > max_tokens();
}

HashEncoder::HashEncoder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim == 0) throw ConfigError("hash encoder dimension must be positive");
}

std::string HashEncoder::id() const {
  return "hash:" + std::to_string(dim_) + (seed_ ? ":" + std::to_string(seed_) : "");
}

TokenSequence HashEncoder::tokenize(std::string_view text) const {
  TokenSequence seq;
  for (auto& w : basic_tokenize(text, true)) {
    seq.ids.push_back(static_cast<std::int32_t>(fnv1a64(w, seed_ + 0xcbf29ce484222325ULL) & 0x3fffffff));
    seq.tokens.push_back(std::move(w));
  }
  return seq;
}

Eigen::VectorXf HashEncoder::token_vector(std::int32_t id) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  }
  std::uint64_t state = seed_ * 0x2545f4914f6cdd1dULL + static_cast<std::uint64_t>(static_cast<std::int64_t>(id));
  Eigen::VectorXf v(static_cast<Eigen::Index>(dim_));
  for (Eigen::Index i = 0; i < v.size(); i += 2) {
    // Box-Muller keeps the values identical across standard libraries.
    const double u1 = unit_uniform(state);
    const double u2 = unit_uniform(state);
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = static_cast<float>(r * std::cos(2.0 * M_PI * u2));
    if (i + 1 < v.size()) v[i + 1] = static_cast<float>(r * std::sin(2.0 * M_PI * u2));
  }
  std::lock_guard lock(mutex_);
  return cache_.try_emplace(id, std::move(v)).first->second;
}

EmbeddingSequence HashEncoder::run(const std::vector<std::int32_t>& ids,
                                   const std::vector<std::int32_t>& segments) const {
  const auto T = static_cast<Eigen::Index>(ids.size());
  const auto D = static_cast<Eigen::Index>(dim_);
  EmbeddingSequence base(T, D);
  const Eigen::VectorXf seg0 = token_vector(-100);
  const Eigen::VectorXf seg1 = token_vector(-101);
  for (Eigen::Index t = 0; t < T; ++t) {
    Eigen::VectorXf e = token_vector(ids[static_cast<std::size_t>(t)]);
    e += 0.5f * (segments[static_cast<std::size_t>(t)] ? seg1 : seg0);
    for (Eigen::Index i = 0; i < D; ++i) {
      const double angle = static_cast<double>(t) / std::pow(10000.0, static_cast<double>(2 * (i / 2)) / D);
      e[i] += 0.5f * static_cast<float>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
    base.row(t) = e.transpose();
  }
  EmbeddingSequence out = base;
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t > 0) out.row(t) += 0.25f * base.row(t - 1);
    if (t + 1 < T) out.row(t) += 0.25f * base.row(t + 1);
  }
  return out;
}

std::shared_ptr<const SentenceEncoder> make_encoder(const std::string& id) {
  if (id.rfind("hash", 0) == 0) {
    std::size_t dim = 768;
    std::uint64_t seed = 0;
    if (id.size() > 4) {
      if (id[4] != ':') throw ConfigError("malformed hash encoder id '" + id + "'");
      const std::string rest = id.substr(5);
      const auto colon = rest.find(':');
      try {
        dim = std::stoul(rest.substr(0, colon));
        if (colon != std::string::npos) seed = std::stoull(rest.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("malformed hash encoder id '" + id + "'");
      }
    }
    return std::make_shared<HashEncoder>(dim, seed);
  }
  std::vector<std::filesystem::path> candidates{id};
  if (const char* root = std::getenv("DESIREV_MODEL_DIR")) candidates.emplace_back(std::filesystem::path(root) / id);
  for (const auto& dir : candidates) {
    if (std::filesystem::exists(dir / "config.json")) return std::make_shared<BertEncoder>(dir, id);
  }
  throw ConfigError("encoder '" + id +
                    "' not found: pass a model directory (config.json, vocab.txt, model.safetensors), set "
                    "DESIREV_MODEL_DIR, or use a hash:<dim> encoder");
}

EncodingCache::EncodingCache(std::shared_ptr<const SentenceEncoder> encoder) : encoder_(std::move(encoder)) {}

std::shared_ptr<const EmbeddingSequence> EncodingCache::pair(const std::string& original, const std::string& revised) {
  // Unit separator cannot occur in the sentence texts we encode.
  const std::string key = "P\x1f" + original + "\x1f" + revised;
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto value = std::make_shared<const EmbeddingSequence>(encoder_->encode_pair(original, revised));
  std::lock_guard lock(mutex_);
  return entries_.try_emplace(key, std::move(value)).first->second;
}

std::shared_ptr<const EmbeddingSequence> EncodingCache::text(const std::string& text) {
  const std::string key = "T\x1f" + text;
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto value = std::make_shared<const EmbeddingSequence>(encoder_->encode_text(text));
  std::lock_guard lock(mutex_);
  return entries_.try_emplace(key, std::move(value)).first->second;
}

std::size_t EncodingCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace desirev
