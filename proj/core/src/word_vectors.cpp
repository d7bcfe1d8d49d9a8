#include <fstream>
#include <sstream>

#include "desirev/encode.hpp"
#include "desirev/error.hpp"
#include "desirev/text.hpp"

namespace desirev {

VectorTable::VectorTable(std::vector<std::string> words, Eigen::MatrixXf vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows())
    throw DataError("vector table: word count does not match row count");
  for (std::size_t i = 0; i < words_.size(); ++i) index_.try_emplace(to_lower_ascii(words_[i]), i);
}

VectorTable VectorTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector table " + path.string());
  std::vector<std::string> words;
  std::vector<float> values;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<float> row;
    float v = 0;
    while (fields >> v) row.push_back(v);
    // word2vec text files start with a "<count> <dim>" header.
    if (line_no == 1 && row.size() == 1 && word.find_first_not_of("0123456789") == std::string::npos) continue;
    if (row.empty()) throw DataError(path.string() + ":" + std::to_string(line_no) + ": no vector values");
    if (dim == 0) dim = row.size();
    if (row.size() != dim) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " values, got " + std::to_string(row.size()));
    }
    words.push_back(std::move(word));
    values.insert(values.end(), row.begin(), row.end());
  }
  if (words.empty()) throw DataError("vector table " + path.string() + " is empty");
  Eigen::MatrixXf m = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(words.size()), static_cast<Eigen::Index>(dim));
  return VectorTable(std::move(words), std::move(m));
}

const float* VectorTable::find(std::string_view word) const {
  auto it = index_.find(to_lower_ascii(word));
  if (it == index_.end()) return nullptr;
  return vectors_.row(static_cast<Eigen::Index>(it->second)).data();
}

Eigen::VectorXf average_vector(std::string_view text, const VectorTable& table) {
  const auto d = static_cast<Eigen::Index>(table.dim());
  Eigen::VectorXf sum = Eigen::VectorXf::Zero(d);
  int count = 0;
  for (const auto& tok : token_strings(text)) {
    if (const float* row = table.find(tok)) {
      sum += Eigen::Map<const Eigen::VectorXf>(row, d);
      ++count;
    }
  }
  if (count) sum /= static_cast<float>(count);
  return sum;
}

Eigen::VectorXf avg_word_vectors(std::string_view original, std::string_view revised, const VectorTable* table) {
  if (!table) throw DataError("avg_word_vectors: no vector table loaded");
  const auto d = static_cast<Eigen::Index>(table->dim());
  Eigen::VectorXf out(2 * d);
  out.head(d) = average_vector(original, *table);
  out.tail(d) = average_vector(revised, *table);
  return out;
}

}  // namespace desirev
