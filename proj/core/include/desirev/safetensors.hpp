#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace desirev {

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> values;  ///< row-major, converted to float32

  [[nodiscard]] std::int64_t numel() const;
};

/// Reads every tensor of a .safetensors file. F32, F16 and BF16 payloads are
/// converted to float32.
std::map<std::string, Tensor> read_safetensors(const std::filesystem::path& path);

}  // namespace desirev
