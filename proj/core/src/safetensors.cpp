#include "desirev/safetensors.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "desirev/error.hpp"

namespace desirev {

namespace {

float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = (h & 0x8000u) << 16;
  std::uint32_t exp = (h >> 10) & 0x1Fu;
  std::uint32_t mant = h & 0x3FFu;
  std::uint32_t bits = 0;
  if (exp == 0) {
    if (mant == 0) {
      bits = sign;
    } else {
      exp = 127 - 15 + 1;
      while (!(mant & 0x400u)) {
        mant <<= 1;
        --exp;
      }
      mant &= 0x3FFu;
      bits = sign | (exp << 23) | (mant << 13);
    }
  } else if (exp == 0x1F) {
    bits = sign | 0x7F800000u | (mant << 13);
  } else {
    bits = sign | ((exp + 127 - 15) << 23) | (mant << 13);
  }
  return std::bit_cast<float>(bits);
}

}  // namespace

std::int64_t Tensor::numel() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::map<std::string, Tensor> read_safetensors(const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little, "safetensors reader assumes a little-endian host");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), 8);
  if (!in || header_len > (100u << 20)) throw DataError(path.string() + ": bad safetensors header");
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": malformed safetensors header: " + e.what());
  }

  std::map<std::string, Tensor> out;
  for (const auto& [name, info] : meta.items()) {
    if (name == "__metadata__") continue;
    Tensor t;
    t.shape = info.at("shape").get<std::vector<std::int64_t>>();
    const auto offsets = info.at("data_offsets").get<std::vector<std::uint64_t>>();
    const std::string dtype = info.at("dtype").get<std::string>();
    if (offsets.size() != 2 || offsets[1] > payload.size() || offsets[0] > offsets[1])
      throw DataError(path.string() + ": bad offsets for " + name);
    const char* data = payload.data() + offsets[0];
    const std::size_t bytes = offsets[1] - offsets[0];
    const auto n = static_cast<std::size_t>(t.numel());
    t.values.resize(n);
    if (dtype == "F32") {
      if (bytes != n * 4) throw DataError(path.string() + ": size mismatch for " + name);
      std::memcpy(t.values.data(), data, bytes);
    } else if (dtype == "F16" || dtype == "BF16") {
      if (bytes != n * 2) throw DataError(path.string() + ": size mismatch for " + name);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint16_t h;
        std::memcpy(&h, data + 2 * i, 2);
        t.values[i] = dtype == "F16" ? half_to_float(h) : std::bit_cast<float>(static_cast<std::uint32_t>(h) << 16);
      }
    } else {
      // Integer buffers such as position_ids are not needed.
      continue;
    }
    out.emplace(name, std::move(t));
  }
  return out;
}

}  // namespace desirev
