#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "kinv/mlp.hpp"

namespace kinv::mlp {

// Binary layout, all little-endian:
//   u64 L, u64 widths[L + 1], then f64 weights of W(1) ... W(L), each row-major.
std::vector<std::uint8_t> encode_params(const Params& params);
Params decode_params(std::span<const std::uint8_t> bytes);

void save_params(const Params& params, const std::filesystem::path& path);
Params load_params(const std::filesystem::path& path);

}  // namespace kinv::mlp
