#include "kinv/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "kinv/error.hpp"

namespace kinv::mlp {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  if (offset + 8 > bytes.size()) {
    throw LengthError("params snapshot: truncated");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= std::uint64_t{bytes[offset + i]} << (8 * i);
  }
  offset += 8;
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_params(const Params& params) {
  check_shapes(params);
  const MlpConfig cfg = params.config();
  std::vector<std::uint8_t> out;
  put_u64(out, params.depth());
  for (std::size_t w : cfg.widths) {
    put_u64(out, w);
  }
  for (const auto& w : params.weights) {
    for (double v : w.data()) {
      put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
  }
  return out;
}

Params decode_params(std::span<const std::uint8_t> bytes) {
  std::size_t offset = 0;
  const std::uint64_t depth = get_u64(bytes, offset);
  if (depth < 1 || depth > 4096) {
    throw FormatError("params snapshot: implausible depth " + std::to_string(depth));
  }
  std::vector<std::size_t> widths;
  for (std::uint64_t i = 0; i <= depth; ++i) {
    widths.push_back(get_u64(bytes, offset));
  }
  std::size_t expected = offset;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    expected += 8 * widths[l] * widths[l - 1];
  }
  if (bytes.size() != expected) {
    throw LengthError("params snapshot: " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(expected));
  }
  Params p;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    Matrix w(widths[l], widths[l - 1]);
    for (double& v : w.data()) {
      v = std::bit_cast<double>(get_u64(bytes, offset));
    }
    p.weights.push_back(std::move(w));
  }
  return p;
}

void save_params(const Params& params, const std::filesystem::path& path) {
  const auto bytes = encode_params(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Params load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_params(bytes);
}

}  // namespace kinv::mlp
