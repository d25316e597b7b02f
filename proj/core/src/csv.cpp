#include "kinv/csv.hpp"

#include <charconv>
#include <cmath>

#include "kinv/error.hpp"

namespace kinv::csv {

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Writer::Writer(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()), path_(path) {
  if (!out_) {
    throw FormatError("cannot write " + path.string());
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    out_ << (i ? "," : "") << header[i];
  }
  out_ << '\n';
}

void Writer::row(std::initializer_list<Cell> cells) {
  if (cells.size() != columns_) {
    throw FormatError(path_.string() + ": row has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(columns_));
  }
  bool first = true;
  for (const auto& c : cells) {
    out_ << (first ? "" : ",") << c.text();
    first = false;
  }
  out_ << '\n';
}

}  // namespace kinv::csv
